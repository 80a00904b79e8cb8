#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "patrec/action.hpp"
#include "patrec/dataset.hpp"

namespace patrec {

/// Seeded random balanced partition of row indices into k folds.
struct FoldAssignment {
    int k = 0;
    std::vector<int> fold_of;  // length n, values in [0, k)
    std::uint64_t seed = 0;

    std::vector<Eigen::Index> rows_in_fold(int fold) const;
    std::vector<Eigen::Index> rows_not_in_fold(int fold) const;
};

/// Uniform random partition with fold sizes differing by at most one,
/// a pure function of (n, k, seed) on every platform.
FoldAssignment assign_folds(Eigen::Index n, int k, std::uint64_t seed);

/// For each fold, trains spec on the other folds and runs it on the held-out
/// rows; outputs are reassembled in the original row order with the original
/// targets and ids. Folds run independently (in parallel under the openmp
/// backend) and the result does not depend on scheduling.
DataSet kfolds(const ActionSpec& spec, const DataSet& ds, int k, std::uint64_t seed,
               kernels::Backend backend = kernels::default_backend());

/// Receiver operating characteristic of a one-column scored dataset.
struct RocCurve {
    std::vector<double> pf;          // false-alarm rate, ascending from 0 to 1
    std::vector<double> pd;          // detection rate, non-decreasing from 0 to 1
    std::vector<double> thresholds;  // score cutoffs, +inf first
    double auc = 0.0;                // trapezoidal area

    std::size_t size() const { return pf.size(); }
};

/// Sweeps thresholds across the distinct score values from high to low
/// (tied scores move as one step). The dataset must carry binary class
/// labels and exactly one score column; the higher label is the positive
/// class. The trapezoidal area equals the pairwise win statistic with ties
/// counted as one half.
RocCurve roc(const DataSet& scored);

struct ConfusionCounts {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

/// score >= threshold predicts the positive class.
ConfusionCounts confusion_at_threshold(const DataSet& scored, double threshold);

/// threshold,pf,pd rows plus a trailing "# auc,<value>" summary line.
void write_roc_csv(const RocCurve& curve, std::ostream& out);

}  // namespace patrec
