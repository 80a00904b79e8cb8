#include "patrec/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <exception>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "patrec/error.hpp"
#include "patrec/format.hpp"

namespace patrec {

namespace {

// Unbiased draw in [0, bound) by rejection. The raw mt19937_64 stream is
// fully specified by the standard; the library distributions are not, and
// fold assignments must not change across compilers.
std::uint64_t draw_below(std::mt19937_64& eng, std::uint64_t bound) {
    const std::uint64_t threshold = -bound % bound;
    for (;;) {
        const std::uint64_t v = eng();
        if (v >= threshold) return v % bound;
    }
}

std::string strip_error_prefix(errc code, const char* what) {
    const std::string prefix = std::string(errc_name(code)) + ": ";
    if (std::strncmp(what, prefix.c_str(), prefix.size()) == 0) return what + prefix.size();
    return what;
}

// Scores plus binary labels extracted from a one-column scored dataset,
// shared between roc and confusion_at_threshold.
struct BinaryScores {
    Eigen::VectorXd scores;
    std::vector<bool> positive;
    std::size_t n_pos = 0;
    std::size_t n_neg = 0;
};

BinaryScores extract_binary_scores(const DataSet& scored) {
    if (!scored.has_targets() ||
        scored.targets().kind != TargetBlock::Kind::class_labels) {
        throw Error(errc::missing_targets, "scoring requires class labels on the dataset");
    }
    if (scored.d() != 1) {
        throw Error(errc::multiple_score_columns,
                    "expected exactly one score column, dataset has " +
                        std::to_string(scored.d()));
    }
    if (scored.n() == 0) throw Error(errc::empty_dataset, "no observations to score");

    const std::vector<int>& labels = scored.targets().labels;
    std::vector<int> present(labels);
    std::sort(present.begin(), present.end());
    present.erase(std::unique(present.begin(), present.end()), present.end());
    if (present.size() < 2) {
        throw Error(errc::one_class_only, "both classes must appear in the targets");
    }
    if (present.size() > 2) {
        throw Error(errc::not_binary, "scoring requires binary targets, found " +
                                          std::to_string(present.size()) + " classes");
    }

    BinaryScores out;
    out.scores = scored.observations().col(0);
    for (Eigen::Index i = 0; i < out.scores.size(); ++i) {
        if (!std::isfinite(out.scores[i])) {
            throw Error(errc::non_numeric_feature,
                        "non-finite score at row " + std::to_string(i));
        }
    }
    const int positive_label = present[1];  // the higher label is the positive class
    out.positive.resize(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out.positive[i] = labels[i] == positive_label;
        ++(out.positive[i] ? out.n_pos : out.n_neg);
    }
    return out;
}

}  // namespace

std::vector<Eigen::Index> FoldAssignment::rows_in_fold(int fold) const {
    std::vector<Eigen::Index> rows;
    for (std::size_t i = 0; i < fold_of.size(); ++i) {
        if (fold_of[i] == fold) rows.push_back(static_cast<Eigen::Index>(i));
    }
    return rows;
}

std::vector<Eigen::Index> FoldAssignment::rows_not_in_fold(int fold) const {
    std::vector<Eigen::Index> rows;
    for (std::size_t i = 0; i < fold_of.size(); ++i) {
        if (fold_of[i] != fold) rows.push_back(static_cast<Eigen::Index>(i));
    }
    return rows;
}

FoldAssignment assign_folds(Eigen::Index n, int k, std::uint64_t seed) {
    if (k < 2 || static_cast<Eigen::Index>(k) > n) {
        throw Error(errc::bad_k, "k must satisfy 2 <= k <= n, got k=" + std::to_string(k) +
                                     " with n=" + std::to_string(n));
    }

    std::vector<std::size_t> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 eng(seed);
    for (std::size_t i = order.size() - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(draw_below(eng, i + 1));
        std::swap(order[i], order[j]);
    }

    FoldAssignment out;
    out.k = k;
    out.seed = seed;
    out.fold_of.resize(static_cast<std::size_t>(n));
    // Deal the shuffled rows out in blocks; the first n % k folds get the
    // extra row so sizes differ by at most one.
    const std::size_t base = static_cast<std::size_t>(n) / static_cast<std::size_t>(k);
    const std::size_t extra = static_cast<std::size_t>(n) % static_cast<std::size_t>(k);
    std::size_t pos = 0;
    for (int f = 0; f < k; ++f) {
        const std::size_t size = base + (static_cast<std::size_t>(f) < extra ? 1 : 0);
        for (std::size_t i = 0; i < size; ++i) out.fold_of[order[pos++]] = f;
    }
    return out;
}

DataSet kfolds(const ActionSpec& spec, const DataSet& ds, int k, std::uint64_t seed,
               kernels::Backend backend) {
    const FoldAssignment folds = assign_folds(ds.n(), k, seed);

    struct FoldResult {
        std::vector<Eigen::Index> rows;
        DataSet output;
        std::optional<Error> error;
        std::exception_ptr other_error;
    };
    std::vector<FoldResult> results(static_cast<std::size_t>(k));

    // Folds write disjoint slots and every fold is internally deterministic,
    // so the re-assembled output is independent of scheduling.
#pragma omp parallel for schedule(dynamic) if (backend == kernels::Backend::openmp)
    for (int f = 0; f < k; ++f) {
        FoldResult& slot = results[static_cast<std::size_t>(f)];
        try {
            slot.rows = folds.rows_in_fold(f);
            const DataSet train_ds = take_rows(ds, folds.rows_not_in_fold(f));
            const TrainedAction model = train(spec, train_ds, backend);
            slot.output = model.run(take_rows(ds, slot.rows), backend);
        } catch (const Error& e) {
            slot.error = Error(e.code(), "fold " + std::to_string(f) + ": " +
                                             strip_error_prefix(e.code(), e.what()));
        } catch (...) {
            slot.other_error = std::current_exception();
        }
    }

    for (const FoldResult& slot : results) {
        if (slot.error) throw *slot.error;
        if (slot.other_error) std::rethrow_exception(slot.other_error);
    }

    const std::vector<std::string>& names = results.front().output.feature_names();
    for (int f = 1; f < k; ++f) {
        if (results[static_cast<std::size_t>(f)].output.feature_names() != names) {
            throw Error(errc::dimension_mismatch,
                        "fold " + std::to_string(f) +
                            ": output columns disagree with fold 0 "
                            "(a class is likely absent from one training split)");
        }
    }

    Eigen::MatrixXd assembled(ds.n(), results.front().output.d());
    for (const FoldResult& slot : results) {
        for (std::size_t i = 0; i < slot.rows.size(); ++i) {
            assembled.row(slot.rows[i]) = slot.output.observations().row(static_cast<Eigen::Index>(i));
        }
    }

    DataSet out(std::move(assembled),
                ds.has_targets() ? std::optional<TargetBlock>(ds.targets()) : std::nullopt,
                names, ds.observation_ids());
    return out;
}

RocCurve roc(const DataSet& scored) {
    const BinaryScores bs = extract_binary_scores(scored);
    const Eigen::Index n = bs.scores.size();

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) { return bs.scores[a] > bs.scores[b]; });

    RocCurve curve;
    curve.pf.push_back(0.0);
    curve.pd.push_back(0.0);
    curve.thresholds.push_back(std::numeric_limits<double>::infinity());

    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double value = bs.scores[order[i]];
        // All rows tied at this score cross the threshold together.
        for (; i < order.size() && bs.scores[order[i]] == value; ++i) {
            ++(bs.positive[static_cast<std::size_t>(order[i])] ? tp : fp);
        }
        curve.pf.push_back(static_cast<double>(fp) / static_cast<double>(bs.n_neg));
        curve.pd.push_back(static_cast<double>(tp) / static_cast<double>(bs.n_pos));
        curve.thresholds.push_back(value);
    }

    double area = 0.0;
    for (std::size_t p = 1; p < curve.pf.size(); ++p) {
        area += 0.5 * (curve.pf[p] - curve.pf[p - 1]) * (curve.pd[p] + curve.pd[p - 1]);
    }
    curve.auc = area;
    return curve;
}

ConfusionCounts confusion_at_threshold(const DataSet& scored, double threshold) {
    const BinaryScores bs = extract_binary_scores(scored);
    ConfusionCounts counts;
    for (Eigen::Index i = 0; i < bs.scores.size(); ++i) {
        const bool predicted_positive = bs.scores[i] >= threshold;
        const bool actual_positive = bs.positive[static_cast<std::size_t>(i)];
        if (predicted_positive) {
            ++(actual_positive ? counts.tp : counts.fp);
        } else {
            ++(actual_positive ? counts.fn : counts.tn);
        }
    }
    return counts;
}

void write_roc_csv(const RocCurve& curve, std::ostream& out) {
    out << "threshold,pf,pd\n";
    for (std::size_t i = 0; i < curve.size(); ++i) {
        out << format_g17(curve.thresholds[i]) << ',' << format_g17(curve.pf[i]) << ','
            << format_g17(curve.pd[i]) << '\n';
    }
    out << "# auc," << format_g17(curve.auc) << '\n';
}

}  // namespace patrec
