#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "patrec/error.hpp"

namespace patrec {

/// Labels or values attached to the rows of a DataSet.
struct TargetBlock {
    enum class Kind { class_labels, regression_values, scores };

    Kind kind = Kind::class_labels;
    std::vector<int> labels;                   // class_labels
    Eigen::VectorXd values;                    // regression_values / scores
    std::vector<int> label_set;                // sorted ascending, class_labels only
    std::map<int, std::string> class_names;    // class_labels only, may be partial

    static TargetBlock classes(std::vector<int> labels,
                               std::map<int, std::string> names = {});
    static TargetBlock regression(Eigen::VectorXd values);
    static TargetBlock scores(Eigen::VectorXd values);

    std::size_t size() const {
        return kind == Kind::class_labels ? labels.size()
                                          : static_cast<std::size_t>(values.size());
    }
    std::string name_of(int label) const;

    bool operator==(const TargetBlock& other) const;

    /// Throws on violated invariants (labels outside the declared set,
    /// empty or unsorted label set).
    void validate() const;
};

/// Immutable observations matrix with optional targets. The single value
/// type flowing between all actions; every operation returns a fresh copy.
class DataSet {
public:
    DataSet() = default;
    DataSet(Eigen::MatrixXd observations,
            std::optional<TargetBlock> targets = std::nullopt,
            std::vector<std::string> feature_names = {},
            std::vector<std::string> observation_ids = {});

    Eigen::Index n() const { return observations_.rows(); }
    Eigen::Index d() const { return observations_.cols(); }

    const Eigen::MatrixXd& observations() const { return observations_; }
    bool has_targets() const { return targets_.has_value(); }
    const TargetBlock& targets() const;
    const std::vector<std::string>& feature_names() const { return feature_names_; }
    const std::vector<std::string>& observation_ids() const { return observation_ids_; }

    /// Same rows, ids and targets, new feature block. The shape every
    /// run() implementation uses to emit its output.
    DataSet with_observations(Eigen::MatrixXd observations,
                              std::vector<std::string> feature_names) const;
    DataSet with_targets(TargetBlock targets) const;
    DataSet without_targets() const;

private:
    Eigen::MatrixXd observations_;
    std::optional<TargetBlock> targets_;
    std::vector<std::string> feature_names_;
    std::vector<std::string> observation_ids_;
};

struct DatasetSummary {
    std::size_t n_observations = 0;
    std::size_t n_features = 0;
    std::optional<std::size_t> n_classes;
    std::map<int, std::size_t> class_counts;
    std::map<int, std::string> class_names;
};

DatasetSummary summarize(const DataSet& ds);

enum class TargetKind { class_labels, regression_values };

/// Reads an RFC-4180-style CSV (header row mandatory, '.' decimal separator).
/// The target column, when named, may hold integers or strings; strings are
/// mapped to integer labels in first-appearance order. All feature cells must
/// parse as finite reals.
DataSet load_csv(const std::filesystem::path& path,
                 const std::optional<std::string>& target_column = std::nullopt,
                 TargetKind target_kind = TargetKind::class_labels);
DataSet load_csv(std::istream& in,
                 const std::optional<std::string>& target_column = std::nullopt,
                 TargetKind target_kind = TargetKind::class_labels,
                 const std::string& source_name = "<stream>");

/// Name of the last header column. The CLI treats it as the default target.
std::string csv_last_column(const std::filesystem::path& path);

/// Writes features (and the target column, when present) back out with
/// 17-significant-digit precision so a reload reproduces the values.
void write_csv(const DataSet& ds, std::ostream& out,
               const std::string& target_column = "target");
void write_csv(const DataSet& ds, const std::filesystem::path& path,
               const std::string& target_column = "target");

/// The bundled Fisher iris data: 150 observations, sepal/petal length and
/// width, three species. Deterministic and byte-identical across calls.
DataSet gen_iris();

/// New dataset with identical observations and binary labels:
/// 1 = positive_class, 0 = everything else.
DataSet relabel_one_vs_rest(const DataSet& ds, int positive_class);
/// Same, looking the class up by name (or by decimal label text).
DataSet relabel_one_vs_rest(const DataSet& ds, const std::string& positive_class);

/// Column subset in the order given by indices.
DataSet retain_features(const DataSet& ds, const std::vector<Eigen::Index>& indices);

/// Features of a followed by features of b. Row counts must match and the
/// targets must agree (or at most one side may carry them).
DataSet concat_features(const DataSet& a, const DataSet& b);

/// Row subset in the order given by indices (targets and ids follow).
DataSet take_rows(const DataSet& ds, const std::vector<Eigen::Index>& indices);

}  // namespace patrec
