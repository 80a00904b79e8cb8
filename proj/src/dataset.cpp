#include "patrec/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "patrec/format.hpp"

namespace patrec {

namespace {

std::vector<std::string> default_feature_names(Eigen::Index d) {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(d));
    for (Eigen::Index j = 0; j < d; ++j) names.push_back("f" + std::to_string(j + 1));
    return names;
}

std::vector<std::string> default_observation_ids(Eigen::Index n) {
    std::vector<std::string> ids;
    ids.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) ids.push_back(std::to_string(i));
    return ids;
}

std::string trimmed(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

bool parse_finite_double(const std::string& text, double& out) {
    const char* first = text.data();
    const char* last = first + text.size();
    auto [ptr, ec] = std::from_chars(first, last, out, std::chars_format::general);
    return ec == std::errc{} && ptr == last && std::isfinite(out);
}

bool parse_int(const std::string& text, int& out) {
    const char* first = text.data();
    const char* last = first + text.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

// One RFC-4180 record; quoted fields may span lines and contain "" escapes.
// Returns false at end of input.
bool read_record(std::istream& in, std::vector<std::string>& fields,
                 const std::string& source, std::size_t& line_no) {
    fields.clear();
    int c = in.get();
    if (c == EOF) return false;
    std::string field;
    bool in_quotes = false;
    bool any = false;
    while (true) {
        if (c == EOF) {
            if (in_quotes)
                throw Error(errc::ragged_rows, source + ": unterminated quoted field");
            fields.push_back(field);
            return true;
        }
        char ch = static_cast<char>(c);
        if (in_quotes) {
            if (ch == '"') {
                if (in.peek() == '"') {
                    field.push_back('"');
                    in.get();
                } else {
                    in_quotes = false;
                }
            } else {
                if (ch == '\n') ++line_no;
                field.push_back(ch);
            }
        } else if (ch == '"' && field.empty() && !any) {
            in_quotes = true;
        } else if (ch == ',') {
            fields.push_back(field);
            field.clear();
            any = false;
            c = in.get();
            continue;
        } else if (ch == '\n') {
            ++line_no;
            if (!field.empty() && field.back() == '\r') field.pop_back();
            fields.push_back(field);
            return true;
        } else {
            field.push_back(ch);
            any = true;
        }
        c = in.get();
    }
}

void skip_bom(std::istream& in) {
    if (in.peek() == 0xEF) {
        char bom[3];
        in.read(bom, 3);
        if (in.gcount() != 3 || bom[1] != char(0xBB) || bom[2] != char(0xBF)) {
            in.clear();
            in.seekg(0);
        }
    }
}

}  // namespace

TargetBlock TargetBlock::classes(std::vector<int> labels, std::map<int, std::string> names) {
    TargetBlock t;
    t.kind = Kind::class_labels;
    t.labels = std::move(labels);
    t.class_names = std::move(names);
    std::set<int> uniq(t.labels.begin(), t.labels.end());
    for (const auto& [label, _] : t.class_names) uniq.insert(label);
    t.label_set.assign(uniq.begin(), uniq.end());
    t.validate();
    return t;
}

TargetBlock TargetBlock::regression(Eigen::VectorXd values) {
    TargetBlock t;
    t.kind = Kind::regression_values;
    t.values = std::move(values);
    return t;
}

TargetBlock TargetBlock::scores(Eigen::VectorXd values) {
    TargetBlock t;
    t.kind = Kind::scores;
    t.values = std::move(values);
    return t;
}

std::string TargetBlock::name_of(int label) const {
    auto it = class_names.find(label);
    return it != class_names.end() ? it->second : std::to_string(label);
}

bool TargetBlock::operator==(const TargetBlock& other) const {
    if (kind != other.kind) return false;
    if (kind == Kind::class_labels)
        return labels == other.labels && label_set == other.label_set;
    return values.size() == other.values.size() && values == other.values;
}

void TargetBlock::validate() const {
    if (kind != Kind::class_labels) return;
    if (label_set.empty())
        throw Error(errc::unknown_class, "class target block has an empty label set");
    if (!std::is_sorted(label_set.begin(), label_set.end()))
        throw Error(errc::unknown_class, "label set is not sorted");
    for (int label : labels) {
        if (!std::binary_search(label_set.begin(), label_set.end(), label))
            throw Error(errc::unknown_class,
                        "label " + std::to_string(label) + " not in the declared label set");
    }
}

DataSet::DataSet(Eigen::MatrixXd observations, std::optional<TargetBlock> targets,
                 std::vector<std::string> feature_names,
                 std::vector<std::string> observation_ids)
    : observations_(std::move(observations)),
      targets_(std::move(targets)),
      feature_names_(std::move(feature_names)),
      observation_ids_(std::move(observation_ids)) {
    if (feature_names_.empty()) feature_names_ = default_feature_names(d());
    if (observation_ids_.empty()) observation_ids_ = default_observation_ids(n());
    if (static_cast<Eigen::Index>(feature_names_.size()) != d())
        throw Error(errc::dimension_mismatch,
                    "feature name count " + std::to_string(feature_names_.size()) +
                        " does not match feature count " + std::to_string(d()));
    if (static_cast<Eigen::Index>(observation_ids_.size()) != n())
        throw Error(errc::dimension_mismatch, "observation id count does not match row count");
    if (targets_) {
        targets_->validate();
        if (static_cast<Eigen::Index>(targets_->size()) != n())
            throw Error(errc::row_count_mismatch,
                        "target length " + std::to_string(targets_->size()) +
                            " does not match row count " + std::to_string(n()));
    }
}

const TargetBlock& DataSet::targets() const {
    if (!targets_) throw Error(errc::missing_targets, "dataset has no targets");
    return *targets_;
}

DataSet DataSet::with_observations(Eigen::MatrixXd observations,
                                   std::vector<std::string> feature_names) const {
    if (observations.rows() != n())
        throw Error(errc::row_count_mismatch, "replacement observations change the row count");
    return DataSet(std::move(observations), targets_, std::move(feature_names),
                   observation_ids_);
}

DataSet DataSet::with_targets(TargetBlock targets) const {
    return DataSet(observations_, std::move(targets), feature_names_, observation_ids_);
}

DataSet DataSet::without_targets() const {
    return DataSet(observations_, std::nullopt, feature_names_, observation_ids_);
}

DatasetSummary summarize(const DataSet& ds) {
    DatasetSummary s;
    s.n_observations = static_cast<std::size_t>(ds.n());
    s.n_features = static_cast<std::size_t>(ds.d());
    if (ds.has_targets() && ds.targets().kind == TargetBlock::Kind::class_labels) {
        const auto& t = ds.targets();
        for (int label : t.label_set) s.class_counts[label] = 0;
        for (int label : t.labels) ++s.class_counts[label];
        s.n_classes = s.class_counts.size();
        for (int label : t.label_set) s.class_names[label] = t.name_of(label);
    }
    return s;
}

DataSet load_csv(const std::filesystem::path& path,
                 const std::optional<std::string>& target_column, TargetKind target_kind) {
    std::ifstream in(path, std::ios::binary);
    if (!in.is_open())
        throw Error(errc::io_error, "cannot open " + path.string());
    return load_csv(in, target_column, target_kind, path.string());
}

DataSet load_csv(std::istream& in, const std::optional<std::string>& target_column,
                 TargetKind target_kind, const std::string& source_name) {
    skip_bom(in);
    std::size_t line_no = 1;
    std::vector<std::string> header;
    if (!read_record(in, header, source_name, line_no) || header.empty() ||
        (header.size() == 1 && trimmed(header[0]).empty()))
        throw Error(errc::empty_file, source_name + ": no header row");
    for (auto& h : header) h = trimmed(h);

    std::ptrdiff_t target_idx = -1;
    if (target_column) {
        auto it = std::find(header.begin(), header.end(), *target_column);
        if (it == header.end())
            throw Error(errc::missing_column,
                        source_name + ": no column named '" + *target_column + "'");
        target_idx = it - header.begin();
    }

    std::vector<std::string> feature_names;
    for (std::size_t j = 0; j < header.size(); ++j)
        if (static_cast<std::ptrdiff_t>(j) != target_idx) feature_names.push_back(header[j]);

    std::vector<std::vector<double>> rows;
    std::vector<std::string> raw_targets;
    std::vector<std::string> record;
    while (true) {
        std::size_t record_line = line_no;
        if (!read_record(in, record, source_name, line_no)) break;
        if (record.size() == 1 && trimmed(record[0]).empty()) continue;  // blank line
        if (record.size() != header.size())
            throw Error(errc::ragged_rows,
                        source_name + ":" + std::to_string(record_line) + ": expected " +
                            std::to_string(header.size()) + " fields, got " +
                            std::to_string(record.size()));
        std::vector<double> row;
        row.reserve(feature_names.size());
        for (std::size_t j = 0; j < record.size(); ++j) {
            std::string cell = trimmed(record[j]);
            if (static_cast<std::ptrdiff_t>(j) == target_idx) {
                raw_targets.push_back(cell);
                continue;
            }
            double v;
            if (!parse_finite_double(cell, v))
                throw Error(errc::non_numeric_feature,
                            source_name + ":" + std::to_string(record_line) + ": column '" +
                                header[j] + "' value '" + cell + "' is not a finite number");
            row.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty())
        throw Error(errc::empty_file, source_name + ": no data rows");

    const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
    const Eigen::Index d = static_cast<Eigen::Index>(feature_names.size());
    Eigen::MatrixXd obs(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < d; ++j) obs(i, j) = rows[i][j];

    std::optional<TargetBlock> targets;
    if (target_idx >= 0) {
        if (target_kind == TargetKind::regression_values) {
            Eigen::VectorXd values(n);
            for (Eigen::Index i = 0; i < n; ++i) {
                double v;
                if (!parse_finite_double(raw_targets[i], v))
                    throw Error(errc::non_numeric_feature,
                                source_name + ": target value '" + raw_targets[i] +
                                    "' is not a finite number");
                values(i) = v;
            }
            targets = TargetBlock::regression(std::move(values));
        } else {
            bool all_int = true;
            for (const auto& cell : raw_targets) {
                int unused;
                if (!parse_int(cell, unused)) {
                    all_int = false;
                    break;
                }
            }
            std::vector<int> labels(raw_targets.size());
            std::map<int, std::string> names;
            if (all_int) {
                for (std::size_t i = 0; i < raw_targets.size(); ++i) {
                    parse_int(raw_targets[i], labels[i]);
                    names[labels[i]] = raw_targets[i];
                }
            } else {
                // string labels become integers in first-appearance order
                std::map<std::string, int> mapping;
                int next = 0;
                for (std::size_t i = 0; i < raw_targets.size(); ++i) {
                    auto [it, inserted] = mapping.emplace(raw_targets[i], next);
                    if (inserted) {
                        names[next] = raw_targets[i];
                        ++next;
                    }
                    labels[i] = it->second;
                }
            }
            targets = TargetBlock::classes(std::move(labels), std::move(names));
        }
    }
    return DataSet(std::move(obs), std::move(targets), std::move(feature_names));
}

std::string csv_last_column(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.is_open())
        throw Error(errc::io_error, "cannot open " + path.string());
    skip_bom(in);
    std::size_t line_no = 1;
    std::vector<std::string> header;
    if (!read_record(in, header, path.string(), line_no) || header.empty() ||
        (header.size() == 1 && trimmed(header[0]).empty()))
        throw Error(errc::empty_file, path.string() + ": no header row");
    return trimmed(header.back());
}

void write_csv(const DataSet& ds, std::ostream& out, const std::string& target_column) {
    for (std::size_t j = 0; j < ds.feature_names().size(); ++j) {
        if (j) out << ',';
        out << ds.feature_names()[j];
    }
    const bool with_targets = ds.has_targets();
    if (with_targets) out << (ds.d() > 0 ? "," : "") << target_column;
    out << '\n';
    for (Eigen::Index i = 0; i < ds.n(); ++i) {
        for (Eigen::Index j = 0; j < ds.d(); ++j) {
            if (j) out << ',';
            out << format_g17(ds.observations()(i, j));
        }
        if (with_targets) {
            if (ds.d() > 0) out << ',';
            const auto& t = ds.targets();
            if (t.kind == TargetBlock::Kind::class_labels)
                out << t.name_of(t.labels[static_cast<std::size_t>(i)]);
            else
                out << format_g17(t.values(i));
        }
        out << '\n';
    }
}

void write_csv(const DataSet& ds, const std::filesystem::path& path,
               const std::string& target_column) {
    std::ofstream out(path, std::ios::binary);
    if (!out.is_open()) throw Error(errc::io_error, "cannot write " + path.string());
    write_csv(ds, out, target_column);
}

namespace detail {
const char* iris_csv_text();  // generated from data/iris.csv
}

DataSet gen_iris() {
    std::istringstream in(detail::iris_csv_text());
    return load_csv(in, std::string("species"), TargetKind::class_labels, "iris");
}

DataSet relabel_one_vs_rest(const DataSet& ds, int positive_class) {
    const TargetBlock& t = ds.targets();
    if (t.kind != TargetBlock::Kind::class_labels)
        throw Error(errc::missing_targets, "one-vs-rest relabeling needs class labels");
    if (!std::binary_search(t.label_set.begin(), t.label_set.end(), positive_class))
        throw Error(errc::unknown_class,
                    "class " + std::to_string(positive_class) + " is not in the label set");
    std::vector<int> labels(t.labels.size());
    for (std::size_t i = 0; i < t.labels.size(); ++i)
        labels[i] = t.labels[i] == positive_class ? 1 : 0;
    std::map<int, std::string> names{{0, "rest"}, {1, t.name_of(positive_class)}};
    return ds.with_targets(TargetBlock::classes(std::move(labels), std::move(names)));
}

DataSet relabel_one_vs_rest(const DataSet& ds, const std::string& positive_class) {
    const TargetBlock& t = ds.targets();
    for (const auto& [label, name] : t.class_names)
        if (name == positive_class) return relabel_one_vs_rest(ds, label);
    int label;
    if (parse_int(positive_class, label)) return relabel_one_vs_rest(ds, label);
    throw Error(errc::unknown_class, "no class named '" + positive_class + "'");
}

DataSet retain_features(const DataSet& ds, const std::vector<Eigen::Index>& indices) {
    for (Eigen::Index j : indices)
        if (j < 0 || j >= ds.d())
            throw Error(errc::index_out_of_range,
                        "feature index " + std::to_string(j) + " outside [0, " +
                            std::to_string(ds.d()) + ")");
    Eigen::MatrixXd obs(ds.n(), static_cast<Eigen::Index>(indices.size()));
    std::vector<std::string> names;
    names.reserve(indices.size());
    for (std::size_t k = 0; k < indices.size(); ++k) {
        obs.col(static_cast<Eigen::Index>(k)) = ds.observations().col(indices[k]);
        names.push_back(ds.feature_names()[static_cast<std::size_t>(indices[k])]);
    }
    return DataSet(std::move(obs),
                   ds.has_targets() ? std::optional<TargetBlock>(ds.targets()) : std::nullopt,
                   std::move(names), ds.observation_ids());
}

DataSet concat_features(const DataSet& a, const DataSet& b) {
    if (a.n() != b.n())
        throw Error(errc::row_count_mismatch,
                    "row counts differ: " + std::to_string(a.n()) + " vs " +
                        std::to_string(b.n()));
    std::optional<TargetBlock> targets;
    if (a.has_targets() && b.has_targets()) {
        if (!(a.targets() == b.targets()))
            throw Error(errc::target_conflict, "both sides carry targets and they differ");
        targets = a.targets();
    } else if (a.has_targets()) {
        targets = a.targets();
    } else if (b.has_targets()) {
        targets = b.targets();
    }
    Eigen::MatrixXd obs(a.n(), a.d() + b.d());
    obs << a.observations(), b.observations();
    std::vector<std::string> names = a.feature_names();
    names.insert(names.end(), b.feature_names().begin(), b.feature_names().end());
    return DataSet(std::move(obs), std::move(targets), std::move(names), a.observation_ids());
}

DataSet take_rows(const DataSet& ds, const std::vector<Eigen::Index>& indices) {
    for (Eigen::Index i : indices)
        if (i < 0 || i >= ds.n())
            throw Error(errc::index_out_of_range,
                        "row index " + std::to_string(i) + " outside [0, " +
                            std::to_string(ds.n()) + ")");
    const Eigen::Index m = static_cast<Eigen::Index>(indices.size());
    Eigen::MatrixXd obs(m, ds.d());
    std::vector<std::string> ids;
    ids.reserve(indices.size());
    for (Eigen::Index k = 0; k < m; ++k) {
        obs.row(k) = ds.observations().row(indices[static_cast<std::size_t>(k)]);
        ids.push_back(ds.observation_ids()[static_cast<std::size_t>(indices[static_cast<std::size_t>(k)])]);
    }
    std::optional<TargetBlock> targets;
    if (ds.has_targets()) {
        const TargetBlock& t = ds.targets();
        if (t.kind == TargetBlock::Kind::class_labels) {
            std::vector<int> labels;
            labels.reserve(indices.size());
            for (Eigen::Index i : indices) labels.push_back(t.labels[static_cast<std::size_t>(i)]);
            TargetBlock nt = t;
            nt.labels = std::move(labels);
            targets = std::move(nt);
        } else {
            Eigen::VectorXd values(m);
            for (Eigen::Index k = 0; k < m; ++k)
                values(k) = t.values(indices[static_cast<std::size_t>(k)]);
            TargetBlock nt = t;
            nt.values = std::move(values);
            targets = std::move(nt);
        }
    }
    return DataSet(std::move(obs), std::move(targets), ds.feature_names(), std::move(ids));
}

}  // namespace patrec
