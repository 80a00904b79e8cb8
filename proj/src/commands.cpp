#include "patrec/commands.hpp"

#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "patrec/action.hpp"
#include "patrec/dataset.hpp"
#include "patrec/dsl.hpp"
#include "patrec/error.hpp"
#include "patrec/eval.hpp"
#include "patrec/format.hpp"
#include "patrec/serialize.hpp"

namespace patrec {

namespace {

constexpr int exit_ok = 0;
constexpr int exit_unexpected = 1;
constexpr int exit_ingestion = 2;
constexpr int exit_training = 3;
constexpr int exit_pipeline = 4;
constexpr int exit_contour_dim = 5;
constexpr int exit_model_mismatch = 6;

int exit_code_for(errc code) {
    switch (code) {
        case errc::io_error:
        case errc::missing_column:
        case errc::non_numeric_feature:
        case errc::ragged_rows:
        case errc::empty_file:
        case errc::unknown_class:
        case errc::index_out_of_range:
        case errc::row_count_mismatch:
        case errc::target_conflict:
            return exit_ingestion;
        case errc::syntax_error:
        case errc::unknown_action:
        case errc::bad_arity:
        case errc::bad_param_name:
        case errc::bad_param_value:
            return exit_pipeline;
        default:
            return exit_training;
    }
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_unexpected;
    }
}

DataSet load_dataset(const RunConfig& config) {
    DataSet ds;
    if (config.dataset == "iris") {
        ds = gen_iris();
    } else {
        const std::filesystem::path path(config.dataset);
        std::optional<std::string> target;
        if (!config.no_target) {
            target = config.target_column ? *config.target_column : csv_last_column(path);
        }
        ds = load_csv(path, target, TargetKind::class_labels);
    }
    if (config.positive_class) ds = relabel_one_vs_rest(ds, *config.positive_class);
    return ds;
}

ActionSpec pipeline_spec(const RunConfig& config) {
    std::string text = config.pipeline;
    if (config.pipeline_file) {
        std::ifstream in(*config.pipeline_file, std::ios::binary);
        if (!in) throw Error(errc::io_error, "cannot open " + config.pipeline_file->string());
        std::ostringstream buf;
        buf << in.rdbuf();
        text = buf.str();
    }
    return parse_pipeline(text);
}

void ensure_out_dir(const RunConfig& config) {
    std::error_code ec;
    std::filesystem::create_directories(config.out_dir, ec);
    if (ec) {
        throw Error(errc::io_error,
                    "cannot create " + config.out_dir.string() + ": " + ec.message());
    }
}

std::filesystem::path model_path(const RunConfig& config) {
    return config.model ? *config.model : config.out_dir / "model.json";
}

std::ofstream open_out_file(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(errc::io_error, "cannot open " + path.string() + " for writing");
    return out;
}

void check_written(const std::ostream& out, const std::filesystem::path& path) {
    if (!out) throw Error(errc::io_error, "failed writing " + path.string());
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string quoted = "\"";
    for (const char c : s) {
        if (c == '"') quoted += "\"\"";
        else quoted += c;
    }
    quoted += '"';
    return quoted;
}

void write_scores_csv(const DataSet& scored, const std::filesystem::path& path) {
    std::ofstream out = open_out_file(path);
    out << "id";
    if (scored.has_targets()) out << ",target";
    for (const std::string& name : scored.feature_names()) out << ',' << csv_field(name);
    out << '\n';
    for (Eigen::Index i = 0; i < scored.n(); ++i) {
        out << csv_field(scored.observation_ids()[static_cast<std::size_t>(i)]);
        if (scored.has_targets()) {
            const TargetBlock& t = scored.targets();
            if (t.kind == TargetBlock::Kind::class_labels) {
                out << ',' << t.labels[static_cast<std::size_t>(i)];
            } else {
                out << ',' << format_g17(t.values[i]);
            }
        }
        for (Eigen::Index j = 0; j < scored.d(); ++j) {
            out << ',' << format_g17(scored.observations()(i, j));
        }
        out << '\n';
    }
    check_written(out, path);
}

}  // namespace

int cmd_info(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const DataSet ds = load_dataset(config);
        const DatasetSummary s = summarize(ds);
        out << "dataset: " << config.dataset << '\n';
        out << "observations: " << s.n_observations << '\n';
        out << "features: " << s.n_features;
        if (!ds.feature_names().empty()) {
            out << " (";
            for (std::size_t j = 0; j < ds.feature_names().size(); ++j) {
                if (j) out << ", ";
                out << ds.feature_names()[j];
            }
            out << ')';
        }
        out << '\n';
        if (s.n_classes) {
            out << "classes: " << *s.n_classes << '\n';
            for (const auto& [label, count] : s.class_counts) {
                out << "  " << label;
                const auto it = s.class_names.find(label);
                if (it != s.class_names.end() && it->second != std::to_string(label)) {
                    out << " (" << it->second << ")";
                }
                out << ": " << count << '\n';
            }
        } else {
            out << "targets: none\n";
        }
        return exit_ok;
    });
}

int cmd_kfolds(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const ActionSpec spec = pipeline_spec(config);
        if (!ends_in_classifier(spec)) {
            err << "error: pipeline emits no score column\n";
            return exit_pipeline;
        }
        const DataSet ds = load_dataset(config);
        const DataSet scored = kfolds(spec, ds, config.k, config.seed, config.backend);
        const RocCurve curve = roc(scored);

        ensure_out_dir(config);
        write_scores_csv(scored, config.out_dir / "scores.csv");
        {
            std::ofstream roc_out = open_out_file(config.out_dir / "roc.csv");
            write_roc_csv(curve, roc_out);
            check_written(roc_out, config.out_dir / "roc.csv");
        }
        {
            nlohmann::json summary;
            summary["auc"] = curve.auc;
            summary["k"] = config.k;
            summary["seed"] = config.seed;
            summary["pipeline"] = print_canonical(spec);
            std::ofstream sum_out = open_out_file(config.out_dir / "summary.json");
            sum_out << summary.dump(2) << '\n';
            check_written(sum_out, config.out_dir / "summary.json");
        }

        out << "pipeline: " << print_canonical(spec) << '\n';
        out << "auc: " << format_shortest(curve.auc) << '\n';
        out << "wrote scores.csv, roc.csv, summary.json to " << config.out_dir.string() << '\n';
        return exit_ok;
    });
}

int cmd_contour(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const ActionSpec spec = pipeline_spec(config);
        if (!ends_in_classifier(spec)) {
            err << "error: pipeline emits no score column\n";
            return exit_pipeline;
        }
        if (config.grid_steps < 2) {
            throw Error(errc::bad_param_value, "grid steps must be at least 2");
        }
        if (!(config.grid_margin >= 0.0)) {
            throw Error(errc::bad_param_value, "grid margin must be non-negative");
        }

        const DataSet ds = load_dataset(config);
        const TrainedAction model = train(spec, ds, config.backend);

        // The classifier is the last sequential stage; everything before it
        // projects the data into the classifier's input space.
        std::vector<const TrainedAction*> prefix;
        const TrainedAction* classifier = &model;
        if (model.spec().kind() == ActionKind::sequential) {
            const auto& children = std::get<CompositeState>(model.state()).children;
            for (std::size_t i = 0; i + 1 < children.size(); ++i) prefix.push_back(&children[i]);
            classifier = &children.back();
        }

        DataSet projected = ds;
        for (const TrainedAction* stage : prefix) {
            projected = stage->run(projected, config.backend);
        }
        if (projected.d() != 2) {
            err << "error: the classifier stage needs 2-dimensional input, got "
                << projected.d() << " columns\n";
            return exit_contour_dim;
        }

        const auto& points = projected.observations();
        double x_lo = points.col(0).minCoeff();
        double x_hi = points.col(0).maxCoeff();
        double y_lo = points.col(1).minCoeff();
        double y_hi = points.col(1).maxCoeff();
        const double x_pad = config.grid_margin * (x_hi - x_lo);
        const double y_pad = config.grid_margin * (y_hi - y_lo);
        x_lo -= x_pad;
        x_hi += x_pad;
        y_lo -= y_pad;
        y_hi += y_pad;

        const int steps = config.grid_steps;
        Eigen::MatrixXd grid(static_cast<Eigen::Index>(steps) * steps, 2);
        for (int yi = 0; yi < steps; ++yi) {
            const double y = y_lo + (y_hi - y_lo) * yi / (steps - 1);
            for (int xi = 0; xi < steps; ++xi) {
                const double x = x_lo + (x_hi - x_lo) * xi / (steps - 1);
                grid(static_cast<Eigen::Index>(yi) * steps + xi, 0) = x;
                grid(static_cast<Eigen::Index>(yi) * steps + xi, 1) = y;
            }
        }

        const DataSet grid_scores = classifier->run(
            DataSet(grid, std::nullopt, projected.feature_names()), config.backend);
        if (grid_scores.d() != 1) {
            throw Error(errc::multiple_score_columns,
                        "contour needs a single score column; binarize the targets with "
                        "--positive-class");
        }

        ensure_out_dir(config);
        {
            std::ofstream contour_out = open_out_file(config.out_dir / "contour.csv");
            contour_out << "x,y,score\n";
            for (Eigen::Index i = 0; i < grid.rows(); ++i) {
                contour_out << format_g17(grid(i, 0)) << ',' << format_g17(grid(i, 1)) << ','
                            << format_g17(grid_scores.observations()(i, 0)) << '\n';
            }
            check_written(contour_out, config.out_dir / "contour.csv");
        }
        {
            std::ofstream points_out = open_out_file(config.out_dir / "points.csv");
            points_out << "x,y,label\n";
            for (Eigen::Index i = 0; i < projected.n(); ++i) {
                points_out << format_g17(points(i, 0)) << ',' << format_g17(points(i, 1)) << ','
                           << projected.targets().labels[static_cast<std::size_t>(i)] << '\n';
            }
            check_written(points_out, config.out_dir / "points.csv");
        }

        out << "grid: " << steps << "x" << steps << " over [" << format_shortest(x_lo) << ", "
            << format_shortest(x_hi) << "] x [" << format_shortest(y_lo) << ", "
            << format_shortest(y_hi) << "]\n";
        out << "wrote contour.csv, points.csv to " << config.out_dir.string() << '\n';
        return exit_ok;
    });
}

int cmd_train(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const ActionSpec spec = pipeline_spec(config);
        const DataSet ds = load_dataset(config);
        const TrainedAction model = train(spec, ds, config.backend);
        ensure_out_dir(config);
        const std::filesystem::path path = model_path(config);
        save_model(model, path);
        out << "pipeline: " << print_canonical(spec) << '\n';
        out << "wrote " << path.string() << '\n';
        return exit_ok;
    });
}

int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const TrainedAction model = load_model(model_path(config));
        const DataSet ds = load_dataset(config);
        if (ds.d() != model.trained_input_dim()) {
            err << "error: the model expects " << model.trained_input_dim()
                << " features, the dataset has " << ds.d() << '\n';
            return exit_model_mismatch;
        }
        DataSet result;
        try {
            result = model.run(ds, config.backend);
        } catch (const Error& e) {
            if (e.code() == errc::dimension_mismatch) {
                err << "error: " << e.what() << '\n';
                return exit_model_mismatch;
            }
            throw;
        }
        ensure_out_dir(config);
        write_scores_csv(result, config.out_dir / "scores.csv");
        out << "wrote " << (config.out_dir / "scores.csv").string() << '\n';
        return exit_ok;
    });
}

}  // namespace patrec
