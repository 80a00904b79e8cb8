#include "patrec/serialize.hpp"

#include <fstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "patrec/error.hpp"

namespace patrec {

namespace {

using nlohmann::json;

json vector_to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        out.push_back(row);
    }
    return out;
}

Eigen::VectorXd vector_from_json(const json& j, const char* where) {
    if (!j.is_array()) throw Error(errc::io_error, std::string(where) + " must be an array");
    Eigen::VectorXd v(j.size());
    Eigen::Index i = 0;
    for (const json& cell : j) {
        if (!cell.is_number()) {
            throw Error(errc::io_error, std::string(where) + " holds a non-numeric entry");
        }
        v[i++] = cell.get<double>();
    }
    return v;
}

Eigen::MatrixXd matrix_from_json(const json& j, const char* where) {
    if (!j.is_array()) throw Error(errc::io_error, std::string(where) + " must be an array");
    if (j.empty()) return Eigen::MatrixXd(0, 0);
    const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
    Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    Eigen::Index r = 0;
    for (const json& row : j) {
        if (!row.is_array() || row.size() != cols) {
            throw Error(errc::io_error, std::string(where) + " rows have uneven lengths");
        }
        Eigen::Index c = 0;
        for (const json& cell : row) {
            if (!cell.is_number()) {
                throw Error(errc::io_error, std::string(where) + " holds a non-numeric entry");
            }
            m(r, c++) = cell.get<double>();
        }
        ++r;
    }
    return m;
}

void require_keys(const json& j, std::initializer_list<const char*> allowed,
                  const char* where) {
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* key : allowed) known = known || item.key() == key;
        if (!known) {
            throw Error(errc::io_error,
                        std::string(where) + ": unexpected key \"" + item.key() + "\"");
        }
    }
}

json state_to_json(const TrainedAction::State& state);

json trained_to_json(const TrainedAction& action) {
    json out;
    out["spec"] = to_json(action.spec());
    out["trained_input_dim"] = action.trained_input_dim();
    out["state"] = state_to_json(action.state());
    return out;
}

json state_to_json(const TrainedAction::State& state) {
    return std::visit(
        [](const auto& s) -> json {
            using S = std::decay_t<decltype(s)>;
            json out;
            if constexpr (std::is_same_v<S, ZmuvState>) {
                out["type"] = "zmuv";
                out["means"] = vector_to_json(s.means);
                out["stds"] = vector_to_json(s.stds);
            } else if constexpr (std::is_same_v<S, PcaState>) {
                out["type"] = "pca";
                out["mean"] = vector_to_json(s.mean);
                out["components"] = matrix_to_json(s.components);
                out["eigenvalues"] = vector_to_json(s.eigenvalues);
            } else if constexpr (std::is_same_v<S, MapState>) {
                out["type"] = "map";
                json classes = json::array();
                for (const ClassGaussian& g : s.classes) {
                    json c;
                    c["label"] = g.label;
                    c["prior"] = g.prior;
                    c["mean"] = vector_to_json(g.mean);
                    c["cov"] = matrix_to_json(g.cov);
                    classes.push_back(std::move(c));
                }
                out["classes"] = std::move(classes);
            } else if constexpr (std::is_same_v<S, RvmState>) {
                out["type"] = "rvm";
                out["kernel"] = {{"kind", "rbf"}, {"bandwidth", s.kernel.bandwidth}};
                out["relevance_vectors"] = matrix_to_json(s.relevance_vectors);
                out["weights"] = vector_to_json(s.weights);
                out["bias"] = s.bias;
                json active = json::array();
                for (Eigen::Index idx : s.active_indices) active.push_back(idx);
                out["active_indices"] = std::move(active);
                out["converged"] = s.converged;
                out["outer_iterations"] = s.outer_iterations;
            } else {
                static_assert(std::is_same_v<S, CompositeState>);
                out["type"] = "composite";
                json children = json::array();
                for (const TrainedAction& child : s.children) {
                    children.push_back(trained_to_json(child));
                }
                out["children"] = std::move(children);
            }
            return out;
        },
        state);
}

KernelSpec kernel_from_json(const json& j) {
    if (!j.is_object()) throw Error(errc::io_error, "kernel must be an object");
    require_keys(j, {"kind", "bandwidth"}, "kernel");
    if (j.value("kind", "rbf") != "rbf") {
        throw Error(errc::io_error, "unknown kernel kind \"" + j["kind"].get<std::string>() + "\"");
    }
    KernelSpec kernel;
    kernel.bandwidth = j.value("bandwidth", 1.0);
    return kernel;
}

TrainedAction::State state_from_json(const json& j, const ActionSpec& spec,
                                     Eigen::Index trained_input_dim) {
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
        throw Error(errc::io_error, "model state needs a \"type\" string");
    }
    const std::string type = j["type"].get<std::string>();
    const auto expect_kind = [&](ActionKind kind) {
        if (spec.kind() != kind) {
            throw Error(errc::io_error, "state type \"" + type +
                                            "\" does not match the declared action \"" +
                                            action_kind_name(spec.kind()) + "\"");
        }
    };

    if (type == "zmuv") {
        expect_kind(ActionKind::zmuv);
        require_keys(j, {"type", "means", "stds"}, "zmuv state");
        ZmuvState s;
        s.means = vector_from_json(j.at("means"), "means");
        s.stds = vector_from_json(j.at("stds"), "stds");
        if (s.means.size() != s.stds.size()) {
            throw Error(errc::io_error, "zmuv means and stds lengths differ");
        }
        return s;
    }
    if (type == "pca") {
        expect_kind(ActionKind::pca);
        require_keys(j, {"type", "mean", "components", "eigenvalues"}, "pca state");
        PcaState s;
        s.mean = vector_from_json(j.at("mean"), "mean");
        s.components = matrix_from_json(j.at("components"), "components");
        s.eigenvalues = vector_from_json(j.at("eigenvalues"), "eigenvalues");
        if (s.components.rows() != s.mean.size() ||
            s.components.cols() != s.eigenvalues.size()) {
            throw Error(errc::io_error, "pca state dimensions disagree");
        }
        return s;
    }
    if (type == "map") {
        expect_kind(ActionKind::map_classifier);
        require_keys(j, {"type", "classes"}, "map state");
        if (!j.at("classes").is_array() || j["classes"].empty()) {
            throw Error(errc::io_error, "map state needs a non-empty class array");
        }
        MapState s;
        for (const json& cj : j["classes"]) {
            if (!cj.is_object()) throw Error(errc::io_error, "map class entries must be objects");
            require_keys(cj, {"label", "prior", "mean", "cov"}, "map class");
            ClassGaussian g;
            g.label = cj.at("label").get<int>();
            g.prior = cj.at("prior").get<double>();
            g.mean = vector_from_json(cj.at("mean"), "class mean");
            g.cov = matrix_from_json(cj.at("cov"), "class cov");
            if (g.cov.rows() != g.cov.cols() || g.cov.rows() != g.mean.size()) {
                throw Error(errc::io_error, "map class dimensions disagree");
            }
            // The stored covariance is the regularized one that was factored
            // at training time, so this reproduces the factor exactly.
            Eigen::LLT<Eigen::MatrixXd> llt(g.cov);
            if (llt.info() != Eigen::Success) {
                throw Error(errc::io_error, "stored class covariance is not positive definite");
            }
            g.chol_lower = llt.matrixL();
            s.classes.push_back(std::move(g));
        }
        return s;
    }
    if (type == "rvm") {
        expect_kind(ActionKind::rvm);
        require_keys(j,
                     {"type", "kernel", "relevance_vectors", "weights", "bias",
                      "active_indices", "converged", "outer_iterations"},
                     "rvm state");
        RvmState s;
        s.kernel = kernel_from_json(j.at("kernel"));
        s.relevance_vectors = matrix_from_json(j.at("relevance_vectors"), "relevance_vectors");
        if (s.relevance_vectors.rows() == 0) {
            s.relevance_vectors.resize(0, trained_input_dim);
        }
        s.weights = vector_from_json(j.at("weights"), "weights");
        s.bias = j.at("bias").get<double>();
        if (!j.at("active_indices").is_array()) {
            throw Error(errc::io_error, "active_indices must be an array");
        }
        for (const json& idx : j["active_indices"]) {
            s.active_indices.push_back(idx.get<Eigen::Index>());
        }
        s.converged = j.at("converged").get<bool>();
        s.outer_iterations = j.at("outer_iterations").get<int>();
        if (s.weights.size() != s.relevance_vectors.rows() ||
            s.active_indices.size() != static_cast<std::size_t>(s.weights.size())) {
            throw Error(errc::io_error, "rvm state dimensions disagree");
        }
        return s;
    }
    if (type == "composite") {
        if (!spec.is_composite()) {
            throw Error(errc::io_error, "composite state attached to a leaf spec");
        }
        require_keys(j, {"type", "children"}, "composite state");
        if (!j.at("children").is_array() || j["children"].size() != spec.children().size()) {
            throw Error(errc::io_error,
                        "composite state child count does not match the declared children");
        }
        CompositeState s;
        std::size_t i = 0;
        for (const json& cj : j["children"]) {
            TrainedAction child = trained_action_from_json(cj);
            if (!(child.spec() == spec.children()[i])) {
                throw Error(errc::io_error, "composite child " + std::to_string(i) +
                                                " was trained from a different spec");
            }
            s.children.push_back(std::move(child));
            ++i;
        }
        return s;
    }
    throw Error(errc::io_error, "unknown model state type \"" + type + "\"");
}

}  // namespace

json to_json(const ActionSpec& spec) {
    return std::visit(
        [](const auto& s) -> json {
            using S = std::decay_t<decltype(s)>;
            json out;
            if constexpr (std::is_same_v<S, ZmuvSpec>) {
                out["kind"] = "zmuv";
            } else if constexpr (std::is_same_v<S, PcaSpec>) {
                out["kind"] = "pca";
                out["params"] = {{"n_components", s.n_components}};
            } else if constexpr (std::is_same_v<S, MapSpec>) {
                out["kind"] = "map";
            } else if constexpr (std::is_same_v<S, RvmSpec>) {
                out["kind"] = "rvm";
                out["params"] = {{"bandwidth", s.kernel.bandwidth},
                                 {"max_outer", s.limits.max_outer},
                                 {"max_inner", s.limits.max_inner},
                                 {"grad_tol", s.limits.grad_tol},
                                 {"alpha_tol", s.limits.alpha_tol},
                                 {"prune_threshold", s.limits.prune_threshold}};
            } else {
                out["kind"] = std::is_same_v<S, SequentialSpec> ? "sequential" : "parallel";
                json children = json::array();
                for (const ActionSpec& child : s.children) children.push_back(to_json(child));
                out["children"] = std::move(children);
            }
            return out;
        },
        spec.node());
}

ActionSpec action_spec_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
        throw Error(errc::io_error, "action spec needs a \"kind\" string");
    }
    const std::string kind = j["kind"].get<std::string>();
    const json params = j.value("params", json::object());
    if (!params.is_object()) throw Error(errc::io_error, "\"params\" must be an object");

    if (kind == "zmuv" || kind == "map") {
        require_keys(j, {"kind"}, kind.c_str());
        return kind == "zmuv" ? ActionSpec(ZmuvSpec{}) : ActionSpec(MapSpec{});
    }
    if (kind == "pca") {
        require_keys(j, {"kind", "params"}, "pca");
        require_keys(params, {"n_components"}, "pca params");
        PcaSpec s;
        s.n_components = params.value("n_components", s.n_components);
        return ActionSpec(s);
    }
    if (kind == "rvm") {
        require_keys(j, {"kind", "params"}, "rvm");
        require_keys(params,
                     {"bandwidth", "max_outer", "max_inner", "grad_tol", "alpha_tol",
                      "prune_threshold"},
                     "rvm params");
        RvmSpec s;
        s.kernel.bandwidth = params.value("bandwidth", s.kernel.bandwidth);
        s.limits.max_outer = params.value("max_outer", s.limits.max_outer);
        s.limits.max_inner = params.value("max_inner", s.limits.max_inner);
        s.limits.grad_tol = params.value("grad_tol", s.limits.grad_tol);
        s.limits.alpha_tol = params.value("alpha_tol", s.limits.alpha_tol);
        s.limits.prune_threshold = params.value("prune_threshold", s.limits.prune_threshold);
        return ActionSpec(s);
    }
    if (kind == "sequential" || kind == "parallel") {
        require_keys(j, {"kind", "children"}, kind.c_str());
        if (!j.contains("children") || !j["children"].is_array()) {
            throw Error(errc::io_error, kind + " spec needs a children array");
        }
        std::vector<ActionSpec> children;
        for (const json& cj : j["children"]) children.push_back(action_spec_from_json(cj));
        if (kind == "sequential") return ActionSpec(SequentialSpec{std::move(children)});
        return ActionSpec(ParallelSpec{std::move(children)});
    }
    throw Error(errc::unknown_action, "\"" + kind + "\" is not a known action kind");
}

json to_json(const TrainedAction& action) { return trained_to_json(action); }

TrainedAction trained_action_from_json(const json& j) {
    if (!j.is_object()) throw Error(errc::io_error, "model must be a JSON object");
    require_keys(j, {"spec", "trained_input_dim", "state"}, "model");
    if (!j.contains("spec") || !j.contains("state") || !j.contains("trained_input_dim")) {
        throw Error(errc::io_error, "model needs \"spec\", \"trained_input_dim\" and \"state\"");
    }
    ActionSpec spec = action_spec_from_json(j["spec"]);
    if (!j["trained_input_dim"].is_number_integer()) {
        throw Error(errc::io_error, "trained_input_dim must be an integer");
    }
    const auto dim = j["trained_input_dim"].get<Eigen::Index>();
    if (dim < 0) throw Error(errc::io_error, "trained_input_dim must be non-negative");
    TrainedAction::State state = state_from_json(j["state"], spec, dim);
    return TrainedAction(std::move(spec), std::move(state), dim);
}

void save_model(const TrainedAction& action, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(errc::io_error, "cannot open " + path.string() + " for writing");
    out << to_json(action).dump(2) << '\n';
    if (!out) throw Error(errc::io_error, "failed writing " + path.string());
}

TrainedAction load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(errc::io_error, "cannot open " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(errc::io_error, path.string() + " is not valid JSON (" + e.what() + ")");
    }
    return trained_action_from_json(j);
}

}  // namespace patrec
