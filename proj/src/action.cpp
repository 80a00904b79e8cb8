#include "patrec/action.hpp"

#include <algorithm>

namespace patrec {

bool SequentialSpec::operator==(const SequentialSpec& other) const {
    return children == other.children;
}

bool ParallelSpec::operator==(const ParallelSpec& other) const {
    return children == other.children;
}

const char* action_kind_name(ActionKind kind) noexcept {
    switch (kind) {
        case ActionKind::zmuv: return "zmuv";
        case ActionKind::pca: return "pca";
        case ActionKind::map_classifier: return "map";
        case ActionKind::rvm: return "rvm";
        case ActionKind::sequential: return "sequential";
        case ActionKind::parallel: return "parallel";
    }
    return "?";
}

namespace {

// Composition is associative per kind, so a same-kind child spec is spliced
// into its parent. Children were flattened at their own construction, which
// keeps one pass sufficient.
std::vector<ActionSpec> flattened(std::vector<ActionSpec> children, ActionKind kind) {
    std::vector<ActionSpec> flat;
    flat.reserve(children.size());
    for (ActionSpec& child : children) {
        if (child.kind() == kind) {
            for (const ActionSpec& grandchild : child.children()) flat.push_back(grandchild);
        } else {
            flat.push_back(std::move(child));
        }
    }
    return flat;
}

}  // namespace

ActionSpec::ActionSpec(Node node) : node_(std::move(node)) {
    if (const auto* pca = std::get_if<PcaSpec>(&node_)) {
        if (pca->n_components < 1)
            throw Error(errc::bad_param_value, "pca n_components must be at least 1");
    } else if (const auto* rvm = std::get_if<RvmSpec>(&node_)) {
        if (!(rvm->kernel.bandwidth > 0.0))
            throw Error(errc::bad_param_value, "rvm bandwidth must be positive");
        if (rvm->limits.max_outer < 1 || rvm->limits.max_inner < 1)
            throw Error(errc::bad_param_value, "rvm iteration caps must be at least 1");
    } else if (auto* s = std::get_if<SequentialSpec>(&node_)) {
        if (s->children.size() < 2)
            throw Error(errc::bad_arity, "sequential composition needs at least 2 children");
        s->children = flattened(std::move(s->children), ActionKind::sequential);
    } else if (auto* p = std::get_if<ParallelSpec>(&node_)) {
        if (p->children.size() < 2)
            throw Error(errc::bad_arity, "parallel composition needs at least 2 children");
        p->children = flattened(std::move(p->children), ActionKind::parallel);
    }
}

ActionKind ActionSpec::kind() const {
    struct Visitor {
        ActionKind operator()(const ZmuvSpec&) const { return ActionKind::zmuv; }
        ActionKind operator()(const PcaSpec&) const { return ActionKind::pca; }
        ActionKind operator()(const MapSpec&) const { return ActionKind::map_classifier; }
        ActionKind operator()(const RvmSpec&) const { return ActionKind::rvm; }
        ActionKind operator()(const SequentialSpec&) const { return ActionKind::sequential; }
        ActionKind operator()(const ParallelSpec&) const { return ActionKind::parallel; }
    };
    return std::visit(Visitor{}, node_);
}

bool ActionSpec::is_composite() const {
    return kind() == ActionKind::sequential || kind() == ActionKind::parallel;
}

const std::vector<ActionSpec>& ActionSpec::children() const {
    if (const auto* s = std::get_if<SequentialSpec>(&node_)) return s->children;
    if (const auto* p = std::get_if<ParallelSpec>(&node_)) return p->children;
    throw Error(errc::bad_arity,
                std::string(action_kind_name(kind())) + " is a leaf and has no children");
}

ActionSpec seq(ActionSpec a, ActionSpec b) {
    SequentialSpec s;
    s.children.push_back(std::move(a));
    s.children.push_back(std::move(b));
    return ActionSpec(std::move(s));
}

ActionSpec par(ActionSpec a, ActionSpec b) {
    ParallelSpec p;
    p.children.push_back(std::move(a));
    p.children.push_back(std::move(b));
    return ActionSpec(std::move(p));
}

TrainedAction::TrainedAction(ActionSpec spec, State state, Eigen::Index trained_input_dim)
    : spec_(std::move(spec)),
      state_(std::make_shared<const State>(std::move(state))),
      trained_input_dim_(trained_input_dim) {}

TrainedAction train(const ActionSpec& spec, const DataSet& ds, kernels::Backend backend) {
    struct Visitor {
        const ActionSpec& spec;
        const DataSet& ds;
        kernels::Backend backend;

        TrainedAction operator()(const ZmuvSpec&) const {
            return TrainedAction(spec, zmuv_train(ds, backend), ds.d());
        }
        TrainedAction operator()(const PcaSpec& p) const {
            return TrainedAction(spec, pca_train(ds, p.n_components, backend), ds.d());
        }
        TrainedAction operator()(const MapSpec&) const {
            return TrainedAction(spec, map_train(ds, backend), ds.d());
        }
        TrainedAction operator()(const RvmSpec& r) const {
            return TrainedAction(spec, rvm_train(ds, r.kernel, r.limits, backend), ds.d());
        }
        TrainedAction operator()(const SequentialSpec& s) const {
            CompositeState state;
            state.children.reserve(s.children.size());
            DataSet current = ds;
            for (const ActionSpec& child : s.children) {
                TrainedAction trained = train(child, current, backend);
                DataSet next = trained.run(current, backend);
                state.children.push_back(std::move(trained));
                current = std::move(next);
            }
            return TrainedAction(spec, std::move(state), ds.d());
        }
        TrainedAction operator()(const ParallelSpec& p) const {
            CompositeState state;
            state.children.reserve(p.children.size());
            for (const ActionSpec& child : p.children)
                state.children.push_back(train(child, ds, backend));
            return TrainedAction(spec, std::move(state), ds.d());
        }
    };
    return std::visit(Visitor{spec, ds, backend}, spec.node());
}

DataSet TrainedAction::run(const DataSet& ds, kernels::Backend backend) const {
    struct Visitor {
        const TrainedAction& self;
        const DataSet& ds;
        kernels::Backend backend;

        DataSet operator()(const ZmuvState& s) const { return zmuv_run(s, ds); }
        DataSet operator()(const PcaState& s) const { return pca_run(s, ds); }
        DataSet operator()(const MapState& s) const { return map_run(s, ds, backend); }
        DataSet operator()(const RvmState& s) const { return rvm_run(s, ds, backend); }
        DataSet operator()(const CompositeState& s) const {
            if (self.spec().kind() == ActionKind::sequential) {
                DataSet current = ds;
                for (const TrainedAction& child : s.children)
                    current = child.run(current, backend);
                return current;
            }
            DataSet merged = s.children.front().run(ds, backend);
            for (std::size_t i = 1; i < s.children.size(); ++i)
                merged = concat_features(merged, s.children[i].run(ds, backend));
            return merged;
        }
    };
    return std::visit(Visitor{*this, ds, backend}, *state_);
}

bool ends_in_classifier(const ActionSpec& spec) {
    switch (spec.kind()) {
        case ActionKind::map_classifier:
        case ActionKind::rvm:
            return true;
        case ActionKind::sequential:
            return ends_in_classifier(spec.children().back());
        case ActionKind::parallel: {
            // a parallel block is score-only when every branch is
            const auto& children = spec.children();
            return std::all_of(children.begin(), children.end(),
                               [](const ActionSpec& child) { return ends_in_classifier(child); });
        }
        default:
            return false;
    }
}

}  // namespace patrec
