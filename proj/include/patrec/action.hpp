#pragma once

#include <memory>
#include <variant>
#include <vector>

#include "patrec/classify.hpp"
#include "patrec/dataset.hpp"
#include "patrec/preproc.hpp"

namespace patrec {

class ActionSpec;

struct ZmuvSpec {
    bool operator==(const ZmuvSpec&) const = default;
};

struct PcaSpec {
    int n_components = 2;
    bool operator==(const PcaSpec&) const = default;
};

struct MapSpec {
    bool operator==(const MapSpec&) const = default;
};

struct RvmSpec {
    KernelSpec kernel{};
    IterationLimits limits{};
    bool operator==(const RvmSpec&) const = default;
};

struct SequentialSpec {
    std::vector<ActionSpec> children;  // applied left to right
    bool operator==(const SequentialSpec&) const;
};

struct ParallelSpec {
    std::vector<ActionSpec> children;  // share the input, outputs concatenate
    bool operator==(const ParallelSpec&) const;
};

enum class ActionKind { zmuv, pca, map_classifier, rvm, sequential, parallel };

const char* action_kind_name(ActionKind kind) noexcept;

/// Untrained processing unit: hyperparameters for a leaf, or a combinator
/// over child specs. Validated on construction (composites need at least
/// two children, pca needs a positive component count, and so on).
class ActionSpec {
public:
    using Node = std::variant<ZmuvSpec, PcaSpec, MapSpec, RvmSpec, SequentialSpec, ParallelSpec>;

    ActionSpec(Node node);  // NOLINT: implicit from the leaf/composite structs
    ActionSpec(ZmuvSpec s) : ActionSpec(Node(std::move(s))) {}
    ActionSpec(PcaSpec s) : ActionSpec(Node(std::move(s))) {}
    ActionSpec(MapSpec s) : ActionSpec(Node(std::move(s))) {}
    ActionSpec(RvmSpec s) : ActionSpec(Node(std::move(s))) {}
    ActionSpec(SequentialSpec s) : ActionSpec(Node(std::move(s))) {}
    ActionSpec(ParallelSpec s) : ActionSpec(Node(std::move(s))) {}

    const Node& node() const { return node_; }
    ActionKind kind() const;
    bool is_composite() const;

    /// Children of a composite; throws for leaves.
    const std::vector<ActionSpec>& children() const;

    bool operator==(const ActionSpec& other) const { return node_ == other.node_; }

private:
    Node node_;
};

/// Sequential composition: b consumes a's output. Sequential operands are
/// spliced in, so chains stay flat: seq(seq(x, y), z) has three children.
ActionSpec seq(ActionSpec a, ActionSpec b);

/// Parallel composition: both see the same input, outputs concatenate in
/// order. Parallel operands are spliced in like seq's.
ActionSpec par(ActionSpec a, ActionSpec b);

class TrainedAction;

struct CompositeState {
    std::vector<TrainedAction> children;
};

/// A spec plus the parameters inferred from training data. Immutable; run
/// maps any compatible dataset to a new one with the same rows and ids.
class TrainedAction {
public:
    using State = std::variant<ZmuvState, PcaState, MapState, RvmState, CompositeState>;

    TrainedAction(ActionSpec spec, State state, Eigen::Index trained_input_dim);

    const ActionSpec& spec() const { return spec_; }
    const State& state() const { return *state_; }
    Eigen::Index trained_input_dim() const { return trained_input_dim_; }

    DataSet run(const DataSet& ds,
                kernels::Backend backend = kernels::default_backend()) const;

private:
    ActionSpec spec_;
    std::shared_ptr<const State> state_;  // shared so TrainedAction copies stay cheap
    Eigen::Index trained_input_dim_;
};

/// Learns parameters for an ActionSpec. Sequential children train left to right,
/// each on the previous child's output; parallel children train
/// independently on the same input. Training never modifies ds.
TrainedAction train(const ActionSpec& spec, const DataSet& ds,
                    kernels::Backend backend = kernels::default_backend());

inline DataSet run(const TrainedAction& ta, const DataSet& ds,
                   kernels::Backend backend = kernels::default_backend()) {
    return ta.run(ds, backend);
}

/// True when every column the pipeline emits is a classifier score: a
/// classifier leaf, a sequential chain whose last stage qualifies, or a
/// parallel block whose branches all qualify.
bool ends_in_classifier(const ActionSpec& spec);

}  // namespace patrec
