#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "patrec/kernels.hpp"

namespace patrec {

/// Everything a command needs, assembled from the CLI flags.
struct RunConfig {
    std::string dataset;  // CSV path, or "iris" for the bundled data
    std::optional<std::string> target_column;  // default: last CSV column
    bool no_target = false;                    // load every column as a feature
    std::optional<std::string> positive_class;
    std::string pipeline;  // DSL text; empty when pipeline_file is set
    std::optional<std::filesystem::path> pipeline_file;
    int k = 5;
    std::uint64_t seed = 1;
    std::filesystem::path out_dir = ".";
    int grid_steps = 100;
    double grid_margin = 0.1;
    std::optional<std::filesystem::path> model;  // default: out_dir / "model.json"
    kernels::Backend backend = kernels::default_backend();
};

/// Exit codes shared by every command: 0 success, 2 ingestion, 3 training,
/// 4 pipeline text or composition, 5 contour dimensionality, 6 model and
/// input disagree.
int cmd_info(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_kfolds(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_contour(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_train(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace patrec
