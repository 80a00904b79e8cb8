#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "patrec/commands.hpp"
#include "patrec/kernels.hpp"

namespace {

struct Flags {
    std::string dataset;
    std::string target_column;
    bool no_target = false;
    std::string positive_class;
    std::string pipeline;
    std::string pipeline_file;
    int k = 5;
    std::uint64_t seed = 1;
    std::string out_dir = ".";
    int grid_steps = 100;
    double grid_margin = 0.1;
    std::string model;
    bool serial = false;
};

patrec::RunConfig to_config(const Flags& flags) {
    patrec::RunConfig config;
    config.dataset = flags.dataset;
    if (!flags.target_column.empty()) config.target_column = flags.target_column;
    config.no_target = flags.no_target;
    if (!flags.positive_class.empty()) config.positive_class = flags.positive_class;
    config.pipeline = flags.pipeline;
    if (!flags.pipeline_file.empty()) config.pipeline_file = flags.pipeline_file;
    config.k = flags.k;
    config.seed = flags.seed;
    config.out_dir = flags.out_dir;
    config.grid_steps = flags.grid_steps;
    config.grid_margin = flags.grid_margin;
    if (!flags.model.empty()) config.model = flags.model;
    config.backend =
        flags.serial ? patrec::kernels::Backend::serial : patrec::kernels::default_backend();
    return config;
}

void add_dataset_flags(CLI::App* cmd, Flags& flags) {
    cmd->add_option("--dataset", flags.dataset,
                    "CSV path, or \"iris\" for the bundled Fisher iris data")
        ->required();
    cmd->add_option("--target-column", flags.target_column,
                    "name of the target column (default: the last CSV column)");
    cmd->add_flag("--no-target", flags.no_target, "load every column as a feature");
    cmd->add_option("--positive-class", flags.positive_class,
                    "relabel one-vs-rest: this class becomes 1, the rest 0");
    cmd->add_flag("--serial", flags.serial, "disable the parallel kernels");
}

void add_pipeline_flags(CLI::App* cmd, Flags& flags) {
    auto* inline_opt =
        cmd->add_option("--pipeline", flags.pipeline,
                        "pipeline expression, e.g. \"zmuv + pca(2) + map\"");
    cmd->add_option("--pipeline-file", flags.pipeline_file,
                    "file holding the pipeline expression")
        ->excludes(inline_opt);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pattern recognition pipelines: inspect data, train, cross-validate, "
                 "export ROC curves and decision contours"};
    app.require_subcommand(1);

    Flags flags;

    CLI::App* info = app.add_subcommand("info", "summarize a dataset");
    add_dataset_flags(info, flags);

    CLI::App* kfolds =
        app.add_subcommand("kfolds", "cross-validate a pipeline and score the ROC");
    add_dataset_flags(kfolds, flags);
    add_pipeline_flags(kfolds, flags);
    kfolds->add_option("--k", flags.k, "number of folds")->default_val(5);
    kfolds->add_option("--seed", flags.seed, "fold assignment seed")->default_val(1);
    kfolds->add_option("--out", flags.out_dir, "output directory")->default_val(".");

    CLI::App* contour =
        app.add_subcommand("contour", "export a decision contour grid for a 2-D classifier stage");
    add_dataset_flags(contour, flags);
    add_pipeline_flags(contour, flags);
    contour->add_option("--out", flags.out_dir, "output directory")->default_val(".");
    contour->add_option("--grid-steps", flags.grid_steps, "grid points per axis")
        ->default_val(100);
    contour->add_option("--grid-margin", flags.grid_margin,
                        "bounding box padding as a fraction of each axis range")
        ->default_val(0.1);

    CLI::App* train = app.add_subcommand("train", "train a pipeline and save the model");
    add_dataset_flags(train, flags);
    add_pipeline_flags(train, flags);
    train->add_option("--out", flags.out_dir, "output directory")->default_val(".");
    train->add_option("--model", flags.model, "model file (default: <out>/model.json)");

    CLI::App* run = app.add_subcommand("run", "apply a saved model to a dataset");
    add_dataset_flags(run, flags);
    run->add_option("--out", flags.out_dir, "output directory")->default_val(".");
    run->add_option("--model", flags.model, "model file (default: <out>/model.json)");

    CLI11_PARSE(app, argc, argv);

    const patrec::RunConfig config = to_config(flags);
    if ((kfolds->parsed() || contour->parsed() || train->parsed()) &&
        config.pipeline.empty() && !config.pipeline_file) {
        std::cerr << "error: provide --pipeline or --pipeline-file\n";
        return 4;
    }

    if (info->parsed()) return patrec::cmd_info(config, std::cout, std::cerr);
    if (kfolds->parsed()) return patrec::cmd_kfolds(config, std::cout, std::cerr);
    if (contour->parsed()) return patrec::cmd_contour(config, std::cout, std::cerr);
    if (train->parsed()) return patrec::cmd_train(config, std::cout, std::cerr);
    return patrec::cmd_run(config, std::cout, std::cerr);
}
