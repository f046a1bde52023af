#include <iostream>

#include <CLI11.hpp>

#include "rgp/cli.hpp"
#include "rgp/error.hpp"

namespace {

void add_common_flags(CLI::App* cmd, rgp::cli::Overrides& overrides) {
    cmd->add_option("--config", overrides.config_path, "run configuration JSON");
    cmd->add_option("--task", overrides.task,
                    "classification task: normal-abnormal, referable, ternary "
                    "or quaternary");
    cmd->add_option("--seed", overrides.seed, "64-bit seed for all randomness");
    cmd->add_option("--strategy", overrides.strategy,
                    "ensemble strategy: mean or vote");
    cmd->add_option("--target-specificity", overrides.target_specificity,
                    "operating-point specificity target in (0,1)");
    cmd->add_option("--workers", overrides.workers,
                    "worker threads for preprocessing (0 = all cores)");
    cmd->add_option("--out", overrides.out_dir, "output directory");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"retinal grading pipeline"};
    app.require_subcommand(1);

    rgp::cli::Overrides overrides;
    CLI::App* preprocess = app.add_subcommand(
        "preprocess", "crop, equalize, normalize and resize fundus images");
    CLI::App* split = app.add_subcommand(
        "split", "generate train/validate/test splits and class distributions");
    CLI::App* train = app.add_subcommand(
        "train-baseline", "train the softmax baseline on the train split");
    CLI::App* evaluate = app.add_subcommand(
        "evaluate", "fuse predictions and compute the metrics report");
    for (CLI::App* cmd : {preprocess, split, train, evaluate})
        add_common_flags(cmd, overrides);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2; // bad usage is a configuration error
    }

    try {
        rgp::cli::RunConfig config = rgp::cli::resolve_config(overrides);
        if (preprocess->parsed()) return rgp::cli::cmd_preprocess(config);
        if (split->parsed()) return rgp::cli::cmd_split(config);
        if (train->parsed()) return rgp::cli::cmd_train_baseline(config);
        if (evaluate->parsed()) return rgp::cli::cmd_evaluate(config);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
