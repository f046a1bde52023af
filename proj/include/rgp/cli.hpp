#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rgp/dataset.hpp"
#include "rgp/ensemble.hpp"
#include "rgp/imaging.hpp"

namespace rgp::cli {

struct BaselineConfig {
    int thumb_side = 32;
    double learning_rate = 0.1;
    int epochs = 200;
    double l2 = 1e-4;
    std::string model_id = "softmax-baseline";
};

/// One JSON file drives every subcommand; command-line flags override
/// individual fields. All randomness flows from `seed`.
struct RunConfig {
    std::string manifest_path;
    std::string images_dir;
    std::string exclusions_path;                // optional
    std::vector<std::string> prediction_files;  // explicit prediction CSVs
    std::string predictions_dir;                // plus every *.csv in here
    std::string out_dir = "out";

    dataset::Task task = dataset::Task::Quaternary;
    uint64_t seed = 0;

    imaging::PreprocessConfig preprocess;
    bool emit_stage_images = false;

    // "auto" resolves to the eyepacs/messidor policy when the manifest
    // is single-dataset; explicit counts otherwise.
    std::string split_policy_kind = "auto";
    dataset::SplitPolicy split_policy;

    ensemble::Strategy strategy = ensemble::Strategy::MeanProb;
    double target_specificity = 0.9;
    BaselineConfig baseline;

    int workers = 0;                 // 0 = hardware concurrency
    double coverage_threshold = 1.0; // minimum covered fraction of test ids
};

RunConfig load_config(const std::string& path);

/// Flag values entered on the command line; they win over file values.
struct Overrides {
    std::optional<std::string> config_path;
    std::optional<std::string> task;
    std::optional<uint64_t> seed;
    std::optional<std::string> strategy;
    std::optional<double> target_specificity;
    std::optional<int> workers;
    std::optional<std::string> out_dir;
};

RunConfig resolve_config(const Overrides& overrides);

// Exit codes: 0 success, 1 partial per-item failures, 2 configuration
// error or abort (commands signal 2 by throwing rgp::Error).
int cmd_preprocess(const RunConfig& config);
int cmd_split(const RunConfig& config);
int cmd_train_baseline(const RunConfig& config);
int cmd_evaluate(const RunConfig& config);

} // namespace rgp::cli
