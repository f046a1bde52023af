#pragma once

#include <span>
#include <string>
#include <vector>

#include "rgp/classifier.hpp"

namespace rgp::ensemble {

enum class Strategy { MeanProb, MajorityVote };

const char* to_string(Strategy s);
Strategy parse_strategy(const std::string& s);

/// All per-model predictions for one image. model_ids must be distinct
/// and every record must carry the same class count.
struct EnsembleInput {
    std::string image_id;
    std::vector<classifier::PredictionRecord> records;
};

struct Diagnosis {
    std::string image_id;
    std::vector<double> fused_probs;
    int predicted_class = 0; // argmax of fused_probs, smallest index on ties
    Strategy strategy = Strategy::MeanProb;
};

/// Smallest index attaining the maximum.
int argmax(std::span<const double> values);

/// Unweighted mean of the member probability vectors. Members are
/// accumulated in model_id order, so the result is bit-identical under
/// any permutation of the input records.
Diagnosis fuse_mean(const EnsembleInput& input);

/// Each member votes its argmax; the class with most votes wins. Vote
/// ties fall back to the mean probability over the tied classes, then
/// to the smallest index. fused_probs are the normalized vote shares.
Diagnosis fuse_majority(const EnsembleInput& input);

struct BatchResult {
    std::vector<Diagnosis> diagnoses;  // sorted by image_id
    std::vector<std::string> omissions; // image_ids that had no records
};

BatchResult fuse_batch(const std::vector<EnsembleInput>& inputs,
                       Strategy strategy);

/// Group flat prediction records by image_id. Ids listed in
/// expected_ids but absent from the records yield empty inputs, which
/// fuse_batch then reports as omissions.
std::vector<EnsembleInput>
group_predictions(const std::vector<classifier::PredictionRecord>& records,
                  std::span<const std::string> expected_ids = {});

/// Diagnosis CSV: image_id,strategy,predicted_class,p0..pK-1
void write_diagnoses(const std::vector<Diagnosis>& diagnoses,
                     const std::string& path);

} // namespace rgp::ensemble
