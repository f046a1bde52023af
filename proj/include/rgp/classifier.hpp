#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rgp/dataset.hpp"
#include "rgp/raster.hpp"

namespace rgp::classifier {

/// Flattened thumbnail of a preprocessed image: side x side x 3
/// samples scaled to [0,1], row-major, channel-interleaved.
struct FeatureVector {
    std::string image_id;
    std::vector<double> values;
};

/// Multinomial logistic regression model. Stands in for the deep
/// classifiers so the train -> predict -> ensemble -> evaluate path is
/// exercisable at desk scale; the downstream layers only ever see
/// probability vectors, wherever they come from.
struct SoftmaxModel {
    dataset::Task task = dataset::Task::BinaryNormalAbnormal;
    int classes = 0;
    int dim = 0;
    int thumb_side = 0;
    std::vector<double> weights; // classes x dim, row-major
    std::vector<double> bias;    // classes
};

struct PredictionRecord {
    std::string image_id;
    std::string model_id;
    std::vector<double> probs;
};

FeatureVector featurize(const RasterImage& image, int side,
                        std::string image_id = {});

struct TrainConfig {
    double learning_rate = 0.1;
    int epochs = 200;
    double l2 = 1e-4;
    uint64_t seed = 0; // reserved for optional sample shuffling; the
                       // full-batch optimizer itself is seed-free
};

struct TrainResult {
    SoftmaxModel model;
    std::vector<double> epoch_losses; // loss at the start of each epoch
    double final_loss = 0.0;
};

/// Called once per epoch after the parameter update, with the loss
/// measured at the start of that epoch.
using EpochObserver =
    std::function<void(int epoch, double loss, const SoftmaxModel& model)>;

/// Mean cross-entropy plus (l2/2)*||W||^2 (bias unregularized).
double softmax_loss(const SoftmaxModel& model,
                    const std::vector<FeatureVector>& features,
                    const std::vector<int>& labels, double l2);

/// Analytic gradient of softmax_loss at the model's current parameters.
void softmax_gradient(const SoftmaxModel& model,
                      const std::vector<FeatureVector>& features,
                      const std::vector<int>& labels, double l2,
                      std::vector<double>& grad_weights,
                      std::vector<double>& grad_bias);

/// Full-batch gradient descent from zero-initialized parameters.
/// Deterministic; throws if any class has no sample or the loss stops
/// being finite.
TrainResult train_softmax(const std::vector<FeatureVector>& features,
                          const std::vector<int>& labels, dataset::Task task,
                          const TrainConfig& config,
                          const EpochObserver& observer = nullptr);

/// Numerically stable softmax (max subtraction, then normalization).
std::vector<double> softmax(std::span<const double> logits);

PredictionRecord predict(const SoftmaxModel& model, const FeatureVector& feature,
                         std::string model_id);

struct Coverage {
    std::vector<std::string> missing; // expected ids with no record
    std::vector<std::string> extra;   // record ids outside the expected set
};

struct LoadedPredictions {
    std::vector<PredictionRecord> records;
    Coverage coverage;
};

/// Read a prediction CSV (header image_id,model_id,p0..pK-1) for a
/// task with K classes. Rows with negative entries or probabilities
/// summing outside 1 +- 1e-6 are errors naming the line. When
/// expected_ids is non-empty the coverage report lists missing and
/// extra image ids.
LoadedPredictions load_predictions(const std::string& path, dataset::Task task,
                                   std::span<const std::string> expected_ids = {});

/// Probabilities are written with 10 significant digits, enough to
/// round-trip the simplex tolerance.
void write_predictions(const std::vector<PredictionRecord>& records,
                       const std::string& path);

void save_model(const SoftmaxModel& model, const std::string& path);
SoftmaxModel load_model(const std::string& path);

} // namespace rgp::classifier
