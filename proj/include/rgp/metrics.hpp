#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rgp/dataset.hpp"

namespace rgp::metrics {

/// K x K counts, rows = true class, columns = predicted class.
struct ConfusionMatrix {
    int classes = 0;
    std::vector<uint64_t> counts; // row-major

    static ConfusionMatrix zero(int classes);
    uint64_t at(int truth, int predicted) const {
        return counts[static_cast<size_t>(truth) * classes + predicted];
    }
    uint64_t& at(int truth, int predicted) {
        return counts[static_cast<size_t>(truth) * classes + predicted];
    }
    uint64_t total() const;
    uint64_t row_sum(int truth) const;
};

ConfusionMatrix confusion_matrix(std::span<const int> truth,
                                 std::span<const int> predicted, int classes);

/// trace / total; throws on an empty matrix.
double accuracy(const ConfusionMatrix& cm);

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
};

/// Starts at (0,0), ends at (1,1), non-decreasing in both coordinates.
/// Tied scores collapse into a single sweep step (one diagonal
/// segment), which is what makes the trapezoid area agree exactly with
/// the Mann-Whitney pair statistic.
struct RocCurve {
    std::vector<RocPoint> points;
};

/// Threshold sweep over distinct score values, descending; positive
/// label is 1. Throws "AUC undefined" unless both classes are present.
RocCurve roc_curve(std::span<const double> scores, std::span<const int> labels);

/// Trapezoidal area under the curve.
double auc(const RocCurve& curve);
double auc_from_scores(std::span<const double> scores,
                       std::span<const int> labels);

struct OperatingPoint {
    double target_specificity = 0.0;
    double sensitivity = 0.0;
    double specificity = 0.0; // achieved, >= target
    double threshold = 0.0;   // predict positive iff score >= threshold
};

/// Highest sensitivity among thresholds with specificity >= target
/// (specificity breaks sensitivity ties). Always feasible: predicting
/// everything negative has specificity 1.
OperatingPoint sensitivity_at_specificity(std::span<const double> scores,
                                          std::span<const int> labels,
                                          double target_specificity);

/// Sensitivity/specificity of a 2x2 matrix, positive class 1. A rate
/// whose denominator is empty comes back unset.
struct BinaryRates {
    std::optional<double> sensitivity;
    std::optional<double> specificity;
};

BinaryRates binary_rates(const ConfusionMatrix& cm);

struct ClassRates {
    int cls = 0;
    std::optional<double> sensitivity; // recall of the class
    std::optional<double> specificity; // true-negative rate of the class
    std::optional<double> auc;         // one-vs-rest, score = prob of the class
};

/// All rates stored in [0,1]; render x100 for table form.
struct MetricsReport {
    dataset::Task task = dataset::Task::BinaryNormalAbnormal;
    size_t samples = 0;
    double accuracy = 0.0;
    std::optional<double> auc;         // binary: ROC AUC; K>=3: macro one-vs-rest
    std::optional<double> sensitivity; // binary: TPR; K>=3: macro recall
    std::optional<double> specificity; // binary: TNR; K>=3: macro TNR
    std::vector<ClassRates> per_class;
    ConfusionMatrix confusion;
    std::optional<OperatingPoint> operating_point; // binary tasks only
    std::string operating_point_description;
    std::vector<std::string> warnings;
};

/// Evaluate fused probability vectors against true labels: argmax
/// accuracy, confusion matrix, ROC/AUC, and the fixed-specificity
/// operating point for binary tasks; macro one-vs-rest aggregation for
/// K >= 3 (classes absent from the labels are excluded with a warning).
MetricsReport evaluate_predictions(const std::vector<std::vector<double>>& probs,
                                   const std::vector<int>& labels,
                                   dataset::Task task,
                                   double target_specificity = 0.9);

/// Report as a JSON document (schema mirrors the struct fields).
std::string report_to_json(const MetricsReport& report, int indent = 2);

/// Confusion matrix as CSV with true-class rows and predicted-class
/// columns.
std::string confusion_to_csv(const ConfusionMatrix& cm);

} // namespace rgp::metrics
