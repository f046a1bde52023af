#include "rgp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "rgp/error.hpp"

namespace rgp::metrics {

namespace {

void check_binary_inputs(std::span<const double> scores,
                         std::span<const int> labels) {
    if (scores.size() != labels.size())
        fail("scores and labels length mismatch: ", scores.size(), " vs ",
             labels.size());
    if (scores.empty()) fail("no samples");
    for (double s : scores)
        if (!std::isfinite(s)) fail("non-finite score");
    for (int y : labels)
        if (y != 0 && y != 1) fail("binary label must be 0 or 1, got ", y);
}

// Indices sorted by score descending; tied scores form one group.
struct SweepStep {
    double score;
    uint64_t positives;
    uint64_t negatives;
};

std::vector<SweepStep> sweep_steps(std::span<const double> scores,
                                   std::span<const int> labels) {
    std::vector<size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return scores[a] > scores[b]; });

    std::vector<SweepStep> steps;
    for (size_t i = 0; i < order.size();) {
        double v = scores[order[i]];
        SweepStep step{v, 0, 0};
        while (i < order.size() && scores[order[i]] == v) {
            if (labels[order[i]] == 1)
                ++step.positives;
            else
                ++step.negatives;
            ++i;
        }
        steps.push_back(step);
    }
    return steps;
}

} // namespace

ConfusionMatrix ConfusionMatrix::zero(int classes) {
    if (classes < 1) fail("confusion matrix needs at least 1 class");
    ConfusionMatrix cm;
    cm.classes = classes;
    cm.counts.assign(static_cast<size_t>(classes) * classes, 0);
    return cm;
}

uint64_t ConfusionMatrix::total() const {
    uint64_t t = 0;
    for (uint64_t c : counts) t += c;
    return t;
}

uint64_t ConfusionMatrix::row_sum(int truth) const {
    uint64_t t = 0;
    for (int p = 0; p < classes; ++p) t += at(truth, p);
    return t;
}

ConfusionMatrix confusion_matrix(std::span<const int> truth,
                                 std::span<const int> predicted, int classes) {
    if (truth.size() != predicted.size())
        fail("confusion_matrix: ", truth.size(), " labels vs ", predicted.size(),
             " predictions");
    ConfusionMatrix cm = ConfusionMatrix::zero(classes);
    for (size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] < 0 || truth[i] >= classes)
            fail("confusion_matrix: label ", truth[i], " out of range");
        if (predicted[i] < 0 || predicted[i] >= classes)
            fail("confusion_matrix: prediction ", predicted[i], " out of range");
        ++cm.at(truth[i], predicted[i]);
    }
    return cm;
}

double accuracy(const ConfusionMatrix& cm) {
    uint64_t total = cm.total();
    if (total == 0) fail("accuracy of empty confusion matrix");
    uint64_t diag = 0;
    for (int k = 0; k < cm.classes; ++k) diag += cm.at(k, k);
    return static_cast<double>(diag) / static_cast<double>(total);
}

RocCurve roc_curve(std::span<const double> scores, std::span<const int> labels) {
    check_binary_inputs(scores, labels);
    uint64_t pos = 0, neg = 0;
    for (int y : labels) (y == 1 ? pos : neg)++;
    if (pos == 0 || neg == 0)
        fail("AUC undefined: labels contain a single class");

    RocCurve curve;
    curve.points.push_back({0.0, 0.0});
    uint64_t tp = 0, fp = 0;
    for (const SweepStep& step : sweep_steps(scores, labels)) {
        tp += step.positives;
        fp += step.negatives;
        curve.points.push_back({static_cast<double>(fp) / neg,
                                static_cast<double>(tp) / pos});
    }
    return curve;
}

double auc(const RocCurve& curve) {
    if (curve.points.size() < 2) fail("ROC curve has fewer than 2 points");
    double area = 0.0;
    for (size_t i = 1; i < curve.points.size(); ++i) {
        const RocPoint& a = curve.points[i - 1];
        const RocPoint& b = curve.points[i];
        area += (b.fpr - a.fpr) * (a.tpr + b.tpr) * 0.5;
    }
    return area;
}

double auc_from_scores(std::span<const double> scores,
                       std::span<const int> labels) {
    return auc(roc_curve(scores, labels));
}

OperatingPoint sensitivity_at_specificity(std::span<const double> scores,
                                          std::span<const int> labels,
                                          double target_specificity) {
    check_binary_inputs(scores, labels);
    if (!(target_specificity > 0.0 && target_specificity < 1.0))
        fail("target specificity must be in (0,1), got ", target_specificity);
    uint64_t pos = 0, neg = 0;
    for (int y : labels) (y == 1 ? pos : neg)++;
    if (pos == 0 || neg == 0)
        fail("operating point undefined: labels contain a single class");

    // Candidate thresholds: above every score (predict all negative,
    // specificity 1 -- always feasible), then each distinct score v
    // with the rule "positive iff score >= v".
    OperatingPoint best;
    best.target_specificity = target_specificity;
    best.sensitivity = 0.0;
    best.specificity = 1.0;
    best.threshold = std::numeric_limits<double>::infinity();

    uint64_t tp = 0, fp = 0;
    for (const SweepStep& step : sweep_steps(scores, labels)) {
        tp += step.positives;
        fp += step.negatives;
        double sens = static_cast<double>(tp) / pos;
        double spec = 1.0 - static_cast<double>(fp) / neg;
        if (spec >= target_specificity &&
            (sens > best.sensitivity ||
             (sens == best.sensitivity && spec > best.specificity))) {
            best.sensitivity = sens;
            best.specificity = spec;
            best.threshold = step.score;
        }
    }
    return best;
}

BinaryRates binary_rates(const ConfusionMatrix& cm) {
    if (cm.classes != 2) fail("binary_rates: expected a 2x2 matrix");
    BinaryRates rates;
    uint64_t tp = cm.at(1, 1), fn = cm.at(1, 0);
    uint64_t tn = cm.at(0, 0), fp = cm.at(0, 1);
    if (tp + fn > 0)
        rates.sensitivity = static_cast<double>(tp) / static_cast<double>(tp + fn);
    if (tn + fp > 0)
        rates.specificity = static_cast<double>(tn) / static_cast<double>(tn + fp);
    return rates;
}

MetricsReport evaluate_predictions(const std::vector<std::vector<double>>& probs,
                                   const std::vector<int>& labels,
                                   dataset::Task task,
                                   double target_specificity) {
    int classes = dataset::class_count(task);
    if (probs.size() != labels.size())
        fail("evaluate_predictions: ", probs.size(), " probability vectors vs ",
             labels.size(), " labels");
    if (probs.empty()) fail("evaluate_predictions: no samples");
    for (const auto& p : probs) {
        if (static_cast<int>(p.size()) != classes)
            fail("evaluate_predictions: probability vector has ", p.size(),
                 " entries, task needs ", classes);
        double sum = 0.0;
        for (double v : p) {
            if (!(v >= 0.0)) fail("evaluate_predictions: negative probability");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-6)
            fail("evaluate_predictions: probabilities sum to ", sum);
    }

    MetricsReport report;
    report.task = task;
    report.samples = probs.size();

    std::vector<int> predicted(probs.size());
    for (size_t i = 0; i < probs.size(); ++i) {
        int best = 0;
        for (int k = 1; k < classes; ++k)
            if (probs[i][k] > probs[i][best]) best = k;
        predicted[i] = best;
    }
    report.confusion = confusion_matrix(labels, predicted, classes);
    report.accuracy = accuracy(report.confusion);

    // Per-class one-vs-rest rates; class k scored by its probability.
    std::vector<uint64_t> class_counts(classes, 0);
    for (int y : labels) ++class_counts[y];

    double macro_auc = 0.0, macro_sens = 0.0, macro_spec = 0.0;
    int included = 0;
    for (int k = 0; k < classes; ++k) {
        ClassRates rates;
        rates.cls = k;
        uint64_t row = report.confusion.row_sum(k);
        if (row > 0)
            rates.sensitivity = static_cast<double>(report.confusion.at(k, k)) /
                                static_cast<double>(row);
        uint64_t negatives = report.samples - class_counts[k];
        if (negatives > 0) {
            uint64_t fp = 0;
            for (int t = 0; t < classes; ++t)
                if (t != k) fp += report.confusion.at(t, k);
            rates.specificity =
                static_cast<double>(negatives - fp) / static_cast<double>(negatives);
        }
        if (class_counts[k] > 0 && negatives > 0) {
            std::vector<double> scores(probs.size());
            std::vector<int> ovr(probs.size());
            for (size_t i = 0; i < probs.size(); ++i) {
                scores[i] = probs[i][k];
                ovr[i] = labels[i] == k ? 1 : 0;
            }
            rates.auc = auc_from_scores(scores, ovr);
            macro_auc += *rates.auc;
            macro_sens += *rates.sensitivity;
            macro_spec += *rates.specificity;
            ++included;
        } else {
            report.warnings.push_back(
                cat("class ", k, class_counts[k] == 0 ? " absent from labels"
                                                      : " covers all labels",
                    "; excluded from macro averages"));
        }
        report.per_class.push_back(rates);
    }

    if (classes == 2) {
        BinaryRates rates = binary_rates(report.confusion);
        report.sensitivity = rates.sensitivity;
        report.specificity = rates.specificity;
        if (class_counts[0] > 0 && class_counts[1] > 0) {
            std::vector<double> scores(probs.size());
            for (size_t i = 0; i < probs.size(); ++i) scores[i] = probs[i][1];
            report.auc = auc_from_scores(scores, labels);
            report.operating_point =
                sensitivity_at_specificity(scores, labels, target_specificity);
            report.operating_point_description =
                cat("max sensitivity among thresholds on the positive-class "
                    "probability with specificity >= ",
                    target_specificity);
        } else {
            report.warnings.push_back(
                "single-class labels: AUC and operating point undefined");
        }
    } else {
        if (included > 0) {
            report.auc = macro_auc / included;
            report.sensitivity = macro_sens / included;
            report.specificity = macro_spec / included;
        }
        report.operating_point_description =
            "macro one-vs-rest averages over classes present in the labels; "
            "no thresholded operating point for multi-class tasks";
    }
    return report;
}

std::string report_to_json(const MetricsReport& report, int indent) {
    using nlohmann::json;
    auto opt = [](const std::optional<double>& v) {
        return v ? json(*v) : json(nullptr);
    };

    json j;
    j["task"] = dataset::to_string(report.task);
    j["samples"] = report.samples;
    j["accuracy"] = report.accuracy;
    j["auc"] = opt(report.auc);
    j["sensitivity"] = opt(report.sensitivity);
    j["specificity"] = opt(report.specificity);

    json per_class = json::array();
    for (const auto& rates : report.per_class) {
        json c;
        c["class"] = rates.cls;
        c["sensitivity"] = opt(rates.sensitivity);
        c["specificity"] = opt(rates.specificity);
        c["auc"] = opt(rates.auc);
        per_class.push_back(c);
    }
    j["per_class"] = per_class;

    json confusion = json::array();
    for (int t = 0; t < report.confusion.classes; ++t) {
        json row = json::array();
        for (int p = 0; p < report.confusion.classes; ++p)
            row.push_back(report.confusion.at(t, p));
        confusion.push_back(row);
    }
    j["confusion"] = confusion;

    if (report.operating_point) {
        json op;
        op["description"] = report.operating_point_description;
        op["target_specificity"] = report.operating_point->target_specificity;
        op["sensitivity"] = report.operating_point->sensitivity;
        op["specificity"] = report.operating_point->specificity;
        op["threshold"] = std::isinf(report.operating_point->threshold)
                              ? json("inf")
                              : json(report.operating_point->threshold);
        j["operating_point"] = op;
    } else {
        j["operating_point"] = nullptr;
        if (!report.operating_point_description.empty())
            j["operating_point_description"] = report.operating_point_description;
    }
    j["warnings"] = report.warnings;
    return j.dump(indent);
}

std::string confusion_to_csv(const ConfusionMatrix& cm) {
    std::ostringstream out;
    out << "true\\predicted";
    for (int p = 0; p < cm.classes; ++p) out << ",pred_" << p;
    out << '\n';
    for (int t = 0; t < cm.classes; ++t) {
        out << "true_" << t;
        for (int p = 0; p < cm.classes; ++p) out << ',' << cm.at(t, p);
        out << '\n';
    }
    return out.str();
}

} // namespace rgp::metrics
