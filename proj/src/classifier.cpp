#include "rgp/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <unordered_set>

#include <json.hpp>

#include "rgp/csv.hpp"
#include "rgp/error.hpp"
#include "rgp/imaging.hpp"

namespace rgp::classifier {

namespace {

void check_training_inputs(const std::vector<FeatureVector>& features,
                           const std::vector<int>& labels, int classes) {
    if (features.empty()) fail("train_softmax: no training samples");
    if (features.size() != labels.size())
        fail("train_softmax: ", features.size(), " features vs ", labels.size(),
             " labels");
    size_t dim = features[0].values.size();
    for (const auto& f : features)
        if (f.values.size() != dim)
            fail("train_softmax: inconsistent feature dimension for ",
                 f.image_id);
    std::vector<size_t> per_class(classes, 0);
    for (int y : labels) {
        if (y < 0 || y >= classes)
            fail("train_softmax: label ", y, " out of range [0,", classes, ")");
        ++per_class[y];
    }
    for (int k = 0; k < classes; ++k)
        if (per_class[k] == 0) fail("train_softmax: class ", k, " has no samples");
}

std::string format_prob(double p) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", p);
    return buf;
}

} // namespace

FeatureVector featurize(const RasterImage& image, int side, std::string image_id) {
    image.validate();
    if (image.colorspace != ColorSpace::RGB)
        fail("featurize: expected RGB input, got ", to_string(image.colorspace));
    if (side < 1) fail("featurize: thumbnail side must be >= 1");

    RasterImage thumb = imaging::resize_bilinear(image, side, side);
    FeatureVector fv;
    fv.image_id = std::move(image_id);
    fv.values.resize(thumb.data.size());
    for (size_t i = 0; i < thumb.data.size(); ++i)
        fv.values[i] = thumb.data[i] / 255.0;
    return fv;
}

std::vector<double> softmax(std::span<const double> logits) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double v : logits) mx = std::max(mx, v);
    std::vector<double> out(logits.size());
    double sum = 0.0;
    for (size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - mx);
        sum += out[i];
    }
    for (double& v : out) v /= sum;
    return out;
}

namespace {

std::vector<double> logits_of(const SoftmaxModel& model,
                              const std::vector<double>& x) {
    std::vector<double> z(model.classes);
    for (int k = 0; k < model.classes; ++k) {
        const double* row = model.weights.data() + static_cast<size_t>(k) * model.dim;
        double acc = model.bias[k];
        for (int j = 0; j < model.dim; ++j) acc += row[j] * x[j];
        z[k] = acc;
    }
    return z;
}

} // namespace

double softmax_loss(const SoftmaxModel& model,
                    const std::vector<FeatureVector>& features,
                    const std::vector<int>& labels, double l2) {
    double loss = 0.0;
    for (size_t i = 0; i < features.size(); ++i) {
        std::vector<double> z = logits_of(model, features[i].values);
        double mx = *std::max_element(z.begin(), z.end());
        double lse = 0.0;
        for (double v : z) lse += std::exp(v - mx);
        loss += -(z[labels[i]] - mx - std::log(lse));
    }
    loss /= static_cast<double>(features.size());
    double reg = 0.0;
    for (double w : model.weights) reg += w * w;
    return loss + 0.5 * l2 * reg;
}

void softmax_gradient(const SoftmaxModel& model,
                      const std::vector<FeatureVector>& features,
                      const std::vector<int>& labels, double l2,
                      std::vector<double>& grad_weights,
                      std::vector<double>& grad_bias) {
    grad_weights.assign(model.weights.size(), 0.0);
    grad_bias.assign(model.bias.size(), 0.0);
    const double inv_n = 1.0 / static_cast<double>(features.size());

    for (size_t i = 0; i < features.size(); ++i) {
        const std::vector<double>& x = features[i].values;
        std::vector<double> p = softmax(logits_of(model, x));
        p[labels[i]] -= 1.0;
        for (int k = 0; k < model.classes; ++k) {
            double coeff = p[k] * inv_n;
            grad_bias[k] += coeff;
            double* row = grad_weights.data() + static_cast<size_t>(k) * model.dim;
            for (int j = 0; j < model.dim; ++j) row[j] += coeff * x[j];
        }
    }
    for (size_t i = 0; i < model.weights.size(); ++i)
        grad_weights[i] += l2 * model.weights[i];
}

TrainResult train_softmax(const std::vector<FeatureVector>& features,
                          const std::vector<int>& labels, dataset::Task task,
                          const TrainConfig& config,
                          const EpochObserver& observer) {
    int classes = dataset::class_count(task);
    check_training_inputs(features, labels, classes);
    if (config.epochs < 1) fail("train_softmax: epochs must be >= 1");
    if (!(config.learning_rate > 0.0))
        fail("train_softmax: learning rate must be positive");
    if (config.l2 < 0.0) fail("train_softmax: l2 must be non-negative");

    TrainResult result;
    SoftmaxModel& model = result.model;
    model.task = task;
    model.classes = classes;
    model.dim = static_cast<int>(features[0].values.size());
    model.thumb_side = 0;
    model.weights.assign(static_cast<size_t>(classes) * model.dim, 0.0);
    model.bias.assign(classes, 0.0);

    std::vector<double> grad_w, grad_b;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        double loss = softmax_loss(model, features, labels, config.l2);
        if (!std::isfinite(loss))
            fail("train_softmax: diverged at epoch ", epoch, " (loss ", loss, ")");
        result.epoch_losses.push_back(loss);

        softmax_gradient(model, features, labels, config.l2, grad_w, grad_b);
        for (size_t i = 0; i < model.weights.size(); ++i)
            model.weights[i] -= config.learning_rate * grad_w[i];
        for (int k = 0; k < classes; ++k)
            model.bias[k] -= config.learning_rate * grad_b[k];

        if (observer) observer(epoch, loss, model);
    }
    result.final_loss = softmax_loss(model, features, labels, config.l2);
    if (!std::isfinite(result.final_loss))
        fail("train_softmax: diverged (final loss ", result.final_loss, ")");
    return result;
}

PredictionRecord predict(const SoftmaxModel& model, const FeatureVector& feature,
                         std::string model_id) {
    if (static_cast<int>(feature.values.size()) != model.dim)
        fail("predict: feature dimension ", feature.values.size(),
             " does not match model dimension ", model.dim);
    PredictionRecord rec;
    rec.image_id = feature.image_id;
    rec.model_id = std::move(model_id);
    rec.probs = softmax(logits_of(model, feature.values));
    return rec;
}

LoadedPredictions load_predictions(const std::string& path, dataset::Task task,
                                   std::span<const std::string> expected_ids) {
    int classes = dataset::class_count(task);
    csv::File f = csv::read_file(path);

    std::vector<std::string> expected_header = {"image_id", "model_id"};
    for (int k = 0; k < classes; ++k)
        expected_header.push_back(cat("p", k));
    if (f.header.size() != expected_header.size())
        fail(path, ": header has ", f.header.size(), " columns; task ",
             dataset::to_string(task), " needs ", expected_header.size(),
             " (image_id,model_id,p0..p", classes - 1, ")");
    csv::require_header(f, expected_header, path);

    LoadedPredictions out;
    std::unordered_set<std::string> keys;
    std::unordered_set<std::string> file_ids;
    for (const auto& row : f.rows) {
        auto bad = [&](auto&&... parts) {
            fail(path, ":", row.line, ": ", parts...);
        };
        if (row.fields.size() != expected_header.size())
            bad("expected ", expected_header.size(), " fields, got ",
                row.fields.size());

        PredictionRecord rec;
        rec.image_id = row.fields[0];
        rec.model_id = row.fields[1];
        if (rec.image_id.empty()) bad("empty image_id");
        if (rec.model_id.empty()) bad("empty model_id");
        if (!keys.insert(rec.image_id + "\x1f" + rec.model_id).second)
            bad("duplicate (image_id, model_id) pair");

        double sum = 0.0;
        for (int k = 0; k < classes; ++k) {
            double p;
            try {
                p = csv::parse_double(row.fields[2 + k]);
            } catch (const Error& err) {
                bad(err.what());
            }
            if (!(p >= 0.0)) bad("negative probability ", row.fields[2 + k]);
            rec.probs.push_back(p);
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-6)
            bad("probabilities sum to ", sum, ", outside 1 +- 1e-6");

        file_ids.insert(rec.image_id);
        out.records.push_back(std::move(rec));
    }

    if (!expected_ids.empty()) {
        std::unordered_set<std::string> expected(expected_ids.begin(),
                                                 expected_ids.end());
        for (const auto& id : expected_ids)
            if (!file_ids.count(id)) out.coverage.missing.push_back(id);
        std::vector<std::string> extra;
        for (const auto& id : file_ids)
            if (!expected.count(id)) extra.push_back(id);
        std::sort(extra.begin(), extra.end());
        out.coverage.extra = std::move(extra);
    }
    return out;
}

void write_predictions(const std::vector<PredictionRecord>& records,
                       const std::string& path) {
    if (records.empty()) fail("write_predictions: no records");
    size_t classes = records[0].probs.size();
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("cannot write ", path);
    out << "image_id,model_id";
    for (size_t k = 0; k < classes; ++k) out << ",p" << k;
    out << '\n';
    for (const auto& rec : records) {
        if (rec.probs.size() != classes)
            fail("write_predictions: inconsistent class count for ", rec.image_id);
        out << rec.image_id << ',' << rec.model_id;
        for (double p : rec.probs) out << ',' << format_prob(p);
        out << '\n';
    }
    if (!out) fail("failed writing ", path);
}

void save_model(const SoftmaxModel& model, const std::string& path) {
    nlohmann::json j;
    j["format"] = "rgp-softmax";
    j["version"] = 1;
    j["task"] = dataset::to_string(model.task);
    j["classes"] = model.classes;
    j["dim"] = model.dim;
    j["thumb_side"] = model.thumb_side;
    j["weights"] = model.weights;
    j["bias"] = model.bias;
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("cannot write ", path);
    out << j.dump(2) << '\n';
    if (!out) fail("failed writing ", path);
}

SoftmaxModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open ", path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        fail(path, ": invalid JSON: ", e.what());
    }
    if (j.value("format", "") != "rgp-softmax")
        fail(path, ": not a softmax model file");
    if (j.value("version", 0) != 1)
        fail(path, ": unsupported model version ", j.value("version", 0));

    SoftmaxModel model;
    model.task = dataset::parse_task(j.at("task").get<std::string>());
    model.classes = j.at("classes").get<int>();
    model.dim = j.at("dim").get<int>();
    model.thumb_side = j.at("thumb_side").get<int>();
    model.weights = j.at("weights").get<std::vector<double>>();
    model.bias = j.at("bias").get<std::vector<double>>();

    if (model.classes != dataset::class_count(model.task))
        fail(path, ": class count ", model.classes, " does not match task");
    if (model.weights.size() !=
        static_cast<size_t>(model.classes) * static_cast<size_t>(model.dim))
        fail(path, ": weight matrix size mismatch");
    if (model.bias.size() != static_cast<size_t>(model.classes))
        fail(path, ": bias size mismatch");
    for (double w : model.weights)
        if (!std::isfinite(w)) fail(path, ": non-finite weight");
    for (double b : model.bias)
        if (!std::isfinite(b)) fail(path, ": non-finite bias");
    return model;
}

} // namespace rgp::classifier
