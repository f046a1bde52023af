#include "rgp/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <unordered_set>

#include "rgp/error.hpp"

namespace rgp::ensemble {

namespace {

// Validated members in canonical (model_id) order, so every fusion
// strategy accumulates in the same order regardless of input order.
std::vector<const classifier::PredictionRecord*>
canonical_members(const EnsembleInput& input) {
    if (input.records.empty())
        fail("ensemble input for \"", input.image_id, "\" has no records");

    std::vector<const classifier::PredictionRecord*> members;
    members.reserve(input.records.size());
    size_t classes = input.records[0].probs.size();
    std::unordered_set<std::string> model_ids;
    for (const auto& rec : input.records) {
        if (rec.probs.size() != classes)
            fail("mixed class counts in ensemble input for \"", input.image_id,
                 "\": ", rec.probs.size(), " vs ", classes);
        if (!model_ids.insert(rec.model_id).second)
            fail("duplicate model_id \"", rec.model_id, "\" for image \"",
                 input.image_id, "\"");
        double sum = 0.0;
        for (double p : rec.probs) {
            if (!(p >= 0.0))
                fail("negative probability from model \"", rec.model_id,
                     "\" for image \"", input.image_id, "\"");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-6)
            fail("probabilities from model \"", rec.model_id, "\" for image \"",
                 input.image_id, "\" sum to ", sum);
        members.push_back(&rec);
    }
    std::sort(members.begin(), members.end(),
              [](const auto* a, const auto* b) { return a->model_id < b->model_id; });
    return members;
}

std::vector<double> mean_probs(
    const std::vector<const classifier::PredictionRecord*>& members) {
    size_t classes = members[0]->probs.size();
    std::vector<double> mean(classes, 0.0);
    for (const auto* rec : members)
        for (size_t k = 0; k < classes; ++k) mean[k] += rec->probs[k];
    for (double& v : mean) v /= static_cast<double>(members.size());
    return mean;
}

} // namespace

const char* to_string(Strategy s) {
    return s == Strategy::MeanProb ? "mean" : "vote";
}

Strategy parse_strategy(const std::string& s) {
    if (s == "mean") return Strategy::MeanProb;
    if (s == "vote") return Strategy::MajorityVote;
    fail("unknown ensemble strategy \"", s, "\" (expected mean or vote)");
}

int argmax(std::span<const double> values) {
    if (values.empty()) fail("argmax of empty vector");
    int best = 0;
    for (int i = 1; i < static_cast<int>(values.size()); ++i)
        if (values[i] > values[best]) best = i;
    return best;
}

Diagnosis fuse_mean(const EnsembleInput& input) {
    auto members = canonical_members(input);
    Diagnosis d;
    d.image_id = input.image_id;
    d.strategy = Strategy::MeanProb;
    d.fused_probs = mean_probs(members);
    d.predicted_class = argmax(d.fused_probs);
    return d;
}

Diagnosis fuse_majority(const EnsembleInput& input) {
    auto members = canonical_members(input);
    size_t classes = members[0]->probs.size();

    std::vector<int> votes(classes, 0);
    for (const auto* rec : members) ++votes[argmax(rec->probs)];

    int max_votes = *std::max_element(votes.begin(), votes.end());
    std::vector<int> tied;
    for (size_t k = 0; k < classes; ++k)
        if (votes[k] == max_votes) tied.push_back(static_cast<int>(k));

    int winner = tied[0];
    if (tied.size() > 1) {
        // Vote tie: the tied class with the highest mean probability
        // wins; equal means keep the smallest index.
        std::vector<double> mean = mean_probs(members);
        for (int k : tied)
            if (mean[k] > mean[winner]) winner = k;
    }

    Diagnosis d;
    d.image_id = input.image_id;
    d.strategy = Strategy::MajorityVote;
    d.fused_probs.resize(classes);
    for (size_t k = 0; k < classes; ++k)
        d.fused_probs[k] =
            static_cast<double>(votes[k]) / static_cast<double>(members.size());
    d.predicted_class = winner;
    return d;
}

BatchResult fuse_batch(const std::vector<EnsembleInput>& inputs,
                       Strategy strategy) {
    std::unordered_set<std::string> ids;
    for (const auto& input : inputs)
        if (!ids.insert(input.image_id).second)
            fail("duplicate image_id \"", input.image_id, "\" in ensemble batch");

    BatchResult result;
    for (const auto& input : inputs) {
        if (input.records.empty()) {
            result.omissions.push_back(input.image_id);
            continue;
        }
        result.diagnoses.push_back(strategy == Strategy::MeanProb
                                       ? fuse_mean(input)
                                       : fuse_majority(input));
    }
    std::sort(result.diagnoses.begin(), result.diagnoses.end(),
              [](const Diagnosis& a, const Diagnosis& b) {
                  return a.image_id < b.image_id;
              });
    std::sort(result.omissions.begin(), result.omissions.end());
    return result;
}

std::vector<EnsembleInput>
group_predictions(const std::vector<classifier::PredictionRecord>& records,
                  std::span<const std::string> expected_ids) {
    std::map<std::string, EnsembleInput> by_id;
    for (const auto& rec : records) {
        EnsembleInput& input = by_id[rec.image_id];
        input.image_id = rec.image_id;
        input.records.push_back(rec);
    }
    for (const auto& id : expected_ids) {
        EnsembleInput& input = by_id[id];
        input.image_id = id;
    }
    std::vector<EnsembleInput> out;
    out.reserve(by_id.size());
    for (auto& [id, input] : by_id) out.push_back(std::move(input));
    return out;
}

void write_diagnoses(const std::vector<Diagnosis>& diagnoses,
                     const std::string& path) {
    if (diagnoses.empty()) fail("write_diagnoses: no diagnoses");
    size_t classes = diagnoses[0].fused_probs.size();
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("cannot write ", path);
    out << "image_id,strategy,predicted_class";
    for (size_t k = 0; k < classes; ++k) out << ",p" << k;
    out << '\n';
    char buf[32];
    for (const auto& d : diagnoses) {
        out << d.image_id << ',' << to_string(d.strategy) << ','
            << d.predicted_class;
        for (double p : d.fused_probs) {
            std::snprintf(buf, sizeof(buf), "%.10g", p);
            out << ',' << buf;
        }
        out << '\n';
    }
    if (!out) fail("failed writing ", path);
}

} // namespace rgp::ensemble
