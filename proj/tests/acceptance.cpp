// Acceptance suite: one criterion per check, one PASS/FAIL line each,
// with the runtime budget enforced. Run via ctest or directly:
//   ./acceptance <path-to-rgp-binary>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "oracles.hpp"
#include "rgp/classifier.hpp"
#include "rgp/dataset.hpp"
#include "rgp/ensemble.hpp"
#include "rgp/image_io.hpp"
#include "rgp/imaging.hpp"
#include "rgp/metrics.hpp"
#include "rgp/prng.hpp"
#include "rgp/synth.hpp"

namespace fs = std::filesystem;
using namespace rgp;

namespace {

std::string g_rgp_binary;

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <typename... Parts>
[[noreturn]] void fail_check(const Parts&... parts) {
    std::ostringstream os;
    (os << ... << parts);
    throw Failure(os.str());
}

#define EXPECT(cond, ...)                                                      \
    do {                                                                       \
        if (!(cond)) fail_check("line ", __LINE__, ": ", __VA_ARGS__);         \
    } while (0)

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

// ---- criterion bodies ----

void grade_map_reconciliation() {
    using dataset::Task;
    auto expect_counts = [](Task task, const std::vector<uint64_t>& quaternary,
                            const std::vector<uint64_t>& expected) {
        auto merged = dataset::merge_counts(task, quaternary);
        EXPECT(merged == expected, "merge mismatch for task ",
               dataset::to_string(task));
    };

    const std::vector<uint64_t> eyepacs_test = {24741, 7196, 753, 733};
    expect_counts(Task::BinaryNormalAbnormal, eyepacs_test, {24741, 8682});
    expect_counts(Task::BinaryReferable, eyepacs_test, {31937, 1486});
    expect_counts(Task::Ternary, eyepacs_test, {24741, 7196, 1486});

    const std::vector<uint64_t> messidor_test = {151, 30, 70, 149};
    expect_counts(Task::BinaryNormalAbnormal, messidor_test, {151, 249});
    expect_counts(Task::BinaryReferable, messidor_test, {181, 219});
    expect_counts(Task::Ternary, messidor_test, {151, 30, 219});

    // the merges factor through map_grade for every dataset and grade
    for (auto ds : {dataset::DatasetId::EyePacs, dataset::DatasetId::Messidor})
        for (int g = 0; g < dataset::native_grade_count(ds); ++g)
            for (Task task : {Task::BinaryNormalAbnormal, Task::BinaryReferable,
                              Task::Ternary, Task::Quaternary})
                EXPECT(dataset::map_grade(ds, g, task) ==
                           dataset::quaternary_merge(
                               task, dataset::map_grade(ds, g, Task::Quaternary)),
                       "composition identity failed for grade ", g);
}

void otsu_oracle() {
    SplitMix64 rng(0xACCE97);
    for (int iter = 0; iter < 1000; ++iter) {
        int occupied = 1 + static_cast<int>(rng.next_below(48));
        Histogram256 hist =
            oracle::random_histogram(rng, occupied, 1 + rng.next_below(5000));
        int expected = oracle::otsu_bruteforce(hist);
        int actual = imaging::otsu_threshold(hist);
        EXPECT(actual == expected, "iteration ", iter, ": otsu ", actual,
               " vs oracle ", expected);
    }
}

void auc_oracle() {
    SplitMix64 rng(0xA0C);
    for (int iter = 0; iter < 200; ++iter) {
        size_t n = 4 + rng.next_below(197); // n <= 200
        std::vector<double> scores(n);
        std::vector<int> labels(n);
        bool grid = rng.next_below(2) == 0; // half the instances carry ties
        for (size_t i = 0; i < n; ++i) {
            scores[i] = grid ? static_cast<double>(rng.next_below(15)) / 14.0
                             : oracle::random_unit(rng);
            labels[i] = static_cast<int>(rng.next_below(2));
        }
        labels[0] = 0;
        labels[1] = 1;
        double trapezoid = metrics::auc_from_scores(scores, labels);
        double pairwise = oracle::auc_pairwise(scores, labels);
        EXPECT(std::abs(trapezoid - pairwise) <= 1e-12, "iteration ", iter,
               ": trapezoid ", trapezoid, " vs pairwise ", pairwise);
    }
}

void color_round_trip() {
    SplitMix64 rng(0xC0102);
    const size_t pixels = 100000;
    RasterImage img = RasterImage::make(static_cast<int>(pixels), 1,
                                        ColorSpace::RGB);
    for (auto& v : img.data) v = static_cast<uint8_t>(rng.next_below(256));
    RasterImage back = imaging::ycbcr_to_rgb(imaging::rgb_to_ycbcr(img));
    for (size_t i = 0; i < img.data.size(); ++i) {
        int dev = std::abs(static_cast<int>(img.data[i]) -
                           static_cast<int>(back.data[i]));
        EXPECT(dev <= 1, "sample ", i, " deviates by ", dev);
    }
}

void gradient_check() {
    SplitMix64 rng(0x96AD);
    std::vector<classifier::FeatureVector> features;
    std::vector<int> labels;
    for (int i = 0; i < 15; ++i) {
        std::vector<double> x(10);
        for (auto& v : x) v = oracle::random_unit(rng);
        features.push_back({"s" + std::to_string(i), std::move(x)});
        labels.push_back(static_cast<int>(rng.next_below(4)));
    }
    for (int k = 0; k < 4; ++k) labels[k] = k;

    const double l2 = 0.02, h = 1e-5;
    for (int point = 0; point < 5; ++point) {
        classifier::SoftmaxModel model;
        model.task = dataset::Task::Quaternary;
        model.classes = 4;
        model.dim = 10;
        model.weights.resize(40);
        model.bias.resize(4);
        for (auto& w : model.weights) w = (oracle::random_unit(rng) - 0.5) * 2.0;
        for (auto& b : model.bias) b = (oracle::random_unit(rng) - 0.5) * 2.0;

        std::vector<double> grad_w, grad_b;
        classifier::softmax_gradient(model, features, labels, l2, grad_w, grad_b);
        auto loss = [&] {
            return classifier::softmax_loss(model, features, labels, l2);
        };
        double max_rel = 0.0;
        for (size_t i = 0; i < model.weights.size(); ++i) {
            double fd = oracle::central_difference(loss, model.weights[i], h);
            double denom = std::max({std::abs(fd), std::abs(grad_w[i]), 1e-6});
            max_rel = std::max(max_rel, std::abs(fd - grad_w[i]) / denom);
        }
        for (size_t i = 0; i < model.bias.size(); ++i) {
            double fd = oracle::central_difference(loss, model.bias[i], h);
            double denom = std::max({std::abs(fd), std::abs(grad_b[i]), 1e-6});
            max_rel = std::max(max_rel, std::abs(fd - grad_b[i]) / denom);
        }
        EXPECT(max_rel < 1e-4, "point ", point, ": max relative error ", max_rel);
    }
}

void ensemble_identities() {
    // single model: fusion is the identity
    classifier::PredictionRecord solo{"img", "only", {0.15, 0.6, 0.25}};
    ensemble::Diagnosis d = ensemble::fuse_mean({"img", {solo}});
    EXPECT(d.fused_probs == solo.probs, "single-model mean not identical");
    EXPECT(d.predicted_class == 1, "single-model argmax wrong");
    EXPECT(ensemble::fuse_majority({"img", {solo}}).predicted_class == 1,
           "single-model vote argmax wrong");

    // fixture pair
    ensemble::Diagnosis pair = ensemble::fuse_mean(
        {"img", {{"img", "a", {0.8, 0.2}}, {"img", "b", {0.4, 0.6}}}});
    EXPECT(std::abs(pair.fused_probs[0] - 0.6) <= 1e-12 &&
               std::abs(pair.fused_probs[1] - 0.4) <= 1e-12,
           "fixture mean is (", pair.fused_probs[0], ",", pair.fused_probs[1],
           ")");
    EXPECT(pair.predicted_class == 0, "fixture class wrong");

    // permutation invariance over random batches
    SplitMix64 rng(0xE75);
    for (int iter = 0; iter < 100; ++iter) {
        int classes = 2 + static_cast<int>(rng.next_below(3));
        int members = 1 + static_cast<int>(rng.next_below(6));
        std::vector<classifier::PredictionRecord> records;
        for (int m = 0; m < members; ++m) {
            std::vector<double> p(classes);
            double sum = 0.0;
            for (double& v : p) {
                v = oracle::random_unit(rng) + 1e-9;
                sum += v;
            }
            for (double& v : p) v /= sum;
            records.push_back({"img", "model" + std::to_string(m), p});
        }
        ensemble::Diagnosis base = ensemble::fuse_mean({"img", records});
        std::vector<classifier::PredictionRecord> shuffled = records;
        fisher_yates_shuffle(shuffled, rng);
        ensemble::Diagnosis perm = ensemble::fuse_mean({"img", shuffled});
        EXPECT(base.fused_probs == perm.fused_probs,
               "iteration ", iter, ": permutation changed the mean");
        EXPECT(base.predicted_class == perm.predicted_class,
               "iteration ", iter, ": permutation changed the class");
    }
}

void split_determinism() {
    dataset::Manifest manifest;
    for (size_t i = 0; i < 34469; ++i) {
        dataset::ManifestEntry e;
        char buf[24];
        std::snprintf(buf, sizeof(buf), "ep_%06zu", i);
        e.image_id = buf;
        e.dataset = dataset::DatasetId::EyePacs;
        e.native_grade = static_cast<int>(i % 5);
        e.source_partition = dataset::Partition::Train;
        manifest.push_back(e);
    }

    dataset::SplitResult a =
        dataset::make_splits(manifest, dataset::SplitPolicy::eyepacs(), 123);
    size_t train = 0, validate = 0;
    std::vector<bool> seen(manifest.size(), false);
    for (const auto& s : a.assignments) {
        if (s.split == dataset::Split::Train) ++train;
        if (s.split == dataset::Split::Validate) ++validate;
    }
    EXPECT(train == 30000, "train count ", train);
    EXPECT(validate == 4469, "validate count ", validate);
    EXPECT(a.assignments.size() == 34469, "assignments not exhaustive: ",
           a.assignments.size());

    fs::path dir = fs::temp_directory_path() / "rgp_acceptance_split";
    fs::remove_all(dir);
    fs::create_directories(dir);
    fs::path p1 = dir / "a.csv", p2 = dir / "b.csv", p3 = dir / "c.csv";
    dataset::write_splits(a.assignments, p1.string());

    dataset::SplitResult b =
        dataset::make_splits(manifest, dataset::SplitPolicy::eyepacs(), 123);
    dataset::write_splits(b.assignments, p2.string());
    EXPECT(read_file(p1) == read_file(p2), "same seed produced different bytes");

    SplitMix64 rng(5150);
    dataset::Manifest permuted = manifest;
    fisher_yates_shuffle(permuted, rng);
    dataset::SplitResult c =
        dataset::make_splits(permuted, dataset::SplitPolicy::eyepacs(), 123);
    dataset::write_splits(c.assignments, p3.string());
    EXPECT(read_file(p1) == read_file(p3),
           "manifest row order changed the assignment");
}

void clahe_identity() {
    // a histogram uniform over all 256 levels maps to the identity
    Histogram256 uniform;
    for (auto& b : uniform.bins) b = 7;
    for (double clip : {1.0, 4.0, 256.0}) {
        auto map = imaging::equalization_mapping(uniform, clip);
        for (int v = 0; v < 256; ++v)
            EXPECT(map[v] == static_cast<double>(v), "clip ", clip, ": map[", v,
                   "] = ", map[v]);
    }

    // image form: 16x16 with each value exactly once equalizes to itself
    RasterImage img = RasterImage::make(16, 16, ColorSpace::Gray);
    std::iota(img.data.begin(), img.data.end(), 0);
    RasterImage out = imaging::adaptive_hist_eq(img, 1, 4.0);
    EXPECT(out.data == img.data, "uniform image not fixed by equalization");

    // constant image maps to a constant image, any parameters
    for (int tiles : {1, 2, 4}) {
        for (double clip : {1.0, 4.0, 100.0}) {
            RasterImage constant = RasterImage::make(32, 24, ColorSpace::Gray, 93);
            RasterImage eq = imaging::adaptive_hist_eq(constant, tiles, clip);
            for (uint8_t v : eq.data)
                EXPECT(v == eq.data[0], "constant image produced levels ",
                       int(eq.data[0]), " and ", int(v));
        }
    }
}

int run_command(const std::string& args, const fs::path& log_path) {
    std::string cmd = g_rgp_binary + " " + args + " >> " + log_path.string() +
                      " 2>&1";
    int status = std::system(cmd.c_str());
    if (status == -1) fail_check("failed to launch: ", cmd);
    return WEXITSTATUS(status);
}

void end_to_end_smoke() {
    EXPECT(!g_rgp_binary.empty(), "pass the rgp binary path as argv[1]");

    fs::path root = fs::temp_directory_path() / "rgp_acceptance_e2e";
    fs::remove_all(root);
    fs::create_directories(root / "images");
    fs::path log_path = root / "commands.log";

    // 40 synthetic fundus images, severity 0 or 3 alternating; the lesion
    // mass makes the normal-abnormal labeling linearly separable.
    dataset::Manifest manifest;
    for (int i = 0; i < 40; ++i) {
        int severity = (i % 2) * 3;
        char id[16];
        std::snprintf(id, sizeof(id), "img_%02d", i);
        io::save_png(synth::fundus_image(9000 + i, severity, 160, 140),
                     (root / "images" / (std::string(id) + ".png")).string());
        dataset::ManifestEntry e;
        e.image_id = id;
        e.dataset = dataset::DatasetId::Messidor;
        e.native_grade = severity;
        manifest.push_back(e);
    }
    dataset::write_manifest(manifest, (root / "manifest.csv").string());

    fs::path cfg = root / "config.json";
    std::ofstream(cfg) << "{\n"
                       << "  \"manifest\": \"" << (root / "manifest.csv").string()
                       << "\",\n"
                       << "  \"images_dir\": \"" << (root / "images").string()
                       << "\",\n"
                       << "  \"out_dir\": \"" << (root / "out").string() << "\",\n"
                       << "  \"task\": \"normal-abnormal\",\n"
                       << "  \"seed\": 77,\n"
                       << "  \"split_policy\": {\"kind\": \"counts\", \"train\": "
                          "24, \"validate\": 8, \"test\": 8},\n"
                       << "  \"preprocess\": {\"output_size\": 64},\n"
                       << "  \"baseline\": {\"thumb_side\": 12, \"epochs\": 400, "
                          "\"learning_rate\": 0.3, \"l2\": 0.02},\n"
                       << "  \"prediction_files\": [\""
                       << (root / "out" / "baseline_predictions.csv").string()
                       << "\"]\n"
                       << "}\n";

    std::string base = "--config " + cfg.string();
    EXPECT(run_command("preprocess " + base, log_path) == 0,
           "preprocess failed; see ", log_path.string());
    EXPECT(run_command("split " + base, log_path) == 0, "split failed; see ",
           log_path.string());
    EXPECT(run_command("train-baseline " + base, log_path) == 0,
           "train-baseline failed; see ", log_path.string());
    EXPECT(run_command("evaluate " + base, log_path) == 0, "evaluate failed; see ",
           log_path.string());

    nlohmann::json report;
    try {
        report = nlohmann::json::parse(read_file(root / "out" / "report.json"));
    } catch (const std::exception& e) {
        fail_check("report.json invalid: ", e.what());
    }
    for (const char* key : {"task", "samples", "accuracy", "auc", "sensitivity",
                            "specificity", "per_class", "confusion",
                            "operating_point", "warnings"})
        EXPECT(report.contains(key), "report.json missing key ", key);
    EXPECT(report["task"] == "normal-abnormal", "unexpected task in report");
    EXPECT(report["samples"] == 8, "expected 8 test samples, got ",
           report["samples"].dump());

    // majority-class rate of the evaluated test split
    auto splits = dataset::load_splits((root / "out" / "split.csv").string());
    size_t normal = 0, total = 0;
    for (const auto& s : splits) {
        if (s.split != dataset::Split::Test) continue;
        for (const auto& e : manifest)
            if (e.image_id == s.image_id) {
                ++total;
                normal += e.native_grade == 0;
            }
    }
    double majority =
        std::max(normal, total - normal) / static_cast<double>(total);
    double accuracy = report["accuracy"].get<double>();
    EXPECT(accuracy > majority, "accuracy ", accuracy,
           " not above the majority rate ", majority);
}

// ---- harness ----

struct Criterion {
    const char* name;
    double budget_seconds;
    std::function<void()> run;
};

} // namespace

int main(int argc, char** argv) {
    if (argc > 1) g_rgp_binary = argv[1];

    const std::vector<Criterion> criteria = {
        {"grade-map folding reproduces the per-task class counts", 1.0,
         grade_map_reconciliation},
        {"otsu equals exhaustive-scan oracle on 1000 histograms", 5.0,
         otsu_oracle},
        {"trapezoid AUC equals Mann-Whitney on 200 instances", 5.0, auc_oracle},
        {"color round trip within 1 level on 1e5 pixels", 1.0, color_round_trip},
        {"softmax gradient matches finite differences", 5.0, gradient_check},
        {"ensemble fusion identities", 5.0, ensemble_identities},
        {"split determinism and 30000/4469 partition", 30.0, split_determinism},
        {"CLAHE uniform-histogram and constant-image identities", 5.0,
         clahe_identity},
        {"end-to-end smoke: 40 images through the full pipeline", 120.0,
         end_to_end_smoke},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        auto start = std::chrono::steady_clock::now();
        std::string error;
        try {
            c.run();
        } catch (const std::exception& e) {
            error = e.what();
        }
        double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        if (error.empty() && elapsed > c.budget_seconds)
            error = "exceeded " + std::to_string(c.budget_seconds) + " s budget";

        if (error.empty()) {
            std::printf("[PASS] %s (%.2f s)\n", c.name, elapsed);
        } else {
            std::printf("[FAIL] %s (%.2f s): %s\n", c.name, elapsed,
                        error.c_str());
            ++failures;
        }
    }

    if (failures) {
        std::printf("%d of %zu acceptance criteria failed\n", failures,
                    criteria.size());
        return 1;
    }
    std::printf("all %zu acceptance criteria passed\n", criteria.size());
    return 0;
}
