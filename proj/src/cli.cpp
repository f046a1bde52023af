#include "rgp/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "rgp/classifier.hpp"
#include "rgp/error.hpp"
#include "rgp/image_io.hpp"
#include "rgp/log.hpp"
#include "rgp/metrics.hpp"
#include "rgp/svg.hpp"

namespace fs = std::filesystem;

namespace rgp::cli {

namespace {

// ---- atomic output helpers ----

void write_text_atomic(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) fail("cannot write ", tmp.string());
        out << content;
        if (!out) fail("failed writing ", tmp.string());
    }
    fs::rename(tmp, path);
}

void save_png_atomic(const RasterImage& image, const fs::path& path) {
    fs::path tmp = path;
    tmp += ".tmp";
    io::save_png(image, tmp.string());
    fs::rename(tmp, path);
}

std::string pct(double rate) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.2f", rate * 100.0);
    return buf;
}

std::string pct(const std::optional<double>& rate) {
    return rate ? pct(*rate) : std::string("n/a");
}

// ---- manifest / path plumbing ----

dataset::Manifest load_manifest_pruned(const RunConfig& config) {
    if (config.manifest_path.empty()) fail("config: manifest path not set");
    dataset::Manifest manifest = dataset::load_manifest(config.manifest_path);
    if (!config.exclusions_path.empty()) {
        auto exclusions = dataset::load_exclusions(config.exclusions_path);
        dataset::PruneResult pruned = dataset::prune(manifest, exclusions);
        log::info(cat("pruned ", pruned.removed, " of ", manifest.size(),
                      " manifest entries"));
        for (const auto& id : pruned.missing)
            log::warn(cat("exclusion id not in manifest: ", id));
        manifest = std::move(pruned.manifest);
    }
    return manifest;
}

// image_id with a recognized extension stripped; used to name outputs.
std::string id_stem(const std::string& image_id) {
    for (const char* ext : {".png", ".jpg", ".jpeg"}) {
        if (image_id.size() > std::strlen(ext) &&
            image_id.ends_with(ext))
            return image_id.substr(0, image_id.size() - std::strlen(ext));
    }
    return image_id;
}

fs::path resolve_input_image(const fs::path& dir, const std::string& image_id) {
    fs::path direct = dir / image_id;
    if (fs::exists(direct) && !fs::is_directory(direct)) return direct;
    for (const char* ext : {".png", ".jpg", ".jpeg"}) {
        fs::path candidate = dir / (image_id + ext);
        if (fs::exists(candidate)) return candidate;
    }
    fail("image file for \"", image_id, "\" not found under ", dir.string());
}

fs::path preprocessed_path(const RunConfig& config, const std::string& image_id) {
    return fs::path(config.out_dir) / "preprocessed" / (id_stem(image_id) + ".png");
}

dataset::SplitPolicy resolve_policy(const RunConfig& config,
                                    const dataset::Manifest& manifest) {
    if (config.split_policy_kind == "eyepacs") return dataset::SplitPolicy::eyepacs();
    if (config.split_policy_kind == "messidor")
        return dataset::SplitPolicy::messidor(config.split_policy.test_site);
    if (config.split_policy_kind == "counts") return config.split_policy;
    if (config.split_policy_kind != "auto")
        fail("config: unknown split policy \"", config.split_policy_kind, "\"");

    if (manifest.empty()) fail("cannot infer split policy from empty manifest");
    bool all_eyepacs = true, all_messidor = true;
    for (const auto& e : manifest) {
        all_eyepacs &= e.dataset == dataset::DatasetId::EyePacs;
        all_messidor &= e.dataset == dataset::DatasetId::Messidor;
    }
    if (all_messidor)
        return dataset::SplitPolicy::messidor(config.split_policy.test_site);
    if (all_eyepacs) return dataset::SplitPolicy::eyepacs();
    fail("mixed-dataset manifest: set an explicit counts split policy");
}

std::vector<dataset::SplitAssignment> load_split_file(const RunConfig& config) {
    fs::path path = fs::path(config.out_dir) / "split.csv";
    if (!fs::exists(path))
        fail("split file ", path.string(), " not found; run the split command");
    return dataset::load_splits(path.string());
}

int worker_count(const RunConfig& config) {
    if (config.workers > 0) return config.workers;
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

struct LabeledIds {
    std::vector<std::string> ids;
    std::vector<int> labels;
};

LabeledIds ids_for_split(const std::vector<dataset::SplitAssignment>& splits,
                         const dataset::Manifest& manifest, dataset::Split which,
                         dataset::Task task) {
    std::unordered_map<std::string, const dataset::ManifestEntry*> index;
    for (const auto& e : manifest) index[e.image_id] = &e;

    LabeledIds out;
    for (const auto& s : splits) {
        if (s.split != which) continue;
        auto it = index.find(s.image_id);
        if (it == index.end())
            fail("split id \"", s.image_id, "\" not present in manifest");
        out.ids.push_back(s.image_id);
        out.labels.push_back(dataset::map_grade(it->second->dataset,
                                                it->second->native_grade, task));
    }
    return out;
}

classifier::FeatureVector featurize_preprocessed(const RunConfig& config,
                                                 const std::string& image_id) {
    fs::path path = preprocessed_path(config, image_id);
    if (!fs::exists(path))
        fail("preprocessed image ", path.string(),
             " not found; run the preprocess command");
    RasterImage img = io::load_image(path.string());
    if (img.colorspace == ColorSpace::Gray) img = imaging::gray_to_rgb(img);
    return classifier::featurize(img, config.baseline.thumb_side, image_id);
}

} // namespace

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open config ", path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        fail(path, ": invalid JSON: ", e.what());
    }

    RunConfig c;
    c.manifest_path = j.value("manifest", "");
    c.images_dir = j.value("images_dir", "");
    c.exclusions_path = j.value("exclusions", "");
    c.prediction_files =
        j.value("prediction_files", std::vector<std::string>{});
    c.predictions_dir = j.value("predictions_dir", "");
    c.out_dir = j.value("out_dir", "out");
    c.task = dataset::parse_task(j.value("task", "quaternary"));
    c.seed = j.value("seed", uint64_t{0});

    if (j.contains("preprocess")) {
        const auto& p = j.at("preprocess");
        c.preprocess.clahe_tiles = p.value("clahe_tiles", c.preprocess.clahe_tiles);
        c.preprocess.clahe_clip_limit =
            p.value("clahe_clip_limit", c.preprocess.clahe_clip_limit);
        c.preprocess.blur_radius_fraction =
            p.value("blur_radius_fraction", c.preprocess.blur_radius_fraction);
        c.preprocess.subtraction_gain =
            p.value("subtraction_gain", c.preprocess.subtraction_gain);
        c.preprocess.subtraction_offset =
            p.value("subtraction_offset", c.preprocess.subtraction_offset);
        c.preprocess.output_size = p.value("output_size", c.preprocess.output_size);
        c.emit_stage_images = p.value("emit_stage_images", false);
    }

    if (j.contains("split_policy")) {
        const auto& s = j.at("split_policy");
        c.split_policy_kind = s.value("kind", "auto");
        c.split_policy.train_count = s.value("train", size_t{0});
        c.split_policy.validate_count = s.value("validate", size_t{0});
        c.split_policy.test_count = s.value("test", size_t{0});
        c.split_policy.test_site =
            s.value("test_site", c.split_policy.test_site);
        if (c.split_policy_kind == "counts")
            c.split_policy = dataset::SplitPolicy::counts(
                c.split_policy.train_count, c.split_policy.validate_count,
                c.split_policy.test_count);
    }

    c.strategy = ensemble::parse_strategy(j.value("strategy", "mean"));
    c.target_specificity = j.value("target_specificity", 0.9);

    if (j.contains("baseline")) {
        const auto& b = j.at("baseline");
        c.baseline.thumb_side = b.value("thumb_side", c.baseline.thumb_side);
        c.baseline.learning_rate =
            b.value("learning_rate", c.baseline.learning_rate);
        c.baseline.epochs = b.value("epochs", c.baseline.epochs);
        c.baseline.l2 = b.value("l2", c.baseline.l2);
        c.baseline.model_id = b.value("model_id", c.baseline.model_id);
    }

    c.workers = j.value("workers", 0);
    c.coverage_threshold = j.value("coverage_threshold", 1.0);
    return c;
}

RunConfig resolve_config(const Overrides& overrides) {
    RunConfig config;
    if (overrides.config_path) config = load_config(*overrides.config_path);
    if (overrides.task) config.task = dataset::parse_task(*overrides.task);
    if (overrides.seed) config.seed = *overrides.seed;
    if (overrides.strategy)
        config.strategy = ensemble::parse_strategy(*overrides.strategy);
    if (overrides.target_specificity)
        config.target_specificity = *overrides.target_specificity;
    if (overrides.workers) config.workers = *overrides.workers;
    if (overrides.out_dir) config.out_dir = *overrides.out_dir;

    if (!(config.target_specificity > 0.0 && config.target_specificity < 1.0))
        fail("target specificity must be in (0,1), got ",
             config.target_specificity);
    if (config.coverage_threshold < 0.0 || config.coverage_threshold > 1.0)
        fail("coverage threshold must be in [0,1], got ",
             config.coverage_threshold);
    return config;
}

int cmd_preprocess(const RunConfig& config) {
    config.preprocess.validate();
    if (config.images_dir.empty()) fail("config: images_dir not set");
    if (!fs::is_directory(config.images_dir))
        fail("images_dir ", config.images_dir, " is not a directory");

    dataset::Manifest manifest = load_manifest_pruned(config);
    std::sort(manifest.begin(), manifest.end(),
              [](const auto& a, const auto& b) { return a.image_id < b.image_id; });

    fs::path out_root(config.out_dir);
    std::error_code ec;
    fs::create_directories(out_root / "preprocessed", ec);
    if (ec || !fs::is_directory(out_root / "preprocessed"))
        fail("cannot create output directory ", (out_root / "preprocessed").string());

    struct ImageLog {
        std::string image_id;
        bool ok = false;
        std::string message;
        double rim_radius = 0.0;
        imaging::BoundingBox box;
        std::vector<std::string> trace;
    };
    std::vector<ImageLog> logs(manifest.size());

    std::atomic<size_t> next{0};
    auto work = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= manifest.size()) return;
            const auto& entry = manifest[i];
            ImageLog& lg = logs[i];
            lg.image_id = entry.image_id;
            try {
                fs::path in_path =
                    resolve_input_image(config.images_dir, entry.image_id);
                RasterImage img = io::load_image(in_path.string());
                if (img.colorspace == ColorSpace::Gray)
                    img = imaging::gray_to_rgb(img);

                imaging::StageObserver observer;
                fs::path out_path = preprocessed_path(config, entry.image_id);
                if (config.emit_stage_images) {
                    std::string stem = id_stem(entry.image_id);
                    auto stage_index = std::make_shared<int>(0);
                    observer = [&, stem, stage_index](const std::string&,
                                                      const RasterImage& stage_img) {
                        ++*stage_index;
                        RasterImage printable =
                            stage_img.colorspace == ColorSpace::YCbCr
                                ? imaging::ycbcr_to_rgb(stage_img)
                                : stage_img;
                        save_png_atomic(printable,
                                        out_root / "preprocessed" /
                                            (stem + ".stage" +
                                             std::to_string(*stage_index) + ".png"));
                    };
                }

                imaging::PreprocessResult result =
                    imaging::preprocess(img, config.preprocess, observer);
                save_png_atomic(result.image, out_path);
                lg.ok = true;
                lg.rim_radius = result.rim_radius;
                lg.box = result.box;
                lg.trace = std::move(result.trace);
            } catch (const std::exception& e) {
                lg.ok = false;
                lg.message = e.what();
            }
        }
    };

    int n_workers = std::min<int>(worker_count(config),
                                  std::max<size_t>(manifest.size(), 1));
    std::vector<std::thread> pool;
    for (int t = 1; t < n_workers; ++t) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();

    std::ostringstream log_csv;
    log_csv << "image_id,status,stages,rim_radius,box_x0,box_y0,box_x1,box_y1,"
               "message\n";
    size_t failures = 0;
    for (const auto& lg : logs) {
        std::string stages;
        for (size_t i = 0; i < lg.trace.size(); ++i) {
            if (i) stages.push_back('|');
            stages += lg.trace[i];
        }
        std::string message = lg.message;
        std::replace(message.begin(), message.end(), ',', ';');
        log_csv << lg.image_id << ',' << (lg.ok ? "ok" : "error") << ',' << stages
                << ',' << lg.rim_radius << ',' << lg.box.x0 << ',' << lg.box.y0
                << ',' << lg.box.x1 << ',' << lg.box.y1 << ',' << message << '\n';
        if (!lg.ok) {
            ++failures;
            log::warn(cat(lg.image_id, ": ", lg.message));
        }
    }
    write_text_atomic(out_root / "preprocess_log.csv", log_csv.str());

    log::info(cat("preprocessed ", logs.size() - failures, "/", logs.size(),
                  " images into ", (out_root / "preprocessed").string()));
    return failures == 0 ? 0 : 1;
}

int cmd_split(const RunConfig& config) {
    dataset::Manifest manifest = load_manifest_pruned(config);
    dataset::SplitPolicy policy = resolve_policy(config, manifest);
    dataset::SplitResult result =
        dataset::make_splits(manifest, policy, config.seed);
    for (const auto& w : result.warnings) log::warn(w);

    fs::path out_root(config.out_dir);
    std::error_code ec;
    fs::create_directories(out_root, ec);

    {
        fs::path tmp = out_root / "split.csv.tmp";
        dataset::write_splits(result.assignments, tmp.string());
        fs::rename(tmp, out_root / "split.csv");
    }

    std::ostringstream dist_csv;
    dist_csv << "task,class,train,validate,test\n";
    for (dataset::Task task :
         {dataset::Task::Quaternary, dataset::Task::Ternary,
          dataset::Task::BinaryReferable, dataset::Task::BinaryNormalAbnormal}) {
        dataset::DistributionTable table =
            dataset::class_distribution(result.assignments, manifest, task);
        for (int cls = 0; cls < dataset::class_count(task); ++cls)
            dist_csv << dataset::to_string(task) << ',' << cls << ','
                     << table.counts[0][cls] << ',' << table.counts[1][cls] << ','
                     << table.counts[2][cls] << '\n';
    }
    write_text_atomic(out_root / "distribution.csv", dist_csv.str());

    bool all_pass = true;
    for (const auto& check :
         dataset::check_merge_identities(result.assignments, manifest)) {
        std::ostringstream line;
        line << "identity " << dataset::to_string(check.task) << "["
             << dataset::to_string(check.split) << "] class " << check.cls << ": ";
        for (size_t i = 0; i < check.terms.size(); ++i) {
            if (i) line << "+";
            line << check.terms[i];
        }
        line << " == " << check.actual << " "
             << (check.pass ? "PASS" : "FAIL");
        std::cout << line.str() << "\n";
        all_pass &= check.pass;
    }
    log::info(cat("split ", result.assignments.size(), " of ", manifest.size(),
                  " entries (seed ", config.seed, ")"));
    return all_pass ? 0 : 1;
}

int cmd_train_baseline(const RunConfig& config) {
    dataset::Manifest manifest = load_manifest_pruned(config);
    auto splits = load_split_file(config);

    LabeledIds train =
        ids_for_split(splits, manifest, dataset::Split::Train, config.task);
    LabeledIds validate =
        ids_for_split(splits, manifest, dataset::Split::Validate, config.task);
    if (train.ids.empty()) fail("train split is empty");

    log::info(cat("featurizing ", train.ids.size(), " train / ",
                  validate.ids.size(), " validation images"));
    std::vector<classifier::FeatureVector> train_features, val_features;
    for (const auto& id : train.ids)
        train_features.push_back(featurize_preprocessed(config, id));
    for (const auto& id : validate.ids)
        val_features.push_back(featurize_preprocessed(config, id));

    classifier::TrainConfig tc;
    tc.learning_rate = config.baseline.learning_rate;
    tc.epochs = config.baseline.epochs;
    tc.l2 = config.baseline.l2;
    tc.seed = config.seed;

    std::ostringstream train_log;
    train_log << "epoch,loss,validation_accuracy\n";
    auto observer = [&](int epoch, double loss,
                        const classifier::SoftmaxModel& model) {
        std::string val_acc = "n/a";
        if (!val_features.empty()) {
            size_t correct = 0;
            for (size_t i = 0; i < val_features.size(); ++i) {
                auto rec = classifier::predict(model, val_features[i],
                                               config.baseline.model_id);
                if (ensemble::argmax(rec.probs) == validate.labels[i]) ++correct;
            }
            val_acc = pct(static_cast<double>(correct) / val_features.size());
        }
        train_log << epoch << ',' << loss << ',' << val_acc << '\n';
        if (epoch % 25 == 0 || epoch + 1 == tc.epochs)
            log::info(cat("epoch ", epoch, " loss ", loss, " val_acc ", val_acc));
    };

    classifier::TrainResult result = classifier::train_softmax(
        train_features, train.labels, config.task, tc, observer);
    result.model.thumb_side = config.baseline.thumb_side;

    size_t loss_increases = 0;
    for (size_t e = 1; e < result.epoch_losses.size(); ++e)
        loss_increases += result.epoch_losses[e] > result.epoch_losses[e - 1];
    double best_loss = *std::min_element(result.epoch_losses.begin(),
                                         result.epoch_losses.end());
    if (loss_increases * 4 > result.epoch_losses.size() ||
        result.final_loss > 2.0 * best_loss + 1e-9)
        log::warn(cat("training is unstable (", loss_increases, " loss increases"
                      " over ", result.epoch_losses.size(), " epochs, best loss ",
                      best_loss, ", final ", result.final_loss,
                      "); consider lowering baseline.learning_rate"));

    fs::path out_root(config.out_dir);
    write_text_atomic(out_root / "training_log.csv", train_log.str());

    fs::path model_path = out_root / "model.json";
    {
        fs::path tmp = model_path;
        tmp += ".tmp";
        classifier::save_model(result.model, tmp.string());
        fs::rename(tmp, model_path);
    }

    // Predictions for every split image, so evaluate can consume the
    // baseline through the same CSV interface as external models.
    std::vector<classifier::PredictionRecord> records;
    for (const auto& s : splits) {
        auto feature = featurize_preprocessed(config, s.image_id);
        records.push_back(
            classifier::predict(result.model, feature, config.baseline.model_id));
    }
    std::sort(records.begin(), records.end(),
              [](const auto& a, const auto& b) { return a.image_id < b.image_id; });
    {
        fs::path tmp = out_root / "baseline_predictions.csv.tmp";
        classifier::write_predictions(records, tmp.string());
        fs::rename(tmp, out_root / "baseline_predictions.csv");
    }

    log::info(cat("final loss ", result.final_loss, "; model written to ",
                  model_path.string()));
    return 0;
}

int cmd_evaluate(const RunConfig& config) {
    dataset::Manifest manifest = load_manifest_pruned(config);
    auto splits = load_split_file(config);
    LabeledIds test =
        ids_for_split(splits, manifest, dataset::Split::Test, config.task);
    if (test.ids.empty()) fail("test split is empty");

    std::vector<std::string> files = config.prediction_files;
    if (!config.predictions_dir.empty()) {
        if (!fs::is_directory(config.predictions_dir))
            fail("predictions_dir ", config.predictions_dir,
                 " is not a directory");
        for (const auto& entry : fs::directory_iterator(config.predictions_dir))
            if (entry.path().extension() == ".csv")
                files.push_back(entry.path().string());
        std::sort(files.begin(), files.end());
    }
    if (files.empty()) fail("no prediction files configured");

    std::unordered_set<std::string> test_set(test.ids.begin(), test.ids.end());
    std::vector<classifier::PredictionRecord> records;
    std::unordered_set<std::string> keys;
    for (const auto& file : files) {
        auto loaded = classifier::load_predictions(file, config.task, test.ids);
        log::info(cat(file, ": ", loaded.records.size(), " records, ",
                      loaded.coverage.missing.size(), " test ids missing"));
        for (auto& rec : loaded.records) {
            if (!test_set.count(rec.image_id)) continue; // train/validate rows
            if (!keys.insert(rec.image_id + "\x1f" + rec.model_id).second)
                fail("duplicate prediction for (", rec.image_id, ", ",
                     rec.model_id, ") across files");
            records.push_back(std::move(rec));
        }
    }

    auto grouped = ensemble::group_predictions(records, test.ids);
    ensemble::BatchResult fused = ensemble::fuse_batch(grouped, config.strategy);

    size_t covered = test.ids.size() - fused.omissions.size();
    double coverage = static_cast<double>(covered) / test.ids.size();
    for (const auto& id : fused.omissions)
        log::warn(cat("no predictions for test image ", id));
    if (coverage < config.coverage_threshold)
        fail("prediction coverage ", coverage, " below threshold ",
             config.coverage_threshold, " (", covered, "/", test.ids.size(),
             " test ids covered)");

    // Align labels with the fused diagnoses (sorted by image_id).
    std::unordered_map<std::string, int> label_of;
    for (size_t i = 0; i < test.ids.size(); ++i)
        label_of[test.ids[i]] = test.labels[i];
    std::vector<std::vector<double>> probs;
    std::vector<int> labels;
    for (const auto& d : fused.diagnoses) {
        probs.push_back(d.fused_probs);
        labels.push_back(label_of.at(d.image_id));
    }

    metrics::MetricsReport report = metrics::evaluate_predictions(
        probs, labels, config.task, config.target_specificity);

    fs::path out_root(config.out_dir);
    std::error_code ec;
    fs::create_directories(out_root, ec);
    write_text_atomic(out_root / "report.json",
                      metrics::report_to_json(report) + "\n");
    write_text_atomic(out_root / "confusion.csv",
                      metrics::confusion_to_csv(report.confusion));
    {
        fs::path tmp = out_root / "diagnoses.csv.tmp";
        ensemble::write_diagnoses(fused.diagnoses, tmp.string());
        fs::rename(tmp, out_root / "diagnoses.csv");
    }

    // ROC plots: the binary curve, or one one-vs-rest curve per class.
    int classes = dataset::class_count(config.task);
    auto plot_curve = [&](std::span<const double> scores,
                          std::span<const int> ovr_labels,
                          const std::string& name, const std::string& title) {
        try {
            metrics::RocCurve curve = metrics::roc_curve(scores, ovr_labels);
            double area = metrics::auc(curve);
            write_text_atomic(out_root / name,
                              svg::render_roc(curve, cat(title, " (AUC ",
                                                         pct(area), "%)")));
        } catch (const Error& e) {
            log::warn(cat("skipping ", name, ": ", e.what()));
        }
    };
    if (classes == 2) {
        std::vector<double> scores(probs.size());
        for (size_t i = 0; i < probs.size(); ++i) scores[i] = probs[i][1];
        plot_curve(scores, labels, "roc.svg",
                   cat("ROC ", dataset::to_string(config.task)));
    } else {
        for (int k = 0; k < classes; ++k) {
            std::vector<double> scores(probs.size());
            std::vector<int> ovr(probs.size());
            for (size_t i = 0; i < probs.size(); ++i) {
                scores[i] = probs[i][k];
                ovr[i] = labels[i] == k ? 1 : 0;
            }
            plot_curve(scores, ovr, cat("roc_class", k, ".svg"),
                       cat("ROC one-vs-rest class ", k));
        }
    }

    // Table-style summary, rates as percentages.
    std::cout << "task " << dataset::to_string(config.task) << " strategy "
              << ensemble::to_string(config.strategy) << " samples "
              << report.samples << "\n";
    std::cout << "accuracy " << pct(report.accuracy) << "  auc "
              << pct(report.auc) << "  sensitivity " << pct(report.sensitivity)
              << "  specificity " << pct(report.specificity) << "\n";
    if (report.operating_point) {
        std::cout << "sensitivity " << pct(report.operating_point->sensitivity)
                  << " at specificity " << pct(report.operating_point->specificity)
                  << " (target " << pct(report.operating_point->target_specificity)
                  << ", threshold " << report.operating_point->threshold << ")\n";
    }
    for (const auto& w : report.warnings) log::warn(w);

    log::info(cat("report written to ", (out_root / "report.json").string()));
    return fused.omissions.empty() ? 0 : 1;
}

} // namespace rgp::cli
