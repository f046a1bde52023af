// Generates a self-contained synthetic dataset (images, manifest and a
// ready-to-run config) for demos and smoke runs of the pipeline.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "rgp/dataset.hpp"
#include "rgp/error.hpp"
#include "rgp/image_io.hpp"
#include "rgp/synth.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
    CLI::App app{"synthetic fundus fixture generator"};
    std::string out_dir = "fixture";
    size_t count = 40;
    uint64_t seed = 7;
    int image_size = 160;
    app.add_option("--out", out_dir, "fixture directory to create");
    app.add_option("--count", count, "number of images");
    app.add_option("--seed", seed, "generator seed");
    app.add_option("--image-size", image_size, "image width (height = 7/8 width)");
    CLI11_PARSE(app, argc, argv);

    try {
        fs::create_directories(fs::path(out_dir) / "images");

        rgp::dataset::Manifest manifest;
        const char* sites[] = {"Lariboisiere", "Brest", "Saint-Etienne"};
        for (size_t i = 0; i < count; ++i) {
            int severity = static_cast<int>(i % 4);
            char id[32];
            std::snprintf(id, sizeof(id), "img_%04zu", i);
            rgp::RasterImage img = rgp::synth::fundus_image(
                seed + i, severity, image_size, image_size * 7 / 8);
            rgp::io::save_png(img,
                              (fs::path(out_dir) / "images" / (std::string(id) + ".png"))
                                  .string());
            rgp::dataset::ManifestEntry entry;
            entry.image_id = id;
            entry.dataset = rgp::dataset::DatasetId::Messidor;
            entry.native_grade = severity;
            entry.source_partition = rgp::dataset::Partition::None;
            entry.site = sites[i % 3];
            manifest.push_back(entry);
        }
        rgp::dataset::write_manifest(manifest,
                                     (fs::path(out_dir) / "manifest.csv").string());

        size_t train = count * 6 / 10;
        size_t validate = count * 2 / 10;
        size_t test = count - train - validate;
        std::ofstream config(fs::path(out_dir) / "config.json");
        config << "{\n"
               << "  \"manifest\": \"" << out_dir << "/manifest.csv\",\n"
               << "  \"images_dir\": \"" << out_dir << "/images\",\n"
               << "  \"out_dir\": \"" << out_dir << "/out\",\n"
               << "  \"task\": \"normal-abnormal\",\n"
               << "  \"seed\": " << seed << ",\n"
               << "  \"split_policy\": {\"kind\": \"counts\", \"train\": " << train
               << ", \"validate\": " << validate << ", \"test\": " << test
               << "},\n"
               << "  \"preprocess\": {\"output_size\": 64},\n"
               << "  \"baseline\": {\"thumb_side\": 16, \"epochs\": 150, "
                  "\"learning_rate\": 0.5, \"l2\": 0.0001},\n"
               << "  \"prediction_files\": [\"" << out_dir
               << "/out/baseline_predictions.csv\"]\n"
               << "}\n";

        std::cout << "fixture with " << count << " images written to " << out_dir
                  << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
