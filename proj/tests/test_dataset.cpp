#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "rgp/dataset.hpp"
#include "rgp/error.hpp"

using namespace rgp;
using namespace rgp::dataset;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

fs::path temp_dir() {
    fs::path dir = fs::temp_directory_path() / "rgp_test_dataset";
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

ManifestEntry entry(std::string id, DatasetId ds, int grade,
                    Partition part = Partition::None, std::string site = "") {
    ManifestEntry e;
    e.image_id = std::move(id);
    e.dataset = ds;
    e.native_grade = grade;
    e.source_partition = part;
    e.site = std::move(site);
    return e;
}

std::string padded_id(const char* prefix, size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%06zu", prefix, i);
    return buf;
}

Manifest random_manifest(SplitMix64& rng, size_t n) {
    Manifest m;
    for (size_t i = 0; i < n; ++i) {
        DatasetId ds = rng.next_below(2) == 0 ? DatasetId::EyePacs
                                              : DatasetId::Messidor;
        int grade = static_cast<int>(rng.next_below(native_grade_count(ds)));
        m.push_back(entry(padded_id("r", i), ds, grade));
    }
    return m;
}

} // namespace

TEST_CASE("grade maps follow the published conversion") {
    // EyePACS
    CHECK(map_grade(DatasetId::EyePacs, 0, Task::Quaternary) == 0);
    CHECK(map_grade(DatasetId::EyePacs, 1, Task::Quaternary) == 1);
    CHECK(map_grade(DatasetId::EyePacs, 2, Task::Quaternary) == 1);
    CHECK(map_grade(DatasetId::EyePacs, 3, Task::Quaternary) == 2);
    CHECK(map_grade(DatasetId::EyePacs, 4, Task::Quaternary) == 3);
    CHECK(map_grade(DatasetId::EyePacs, 2, Task::Ternary) == 1);
    CHECK(map_grade(DatasetId::EyePacs, 4, Task::Ternary) == 2);
    CHECK(map_grade(DatasetId::EyePacs, 2, Task::BinaryReferable) == 0);
    CHECK(map_grade(DatasetId::EyePacs, 3, Task::BinaryReferable) == 1);
    CHECK(map_grade(DatasetId::EyePacs, 1, Task::BinaryNormalAbnormal) == 1);
    // Messidor
    for (Task t : {Task::BinaryNormalAbnormal, Task::BinaryReferable,
                   Task::Ternary, Task::Quaternary})
        CHECK(map_grade(DatasetId::Messidor, 0, t) == 0);
    CHECK(map_grade(DatasetId::Messidor, 2, Task::Ternary) == 2);
    CHECK(map_grade(DatasetId::Messidor, 3, Task::Ternary) == 2);
    CHECK(map_grade(DatasetId::Messidor, 1, Task::BinaryReferable) == 0);
    CHECK(map_grade(DatasetId::Messidor, 2, Task::BinaryReferable) == 1);
    CHECK(map_grade(DatasetId::Messidor, 3, Task::Quaternary) == 3);

    CHECK_THROWS_AS(map_grade(DatasetId::EyePacs, 5, Task::Quaternary), Error);
    CHECK_THROWS_AS(map_grade(DatasetId::Messidor, 4, Task::Quaternary), Error);
    CHECK_THROWS_AS(map_grade(DatasetId::EyePacs, -1, Task::Ternary), Error);
}

TEST_CASE("grade maps are total, surjective, and factor through quaternary") {
    for (DatasetId ds : {DatasetId::EyePacs, DatasetId::Messidor}) {
        for (Task task : {Task::BinaryNormalAbnormal, Task::BinaryReferable,
                          Task::Ternary, Task::Quaternary}) {
            std::set<int> image;
            for (int g = 0; g < native_grade_count(ds); ++g) {
                int cls = map_grade(ds, g, task);
                CHECK(cls >= 0);
                CHECK(cls < class_count(task));
                image.insert(cls);
                CHECK(cls == quaternary_merge(task, map_grade(ds, g, Task::Quaternary)));
            }
            CHECK(static_cast<int>(image.size()) == class_count(task));
        }
    }
}

TEST_CASE("merged counts reproduce the published test-column tables") {
    std::vector<uint64_t> eyepacs_test = {24741, 7196, 753, 733};
    CHECK(merge_counts(Task::BinaryNormalAbnormal, eyepacs_test) ==
          std::vector<uint64_t>{24741, 8682});
    CHECK(merge_counts(Task::BinaryReferable, eyepacs_test) ==
          std::vector<uint64_t>{31937, 1486});
    CHECK(merge_counts(Task::Ternary, eyepacs_test) ==
          std::vector<uint64_t>{24741, 7196, 1486});

    std::vector<uint64_t> messidor_test = {151, 30, 70, 149};
    CHECK(merge_counts(Task::BinaryNormalAbnormal, messidor_test) ==
          std::vector<uint64_t>{151, 249});
    CHECK(merge_counts(Task::BinaryReferable, messidor_test) ==
          std::vector<uint64_t>{181, 219});
    CHECK(merge_counts(Task::Ternary, messidor_test) ==
          std::vector<uint64_t>{151, 30, 219});
}

TEST_CASE("prune removes exactly the excluded ids") {
    Manifest m;
    for (size_t i = 0; i < 35783; ++i)
        m.push_back(entry(padded_id("e", i), DatasetId::EyePacs,
                          static_cast<int>(i % 5), Partition::Train));

    SUBCASE("empty exclusion list is the identity") {
        PruneResult r = prune(m, {});
        CHECK(r.manifest.size() == m.size());
        CHECK(r.removed == 0);
        CHECK(r.missing.empty());
    }

    SUBCASE("657 exclusions leave 35126 entries") {
        std::vector<std::string> exclusions;
        for (size_t i = 0; i < 657; ++i)
            exclusions.push_back(padded_id("e", i * 13));
        PruneResult r = prune(m, exclusions);
        CHECK(r.manifest.size() == 35126);
        CHECK(r.removed == 657);
        CHECK(r.missing.empty());
    }

    SUBCASE("duplicate exclusion id is an error") {
        CHECK_THROWS_AS(prune(m, {"e000001", "e000001"}), Error);
    }

    SUBCASE("absent exclusion id is reported, not fatal") {
        PruneResult r = prune(m, {"nonexistent"});
        CHECK(r.manifest.size() == m.size());
        CHECK(r.removed == 0);
        CHECK(r.missing == std::vector<std::string>{"nonexistent"});
    }
}

TEST_CASE("splits are deterministic and independent of row order") {
    SplitMix64 rng(77);
    Manifest m = random_manifest(rng, 500);

    SplitPolicy policy = SplitPolicy::counts(300, 100, 100);
    SplitResult a = make_splits(m, policy, 42);
    SplitResult b = make_splits(m, policy, 42);
    CHECK(a.assignments.size() == 500);
    REQUIRE(a.assignments.size() == b.assignments.size());
    for (size_t i = 0; i < a.assignments.size(); ++i) {
        CHECK(a.assignments[i].image_id == b.assignments[i].image_id);
        CHECK(a.assignments[i].split == b.assignments[i].split);
    }

    // permute manifest rows: same assignment
    Manifest shuffled = m;
    fisher_yates_shuffle(shuffled, rng);
    SplitResult c = make_splits(shuffled, policy, 42);
    REQUIRE(c.assignments.size() == a.assignments.size());
    for (size_t i = 0; i < a.assignments.size(); ++i) {
        CHECK(a.assignments[i].image_id == c.assignments[i].image_id);
        CHECK(a.assignments[i].split == c.assignments[i].split);
    }

    // different seed: same marginals, different content
    SplitResult d = make_splits(m, policy, 43);
    size_t diffs = 0;
    for (size_t i = 0; i < a.assignments.size(); ++i)
        diffs += a.assignments[i].split != d.assignments[i].split;
    CHECK(diffs > 0);
}

TEST_CASE("eyepacs policy splits the train pool 30000/4469") {
    Manifest m;
    for (size_t i = 0; i < 34469; ++i)
        m.push_back(entry(padded_id("t", i), DatasetId::EyePacs,
                          static_cast<int>(i % 5), Partition::Train));
    for (size_t i = 0; i < 120; ++i)
        m.push_back(entry(padded_id("x", i), DatasetId::EyePacs,
                          static_cast<int>(i % 5), Partition::Test));

    SplitResult r = make_splits(m, SplitPolicy::eyepacs(), 1);
    size_t train = 0, validate = 0, test = 0;
    std::set<std::string> seen;
    for (const auto& s : r.assignments) {
        CHECK(seen.insert(s.image_id).second); // disjoint
        if (s.split == Split::Train) ++train;
        if (s.split == Split::Validate) ++validate;
        if (s.split == Split::Test) ++test;
    }
    CHECK(train == 30000);
    CHECK(validate == 4469);
    CHECK(test == 120);
    CHECK(train + validate == 34469); // exhaustive over the pool

    // short pool errors
    Manifest small(m.begin(), m.begin() + 1000);
    CHECK_THROWS_AS(make_splits(small, SplitPolicy::eyepacs(), 1), Error);
}

TEST_CASE("messidor policy holds out the configured clinic") {
    Manifest m;
    size_t i = 0;
    // 400 test-site images with the published test-grade counts
    const std::vector<std::pair<int, int>> site_grades = {
        {0, 151}, {1, 30}, {2, 70}, {3, 149}};
    for (auto [grade, n] : site_grades)
        for (int k = 0; k < n; ++k)
            m.push_back(entry(padded_id("m", i++), DatasetId::Messidor, grade,
                              Partition::None, "Lariboisiere"));
    // 800 images from the other clinics
    const std::vector<std::pair<int, int>> rest_grades = {
        {0, 395}, {1, 123}, {2, 177}, {3, 105}};
    for (auto [grade, n] : rest_grades)
        for (int k = 0; k < n; ++k)
            m.push_back(entry(padded_id("m", i++), DatasetId::Messidor, grade,
                              Partition::None, k % 2 ? "Brest" : "Saint-Etienne"));
    REQUIRE(m.size() == 1200);

    SplitResult r = make_splits(m, SplitPolicy::messidor(), 9);
    size_t train = 0, validate = 0, test = 0;
    for (const auto& s : r.assignments) {
        if (s.split == Split::Train) ++train;
        if (s.split == Split::Validate) ++validate;
        if (s.split == Split::Test) ++test;
    }
    CHECK(train == 700);
    CHECK(validate == 100);
    CHECK(test == 400);

    DistributionTable table = class_distribution(r.assignments, m, Task::Quaternary);
    CHECK(table.counts[2] == std::vector<uint64_t>{151, 30, 70, 149});
    DistributionTable ternary = class_distribution(r.assignments, m, Task::Ternary);
    CHECK(ternary.counts[2] == std::vector<uint64_t>{151, 30, 219});
    DistributionTable nab =
        class_distribution(r.assignments, m, Task::BinaryNormalAbnormal);
    CHECK(nab.counts[2] == std::vector<uint64_t>{151, 249});
}

TEST_CASE("class distribution handles edge cases") {
    Manifest m = {entry("a", DatasetId::Messidor, 0),
                  entry("b", DatasetId::Messidor, 2)};

    SUBCASE("empty split gives an all-zero table") {
        DistributionTable t = class_distribution({}, m, Task::Quaternary);
        for (const auto& row : t.counts)
            for (uint64_t c : row) CHECK(c == 0);
    }

    SUBCASE("dangling id is an error") {
        std::vector<SplitAssignment> splits = {{"ghost", Split::Train}};
        CHECK_THROWS_AS(class_distribution(splits, m, Task::Quaternary), Error);
    }
}

TEST_CASE("merge identities hold on random manifests") {
    SplitMix64 rng(31337);
    for (int iter = 0; iter < 20; ++iter) {
        Manifest m = random_manifest(rng, 60 + rng.next_below(60));
        size_t third = m.size() / 3;
        SplitResult r = make_splits(
            m, SplitPolicy::counts(third, third, m.size() - 2 * third),
            rng.next());
        for (const auto& check : check_merge_identities(r.assignments, m)) {
            CAPTURE(iter);
            CHECK(check.pass);
        }
    }
}

TEST_CASE("manifest files round-trip byte-identically") {
    fs::path dir = temp_dir();
    Manifest m = {
        entry("img_a", DatasetId::EyePacs, 4, Partition::Train),
        entry("img_b", DatasetId::Messidor, 2, Partition::None, "Lariboisiere"),
        entry("img_c", DatasetId::EyePacs, 0, Partition::Test),
    };
    fs::path p1 = dir / "m1.csv", p2 = dir / "m2.csv";
    write_manifest(m, p1.string());
    Manifest loaded = load_manifest(p1.string());
    REQUIRE(loaded.size() == m.size());
    write_manifest(loaded, p2.string());
    CHECK(read_file(p1) == read_file(p2));
}

TEST_CASE("manifest parser rejects bad rows with line numbers") {
    fs::path dir = temp_dir();
    fs::path p = dir / "bad.csv";

    SUBCASE("out-of-range grade") {
        std::ofstream(p) << "image_id,dataset,native_grade,source_partition,site\n"
                            "img_a,eyepacs,5,train,\n";
        try {
            load_manifest(p.string());
            FAIL("expected error");
        } catch (const Error& e) {
            std::string msg = e.what();
            CHECK(msg.find(":2:") != std::string::npos);
            CHECK(msg.find("out of range") != std::string::npos);
        }
    }

    SUBCASE("unknown dataset tag") {
        std::ofstream(p) << "image_id,dataset,native_grade,source_partition,site\n"
                            "img_a,kaggle,1,train,\n";
        CHECK_THROWS_AS(load_manifest(p.string()), Error);
    }

    SUBCASE("malformed row") {
        std::ofstream(p) << "image_id,dataset,native_grade,source_partition,site\n"
                            "img_a,eyepacs,1\n";
        CHECK_THROWS_AS(load_manifest(p.string()), Error);
    }

    SUBCASE("grade with trailing garbage") {
        std::ofstream(p) << "image_id,dataset,native_grade,source_partition,site\n"
                            "img_a,eyepacs,2x,train,\n";
        CHECK_THROWS_AS(load_manifest(p.string()), Error);
    }

    SUBCASE("duplicate image id") {
        std::ofstream(p) << "image_id,dataset,native_grade,source_partition,site\n"
                            "img_a,eyepacs,1,train,\n"
                            "img_a,eyepacs,2,train,\n";
        CHECK_THROWS_AS(load_manifest(p.string()), Error);
    }

    SUBCASE("header-only file is an empty manifest") {
        std::ofstream(p) << "image_id,dataset,native_grade,source_partition,site\n";
        CHECK(load_manifest(p.string()).empty());
    }
}

TEST_CASE("split csv and exclusion list loaders") {
    fs::path dir = temp_dir();
    fs::path p = dir / "split.csv";
    std::vector<SplitAssignment> splits = {{"a", Split::Train},
                                           {"b", Split::Validate},
                                           {"c", Split::Test}};
    write_splits(splits, p.string());
    auto loaded = load_splits(p.string());
    REQUIRE(loaded.size() == 3);
    CHECK(loaded[1].image_id == "b");
    CHECK(loaded[1].split == Split::Validate);

    fs::path ex = dir / "exclude.txt";
    std::ofstream(ex) << "a\n\nb\n";
    CHECK(load_exclusions(ex.string()) == std::vector<std::string>{"a", "b"});
    std::ofstream(ex) << "a\na\n";
    CHECK_THROWS_AS(load_exclusions(ex.string()), Error);
}
