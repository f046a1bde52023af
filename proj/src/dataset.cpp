#include "rgp/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "rgp/csv.hpp"
#include "rgp/error.hpp"
#include "rgp/prng.hpp"

namespace rgp::dataset {

namespace {

// EyePACS splits 30000/4469 train/validate out of the pruned train
// partition; the reported test run uses 33423 images of the test
// partition.
constexpr size_t EYEPACS_TRAIN = 30000;
constexpr size_t EYEPACS_VALIDATE = 4469;
constexpr size_t EYEPACS_TEST_CAP = 33423;
constexpr size_t MESSIDOR_TRAIN = 700;
constexpr size_t MESSIDOR_VALIDATE = 100;

// Grade-to-class tables, native grade as index.
constexpr std::array<int, 5> EYEPACS_QUATERNARY = {0, 1, 1, 2, 3};
constexpr std::array<int, 5> EYEPACS_TERNARY = {0, 1, 1, 2, 2};
constexpr std::array<int, 5> EYEPACS_REFERABLE = {0, 0, 0, 1, 1};
constexpr std::array<int, 5> EYEPACS_NORMAL_ABN = {0, 1, 1, 1, 1};
constexpr std::array<int, 4> MESSIDOR_QUATERNARY = {0, 1, 2, 3};
constexpr std::array<int, 4> MESSIDOR_TERNARY = {0, 1, 2, 2};
constexpr std::array<int, 4> MESSIDOR_REFERABLE = {0, 0, 1, 1};
constexpr std::array<int, 4> MESSIDOR_NORMAL_ABN = {0, 1, 1, 1};
// Quaternary classes fold into coarser tasks exactly like Messidor
// native grades (the quaternary scale is the harmonized one).
constexpr std::array<int, 4> MERGE_TERNARY = MESSIDOR_TERNARY;
constexpr std::array<int, 4> MERGE_REFERABLE = MESSIDOR_REFERABLE;
constexpr std::array<int, 4> MERGE_NORMAL_ABN = MESSIDOR_NORMAL_ABN;

std::vector<std::string> sorted_ids(std::vector<std::string> ids) {
    std::sort(ids.begin(), ids.end());
    return ids;
}

} // namespace

int class_count(Task task) {
    switch (task) {
    case Task::BinaryNormalAbnormal:
    case Task::BinaryReferable: return 2;
    case Task::Ternary: return 3;
    case Task::Quaternary: return 4;
    }
    fail("unknown task");
}

int native_grade_count(DatasetId dataset) {
    return dataset == DatasetId::EyePacs ? 5 : 4;
}

const char* to_string(DatasetId id) {
    return id == DatasetId::EyePacs ? "eyepacs" : "messidor";
}
const char* to_string(Partition p) {
    switch (p) {
    case Partition::Train: return "train";
    case Partition::Test: return "test";
    case Partition::None: return "none";
    }
    return "?";
}
const char* to_string(Split s) {
    switch (s) {
    case Split::Train: return "train";
    case Split::Validate: return "validate";
    case Split::Test: return "test";
    }
    return "?";
}
const char* to_string(Task t) {
    switch (t) {
    case Task::BinaryNormalAbnormal: return "normal-abnormal";
    case Task::BinaryReferable: return "referable";
    case Task::Ternary: return "ternary";
    case Task::Quaternary: return "quaternary";
    }
    return "?";
}

DatasetId parse_dataset(const std::string& s) {
    if (s == "eyepacs") return DatasetId::EyePacs;
    if (s == "messidor") return DatasetId::Messidor;
    fail("unknown dataset tag \"", s, "\"");
}
Partition parse_partition(const std::string& s) {
    if (s == "train") return Partition::Train;
    if (s == "test") return Partition::Test;
    if (s == "none") return Partition::None;
    fail("unknown partition \"", s, "\"");
}
Split parse_split(const std::string& s) {
    if (s == "train") return Split::Train;
    if (s == "validate") return Split::Validate;
    if (s == "test") return Split::Test;
    fail("unknown split \"", s, "\"");
}
Task parse_task(const std::string& s) {
    if (s == "normal-abnormal") return Task::BinaryNormalAbnormal;
    if (s == "referable") return Task::BinaryReferable;
    if (s == "ternary") return Task::Ternary;
    if (s == "quaternary") return Task::Quaternary;
    fail("unknown task \"", s, "\" (expected normal-abnormal, referable, "
         "ternary or quaternary)");
}

int map_grade(DatasetId dataset, int native_grade, Task task) {
    if (native_grade < 0 || native_grade >= native_grade_count(dataset))
        fail("grade ", native_grade, " out of range for ", to_string(dataset));
    if (dataset == DatasetId::EyePacs) {
        switch (task) {
        case Task::Quaternary: return EYEPACS_QUATERNARY[native_grade];
        case Task::Ternary: return EYEPACS_TERNARY[native_grade];
        case Task::BinaryReferable: return EYEPACS_REFERABLE[native_grade];
        case Task::BinaryNormalAbnormal: return EYEPACS_NORMAL_ABN[native_grade];
        }
    } else {
        switch (task) {
        case Task::Quaternary: return MESSIDOR_QUATERNARY[native_grade];
        case Task::Ternary: return MESSIDOR_TERNARY[native_grade];
        case Task::BinaryReferable: return MESSIDOR_REFERABLE[native_grade];
        case Task::BinaryNormalAbnormal: return MESSIDOR_NORMAL_ABN[native_grade];
        }
    }
    fail("unknown task");
}

int quaternary_merge(Task task, int quaternary_class) {
    if (quaternary_class < 0 || quaternary_class > 3)
        fail("quaternary class ", quaternary_class, " out of range");
    switch (task) {
    case Task::Quaternary: return quaternary_class;
    case Task::Ternary: return MERGE_TERNARY[quaternary_class];
    case Task::BinaryReferable: return MERGE_REFERABLE[quaternary_class];
    case Task::BinaryNormalAbnormal: return MERGE_NORMAL_ABN[quaternary_class];
    }
    fail("unknown task");
}

std::vector<uint64_t> merge_counts(Task task,
                                   const std::vector<uint64_t>& quaternary_counts) {
    if (quaternary_counts.size() != 4)
        fail("merge_counts: expected 4 quaternary counts, got ",
             quaternary_counts.size());
    std::vector<uint64_t> out(class_count(task), 0);
    for (int q = 0; q < 4; ++q)
        out[quaternary_merge(task, q)] += quaternary_counts[q];
    return out;
}

PruneResult prune(const Manifest& manifest,
                  const std::vector<std::string>& exclusions) {
    std::unordered_set<std::string> excluded;
    for (const auto& id : exclusions)
        if (!excluded.insert(id).second)
            fail("duplicate id in exclusion list: ", id);

    PruneResult result;
    std::unordered_set<std::string> seen;
    for (const auto& entry : manifest) {
        if (excluded.count(entry.image_id)) {
            ++result.removed;
            seen.insert(entry.image_id);
        } else {
            result.manifest.push_back(entry);
        }
    }
    for (const auto& id : exclusions)
        if (!seen.count(id)) result.missing.push_back(id);
    return result;
}

SplitPolicy SplitPolicy::eyepacs() {
    SplitPolicy p;
    p.kind = Kind::EyePacs;
    return p;
}
SplitPolicy SplitPolicy::messidor(std::string test_site) {
    SplitPolicy p;
    p.kind = Kind::Messidor;
    p.test_site = std::move(test_site);
    return p;
}
SplitPolicy SplitPolicy::counts(size_t train, size_t validate, size_t test) {
    SplitPolicy p;
    p.kind = Kind::Counts;
    p.train_count = train;
    p.validate_count = validate;
    p.test_count = test;
    return p;
}

SplitResult make_splits(const Manifest& manifest, const SplitPolicy& policy,
                        uint64_t seed) {
    std::unordered_set<std::string> ids;
    for (const auto& e : manifest)
        if (!ids.insert(e.image_id).second)
            fail("duplicate image_id in manifest: ", e.image_id);

    SplitResult result;
    SplitMix64 rng(seed);

    // Pools are consumed as prefixes of the shuffled order; `cursor`
    // tracks how much of the pool is already assigned.
    size_t cursor = 0;
    auto shuffled = [&](std::vector<std::string> pool) {
        pool = sorted_ids(std::move(pool));
        fisher_yates_shuffle(pool, rng);
        cursor = 0;
        return pool;
    };
    auto assign_prefix = [&](std::vector<std::string>& pool, size_t n, Split s) {
        for (size_t i = 0; i < n; ++i)
            result.assignments.push_back({std::move(pool[cursor + i]), s});
        cursor += n;
    };
    auto unassigned = [&](const std::vector<std::string>& pool) {
        return pool.size() - cursor;
    };

    switch (policy.kind) {
    case SplitPolicy::Kind::EyePacs: {
        std::vector<std::string> train_pool, test_pool;
        for (const auto& e : manifest) {
            if (e.source_partition == Partition::Train)
                train_pool.push_back(e.image_id);
            else if (e.source_partition == Partition::Test)
                test_pool.push_back(e.image_id);
        }
        if (train_pool.size() < EYEPACS_TRAIN + EYEPACS_VALIDATE)
            fail("eyepacs policy: train pool has ", train_pool.size(),
                 " entries, needs ", EYEPACS_TRAIN + EYEPACS_VALIDATE);
        auto pool = shuffled(std::move(train_pool));
        assign_prefix(pool, EYEPACS_TRAIN, Split::Train);
        assign_prefix(pool, EYEPACS_VALIDATE, Split::Validate);
        if (unassigned(pool) > 0)
            result.warnings.push_back(
                cat(unassigned(pool), " train-partition entries left unassigned"));

        auto tpool = shuffled(std::move(test_pool));
        size_t take = std::min(tpool.size(), EYEPACS_TEST_CAP);
        if (tpool.size() > EYEPACS_TEST_CAP)
            result.warnings.push_back(cat("test partition has ", tpool.size(),
                                          " entries, sampling ", EYEPACS_TEST_CAP));
        assign_prefix(tpool, take, Split::Test);
        break;
    }
    case SplitPolicy::Kind::Messidor: {
        std::vector<std::string> test_pool, rest;
        for (const auto& e : manifest) {
            if (e.site == policy.test_site)
                test_pool.push_back(e.image_id);
            else
                rest.push_back(e.image_id);
        }
        for (auto& id : sorted_ids(std::move(test_pool)))
            result.assignments.push_back({std::move(id), Split::Test});
        if (rest.size() < MESSIDOR_TRAIN + MESSIDOR_VALIDATE)
            fail("messidor policy: ", rest.size(),
                 " non-test entries, needs ", MESSIDOR_TRAIN + MESSIDOR_VALIDATE);
        auto pool = shuffled(std::move(rest));
        assign_prefix(pool, MESSIDOR_TRAIN, Split::Train);
        assign_prefix(pool, MESSIDOR_VALIDATE, Split::Validate);
        if (unassigned(pool) > 0)
            result.warnings.push_back(
                cat(unassigned(pool), " entries left unassigned"));
        break;
    }
    case SplitPolicy::Kind::Counts: {
        std::vector<std::string> pool;
        pool.reserve(manifest.size());
        for (const auto& e : manifest) pool.push_back(e.image_id);
        size_t want = policy.train_count + policy.validate_count + policy.test_count;
        if (pool.size() < want)
            fail("counts policy: manifest has ", pool.size(),
                 " entries, needs ", want);
        auto p = shuffled(std::move(pool));
        assign_prefix(p, policy.train_count, Split::Train);
        assign_prefix(p, policy.validate_count, Split::Validate);
        assign_prefix(p, policy.test_count, Split::Test);
        break;
    }
    }

    std::sort(result.assignments.begin(), result.assignments.end(),
              [](const SplitAssignment& a, const SplitAssignment& b) {
                  return a.image_id < b.image_id;
              });
    return result;
}

DistributionTable class_distribution(const std::vector<SplitAssignment>& splits,
                                     const Manifest& manifest, Task task) {
    std::unordered_map<std::string, const ManifestEntry*> index;
    for (const auto& e : manifest) index[e.image_id] = &e;

    DistributionTable table;
    table.task = task;
    for (auto& row : table.counts) row.assign(class_count(task), 0);

    for (const auto& s : splits) {
        auto it = index.find(s.image_id);
        if (it == index.end())
            fail("split id \"", s.image_id, "\" not present in manifest");
        const ManifestEntry& e = *it->second;
        int cls = map_grade(e.dataset, e.native_grade, task);
        table.counts[static_cast<int>(s.split)][cls] += 1;
    }
    return table;
}

std::vector<IdentityCheck>
check_merge_identities(const std::vector<SplitAssignment>& splits,
                       const Manifest& manifest) {
    DistributionTable quat = class_distribution(splits, manifest, Task::Quaternary);
    std::vector<IdentityCheck> checks;
    for (Task task : {Task::BinaryNormalAbnormal, Task::BinaryReferable,
                      Task::Ternary}) {
        DistributionTable actual = class_distribution(splits, manifest, task);
        for (int sp = 0; sp < 3; ++sp) {
            for (int cls = 0; cls < class_count(task); ++cls) {
                IdentityCheck check;
                check.split = static_cast<Split>(sp);
                check.task = task;
                check.cls = cls;
                for (int q = 0; q < 4; ++q)
                    if (quaternary_merge(task, q) == cls)
                        check.terms.push_back(quat.counts[sp][q]);
                for (uint64_t t : check.terms) check.expected += t;
                check.actual = actual.counts[sp][cls];
                check.pass = check.expected == check.actual;
                checks.push_back(std::move(check));
            }
        }
    }
    return checks;
}

Manifest load_manifest(const std::string& path) {
    csv::File f = csv::read_file(path);
    csv::require_header(
        f, {"image_id", "dataset", "native_grade", "source_partition", "site"},
        path);

    Manifest manifest;
    std::unordered_set<std::string> seen;
    for (const auto& row : f.rows) {
        auto bad = [&](auto&&... parts) {
            fail(path, ":", row.line, ": ", parts...);
        };
        if (row.fields.size() != 5)
            bad("expected 5 fields, got ", row.fields.size());

        ManifestEntry e;
        e.image_id = row.fields[0];
        if (e.image_id.empty()) bad("empty image_id");
        if (!seen.insert(e.image_id).second)
            bad("duplicate image_id \"", e.image_id, "\"");
        try {
            e.dataset = parse_dataset(row.fields[1]);
            e.native_grade = static_cast<int>(csv::parse_int(row.fields[2]));
            e.source_partition = parse_partition(row.fields[3]);
        } catch (const Error& err) {
            bad(err.what());
        }
        if (e.native_grade < 0 || e.native_grade >= native_grade_count(e.dataset))
            bad("grade ", e.native_grade, " out of range for ",
                to_string(e.dataset));
        e.site = row.fields[4];
        manifest.push_back(std::move(e));
    }
    return manifest;
}

void write_manifest(const Manifest& manifest, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("cannot write ", path);
    out << "image_id,dataset,native_grade,source_partition,site\n";
    for (const auto& e : manifest)
        out << e.image_id << ',' << to_string(e.dataset) << ',' << e.native_grade
            << ',' << to_string(e.source_partition) << ',' << e.site << '\n';
    if (!out) fail("failed writing ", path);
}

std::vector<std::string> load_exclusions(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open ", path);
    std::vector<std::string> ids;
    std::unordered_set<std::string> seen;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!seen.insert(line).second)
            fail(path, ":", lineno, ": duplicate exclusion id \"", line, "\"");
        ids.push_back(line);
    }
    return ids;
}

std::vector<SplitAssignment> load_splits(const std::string& path) {
    csv::File f = csv::read_file(path);
    csv::require_header(f, {"image_id", "split"}, path);
    std::vector<SplitAssignment> splits;
    std::unordered_set<std::string> seen;
    for (const auto& row : f.rows) {
        if (row.fields.size() != 2)
            fail(path, ":", row.line, ": expected 2 fields, got ",
                 row.fields.size());
        if (!seen.insert(row.fields[0]).second)
            fail(path, ":", row.line, ": duplicate image_id \"", row.fields[0],
                 "\"");
        Split split;
        try {
            split = parse_split(row.fields[1]);
        } catch (const Error& err) {
            fail(path, ":", row.line, ": ", err.what());
        }
        splits.push_back({row.fields[0], split});
    }
    return splits;
}

void write_splits(const std::vector<SplitAssignment>& splits,
                  const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("cannot write ", path);
    out << "image_id,split\n";
    for (const auto& s : splits)
        out << s.image_id << ',' << to_string(s.split) << '\n';
    if (!out) fail("failed writing ", path);
}

} // namespace rgp::dataset
