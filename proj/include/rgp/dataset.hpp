#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rgp::dataset {

enum class DatasetId { EyePacs, Messidor };
enum class Partition { Train, Test, None };
enum class Split { Train, Validate, Test };

/// Classification task granularity. The two binary tasks differ in
/// where the severity cut sits: normal-vs-abnormal separates grade 0
/// from everything else, referable separates the grades that warrant
/// specialist referral.
enum class Task { BinaryNormalAbnormal, BinaryReferable, Ternary, Quaternary };

int class_count(Task task);
int native_grade_count(DatasetId dataset); // EyePACS 5, Messidor 4

const char* to_string(DatasetId id);
const char* to_string(Partition p);
const char* to_string(Split s);
const char* to_string(Task t);
DatasetId parse_dataset(const std::string& s);
Partition parse_partition(const std::string& s);
Split parse_split(const std::string& s);
Task parse_task(const std::string& s);

struct ManifestEntry {
    std::string image_id;
    DatasetId dataset = DatasetId::EyePacs;
    int native_grade = 0;
    Partition source_partition = Partition::None;
    std::string site; // Messidor clinic; empty elsewhere
};

using Manifest = std::vector<ManifestEntry>;

/// Map a dataset-native severity grade onto the class index of a task.
///
///   EyePACS   quaternary {0}->0 {1,2}->1 {3}->2 {4}->3
///             ternary    {0}->0 {1,2}->1 {3,4}->2
///             referable  {0,1,2}->0 {3,4}->1
///             normal/abn {0}->0 {1,2,3,4}->1
///   Messidor  quaternary identity
///             ternary    {0}->0 {1}->1 {2,3}->2
///             referable  {0,1}->0 {2,3}->1
///             normal/abn {0}->0 {1,2,3}->1
///
/// Throws on a grade outside the dataset's native range.
int map_grade(DatasetId dataset, int native_grade, Task task);

/// Merge map from harmonized quaternary classes to a coarser task.
/// Composition identity: for every dataset, grade and task,
///   map_grade(ds, g, task) == quaternary_merge(task, map_grade(ds, g, Quaternary))
/// which is what makes the published per-task class counts derivable
/// from the quaternary counts.
int quaternary_merge(Task task, int quaternary_class);

/// Fold a quaternary count vector into a coarser task's counts.
std::vector<uint64_t> merge_counts(Task task,
                                   const std::vector<uint64_t>& quaternary_counts);

struct PruneResult {
    Manifest manifest;
    size_t removed = 0;
    std::vector<std::string> missing; // exclusion ids absent from the manifest
};

/// Remove the excluded ids. Exclusion ids must be unique (throws on a
/// duplicate); ids absent from the manifest are reported, not fatal.
PruneResult prune(const Manifest& manifest,
                  const std::vector<std::string>& exclusions);

struct SplitAssignment {
    std::string image_id;
    Split split = Split::Train;
};

struct SplitPolicy {
    enum class Kind { EyePacs, Messidor, Counts };
    Kind kind = Kind::Counts;

    // Counts policy: explicit sizes drawn from the whole manifest.
    size_t train_count = 0;
    size_t validate_count = 0;
    size_t test_count = 0;

    // Messidor policy: the held-out clinic.
    std::string test_site = "Lariboisiere";

    static SplitPolicy eyepacs();
    static SplitPolicy messidor(std::string test_site = "Lariboisiere");
    static SplitPolicy counts(size_t train, size_t validate, size_t test);
};

struct SplitResult {
    std::vector<SplitAssignment> assignments; // sorted by image_id
    std::vector<std::string> warnings;
};

/// Deterministic split generation: the candidate pool is sorted by
/// image_id (so manifest row order is irrelevant), shuffled with
/// Fisher-Yates over SplitMix64(seed), and assigned by prefix.
///
///   EyePacs  — train pool = source_partition train, first 30000 train
///              then 4469 validate (error if the pool is smaller);
///              test = the test partition, capped at a random 33423-image
///              subset when larger.
///   Messidor — test = every entry whose site matches test_site;
///              the rest: 700 train, 100 validate (error if fewer than
///              800 remain; extras stay unassigned with a warning).
///   Counts   — explicit train/validate/test sizes over all entries.
SplitResult make_splits(const Manifest& manifest, const SplitPolicy& policy,
                        uint64_t seed);

struct DistributionTable {
    Task task = Task::Quaternary;
    // counts[split][class], split indexed Train=0, Validate=1, Test=2
    std::array<std::vector<uint64_t>, 3> counts;
};

/// Per-split per-class counts of a split assignment under a task's
/// grade map. Throws if an assigned id is missing from the manifest.
DistributionTable class_distribution(const std::vector<SplitAssignment>& splits,
                                     const Manifest& manifest, Task task);

/// One merge-sum consistency check: a coarser task's class count must
/// equal the sum of the quaternary cells that fold into it.
struct IdentityCheck {
    Split split;
    Task task;
    int cls = 0;
    std::vector<uint64_t> terms; // quaternary counts folded into cls
    uint64_t expected = 0;       // sum of terms
    uint64_t actual = 0;
    bool pass = false;
};

/// Verify every derivable merge identity of the distribution tables.
std::vector<IdentityCheck>
check_merge_identities(const std::vector<SplitAssignment>& splits,
                       const Manifest& manifest);

// ---- file formats ----
// Manifest CSV: image_id,dataset,native_grade,source_partition,site
// Split CSV:    image_id,split
// Exclusions:   one image_id per line
// All UTF-8 with LF endings; write(load(x)) is byte-identical for
// canonically formatted files.

Manifest load_manifest(const std::string& path);
void write_manifest(const Manifest& manifest, const std::string& path);

std::vector<std::string> load_exclusions(const std::string& path);

std::vector<SplitAssignment> load_splits(const std::string& path);
void write_splits(const std::vector<SplitAssignment>& splits,
                  const std::string& path);

} // namespace rgp::dataset
