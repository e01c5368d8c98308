#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "agone/errors.hpp"
#include "agone/java_analysis.hpp"

// Builds class-to-test datasets: ingests a repository at a pinned commit,
// discovers candidate test classes by naming convention, validates them with
// structural evidence, and resolves conflicts with the evidence ratio.
namespace agone::miner {

AGONE_DEFINE_ERROR(CloneFailed);
AGONE_DEFINE_ERROR(BranchNotFound);
AGONE_DEFINE_ERROR(EmptyDataset);

struct RepoIdentity {
  std::string url_or_path;
  std::string branch;
  std::string commit_hash;  // 40 lowercase hex; a content fingerprint for
                            // plain directories that are not git checkouts
  std::filesystem::path working_copy;
};

// Mines a git repository (remote URL or local path) or a plain directory.
// Git sources are cloned into `workdir` and pinned at the branch tip; plain
// directories are read in place and pinned by content fingerprint.
RepoIdentity ingest_repo(const std::string& locator, const std::string& branch,
                         const std::filesystem::path& workdir);

struct CandidateTest {
  std::filesystem::path path;  // relative to the working copy
  bool mirrored_package = false;
};

// Test-root files named <Name>Test, <Name>Tests, Test<Name> or <Name>TestCase
// for the unit's primary type; mirrored-package hits sort first.
std::vector<CandidateTest> discover_candidates(const RepoIdentity& repo,
                                               const java::JavaSourceUnit& cut);

struct EvidenceSummary {
  std::map<std::string, int> reference_counts;  // candidate CUT fqn -> count
  std::string dominant;
  double ratio = 0.0;  // count(dominant) / total
  int total = 0;
  bool tied = false;  // two or more candidates share the maximal count

  bool operator==(const EvidenceSummary&) const = default;
};

// Tallies the test class's structural references per candidate class under
// test: imports, constructions, receiver-typed invocations, and mocking
// references. The given cut's entry is present even at zero.
EvidenceSummary validate_mapping(const java::JavaSourceUnit& cut,
                                 const java::JavaSourceUnit& candidate);

struct ClassUnderTestRecord {
  RepoIdentity repo;
  std::filesystem::path cut_path;  // relative to the working copy
  std::string cut_fqn;
  std::filesystem::path test_path;  // relative, under a test-source root
  std::string test_fqn;
  EvidenceSummary evidence;
};

enum class ExclusionReason { below_dominance, ambiguous, insufficient_evidence };
std::string to_string(ExclusionReason reason);

struct Exclusion {
  std::string cut_fqn;
  std::string test_fqn;
  ExclusionReason reason = ExclusionReason::below_dominance;
  double ratio = 0.0;
};

// One discovered (cut, test) pair with its computed evidence.
struct MappingEvidence {
  RepoIdentity repo;
  std::filesystem::path cut_path;
  std::string cut_fqn;
  std::filesystem::path test_path;
  std::string test_fqn;
  EvidenceSummary summary;
};

struct ResolveOutcome {
  std::vector<ClassUnderTestRecord> retained;
  std::vector<Exclusion> excluded;
};

// Keeps pairs whose cut dominates with ratio >= 0.60 and at least two total
// references; ties at the maximum are ambiguous. |input| == |retained| +
// |excluded| always.
ResolveOutcome resolve_mappings(const std::vector<MappingEvidence>& evidences);

struct MiningResult {
  RepoIdentity repo;
  std::vector<ClassUnderTestRecord> records;
  std::vector<Exclusion> exclusions;
  int discovered_pairs = 0;
};

// Full pipeline over one repository: enumerate classes under test outside the
// test roots, discover and validate their candidate tests, resolve.
MiningResult mine_repository(const std::string& locator, const std::string& branch,
                             const std::filesystem::path& workdir);

struct DatasetStats {
  int test_class_count = 0;
  int repo_count = 0;
  double avg_loc = 0.0;
  double avg_cyclomatic = 0.0;
  std::map<std::string, double> framework_distribution;     // label -> percentage
  std::map<std::string, double> java_version_distribution;  // label -> percentage
};

DatasetStats compute_stats(const std::vector<ClassUnderTestRecord>& records);

// classes2test.jsonl, one record per line with fields repo_url, branch,
// commit_hash, cut_path, cut_fqn, test_path, test_fqn, evidence_ratio.
void write_dataset_jsonl(const std::vector<ClassUnderTestRecord>& records,
                         const std::filesystem::path& out_file);
std::vector<ClassUnderTestRecord> read_dataset_jsonl(const std::filesystem::path& in_file);

void write_stats_json(const DatasetStats& stats, const std::filesystem::path& out_file);

}  // namespace agone::miner
