#include <algorithm>
#include <set>

#include "agone/build_config.hpp"
#include "agone/detail/fs.hpp"
#include "agone/detail/strings.hpp"
#include "agone/repo_miner.hpp"

namespace agone::miner {

namespace {

const char* kFrameworkPrefixes[] = {
    "java.",       "javax.",      "jakarta.",   "org.junit",  "junit.",
    "org.mockito", "org.testng",  "org.hamcrest", "org.assertj", "org.easymock",
    "org.opentest4j", "org.powermock", "kotlin.", "scala.",   "android.",
    "com.google.common.truth",
};

bool is_framework_import(const std::string& import_name) {
  for (const char* prefix : kFrameworkPrefixes) {
    if (import_name.rfind(prefix, 0) == 0) return true;
  }
  return false;
}

// JDK-ish simple names that never identify a class under test.
const std::set<std::string>& jdk_simple_names() {
  static const std::set<std::string> names = {
      "String",  "Integer", "Long",   "Double",  "Float",    "Boolean",   "Character",
      "Byte",    "Short",   "Object", "Math",    "System",   "Thread",    "Runtime",
      "StringBuilder", "StringBuffer", "Arrays", "Collections", "Objects", "Optional",
      "List",    "ArrayList", "LinkedList", "Map", "HashMap", "TreeMap",  "Set",
      "HashSet", "TreeSet", "Iterator", "Stream", "Files",    "Paths",    "Path",
      "File",    "FileReader", "FileWriter", "Scanner",       "Random",   "Date",
      "Calendar", "Exception", "RuntimeException", "Throwable", "Error",  "Class",
      "Assert",  "Assertions", "Assume", "Mockito", "Test",   "Before",   "After",
      "BeforeEach", "AfterEach", "TimeUnit", "Instant", "Duration", "LocalDate",
      "LocalDateTime", "BigDecimal", "BigInteger",
  };
  return names;
}

std::string simple_name_of(const std::string& fqn) {
  auto dot = fqn.rfind('.');
  return dot == std::string::npos ? fqn : fqn.substr(dot + 1);
}

std::string test_name_stem(std::string name) {
  auto strip_suffix = [&](const char* suffix) {
    std::string s = suffix;
    if (name.size() > s.size() && name.compare(name.size() - s.size(), s.size(), s) == 0) {
      name = name.substr(0, name.size() - s.size());
      return true;
    }
    return false;
  };
  if (strip_suffix("TestCase")) return name;
  if (strip_suffix("Tests")) return name;
  if (strip_suffix("Test")) return name;
  if (name.rfind("Test", 0) == 0 && name.size() > 4) return name.substr(4);
  return name;
}

}  // namespace

std::vector<CandidateTest> discover_candidates(const RepoIdentity& repo,
                                               const java::JavaSourceUnit& cut) {
  std::vector<CandidateTest> candidates;
  if (cut.type_names.empty()) return candidates;
  const std::string& name = cut.type_names.front();
  const std::set<std::string> wanted = {name + "Test", name + "Tests", "Test" + name,
                                        name + "TestCase"};

  std::string cut_package_path = detail::replace_all(cut.package_name, ".", "/");

  for (const auto& root : buildcfg::test_source_roots(repo.working_copy)) {
    auto absolute_root = repo.working_copy / root;
    std::error_code ec;
    if (!std::filesystem::exists(absolute_root, ec)) continue;
    for (const auto& file : detail::list_files(absolute_root, {".java"})) {
      if (!wanted.count(file.stem().string())) continue;
      CandidateTest candidate;
      candidate.path = std::filesystem::relative(file, repo.working_copy, ec);
      auto package_dir =
          std::filesystem::relative(file.parent_path(), absolute_root, ec).generic_string();
      if (package_dir == ".") package_dir.clear();
      candidate.mirrored_package = (package_dir == cut_package_path);
      candidates.push_back(std::move(candidate));
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const CandidateTest& a, const CandidateTest& b) {
                     return a.mirrored_package > b.mirrored_package;
                   });
  return candidates;
}

EvidenceSummary validate_mapping(const java::JavaSourceUnit& cut,
                                 const java::JavaSourceUnit& candidate) {
  auto facts = java::extract_facts(candidate);
  EvidenceSummary summary;

  const std::string cut_fqn =
      cut.package_name.empty() ? cut.type_names.front()
                               : cut.package_name + "." + cut.type_names.front();

  // import-derived resolution for simple names
  std::map<std::string, std::string> fqn_by_simple;
  for (const auto& import_name : facts.imports) {
    if (import_name.empty() || import_name.back() == '*') continue;
    fqn_by_simple[simple_name_of(import_name)] = import_name;
  }

  auto resolve = [&](const std::string& simple) -> std::string {
    auto it = fqn_by_simple.find(simple);
    if (it != fqn_by_simple.end()) return it->second;
    if (simple == simple_name_of(cut_fqn)) return cut_fqn;  // mirrored-package assumption
    if (candidate.package_name.empty()) return simple;
    return candidate.package_name + "." + simple;
  };

  auto count_type = [&](const std::string& fqn, int n) {
    if (n <= 0) return;
    summary.reference_counts[fqn] += n;
  };

  for (const auto& import_name : facts.imports) {
    if (import_name.empty() || import_name.back() == '*') continue;
    if (is_framework_import(import_name)) continue;
    count_type(import_name, 1);
  }
  for (const auto& [simple, n] : facts.constructed_types) {
    if (jdk_simple_names().count(simple)) continue;
    count_type(resolve(simple), n);
  }
  for (const auto& [key, n] : facts.invoked_methods) {
    const auto& [hint, method] = key;
    if (hint.empty() || hint == "mocking") continue;
    if (jdk_simple_names().count(hint)) continue;
    count_type(resolve(hint), n);
  }
  for (const auto& [simple, n] : facts.mocking_targets) {
    if (jdk_simple_names().count(simple)) continue;
    count_type(resolve(simple), n);
  }

  // the probed cut participates even with zero evidence
  summary.reference_counts.emplace(cut_fqn, 0);

  int max_count = 0;
  for (const auto& [fqn, n] : summary.reference_counts) {
    summary.total += n;
    if (n > max_count) {
      max_count = n;
      summary.dominant = fqn;
      summary.tied = false;
    } else if (n == max_count && n > 0 && fqn != summary.dominant) {
      summary.tied = true;
    }
  }
  summary.ratio = summary.total == 0
                      ? 0.0
                      : static_cast<double>(max_count) / static_cast<double>(summary.total);
  return summary;
}

std::string to_string(ExclusionReason reason) {
  switch (reason) {
    case ExclusionReason::below_dominance: return "below-dominance";
    case ExclusionReason::ambiguous: return "ambiguous";
    case ExclusionReason::insufficient_evidence: return "insufficient-evidence";
  }
  return "below-dominance";
}

ResolveOutcome resolve_mappings(const std::vector<MappingEvidence>& evidences) {
  ResolveOutcome outcome;
  for (const auto& pair : evidences) {
    const EvidenceSummary& summary = pair.summary;
    auto exclude = [&](ExclusionReason reason) {
      outcome.excluded.push_back({pair.cut_fqn, pair.test_fqn, reason, summary.ratio});
    };

    if (summary.total < 2) {
      exclude(ExclusionReason::insufficient_evidence);
      continue;
    }
    if (summary.tied) {
      exclude(ExclusionReason::ambiguous);
      continue;
    }
    if (summary.dominant != pair.cut_fqn || summary.ratio < 0.60) {
      exclude(ExclusionReason::below_dominance);
      continue;
    }
    ClassUnderTestRecord record;
    record.repo = pair.repo;
    record.cut_path = pair.cut_path;
    record.cut_fqn = pair.cut_fqn;
    record.test_path = pair.test_path;
    record.test_fqn = pair.test_fqn;
    record.evidence = summary;
    outcome.retained.push_back(std::move(record));
  }

  // Conflicting claims: when several classes under test retain the same test
  // class, no dominant mapping exists and every claim is dropped.
  std::map<std::string, int> claims;
  for (const auto& record : outcome.retained) {
    claims[record.test_path.generic_string()]++;
  }
  std::vector<ClassUnderTestRecord> unique;
  for (auto& record : outcome.retained) {
    if (claims[record.test_path.generic_string()] > 1) {
      outcome.excluded.push_back({record.cut_fqn, record.test_fqn,
                                  ExclusionReason::ambiguous, record.evidence.ratio});
    } else {
      unique.push_back(std::move(record));
    }
  }
  outcome.retained = std::move(unique);
  return outcome;
}

MiningResult mine_repository(const std::string& locator, const std::string& branch,
                             const std::filesystem::path& workdir) {
  MiningResult result;
  result.repo = ingest_repo(locator, branch, workdir);

  // classes under test live outside the test-source roots
  std::vector<std::filesystem::path> test_roots;
  for (const auto& root : buildcfg::test_source_roots(result.repo.working_copy)) {
    test_roots.push_back(result.repo.working_copy / root);
  }
  auto under_test_root = [&](const std::filesystem::path& file) {
    for (const auto& root : test_roots) {
      auto rel = std::filesystem::relative(file, root).generic_string();
      if (!rel.empty() && rel.rfind("..", 0) != 0) return true;
    }
    return false;
  };

  std::vector<MappingEvidence> evidences;
  for (const auto& file : detail::list_files(result.repo.working_copy, {".java"})) {
    if (under_test_root(file)) continue;
    java::JavaSourceUnit cut;
    try {
      cut = java::parse_unit(detail::read_file(file), file);
    } catch (const java::UnparseableSource&) {
      continue;
    }
    if (cut.type_names.empty()) continue;

    std::error_code ec;
    for (const auto& candidate : discover_candidates(result.repo, cut)) {
      java::JavaSourceUnit test_unit;
      try {
        test_unit = java::parse_unit(
            detail::read_file(result.repo.working_copy / candidate.path), candidate.path);
      } catch (const java::UnparseableSource&) {
        continue;
      }
      // naming alignment: the candidate's stem must match the cut's type
      if (test_name_stem(test_unit.type_names.front()) != cut.type_names.front()) continue;

      MappingEvidence pair;
      pair.repo = result.repo;
      pair.cut_path = std::filesystem::relative(file, result.repo.working_copy, ec);
      pair.cut_fqn = cut.package_name.empty()
                         ? cut.type_names.front()
                         : cut.package_name + "." + cut.type_names.front();
      pair.test_path = candidate.path;
      pair.test_fqn = test_unit.package_name.empty()
                          ? test_unit.type_names.front()
                          : test_unit.package_name + "." + test_unit.type_names.front();
      pair.summary = validate_mapping(cut, test_unit);
      evidences.push_back(std::move(pair));
    }
  }

  result.discovered_pairs = static_cast<int>(evidences.size());
  auto resolved = resolve_mappings(evidences);
  result.records = std::move(resolved.retained);
  result.exclusions = std::move(resolved.excluded);
  return result;
}

}  // namespace agone::miner
