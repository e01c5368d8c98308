#include <set>

#include <nlohmann/json.hpp>

#include "agone/build_config.hpp"
#include "agone/detail/fs.hpp"
#include "agone/repo_miner.hpp"

namespace agone::miner {

namespace {

using nlohmann::json;

std::string detect_framework_label(const std::filesystem::path& working_copy) {
  try {
    auto profile = buildcfg::elicit_profile(working_copy);
    return to_string(profile.testing_framework);
  } catch (const Error&) {
    return "other";
  }
}

std::string detect_java_label(const std::filesystem::path& working_copy) {
  try {
    return buildcfg::elicit_profile(working_copy).java_version;
  } catch (const Error&) {
    return "unknown";
  }
}

}  // namespace

DatasetStats compute_stats(const std::vector<ClassUnderTestRecord>& records) {
  if (records.empty()) {
    throw EmptyDataset("no records to summarize");
  }
  DatasetStats stats;
  stats.test_class_count = static_cast<int>(records.size());

  double loc_sum = 0.0, cyclo_sum = 0.0;
  int measured = 0;
  std::map<std::string, const RepoIdentity*> repos;
  for (const auto& record : records) {
    repos.emplace(record.repo.url_or_path + "@" + record.repo.commit_hash, &record.repo);
    try {
      auto unit = java::parse_unit(
          detail::read_file(record.repo.working_copy / record.test_path), record.test_path);
      auto complexity = java::measure_complexity(unit);
      loc_sum += complexity.loc;
      cyclo_sum += complexity.cyclomatic_total;
      measured++;
    } catch (const Error&) {
      // unreadable test classes do not contribute to the averages
    }
  }
  stats.repo_count = static_cast<int>(repos.size());
  if (measured > 0) {
    stats.avg_loc = loc_sum / measured;
    stats.avg_cyclomatic = cyclo_sum / measured;
  }

  std::map<std::string, int> framework_counts, java_counts;
  for (const auto& [key, repo] : repos) {
    framework_counts[detect_framework_label(repo->working_copy)]++;
    java_counts[detect_java_label(repo->working_copy)]++;
  }
  for (const auto& [label, count] : framework_counts) {
    stats.framework_distribution[label] = 100.0 * count / stats.repo_count;
  }
  for (const auto& [label, count] : java_counts) {
    stats.java_version_distribution[label] = 100.0 * count / stats.repo_count;
  }
  return stats;
}

void write_dataset_jsonl(const std::vector<ClassUnderTestRecord>& records,
                         const std::filesystem::path& out_file) {
  std::string buffer;
  for (const auto& record : records) {
    json line = {
        {"repo_url", record.repo.url_or_path},
        {"branch", record.repo.branch},
        {"commit_hash", record.repo.commit_hash},
        {"cut_path", record.cut_path.generic_string()},
        {"cut_fqn", record.cut_fqn},
        {"test_path", record.test_path.generic_string()},
        {"test_fqn", record.test_fqn},
        {"evidence_ratio", record.evidence.ratio},
    };
    buffer += line.dump();
    buffer += '\n';
  }
  detail::write_file(out_file, buffer);
}

std::vector<ClassUnderTestRecord> read_dataset_jsonl(const std::filesystem::path& in_file) {
  std::vector<ClassUnderTestRecord> records;
  std::string text = detail::read_file(in_file);
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    start = end + 1;
    if (line.empty()) continue;
    auto parsed = json::parse(line);
    ClassUnderTestRecord record;
    record.repo.url_or_path = parsed.value("repo_url", "");
    record.repo.branch = parsed.value("branch", "");
    record.repo.commit_hash = parsed.value("commit_hash", "");
    record.cut_path = parsed.value("cut_path", "");
    record.cut_fqn = parsed.value("cut_fqn", "");
    record.test_path = parsed.value("test_path", "");
    record.test_fqn = parsed.value("test_fqn", "");
    record.evidence.ratio = parsed.value("evidence_ratio", 0.0);
    records.push_back(std::move(record));
  }
  return records;
}

void write_stats_json(const DatasetStats& stats, const std::filesystem::path& out_file) {
  json out = {
      {"test_class_count", stats.test_class_count},
      {"repo_count", stats.repo_count},
      {"avg_loc", stats.avg_loc},
      {"avg_cyclomatic", stats.avg_cyclomatic},
      {"framework_distribution", stats.framework_distribution},
      {"java_version_distribution", stats.java_version_distribution},
  };
  detail::write_file(out_file, out.dump(2) + "\n");
}

}  // namespace agone::miner
