#include <cstdio>

#include <nlohmann/json.hpp>

#include "agone/detail/digest.hpp"
#include "agone/detail/fs.hpp"
#include "agone/detail/strings.hpp"
#include "agone/reporting.hpp"

namespace agone::report {

const char* kCsvHeader =
    "model,prompt_name,project,class_under_test,branch_coverage,line_coverage,method_coverage,"
    "mutation_score,AR,CTL,CI,DT,DA,EA,EM,EH,GF,IT,LT,MNT,MG,RP,RA,RO,SE,ST,UT";

std::string format_percentage(const std::optional<double>& value) {
  if (!value.has_value()) return "-";
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.2f", *value);
  return buffer;
}

std::string project_id(const std::string& repo_locator) {
  // a stable numeric identifier, compact enough for report tables
  return std::to_string(detail::fnv1a64(repo_locator) % 1000000000ULL);
}

ReportRow row_from_metrics(const metrics::PerClassMetrics& row) {
  ReportRow out;
  out.model = row.model;
  out.prompt_name = row.prompt_name;
  out.project = row.project;
  auto dot = row.cut_fqn.rfind('.');
  out.class_under_test = dot == std::string::npos ? row.cut_fqn : row.cut_fqn.substr(dot + 1);
  out.branch_coverage = format_percentage(row.branch_coverage);
  out.line_coverage = format_percentage(row.line_coverage);
  out.method_coverage = format_percentage(row.method_coverage);
  out.mutation_score = format_percentage(row.mutation_score);
  std::size_t i = 0;
  for (const char* code : metrics::kSmellCodes) {
    auto it = row.smells.find(code);
    out.smells[i++] = it == row.smells.end() ? 0 : it->second;
  }
  return out;
}

void emit_csv(const std::vector<ReportRow>& rows, const std::filesystem::path& out_file) {
  std::string buffer = kCsvHeader;
  buffer += '\n';
  for (const auto& row : rows) {
    buffer += row.model;
    buffer += ',';
    buffer += row.prompt_name;
    buffer += ',';
    buffer += row.project;
    buffer += ',';
    buffer += row.class_under_test;
    buffer += ',';
    buffer += row.branch_coverage;
    buffer += ',';
    buffer += row.line_coverage;
    buffer += ',';
    buffer += row.method_coverage;
    buffer += ',';
    buffer += row.mutation_score;
    for (int count : row.smells) {
      buffer += ',';
      buffer += std::to_string(count);
    }
    buffer += '\n';
  }
  try {
    detail::write_file(out_file, buffer);
  } catch (const Error& e) {
    throw WriteFailed(e.what());
  }
}

std::vector<ReportRow> parse_csv(const std::filesystem::path& in_file) {
  auto lines = detail::split_lines(detail::read_file(in_file));
  if (lines.empty() || lines[0] != kCsvHeader) {
    throw Error("SchemaMismatch", in_file.string() + ": header does not match the canonical schema");
  }
  std::vector<ReportRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto cells = detail::split(lines[i], ',');
    if (cells.size() != 27) {
      throw Error("SchemaMismatch",
                  in_file.string() + ": line " + std::to_string(i + 1) + " has " +
                      std::to_string(cells.size()) + " cells");
    }
    ReportRow row;
    row.model = cells[0];
    row.prompt_name = cells[1];
    row.project = cells[2];
    row.class_under_test = cells[3];
    row.branch_coverage = cells[4];
    row.line_coverage = cells[5];
    row.method_coverage = cells[6];
    row.mutation_score = cells[7];
    for (std::size_t k = 0; k < 19; ++k) {
      row.smells[k] = std::stoi(cells[8 + k]);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void emit_aggregate_csv(const metrics::AggregateReport& report,
                        const std::filesystem::path& out_file) {
  std::string buffer =
      "model,prompt_name,policy,n,n_comp,build_rate,branch_coverage,line_coverage,"
      "method_coverage,mutation_score";
  for (const char* code : metrics::kSmellCodes) {
    buffer += ',';
    buffer += code;
  }
  buffer += '\n';
  for (const auto& [key, slice] : report.slices) {
    buffer += key.first;
    buffer += ',';
    buffer += key.second;
    buffer += ',';
    buffer += metrics::to_string(report.policy);
    buffer += ',';
    buffer += std::to_string(slice.n);
    buffer += ',';
    buffer += std::to_string(slice.n_comp);
    buffer += ',';
    buffer += format_percentage(slice.r_build * 100.0);
    buffer += ',';
    buffer += format_percentage(slice.branch);
    buffer += ',';
    buffer += format_percentage(slice.line);
    buffer += ',';
    buffer += format_percentage(slice.method);
    buffer += ',';
    buffer += format_percentage(slice.mutation);
    for (const char* code : metrics::kSmellCodes) {
      buffer += ',';
      buffer += format_percentage(slice.smell_means.at(code));
    }
    buffer += '\n';
  }
  detail::write_file(out_file, buffer);
}

void emit_deltas_csv(
    const std::map<std::pair<std::string, std::string>, std::map<std::string, double>>& deltas,
    const std::filesystem::path& out_file) {
  std::string buffer = "model,prompt_name,build_pp,branch,line,method,mutation\n";
  for (const auto& [key, d] : deltas) {
    auto cell = [&](const char* name) -> std::string {
      auto it = d.find(name);
      if (it == d.end()) return "-";
      char formatted[32];
      std::snprintf(formatted, sizeof(formatted), "%+.1f", it->second);
      return formatted;
    };
    buffer += key.first;
    buffer += ',';
    buffer += key.second;
    buffer += ',';
    buffer += cell("build_pp");
    buffer += ',';
    buffer += cell("branch");
    buffer += ',';
    buffer += cell("line");
    buffer += ',';
    buffer += cell("method");
    buffer += ',';
    buffer += cell("mutation");
    buffer += '\n';
  }
  detail::write_file(out_file, buffer);
}

void emit_errors_profile_json(const runner::ErrorProfile& profile,
                              const std::filesystem::path& out_file) {
  using nlohmann::json;
  json categories = json::object();
  json percentages = json::object();
  for (const auto& [category, count] : profile.counts) {
    categories[runner::to_string(category)] = count;
  }
  for (const auto& [category, pct] : profile.category_percentages) {
    char formatted[32];
    std::snprintf(formatted, sizeof(formatted), "%.2f", pct);
    percentages[runner::to_string(category)] = formatted;
  }
  // group percentages are the sums of their members' reported percentages
  json groups = json::object();
  std::map<runner::ErrorGroup, double> group_pct;
  for (const auto& [category, pct] : profile.category_percentages) {
    double rounded = std::stod(percentages[runner::to_string(category)].get<std::string>());
    group_pct[runner::group_of(category)] += rounded;
  }
  for (const auto& [group, pct] : group_pct) {
    char formatted[32];
    std::snprintf(formatted, sizeof(formatted), "%.2f", pct);
    groups[runner::to_string(group)] = {
        {"count", profile.group_counts.at(group)},
        {"percentage", formatted},
    };
  }
  json out = {
      {"total", profile.total},
      {"category_counts", categories},
      {"category_percentages", percentages},
      {"groups", groups},
  };
  detail::write_file(out_file, out.dump(2) + "\n");
}

void write_manifest(const RunManifest& manifest, const std::filesystem::path& out_file) {
  using nlohmann::json;
  json out = {
      {"config_digest", manifest.config_digest},
      {"dataset_digest", manifest.dataset_digest},
      {"tool_versions", manifest.tool_versions},
      {"mode", manifest.mode},
      {"created_at", manifest.created_at},
  };
  detail::write_file(out_file, out.dump(2) + "\n");
}

}  // namespace agone::report
