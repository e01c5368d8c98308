#include "agone/metrics_engine.hpp"

namespace agone::metrics {

std::string to_string(AggregationPolicy policy) {
  return policy == AggregationPolicy::compiled_only ? "compiled_only" : "zero_penalized";
}

AggregationPolicy policy_from_string(const std::string& name) {
  if (name == "compiled_only") return AggregationPolicy::compiled_only;
  if (name == "zero_penalized") return AggregationPolicy::zero_penalized;
  throw Error("UnknownPolicy", "unknown aggregation policy: " + name);
}

namespace {

using MetricGetter = std::optional<double> (*)(const PerClassMetrics&);

std::optional<double> mean_of(const std::vector<const PerClassMetrics*>& rows,
                              MetricGetter getter, AggregationPolicy policy) {
  double sum = 0.0;
  int defined_compiled = 0;
  int failed = 0;
  for (const auto* row : rows) {
    if (!row->build) {
      failed++;
      continue;
    }
    auto value = getter(*row);
    if (value.has_value()) {
      sum += *value;
      defined_compiled++;
    }
    // compiled rows with this metric undefined stay out of the divisor
    // under both policies
  }
  int divisor = (policy == AggregationPolicy::compiled_only) ? defined_compiled
                                                             : defined_compiled + failed;
  if (divisor == 0) return std::nullopt;
  return sum / divisor;
}

}  // namespace

AggregateReport aggregate(const EvaluationLedger& ledger, AggregationPolicy policy) {
  if (ledger.rows.empty()) {
    throw EmptyLedger("cannot aggregate an empty ledger");
  }

  std::map<std::pair<std::string, std::string>, std::vector<const PerClassMetrics*>> grouped;
  for (const auto& row : ledger.rows) {
    grouped[{row.model, row.prompt_name}].push_back(&row);
  }

  AggregateReport report;
  report.policy = policy;
  for (const auto& [key, rows] : grouped) {
    SliceAggregate slice;
    slice.n = static_cast<int>(rows.size());
    for (const auto* row : rows) {
      if (row->build) slice.n_comp++;
    }
    slice.r_build = static_cast<double>(slice.n_comp) / slice.n;

    slice.branch = mean_of(rows, [](const PerClassMetrics& r) { return r.branch_coverage; },
                           policy);
    slice.line = mean_of(rows, [](const PerClassMetrics& r) { return r.line_coverage; }, policy);
    slice.method = mean_of(rows, [](const PerClassMetrics& r) { return r.method_coverage; },
                           policy);
    slice.mutation = mean_of(rows, [](const PerClassMetrics& r) { return r.mutation_score; },
                             policy);

    for (const char* code : kSmellCodes) {
      double sum = 0.0;
      for (const auto* row : rows) {
        if (!row->build) continue;  // s_k is defined only for compiling rows
        auto it = row->smells.find(code);
        if (it != row->smells.end()) sum += it->second;
      }
      int divisor = (policy == AggregationPolicy::compiled_only) ? slice.n_comp : slice.n;
      slice.smell_means[code] =
          divisor == 0 ? std::optional<double>{} : std::optional<double>{sum / divisor};
    }
    report.slices[key] = std::move(slice);
  }
  return report;
}

std::map<std::pair<std::string, std::string>, std::map<std::string, double>> delta_table(
    const AggregateReport& before, const AggregateReport& after) {
  if (before.policy != after.policy) {
    throw KeyMismatch("delta of reports computed under different policies");
  }
  if (before.slices.size() != after.slices.size()) {
    throw KeyMismatch("reports cover different (model, prompt) sets");
  }
  std::map<std::pair<std::string, std::string>, std::map<std::string, double>> deltas;
  for (const auto& [key, b] : before.slices) {
    auto it = after.slices.find(key);
    if (it == after.slices.end()) {
      throw KeyMismatch("missing (" + key.first + ", " + key.second + ") in the after report");
    }
    const SliceAggregate& a = it->second;
    std::map<std::string, double>& d = deltas[key];
    d["build_pp"] = (a.r_build - b.r_build) * 100.0;
    auto diff = [&](const char* name, const std::optional<double>& bv,
                    const std::optional<double>& av) {
      if (bv.has_value() && av.has_value()) d[name] = *av - *bv;
    };
    diff("branch", b.branch, a.branch);
    diff("line", b.line, a.line);
    diff("method", b.method, a.method);
    diff("mutation", b.mutation, a.mutation);
  }
  return deltas;
}

}  // namespace agone::metrics
