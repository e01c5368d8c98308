#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "agone/errors.hpp"
#include "agone/java_analysis.hpp"

// Coverage/mutation report parsing, the 19 test-smell detectors, and the
// experiment-level aggregation (compiled-only and zero-penalized policies,
// plus the compilation rate).
namespace agone::metrics {

AGONE_DEFINE_ERROR(MalformedReport);
AGONE_DEFINE_ERROR(ClassNotInReport);
AGONE_DEFINE_ERROR(EmptyLedger);
AGONE_DEFINE_ERROR(KeyMismatch);

// Canonical smell order used everywhere a smell roster is serialized.
inline constexpr std::array<const char*, 19> kSmellCodes = {
    "AR", "CTL", "CI", "DT", "DA", "EA", "EM", "EH", "GF", "IT",
    "LT", "MNT", "MG", "RP", "RA", "RO", "SE", "ST", "UT"};

using SmellCounts = std::map<std::string, int>;  // all 19 codes always present

struct CoverageSummary {
  std::optional<double> branch;  // empty when the class has zero branch counters
  std::optional<double> line;
  std::optional<double> method;
};

// Reads a coverage XML report (counter elements with type/covered/missed
// attributes) scoped to `cut_fqn`. Percentages are 100*covered/(covered+missed);
// a counter with covered+missed == 0 (or absent) is undefined, never 0 or 100.
CoverageSummary parse_coverage_report(const std::filesystem::path& xml_path,
                                      const std::string& cut_fqn);

// Reads a mutation XML report (mutation elements with status and mutatedClass).
// Score is 100*killed/(killed+survived+no_coverage); empty when no mutants
// target `cut_fqn` (inner classes of the CUT count toward it).
std::optional<double> parse_mutation_report(const std::filesystem::path& xml_path,
                                            const std::string& cut_fqn);

// Runs all 19 detectors over a parsed test class. Counting granularity per
// detector is documented in smells.cpp next to each rule.
SmellCounts detect_smells(const java::JavaSourceUnit& test_unit);

SmellCounts zeroed_smells();

struct PerClassMetrics {
  std::string model;
  std::string prompt_name;
  std::string project;  // stable repository identifier
  std::string cut_fqn;
  bool build = false;  // build_i
  std::optional<double> branch_coverage;
  std::optional<double> line_coverage;
  std::optional<double> method_coverage;
  std::optional<double> mutation_score;
  SmellCounts smells;
  bool smells_measured = false;  // false when the test source did not parse

  bool operator==(const PerClassMetrics&) const = default;
};

struct EvaluationLedger {
  std::vector<PerClassMetrics> rows;
};

enum class AggregationPolicy { compiled_only, zero_penalized };

std::string to_string(AggregationPolicy policy);
AggregationPolicy policy_from_string(const std::string& name);  // throws agone::Error

struct SliceAggregate {
  std::optional<double> branch;
  std::optional<double> line;
  std::optional<double> method;
  std::optional<double> mutation;
  std::map<std::string, std::optional<double>> smell_means;
  double r_build = 0.0;  // N_comp / N, identical across policies
  int n = 0;
  int n_comp = 0;
};

struct AggregateReport {
  AggregationPolicy policy = AggregationPolicy::compiled_only;
  // keyed by (model, prompt_name)
  std::map<std::pair<std::string, std::string>, SliceAggregate> slices;
};

// Aggregates per (model, prompt) slice.
//
// compiled_only:   mean = sum over compiling rows of a defined metric, divided
//                  by the per-metric defined-and-compiled count.
// zero_penalized:  non-compiling rows contribute 0 and enter the divisor;
//                  compiled rows with an undefined metric stay excluded from
//                  that metric's divisor under both policies.
// R_build = N_comp/N regardless of policy. With no compiling rows the
// compiled-only means are undefined and R_build is 0.
AggregateReport aggregate(const EvaluationLedger& ledger, AggregationPolicy policy);

// Absolute percentage-point changes per metric, keyed like the reports.
// "build_pp" carries the compilation-rate delta in percentage points.
std::map<std::pair<std::string, std::string>, std::map<std::string, double>> delta_table(
    const AggregateReport& before, const AggregateReport& after);

}  // namespace agone::metrics
