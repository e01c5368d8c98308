#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "agone/metrics_engine.hpp"

using namespace agone;
using metrics::AggregationPolicy;
using metrics::PerClassMetrics;

namespace {

const std::filesystem::path kFixtures = AGONE_TEST_FIXTURES_DIR;

PerClassMetrics row(const std::string& model, bool build, std::optional<double> line) {
  PerClassMetrics r;
  r.model = model;
  r.prompt_name = "zero-shot";
  r.project = "p";
  r.cut_fqn = "com.example.C" + std::to_string(rand());
  r.build = build;
  r.line_coverage = line;
  r.smells = metrics::zeroed_smells();
  r.smells_measured = build;
  return r;
}

// Ground-truth generator for the aggregation oracle. Raw arrays are kept next
// to the packed rows so expected values can be recomputed directly from the
// evaluation-protocol sums.
struct RandomLedger {
  std::vector<int> build;
  std::vector<std::optional<double>> branch, line, method, mutation;
  std::vector<std::array<int, 19>> smells;
  metrics::EvaluationLedger ledger;
};

RandomLedger make_random_ledger(std::mt19937& rng, int max_rows = 12) {
  RandomLedger out;
  std::uniform_int_distribution<int> n_dist(1, max_rows);
  std::uniform_int_distribution<int> flag(0, 1);
  std::uniform_real_distribution<double> pct(0.0, 100.0);
  std::uniform_int_distribution<int> smell(0, 6);
  int n = n_dist(rng);
  for (int i = 0; i < n; ++i) {
    int b = flag(rng);
    out.build.push_back(b);
    auto metric = [&](bool can_be_undefined) -> std::optional<double> {
      if (!b) return std::nullopt;  // never measured for non-compiling rows
      if (can_be_undefined && flag(rng) == 0) return std::nullopt;
      return pct(rng);
    };
    out.branch.push_back(metric(true));
    out.line.push_back(metric(false));
    out.method.push_back(metric(false));
    out.mutation.push_back(metric(true));
    std::array<int, 19> s{};
    for (auto& v : s) v = smell(rng);
    out.smells.push_back(s);

    PerClassMetrics r;
    r.model = "m";
    r.prompt_name = "p";
    r.project = "prj";
    r.cut_fqn = "pkg.C" + std::to_string(i);
    r.build = b == 1;
    r.branch_coverage = out.branch.back();
    r.line_coverage = out.line.back();
    r.method_coverage = out.method.back();
    r.mutation_score = out.mutation.back();
    r.smells = metrics::zeroed_smells();
    int k = 0;
    for (const char* code : metrics::kSmellCodes) r.smells[code] = s[k++];
    r.smells_measured = r.build;
    out.ledger.rows.push_back(std::move(r));
  }
  return out;
}

// Direct transcription of the aggregation sums, computed from the raw arrays.
std::optional<double> oracle_mean(const std::vector<int>& build,
                                  const std::vector<std::optional<double>>& m,
                                  bool zero_penalized) {
  double numerator = 0.0;
  int defined_and_compiled = 0;
  int failed = 0;
  for (std::size_t i = 0; i < build.size(); ++i) {
    if (build[i] == 1 && m[i].has_value()) {
      numerator += *m[i];
      defined_and_compiled++;
    }
    if (build[i] == 0) failed++;
  }
  int divisor = zero_penalized ? defined_and_compiled + failed : defined_and_compiled;
  if (divisor == 0) return std::nullopt;
  return numerator / divisor;
}

bool same(const std::optional<double>& a, const std::optional<double>& b) {
  if (a.has_value() != b.has_value()) return false;
  if (!a.has_value()) return true;
  return std::fabs(*a - *b) < 1e-9;
}

}  // namespace

TEST_CASE("coverage percentages from covered/missed counters") {
  auto cov = metrics::parse_coverage_report(kFixtures / "reports/simple_coverage.xml",
                                            "com.example.Plain");
  REQUIRE(cov.line.has_value());
  CHECK(*cov.line == doctest::Approx(75.0));
  REQUIRE(cov.method.has_value());
  CHECK(*cov.method == doctest::Approx(75.0));
  CHECK_FALSE(cov.branch.has_value());  // no BRANCH counter at all
}

TEST_CASE("coverage fixture crafted to the Key report row") {
  auto cov =
      metrics::parse_coverage_report(kFixtures / "reports/key_coverage.xml", "com.example.Key");
  REQUIRE(cov.branch.has_value());
  REQUIRE(cov.line.has_value());
  REQUIRE(cov.method.has_value());
  CHECK(std::round(*cov.branch * 100) / 100 == doctest::Approx(57.14));
  CHECK(std::round(*cov.line * 100) / 100 == doctest::Approx(81.08));
  CHECK(std::round(*cov.method * 100) / 100 == doctest::Approx(85.62));
}

TEST_CASE("zero-branch class yields an undefined branch percentage") {
  auto cov = metrics::parse_coverage_report(kFixtures / "reports/filehandler_coverage.xml",
                                            "com.example.io.FileHandler");
  CHECK_FALSE(cov.branch.has_value());
  CHECK(*cov.line == doctest::Approx(100.0));
  CHECK(*cov.method == doctest::Approx(100.0));
}

TEST_CASE("coverage errors: class missing and malformed document") {
  CHECK_THROWS_AS(metrics::parse_coverage_report(kFixtures / "reports/simple_coverage.xml",
                                                 "com.example.Nope"),
                  metrics::ClassNotInReport);
  CHECK_THROWS_AS(
      metrics::parse_coverage_report(kFixtures / "reports/broken.xml", "com.example.Key"),
      metrics::MalformedReport);
}

TEST_CASE("mutation score counts killed over killed+survived+no_coverage") {
  auto score =
      metrics::parse_mutation_report(kFixtures / "reports/key_mutations.xml", "com.example.Key");
  REQUIRE(score.has_value());
  CHECK(std::round(*score * 100) / 100 == doctest::Approx(33.33));  // 5 of 15

  auto human = metrics::parse_mutation_report(kFixtures / "reports/human_key_mutations.xml",
                                              "com.example.Key");
  REQUIRE(human.has_value());
  CHECK(*human == doctest::Approx(25.0));  // 1 of 4
}

TEST_CASE("zero mutants yield an undefined mutation score") {
  auto score =
      metrics::parse_mutation_report(kFixtures / "reports/empty_mutations.xml", "com.example.Key");
  CHECK_FALSE(score.has_value());
}

TEST_CASE("worked averaging example under both policies") {
  metrics::EvaluationLedger ledger;
  ledger.rows.push_back(row("m", true, 80.0));
  ledger.rows.push_back(row("m", false, std::nullopt));
  ledger.rows.push_back(row("m", true, 60.0));

  auto compiled = metrics::aggregate(ledger, AggregationPolicy::compiled_only);
  auto penalized = metrics::aggregate(ledger, AggregationPolicy::zero_penalized);
  const auto& cs = compiled.slices.at({"m", "zero-shot"});
  const auto& ps = penalized.slices.at({"m", "zero-shot"});

  REQUIRE(cs.line.has_value());
  CHECK(*cs.line == doctest::Approx(70.0));
  REQUIRE(ps.line.has_value());
  CHECK(*ps.line == doctest::Approx(46.67).epsilon(0.001));

  // R_build identical across policies
  CHECK(cs.r_build == doctest::Approx(ps.r_build));
}

TEST_CASE("compilation rate over four rows") {
  metrics::EvaluationLedger ledger;
  ledger.rows.push_back(row("m", true, 10.0));
  ledger.rows.push_back(row("m", false, std::nullopt));
  ledger.rows.push_back(row("m", true, 20.0));
  ledger.rows.push_back(row("m", false, std::nullopt));
  auto report = metrics::aggregate(ledger, AggregationPolicy::compiled_only);
  CHECK(report.slices.at({"m", "zero-shot"}).r_build == doctest::Approx(0.5));
}

TEST_CASE("all builds failed: compiled-only means undefined, rate zero") {
  metrics::EvaluationLedger ledger;
  ledger.rows.push_back(row("m", false, std::nullopt));
  ledger.rows.push_back(row("m", false, std::nullopt));
  auto report = metrics::aggregate(ledger, AggregationPolicy::compiled_only);
  const auto& s = report.slices.at({"m", "zero-shot"});
  CHECK_FALSE(s.line.has_value());
  CHECK(s.r_build == doctest::Approx(0.0));
  CHECK_FALSE(s.smell_means.at("AR").has_value());
}

TEST_CASE("empty ledger is rejected") {
  CHECK_THROWS_AS(metrics::aggregate({}, AggregationPolicy::compiled_only),
                  metrics::EmptyLedger);
}

TEST_CASE("aggregate matches a brute-force recomputation on random ledgers") {
  std::mt19937 rng(20240817);
  for (int trial = 0; trial < 300; ++trial) {
    RandomLedger gen = make_random_ledger(rng);
    for (bool zero_pen : {false, true}) {
      auto policy = zero_pen ? AggregationPolicy::zero_penalized
                             : AggregationPolicy::compiled_only;
      auto report = metrics::aggregate(gen.ledger, policy);
      const auto& slice = report.slices.at({"m", "p"});

      CHECK(same(slice.branch, oracle_mean(gen.build, gen.branch, zero_pen)));
      CHECK(same(slice.line, oracle_mean(gen.build, gen.line, zero_pen)));
      CHECK(same(slice.method, oracle_mean(gen.build, gen.method, zero_pen)));
      CHECK(same(slice.mutation, oracle_mean(gen.build, gen.mutation, zero_pen)));

      // smells: sum over compiling rows / (N_comp or N)
      int n = static_cast<int>(gen.build.size());
      int n_comp = 0;
      for (int b : gen.build) n_comp += b;
      for (std::size_t k = 0; k < metrics::kSmellCodes.size(); ++k) {
        double sum = 0;
        for (int i = 0; i < n; ++i) {
          if (gen.build[i]) sum += gen.smells[i][k];
        }
        int divisor = zero_pen ? n : n_comp;
        auto got = slice.smell_means.at(metrics::kSmellCodes[k]);
        if (divisor == 0) {
          CHECK_FALSE(got.has_value());
        } else {
          REQUIRE(got.has_value());
          CHECK(*got == doctest::Approx(sum / divisor).epsilon(1e-12));
        }
      }

      double r_build = static_cast<double>(n_comp) / n;
      CHECK(slice.r_build == doctest::Approx(r_build).epsilon(1e-12));
    }
  }
}

TEST_CASE("zero-penalized means never exceed compiled-only means") {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    RandomLedger gen = make_random_ledger(rng);
    auto c = metrics::aggregate(gen.ledger, AggregationPolicy::compiled_only);
    auto z = metrics::aggregate(gen.ledger, AggregationPolicy::zero_penalized);
    const auto& cs = c.slices.at({"m", "p"});
    const auto& zs = z.slices.at({"m", "p"});
    auto leq = [](const std::optional<double>& zv, const std::optional<double>& cv) {
      if (zv.has_value() && cv.has_value()) CHECK(*zv <= *cv + 1e-9);
    };
    leq(zs.line, cs.line);
    leq(zs.branch, cs.branch);
    leq(zs.method, cs.method);
    leq(zs.mutation, cs.mutation);
    CHECK(zs.r_build == doctest::Approx(cs.r_build));
  }
}

TEST_CASE("aggregation is order independent") {
  std::mt19937 rng(7);
  RandomLedger gen = make_random_ledger(rng, 12);
  auto before = metrics::aggregate(gen.ledger, AggregationPolicy::zero_penalized);
  std::shuffle(gen.ledger.rows.begin(), gen.ledger.rows.end(), rng);
  auto after = metrics::aggregate(gen.ledger, AggregationPolicy::zero_penalized);
  const auto& a = before.slices.at({"m", "p"});
  const auto& b = after.slices.at({"m", "p"});
  CHECK(same(a.line, b.line));
  CHECK(same(a.branch, b.branch));
  CHECK(same(a.mutation, b.mutation));
  CHECK(a.r_build == doctest::Approx(b.r_build));
}

TEST_CASE("delta table reproduces the build-rate jump") {
  metrics::AggregateReport before, after;
  before.policy = after.policy = AggregationPolicy::compiled_only;
  metrics::SliceAggregate b, a;
  b.r_build = 0.286;
  b.line = 64.8;
  a.r_build = 0.569;
  a.line = 68.5;
  before.slices[{"gpt-4o-mini", "zero-shot"}] = b;
  after.slices[{"gpt-4o-mini", "zero-shot"}] = a;

  auto deltas = metrics::delta_table(before, after);
  const auto& d = deltas.at({"gpt-4o-mini", "zero-shot"});
  CHECK(d.at("build_pp") == doctest::Approx(28.3).epsilon(1e-9));
  CHECK(d.at("line") == doctest::Approx(3.7).epsilon(1e-9));
}

TEST_CASE("identical reports produce all-zero deltas") {
  metrics::AggregateReport r;
  r.policy = AggregationPolicy::compiled_only;
  metrics::SliceAggregate s;
  s.r_build = 0.4;
  s.line = 50.0;
  s.branch = 30.0;
  r.slices[{"m", "p"}] = s;
  auto deltas = metrics::delta_table(r, r);
  for (const auto& [key, d] : deltas) {
    for (const auto& [name, v] : d) CHECK(v == doctest::Approx(0.0));
  }
}

TEST_CASE("delta table rejects mismatched keys") {
  metrics::AggregateReport before, after;
  before.policy = after.policy = AggregationPolicy::compiled_only;
  before.slices[{"m", "p"}] = {};
  after.slices[{"m", "q"}] = {};
  CHECK_THROWS_AS(metrics::delta_table(before, after), metrics::KeyMismatch);
}
