#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "agone/java_analysis.hpp"
#include "agone/metrics_engine.hpp"
#include "agone/test_runner.hpp"
#include "agone/token_counter.hpp"

namespace {

using namespace agone;

std::string synthetic_test_class(int methods) {
  std::string src =
      "package bench;\n"
      "import org.junit.jupiter.api.Test;\n"
      "import static org.junit.jupiter.api.Assertions.assertEquals;\n"
      "public class WorkbenchTest {\n";
  for (int i = 0; i < methods; ++i) {
    src += "  @Test public void case" + std::to_string(i) +
           "() {\n"
           "    Widget w = new Widget(\"seed" + std::to_string(i) + "\");\n"
           "    w.spin();\n"
           "    if (w.ready()) { w.stop(); }\n"
           "    assertEquals(" + std::to_string(i) + ", w.total());\n"
           "  }\n";
  }
  src += "}\n";
  return src;
}

void BM_ParseUnit(benchmark::State& state) {
  auto src = synthetic_test_class(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto unit = java::parse_unit(src);
    benchmark::DoNotOptimize(unit);
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(src.size()));
}
BENCHMARK(BM_ParseUnit)->Arg(8)->Arg(64);

void BM_ExtractFacts(benchmark::State& state) {
  auto unit = java::parse_unit(synthetic_test_class(32));
  for (auto _ : state) {
    auto facts = java::extract_facts(unit);
    benchmark::DoNotOptimize(facts);
  }
}
BENCHMARK(BM_ExtractFacts);

void BM_DetectSmells(benchmark::State& state) {
  auto unit = java::parse_unit(synthetic_test_class(static_cast<int>(state.range(0))));
  for (auto _ : state) {
    auto counts = metrics::detect_smells(unit);
    benchmark::DoNotOptimize(counts);
  }
}
BENCHMARK(BM_DetectSmells)->Arg(8)->Arg(64);

void BM_ClassifyError(benchmark::State& state) {
  const std::string messages[] = {
      "cannot find symbol: method encode(String)",
      "package org.junit does not exist",
      "incompatible types: String cannot be converted to int",
      "';' expected",
      "some diagnostic with no category at all",
  };
  std::size_t i = 0;
  for (auto _ : state) {
    auto category = runner::classify_error(messages[i++ % 5]);
    benchmark::DoNotOptimize(category);
  }
}
BENCHMARK(BM_ClassifyError);

void BM_Aggregate(benchmark::State& state) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> pct(0.0, 100.0);
  metrics::EvaluationLedger ledger;
  for (int i = 0; i < state.range(0); ++i) {
    metrics::PerClassMetrics row;
    row.model = (i % 3 == 0) ? "a" : "b";
    row.prompt_name = (i % 2 == 0) ? "zero-shot" : "few-shot";
    row.project = "p";
    row.cut_fqn = "pkg.C" + std::to_string(i);
    row.build = i % 4 != 0;
    if (row.build) {
      row.line_coverage = pct(rng);
      row.method_coverage = pct(rng);
      if (i % 5 != 0) row.branch_coverage = pct(rng);
      row.mutation_score = pct(rng);
    }
    row.smells = metrics::zeroed_smells();
    row.smells["AR"] = i % 7;
    ledger.rows.push_back(std::move(row));
  }
  for (auto _ : state) {
    auto report = metrics::aggregate(ledger, metrics::AggregationPolicy::zero_penalized);
    benchmark::DoNotOptimize(report);
  }
}
BENCHMARK(BM_Aggregate)->Arg(100)->Arg(2000);

void BM_TokenCount(benchmark::State& state) {
  auto counter = prompt::default_token_counter();
  auto text = synthetic_test_class(32);
  for (auto _ : state) {
    int tokens = counter->count(text, "gpt-4o-mini");
    benchmark::DoNotOptimize(tokens);
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(text.size()));
}
BENCHMARK(BM_TokenCount);

}  // namespace

BENCHMARK_MAIN();
