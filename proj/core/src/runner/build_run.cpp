#include <nlohmann/json.hpp>

#include "agone/detail/fs.hpp"
#include "agone/detail/subprocess.hpp"
#include "agone/test_runner.hpp"

namespace agone::runner {

std::string to_string(Phase phase) {
  switch (phase) {
    case Phase::compile: return "compile";
    case Phase::test: return "test";
    case Phase::coverage: return "coverage";
    case Phase::mutation: return "mutation";
  }
  return "compile";
}

Phase phase_from_string(const std::string& name) {
  if (name == "compile") return Phase::compile;
  if (name == "test") return Phase::test;
  if (name == "coverage") return Phase::coverage;
  if (name == "mutation") return Phase::mutation;
  throw Error("UnknownPhase", "unknown phase: " + name);
}

Mode mode_from_string(const std::string& name) {
  if (name == "live") return Mode::live;
  if (name == "replay") return Mode::replay;
  throw Error("UnknownMode", "unknown mode: " + name);
}

namespace {

using nlohmann::json;

BuildRun replay_phase(const std::filesystem::path& project_root, Phase phase,
                      const RunnerOptions& options, const RunKey& key) {
  auto manifest_path = options.replay_root / "manifest.json";
  json manifest;
  try {
    manifest = json::parse(detail::read_file(manifest_path));
  } catch (const std::exception& e) {
    throw MissingReplayFixture("cannot read replay manifest " + manifest_path.string() + ": " +
                               e.what());
  }

  const std::string want_phase = to_string(phase);
  for (const auto& entry : manifest.value("entries", json::array())) {
    if (entry.value("model", "") != key.model) continue;
    if (entry.value("prompt", "") != key.prompt_name) continue;
    if (entry.value("cut_fqn", "") != key.cut_fqn) continue;
    if (entry.value("phase", "") != want_phase) continue;

    BuildRun run;
    run.project_root = project_root;
    run.phase = phase;
    run.exit_ok = entry.value("exit_ok", false);
    if (entry.contains("stderr_file")) {
      run.stderr_text =
          detail::read_file(options.replay_root / entry["stderr_file"].get<std::string>());
    }
    if (entry.contains("stdout_file")) {
      run.stdout_text =
          detail::read_file(options.replay_root / entry["stdout_file"].get<std::string>());
    }
    for (const auto& artifact : entry.value("artifacts", json::array())) {
      run.artifacts.push_back(options.replay_root / artifact.get<std::string>());
    }
    return run;
  }
  throw MissingReplayFixture("no replay entry for (" + key.model + ", " + key.prompt_name +
                             ", " + key.cut_fqn + ", " + want_phase + ")");
}

std::vector<std::filesystem::path> locate_artifacts(const std::filesystem::path& root,
                                                    bool maven, Phase phase) {
  std::vector<std::filesystem::path> found;
  std::error_code ec;
  if (phase == Phase::coverage) {
    auto path = maven ? root / "target/site/jacoco/jacoco.xml"
                      : root / "build/reports/jacoco/test/jacocoTestReport.xml";
    if (std::filesystem::exists(path, ec)) found.push_back(path);
  } else if (phase == Phase::mutation) {
    auto reports = maven ? root / "target/pit-reports" : root / "build/reports/pitest";
    if (std::filesystem::exists(reports, ec)) {
      for (const auto& p : detail::list_files(reports, {".xml"})) {
        if (p.filename() == "mutations.xml") found.push_back(p);
      }
    }
  }
  return found;
}

BuildRun live_phase(const std::filesystem::path& project_root, Phase phase,
                    const RunnerOptions& options) {
  const bool maven = std::filesystem::exists(project_root / "pom.xml");
  const bool gradle = std::filesystem::exists(project_root / "build.gradle") ||
                      std::filesystem::exists(project_root / "build.gradle.kts");
  if (!maven && !gradle) {
    throw ToolNotFound("no pom.xml or build.gradle under " + project_root.string());
  }
  const std::string tool = maven ? options.maven_path : options.gradle_path;
  if (!detail::executable_exists(tool)) {
    throw ToolNotFound("build tool not found: " + tool);
  }

  std::vector<std::string> argv{tool};
  if (maven) {
    argv.push_back("-B");
    switch (phase) {
      case Phase::compile: argv.push_back("-q"); argv.push_back("test-compile"); break;
      case Phase::test: argv.push_back("test"); break;
      case Phase::coverage: argv.push_back("test"); argv.push_back("jacoco:report"); break;
      case Phase::mutation: argv.push_back("org.pitest:pitest-maven:mutationCoverage"); break;
    }
  } else {
    switch (phase) {
      case Phase::compile: argv.push_back("compileTestJava"); break;
      case Phase::test: argv.push_back("test"); break;
      case Phase::coverage: argv.push_back("test"); argv.push_back("jacocoTestReport"); break;
      case Phase::mutation: argv.push_back("pitest"); break;
    }
  }

  detail::CommandOptions copts;
  copts.cwd = project_root;
  auto limit = options.compile_timeout;
  if (phase == Phase::test || phase == Phase::coverage) limit = options.test_timeout;
  if (phase == Phase::mutation) limit = options.mutation_timeout;
  copts.timeout = std::chrono::duration_cast<std::chrono::milliseconds>(limit);

  auto result = detail::run_command(argv, copts);
  BuildRun run;
  run.project_root = project_root;
  run.phase = phase;
  run.stdout_text = result.out;
  run.stderr_text = result.err;
  run.duration_ms = result.duration_ms;
  if (result.spawn_failed) {
    throw ToolNotFound("failed to launch build tool: " + tool);
  }
  run.exit_ok = result.ok();
  if (result.timed_out) {
    run.stderr_text += "\n[agone] phase timed out after " + std::to_string(limit.count()) + "s";
  }
  run.artifacts = locate_artifacts(project_root, maven, phase);
  if (run.exit_ok && (phase == Phase::coverage || phase == Phase::mutation) &&
      run.artifacts.empty()) {
    run.exit_ok = false;
    run.stderr_text += "\n[agone] phase reported success but produced no report artifact";
  }
  return run;
}

}  // namespace

BuildRun run_phase(const std::filesystem::path& project_root, Phase phase,
                   const RunnerOptions& options, const RunKey& key) {
  if (options.mode == Mode::replay) {
    return replay_phase(project_root, phase, options, key);
  }
  return live_phase(project_root, phase, options);
}

}  // namespace agone::runner
