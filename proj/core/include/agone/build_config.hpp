#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "agone/errors.hpp"

// Elicits configuration parameters (test framework + version, Java version)
// from Maven and Gradle build files and injects the coverage/mutation tooling
// idempotently.
namespace agone::buildcfg {

AGONE_DEFINE_ERROR(NoBuildFile);
AGONE_DEFINE_ERROR(UnrecognizedBuild);
AGONE_DEFINE_ERROR(MalformedBuildFile);
AGONE_DEFINE_ERROR(WriteFailed);

enum class BuildSystem { maven, gradle };
enum class TestingFramework { junit4, junit5, testng, other };

std::string to_string(BuildSystem system);
std::string to_string(TestingFramework framework);

struct ProjectBuildProfile {
  BuildSystem build_system = BuildSystem::maven;
  std::string java_version;  // "8", "11", "17", ... (compiler default "8" when undeclared)
  TestingFramework testing_framework = TestingFramework::other;
  std::string framework_version;  // "unspecified" when managed elsewhere
  std::filesystem::path build_file_path;

  // Human-readable framework label for prompt variables, e.g. "JUnit 5.9.2".
  std::string framework_label() const;
};

struct InjectionPlan {
  // (dependency coordinate, scope); scope is one of build-plugin,
  // plugin-dependency, gradle-plugin.
  std::vector<std::pair<std::string, std::string>> additions;
  bool modified = false;
};

// Reads pom.xml / build.gradle / build.gradle.kts under `project_root`.
// Framework ties break toward junit5; "1.8"-style versions normalize to "8".
ProjectBuildProfile elicit_profile(const std::filesystem::path& project_root);

// Adds the coverage agent and mutation plugin to the build file when absent;
// the JUnit-5 mutation plugin is added exactly when the framework is junit5.
// Re-running on an already-injected file is a byte-identical no-op.
// Kotlin-DSL Gradle files are elicited read-only; injecting them throws
// UnrecognizedBuild.
InjectionPlan inject_measurement_deps(const ProjectBuildProfile& profile);

// Pinned versions for injected tooling. AGONE_TOOL_VERSIONS may point at an
// alternate JSON manifest (tool name -> version) overriding the defaults.
std::map<std::string, std::string> tool_versions();

// Test-source roots: declared roots from the build file plus src/test/java.
std::vector<std::filesystem::path> test_source_roots(const std::filesystem::path& project_root);

}  // namespace agone::buildcfg
