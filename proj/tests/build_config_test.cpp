#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <set>
#include <string>

#include "agone/build_config.hpp"
#include "agone/detail/fs.hpp"
#include "agone/detail/strings.hpp"

using namespace agone;
namespace fs = std::filesystem;

namespace {

const std::string kJunit5Pom = R"(<?xml version="1.0" encoding="UTF-8"?>
<project xmlns="http://maven.apache.org/POM/4.0.0">
  <modelVersion>4.0.0</modelVersion>
  <groupId>com.example</groupId>
  <artifactId>toyproject</artifactId>
  <version>1.0.0</version>
  <properties>
    <maven.compiler.source>17</maven.compiler.source>
    <maven.compiler.target>17</maven.compiler.target>
  </properties>
  <dependencies>
    <dependency>
      <groupId>org.junit.jupiter</groupId>
      <artifactId>junit-jupiter</artifactId>
      <version>5.9.2</version>
      <scope>test</scope>
    </dependency>
  </dependencies>
  <build>
    <plugins>
      <plugin>
        <groupId>org.apache.maven.plugins</groupId>
        <artifactId>maven-surefire-plugin</artifactId>
        <version>3.1.2</version>
      </plugin>
    </plugins>
  </build>
</project>
)";

const std::string kJunit4Gradle = R"(plugins {
    id 'java'
}

java {
    toolchain {
        languageVersion = JavaLanguageVersion.of(11)
    }
}

dependencies {
    testImplementation 'junit:junit:4.13.2'
}
)";

fs::path temp_project(const std::string& tag) {
  auto dir = fs::temp_directory_path() / ("agone_buildcfg_" + tag + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("maven profile: junit-jupiter plus compiler source") {
  auto dir = temp_project("mvn5");
  detail::write_file(dir / "pom.xml", kJunit5Pom);
  auto profile = buildcfg::elicit_profile(dir);
  CHECK(profile.build_system == buildcfg::BuildSystem::maven);
  CHECK(profile.java_version == "17");
  CHECK(profile.testing_framework == buildcfg::TestingFramework::junit5);
  CHECK(profile.framework_version == "5.9.2");
  CHECK(profile.framework_label() == "JUnit 5.9.2");
  fs::remove_all(dir);
}

TEST_CASE("gradle profile: junit4 plus toolchain") {
  auto dir = temp_project("gradle4");
  detail::write_file(dir / "build.gradle", kJunit4Gradle);
  auto profile = buildcfg::elicit_profile(dir);
  CHECK(profile.build_system == buildcfg::BuildSystem::gradle);
  CHECK(profile.java_version == "11");
  CHECK(profile.testing_framework == buildcfg::TestingFramework::junit4);
  CHECK(profile.framework_version == "4.13.2");
  fs::remove_all(dir);
}

TEST_CASE("no build file raises NoBuildFile") {
  auto dir = temp_project("empty");
  CHECK_THROWS_AS(buildcfg::elicit_profile(dir), buildcfg::NoBuildFile);
  fs::remove_all(dir);
}

TEST_CASE("junit5 beats junit4 when both are declared") {
  auto dir = temp_project("both");
  std::string pom = detail::replace_all(kJunit5Pom, "</dependencies>",
                                        "  <dependency>\n"
                                        "      <groupId>junit</groupId>\n"
                                        "      <artifactId>junit</artifactId>\n"
                                        "      <version>4.13.2</version>\n"
                                        "    </dependency>\n"
                                        "  </dependencies>");
  detail::write_file(dir / "pom.xml", pom);
  auto profile = buildcfg::elicit_profile(dir);
  CHECK(profile.testing_framework == buildcfg::TestingFramework::junit5);
  fs::remove_all(dir);
}

TEST_CASE("version normalization: 1.8 reads as 8") {
  auto dir = temp_project("legacy");
  std::string pom = detail::replace_all(kJunit5Pom, "<maven.compiler.source>17", "<maven.compiler.source>1.8");
  pom = detail::replace_all(pom, "<maven.compiler.target>17", "<maven.compiler.target>1.8");
  detail::write_file(dir / "pom.xml", pom);
  CHECK(buildcfg::elicit_profile(dir).java_version == "8");
  fs::remove_all(dir);
}

TEST_CASE("injection adds coverage and mutation tooling for junit5") {
  auto dir = temp_project("inject5");
  detail::write_file(dir / "pom.xml", kJunit5Pom);
  auto profile = buildcfg::elicit_profile(dir);
  auto plan = buildcfg::inject_measurement_deps(profile);
  CHECK(plan.modified);

  std::set<std::string> scopes;
  bool has_jacoco = false, has_pitest = false, has_junit5_plugin = false;
  for (const auto& [coordinate, scope] : plan.additions) {
    scopes.insert(scope);
    if (detail::contains(coordinate, "jacoco-maven-plugin")) has_jacoco = true;
    if (detail::contains(coordinate, "pitest-maven")) has_pitest = true;
    if (detail::contains(coordinate, "pitest-junit5-plugin")) has_junit5_plugin = true;
  }
  CHECK(has_jacoco);
  CHECK(has_pitest);
  CHECK(has_junit5_plugin);

  std::string written = detail::read_file(dir / "pom.xml");
  CHECK(detail::contains(written, "jacoco-maven-plugin"));
  CHECK(detail::contains(written, "pitest-junit5-plugin"));
  // the pre-existing plugin survived
  CHECK(detail::contains(written, "maven-surefire-plugin"));
  fs::remove_all(dir);
}

TEST_CASE("injection is idempotent byte for byte") {
  auto dir = temp_project("idem");
  detail::write_file(dir / "pom.xml", kJunit5Pom);
  auto profile = buildcfg::elicit_profile(dir);
  buildcfg::inject_measurement_deps(profile);
  std::string first = detail::read_file(dir / "pom.xml");

  auto second_plan = buildcfg::inject_measurement_deps(buildcfg::elicit_profile(dir));
  std::string second = detail::read_file(dir / "pom.xml");
  CHECK_FALSE(second_plan.modified);
  CHECK(second_plan.additions.empty());
  CHECK(first == second);
  fs::remove_all(dir);
}

TEST_CASE("junit4 projects do not receive the junit5 mutation plugin") {
  auto dir = temp_project("inject4");
  std::string pom = detail::replace_all(kJunit5Pom, "org.junit.jupiter", "junit");
  pom = detail::replace_all(pom, "<artifactId>junit-jupiter</artifactId>", "<artifactId>junit</artifactId>");
  pom = detail::replace_all(pom, "<version>5.9.2</version>", "<version>4.13.2</version>");
  detail::write_file(dir / "pom.xml", pom);
  auto profile = buildcfg::elicit_profile(dir);
  REQUIRE(profile.testing_framework == buildcfg::TestingFramework::junit4);

  auto plan = buildcfg::inject_measurement_deps(profile);
  CHECK(plan.modified);
  for (const auto& [coordinate, scope] : plan.additions) {
    CHECK_FALSE(detail::contains(coordinate, "pitest-junit5-plugin"));
  }
  CHECK_FALSE(detail::contains(detail::read_file(dir / "pom.xml"), "pitest-junit5-plugin"));
  fs::remove_all(dir);
}

TEST_CASE("re-eliciting after injection reports the same profile") {
  auto dir = temp_project("roundtrip");
  detail::write_file(dir / "pom.xml", kJunit5Pom);
  auto before = buildcfg::elicit_profile(dir);
  buildcfg::inject_measurement_deps(before);
  auto after = buildcfg::elicit_profile(dir);
  CHECK(before.testing_framework == after.testing_framework);
  CHECK(before.framework_version == after.framework_version);
  CHECK(before.java_version == after.java_version);
  fs::remove_all(dir);
}

TEST_CASE("gradle injection appends a marker block once") {
  auto dir = temp_project("gradle_inject");
  detail::write_file(dir / "build.gradle", kJunit4Gradle);
  auto profile = buildcfg::elicit_profile(dir);
  auto plan = buildcfg::inject_measurement_deps(profile);
  CHECK(plan.modified);
  std::string first = detail::read_file(dir / "build.gradle");
  CHECK(detail::contains(first, "agone:measurement"));
  CHECK(detail::contains(first, "jacoco"));

  auto again = buildcfg::inject_measurement_deps(buildcfg::elicit_profile(dir));
  CHECK_FALSE(again.modified);
  CHECK(detail::read_file(dir / "build.gradle") == first);
  fs::remove_all(dir);
}

TEST_CASE("kotlin gradle files elicit but refuse injection") {
  auto dir = temp_project("kts");
  detail::write_file(dir / "build.gradle.kts",
                     "plugins { java }\n"
                     "dependencies { testImplementation(\"org.junit.jupiter:junit-jupiter:5.10.0\") }\n");
  auto profile = buildcfg::elicit_profile(dir);
  CHECK(profile.testing_framework == buildcfg::TestingFramework::junit5);
  CHECK_THROWS_AS(buildcfg::inject_measurement_deps(profile), buildcfg::UnrecognizedBuild);
  fs::remove_all(dir);
}

TEST_CASE("existing pitest plugin gains only the junit5 engine dependency") {
  auto dir = temp_project("pitest_present");
  std::string pom = detail::replace_all(
      kJunit5Pom,
      "      <plugin>\n"
      "        <groupId>org.apache.maven.plugins</groupId>\n"
      "        <artifactId>maven-surefire-plugin</artifactId>\n"
      "        <version>3.1.2</version>\n"
      "      </plugin>\n",
      "      <plugin>\n"
      "        <groupId>org.pitest</groupId>\n"
      "        <artifactId>pitest-maven</artifactId>\n"
      "        <version>1.15.8</version>\n"
      "      </plugin>\n"
      "      <plugin>\n"
      "        <groupId>org.jacoco</groupId>\n"
      "        <artifactId>jacoco-maven-plugin</artifactId>\n"
      "        <version>0.8.11</version>\n"
      "      </plugin>\n");
  detail::write_file(dir / "pom.xml", pom);
  auto plan = buildcfg::inject_measurement_deps(buildcfg::elicit_profile(dir));
  CHECK(plan.modified);
  REQUIRE(plan.additions.size() == 1);
  CHECK(detail::contains(plan.additions[0].first, "pitest-junit5-plugin"));
  CHECK(detail::contains(detail::read_file(dir / "pom.xml"), "pitest-junit5-plugin"));
  fs::remove_all(dir);
}

TEST_CASE("tool versions manifest override") {
  auto dir = temp_project("versions");
  detail::write_file(dir / "versions.json", R"({"jacoco": "9.9.9"})");
  setenv("AGONE_TOOL_VERSIONS", (dir / "versions.json").c_str(), 1);
  auto versions = buildcfg::tool_versions();
  unsetenv("AGONE_TOOL_VERSIONS");
  CHECK(versions.at("jacoco") == "9.9.9");
  CHECK(versions.count("pitest") == 1);  // defaults still present
  fs::remove_all(dir);
}

TEST_CASE("test source roots include declared and conventional locations") {
  auto dir = temp_project("roots");
  detail::write_file(dir / "pom.xml",
                     "<project><build>"
                     "<testSourceDirectory>src/alt-test/java</testSourceDirectory>"
                     "</build></project>");
  auto roots = buildcfg::test_source_roots(dir);
  REQUIRE(roots.size() == 2);
  CHECK(roots[0] == "src/alt-test/java");
  CHECK(roots[1] == "src/test/java");
  fs::remove_all(dir);
}
