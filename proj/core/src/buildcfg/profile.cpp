#include <cctype>
#include <optional>

#include "agone/build_config.hpp"
#include "agone/detail/fs.hpp"
#include "agone/detail/strings.hpp"
#include "agone/detail/xml.hpp"

namespace agone::buildcfg {

std::string to_string(BuildSystem system) {
  return system == BuildSystem::maven ? "maven" : "gradle";
}

std::string to_string(TestingFramework framework) {
  switch (framework) {
    case TestingFramework::junit4: return "junit4";
    case TestingFramework::junit5: return "junit5";
    case TestingFramework::testng: return "testng";
    case TestingFramework::other: return "other";
  }
  return "other";
}

std::string ProjectBuildProfile::framework_label() const {
  std::string base;
  switch (testing_framework) {
    case TestingFramework::junit4: base = "JUnit 4"; break;
    case TestingFramework::junit5: base = "JUnit 5"; break;
    case TestingFramework::testng: base = "TestNG"; break;
    case TestingFramework::other: return "unknown";
  }
  if (!framework_version.empty() && framework_version != "unspecified") {
    return base.substr(0, base.rfind(' ')) + " " + framework_version;
  }
  return base;
}

namespace {

std::string normalize_java_version(std::string v) {
  std::string trimmed(detail::trim(v));
  if (trimmed.rfind("1.", 0) == 0) trimmed = trimmed.substr(2);
  std::string digits;
  for (char c : trimmed) {
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
    } else {
      break;
    }
  }
  return digits;
}

struct DetectedFramework {
  TestingFramework framework = TestingFramework::other;
  std::string version;
};

void consider(DetectedFramework& best, TestingFramework candidate, const std::string& version) {
  // junit5 wins ties; otherwise first detection sticks
  if (best.framework == TestingFramework::junit5) return;
  if (candidate == TestingFramework::junit5 || best.framework == TestingFramework::other) {
    best.framework = candidate;
    best.version = version;
  }
}

std::string resolve_property(const std::map<std::string, std::string>& properties,
                             std::string value) {
  if (value.rfind("${", 0) == 0 && value.back() == '}') {
    auto key = value.substr(2, value.size() - 3);
    auto it = properties.find(key);
    if (it != properties.end()) return it->second;
    return "unspecified";
  }
  return value;
}

ProjectBuildProfile elicit_maven(const std::filesystem::path& pom_path) {
  ProjectBuildProfile profile;
  profile.build_system = BuildSystem::maven;
  profile.build_file_path = pom_path;

  xml::Element root;
  try {
    root = xml::parse(detail::read_file(pom_path));
  } catch (const xml::XmlParseError& e) {
    throw MalformedBuildFile(pom_path.string() + ": " + e.what());
  }
  if (root.name != "project") {
    throw UnrecognizedBuild(pom_path.string() + ": root element is <" + root.name + ">");
  }

  std::map<std::string, std::string> properties;
  if (const auto* props = root.child("properties")) {
    for (const auto& p : props->children) {
      properties[p.name] = std::string(detail::trim(p.text));
    }
  }

  DetectedFramework best;
  if (const auto* deps = root.child("dependencies")) {
    for (const auto* dep : deps->children_named("dependency")) {
      std::string group = dep->child_text("groupId");
      std::string artifact = dep->child_text("artifactId");
      std::string version = resolve_property(properties, dep->child_text("version"));
      if (version.empty()) version = "unspecified";
      if (group == "org.junit.jupiter" || artifact.rfind("junit-jupiter", 0) == 0) {
        consider(best, TestingFramework::junit5, version);
      } else if (group == "junit" && artifact == "junit") {
        consider(best, TestingFramework::junit4, version);
      } else if (group == "org.testng" && artifact == "testng") {
        consider(best, TestingFramework::testng, version);
      }
    }
  }
  profile.testing_framework = best.framework;
  profile.framework_version = best.framework == TestingFramework::other ? "" : best.version;

  std::string java;
  for (const char* key : {"maven.compiler.release", "maven.compiler.source",
                          "maven.compiler.target", "java.version"}) {
    auto it = properties.find(key);
    if (it != properties.end() && !it->second.empty()) {
      java = normalize_java_version(it->second);
      if (!java.empty()) break;
    }
  }
  if (java.empty()) {
    // maven-compiler-plugin configuration
    if (const auto* build = root.child("build")) {
      if (const auto* plugins = build->child("plugins")) {
        for (const auto* plugin : plugins->children_named("plugin")) {
          if (plugin->child_text("artifactId") != "maven-compiler-plugin") continue;
          if (const auto* config = plugin->child("configuration")) {
            for (const char* key : {"release", "source", "target"}) {
              std::string v = config->child_text(key);
              if (!v.empty()) {
                java = normalize_java_version(resolve_property(properties, v));
                if (!java.empty()) break;
              }
            }
          }
        }
      }
    }
  }
  profile.java_version = java.empty() ? "8" : java;
  return profile;
}

std::optional<std::string> quoted_payload(const std::string& line) {
  for (char quote : {'\'', '"'}) {
    auto open = line.find(quote);
    if (open == std::string::npos) continue;
    auto close = line.find(quote, open + 1);
    if (close == std::string::npos) continue;
    return line.substr(open + 1, close - open - 1);
  }
  return std::nullopt;
}

ProjectBuildProfile elicit_gradle(const std::filesystem::path& gradle_path) {
  ProjectBuildProfile profile;
  profile.build_system = BuildSystem::gradle;
  profile.build_file_path = gradle_path;

  DetectedFramework best;
  std::string java;
  for (const auto& raw : detail::split_lines(detail::read_file(gradle_path))) {
    std::string line(detail::trim(raw));
    if (line.rfind("//", 0) == 0) continue;

    if (detail::contains(line, "junit-jupiter") || detail::contains(line, "org.junit.jupiter")) {
      std::string version = "unspecified";
      if (auto coordinate = quoted_payload(line)) {
        auto parts = detail::split(*coordinate, ':');
        if (parts.size() >= 3) version = parts[2];
      }
      if (detail::contains(line, "junit.jupiter") || detail::contains(line, "junit-jupiter")) {
        consider(best, TestingFramework::junit5, version);
      }
    } else if (detail::contains(line, "junit:junit")) {
      std::string version = "unspecified";
      if (auto coordinate = quoted_payload(line)) {
        auto parts = detail::split(*coordinate, ':');
        if (parts.size() >= 3) version = parts[2];
      }
      consider(best, TestingFramework::junit4, version);
    } else if (detail::contains(line, "useJUnitPlatform")) {
      consider(best, TestingFramework::junit5, "unspecified");
    } else if (detail::contains(line, "org.testng:testng")) {
      std::string version = "unspecified";
      if (auto coordinate = quoted_payload(line)) {
        auto parts = detail::split(*coordinate, ':');
        if (parts.size() >= 3) version = parts[2];
      }
      consider(best, TestingFramework::testng, version);
    }

    auto grab_version_after = [&](const std::string& marker) -> std::string {
      auto pos = line.find(marker);
      if (pos == std::string::npos) return {};
      std::string tail = line.substr(pos + marker.size());
      std::string digits;
      bool seen = false;
      for (char c : tail) {
        if (std::isdigit(static_cast<unsigned char>(c))) {
          digits.push_back(c);
          seen = true;
        } else if (seen) {
          break;
        } else if (c == '1' || c == '.') {
          continue;
        }
      }
      return normalize_java_version(digits);
    };

    if (java.empty() && detail::contains(line, "JavaLanguageVersion.of")) {
      java = grab_version_after("JavaLanguageVersion.of");
    }
    if (java.empty() && detail::contains(line, "JavaVersion.VERSION_")) {
      auto pos = line.find("JavaVersion.VERSION_");
      std::string tail = line.substr(pos + 20);
      java = normalize_java_version(detail::replace_all(tail, "_", "."));
    }
    if (java.empty() && (line.rfind("sourceCompatibility", 0) == 0 ||
                         line.rfind("targetCompatibility", 0) == 0)) {
      auto eq = line.find('=');
      std::string value = eq == std::string::npos ? "" : line.substr(eq + 1);
      value = detail::replace_all(value, "'", "");
      value = detail::replace_all(value, "\"", "");
      java = normalize_java_version(value);
    }
  }
  profile.testing_framework = best.framework;
  profile.framework_version = best.framework == TestingFramework::other ? "" : best.version;
  profile.java_version = java.empty() ? "8" : java;
  return profile;
}

}  // namespace

ProjectBuildProfile elicit_profile(const std::filesystem::path& project_root) {
  auto pom = project_root / "pom.xml";
  auto gradle = project_root / "build.gradle";
  auto gradle_kts = project_root / "build.gradle.kts";
  if (std::filesystem::exists(pom)) return elicit_maven(pom);
  if (std::filesystem::exists(gradle)) return elicit_gradle(gradle);
  if (std::filesystem::exists(gradle_kts)) return elicit_gradle(gradle_kts);
  throw NoBuildFile("no pom.xml or build.gradle under " + project_root.string());
}

std::vector<std::filesystem::path> test_source_roots(const std::filesystem::path& project_root) {
  std::vector<std::filesystem::path> roots;
  auto pom = project_root / "pom.xml";
  if (std::filesystem::exists(pom)) {
    try {
      auto root = xml::parse(detail::read_file(pom));
      if (const auto* build = root.child("build")) {
        std::string declared = build->child_text("testSourceDirectory");
        if (!declared.empty()) roots.emplace_back(declared);
      }
    } catch (const xml::XmlParseError&) {
      // fall through to the conventional root
    }
  }
  roots.emplace_back("src/test/java");
  return roots;
}

}  // namespace agone::buildcfg
