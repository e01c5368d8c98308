#include <cstdlib>
#include <nlohmann/json.hpp>

#include "agone/build_config.hpp"
#include "agone/detail/fs.hpp"
#include "agone/detail/strings.hpp"
#include "agone/detail/xml.hpp"

namespace agone::buildcfg {

namespace {

constexpr const char* kGradleMarkerBegin = "// >>> agone:measurement (generated; do not edit)";
constexpr const char* kGradleMarkerEnd = "// <<< agone:measurement";

// Indentation of the line containing `offset`.
std::string line_indent(const std::string& text, std::size_t offset) {
  std::size_t line_start = text.rfind('\n', offset);
  line_start = (line_start == std::string::npos) ? 0 : line_start + 1;
  std::string indent;
  for (std::size_t i = line_start; i < offset && i < text.size(); ++i) {
    if (text[i] == ' ' || text[i] == '\t') {
      indent.push_back(text[i]);
    } else {
      break;
    }
  }
  return indent;
}

std::string jacoco_plugin_xml(const std::string& indent, const std::string& version) {
  std::string i1 = indent, i2 = indent + "  ", i3 = indent + "    ", i4 = indent + "      ";
  return i1 + "<plugin>\n" +
         i2 + "<groupId>org.jacoco</groupId>\n" +
         i2 + "<artifactId>jacoco-maven-plugin</artifactId>\n" +
         i2 + "<version>" + version + "</version>\n" +
         i2 + "<executions>\n" +
         i3 + "<execution>\n" +
         i4 + "<goals><goal>prepare-agent</goal></goals>\n" +
         i3 + "</execution>\n" +
         i3 + "<execution>\n" +
         i4 + "<id>report</id>\n" +
         i4 + "<phase>test</phase>\n" +
         i4 + "<goals><goal>report</goal></goals>\n" +
         i3 + "</execution>\n" +
         i2 + "</executions>\n" +
         i1 + "</plugin>\n";
}

std::string pitest_plugin_xml(const std::string& indent, const std::string& version,
                              const std::string& junit5_plugin_version, bool junit5) {
  std::string i1 = indent, i2 = indent + "  ", i3 = indent + "    ", i4 = indent + "      ";
  std::string xml = i1 + "<plugin>\n" +
                    i2 + "<groupId>org.pitest</groupId>\n" +
                    i2 + "<artifactId>pitest-maven</artifactId>\n" +
                    i2 + "<version>" + version + "</version>\n";
  if (junit5) {
    xml += i2 + "<dependencies>\n" +
           i3 + "<dependency>\n" +
           i4 + "<groupId>org.pitest</groupId>\n" +
           i4 + "<artifactId>pitest-junit5-plugin</artifactId>\n" +
           i4 + "<version>" + junit5_plugin_version + "</version>\n" +
           i3 + "</dependency>\n" +
           i2 + "</dependencies>\n";
  }
  xml += i2 + "<configuration>\n" +
         i3 + "<outputFormats><outputFormat>XML</outputFormat></outputFormats>\n" +
         i2 + "</configuration>\n" +
         i1 + "</plugin>\n";
  return xml;
}

struct MavenPluginScan {
  bool has_jacoco = false;
  bool has_pitest = false;
  bool pitest_has_junit5_dep = false;
  const xml::Element* plugins = nullptr;  // project/build/plugins
  const xml::Element* build = nullptr;
  const xml::Element* pitest = nullptr;
};

MavenPluginScan scan_maven(const xml::Element& root) {
  MavenPluginScan scan;
  scan.build = root.child("build");
  if (!scan.build) return scan;
  scan.plugins = scan.build->child("plugins");
  if (!scan.plugins) return scan;
  for (const auto* plugin : scan.plugins->children_named("plugin")) {
    std::string artifact = plugin->child_text("artifactId");
    if (artifact == "jacoco-maven-plugin") scan.has_jacoco = true;
    if (artifact == "pitest-maven") {
      scan.has_pitest = true;
      scan.pitest = plugin;
      if (const auto* deps = plugin->child("dependencies")) {
        for (const auto* dep : deps->children_named("dependency")) {
          if (dep->child_text("artifactId") == "pitest-junit5-plugin") {
            scan.pitest_has_junit5_dep = true;
          }
        }
      }
    }
  }
  return scan;
}

InjectionPlan inject_maven(const ProjectBuildProfile& profile,
                           const std::map<std::string, std::string>& versions) {
  std::string text = detail::read_file(profile.build_file_path);
  xml::Element root;
  try {
    root = xml::parse(text);
  } catch (const xml::XmlParseError& e) {
    throw MalformedBuildFile(profile.build_file_path.string() + ": " + e.what());
  }
  MavenPluginScan scan = scan_maven(root);
  const bool junit5 = profile.testing_framework == TestingFramework::junit5;

  InjectionPlan plan;
  std::string block;
  std::string indent;
  std::size_t insert_at = 0;

  if (scan.plugins) {
    indent = line_indent(text, scan.plugins->content_end) + "  ";
    insert_at = scan.plugins->content_end;
  } else if (scan.build) {
    indent = line_indent(text, scan.build->content_end) + "    ";
    insert_at = scan.build->content_end;
  } else {
    indent = "      ";
    insert_at = root.content_end;
  }

  std::string plugin_blocks;
  if (!scan.has_jacoco) {
    plugin_blocks += jacoco_plugin_xml(indent, versions.at("jacoco"));
    plan.additions.emplace_back("org.jacoco:jacoco-maven-plugin:" + versions.at("jacoco"),
                                "build-plugin");
  }
  if (!scan.has_pitest) {
    plugin_blocks += pitest_plugin_xml(indent, versions.at("pitest"),
                                       versions.at("pitest-junit5-plugin"), junit5);
    plan.additions.emplace_back("org.pitest:pitest-maven:" + versions.at("pitest"),
                                "build-plugin");
    if (junit5) {
      plan.additions.emplace_back(
          "org.pitest:pitest-junit5-plugin:" + versions.at("pitest-junit5-plugin"),
          "plugin-dependency");
    }
  } else if (junit5 && !scan.pitest_has_junit5_dep && scan.pitest) {
    // existing pitest plugin without the junit5 engine: add just the dependency
    std::string dep_indent = line_indent(text, scan.pitest->content_end) + "  ";
    std::string i2 = dep_indent + "  ", i3 = dep_indent + "    ";
    std::string dep_block = dep_indent + "<dependencies>\n" +
                            i2 + "<dependency>\n" +
                            i3 + "<groupId>org.pitest</groupId>\n" +
                            i3 + "<artifactId>pitest-junit5-plugin</artifactId>\n" +
                            i3 + "<version>" + versions.at("pitest-junit5-plugin") + "</version>\n" +
                            i2 + "</dependency>\n" +
                            dep_indent + "</dependencies>\n" +
                            line_indent(text, scan.pitest->content_end);
    text.insert(scan.pitest->content_end, dep_block);
    plan.additions.emplace_back(
        "org.pitest:pitest-junit5-plugin:" + versions.at("pitest-junit5-plugin"),
        "plugin-dependency");
    plan.modified = true;
    detail::write_file(profile.build_file_path, text);
    return plan;
  }

  if (plugin_blocks.empty()) {
    return plan;  // nothing to do; file untouched
  }

  if (scan.plugins) {
    block = plugin_blocks + line_indent(text, scan.plugins->content_end);
  } else if (scan.build) {
    std::string build_indent = line_indent(text, scan.build->content_end);
    block = build_indent + "  <plugins>\n" + plugin_blocks + build_indent + "  </plugins>\n" +
            build_indent;
  } else {
    std::string project_indent = line_indent(text, root.content_end);
    block = project_indent + "  <build>\n" + project_indent + "    <plugins>\n" + plugin_blocks +
            project_indent + "    </plugins>\n" + project_indent + "  </build>\n" + project_indent;
  }

  text.insert(insert_at, block);
  detail::write_file(profile.build_file_path, text);
  plan.modified = true;
  return plan;
}

InjectionPlan inject_gradle(const ProjectBuildProfile& profile,
                            const std::map<std::string, std::string>& versions) {
  if (profile.build_file_path.extension() == ".kts") {
    throw UnrecognizedBuild("Kotlin-DSL Gradle files are elicited read-only: " +
                            profile.build_file_path.string());
  }
  std::string text = detail::read_file(profile.build_file_path);
  InjectionPlan plan;
  if (text.find(kGradleMarkerBegin) != std::string::npos) {
    return plan;  // already injected
  }
  const bool junit5 = profile.testing_framework == TestingFramework::junit5;

  std::string block;
  block += std::string(kGradleMarkerBegin) + "\n";
  block += "apply plugin: 'jacoco'\n";
  block += "apply plugin: 'info.solidsoft.pitest'\n";
  block += "pitest {\n";
  block += "    outputFormats = ['XML']\n";
  if (junit5) {
    block += "    junit5PluginVersion = '" + versions.at("pitest-junit5-plugin") + "'\n";
  }
  block += "}\n";
  block += std::string(kGradleMarkerEnd) + "\n";

  if (!text.empty() && text.back() != '\n') text.push_back('\n');
  text += block;
  detail::write_file(profile.build_file_path, text);

  plan.modified = true;
  plan.additions.emplace_back("jacoco", "gradle-plugin");
  plan.additions.emplace_back(
      "info.solidsoft.gradle.pitest:gradle-pitest-plugin:" + versions.at("gradle-pitest-plugin"),
      "gradle-plugin");
  if (junit5) {
    plan.additions.emplace_back(
        "org.pitest:pitest-junit5-plugin:" + versions.at("pitest-junit5-plugin"),
        "plugin-dependency");
  }
  return plan;
}

}  // namespace

std::map<std::string, std::string> tool_versions() {
  std::map<std::string, std::string> versions = {
      {"jacoco", "0.8.11"},
      {"pitest", "1.15.8"},
      {"pitest-junit5-plugin", "1.2.1"},
      {"gradle-pitest-plugin", "1.15.0"},
  };
  if (const char* manifest = std::getenv("AGONE_TOOL_VERSIONS")) {
    try {
      auto overrides = nlohmann::json::parse(detail::read_file(manifest));
      for (const auto& [name, version] : overrides.items()) {
        versions[name] = version.get<std::string>();
      }
    } catch (const std::exception& e) {
      throw MalformedBuildFile(std::string("AGONE_TOOL_VERSIONS manifest: ") + e.what());
    }
  }
  return versions;
}

InjectionPlan inject_measurement_deps(const ProjectBuildProfile& profile) {
  auto versions = tool_versions();
  if (!std::filesystem::exists(profile.build_file_path)) {
    throw WriteFailed("build file vanished: " + profile.build_file_path.string());
  }
  if (profile.build_system == BuildSystem::maven) {
    return inject_maven(profile, versions);
  }
  return inject_gradle(profile, versions);
}

}  // namespace agone::buildcfg
