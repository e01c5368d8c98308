#include <optional>

#include "agone/detail/fs.hpp"
#include "agone/detail/strings.hpp"
#include "agone/detail/xml.hpp"
#include "agone/metrics_engine.hpp"

namespace agone::metrics {

namespace {

std::optional<double> counter_percentage(const xml::Element& scope, const std::string& type) {
  long covered = 0, missed = 0;
  bool found = false;
  for (const auto* counter : scope.children_named("counter")) {
    if (counter->attribute("type") != type) continue;
    found = true;
    try {
      covered += std::stol(counter->attribute("covered"));
      missed += std::stol(counter->attribute("missed"));
    } catch (const std::exception&) {
      throw MalformedReport("counter " + type + " has non-numeric covered/missed attributes");
    }
  }
  if (!found || covered + missed == 0) return std::nullopt;
  return 100.0 * static_cast<double>(covered) / static_cast<double>(covered + missed);
}

const xml::Element* find_class(const xml::Element& node, const std::string& slash_name) {
  if (node.name == "class" && node.attribute("name") == slash_name) return &node;
  for (const auto& child : node.children) {
    if (const auto* hit = find_class(child, slash_name)) return hit;
  }
  return nullptr;
}

}  // namespace

CoverageSummary parse_coverage_report(const std::filesystem::path& xml_path,
                                      const std::string& cut_fqn) {
  xml::Element root;
  try {
    root = xml::parse(detail::read_file(xml_path));
  } catch (const xml::XmlParseError& e) {
    throw MalformedReport(std::string("coverage report: ") + e.what());
  }

  std::string slash_name = detail::replace_all(cut_fqn, ".", "/");
  const xml::Element* cls = find_class(root, slash_name);
  if (!cls) {
    throw ClassNotInReport(cut_fqn + " not present in " + xml_path.string());
  }

  CoverageSummary summary;
  summary.branch = counter_percentage(*cls, "BRANCH");
  summary.line = counter_percentage(*cls, "LINE");
  summary.method = counter_percentage(*cls, "METHOD");
  return summary;
}

}  // namespace agone::metrics
