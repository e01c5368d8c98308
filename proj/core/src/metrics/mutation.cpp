#include <optional>

#include "agone/detail/fs.hpp"
#include "agone/detail/xml.hpp"
#include "agone/metrics_engine.hpp"

namespace agone::metrics {

namespace {

bool targets_class(const std::string& mutated_class, const std::string& cut_fqn) {
  if (mutated_class == cut_fqn) return true;
  // inner classes of the CUT count toward it
  return mutated_class.size() > cut_fqn.size() + 1 &&
         mutated_class.compare(0, cut_fqn.size(), cut_fqn) == 0 &&
         mutated_class[cut_fqn.size()] == '$';
}

void tally(const xml::Element& node, const std::string& cut_fqn, long& killed, long& total) {
  if (node.name == "mutation") {
    std::string mutated = node.child_text("mutatedClass");
    if (targets_class(mutated, cut_fqn)) {
      std::string status = node.attribute("status");
      if (status == "KILLED") {
        killed++;
        total++;
      } else if (status == "SURVIVED" || status == "NO_COVERAGE") {
        total++;
      }
    }
    return;
  }
  for (const auto& child : node.children) tally(child, cut_fqn, killed, total);
}

}  // namespace

std::optional<double> parse_mutation_report(const std::filesystem::path& xml_path,
                                            const std::string& cut_fqn) {
  xml::Element root;
  try {
    root = xml::parse(detail::read_file(xml_path));
  } catch (const xml::XmlParseError& e) {
    throw MalformedReport(std::string("mutation report: ") + e.what());
  }
  long killed = 0, total = 0;
  tally(root, cut_fqn, killed, total);
  if (total == 0) return std::nullopt;
  return 100.0 * static_cast<double>(killed) / static_cast<double>(total);
}

}  // namespace agone::metrics
