#include <nlohmann/json.hpp>

#include "agone/build_config.hpp"
#include "agone/detail/fs.hpp"
#include "agone/detail/strings.hpp"
#include "agone/java_analysis.hpp"
#include "agone/llm_gateway.hpp"

namespace agone::gateway {

namespace {

using nlohmann::json;

std::filesystem::path registry_path(const std::filesystem::path& project_root) {
  return project_root / ".agone" / "placed.json";
}

std::vector<std::string> read_registry(const std::filesystem::path& project_root) {
  auto path = registry_path(project_root);
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return {};
  try {
    auto parsed = json::parse(detail::read_file(path));
    return parsed.get<std::vector<std::string>>();
  } catch (const std::exception&) {
    return {};
  }
}

void record_placement(const std::filesystem::path& project_root, const std::string& relative) {
  auto placed = read_registry(project_root);
  for (const auto& existing : placed) {
    if (existing == relative) return;
  }
  placed.push_back(relative);
  detail::write_file(registry_path(project_root), json(placed).dump(2) + "\n");
}

bool project_uses_packages(const std::filesystem::path& project_root) {
  for (const char* root : {"src/main/java", "src/test/java"}) {
    for (const auto& file : detail::list_files(project_root / root, {".java"})) {
      std::string text = detail::read_file(file);
      if (detail::contains(text, "package ")) return true;
    }
  }
  return false;
}

// Renames every standalone identifier token equal to `from`; inside one file
// the class's own simple name only ever refers to itself.
std::string rename_type(const std::string& source, const std::string& from,
                        const std::string& to) {
  std::string out;
  out.reserve(source.size() + 16);
  std::size_t i = 0;
  auto ident_char = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
  };
  while (i < source.size()) {
    if (ident_char(source[i])) {
      std::size_t start = i;
      while (i < source.size() && ident_char(source[i])) ++i;
      std::string_view word(source.data() + start, i - start);
      out += (word == from) ? to : std::string(word);
    } else {
      out.push_back(source[i]);
      ++i;
    }
  }
  return out;
}

}  // namespace

std::filesystem::path place_test_class(const std::filesystem::path& project_root,
                                       const std::string& source) {
  java::JavaSourceUnit unit;
  try {
    unit = java::parse_unit(source);
  } catch (const java::UnparseableSource& e) {
    throw WriteFailed(std::string("source does not parse: ") + e.what());
  }

  if (unit.package_name.empty() && project_uses_packages(project_root)) {
    throw PackageMissing("generated class has no package declaration in a packaged project");
  }

  // prefer the first public type when several are declared
  std::string type_name = unit.type_names.front();
  if (unit.types.size() > 1) {
    for (const auto& name : unit.type_names) {
      if (detail::contains(source, "public class " + name) ||
          detail::contains(source, "public final class " + name)) {
        type_name = name;
        break;
      }
    }
  }

  auto roots = buildcfg::test_source_roots(project_root);
  std::filesystem::path test_root = project_root / roots.front();
  std::filesystem::path package_dir = test_root;
  if (!unit.package_name.empty()) {
    for (const auto& part : detail::split(unit.package_name, '.')) {
      package_dir /= part;
    }
  }

  std::string final_source = source;
  std::string final_name = type_name;
  auto target = package_dir / (type_name + ".java");

  auto placed = read_registry(project_root);
  auto is_ours = [&](const std::filesystem::path& p) {
    auto rel = std::filesystem::relative(p, project_root).generic_string();
    for (const auto& entry : placed) {
      if (entry == rel) return true;
    }
    return false;
  };

  std::error_code ec;
  if (std::filesystem::exists(target, ec) && !is_ours(target)) {
    // never overwrite a human file: rename the generated class instead
    final_name = type_name + "_AgoneGen";
    final_source = rename_type(source, type_name, final_name);
    target = package_dir / (final_name + ".java");
    if (std::filesystem::exists(target, ec) && !is_ours(target)) {
      throw WriteFailed("both " + type_name + ".java and " + final_name +
                        ".java exist and are not harness-written");
    }
  }

  try {
    detail::write_file(target, final_source);
  } catch (const Error& e) {
    throw WriteFailed(e.what());
  }
  record_placement(project_root, std::filesystem::relative(target, project_root).generic_string());
  return target;
}

}  // namespace agone::gateway
