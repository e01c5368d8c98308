#include <algorithm>
#include <cctype>

#include "agone/detail/digest.hpp"
#include "agone/detail/fs.hpp"
#include "agone/detail/strings.hpp"
#include "agone/detail/subprocess.hpp"
#include "agone/repo_miner.hpp"

namespace agone::miner {

namespace {

bool is_hex40(const std::string& s) {
  if (s.size() != 40) return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isdigit(c) || (c >= 'a' && c <= 'f');
  });
}

std::string git_in(const std::filesystem::path& dir, const std::vector<std::string>& args) {
  std::vector<std::string> argv{"git", "-C", dir.string()};
  argv.insert(argv.end(), args.begin(), args.end());
  auto result = detail::run_command(argv);
  if (!result.ok()) return {};
  return std::string(detail::trim(result.out));
}

bool is_git_checkout(const std::filesystem::path& dir) {
  return !git_in(dir, {"rev-parse", "--git-dir"}).empty();
}

// Deterministic 40-hex pin for a plain directory: digest over sorted relative
// paths and file contents of the sources that matter for mining.
std::string fingerprint_tree(const std::filesystem::path& root) {
  std::string buffer;
  for (const auto& file :
       detail::list_files(root, {".java", ".xml", ".gradle", ".kts", ".properties"})) {
    std::error_code ec;
    auto rel = std::filesystem::relative(file, root, ec);
    buffer += rel.generic_string();
    buffer += '\0';
    buffer += detail::read_file(file);
    buffer += '\0';
  }
  return detail::sha1_hex(buffer);
}

std::string sanitized_name(const std::string& locator) {
  std::string name;
  for (char c : locator) {
    name.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
  }
  if (name.size() > 60) name = name.substr(name.size() - 60);
  return name;
}

}  // namespace

RepoIdentity ingest_repo(const std::string& locator, const std::string& branch,
                         const std::filesystem::path& workdir) {
  RepoIdentity identity;
  identity.url_or_path = locator;
  identity.branch = branch;

  std::error_code ec;
  const bool local_dir = std::filesystem::is_directory(locator, ec);

  if (local_dir && !is_git_checkout(locator)) {
    identity.working_copy = std::filesystem::path(locator);
    identity.commit_hash = fingerprint_tree(identity.working_copy);
    return identity;
  }

  if (local_dir) {
    // verify the branch before cloning so the two failure modes stay distinct
    if (!branch.empty()) {
      std::string resolved = git_in(locator, {"rev-parse", "--verify", "--quiet",
                                              "refs/heads/" + branch});
      if (resolved.empty()) {
        throw BranchNotFound("branch '" + branch + "' not present in " + locator);
      }
    }
  }

  auto destination = workdir / ("checkout_" + sanitized_name(locator) +
                                (branch.empty() ? "" : "_" + branch));
  std::filesystem::remove_all(destination, ec);
  std::filesystem::create_directories(workdir, ec);

  std::vector<std::string> argv{"git", "clone", "--quiet", "--depth", "1"};
  if (!branch.empty()) {
    argv.push_back("--branch");
    argv.push_back(branch);
  }
  argv.push_back(locator);
  argv.push_back(destination.string());
  auto result = detail::run_command(argv);
  if (!result.ok()) {
    if (detail::contains(result.err, "Remote branch") &&
        detail::contains(result.err, "not found")) {
      throw BranchNotFound("branch '" + branch + "' not present in " + locator);
    }
    throw CloneFailed("cannot clone " + locator + ": " +
                      std::string(detail::trim(result.err)).substr(0, 300));
  }

  identity.working_copy = destination;
  identity.commit_hash = git_in(destination, {"rev-parse", "HEAD"});
  if (!is_hex40(identity.commit_hash)) {
    throw CloneFailed("cannot resolve HEAD of " + destination.string());
  }
  return identity;
}

}  // namespace agone::miner
