#include "agone/detail/fs.hpp"
#include "agone/llm_gateway.hpp"

namespace agone::gateway {

std::string ReplayProvider::generate(const GenerationContext& context,
                                     const prompt::InstantiatedPrompt&) {
  auto path = root_ / context.model / context.prompt_name / (context.cut_fqn + ".txt");
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) {
    throw MissingReplayResponse(path.string());
  }
  return detail::read_file(path);
}

}  // namespace agone::gateway
