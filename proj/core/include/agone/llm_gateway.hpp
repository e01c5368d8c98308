#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "agone/errors.hpp"
#include "agone/prompt_engine.hpp"

// Sends instantiated prompts to any endpoint speaking the chat-completion
// wire format, cleans responses into test-class source, and places files in
// the project's test tree. Mock and replay providers support deterministic
// offline runs.
namespace agone::gateway {

AGONE_DEFINE_ERROR(ExtractionFailed);
AGONE_DEFINE_ERROR(PackageMissing);
AGONE_DEFINE_ERROR(WriteFailed);
AGONE_DEFINE_ERROR(Timeout);
AGONE_DEFINE_ERROR(MissingReplayResponse);

class ProviderError : public Error {
 public:
  ProviderError(int status, const std::string& body_excerpt)
      : Error("ProviderError",
              "provider returned status " + std::to_string(status) +
                  (body_excerpt.empty() ? "" : ": " + body_excerpt)),
        status_(status),
        body_excerpt_(body_excerpt) {}

  int status() const noexcept { return status_; }
  const std::string& body_excerpt() const noexcept { return body_excerpt_; }

 private:
  int status_;
  std::string body_excerpt_;
};

struct ProviderEndpoint {
  std::string base_url;
  std::string api_key_ref;  // name of the env var holding the key; the key
                            // itself is read at request time and never stored
  std::string model;
  std::chrono::seconds request_timeout{60};
  int max_retries = 3;
  std::chrono::milliseconds backoff_base{250};
};

// Transport abstraction; the retry policy is exercised against scripted
// transports in tests.
struct HttpRequestData {
  std::string url;
  std::string body;
  std::vector<std::pair<std::string, std::string>> headers;
  std::chrono::seconds timeout{60};
};

struct HttpResponseData {
  int status = 0;
  std::string body;
  bool transport_error = false;
  bool timed_out = false;
  std::string error;
};

using HttpTransport = std::function<HttpResponseData(const HttpRequestData&)>;
using SleepFn = std::function<void(std::chrono::milliseconds)>;

HttpTransport default_transport();
SleepFn default_sleep();

// POSTs {base_url}/chat/completions and returns choices[0].message.content.
// Transient failures (connection errors, timeouts, 408/429/5xx) retry with
// exponential backoff up to max_retries; other statuses raise ProviderError
// immediately.
std::string complete(const ProviderEndpoint& endpoint, const prompt::InstantiatedPrompt& prompt,
                     const HttpTransport& transport = default_transport(),
                     const SleepFn& sleep = default_sleep());

struct GenerationContext {
  std::string model;
  std::string prompt_name;
  std::string cut_fqn;
};

class Provider {
 public:
  virtual ~Provider() = default;
  virtual std::string generate(const GenerationContext& context,
                               const prompt::InstantiatedPrompt& prompt) = 0;
  virtual std::string name() const = 0;
};

class HttpProvider : public Provider {
 public:
  HttpProvider(ProviderEndpoint endpoint, HttpTransport transport = default_transport())
      : endpoint_(std::move(endpoint)), transport_(std::move(transport)) {}
  std::string generate(const GenerationContext&, const prompt::InstantiatedPrompt& p) override {
    return complete(endpoint_, p, transport_);
  }
  std::string name() const override { return "http"; }

 private:
  ProviderEndpoint endpoint_;
  HttpTransport transport_;
};

class MockProvider : public Provider {
 public:
  explicit MockProvider(std::function<std::string(const GenerationContext&)> reply)
      : reply_(std::move(reply)) {}
  explicit MockProvider(std::string canned)
      : reply_([canned = std::move(canned)](const GenerationContext&) { return canned; }) {}
  std::string generate(const GenerationContext& context,
                       const prompt::InstantiatedPrompt&) override {
    return reply_(context);
  }
  std::string name() const override { return "mock"; }

 private:
  std::function<std::string(const GenerationContext&)> reply_;
};

// Canned responses from {root}/{model}/{prompt_name}/{cut_fqn}.txt.
class ReplayProvider : public Provider {
 public:
  explicit ReplayProvider(std::filesystem::path root) : root_(std::move(root)) {}
  std::string generate(const GenerationContext& context,
                       const prompt::InstantiatedPrompt&) override;
  std::string name() const override { return "replay"; }

 private:
  std::filesystem::path root_;
};

// Cleans a raw model reply into compilable test-class source: fenced code
// blocks when present (java-tagged or untagged), otherwise the largest region
// starting at a package/import/type-declaration line. The result always
// parses to at least one top-level type.
std::string extract_test_source(const std::string& raw);

// Writes `source` at <test-root>/<package-dirs>/<TypeName>.java. Files the
// harness previously wrote there are overwritten; a pre-existing human file
// causes the generated class to be renamed with the _AgoneGen suffix and its
// declaration rewritten to match. Returns the absolute path written.
std::filesystem::path place_test_class(const std::filesystem::path& project_root,
                                       const std::string& source);

struct GenerationOutcome {
  std::string model;
  std::string prompt_name;
  std::string project;
  std::string cut_fqn;
  std::string raw_response;
  std::optional<std::string> extracted_source;
  std::optional<std::string> placed_path;  // project-relative
  std::string status;                      // ok | extraction_failed | provider_error
  std::int64_t latency_ms = 0;
  std::string error_detail;

  bool operator==(const GenerationOutcome&) const = default;
};

}  // namespace agone::gateway
