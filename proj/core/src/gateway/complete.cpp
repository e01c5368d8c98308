#include <cstdlib>
#include <thread>

#include <nlohmann/json.hpp>

#define CPPHTTPLIB_NO_EXCEPTIONS 0
#include <httplib.h>

#include "agone/llm_gateway.hpp"

namespace agone::gateway {

namespace {

using nlohmann::json;

bool is_transient_status(int status) {
  return status == 408 || status == 429 || status >= 500;
}

std::string excerpt(const std::string& body, std::size_t max_len = 200) {
  if (body.size() <= max_len) return body;
  return body.substr(0, max_len) + "...";
}

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path_prefix;
};

SplitUrl split_url(const std::string& base_url) {
  SplitUrl out;
  auto scheme_end = base_url.find("://");
  std::size_t path_start =
      scheme_end == std::string::npos ? base_url.find('/') : base_url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    out.origin = base_url;
  } else {
    out.origin = base_url.substr(0, path_start);
    out.path_prefix = base_url.substr(path_start);
  }
  while (!out.path_prefix.empty() && out.path_prefix.back() == '/') out.path_prefix.pop_back();
  return out;
}

}  // namespace

HttpTransport default_transport() {
  return [](const HttpRequestData& request) -> HttpResponseData {
    SplitUrl url = split_url(request.url.substr(0, request.url.find("/chat/completions")));
    httplib::Client client(url.origin);
    client.set_connection_timeout(static_cast<time_t>(request.timeout.count()), 0);
    client.set_read_timeout(static_cast<time_t>(request.timeout.count()), 0);
    httplib::Headers headers;
    for (const auto& [k, v] : request.headers) headers.emplace(k, v);
    auto result = client.Post(url.path_prefix + "/chat/completions", headers, request.body,
                              "application/json");
    HttpResponseData response;
    if (!result) {
      response.transport_error = true;
      response.timed_out = result.error() == httplib::Error::ConnectionTimeout ||
                           result.error() == httplib::Error::Read;
      response.error = httplib::to_string(result.error());
      return response;
    }
    response.status = result->status;
    response.body = result->body;
    return response;
  };
}

SleepFn default_sleep() {
  return [](std::chrono::milliseconds delay) { std::this_thread::sleep_for(delay); };
}

std::string complete(const ProviderEndpoint& endpoint, const prompt::InstantiatedPrompt& prompt,
                     const HttpTransport& transport, const SleepFn& sleep) {
  json body;
  body["model"] = endpoint.model.empty() ? prompt.model : endpoint.model;
  body["temperature"] = prompt.temperature;
  body["messages"] = json::array();
  for (const auto& message : prompt.messages) {
    body["messages"].push_back({{"role", message.role}, {"content", message.content}});
  }

  HttpRequestData request;
  request.url = endpoint.base_url + "/chat/completions";
  request.body = body.dump();
  request.timeout = endpoint.request_timeout;
  request.headers.emplace_back("Accept", "application/json");
  if (!endpoint.api_key_ref.empty()) {
    // the key is read here and nowhere else; it never lands in any structure
    if (const char* key = std::getenv(endpoint.api_key_ref.c_str())) {
      request.headers.emplace_back("Authorization", std::string("Bearer ") + key);
    }
  }

  int attempt = 0;
  while (true) {
    HttpResponseData response = transport(request);

    if (response.transport_error) {
      if (attempt < endpoint.max_retries) {
        sleep(endpoint.backoff_base * (1 << attempt));
        ++attempt;
        continue;
      }
      if (response.timed_out) {
        throw gateway::Timeout("no response within " +
                               std::to_string(endpoint.request_timeout.count()) + "s: " +
                               response.error);
      }
      throw ProviderError(0, response.error);
    }

    if (response.status >= 200 && response.status < 300) {
      try {
        auto payload = json::parse(response.body);
        return payload.at("choices").at(0).at("message").at("content").get<std::string>();
      } catch (const json::exception& e) {
        throw ProviderError(response.status,
                            std::string("malformed completion body: ") + e.what());
      }
    }

    if (is_transient_status(response.status) && attempt < endpoint.max_retries) {
      sleep(endpoint.backoff_base * (1 << attempt));
      ++attempt;
      continue;
    }
    throw ProviderError(response.status, excerpt(response.body));
  }
}

}  // namespace agone::gateway
