// Copyright 2026 The overflow-probe Authors.
// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"
#include "json.hpp"
#include "overflow/error.hpp"
#include "overflow/labeling.hpp"

#include <regex>
#include <thread>

namespace overflow {

namespace {

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

ParsedUrl parse_url(const std::string& url) {
  static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) throw ConfigError("judge url must be http(s)://host[:port][/path], got '" + url + "'");
  return {m[1].str(), m[2].matched ? m[2].str() : std::string("/")};
}

}  // namespace

bool judge_external(const JudgeEndpoint& endpoint, std::string_view question,
                    const std::vector<std::string>& answers, std::string_view prediction) {
  const ParsedUrl url = parse_url(endpoint.url);
  const nlohmann::json body = {
      {"question", std::string(question)}, {"reference_answers", answers}, {"prediction", std::string(prediction)}};
  const std::string payload = body.dump();

  const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::duration<double>(endpoint.timeout_s));
  auto backoff = endpoint.initial_backoff;
  std::string last_failure = "no attempt made";

  for (int attempt = 1; attempt <= endpoint.attempts; ++attempt) {
    httplib::Client cli(url.origin);
    cli.set_connection_timeout(timeout);
    cli.set_read_timeout(timeout);
    cli.set_write_timeout(timeout);
    auto res = cli.Post(url.path, payload, "application/json");
    if (!res) {
      last_failure = "transport error: " + httplib::to_string(res.error());
    } else if (res->status != 200) {
      last_failure = "HTTP status " + std::to_string(res->status);
    } else {
      nlohmann::json reply;
      try {
        reply = nlohmann::json::parse(res->body);
      } catch (const nlohmann::json::exception&) {
        throw JudgeProtocolError("judge reply is not JSON");
      }
      if (!reply.is_object() || !reply.contains("correct") || !reply["correct"].is_boolean()) {
        throw JudgeProtocolError("judge reply lacks boolean field 'correct': " + res->body);
      }
      return reply["correct"].get<bool>();
    }
    if (attempt < endpoint.attempts) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
  throw JudgeUnavailableError("judge at " + endpoint.url + " unavailable after " + std::to_string(endpoint.attempts) +
                              " attempts (" + last_failure + ")");
}

}  // namespace overflow
