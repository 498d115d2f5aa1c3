// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#include "prefalign/metrics/external.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <httplib.h>
#include <nlohmann/json.hpp>
#include <thread>

#include "prefalign/error.hpp"

namespace prefalign::metrics {

namespace {

using nlohmann::json;

struct Endpoint {
  std::string scheme_host_port;
  std::string path;
};

Endpoint parse_endpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos || url.substr(0, scheme_end) != "http") {
    throw ParameterError("external scorer endpoint must be an http:// URL, got '" + url + "'");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  Endpoint ep;
  ep.scheme_host_port = url.substr(0, path_start);
  std::string prefix = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  ep.path = prefix + "/v1/score";
  return ep;
}

struct BatchOutcome {
  std::vector<double> scores;
  int retries = 0;
};

BatchOutcome post_batch(const ExternalOptions& options, const Endpoint& ep,
                        const std::string& metric_name, std::span<const ScoreRequest> batch) {
  json pairs = json::array();
  for (const auto& r : batch) {
    json p{{"source", r.source}, {"hypothesis", r.hypothesis}, {"reference", nullptr}};
    if (r.reference) p["reference"] = *r.reference;
    pairs.push_back(std::move(p));
  }
  const std::string body = json{{"metric", metric_name}, {"pairs", std::move(pairs)}}.dump();

  httplib::Client client(ep.scheme_host_port);
  const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::duration<double>(options.timeout_seconds));
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  BatchOutcome outcome;
  std::string last_failure;
  for (int attempt = 0;; ++attempt) {
    auto res = client.Post(ep.path, body, "application/json");
    if (res && res->status == 200) {
      json parsed;
      try {
        parsed = json::parse(res->body);
      } catch (const json::parse_error&) {
        throw ProtocolError("external scorer returned malformed JSON");
      }
      if (!parsed.is_object() || !parsed.contains("scores") || !parsed["scores"].is_array()) {
        throw ProtocolError("external scorer response lacks a 'scores' array");
      }
      const auto& arr = parsed["scores"];
      if (arr.size() != batch.size()) {
        throw ProtocolError("external scorer returned " + std::to_string(arr.size()) +
                            " scores for " + std::to_string(batch.size()) + " requests");
      }
      for (const auto& v : arr) {
        if (!v.is_number()) throw ProtocolError("external scorer returned a non-numeric score");
        const double s = v.get<double>();
        if (!std::isfinite(s) || s < options.lo || s > options.hi) {
          throw ProtocolError("external score " + std::to_string(s) + " outside [" +
                              std::to_string(options.lo) + ", " + std::to_string(options.hi) +
                              "]");
        }
        outcome.scores.push_back(s);
      }
      return outcome;
    }
    if (res && res->status >= 400 && res->status < 500) {
      throw ProtocolError("external scorer rejected request with status " +
                          std::to_string(res->status));
    }
    if (res && res->status < 500) {
      throw ProtocolError("unexpected status " + std::to_string(res->status));
    }
    last_failure = res ? "status " + std::to_string(res->status) : httplib::to_string(res.error());
    if (attempt >= options.max_retries) {
      throw TransportError("external scorer failed after " + std::to_string(attempt + 1) +
                           " attempts: " + last_failure);
    }
    ++outcome.retries;
    const double wait = options.initial_backoff_seconds * std::pow(2.0, attempt);
    std::this_thread::sleep_for(std::chrono::duration<double>(wait));
  }
}

}  // namespace

ExternalResult external_score_batch(const ExternalOptions& options, const std::string& metric_name,
                                    std::span<const ScoreRequest> requests) {
  if (requests.empty()) throw InputError("external_score_batch: no requests");
  if (options.max_batch == 0 || options.max_in_flight == 0) {
    throw ParameterError("max_batch and max_in_flight must be positive");
  }
  const Endpoint ep = parse_endpoint(options.endpoint);

  const std::size_t n_batches = (requests.size() + options.max_batch - 1) / options.max_batch;
  std::vector<BatchOutcome> outcomes(n_batches);
  std::vector<std::exception_ptr> errors(n_batches);
  auto run = [&](std::size_t b) {
    try {
      const std::size_t lo = b * options.max_batch;
      const std::size_t len = std::min(options.max_batch, requests.size() - lo);
      outcomes[b] = post_batch(options, ep, metric_name, requests.subspan(lo, len));
    } catch (...) {
      errors[b] = std::current_exception();
    }
  };
  for (std::size_t wave = 0; wave < n_batches; wave += options.max_in_flight) {
    const std::size_t end = std::min(n_batches, wave + options.max_in_flight);
    if (end - wave == 1) {
      run(wave);
    } else {
      std::vector<std::thread> threads;
      for (std::size_t b = wave; b < end; ++b) threads.emplace_back(run, b);
      for (auto& t : threads) t.join();
    }
    for (std::size_t b = wave; b < end; ++b) {
      if (errors[b]) std::rethrow_exception(errors[b]);
    }
  }

  ExternalResult result;
  result.scores.reserve(requests.size());
  for (auto& o : outcomes) {
    result.scores.insert(result.scores.end(), o.scores.begin(), o.scores.end());
    result.retries += o.retries;
  }
  return result;
}

ExternalScorer::ExternalScorer(std::string metric_name, ExternalOptions options)
    : id_{"ext:" + metric_name, options.needs_reference, true, options.lo, options.hi},
      remote_name_(std::move(metric_name)),
      options_(std::move(options)) {}

std::vector<double> ExternalScorer::score_batch(std::span<const ScoreRequest> requests) const {
  if (requests.empty()) return {};
  require_references(requests);
  return external_score_batch(options_, remote_name_, requests).scores;
}

}  // namespace prefalign::metrics
