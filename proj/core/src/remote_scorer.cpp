#include <chrono>
#include <cmath>
#include <memory>
#include <semaphore>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "seqlab/scorers.hpp"

namespace seqlab {

namespace {

// Wire protocol: POST {endpoint}/v1/score
//   request  {"conditioning": string, "prefix": [int,...], "candidates": [int,...]}
//   response {"logprobs": {"<token id>": number, ...}}, HTTP 200.
class RemoteScorer final : public Scorer {
 public:
  RemoteScorer(std::string endpoint, int timeout_ms, int retries)
      : endpoint_(std::move(endpoint)), timeout_ms_(timeout_ms), retries_(retries) {
    if (endpoint_.empty()) throw ScorerError("remote scorer needs an endpoint URL");
    if (timeout_ms_ < 1) throw ScorerError("timeout must be positive");
    if (retries_ < 0) throw ScorerError("retries must be >= 0");
  }

  ScoreResponse score(const ScoreRequest& request) const override {
    if (request.candidates.empty()) throw ScorerError("no candidates to score");
    nlohmann::json body;
    body["conditioning"] = request.conditioning;
    body["prefix"] = request.prefix;
    body["candidates"] = request.candidates;
    const std::string payload = body.dump();

    in_flight_.acquire();
    struct Release {
      std::counting_semaphore<kMaxInFlight>& sem;
      ~Release() { sem.release(); }
    } release{in_flight_};

    std::string last_error;
    int last_status = -1;
    for (int attempt = 0; attempt <= retries_; ++attempt) {
      httplib::Client client(endpoint_);
      client.set_connection_timeout(std::chrono::milliseconds(timeout_ms_));
      client.set_read_timeout(std::chrono::milliseconds(timeout_ms_));
      client.set_write_timeout(std::chrono::milliseconds(timeout_ms_));

      auto result = client.Post("/v1/score", payload, "application/json");
      if (!result) {
        last_error = httplib::to_string(result.error());
        last_status = -1;
        continue;
      }
      if (result->status != 200) {
        last_status = result->status;
        last_error = "HTTP status " + std::to_string(result->status);
        continue;
      }
      return parse_response(result->body, request);
    }
    if (last_status > 0)
      throw HttpStatusError("scoring request failed: " + last_error, last_status);
    throw Timeout("scoring request failed: " + last_error);
  }

 private:
  static ScoreResponse parse_response(const std::string& body, const ScoreRequest& request) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
      throw MalformedResponse(std::string("response is not JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("logprobs") || !doc["logprobs"].is_object())
      throw MalformedResponse("response lacks a logprobs object");
    ScoreResponse response;
    for (const auto& [key, value] : doc["logprobs"].items()) {
      if (!value.is_number()) throw MalformedResponse("logprob for " + key + " is not a number");
      TokenId id = 0;
      try {
        id = std::stoll(key);
      } catch (const std::exception&) {
        throw MalformedResponse("logprobs key '" + key + "' is not a token id");
      }
      double lp = value.get<double>();
      if (!std::isfinite(lp)) throw MalformedResponse("logprob for " + key + " is not finite");
      response.logprobs[id] = lp;
    }
    for (TokenId id : request.candidates)
      if (!response.logprobs.count(id))
        throw MalformedResponse("response omitted candidate " + std::to_string(id));
    return response;
  }

  static constexpr int kMaxInFlight = 8;

  std::string endpoint_;
  int timeout_ms_;
  int retries_;
  mutable std::counting_semaphore<kMaxInFlight> in_flight_{kMaxInFlight};
};

}  // namespace

ScorerPtr remote_scorer(std::string endpoint, int timeout_ms, int retries) {
  return std::make_unique<RemoteScorer>(std::move(endpoint), timeout_ms, retries);
}

}  // namespace seqlab
