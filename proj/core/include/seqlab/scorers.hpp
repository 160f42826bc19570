#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "seqlab/schema.hpp"
#include "seqlab/tokenizer.hpp"
#include "seqlab/types.hpp"

namespace seqlab {

class ScorerError : public Error {
 public:
  using Error::Error;
};
struct Timeout : ScorerError {
  using ScorerError::ScorerError;
};
struct MalformedResponse : ScorerError {
  using ScorerError::ScorerError;
};
struct HttpStatusError : ScorerError {
  explicit HttpStatusError(const std::string& msg, int status) : ScorerError(msg), status(status) {}
  int status;
};
struct EmptyCorpus : ScorerError {
  using ScorerError::ScorerError;
};

struct ScoreRequest {
  std::string conditioning;       // input text, possibly label-prefixed
  std::vector<TokenId> prefix;    // token ids emitted so far
  std::vector<TokenId> candidates;  // distinct, non-empty
};

struct ScoreResponse {
  std::unordered_map<TokenId, double> logprobs;  // covers exactly the candidates
};

/// Next-token log-probability source. Implementations are pure given
/// (conditioning, prefix, candidates) and read-only after construction.
class Scorer {
 public:
  virtual ~Scorer() = default;

  virtual ScoreResponse score(const ScoreRequest& request) const = 0;

  // True when scores are a probability distribution over the candidate set
  // (all values <= 0, exp-sum == 1).
  virtual bool normalized() const { return false; }
  virtual bool concurrent_safe() const { return true; }
};

using ScorerPtr = std::unique_ptr<Scorer>;

// 64-bit FNV-1a over a token id sequence; the table-scorer key.
std::uint64_t prefix_hash(std::span<const TokenId> prefix);

/// log(1/|candidates|) for every candidate.
ScorerPtr uniform_scorer();

/// Lookup of (prefix_hash, token) -> logprob with a fallback default.
struct TableEntry {
  std::uint64_t prefix_hash = 0;
  TokenId token = 0;
  double logprob = 0.0;
};
ScorerPtr table_scorer(std::vector<TableEntry> entries, double default_logprob);

/// A table whose entries are a deterministic pseudo-random function of
/// (seed, prefix_hash, token), uniform in [lo, hi]. Same seed, same table.
ScorerPtr random_table_scorer(std::uint64_t seed, double lo = -8.0, double hi = 0.0);

/// Assigns logprob 0 to the next token of the gold annotation's unique path
/// and -margin to everything else; off the gold path every candidate gets
/// -margin.
ScorerPtr gold_scorer(const TaggedSentence& gold, const TagSchema& schema,
                      const Tokenizer& tokenizer, double margin = 10.0);

/// Add-alpha smoothed conditional model over word-level action symbols
/// (word emissions, tag opens/closes, EOS), trained on the corpus's
/// serialized action streams and renormalized over the allowed candidate set
/// at query time. Tokenizer-independent by construction.
ScorerPtr ngram_scorer_train(const std::vector<TaggedSentence>& corpus, const TagSchema& schema,
                             std::shared_ptr<const Tokenizer> tokenizer, std::size_t order = 3,
                             double alpha = 0.1);

/// Client for the remote scoring service: HTTP POST {endpoint}/v1/score with
/// JSON {"conditioning","prefix","candidates"}, expecting 200 and
/// {"logprobs": {"<token id>": number, ...}}. Failed requests are retried up
/// to `retries` times.
ScorerPtr remote_scorer(std::string endpoint, int timeout_ms = 5000, int retries = 0);

}  // namespace seqlab
