#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "seqlab/types.hpp"

namespace seqlab {

struct DegenerateInput : Error {
  using Error::Error;
};
struct SentinelMismatch : Error {
  using Error::Error;
};
struct EmptyShard : Error {
  using Error::Error;
};
struct IndivisibleBudget : Error {
  using Error::Error;
};

inline constexpr TokenId sentinel_id(std::size_t index) {
  return kSentinelIdBase + static_cast<TokenId>(index);
}
inline constexpr bool is_sentinel(TokenId id) { return id >= kSentinelIdBase; }
inline constexpr std::size_t sentinel_index(TokenId id) {
  return static_cast<std::size_t>(id - kSentinelIdBase);
}

// Span-corrupted input/target pair. Source holds the unmasked tokens with
// sentinel k at the k-th masked span; target holds sentinel k, span k's
// tokens, ..., closed by one terminal sentinel.
struct CorruptionExample {
  std::vector<TokenId> source;
  std::vector<TokenId> target;
};

/// Masks round(len * noise_density) tokens (halves round down) as contiguous,
/// non-adjacent spans, about mean_span_length tokens each, placed by a
/// seed-deterministic uniform partition.
CorruptionExample corrupt_span(const std::vector<TokenId>& tokens, double noise_density = 0.15,
                               std::size_t mean_span_length = 3, std::uint64_t rng_seed = 0);

/// Exact inverse of corrupt_span. Throws SentinelMismatch when the sentinel
/// structure of source and target disagrees.
std::vector<TokenId> reconstruct(const std::vector<TokenId>& source,
                                 const std::vector<TokenId>& target);

struct CorpusShard {
  std::string language;
  std::vector<std::string> documents;
  std::uint64_t word_count = 0;  // whitespace-token count of the stream
};

CorpusShard make_shard(std::string language, std::vector<std::string> documents);

// Shard manifest: JSON Lines {"language": string, "path": string}; each
// referenced file holds newline-delimited UTF-8 documents. Relative paths
// resolve against the manifest's directory.
std::vector<CorpusShard> load_shard_manifest(const std::string& manifest_path);

struct SampledDocument {
  std::string language;
  std::string text;
};

/// Draws `count` documents with replacement, shards weighted by
/// weight(language) * shard word count (oversampling is weight
/// multiplication, not duplication). Languages missing from `weights`
/// default to 1. Deterministic given the seed.
std::vector<SampledDocument> sample_mixture(const std::vector<CorpusShard>& shards,
                                            const std::map<std::string, double>& weights,
                                            std::uint64_t rng_seed, std::size_t count);

struct PackedBatches {
  std::vector<std::vector<std::vector<TokenId>>> steps;  // step -> sequence -> tokens
  std::size_t sequences_per_step = 0;
  std::size_t pad_count = 0;  // pad tokens appended to the final sequence
};

/// Cuts a token stream into fixed-length sequences grouped into training
/// steps of tokens_per_step / sequence_length sequences. Only the final
/// sequence is padded (with kPadId).
PackedBatches pack(const std::vector<TokenId>& stream, std::size_t sequence_length,
                   std::size_t tokens_per_step);

/// Whitespace word counts summed per language.
std::map<std::string, std::uint64_t> corpus_stats(const std::vector<CorpusShard>& shards);

// Pre-training settings. The optimizer/schedule fields are provenance only;
// no training happens here.
struct PretrainConfig {
  std::size_t sequence_length = 1024;
  std::size_t tokens_per_step = 65536;
  std::size_t epochs = 1;
  double noise_density = 0.15;
  std::size_t mean_span_length = 3;
  std::map<std::string, double> mixture_weights;
  std::string optimizer = "adafactor";
  double learning_rate = 0.001;
  std::string scheduler = "constant";

  static PretrainConfig large() { return {}; }
  static PretrainConfig xl() {
    PretrainConfig c;
    c.sequence_length = 480;
    c.tokens_per_step = 30720;
    return c;
  }
};

}  // namespace seqlab
