#include "seqlab/pretrain.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

namespace seqlab {

namespace {

// Halves round down: round_half_down(0.5) == 0, round_half_down(1.5) == 1.
std::size_t round_half_down(double x) {
  return static_cast<std::size_t>(std::ceil(x - 0.5));
}

double unit_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Deterministic bounded draw (modulo; bias is irrelevant at these scales).
std::size_t rand_below(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(n));
}

// k distinct values from {1..n-1} (Floyd's sampling), sorted.
std::vector<std::size_t> sample_cuts(std::mt19937_64& rng, std::size_t n, std::size_t k) {
  std::set<std::size_t> cuts;
  for (std::size_t j = n - k; j < n; ++j) {
    std::size_t t = 1 + rand_below(rng, j);
    if (!cuts.insert(t).second) cuts.insert(j);
  }
  return {cuts.begin(), cuts.end()};
}

std::uint64_t count_words(const std::string& text) {
  std::uint64_t count = 0;
  bool in_word = false;
  for (char c : text) {
    bool space = c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
    if (!space && !in_word) ++count;
    in_word = !space;
  }
  return count;
}

}  // namespace

CorruptionExample corrupt_span(const std::vector<TokenId>& tokens, double noise_density,
                               std::size_t mean_span_length, std::uint64_t rng_seed) {
  if (tokens.empty()) throw DegenerateInput("cannot corrupt an empty token sequence");
  if (noise_density < 0.0 || noise_density >= 1.0)
    throw Error("noise_density must be in [0, 1)");
  if (mean_span_length < 1) throw Error("mean_span_length must be >= 1");
  for (TokenId id : tokens)
    if (is_sentinel(id)) throw Error("input token collides with the sentinel id range");

  const std::size_t len = tokens.size();
  const std::size_t num_masked = round_half_down(static_cast<double>(len) * noise_density);

  CorruptionExample example;
  if (num_masked == 0) {
    example.source = tokens;
    example.target = {sentinel_id(0)};
    return example;
  }

  std::mt19937_64 rng(rng_seed);
  const std::size_t num_unmasked = len - num_masked;
  std::size_t num_spans =
      round_half_down(static_cast<double>(num_masked) / static_cast<double>(mean_span_length));
  num_spans = std::clamp<std::size_t>(num_spans, 1, std::min(num_masked, num_unmasked + 1));

  // Span lengths: a uniform composition of num_masked into num_spans parts.
  std::vector<std::size_t> span_lengths;
  if (num_spans == 1) {
    span_lengths.push_back(num_masked);
  } else {
    auto cuts = sample_cuts(rng, num_masked, num_spans - 1);
    std::size_t prev = 0;
    for (std::size_t cut : cuts) {
      span_lengths.push_back(cut - prev);
      prev = cut;
    }
    span_lengths.push_back(num_masked - prev);
  }

  // Gaps: interior gaps get one mandatory token so spans never merge; the
  // leftover unmasked tokens are spread uniformly over the s+1 slots.
  const std::size_t spare = num_unmasked - (num_spans - 1);
  std::vector<std::size_t> gaps(num_spans + 1, 0);
  for (std::size_t g = 1; g < num_spans; ++g) gaps[g] = 1;
  std::vector<std::size_t> cuts(num_spans);
  for (auto& c : cuts) c = rand_below(rng, spare + 1);
  std::sort(cuts.begin(), cuts.end());
  std::size_t prev = 0;
  for (std::size_t g = 0; g < num_spans; ++g) {
    gaps[g] += cuts[g] - prev;
    prev = cuts[g];
  }
  gaps[num_spans] += spare - prev;

  std::size_t pos = 0;
  for (std::size_t k = 0; k < num_spans; ++k) {
    for (std::size_t i = 0; i < gaps[k]; ++i) example.source.push_back(tokens[pos++]);
    example.source.push_back(sentinel_id(k));
    example.target.push_back(sentinel_id(k));
    for (std::size_t i = 0; i < span_lengths[k]; ++i) example.target.push_back(tokens[pos++]);
  }
  for (std::size_t i = 0; i < gaps[num_spans]; ++i) example.source.push_back(tokens[pos++]);
  example.target.push_back(sentinel_id(num_spans));
  return example;
}

std::vector<TokenId> reconstruct(const std::vector<TokenId>& source,
                                 const std::vector<TokenId>& target) {
  // Cut the target into per-sentinel segments and check the sentinel chain.
  if (target.empty() || !is_sentinel(target.front()) || sentinel_index(target.front()) != 0)
    throw SentinelMismatch("target must start with the first sentinel");
  std::vector<std::vector<TokenId>> segments;  // tokens following sentinel k
  std::size_t expected = 0;
  for (TokenId id : target) {
    if (is_sentinel(id)) {
      if (sentinel_index(id) != expected)
        throw SentinelMismatch("target sentinels out of order at index " +
                               std::to_string(sentinel_index(id)));
      ++expected;
      segments.emplace_back();
    } else {
      segments.back().push_back(id);
    }
  }
  if (!segments.back().empty())
    throw SentinelMismatch("tokens after the terminal sentinel");
  const std::size_t num_spans = segments.size() - 1;

  std::vector<TokenId> original;
  std::size_t next_span = 0;
  for (TokenId id : source) {
    if (is_sentinel(id)) {
      if (sentinel_index(id) != next_span)
        throw SentinelMismatch("source sentinels out of order");
      if (next_span >= num_spans) throw SentinelMismatch("source has more sentinels than target");
      for (TokenId t : segments[next_span]) original.push_back(t);
      ++next_span;
    } else {
      original.push_back(id);
    }
  }
  if (next_span != num_spans)
    throw SentinelMismatch("target has more sentinels than source");
  return original;
}

CorpusShard make_shard(std::string language, std::vector<std::string> documents) {
  CorpusShard shard;
  shard.language = std::move(language);
  shard.documents = std::move(documents);
  for (const auto& doc : shard.documents) shard.word_count += count_words(doc);
  return shard;
}

std::vector<CorpusShard> load_shard_manifest(const std::string& manifest_path) {
  std::ifstream in(manifest_path, std::ios::binary);
  if (!in) throw Error("cannot open manifest: " + manifest_path);
  const auto base = std::filesystem::path(manifest_path).parent_path();

  std::vector<CorpusShard> shards;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error("manifest line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("language") || !doc.contains("path"))
      throw Error("manifest line " + std::to_string(line_no) +
                  ": expected {\"language\", \"path\"}");
    auto path = std::filesystem::path(doc["path"].get<std::string>());
    if (path.is_relative()) path = base / path;
    std::ifstream docs_in(path, std::ios::binary);
    if (!docs_in) throw Error("cannot open shard file: " + path.string());
    std::vector<std::string> documents;
    std::string doc_line;
    while (std::getline(docs_in, doc_line))
      if (!doc_line.empty()) documents.push_back(doc_line);
    shards.push_back(make_shard(doc["language"].get<std::string>(), std::move(documents)));
  }
  return shards;
}

std::vector<SampledDocument> sample_mixture(const std::vector<CorpusShard>& shards,
                                            const std::map<std::string, double>& weights,
                                            std::uint64_t rng_seed, std::size_t count) {
  if (shards.empty()) throw EmptyShard("no shards to sample from");
  for (const auto& [language, weight] : weights)
    if (!(weight > 0)) throw Error("weight for '" + language + "' must be positive");

  std::vector<double> cumulative;
  double total = 0.0;
  for (const auto& shard : shards) {
    if (shard.documents.empty()) throw EmptyShard("shard '" + shard.language + "' has no documents");
    auto it = weights.find(shard.language);
    double weight = it == weights.end() ? 1.0 : it->second;
    total += weight * static_cast<double>(shard.word_count);
    cumulative.push_back(total);
  }
  if (!(total > 0)) throw EmptyShard("all shards have zero weighted word count");

  std::mt19937_64 rng(rng_seed);
  std::vector<SampledDocument> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    double r = unit_double(rng) * total;
    std::size_t shard_idx = static_cast<std::size_t>(
        std::lower_bound(cumulative.begin(), cumulative.end(), r) - cumulative.begin());
    if (shard_idx >= shards.size()) shard_idx = shards.size() - 1;
    const auto& shard = shards[shard_idx];
    const auto& doc = shard.documents[rand_below(rng, shard.documents.size())];
    out.push_back({shard.language, doc});
  }
  return out;
}

PackedBatches pack(const std::vector<TokenId>& stream, std::size_t sequence_length,
                   std::size_t tokens_per_step) {
  if (sequence_length < 1) throw Error("sequence_length must be >= 1");
  if (tokens_per_step % sequence_length != 0)
    throw IndivisibleBudget(std::to_string(tokens_per_step) + " tokens/step is not divisible by sequence length " +
                            std::to_string(sequence_length));
  PackedBatches batches;
  batches.sequences_per_step = tokens_per_step / sequence_length;

  std::size_t num_sequences = (stream.size() + sequence_length - 1) / sequence_length;
  for (std::size_t s = 0; s < num_sequences; ++s) {
    if (s % batches.sequences_per_step == 0) batches.steps.emplace_back();
    std::vector<TokenId> seq;
    seq.reserve(sequence_length);
    for (std::size_t i = s * sequence_length; i < (s + 1) * sequence_length; ++i) {
      if (i < stream.size()) {
        seq.push_back(stream[i]);
      } else {
        seq.push_back(kPadId);
        ++batches.pad_count;
      }
    }
    batches.steps.back().push_back(std::move(seq));
  }
  return batches;
}

std::map<std::string, std::uint64_t> corpus_stats(const std::vector<CorpusShard>& shards) {
  std::map<std::string, std::uint64_t> stats;
  for (const auto& shard : shards) {
    std::uint64_t words = 0;
    for (const auto& doc : shard.documents) words += count_words(doc);
    stats[shard.language] += words;
  }
  return stats;
}

}  // namespace seqlab
