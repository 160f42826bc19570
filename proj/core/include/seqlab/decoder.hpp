#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "seqlab/automaton.hpp"
#include "seqlab/schema.hpp"
#include "seqlab/scorers.hpp"
#include "seqlab/tokenizer.hpp"
#include "seqlab/types.hpp"

namespace seqlab {

struct DecodeResult {
  TaggedSentence tagged;   // words always equal the input words
  double logprob = 0.0;
  std::size_t steps = 0;   // emitted tokens, EOS included
};

struct DecodeOptions {
  std::size_t beam_width = 4;
  // Conditioning text passed to the scorer; defaults to the input words
  // joined by single spaces.
  std::optional<std::string> conditioning;
};

/// Constrained beam search: every hypothesis is expanded over its full
/// allowed-action set, the pool is truncated to beam_width globally, and
/// finished hypotheses accumulate in a separate pool. Equal scores are broken
/// toward the action-order-minimal sequence. The result parses and preserves
/// the input words by construction.
DecodeResult decode(const std::vector<std::string>& input_words, const TagSchema& schema,
                    const Scorer& scorer, const Tokenizer& tokenizer,
                    const DecodeOptions& options = {});

DecodeResult decode(const std::vector<std::string>& input_words, const TagSchema& schema,
                    const Scorer& scorer, const Tokenizer& tokenizer, std::size_t beam_width);

/// Verification oracle: scores every annotation from enumerate_annotations
/// along its unique path and returns the maximum under the same tie-break as
/// decode. Throws TooManyPaths when count_paths exceeds `limit`.
DecodeResult exhaustive_argmax(const std::vector<std::string>& input_words, const TagSchema& schema,
                               const Scorer& scorer, const Tokenizer& tokenizer,
                               std::uint64_t limit, const DecodeOptions& options = {});

struct BatchEntry {
  std::optional<DecodeResult> result;
  std::string error;  // non-empty when the sentence failed

  bool ok() const { return result.has_value(); }
};

/// decode over a batch; output order matches input order and results equal
/// sequential decode. Per-sentence errors are collected, the batch continues.
std::vector<BatchEntry> decode_batch(const std::vector<std::vector<std::string>>& sentences,
                                     const TagSchema& schema, const Scorer& scorer,
                                     const Tokenizer& tokenizer, std::size_t beam_width = 4,
                                     std::size_t parallelism = 1);

}  // namespace seqlab
