#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "seqlab/schema.hpp"
#include "seqlab/tokenizer.hpp"
#include "seqlab/types.hpp"

namespace seqlab {

struct FinishedState : Error {
  using Error::Error;
};
struct IllegalAction : Error {
  using Error::Error;
};
struct Overflow : Error {
  using Error::Error;
};
struct TooManyPaths : Error {
  using Error::Error;
};

// One edge of the constraint automaton. label is the schema label index and
// is meaningful for OpenTag only. The ordering (EmitSubtoken < OpenTag in
// schema order < CloseTag < EmitEos) is the global tie-break for
// equal-score hypotheses.
struct Action {
  enum class Kind : std::uint8_t { EmitSubtoken = 0, OpenTag = 1, CloseTag = 2, EmitEos = 3 };

  Kind kind = Kind::EmitSubtoken;
  std::int32_t label = -1;

  static Action emit_subtoken() { return {Kind::EmitSubtoken, -1}; }
  static Action open_tag(std::int32_t label) { return {Kind::OpenTag, label}; }
  static Action close_tag() { return {Kind::CloseTag, -1}; }
  static Action emit_eos() { return {Kind::EmitEos, -1}; }

  auto operator<=>(const Action&) const = default;
};

struct OpenSpan {
  std::int32_t label = -1;   // schema label index
  std::size_t start = 0;     // word index where the span opened

  auto operator<=>(const OpenSpan&) const = default;
};

// Automaton state while generating an annotated copy of the input. Tags are
// permitted only at word boundaries (sub_off == 0).
struct DecodeState {
  std::size_t word_pos = 0;
  std::size_t sub_off = 0;
  std::optional<OpenSpan> open;
  bool finished = false;

  bool at_word_boundary() const { return sub_off == 0; }
  bool operator==(const DecodeState&) const = default;
};

/// Legal next actions with their token ids, in canonical action order.
/// The returned token ids are pairwise distinct. Throws FinishedState.
std::vector<std::pair<Action, TokenId>> allowed_actions(const DecodeState& state,
                                                        const std::vector<std::string>& input_words,
                                                        const TagSchema& schema,
                                                        const Tokenizer& tokenizer);

/// Applies one action; throws IllegalAction if it is not legal in `state`.
DecodeState step(const DecodeState& state, const Action& action,
                 const std::vector<std::string>& input_words, const Tokenizer& tokenizer);

/// Number of accepting word-level action sequences for a sentence of n words
/// under num_labels labels: f(0)=1, f(n) = f(n-1) + L * sum_{l=1..n} f(n-l).
/// Throws Overflow when the count exceeds uint64.
std::uint64_t count_paths(std::size_t n, std::size_t num_labels);

/// Every valid annotation of the input, one per accepting path. Throws
/// TooManyPaths when count_paths(n, |labels|) exceeds `limit`.
std::vector<TaggedSentence> enumerate_annotations(const std::vector<std::string>& input_words,
                                                  const TagSchema& schema, std::uint64_t limit);

/// The unique token-level action sequence generating `ts` (EmitEos included).
std::vector<Action> annotation_actions(const TaggedSentence& ts, const TagSchema& schema,
                                       const Tokenizer& tokenizer);

/// Token ids emitted along annotation_actions(ts), validated by replay.
std::vector<TokenId> annotation_token_ids(const TaggedSentence& ts, const TagSchema& schema,
                                          const Tokenizer& tokenizer);

}  // namespace seqlab
