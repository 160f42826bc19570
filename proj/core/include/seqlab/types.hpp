#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace seqlab {

using TokenId = std::int64_t;

// Fixed id layout. Ordinary (tokenizer-produced) ids, tag-marker ids and
// span-corruption sentinel ids live in disjoint ranges so that no masking or
// reconstruction step ever has to guess what an id means.
inline constexpr TokenId kPadId = 0;
inline constexpr TokenId kEosId = 1;
inline constexpr TokenId kOrdinaryIdBase = 1000;
inline constexpr TokenId kMarkerIdBase = 100'000'000;
inline constexpr TokenId kSentinelIdBase = 200'000'000;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LengthMismatch : Error {
  using Error::Error;
};

struct WordMismatch : Error {
  using Error::Error;
};

// Labeled word interval [start, end) of a sentence.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string label;

  auto operator<=>(const Span&) const = default;
};

// Words plus flat, disjoint, labeled spans. Spans are kept sorted by start;
// nesting and overlap are rejected wherever sentences are built or parsed.
struct TaggedSentence {
  std::vector<std::string> words;
  std::vector<Span> spans;

  bool operator==(const TaggedSentence&) const = default;
};

}  // namespace seqlab
