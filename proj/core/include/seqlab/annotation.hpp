#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "seqlab/schema.hpp"
#include "seqlab/types.hpp"

namespace seqlab {

inline constexpr std::size_t kNoIndex = static_cast<std::size_t>(-1);

struct UnknownTag : Error {
  using Error::Error;
};
struct UnbalancedTag : Error {
  using Error::Error;
};
struct NestedTag : Error {
  using Error::Error;
};
struct EmptySpan : Error {
  using Error::Error;
};
// BIO label that is not O, B-<label> or I-<label> of the schema.
struct UnknownLabel : Error {
  explicit UnknownLabel(const std::string& msg, std::size_t index = kNoIndex)
      : Error(msg), index(index) {}
  std::size_t index;
};
// I-<label> without a preceding B-/I- of the same label.
struct DanglingInside : Error {
  explicit DanglingInside(const std::string& msg, std::size_t index = kNoIndex)
      : Error(msg), index(index) {}
  std::size_t index;
};

/// Renders a sentence as tagged text: words and markers separated by single
/// spaces, the open marker immediately before a span's first word and the
/// close marker immediately after its last. parse(serialize(ts)) == ts.
std::string serialize(const TaggedSentence& ts, const TagSchema& schema);

/// Inverse of serialize. Also accepts markers attached to adjacent words
/// ("<Disease>dilated") and normalizes them to boundary positions. When
/// source_words is given, the parsed words must equal it exactly
/// (WordMismatch otherwise).
TaggedSentence parse(std::string_view text, const TagSchema& schema,
                     const std::vector<std::string>* source_words = nullptr);

/// Per-word BIO labels: B-L at a span start, I-L inside, O elsewhere.
std::vector<std::string> to_bio(const TaggedSentence& ts);

/// Inverse of to_bio.
TaggedSentence from_bio(const std::vector<std::string>& words,
                        const std::vector<std::string>& bio_labels,
                        const TagSchema& schema);

}  // namespace seqlab
