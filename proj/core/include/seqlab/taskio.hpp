#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "seqlab/schema.hpp"
#include "seqlab/types.hpp"

namespace seqlab {

struct ParseError : Error {
  explicit ParseError(const std::string& msg, std::size_t line = 0) : Error(msg), line(line) {}
  std::size_t line;  // 1-based; 0 when not tied to a line
};
struct MalformedJson : ParseError {
  using ParseError::ParseError;
};
struct MissingField : ParseError {
  using ParseError::ParseError;
};

struct QAItem {
  std::string question;
  std::vector<std::string> snippets;
  std::vector<std::string> ideal_answers;

  bool operator==(const QAItem&) const = default;
};

/// Multi-task input prefix: the open markers of all schema labels, in schema
/// order, prepended to the sentence.
std::string add_label_prefix(const std::vector<std::string>& words, const TagSchema& schema);

/// "question: {q} context: {s1} ... {sn}"; snippets are concatenated in input
/// order and internal whitespace (newlines included) collapses to single
/// spaces.
std::string build_qa_prompt(const QAItem& item);

// CoNLL file: two whitespace-separated columns (token, BIO tag), blank line
// between sentences. Errors carry 1-based line numbers.
std::vector<TaggedSentence> read_conll(const std::string& path, const TagSchema& schema);
void write_conll(const std::string& path, const std::vector<TaggedSentence>& sentences);

// Tagged-text file: one annotated sentence per line, UTF-8.
std::vector<TaggedSentence> read_tagged(const std::string& path, const TagSchema& schema);
void write_tagged(const std::string& path, const std::vector<TaggedSentence>& sentences,
                  const TagSchema& schema);

// QA file: JSON Lines {"question": string, "snippets": [string,...],
// "ideal_answers": [string,...]}; all fields required and non-empty.
std::vector<QAItem> read_qa_jsonl(const std::string& path);
void write_qa_jsonl(const std::string& path, const std::vector<QAItem>& items);

}  // namespace seqlab
