#include "seqlab/annotation.hpp"

#include <cctype>
#include <optional>
#include <sstream>

namespace seqlab {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool legal_label_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_';
}

struct Lexeme {
  enum class Kind { Word, Open, Close } kind;
  std::string text;  // word text, or the tag's label
};

// Recognizes "</?label>" starting at text[pos]; returns the label span or
// nothing when the text is not tag-shaped there.
struct TagMatch {
  bool closing = false;
  std::string label;
  std::size_t length = 0;  // characters consumed, '<' through '>'
};

std::optional<TagMatch> match_tag(std::string_view text, std::size_t pos) {
  std::size_t i = pos + 1;  // skip '<'
  TagMatch m;
  if (i < text.size() && text[i] == '/') {
    m.closing = true;
    ++i;
  }
  std::size_t label_start = i;
  while (i < text.size() && legal_label_char(text[i])) ++i;
  if (i == label_start || i >= text.size() || text[i] != '>') return std::nullopt;
  m.label = std::string(text.substr(label_start, i - label_start));
  m.length = i + 1 - pos;
  return m;
}

// Splits into words and tag markers. Markers attached to adjacent words are
// accepted and lifted out; a '<' that does not start a well-formed tag is an
// ordinary word character.
std::vector<Lexeme> lex(std::string_view text, const TagSchema& schema) {
  std::vector<Lexeme> out;
  std::string word;
  auto flush_word = [&] {
    if (!word.empty()) {
      out.push_back({Lexeme::Kind::Word, word});
      word.clear();
    }
  };
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (is_space(c)) {
      flush_word();
      ++i;
      continue;
    }
    if (c == '<') {
      if (auto tag = match_tag(text, i)) {
        if (!schema.has_label(tag->label))
          throw UnknownTag("unknown tag <" + std::string(tag->closing ? "/" : "") + tag->label +
                           "> for schema '" + schema.name() + "'");
        flush_word();
        out.push_back({tag->closing ? Lexeme::Kind::Close : Lexeme::Kind::Open, tag->label});
        i += tag->length;
        continue;
      }
    }
    word.push_back(c);
    ++i;
  }
  flush_word();
  return out;
}

}  // namespace

std::string serialize(const TaggedSentence& ts, const TagSchema& schema) {
  validate_sentence(ts, schema);
  std::ostringstream out;
  std::size_t span_idx = 0;
  bool first = true;
  auto emit = [&](const std::string& token) {
    if (!first) out << ' ';
    out << token;
    first = false;
  };
  for (std::size_t w = 0; w <= ts.words.size(); ++w) {
    if (span_idx < ts.spans.size() && ts.spans[span_idx].end == w) {
      emit(schema.close_marker(ts.spans[span_idx].label));
      ++span_idx;
    }
    if (w == ts.words.size()) break;
    if (span_idx < ts.spans.size() && ts.spans[span_idx].start == w)
      emit(schema.open_marker(ts.spans[span_idx].label));
    emit(ts.words[w]);
  }
  return out.str();
}

TaggedSentence parse(std::string_view text, const TagSchema& schema,
                     const std::vector<std::string>* source_words) {
  TaggedSentence ts;
  std::optional<Span> open;
  for (const auto& lx : lex(text, schema)) {
    switch (lx.kind) {
      case Lexeme::Kind::Word:
        ts.words.push_back(lx.text);
        break;
      case Lexeme::Kind::Open:
        if (open) throw NestedTag("<" + lx.text + "> opened inside <" + open->label + ">");
        open = Span{ts.words.size(), 0, lx.text};
        break;
      case Lexeme::Kind::Close:
        if (!open) throw UnbalancedTag("</" + lx.text + "> without a matching open tag");
        if (open->label != lx.text)
          throw UnbalancedTag("</" + lx.text + "> closes <" + open->label + ">");
        if (ts.words.size() == open->start) throw EmptySpan("<" + lx.text + "> spans no words");
        open->end = ts.words.size();
        ts.spans.push_back(*open);
        open.reset();
        break;
    }
  }
  if (open) throw UnbalancedTag("<" + open->label + "> never closed");
  if (source_words && ts.words != *source_words) {
    std::ostringstream msg;
    msg << "parsed words differ from source (" << ts.words.size() << " vs "
        << source_words->size() << " words)";
    throw WordMismatch(msg.str());
  }
  return ts;
}

std::vector<std::string> to_bio(const TaggedSentence& ts) {
  std::vector<std::string> bio(ts.words.size(), "O");
  for (const auto& span : ts.spans) {
    bio[span.start] = "B-" + span.label;
    for (std::size_t w = span.start + 1; w < span.end; ++w) bio[w] = "I-" + span.label;
  }
  return bio;
}

TaggedSentence from_bio(const std::vector<std::string>& words,
                        const std::vector<std::string>& bio_labels, const TagSchema& schema) {
  if (words.size() != bio_labels.size()) {
    std::ostringstream msg;
    msg << "got " << words.size() << " words but " << bio_labels.size() << " labels";
    throw LengthMismatch(msg.str());
  }
  TaggedSentence ts;
  ts.words = words;
  std::optional<Span> open;
  auto flush = [&](std::size_t end) {
    if (open) {
      open->end = end;
      ts.spans.push_back(*open);
      open.reset();
    }
  };
  for (std::size_t i = 0; i < bio_labels.size(); ++i) {
    const std::string& tag = bio_labels[i];
    if (tag == "O") {
      flush(i);
      continue;
    }
    if (tag.size() < 3 || (tag[0] != 'B' && tag[0] != 'I') || tag[1] != '-')
      throw UnknownLabel("malformed BIO tag '" + tag + "'", i);
    std::string label = tag.substr(2);
    if (!schema.has_label(label))
      throw UnknownLabel("label '" + label + "' not in schema '" + schema.name() + "'", i);
    if (tag[0] == 'B') {
      flush(i);
      open = Span{i, 0, label};
    } else {
      if (!open || open->label != label)
        throw DanglingInside("I-" + label + " does not continue a span", i);
    }
  }
  flush(words.size());
  return ts;
}

}  // namespace seqlab
