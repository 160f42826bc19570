#include "seqlab/taskio.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "seqlab/annotation.hpp"

namespace seqlab {

namespace {

std::string collapse_whitespace(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::ostringstream out;
  std::string token;
  bool first = true;
  while (in >> token) {
    if (!first) out << ' ';
    out << token;
    first = false;
  }
  return out.str();
}

}  // namespace

std::string add_label_prefix(const std::vector<std::string>& words, const TagSchema& schema) {
  std::ostringstream out;
  bool first = true;
  for (const auto& label : schema.labels()) {
    if (!first) out << ' ';
    out << schema.open_marker(label);
    first = false;
  }
  for (const auto& word : words) {
    if (!first) out << ' ';
    out << word;
    first = false;
  }
  return out.str();
}

std::string build_qa_prompt(const QAItem& item) {
  if (item.question.empty()) throw Error("QA item has an empty question");
  if (item.snippets.empty()) throw Error("QA item has no snippets");
  std::ostringstream out;
  out << "question: " << collapse_whitespace(item.question) << " context:";
  for (const auto& snippet : item.snippets) out << ' ' << collapse_whitespace(snippet);
  return out.str();
}

std::vector<TaggedSentence> read_conll(const std::string& path, const TagSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open CoNLL file: " + path);

  std::vector<TaggedSentence> sentences;
  std::vector<std::string> words, tags;
  std::vector<std::size_t> lines;  // file line of each word
  std::string line;
  std::size_t line_no = 0;

  auto flush = [&] {
    if (words.empty()) return;
    try {
      sentences.push_back(from_bio(words, tags, schema));
    } catch (const DanglingInside& e) {
      std::size_t at = e.index < lines.size() ? lines[e.index] : line_no;
      throw DanglingInside(std::string(e.what()) + " (line " + std::to_string(at) + ")", at);
    } catch (const UnknownLabel& e) {
      std::size_t at = e.index < lines.size() ? lines[e.index] : line_no;
      throw ParseError(std::string(e.what()) + " (line " + std::to_string(at) + ")", at);
    }
    words.clear();
    tags.clear();
    lines.clear();
  };

  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string token, tag, extra;
    if (!(fields >> token)) {
      flush();
      continue;
    }
    if (!(fields >> tag) || (fields >> extra))
      throw ParseError("line " + std::to_string(line_no) + ": expected 'token tag'", line_no);
    words.push_back(token);
    tags.push_back(tag);
    lines.push_back(line_no);
  }
  flush();
  return sentences;
}

void write_conll(const std::string& path, const std::vector<TaggedSentence>& sentences) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path);
  for (const auto& ts : sentences) {
    auto bio = to_bio(ts);
    for (std::size_t i = 0; i < ts.words.size(); ++i)
      out << ts.words[i] << ' ' << bio[i] << '\n';
    out << '\n';
  }
}

std::vector<TaggedSentence> read_tagged(const std::string& path, const TagSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open tagged file: " + path);
  std::vector<TaggedSentence> sentences;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    try {
      sentences.push_back(parse(line, schema));
    } catch (const Error& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what(), line_no);
    }
  }
  return sentences;
}

void write_tagged(const std::string& path, const std::vector<TaggedSentence>& sentences,
                  const TagSchema& schema) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path);
  for (const auto& ts : sentences) out << serialize(ts, schema) << '\n';
}

std::vector<QAItem> read_qa_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open QA file: " + path);
  std::vector<QAItem> items;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw MalformedJson("line " + std::to_string(line_no) + ": " + e.what(), line_no);
    }
    auto require = [&](const char* field) {
      if (!doc.is_object() || !doc.contains(field))
        throw MissingField("line " + std::to_string(line_no) + ": missing \"" +
                           std::string(field) + "\"", line_no);
    };
    require("question");
    require("snippets");
    require("ideal_answers");
    QAItem item;
    try {
      item.question = doc["question"].get<std::string>();
      item.snippets = doc["snippets"].get<std::vector<std::string>>();
      item.ideal_answers = doc["ideal_answers"].get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
      throw MalformedJson("line " + std::to_string(line_no) + ": " + e.what(), line_no);
    }
    // Empty values are as unusable as absent ones.
    if (item.question.empty())
      throw MissingField("line " + std::to_string(line_no) + ": empty \"question\"", line_no);
    if (item.snippets.empty())
      throw MissingField("line " + std::to_string(line_no) + ": empty \"snippets\"", line_no);
    if (item.ideal_answers.empty())
      throw MissingField("line " + std::to_string(line_no) + ": empty \"ideal_answers\"", line_no);
    items.push_back(std::move(item));
  }
  return items;
}

void write_qa_jsonl(const std::string& path, const std::vector<QAItem>& items) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path);
  for (const auto& item : items) {
    nlohmann::json doc;
    doc["question"] = item.question;
    doc["snippets"] = item.snippets;
    doc["ideal_answers"] = item.ideal_answers;
    out << doc.dump() << '\n';
  }
}

}  // namespace seqlab
