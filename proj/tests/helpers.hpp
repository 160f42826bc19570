#pragma once

// Shared test utilities: seeded generators for words, sentences and schemas,
// a brute-force walker over the constraint automaton, and temp-file helpers.

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <unistd.h>
#include <vector>

#include "seqlab/annotation.hpp"
#include "seqlab/automaton.hpp"
#include "seqlab/schema.hpp"
#include "seqlab/tokenizer.hpp"
#include "seqlab/types.hpp"

namespace testutil {

inline std::size_t rand_below(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(n));
}

inline std::string random_word(std::mt19937_64& rng, std::size_t max_len = 6) {
  std::size_t len = 1 + rand_below(rng, max_len);
  std::string word;
  for (std::size_t i = 0; i < len; ++i)
    word.push_back(static_cast<char>('a' + rand_below(rng, 26)));
  return word;
}

inline std::vector<std::string> random_words(std::mt19937_64& rng, std::size_t count) {
  std::vector<std::string> words;
  words.reserve(count);
  for (std::size_t i = 0; i < count; ++i) words.push_back(random_word(rng));
  return words;
}

inline seqlab::TagSchema random_schema(std::mt19937_64& rng, std::size_t max_labels = 3) {
  std::size_t count = 1 + rand_below(rng, max_labels);
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < count; ++i)
    labels.push_back("L" + std::to_string(i) + random_word(rng, 4));
  return seqlab::make_schema("random", std::move(labels));
}

// Random flat annotation of `words` under `schema`.
inline seqlab::TaggedSentence random_sentence(std::mt19937_64& rng,
                                              std::vector<std::string> words,
                                              const seqlab::TagSchema& schema) {
  seqlab::TaggedSentence ts;
  ts.words = std::move(words);
  std::size_t pos = 0;
  while (pos < ts.words.size()) {
    if (rand_below(rng, 3) == 0) {  // open a span here about a third of the time
      std::size_t max_len = ts.words.size() - pos;
      std::size_t len = 1 + rand_below(rng, std::min<std::size_t>(max_len, 3));
      const auto& label = schema.labels()[rand_below(rng, schema.num_labels())];
      ts.spans.push_back(seqlab::Span{pos, pos + len, label});
      pos += len;
    } else {
      ++pos;
    }
  }
  return ts;
}

// Depth-first walk over every accepting action sequence, driven purely by
// allowed_actions/step. visit() receives the action path and the detokenized
// surface text.
inline void walk_accepting_paths(
    const std::vector<std::string>& words, const seqlab::TagSchema& schema,
    const seqlab::Tokenizer& tokenizer,
    const std::function<void(const std::vector<seqlab::Action>&, const std::string&)>& visit) {
  std::vector<seqlab::Action> path;
  std::vector<std::string> pieces;
  std::function<void(const seqlab::DecodeState&)> go = [&](const seqlab::DecodeState& state) {
    if (state.finished) {
      std::string text;
      for (std::size_t i = 0; i < pieces.size(); ++i) {
        if (i) text += ' ';
        text += pieces[i];
      }
      visit(path, text);
      return;
    }
    for (const auto& [action, id] : seqlab::allowed_actions(state, words, schema, tokenizer)) {
      auto next = seqlab::step(state, action, words, tokenizer);
      path.push_back(action);
      std::size_t pushed = 0;
      switch (action.kind) {
        case seqlab::Action::Kind::OpenTag:
          pieces.push_back(schema.open_marker(schema.labels()[static_cast<std::size_t>(action.label)]));
          pushed = 1;
          break;
        case seqlab::Action::Kind::CloseTag:
          pieces.push_back(schema.close_marker(schema.labels()[static_cast<std::size_t>(state.open->label)]));
          pushed = 1;
          break;
        case seqlab::Action::Kind::EmitSubtoken:
          if (next.word_pos > state.word_pos) {  // word completed
            pieces.push_back(words[state.word_pos]);
            pushed = 1;
          }
          break;
        case seqlab::Action::Kind::EmitEos:
          break;
      }
      go(next);
      path.pop_back();
      while (pushed--) pieces.pop_back();
    }
  };
  go(seqlab::DecodeState{});
}

inline std::uint64_t count_accepting_paths(const std::vector<std::string>& words,
                                           const seqlab::TagSchema& schema,
                                           const seqlab::Tokenizer& tokenizer) {
  std::uint64_t count = 0;
  walk_accepting_paths(words, schema, tokenizer,
                       [&](const auto&, const auto&) { ++count; });
  return count;
}

// Unique temp directory, removed on destruction.
class TempDir {
 public:
  TempDir() {
    auto base = std::filesystem::temp_directory_path();
    static std::atomic<unsigned> counter{0};
    path_ = base / ("seqlab_test_" + std::to_string(::getpid()) + "_" +
                    std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return content;
}

}  // namespace testutil
