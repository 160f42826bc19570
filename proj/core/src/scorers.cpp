#include "seqlab/scorers.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <deque>
#include <sstream>

#include "seqlab/automaton.hpp"

namespace seqlab {

std::uint64_t prefix_hash(std::span<const TokenId> prefix) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (TokenId id : prefix) {
    std::uint64_t v = static_cast<std::uint64_t>(id);
    for (int byte = 0; byte < 8; ++byte) {
      h ^= (v >> (8 * byte)) & 0xffULL;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void check_request(const ScoreRequest& request) {
  if (request.candidates.empty()) throw ScorerError("no candidates to score");
}

class UniformScorer final : public Scorer {
 public:
  ScoreResponse score(const ScoreRequest& request) const override {
    check_request(request);
    double lp = std::log(1.0 / static_cast<double>(request.candidates.size()));
    ScoreResponse response;
    for (TokenId id : request.candidates) response.logprobs[id] = lp;
    return response;
  }
  bool normalized() const override { return true; }
};

class TableScorer final : public Scorer {
 public:
  TableScorer(std::vector<TableEntry> entries, double default_logprob)
      : default_logprob_(default_logprob) {
    if (!std::isfinite(default_logprob)) throw ScorerError("table default must be finite");
    for (const auto& e : entries) table_[key(e.prefix_hash, e.token)] = e.logprob;
  }

  ScoreResponse score(const ScoreRequest& request) const override {
    check_request(request);
    std::uint64_t ph = prefix_hash(request.prefix);
    ScoreResponse response;
    for (TokenId id : request.candidates) {
      auto it = table_.find(key(ph, id));
      response.logprobs[id] = it == table_.end() ? default_logprob_ : it->second;
    }
    return response;
  }

 private:
  static std::uint64_t key(std::uint64_t ph, TokenId token) {
    return splitmix64(ph ^ splitmix64(static_cast<std::uint64_t>(token)));
  }

  std::unordered_map<std::uint64_t, double> table_;
  double default_logprob_;
};

class RandomTableScorer final : public Scorer {
 public:
  RandomTableScorer(std::uint64_t seed, double lo, double hi) : seed_(seed), lo_(lo), hi_(hi) {
    if (!(lo <= hi)) throw ScorerError("random table needs lo <= hi");
  }

  ScoreResponse score(const ScoreRequest& request) const override {
    check_request(request);
    std::uint64_t ph = prefix_hash(request.prefix);
    ScoreResponse response;
    for (TokenId id : request.candidates) {
      std::uint64_t bits = splitmix64(seed_ ^ splitmix64(ph) ^
                                      splitmix64(static_cast<std::uint64_t>(id) * 0x9e3779b9ULL));
      double unit = static_cast<double>(bits >> 11) * 0x1.0p-53;  // [0, 1)
      response.logprobs[id] = lo_ + (hi_ - lo_) * unit;
    }
    return response;
  }

 private:
  std::uint64_t seed_;
  double lo_;
  double hi_;
};

class GoldScorer final : public Scorer {
 public:
  GoldScorer(std::vector<TokenId> gold_ids, double margin)
      : gold_ids_(std::move(gold_ids)), margin_(margin) {}

  ScoreResponse score(const ScoreRequest& request) const override {
    check_request(request);
    TokenId next = -1;
    if (request.prefix.size() < gold_ids_.size() &&
        std::equal(request.prefix.begin(), request.prefix.end(), gold_ids_.begin()))
      next = gold_ids_[request.prefix.size()];
    ScoreResponse response;
    for (TokenId id : request.candidates)
      response.logprobs[id] = (id == next) ? 0.0 : -margin_;
    return response;
  }

 private:
  std::vector<TokenId> gold_ids_;
  double margin_;
};

class NgramScorer final : public Scorer {
 public:
  NgramScorer(const std::vector<TaggedSentence>& corpus, TagSchema schema,
              std::shared_ptr<const Tokenizer> tokenizer, std::size_t order, double alpha)
      : schema_(std::move(schema)), tokenizer_(std::move(tokenizer)), order_(order), alpha_(alpha) {
    if (corpus.empty()) throw EmptyCorpus("n-gram training corpus is empty");
    if (order < 1) throw ScorerError("n-gram order must be >= 1");
    if (!(alpha > 0)) throw ScorerError("n-gram alpha must be > 0");
    for (const auto& ts : corpus) {
      validate_sentence(ts, schema_);
      std::deque<std::string> context(order_ - 1, kBos);
      for (const auto& symbol : symbol_stream(ts)) {
        counts_[context_key(context)][symbol] += 1;
        push_context(context, symbol);
      }
    }
  }

  ScoreResponse score(const ScoreRequest& request) const override {
    check_request(request);
    std::vector<std::string> words = conditioning_words(request.conditioning);

    // Replay the prefix through the automaton to recover the action-symbol
    // history and the current state.
    DecodeState state;
    std::deque<std::string> context(order_ - 1, kBos);
    for (TokenId id : request.prefix) {
      auto allowed = allowed_actions(state, words, schema_, *tokenizer_);
      const Action* action = nullptr;
      for (const auto& [a, t] : allowed)
        if (t == id) {
          action = &a;
          break;
        }
      if (!action) throw ScorerError("prefix token " + std::to_string(id) + " is not reachable");
      if (state.at_word_boundary()) push_context(context, action_symbol(*action, words, state));
      state = step(state, *action, words, *tokenizer_);
    }

    ScoreResponse response;
    if (!state.at_word_boundary()) {
      // Mid-word continuations are forced; spread uniformly.
      double lp = std::log(1.0 / static_cast<double>(request.candidates.size()));
      for (TokenId id : request.candidates) response.logprobs[id] = lp;
      return response;
    }

    auto allowed = allowed_actions(state, words, schema_, *tokenizer_);
    const auto* ctx_counts = [&]() -> const std::unordered_map<std::string, std::uint64_t>* {
      auto it = counts_.find(context_key(context));
      return it == counts_.end() ? nullptr : &it->second;
    }();

    std::vector<std::pair<TokenId, double>> weights;
    double total = 0.0;
    for (TokenId id : request.candidates) {
      const Action* action = nullptr;
      for (const auto& [a, t] : allowed)
        if (t == id) {
          action = &a;
          break;
        }
      if (!action) throw ScorerError("candidate " + std::to_string(id) + " is not allowed here");
      double count = 0.0;
      if (ctx_counts) {
        auto it = ctx_counts->find(action_symbol(*action, words, state));
        if (it != ctx_counts->end()) count = static_cast<double>(it->second);
      }
      weights.emplace_back(id, count + alpha_);
      total += count + alpha_;
    }
    for (const auto& [id, w] : weights) response.logprobs[id] = std::log(w / total);
    return response;
  }

  bool normalized() const override { return true; }

 private:
  static constexpr const char* kBos = "<s>";
  static constexpr const char* kEosSymbol = "</s>";

  // Word-level action symbols keep the model tokenizer-independent.
  std::string action_symbol(const Action& action, const std::vector<std::string>& words,
                            const DecodeState& state) const {
    switch (action.kind) {
      case Action::Kind::EmitSubtoken:
        return "W\x1f" + words.at(state.word_pos);
      case Action::Kind::OpenTag:
        return "O\x1f" + schema_.labels().at(static_cast<std::size_t>(action.label));
      case Action::Kind::CloseTag:
        return "C\x1f" + schema_.labels().at(static_cast<std::size_t>(state.open->label));
      case Action::Kind::EmitEos:
        return kEosSymbol;
    }
    throw ScorerError("unknown action");
  }

  std::vector<std::string> symbol_stream(const TaggedSentence& ts) const {
    std::vector<std::string> symbols;
    std::size_t span_idx = 0;
    for (std::size_t w = 0; w <= ts.words.size(); ++w) {
      if (span_idx < ts.spans.size() && ts.spans[span_idx].end == w) {
        symbols.push_back("C\x1f" + ts.spans[span_idx].label);
        ++span_idx;
      }
      if (w == ts.words.size()) break;
      if (span_idx < ts.spans.size() && ts.spans[span_idx].start == w)
        symbols.push_back("O\x1f" + ts.spans[span_idx].label);
      symbols.push_back("W\x1f" + ts.words[w]);
    }
    symbols.push_back(kEosSymbol);
    return symbols;
  }

  void push_context(std::deque<std::string>& context, std::string symbol) const {
    if (order_ == 1) return;
    context.push_back(std::move(symbol));
    context.pop_front();
  }

  static std::string context_key(const std::deque<std::string>& context) {
    std::string key;
    for (const auto& s : context) {
      key += s;
      key += '\x1e';
    }
    return key;
  }

  // The conditioning may carry a multi-task label prefix; the automaton's
  // input is the sentence after any leading open markers.
  std::vector<std::string> conditioning_words(const std::string& conditioning) const {
    std::vector<std::string> tokens;
    std::istringstream in(conditioning);
    std::string token;
    while (in >> token) tokens.push_back(token);
    std::size_t start = 0;
    while (start < tokens.size()) {
      bool is_marker = false;
      for (const auto& label : schema_.labels())
        if (tokens[start] == schema_.open_marker(label)) {
          is_marker = true;
          break;
        }
      if (!is_marker) break;
      ++start;
    }
    return {tokens.begin() + static_cast<std::ptrdiff_t>(start), tokens.end()};
  }

  TagSchema schema_;
  std::shared_ptr<const Tokenizer> tokenizer_;
  std::size_t order_;
  double alpha_;
  std::unordered_map<std::string, std::unordered_map<std::string, std::uint64_t>> counts_;
};

}  // namespace

ScorerPtr uniform_scorer() { return std::make_unique<UniformScorer>(); }

ScorerPtr table_scorer(std::vector<TableEntry> entries, double default_logprob) {
  return std::make_unique<TableScorer>(std::move(entries), default_logprob);
}

ScorerPtr random_table_scorer(std::uint64_t seed, double lo, double hi) {
  return std::make_unique<RandomTableScorer>(seed, lo, hi);
}

ScorerPtr gold_scorer(const TaggedSentence& gold, const TagSchema& schema,
                      const Tokenizer& tokenizer, double margin) {
  return std::make_unique<GoldScorer>(annotation_token_ids(gold, schema, tokenizer), margin);
}

ScorerPtr ngram_scorer_train(const std::vector<TaggedSentence>& corpus, const TagSchema& schema,
                             std::shared_ptr<const Tokenizer> tokenizer, std::size_t order,
                             double alpha) {
  return std::make_unique<NgramScorer>(corpus, schema, std::move(tokenizer), order, alpha);
}

}  // namespace seqlab
