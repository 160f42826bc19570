#include "seqlab/decoder.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

namespace seqlab {

namespace {

struct Hypothesis {
  DecodeState state;
  std::vector<Action> actions;
  std::vector<TokenId> tokens;
  double logprob = 0.0;
};

// Score-descending order; equal scores break toward the action-order-minimal
// sequence.
bool better(const Hypothesis& a, const Hypothesis& b) {
  if (a.logprob != b.logprob) return a.logprob > b.logprob;
  return std::lexicographical_compare(a.actions.begin(), a.actions.end(), b.actions.begin(),
                                      b.actions.end());
}

std::string join_words(const std::vector<std::string>& words) {
  std::ostringstream out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out << ' ';
    out << words[i];
  }
  return out.str();
}

TaggedSentence sentence_from_actions(const std::vector<std::string>& words,
                                     const TagSchema& schema,
                                     const std::vector<Action>& actions,
                                     const Tokenizer& tokenizer) {
  TaggedSentence ts;
  ts.words = words;
  DecodeState state;
  for (const auto& action : actions) {
    if (action.kind == Action::Kind::OpenTag)
      ts.spans.push_back(Span{state.word_pos, 0, schema.labels().at(static_cast<std::size_t>(action.label))});
    else if (action.kind == Action::Kind::CloseTag)
      ts.spans.back().end = state.word_pos;
    state = step(state, action, words, tokenizer);
  }
  return ts;
}

double lookup_score(const ScoreResponse& response, TokenId id) {
  auto it = response.logprobs.find(id);
  if (it == response.logprobs.end())
    throw ScorerError("scorer response omitted candidate " + std::to_string(id));
  if (!std::isfinite(it->second))
    throw ScorerError("scorer returned a non-finite logprob for " + std::to_string(id));
  return it->second;
}

}  // namespace

DecodeResult decode(const std::vector<std::string>& input_words, const TagSchema& schema,
                    const Scorer& scorer, const Tokenizer& tokenizer,
                    const DecodeOptions& options) {
  if (options.beam_width < 1) throw Error("beam_width must be >= 1");
  ScoreRequest request;
  request.conditioning = options.conditioning ? *options.conditioning : join_words(input_words);

  std::vector<Hypothesis> live{Hypothesis{}};
  std::optional<Hypothesis> best_finished;
  // Positive score increments void the early-stop bound; track them.
  bool saw_positive = false;

  while (!live.empty()) {
    std::vector<Hypothesis> expanded;
    for (const auto& hyp : live) {
      auto allowed = allowed_actions(hyp.state, input_words, schema, tokenizer);
      request.prefix = hyp.tokens;
      request.candidates.clear();
      for (const auto& [action, id] : allowed) request.candidates.push_back(id);
      ScoreResponse response = scorer.score(request);

      for (const auto& [action, id] : allowed) {
        double increment = lookup_score(response, id);
        if (increment > 0) saw_positive = true;
        Hypothesis next;
        next.state = step(hyp.state, action, input_words, tokenizer);
        next.actions = hyp.actions;
        next.actions.push_back(action);
        next.tokens = hyp.tokens;
        next.tokens.push_back(id);
        next.logprob = hyp.logprob + increment;
        if (next.state.finished) {
          if (!best_finished || better(next, *best_finished)) best_finished = std::move(next);
        } else {
          expanded.push_back(std::move(next));
        }
      }
    }
    std::sort(expanded.begin(), expanded.end(), better);
    if (expanded.size() > options.beam_width) expanded.resize(options.beam_width);
    live = std::move(expanded);
    // Admissible early stop: increments are non-positive, so no live
    // hypothesis can end up strictly above the best finished score. Ties keep
    // searching so the action-order tie-break stays exact.
    if (!saw_positive && best_finished && !live.empty() &&
        best_finished->logprob > live.front().logprob)
      break;
  }

  if (!best_finished) throw Error("beam search produced no finished hypothesis");
  DecodeResult result;
  result.tagged = sentence_from_actions(input_words, schema, best_finished->actions, tokenizer);
  result.logprob = best_finished->logprob;
  result.steps = best_finished->actions.size();
  return result;
}

DecodeResult decode(const std::vector<std::string>& input_words, const TagSchema& schema,
                    const Scorer& scorer, const Tokenizer& tokenizer, std::size_t beam_width) {
  DecodeOptions options;
  options.beam_width = beam_width;
  return decode(input_words, schema, scorer, tokenizer, options);
}

DecodeResult exhaustive_argmax(const std::vector<std::string>& input_words,
                               const TagSchema& schema, const Scorer& scorer,
                               const Tokenizer& tokenizer, std::uint64_t limit,
                               const DecodeOptions& options) {
  ScoreRequest request;
  request.conditioning = options.conditioning ? *options.conditioning : join_words(input_words);

  std::optional<Hypothesis> best;
  TaggedSentence best_sentence;
  for (const auto& ts : enumerate_annotations(input_words, schema, limit)) {
    Hypothesis hyp;
    for (const auto& action : annotation_actions(ts, schema, tokenizer)) {
      auto allowed = allowed_actions(hyp.state, input_words, schema, tokenizer);
      request.prefix = hyp.tokens;
      request.candidates.clear();
      TokenId chosen = -1;
      for (const auto& [a, id] : allowed) {
        request.candidates.push_back(id);
        if (a == action) chosen = id;
      }
      if (chosen < 0) throw IllegalAction("annotation does not replay");
      ScoreResponse response = scorer.score(request);
      hyp.logprob += lookup_score(response, chosen);
      hyp.actions.push_back(action);
      hyp.tokens.push_back(chosen);
      hyp.state = step(hyp.state, action, input_words, tokenizer);
    }
    if (!best || better(hyp, *best)) {
      best = std::move(hyp);
      best_sentence = ts;
    }
  }
  if (!best) throw Error("no annotations to score");
  DecodeResult result;
  result.tagged = std::move(best_sentence);
  result.logprob = best->logprob;
  result.steps = best->actions.size();
  return result;
}

std::vector<BatchEntry> decode_batch(const std::vector<std::vector<std::string>>& sentences,
                                     const TagSchema& schema, const Scorer& scorer,
                                     const Tokenizer& tokenizer, std::size_t beam_width,
                                     std::size_t parallelism) {
  if (parallelism < 1) throw Error("parallelism must be >= 1");
  // Warm the tokenizer in input order so interned ids are identical to a
  // sequential run regardless of thread scheduling.
  for (const auto& words : sentences)
    for (const auto& word : words) tokenizer.encode(word);

  std::vector<BatchEntry> entries(sentences.size());
  auto run_one = [&](std::size_t i) {
    try {
      entries[i].result = decode(sentences[i], schema, scorer, tokenizer, beam_width);
    } catch (const std::exception& e) {
      entries[i].error = e.what();
    }
  };

  if (parallelism == 1 || !scorer.concurrent_safe() || sentences.size() <= 1) {
    for (std::size_t i = 0; i < sentences.size(); ++i) run_one(i);
    return entries;
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  std::size_t num_workers = std::min(parallelism, sentences.size());
  workers.reserve(num_workers);
  for (std::size_t w = 0; w < num_workers; ++w)
    workers.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < sentences.size(); i = next.fetch_add(1))
        run_one(i);
    });
  for (auto& t : workers) t.join();
  return entries;
}

}  // namespace seqlab
