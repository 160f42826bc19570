#include "seqlab/automaton.hpp"

#include <functional>

namespace seqlab {

namespace {

// Legality predicates, shared by allowed_actions and step.
bool can_emit_subtoken(const DecodeState& s, std::size_t n) { return s.word_pos < n; }

bool can_open(const DecodeState& s, std::size_t n) {
  return !s.open && s.sub_off == 0 && s.word_pos < n;
}

bool can_close(const DecodeState& s) {
  return s.open && s.sub_off == 0 && s.word_pos > s.open->start;
}

bool can_eos(const DecodeState& s, std::size_t n) { return s.word_pos == n && !s.open; }

}  // namespace

std::vector<std::pair<Action, TokenId>> allowed_actions(const DecodeState& state,
                                                        const std::vector<std::string>& input_words,
                                                        const TagSchema& schema,
                                                        const Tokenizer& tokenizer) {
  if (state.finished) throw FinishedState("allowed_actions on a finished state");
  const std::size_t n = input_words.size();
  std::vector<std::pair<Action, TokenId>> out;
  if (can_emit_subtoken(state, n)) {
    auto subtokens = tokenizer.encode(input_words[state.word_pos]);
    out.emplace_back(Action::emit_subtoken(), subtokens.at(state.sub_off));
  }
  if (can_open(state, n))
    for (std::size_t l = 0; l < schema.num_labels(); ++l)
      out.emplace_back(Action::open_tag(static_cast<std::int32_t>(l)), schema.open_id(l));
  if (can_close(state))
    out.emplace_back(Action::close_tag(), schema.close_id(static_cast<std::size_t>(state.open->label)));
  if (can_eos(state, n)) out.emplace_back(Action::emit_eos(), kEosId);
  return out;
}

DecodeState step(const DecodeState& state, const Action& action,
                 const std::vector<std::string>& input_words, const Tokenizer& tokenizer) {
  const std::size_t n = input_words.size();
  if (state.finished) throw IllegalAction("step on a finished state");
  DecodeState next = state;
  switch (action.kind) {
    case Action::Kind::EmitSubtoken: {
      if (!can_emit_subtoken(state, n)) throw IllegalAction("no word left to emit");
      std::size_t len = tokenizer.encode(input_words[state.word_pos]).size();
      if (state.sub_off + 1 < len) {
        next.sub_off = state.sub_off + 1;
      } else {
        next.word_pos = state.word_pos + 1;
        next.sub_off = 0;
      }
      break;
    }
    case Action::Kind::OpenTag:
      if (!can_open(state, n) || action.label < 0)
        throw IllegalAction("open tag not permitted here");
      next.open = OpenSpan{action.label, state.word_pos};
      break;
    case Action::Kind::CloseTag:
      if (!can_close(state)) throw IllegalAction("close tag not permitted here");
      next.open.reset();
      break;
    case Action::Kind::EmitEos:
      if (!can_eos(state, n)) throw IllegalAction("EOS not permitted here");
      next.finished = true;
      break;
  }
  return next;
}

std::uint64_t count_paths(std::size_t n, std::size_t num_labels) {
  if (num_labels < 1) throw Error("count_paths requires num_labels >= 1");
  // f[k] = paths for a k-word suffix; f[k] = f[k-1] + L * (f[k-1]+...+f[0]).
  std::vector<std::uint64_t> f(n + 1);
  f[0] = 1;
  std::uint64_t suffix_sum = 1;  // f[0] + ... + f[k-1]
  for (std::size_t k = 1; k <= n; ++k) {
    std::uint64_t spans = 0;
    if (__builtin_mul_overflow(static_cast<std::uint64_t>(num_labels), suffix_sum, &spans))
      throw Overflow("count_paths exceeds uint64");
    if (__builtin_add_overflow(f[k - 1], spans, &f[k]))
      throw Overflow("count_paths exceeds uint64");
    if (__builtin_add_overflow(suffix_sum, f[k], &suffix_sum))
      throw Overflow("count_paths exceeds uint64");
  }
  return f[n];
}

std::vector<TaggedSentence> enumerate_annotations(const std::vector<std::string>& input_words,
                                                  const TagSchema& schema, std::uint64_t limit) {
  std::uint64_t total = 0;
  try {
    total = count_paths(input_words.size(), schema.num_labels());
  } catch (const Overflow&) {
    throw TooManyPaths("annotation count exceeds uint64");
  }
  if (total > limit)
    throw TooManyPaths("annotation count " + std::to_string(total) + " exceeds limit " +
                       std::to_string(limit));

  std::vector<TaggedSentence> out;
  out.reserve(static_cast<std::size_t>(total));
  std::vector<Span> spans;
  const std::size_t n = input_words.size();
  std::function<void(std::size_t)> walk = [&](std::size_t pos) {
    if (pos == n) {
      out.push_back(TaggedSentence{input_words, spans});
      return;
    }
    walk(pos + 1);  // word left bare
    for (const auto& label : schema.labels()) {
      for (std::size_t end = pos + 1; end <= n; ++end) {
        spans.push_back(Span{pos, end, label});
        walk(end);
        spans.pop_back();
      }
    }
  };
  walk(0);
  return out;
}

std::vector<Action> annotation_actions(const TaggedSentence& ts, const TagSchema& schema,
                                       const Tokenizer& tokenizer) {
  std::vector<Action> actions;
  std::size_t span_idx = 0;
  for (std::size_t w = 0; w <= ts.words.size(); ++w) {
    if (span_idx < ts.spans.size() && ts.spans[span_idx].end == w) {
      actions.push_back(Action::close_tag());
      ++span_idx;
    }
    if (w == ts.words.size()) break;
    if (span_idx < ts.spans.size() && ts.spans[span_idx].start == w) {
      std::size_t label = schema.label_index(ts.spans[span_idx].label);
      actions.push_back(Action::open_tag(static_cast<std::int32_t>(label)));
    }
    std::size_t len = tokenizer.encode(ts.words[w]).size();
    for (std::size_t k = 0; k < len; ++k) actions.push_back(Action::emit_subtoken());
  }
  actions.push_back(Action::emit_eos());
  return actions;
}

std::vector<TokenId> annotation_token_ids(const TaggedSentence& ts, const TagSchema& schema,
                                          const Tokenizer& tokenizer) {
  validate_sentence(ts, schema);
  std::vector<Action> actions = annotation_actions(ts, schema, tokenizer);
  // Replay through step() to collect ids; also revalidates the path.
  std::vector<TokenId> ids;
  ids.reserve(actions.size());
  DecodeState state;
  for (const auto& action : actions) {
    auto allowed = allowed_actions(state, ts.words, schema, tokenizer);
    TokenId id = -1;
    for (const auto& [a, t] : allowed)
      if (a == action) {
        id = t;
        break;
      }
    if (id < 0) throw IllegalAction("annotation does not replay");
    ids.push_back(id);
    state = step(state, action, ts.words, tokenizer);
  }
  return ids;
}

}  // namespace seqlab
