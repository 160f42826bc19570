#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "seqlab/types.hpp"

namespace seqlab {

struct DegenerateAgreement : Error {
  using Error::Error;
};
struct ConstantVector : Error {
  using Error::Error;
};
struct InvalidPermutation : Error {
  using Error::Error;
};

struct PRF {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  double precision = 0.0;  // tp/(tp+fp), 0/0 == 0
  double recall = 0.0;     // tp/(tp+fn), 0/0 == 0
  double f1 = 0.0;         // 2PR/(P+R),  0/0 == 0
};

struct F1Report {
  std::map<std::string, PRF> per_label;
  PRF micro;  // from summed tp/fp/fn
};

/// Strict span-level F1: a predicted span counts as a true positive iff a
/// gold span with identical label, start and end exists in the same sentence;
/// each gold span is matched at most once.
F1Report span_f1(const std::vector<TaggedSentence>& golds,
                 const std::vector<TaggedSentence>& preds);

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// ROUGE-L over token lists: R = LCS/|ref|, P = LCS/|cand|.
RougeScore rouge_l(const std::vector<std::string>& candidate,
                   const std::vector<std::string>& reference);

// Fixed text tokenization for ROUGE: lowercased whitespace split with
// terminal punctuation (.,;:!?) stripped.
std::vector<std::string> rouge_tokenize(std::string_view text);
RougeScore rouge_l_text(std::string_view candidate, std::string_view reference);

/// Cohen's kappa over two aligned label sequences.
double cohens_kappa(const std::vector<std::string>& labels_a,
                    const std::vector<std::string>& labels_b);

/// Spearman rank correlation with average ranks for ties.
double spearman_rank(const std::vector<double>& values_a, const std::vector<double>& values_b);

// One rater's ranking of the candidate models for one question; ranks are a
// permutation of 1..k, 1 best.
struct RankingRecord {
  std::string question;
  std::string rater;
  std::map<std::string, int> ranks;
};

/// Mean Spearman correlation over all rater pairs that ranked the same
/// question.
double average_spearman(const std::vector<RankingRecord>& records);

struct RankTally {
  std::uint64_t best = 0;                      // times ranked 1
  std::map<int, std::uint64_t> histogram;      // rank -> count
};

/// Per-model counts of rank-1 assignments plus the full rank histogram.
std::map<std::string, RankTally> rank_aggregate(const std::vector<RankingRecord>& records);

// Rankings file: JSON Lines, one record per line:
// {"question": string, "rater": string, "ranks": {"model": int, ...}}
std::vector<RankingRecord> read_rankings_jsonl(const std::string& path);
void write_rankings_jsonl(const std::string& path, const std::vector<RankingRecord>& records);

}  // namespace seqlab
