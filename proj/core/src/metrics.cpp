#include "seqlab/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace seqlab {

namespace {

void finalize(PRF& prf) {
  prf.precision = (prf.tp + prf.fp) ? static_cast<double>(prf.tp) / static_cast<double>(prf.tp + prf.fp) : 0.0;
  prf.recall = (prf.tp + prf.fn) ? static_cast<double>(prf.tp) / static_cast<double>(prf.tp + prf.fn) : 0.0;
  // 2PR/(P+R) == 2tp/(2tp+fp+fn); the count form avoids rounding the ratio twice.
  std::uint64_t denom = 2 * prf.tp + prf.fp + prf.fn;
  prf.f1 = denom ? 2.0 * static_cast<double>(prf.tp) / static_cast<double>(denom) : 0.0;
}

std::vector<double> average_ranks(const std::vector<double>& values) {
  std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    double shared = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

F1Report span_f1(const std::vector<TaggedSentence>& golds,
                 const std::vector<TaggedSentence>& preds) {
  if (golds.size() != preds.size()) {
    std::ostringstream msg;
    msg << "got " << golds.size() << " gold but " << preds.size() << " predicted sentences";
    throw LengthMismatch(msg.str());
  }
  F1Report report;
  for (std::size_t i = 0; i < golds.size(); ++i) {
    if (golds[i].words != preds[i].words)
      throw WordMismatch("sentence " + std::to_string(i) + ": word sequences differ");
    std::set<Span> unmatched(golds[i].spans.begin(), golds[i].spans.end());
    for (const auto& span : preds[i].spans) {
      auto it = unmatched.find(span);
      if (it != unmatched.end()) {
        unmatched.erase(it);
        ++report.per_label[span.label].tp;
      } else {
        ++report.per_label[span.label].fp;
      }
    }
    for (const auto& span : unmatched) ++report.per_label[span.label].fn;
  }
  for (auto& [label, prf] : report.per_label) {
    finalize(prf);
    report.micro.tp += prf.tp;
    report.micro.fp += prf.fp;
    report.micro.fn += prf.fn;
  }
  finalize(report.micro);
  return report;
}

RougeScore rouge_l(const std::vector<std::string>& candidate,
                   const std::vector<std::string>& reference) {
  const std::size_t c = candidate.size(), r = reference.size();
  std::vector<std::size_t> prev(r + 1, 0), cur(r + 1, 0);
  for (std::size_t i = 1; i <= c; ++i) {
    for (std::size_t j = 1; j <= r; ++j) {
      if (candidate[i - 1] == reference[j - 1])
        cur[j] = prev[j - 1] + 1;
      else
        cur[j] = std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  const std::size_t lcs = prev[r];
  RougeScore score;
  score.precision = c ? static_cast<double>(lcs) / static_cast<double>(c) : 0.0;
  score.recall = r ? static_cast<double>(lcs) / static_cast<double>(r) : 0.0;
  // 2PR/(P+R) == 2*LCS/(c+r)
  score.f1 = (c + r) ? 2.0 * static_cast<double>(lcs) / static_cast<double>(c + r) : 0.0;
  return score;
}

std::vector<std::string> rouge_tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::istringstream in{std::string(text)};
  std::string token;
  while (in >> token) {
    while (!token.empty()) {
      char last = token.back();
      if (last == '.' || last == ',' || last == ';' || last == ':' || last == '!' || last == '?')
        token.pop_back();
      else
        break;
    }
    if (token.empty()) continue;
    for (auto& ch : token) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    tokens.push_back(token);
  }
  return tokens;
}

RougeScore rouge_l_text(std::string_view candidate, std::string_view reference) {
  return rouge_l(rouge_tokenize(candidate), rouge_tokenize(reference));
}

double cohens_kappa(const std::vector<std::string>& labels_a,
                    const std::vector<std::string>& labels_b) {
  if (labels_a.size() != labels_b.size() || labels_a.empty())
    throw LengthMismatch("kappa needs two aligned non-empty label sequences");
  const double n = static_cast<double>(labels_a.size());
  std::map<std::string, std::uint64_t> count_a, count_b;
  std::uint64_t agree = 0;
  for (std::size_t i = 0; i < labels_a.size(); ++i) {
    ++count_a[labels_a[i]];
    ++count_b[labels_b[i]];
    if (labels_a[i] == labels_b[i]) ++agree;
  }
  const double p_o = static_cast<double>(agree) / n;
  double p_e = 0.0;
  for (const auto& [label, ca] : count_a) {
    auto it = count_b.find(label);
    if (it != count_b.end())
      p_e += (static_cast<double>(ca) / n) * (static_cast<double>(it->second) / n);
  }
  if (p_e >= 1.0) {
    if (p_o >= 1.0) return 1.0;
    throw DegenerateAgreement("chance agreement is 1 but observed agreement is not");
  }
  return (p_o - p_e) / (1.0 - p_e);
}

double spearman_rank(const std::vector<double>& values_a, const std::vector<double>& values_b) {
  if (values_a.size() != values_b.size() || values_a.size() < 2)
    throw LengthMismatch("spearman needs two aligned sequences of length >= 2");
  std::vector<double> ra = average_ranks(values_a);
  std::vector<double> rb = average_ranks(values_b);
  const double n = static_cast<double>(ra.size());
  double mean_a = 0.0, mean_b = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    mean_a += ra[i];
    mean_b += rb[i];
  }
  mean_a /= n;
  mean_b /= n;
  double cov = 0.0, var_a = 0.0, var_b = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    double da = ra[i] - mean_a;
    double db = rb[i] - mean_b;
    cov += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  if (var_a == 0.0 || var_b == 0.0) throw ConstantVector("rank vector has no variance");
  return cov / std::sqrt(var_a * var_b);
}

double average_spearman(const std::vector<RankingRecord>& records) {
  std::map<std::string, std::vector<const RankingRecord*>> by_question;
  for (const auto& record : records) by_question[record.question].push_back(&record);

  double sum = 0.0;
  std::size_t pairs = 0;
  for (const auto& [question, raters] : by_question) {
    for (std::size_t i = 0; i < raters.size(); ++i) {
      for (std::size_t j = i + 1; j < raters.size(); ++j) {
        std::vector<double> a, b;
        for (const auto& [model, rank] : raters[i]->ranks) {
          auto it = raters[j]->ranks.find(model);
          if (it == raters[j]->ranks.end()) continue;
          a.push_back(static_cast<double>(rank));
          b.push_back(static_cast<double>(it->second));
        }
        if (a.size() < 2) continue;
        sum += spearman_rank(a, b);
        ++pairs;
      }
    }
  }
  if (pairs == 0) throw Error("no two raters ranked the same question");
  return sum / static_cast<double>(pairs);
}

std::map<std::string, RankTally> rank_aggregate(const std::vector<RankingRecord>& records) {
  std::map<std::string, RankTally> tally;
  for (const auto& record : records) {
    const int k = static_cast<int>(record.ranks.size());
    std::set<int> seen;
    for (const auto& [model, rank] : record.ranks) {
      if (rank < 1 || rank > k || !seen.insert(rank).second)
        throw InvalidPermutation("ranks for question '" + record.question +
                                 "' are not a permutation of 1.." + std::to_string(k));
    }
    for (const auto& [model, rank] : record.ranks) {
      auto& t = tally[model];
      ++t.histogram[rank];
      if (rank == 1) ++t.best;
    }
  }
  return tally;
}

std::vector<RankingRecord> read_rankings_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open rankings file: " + path);
  std::vector<RankingRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error("rankings line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("question") || !doc.contains("rater") ||
        !doc.contains("ranks") || !doc["ranks"].is_object())
      throw Error("rankings line " + std::to_string(line_no) +
                  ": expected {\"question\",\"rater\",\"ranks\"}");
    RankingRecord record;
    record.question = doc["question"].get<std::string>();
    record.rater = doc["rater"].get<std::string>();
    for (const auto& [model, rank] : doc["ranks"].items()) {
      if (!rank.is_number_integer())
        throw Error("rankings line " + std::to_string(line_no) + ": rank must be an integer");
      record.ranks[model] = rank.get<int>();
    }
    records.push_back(std::move(record));
  }
  return records;
}

void write_rankings_jsonl(const std::string& path, const std::vector<RankingRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path);
  for (const auto& record : records) {
    nlohmann::json doc;
    doc["question"] = record.question;
    doc["rater"] = record.rater;
    doc["ranks"] = nlohmann::json::object();
    for (const auto& [model, rank] : record.ranks) doc["ranks"][model] = rank;
    out << doc.dump() << '\n';
  }
}

}  // namespace seqlab
