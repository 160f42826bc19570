// seqlab: constrained decoding, evaluation, conversion and data-pipeline
// workflows over tagged sentences.

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "seqlab/seqlab.hpp"

namespace {

using nlohmann::json;

// exit 2 = bad configuration, 3 = I/O or data, 4 = scorer failure
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::string schema_spec;
  std::string scorer_spec = "uniform";
  std::string tokenizer_kind = "word";
  std::string input_path;   // empty = stdin
  std::string output_path;  // empty = stdout
  std::size_t beam = 4;
  std::uint64_t seed = 0;
  std::size_t parallelism = 1;
  bool multitask = false;
};

std::vector<std::string> split_words(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> words;
  std::string word;
  while (in >> word) words.push_back(word);
  return words;
}

std::vector<std::string> read_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::vector<std::string> read_input_lines(const std::string& path) {
  if (path.empty()) return read_lines(std::cin);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw seqlab::Error("cannot open input: " + path);
  return read_lines(in);
}

class OutputStream {
 public:
  explicit OutputStream(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw seqlab::Error("cannot open output: " + path);
    }
  }
  std::ostream& get() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

seqlab::TagSchema resolve_schema(const std::string& spec) {
  if (spec.empty()) throw ConfigError("--schema is required");
  const auto& builtins = seqlab::builtin_schemas();
  auto it = builtins.find(spec);
  if (it != builtins.end()) return it->second;
  try {
    return seqlab::load_schema_file(spec);
  } catch (const seqlab::Error& e) {
    throw ConfigError("schema '" + spec + "' is neither a built-in name nor a readable file: " +
                      e.what());
  }
}

int env_timeout_ms() {
  if (const char* v = std::getenv("SCORER_TIMEOUT_MS")) {
    try {
      return std::stoi(v);
    } catch (const std::exception&) {
      throw ConfigError("SCORER_TIMEOUT_MS is not an integer");
    }
  }
  return 5000;
}

seqlab::ScorerPtr load_table_scorer(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open scorer table: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("scorer table " + path + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("default"))
    throw ConfigError("scorer table must be {\"default\": number, \"entries\": [...]}");
  std::vector<seqlab::TableEntry> entries;
  for (const auto& entry : doc.value("entries", json::array())) {
    seqlab::TableEntry e;
    if (entry.contains("prefix_hash")) {
      e.prefix_hash = entry["prefix_hash"].get<std::uint64_t>();
    } else if (entry.contains("prefix")) {
      auto prefix = entry["prefix"].get<std::vector<seqlab::TokenId>>();
      e.prefix_hash = seqlab::prefix_hash(prefix);
    } else {
      throw ConfigError("table entry needs \"prefix\" or \"prefix_hash\"");
    }
    e.token = entry.at("token").get<seqlab::TokenId>();
    e.logprob = entry.at("logprob").get<double>();
    entries.push_back(e);
  }
  return seqlab::table_scorer(std::move(entries), doc["default"].get<double>());
}

// Scorer specs: uniform | table:PATH | ngram:PATH | gold | remote:URL.
// "gold" is handled by the decode command itself (per-line scorers).
seqlab::ScorerPtr resolve_scorer(const std::string& spec, const seqlab::TagSchema& schema,
                                 const std::shared_ptr<seqlab::Tokenizer>& tokenizer) {
  if (spec == "uniform") return seqlab::uniform_scorer();
  if (spec.rfind("table:", 0) == 0) return load_table_scorer(spec.substr(6));
  if (spec.rfind("ngram:", 0) == 0) {
    std::string path = spec.substr(6);
    std::vector<seqlab::TaggedSentence> corpus;
    try {
      corpus = seqlab::read_tagged(path, schema);
    } catch (const seqlab::Error& e) {
      throw ConfigError("ngram corpus " + path + ": " + e.what());
    }
    try {
      return seqlab::ngram_scorer_train(corpus, schema, tokenizer);
    } catch (const seqlab::ScorerError& e) {
      throw ConfigError(std::string("ngram training: ") + e.what());
    }
  }
  if (spec.rfind("remote:", 0) == 0)
    return seqlab::remote_scorer(spec.substr(7), env_timeout_ms(), 2);
  throw ConfigError("unknown scorer '" + spec +
                    "' (expected uniform | table:PATH | ngram:PATH | gold | remote:URL)");
}

json prf_json(const seqlab::PRF& prf) {
  return json{{"tp", prf.tp},
              {"fp", prf.fp},
              {"fn", prf.fn},
              {"precision", prf.precision},
              {"recall", prf.recall},
              {"f1", prf.f1}};
}

int cmd_decode(const CommonOptions& opt) {
  auto schema = resolve_schema(opt.schema_spec);
  std::shared_ptr<seqlab::Tokenizer> tokenizer = seqlab::make_tokenizer(opt.tokenizer_kind);
  const bool gold_mode = opt.scorer_spec == "gold";
  seqlab::ScorerPtr shared_scorer;
  if (!gold_mode) shared_scorer = resolve_scorer(opt.scorer_spec, schema, tokenizer);

  auto lines = read_input_lines(opt.input_path);

  // Per-line inputs. In gold mode the input lines are tagged text and the
  // tags define the path the scorer prefers.
  std::vector<seqlab::TaggedSentence> golds(lines.size());
  std::vector<std::vector<std::string>> words(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (gold_mode) {
      try {
        golds[i] = seqlab::parse(lines[i], schema);
      } catch (const seqlab::Error& e) {
        throw seqlab::Error("input line " + std::to_string(i + 1) + ": " + e.what());
      }
      words[i] = golds[i].words;
    } else {
      words[i] = split_words(lines[i]);
    }
  }

  // Intern every word in input order so parallel runs stay byte-identical.
  for (const auto& w : words)
    for (const auto& word : w) tokenizer->encode(word);

  std::vector<std::string> outputs(lines.size());
  std::vector<std::string> errors(lines.size());
  std::atomic<bool> scorer_failed{false};
  auto run_one = [&](std::size_t i) {
    try {
      seqlab::DecodeOptions options;
      options.beam_width = opt.beam;
      if (opt.multitask) options.conditioning = seqlab::add_label_prefix(words[i], schema);
      seqlab::ScorerPtr own;
      const seqlab::Scorer* scorer = shared_scorer.get();
      if (gold_mode) {
        own = seqlab::gold_scorer(golds[i], schema, *tokenizer);
        scorer = own.get();
      }
      auto result = seqlab::decode(words[i], schema, *scorer, *tokenizer, options);
      outputs[i] = seqlab::serialize(result.tagged, schema);
    } catch (const seqlab::ScorerError& e) {
      scorer_failed = true;
      errors[i] = e.what();
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  };

  if (opt.parallelism <= 1) {
    for (std::size_t i = 0; i < lines.size(); ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < std::min(opt.parallelism, lines.size()); ++w)
      workers.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < lines.size(); i = next.fetch_add(1))
          run_one(i);
      });
    for (auto& t : workers) t.join();
  }

  bool any_error = false;
  for (std::size_t i = 0; i < errors.size(); ++i)
    if (!errors[i].empty()) {
      any_error = true;
      std::cerr << "line " << (i + 1) << ": " << errors[i] << "\n";
    }
  if (any_error) return scorer_failed ? 4 : 3;

  OutputStream out(opt.output_path);
  for (const auto& line : outputs) out.get() << line << "\n";
  return 0;
}

int cmd_evaluate(const std::string& gold_path, const std::string& pred_path,
                 const CommonOptions& opt) {
  auto schema = resolve_schema(opt.schema_spec);
  auto golds = seqlab::read_tagged(gold_path, schema);
  auto preds = seqlab::read_tagged(pred_path, schema);
  auto report = seqlab::span_f1(golds, preds);
  json doc;
  doc["micro"] = prf_json(report.micro);
  doc["per_label"] = json::object();
  for (const auto& [label, prf] : report.per_label) doc["per_label"][label] = prf_json(prf);
  std::cout << doc.dump(2) << "\n";
  return 0;
}

int cmd_corrupt(const CommonOptions& opt, double density, std::size_t mean_span) {
  auto tokenizer = seqlab::make_tokenizer(opt.tokenizer_kind);
  auto lines = read_input_lines(opt.input_path);
  OutputStream out(opt.output_path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::vector<seqlab::TokenId> tokens;
    for (const auto& word : split_words(lines[i]))
      for (seqlab::TokenId id : tokenizer->encode(word)) tokens.push_back(id);
    if (tokens.empty())
      throw seqlab::Error("input line " + std::to_string(i + 1) + " is empty");
    auto example = seqlab::corrupt_span(tokens, density, mean_span, opt.seed + i);
    out.get() << json{{"source", example.source}, {"target", example.target}}.dump() << "\n";
  }
  return 0;
}

std::map<std::string, double> parse_weights(const std::string& spec) {
  std::map<std::string, double> weights;
  if (spec.empty()) return weights;
  std::istringstream in(spec);
  std::string item;
  while (std::getline(in, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("--weights expects lang=value[,lang=value...]");
    try {
      weights[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw ConfigError("--weights value in '" + item + "' is not a number");
    }
  }
  return weights;
}

int cmd_mix(const CommonOptions& opt, const std::string& weights_spec, std::size_t count) {
  if (opt.input_path.empty()) throw ConfigError("mix requires --input MANIFEST");
  auto shards = seqlab::load_shard_manifest(opt.input_path);
  auto docs = seqlab::sample_mixture(shards, parse_weights(weights_spec), opt.seed, count);
  OutputStream out(opt.output_path);
  for (const auto& doc : docs)
    out.get() << json{{"language", doc.language}, {"text", doc.text}}.dump() << "\n";
  return 0;
}

int cmd_qa_format(const CommonOptions& opt) {
  if (opt.input_path.empty()) throw ConfigError("qa-format requires --input FILE");
  auto items = seqlab::read_qa_jsonl(opt.input_path);
  OutputStream out(opt.output_path);
  for (const auto& item : items) out.get() << seqlab::build_qa_prompt(item) << "\n";
  return 0;
}

int cmd_agree(const std::string& path_a, const std::string& path_b) {
  auto records_a = seqlab::read_rankings_jsonl(path_a);
  auto records_b = seqlab::read_rankings_jsonl(path_b);

  std::map<std::string, const seqlab::RankingRecord*> by_q_a, by_q_b;
  for (const auto& r : records_a) by_q_a.emplace(r.question, &r);
  for (const auto& r : records_b) by_q_b.emplace(r.question, &r);

  auto best_model = [](const seqlab::RankingRecord& r) {
    for (const auto& [model, rank] : r.ranks)
      if (rank == 1) return model;
    throw seqlab::InvalidPermutation("ranking for '" + r.question + "' has no rank 1");
  };

  std::vector<std::string> best_a, best_b;
  double spearman_sum = 0.0;
  std::size_t questions = 0;
  for (const auto& [question, ra] : by_q_a) {
    auto it = by_q_b.find(question);
    if (it == by_q_b.end()) continue;
    const auto& rb = *it->second;
    best_a.push_back(best_model(*ra));
    best_b.push_back(best_model(rb));
    std::vector<double> va, vb;
    for (const auto& [model, rank] : ra->ranks) {
      auto mb = rb.ranks.find(model);
      if (mb == rb.ranks.end()) continue;
      va.push_back(rank);
      vb.push_back(mb->second);
    }
    if (va.size() >= 2) {
      spearman_sum += seqlab::spearman_rank(va, vb);
      ++questions;
    }
  }
  if (questions == 0) throw seqlab::Error("the two files share no rankable question");

  // Aggregate both raters' records for the per-model tallies.
  auto combined = records_a;
  combined.insert(combined.end(), records_b.begin(), records_b.end());
  auto tally = seqlab::rank_aggregate(combined);

  json doc;
  doc["kappa"] = seqlab::cohens_kappa(best_a, best_b);
  doc["avg_spearman"] = spearman_sum / static_cast<double>(questions);
  doc["questions"] = questions;
  doc["best_counts"] = json::object();
  for (const auto& [model, t] : tally) doc["best_counts"][model] = t.best;
  std::cout << doc.dump(2) << "\n";
  return 0;
}

int cmd_convert(const std::string& direction, const CommonOptions& opt) {
  auto schema = resolve_schema(opt.schema_spec);
  if (opt.input_path.empty() || opt.output_path.empty())
    throw ConfigError("convert requires --input and --output");
  if (direction == "bio2tagged") {
    auto sentences = seqlab::read_conll(opt.input_path, schema);
    seqlab::write_tagged(opt.output_path, sentences, schema);
  } else if (direction == "tagged2bio") {
    auto sentences = seqlab::read_tagged(opt.input_path, schema);
    seqlab::write_conll(opt.output_path, sentences);
  } else {
    throw ConfigError("direction must be bio2tagged or tagged2bio");
  }
  return 0;
}

void add_common(CLI::App* cmd, CommonOptions& opt, bool with_schema = true,
                bool with_scorer = false) {
  if (with_schema)
    cmd->add_option("--schema", opt.schema_spec, "Built-in schema name or schema JSON file");
  if (with_scorer) {
    cmd->add_option("--scorer", opt.scorer_spec,
                    "uniform | table:PATH | ngram:PATH | gold | remote:URL");
    cmd->add_option("--beam", opt.beam, "Beam width")->check(CLI::PositiveNumber);
    cmd->add_option("--parallelism", opt.parallelism, "Concurrent sentence decodes")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--multitask", opt.multitask,
                  "Prefix the scorer conditioning with the schema's open markers");
  }
  cmd->add_option("--tokenizer", opt.tokenizer_kind, "word | char")
      ->check(CLI::IsMember({"word", "char"}));
  cmd->add_option("--seed", opt.seed, "RNG seed");
  cmd->add_option("--input", opt.input_path, "Input file (default stdin)");
  cmd->add_option("--output", opt.output_path, "Output file (default stdout)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constrained tag-insertion decoding and evaluation toolkit"};
  app.require_subcommand(1);

  CommonOptions decode_opt;
  auto* decode_cmd = app.add_subcommand(
      "decode", "Annotate input sentences by constrained beam search");
  add_common(decode_cmd, decode_opt, true, true);

  CommonOptions eval_opt;
  std::string gold_path, pred_path;
  auto* eval_cmd = app.add_subcommand("evaluate", "Strict span F1 of predictions against gold");
  eval_cmd->add_option("gold", gold_path, "Gold tagged-text file")->required();
  eval_cmd->add_option("pred", pred_path, "Predicted tagged-text file")->required();
  add_common(eval_cmd, eval_opt);

  CommonOptions corrupt_opt;
  double density = 0.15;
  std::size_t mean_span = 3;
  auto* corrupt_cmd =
      app.add_subcommand("corrupt", "Emit span-corruption examples for input text lines");
  corrupt_cmd->add_option("--density", density, "Fraction of tokens to mask");
  corrupt_cmd->add_option("--mean-span", mean_span, "Mean masked-span length")
      ->check(CLI::PositiveNumber);
  add_common(corrupt_cmd, corrupt_opt, false);

  CommonOptions mix_opt;
  std::string weights_spec;
  std::size_t mix_count = 1000;
  auto* mix_cmd = app.add_subcommand("mix", "Sample a weighted mixture over corpus shards");
  mix_cmd->add_option("--weights", weights_spec, "lang=value[,lang=value...] (default 1)");
  mix_cmd->add_option("--count", mix_count, "Documents to draw");
  add_common(mix_cmd, mix_opt, false);

  CommonOptions qa_opt;
  auto* qa_cmd = app.add_subcommand("qa-format", "Build QA prompts from a QA JSONL file");
  add_common(qa_cmd, qa_opt, false);

  std::string agree_a, agree_b;
  auto* agree_cmd =
      app.add_subcommand("agree", "Inter-annotator agreement between two ranking files");
  agree_cmd->add_option("rater_a", agree_a, "Rankings JSONL of the first rater")->required();
  agree_cmd->add_option("rater_b", agree_b, "Rankings JSONL of the second rater")->required();

  CommonOptions convert_opt;
  std::string direction;
  auto* convert_cmd = app.add_subcommand("convert", "Convert between CoNLL BIO and tagged text");
  convert_cmd->add_option("direction", direction, "bio2tagged | tagged2bio")->required();
  add_common(convert_cmd, convert_opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exit 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(decode_cmd)) return cmd_decode(decode_opt);
    if (app.got_subcommand(eval_cmd)) return cmd_evaluate(gold_path, pred_path, eval_opt);
    if (app.got_subcommand(corrupt_cmd)) return cmd_corrupt(corrupt_opt, density, mean_span);
    if (app.got_subcommand(mix_cmd)) return cmd_mix(mix_opt, weights_spec, mix_count);
    if (app.got_subcommand(qa_cmd)) return cmd_qa_format(qa_opt);
    if (app.got_subcommand(agree_cmd)) return cmd_agree(agree_a, agree_b);
    if (app.got_subcommand(convert_cmd)) return cmd_convert(direction, convert_opt);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const seqlab::ScorerError& e) {
    std::cerr << "scorer error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
