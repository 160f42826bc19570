#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "helpers.hpp"

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

const char* binary() {
  const char* bin = std::getenv("SEQLAB_BIN");
  REQUIRE_MESSAGE(bin != nullptr, "SEQLAB_BIN must point at the seqlab binary");
  return bin;
}

RunResult run(const std::string& args, const testutil::TempDir& dir) {
  auto out_path = dir.file("__stdout");
  auto err_path = dir.file("__stderr");
  std::string cmd =
      std::string(binary()) + " " + args + " > " + out_path + " 2> " + err_path;
  int status = std::system(cmd.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = testutil::read_file(out_path);
  result.err = testutil::read_file(err_path);
  return result;
}

}  // namespace

TEST_CASE("--help exits 0 for every command") {
  testutil::TempDir dir;
  for (const char* cmd : {"", "decode", "evaluate", "corrupt", "mix", "qa-format", "agree",
                          "convert"}) {
    auto r = run(std::string(cmd) + (*cmd ? " --help" : "--help"), dir);
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("--help") != std::string::npos);
  }
}

TEST_CASE("decode with the gold scorer reproduces the gold file byte for byte") {
  testutil::TempDir dir;
  std::string gold =
      "Patient with <Disease> dilated cardiomyopathy </Disease>\n"
      "no entities in this one\n"
      "<Disease> flu </Disease> treated\n";
  testutil::write_file(dir.file("gold.txt"), gold);
  auto r = run("decode --schema ncbi-disease --scorer gold --input " + dir.file("gold.txt") +
                   " --output " + dir.file("pred.txt"),
               dir);
  REQUIRE(r.exit_code == 0);
  CHECK(testutil::read_file(dir.file("pred.txt")) == gold);
}

TEST_CASE("decode with uniform scorer at beam 1 leaves all words bare") {
  testutil::TempDir dir;
  testutil::write_file(dir.file("in.txt"), "alpha beta gamma\ndelta\n");
  auto r = run("decode --schema ncbi-disease --scorer uniform --beam 1 --input " +
                   dir.file("in.txt"),
               dir);
  REQUIRE(r.exit_code == 0);
  CHECK(r.out == "alpha beta gamma\ndelta\n");
}

TEST_CASE("decode is byte-identical across runs and parallelism settings") {
  testutil::TempDir dir;
  testutil::write_file(dir.file("in.txt"), "aa bb cc\ndd ee\nff gg hh ii\n");
  std::string base = "decode --schema abstrct --scorer uniform --beam 4 --input " +
                     dir.file("in.txt");
  auto r1 = run(base, dir);
  auto r2 = run(base, dir);
  auto r4 = run(base + " --parallelism 4", dir);
  REQUIRE(r1.exit_code == 0);
  CHECK(r1.out == r2.out);
  CHECK(r1.out == r4.out);
}

TEST_CASE("decode honors a multitask conditioning prefix") {
  testutil::TempDir dir;
  testutil::write_file(dir.file("in.txt"), "x y\n");
  auto r = run("decode --schema ncbi-disease --scorer uniform --multitask --input " +
                   dir.file("in.txt"),
               dir);
  REQUIRE(r.exit_code == 0);
  CHECK(r.out == "x y\n");
}

TEST_CASE("decode with a missing schema exits 2") {
  testutil::TempDir dir;
  testutil::write_file(dir.file("in.txt"), "x\n");
  auto r = run("decode --schema " + dir.file("absent.json") + " --input " + dir.file("in.txt"),
               dir);
  CHECK(r.exit_code == 2);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("decode with an unreachable remote scorer exits 4") {
  testutil::TempDir dir;
  testutil::write_file(dir.file("in.txt"), "x\n");
  auto r = run("decode --schema ncbi-disease --scorer remote:http://127.0.0.1:1 --input " +
                   dir.file("in.txt"),
               dir);
  CHECK(r.exit_code == 4);
}

TEST_CASE("decode with an ngram scorer recovers its training annotations") {
  testutil::TempDir dir;
  std::string corpus =
      "the doctor saw <Disease> flu </Disease> today\n"
      "we saw <Disease> flu </Disease> again\n"
      "they saw <Disease> flu </Disease> yesterday\n";
  testutil::write_file(dir.file("corpus.txt"), corpus);
  testutil::write_file(dir.file("in.txt"), "we saw flu again\n");
  auto r = run("decode --schema ncbi-disease --scorer ngram:" + dir.file("corpus.txt") +
                   " --input " + dir.file("in.txt"),
               dir);
  REQUIRE(r.exit_code == 0);
  CHECK(r.out == "we saw <Disease> flu </Disease> again\n");
}

TEST_CASE("evaluate prints the F1 report as JSON") {
  testutil::TempDir dir;
  testutil::write_file(dir.file("gold.txt"),
                       "<Disease> a b </Disease> c d e\n");
  testutil::write_file(dir.file("pred.txt"),
                       "<Disease> a b </Disease> c <Disease> d </Disease> e\n");
  auto r = run("evaluate " + dir.file("gold.txt") + " " + dir.file("pred.txt") +
                   " --schema ncbi-disease",
               dir);
  REQUIRE(r.exit_code == 0);
  auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["micro"]["precision"].get<double>() == 0.5);
  CHECK(doc["micro"]["recall"].get<double>() == 1.0);
  CHECK(doc["micro"]["f1"].get<double>() == doctest::Approx(0.6667).epsilon(1e-4));
}

TEST_CASE("evaluate with mismatched files exits 3") {
  testutil::TempDir dir;
  testutil::write_file(dir.file("gold.txt"), "a b\nc\n");
  testutil::write_file(dir.file("pred.txt"), "a b\n");
  auto r = run("evaluate " + dir.file("gold.txt") + " " + dir.file("pred.txt") +
                   " --schema ncbi-disease",
               dir);
  CHECK(r.exit_code == 3);
}

TEST_CASE("corrupt with density 0 echoes the tokenized input") {
  testutil::TempDir dir;
  testutil::write_file(dir.file("in.txt"), "a b c d\n");
  auto r = run("corrupt --density 0 --input " + dir.file("in.txt"), dir);
  REQUIRE(r.exit_code == 0);
  auto doc = nlohmann::json::parse(r.out);
  // the word tokenizer interns in first-encounter order
  CHECK(doc["source"].get<std::vector<long long>>() ==
        std::vector<long long>{1000, 1001, 1002, 1003});
  CHECK(doc["target"].size() == 1);
}

TEST_CASE("corrupt is deterministic under a fixed seed") {
  testutil::TempDir dir;
  testutil::write_file(dir.file("in.txt"), "q w e r t y u i o p a s\nd f g h j k l z x c v b\n");
  auto r1 = run("corrupt --density 0.3 --seed 9 --input " + dir.file("in.txt"), dir);
  auto r2 = run("corrupt --density 0.3 --seed 9 --input " + dir.file("in.txt"), dir);
  auto r3 = run("corrupt --density 0.3 --seed 10 --input " + dir.file("in.txt"), dir);
  REQUIRE(r1.exit_code == 0);
  CHECK(r1.out == r2.out);
  CHECK(r1.out != r3.out);
}

TEST_CASE("mix draws a deterministic weighted stream") {
  testutil::TempDir dir;
  testutil::write_file(dir.file("it.txt"), "uno due\ntre quattro\n");
  testutil::write_file(dir.file("en.txt"), "one two\nthree four\n");
  testutil::write_file(dir.file("manifest.jsonl"),
                       "{\"language\": \"it\", \"path\": \"it.txt\"}\n"
                       "{\"language\": \"en\", \"path\": \"en.txt\"}\n");
  std::string cmd = "mix --input " + dir.file("manifest.jsonl") +
                    " --weights it=2,en=1 --count 40 --seed 3";
  auto r1 = run(cmd, dir);
  auto r2 = run(cmd, dir);
  REQUIRE(r1.exit_code == 0);
  CHECK(r1.out == r2.out);
  std::size_t lines = 0, italian = 0;
  std::istringstream in(r1.out);
  std::string line;
  while (std::getline(in, line)) {
    ++lines;
    if (nlohmann::json::parse(line)["language"] == "it") ++italian;
  }
  CHECK(lines == 40);
  CHECK(italian > 15);  // weighted share 2/3 of 40

  auto bad = run("mix --input " + dir.file("manifest.jsonl") + " --weights it", dir);
  CHECK(bad.exit_code == 2);
}

TEST_CASE("qa-format renders prompts one per line") {
  testutil::TempDir dir;
  testutil::write_file(
      dir.file("qa.jsonl"),
      "{\"question\": \"Q1\", \"snippets\": [\"s1\", \"s2\"], \"ideal_answers\": [\"a\"]}\n"
      "{\"question\": \"Q2\", \"snippets\": [\"s3\"], \"ideal_answers\": [\"a\"]}\n");
  auto r = run("qa-format --input " + dir.file("qa.jsonl"), dir);
  REQUIRE(r.exit_code == 0);
  CHECK(r.out == "question: Q1 context: s1 s2\nquestion: Q2 context: s3\n");

  testutil::write_file(dir.file("bad.jsonl"), "{\"question\": \"Q\"}\n");
  CHECK(run("qa-format --input " + dir.file("bad.jsonl"), dir).exit_code == 3);
}

TEST_CASE("agree on identical rating files reports kappa 1.0") {
  testutil::TempDir dir;
  std::string ranks =
      "{\"question\": \"q1\", \"rater\": \"r\", \"ranks\": {\"A\": 1, \"B\": 2, \"C\": 3, \"D\": 4}}\n"
      "{\"question\": \"q2\", \"rater\": \"r\", \"ranks\": {\"A\": 2, \"B\": 1, \"C\": 4, \"D\": 3}}\n";
  testutil::write_file(dir.file("a.jsonl"), ranks);
  testutil::write_file(dir.file("b.jsonl"), ranks);
  auto r = run("agree " + dir.file("a.jsonl") + " " + dir.file("b.jsonl"), dir);
  REQUIRE(r.exit_code == 0);
  auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["kappa"].get<double>() == 1.0);
  CHECK(doc["avg_spearman"].get<double>() == 1.0);
  CHECK(doc["questions"].get<int>() == 2);
}

TEST_CASE("convert round-trips bio -> tagged -> bio") {
  testutil::TempDir dir;
  std::string conll =
      "Patient O\n"
      "with O\n"
      "dilated B-Disease\n"
      "cardiomyopathy I-Disease\n"
      "\n"
      "fine O\n"
      "\n";
  testutil::write_file(dir.file("in.conll"), conll);
  auto r1 = run("convert bio2tagged --schema ncbi-disease --input " + dir.file("in.conll") +
                    " --output " + dir.file("mid.tagged"),
                dir);
  REQUIRE(r1.exit_code == 0);
  CHECK(testutil::read_file(dir.file("mid.tagged")) ==
        "Patient with <Disease> dilated cardiomyopathy </Disease>\nfine\n");
  auto r2 = run("convert tagged2bio --schema ncbi-disease --input " + dir.file("mid.tagged") +
                    " --output " + dir.file("out.conll"),
                dir);
  REQUIRE(r2.exit_code == 0);
  CHECK(testutil::read_file(dir.file("out.conll")) == conll);

  auto bad = run("convert sideways --schema ncbi-disease --input x --output y", dir);
  CHECK(bad.exit_code == 2);
}

TEST_CASE("unknown flags and missing subcommands exit 2") {
  testutil::TempDir dir;
  CHECK(run("decode --schema ncbi-disease --no-such-flag", dir).exit_code == 2);
  CHECK(run("", dir).exit_code == 2);
  CHECK(run("decode --schema ncbi-disease --scorer bogus --input /dev/null", dir).exit_code == 2);
}
