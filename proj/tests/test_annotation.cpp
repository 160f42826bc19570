#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "seqlab/annotation.hpp"

using namespace seqlab;

namespace {

const std::vector<std::string> kCardio{"Patient", "with", "dilated", "cardiomyopathy"};

TagSchema disease_schema() { return make_schema("t", {"Disease"}); }

}  // namespace

TEST_CASE("serialize places markers at span boundaries") {
  auto schema = disease_schema();
  TaggedSentence ts{kCardio, {{2, 4, "Disease"}}};
  CHECK(serialize(ts, schema) == "Patient with <Disease> dilated cardiomyopathy </Disease>");
}

TEST_CASE("serialize without spans is the identity on words") {
  auto schema = disease_schema();
  TaggedSentence ts{kCardio, {}};
  CHECK(serialize(ts, schema) == "Patient with dilated cardiomyopathy");
}

TEST_CASE("serialize single-word span") {
  auto schema = make_schema("t", {"Claim"});
  TaggedSentence ts{{"a"}, {{0, 1, "Claim"}}};
  CHECK(serialize(ts, schema) == "<Claim> a </Claim>");
}

TEST_CASE("serialize rejects labels outside the schema") {
  auto schema = disease_schema();
  TaggedSentence ts{{"a"}, {{0, 1, "Chemical"}}};
  CHECK_THROWS_AS(serialize(ts, schema), LabelNotInSchema);
}

TEST_CASE("parse inverts serialize") {
  auto schema = disease_schema();
  auto ts = parse("Patient with <Disease> dilated cardiomyopathy </Disease>", schema);
  CHECK(ts.words == kCardio);
  REQUIRE(ts.spans.size() == 1);
  CHECK(ts.spans[0] == Span{2, 4, "Disease"});
}

TEST_CASE("parse error cases") {
  auto schema = make_schema("t", {"Claim", "Premise", "Disease"});
  CHECK_THROWS_AS(parse("<Disease> </Disease> x", schema), EmptySpan);
  CHECK_THROWS_AS(parse("<Claim> a <Premise> b </Premise> </Claim>", schema), NestedTag);
  CHECK_THROWS_AS(parse("a </Claim>", schema), UnbalancedTag);
  CHECK_THROWS_AS(parse("<Claim> a", schema), UnbalancedTag);
  CHECK_THROWS_AS(parse("<Claim> a </Premise>", schema), UnbalancedTag);
  CHECK_THROWS_AS(parse("<Foo> a </Foo>", schema), UnknownTag);
  CHECK_THROWS_AS(parse("a", schema, &kCardio), WordMismatch);
}

TEST_CASE("parse accepts markers attached to adjacent words") {
  auto schema = disease_schema();
  auto expect = parse("Patient with <Disease> dilated cardiomyopathy </Disease>", schema);
  CHECK(parse("Patient with <Disease>dilated cardiomyopathy</Disease>", schema) == expect);
  CHECK(parse("Patient with <Disease>dilated cardiomyopathy </Disease>", schema) == expect);
}

TEST_CASE("parse treats a lone '<' as a word character") {
  auto schema = disease_schema();
  auto ts = parse("a<b c", schema);
  CHECK(ts.words == std::vector<std::string>{"a<b", "c"});
  CHECK(ts.spans.empty());
}

TEST_CASE("parse of empty text is the empty sentence") {
  auto schema = disease_schema();
  auto ts = parse("", schema);
  CHECK(ts.words.empty());
  CHECK(ts.spans.empty());
}

TEST_CASE("to_bio basics") {
  TaggedSentence ts{kCardio, {{2, 4, "Disease"}}};
  CHECK(to_bio(ts) == std::vector<std::string>{"O", "O", "B-Disease", "I-Disease"});
  CHECK(to_bio(TaggedSentence{kCardio, {}}) == std::vector<std::string>{"O", "O", "O", "O"});
  TaggedSentence adjacent{{"a", "b"}, {{0, 1, "Claim"}, {1, 2, "Claim"}}};
  CHECK(to_bio(adjacent) == std::vector<std::string>{"B-Claim", "B-Claim"});
}

TEST_CASE("from_bio inverts to_bio") {
  auto schema = make_schema("t", {"Disease", "Claim"});
  for (auto ts : {TaggedSentence{kCardio, {{2, 4, "Disease"}}}, TaggedSentence{kCardio, {}},
                  TaggedSentence{{"a", "b"}, {{0, 1, "Claim"}, {1, 2, "Claim"}}}}) {
    CHECK(from_bio(ts.words, to_bio(ts), schema) == ts);
  }
  CHECK(from_bio({}, {}, schema) == TaggedSentence{});
}

TEST_CASE("from_bio error cases") {
  auto schema = disease_schema();
  CHECK_THROWS_AS(from_bio({"a", "b"}, {"O"}, schema), LengthMismatch);
  CHECK_THROWS_AS(from_bio({"a", "b"}, {"O", "I-Disease"}, schema), DanglingInside);
  CHECK_THROWS_AS(from_bio({"a", "b"}, {"B-Claim", "O"}, schema), UnknownLabel);
  CHECK_THROWS_AS(from_bio({"a"}, {"X-Disease"}, schema), UnknownLabel);
  // I- after a different label does not continue the span
  auto schema2 = make_schema("t", {"A", "B"});
  CHECK_THROWS_AS(from_bio({"a", "b"}, {"B-A", "I-B"}, schema2), DanglingInside);
}

TEST_CASE("round trip: parse(serialize(ts)) == ts over random sentences") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 2000; ++i) {
    auto schema = testutil::random_schema(rng);
    auto words = testutil::random_words(rng, testutil::rand_below(rng, 8));
    auto ts = testutil::random_sentence(rng, words, schema);
    auto text = serialize(ts, schema);
    CHECK(parse(text, schema, &ts.words) == ts);
    CHECK(from_bio(ts.words, to_bio(ts), schema) == ts);
  }
}

TEST_CASE("parse with source_words rejects mutated outputs") {
  std::mt19937_64 rng(22);
  auto schema = disease_schema();
  for (int i = 0; i < 500; ++i) {
    auto words = testutil::random_words(rng, 1 + testutil::rand_below(rng, 6));
    auto ts = testutil::random_sentence(rng, words, schema);
    auto text = serialize(ts, schema);

    auto mutated = words;
    switch (testutil::rand_below(rng, 3)) {
      case 0:  // drop a word
        mutated.erase(mutated.begin() +
                      static_cast<std::ptrdiff_t>(testutil::rand_below(rng, mutated.size())));
        break;
      case 1:  // duplicate a word
        mutated.push_back(mutated[testutil::rand_below(rng, mutated.size())]);
        break;
      default:  // change a word
        mutated[testutil::rand_below(rng, mutated.size())] += "zq";
        break;
    }
    CHECK_THROWS_AS(parse(text, schema, &mutated), WordMismatch);
  }
}
