#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "e2t/corpus.hpp"
#include "e2t/embeddings.hpp"
#include "e2t/vocab.hpp"

using namespace e2t;
namespace fs = std::filesystem;

namespace {

struct TempFile {
  fs::path path;
  explicit TempFile(const std::string& name, const std::string& contents) {
    path = fs::temp_directory_path() / ("e2t_test_" + name);
    std::ofstream out(path);
    out << contents;
  }
  ~TempFile() { std::error_code ec; fs::remove(path, ec); }
};

}  // namespace

TEST_CASE("load_corpus basics") {
  TempFile empty("empty.jsonl", "");
  CHECK(load_corpus(empty.path.string()).empty());

  TempFile one("one.jsonl",
               R"({"id":"d1","source_tokens":["new","york","wins"],"target_tokens":["win"],)"
               R"("entities":[{"id":"E:ny","start":0,"end":2}]})"
               "\n");
  auto docs = load_corpus(one.path.string());
  REQUIRE(docs.size() == 1);
  CHECK(docs[0].id == "d1");
  CHECK(docs[0].source_tokens.size() == 3);
  REQUIRE(docs[0].entities.size() == 1);
  CHECK(docs[0].entities[0].entity_id == "E:ny");
  CHECK(docs[0].entities[0].end == 2);
}

TEST_CASE("load_corpus reports the offending line") {
  TempFile bad("bad.jsonl",
               R"({"id":"ok","source_tokens":["a"],"target_tokens":["b"],"entities":[]})"
               "\nnot json\n");
  CHECK_THROWS_WITH_AS(load_corpus(bad.path.string()), doctest::Contains(":2:"),
                       std::runtime_error);

  TempFile span("span.jsonl",
                R"({"id":"d","source_tokens":["a","b"],"target_tokens":["x"],)"
                R"("entities":[{"id":"E1","start":1,"end":3}]})"
                "\n");
  CHECK_THROWS_WITH_AS(load_corpus(span.path.string()),
                       doctest::Contains("exceeds source length"), std::runtime_error);

  TempFile overlap("overlap.jsonl",
                   R"({"id":"d","source_tokens":["a","b","c"],"target_tokens":["x"],)"
                   R"("entities":[{"id":"E1","start":0,"end":2},{"id":"E2","start":1,"end":3}]})"
                   "\n");
  CHECK_THROWS_WITH_AS(load_corpus(overlap.path.string()), doctest::Contains("overlap"),
                       std::runtime_error);

  TempFile empty_src("esrc.jsonl",
                     R"({"id":"d","source_tokens":[],"target_tokens":["x"],"entities":[]})"
                     "\n");
  CHECK_THROWS_AS(load_corpus(empty_src.path.string()), std::runtime_error);
}

TEST_CASE("corpus round trip") {
  std::vector<AnnotatedDocument> docs(2);
  docs[0].id = "a";
  docs[0].source_tokens = {"the", "big", "apple"};
  docs[0].target_tokens = {"apple"};
  docs[0].entities = {{"E:nyc", 0, 3}};
  docs[1].id = "b";
  docs[1].source_tokens = {"x"};
  docs[1].target_tokens = {"y", "z"};
  const fs::path path = fs::temp_directory_path() / "e2t_test_roundtrip.jsonl";
  save_corpus(docs, path.string());
  auto reloaded = load_corpus(path.string());
  CHECK(reloaded == docs);
  fs::remove(path);
}

TEST_CASE("vocabulary build, cap, and ties") {
  // corpus {a:3, b:2, c:1}, cap 6 -> reserved + a, b; c falls to UNK
  std::vector<std::vector<std::string>> seqs = {{"a", "b", "a"}, {"a", "b", "c"}};
  Vocabulary v = Vocabulary::build(seqs, 6);
  CHECK(v.size() == 6);
  CHECK(v.id("a") == 4);
  CHECK(v.id("b") == 5);
  CHECK(v.id("c") == Vocabulary::kUnk);
  CHECK(v.id("never-seen") == Vocabulary::kUnk);
  CHECK(v.token(Vocabulary::kPad) == "<pad>");
  CHECK(v.token(4) == "a");

  // big enough cap keeps everything
  Vocabulary full = Vocabulary::build(seqs, 100);
  CHECK(full.size() == 7);

  // frequency ties break lexicographically
  Vocabulary ties = Vocabulary::build({{"zeta", "beta"}}, 6);
  CHECK(ties.id("beta") == 4);
  CHECK(ties.id("zeta") == 5);

  CHECK_THROWS_AS(Vocabulary::build(seqs, 4), std::invalid_argument);
}

TEST_CASE("vocabulary build is order invariant") {
  std::vector<std::vector<std::string>> a = {{"x", "y"}, {"y", "z", "z"}};
  std::vector<std::vector<std::string>> b = {{"z", "z", "y"}, {"y", "x"}};
  Vocabulary va = Vocabulary::build(a, 10);
  Vocabulary vb = Vocabulary::build(b, 10);
  REQUIRE(va.size() == vb.size());
  for (std::size_t i = 0; i < va.size(); ++i) CHECK(va.token(i) == vb.token(i));
}

TEST_CASE("vocabulary file round trip") {
  Vocabulary v = Vocabulary::build({{"apple", "pear", "apple"}}, 10);
  const fs::path path = fs::temp_directory_path() / "e2t_test_vocab.txt";
  v.save(path.string());
  Vocabulary loaded = Vocabulary::load(path.string());
  REQUIRE(loaded.size() == v.size());
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(loaded.token(i) == v.token(i));
  // line number = id - 4
  std::ifstream in(path);
  std::string first;
  std::getline(in, first);
  CHECK(first == v.token(4));
  fs::remove(path);
}

TEST_CASE("embedding loading and coverage") {
  Vocabulary v = Vocabulary::build({{"cat", "dog", "bird"}}, 10);
  Rng rng(4);

  TempFile full("emb_full.txt",
                "cat 1 2 3\ndog 4 5 6\nbird 7 8 9\nunrelated 0 0 0\n");
  EmbeddingMatrix all = load_embeddings(full.path.string(), v, 3, rng);
  CHECK(all.coverage == 1.0);
  CHECK(all.matrix.at2(static_cast<std::size_t>(v.id("cat")), 0) == 1.0);
  CHECK(all.matrix.at2(static_cast<std::size_t>(v.id("dog")), 2) == 6.0);

  TempFile none("emb_none.txt", "");
  EmbeddingMatrix empty = load_embeddings(none.path.string(), v, 3, rng);
  CHECK(empty.coverage == 0.0);
  CHECK(empty.matched == 0);

  TempFile partial("emb_partial.txt", "cat 1 1 1\nhorse 2 2 2\n");
  EmbeddingMatrix part = load_embeddings(partial.path.string(), v, 3, rng);
  CHECK(part.matched == 1);
  CHECK(part.coverage == doctest::Approx(1.0 / 3.0));

  TempFile bad("emb_bad.txt", "cat 1 2 3\ndog 4 5\n");
  CHECK_THROWS_WITH_AS(load_embeddings(bad.path.string(), v, 3, rng),
                       doctest::Contains(":2:"), std::runtime_error);
}

TEST_CASE("gazetteer longest match") {
  Gazetteer g;
  g.add({"new", "york"}, "E:ny");
  g.add({"new", "york", "mets"}, "E:mets");

  auto mentions = g.annotate({"new", "york", "mets"});
  REQUIRE(mentions.size() == 1);
  CHECK(mentions[0].entity_id == "E:mets");
  CHECK(mentions[0].start == 0);
  CHECK(mentions[0].end == 3);

  CHECK(g.annotate({"boston", "red", "sox"}).empty());

  Gazetteer ab;
  ab.add({"a", "b"}, "E");
  auto two = ab.annotate({"a", "b", "a", "b"});
  REQUIRE(two.size() == 2);
  CHECK(two[0].start == 0);
  CHECK(two[0].end == 2);
  CHECK(two[1].start == 2);
  CHECK(two[1].end == 4);
}

TEST_CASE("gazetteer is case-insensitive and spans stay valid") {
  Gazetteer g;
  g.add({"New", "York"}, "E:ny");
  g.add({"york"}, "E:city");
  auto mentions = g.annotate({"NEW", "YORK", "york", "New"});
  REQUIRE(mentions.size() == 2);
  CHECK(mentions[0].entity_id == "E:ny");
  CHECK(mentions[1].entity_id == "E:city");
  // output satisfies the mention invariants: sorted, non-overlapping
  for (std::size_t i = 0; i < mentions.size(); ++i) {
    CHECK(mentions[i].start < mentions[i].end);
    if (i) CHECK(mentions[i].start >= mentions[i - 1].end);
  }
}

TEST_CASE("gazetteer file format") {
  TempFile file("gaz.tsv", "new york\tE:ny\nnew york mets\tE:mets\n");
  Gazetteer g = Gazetteer::load(file.path.string());
  CHECK(g.size() == 2);
  TempFile bad("gaz_bad.tsv", "no tab here\n");
  CHECK_THROWS_WITH_AS(Gazetteer::load(bad.path.string()), doctest::Contains(":1:"),
                       std::runtime_error);
}

TEST_CASE("corpus stats") {
  AnnotatedDocument d1;
  d1.source_tokens.assign(10, "w");
  d1.target_tokens.assign(2, "t");
  d1.entities = {{"E1", 0, 1}, {"E2", 2, 3}, {"E3", 4, 5}};
  StatsReport one = corpus_stats({d1});
  CHECK(one.num_documents == 1);
  CHECK(one.avg_input_words == 10.0);
  CHECK(one.avg_output_words == 2.0);
  CHECK(one.min_input_entities == 3);
  CHECK(one.max_input_entities == 3);
  CHECK(one.avg_input_entities == 3.0);

  AnnotatedDocument d2 = d1;
  d2.entities = {{"E1", 0, 1}, {"E2", 2, 3}, {"E3", 4, 5}, {"E4", 6, 7}};
  AnnotatedDocument d3 = d1;
  d3.entities = {{"E1", 0, 1}, {"E2", 2, 3}};
  StatsReport two = corpus_stats({d3, d2});
  CHECK(two.min_input_entities == 2);
  CHECK(two.max_input_entities == 4);
  CHECK(two.avg_input_entities == 3.0);

  CHECK_THROWS_AS(corpus_stats({}), std::invalid_argument);

  const std::string text = one.to_string();
  CHECK(text.find("num(data)\t1") != std::string::npos);
  CHECK(text.find("avg(inputEntity)\t3") != std::string::npos);
}
