#include <doctest.h>

#include "kgalign/kg_store.hpp"
#include "kgalign/rng.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace kgalign;
using testutil::TempDir;
using testutil::write_file;

namespace {

Vocab tiny_vocab() {
  return Vocab::from_tokens({"<unk>", "<mask>", "<cls>", "a", "thing", "is", "node"});
}

// writes a random graph fixture and returns (triples_path, descriptions_path)
struct Fixture {
  TempDir dir;
  std::string triples_path;
  std::string desc_path;
  std::vector<Triple> raw;  // same ids the loader will assign
  int n;

  Fixture(int n_entities, int n_triples, uint64_t seed) : dir("kg"), n(n_entities) {
    Rng rng(seed);
    std::string triples, descs;
    for (int e = 0; e < n_entities; ++e)
      descs += "e" + std::to_string(e) + "\tE" + std::to_string(e) + "\ta thing\n";
    for (int i = 0; i < n_triples; ++i) {
      int h = rng.uniform_int(n_entities);
      int t = rng.uniform_int(n_entities);
      int r = rng.uniform_int(4);
      raw.push_back({h, r, t});
      triples += "e" + std::to_string(h) + "\tr" + std::to_string(r) + "\te" +
                 std::to_string(t) + "\n";
    }
    triples_path = dir.file("triples.tsv");
    desc_path = dir.file("descs.tsv");
    write_file(triples_path, triples);
    write_file(desc_path, descs);
  }
};

}  // namespace

TEST_SUITE_BEGIN("kg_store");

TEST_CASE("tokenizer lowercases, splits and strips punctuation") {
  Vocab v = tiny_vocab();
  auto ids = v.tokenize("A THING, is (a) thing!");
  CHECK(ids == std::vector<int>{3, 4, 5, 3, 4});
  CHECK(v.tokenize("zzz unseen") == std::vector<int>{Vocab::kUnk, Vocab::kUnk});
  CHECK(v.tokenize("   ") == std::vector<int>{});
}

TEST_CASE("two-line triple file loads with expected degrees") {
  TempDir dir("kg2");
  write_file(dir.file("t.tsv"), "a\tr1\tb\nb\tr2\tc\n");
  write_file(dir.file("d.tsv"), "a\tA\talpha\nb\tB\tbeta\nc\tC\tgamma\n");
  KnowledgeGraph g = load_graph(dir.file("t.tsv"), dir.file("d.tsv"), tiny_vocab());
  CHECK(g.num_entities() == 3);
  CHECK(g.num_file_relations() == 2);
  CHECK(g.triples.size() == 2);
  CHECK(g.degree[g.entity_id("a")] == 1);
  CHECK(g.degree[g.entity_id("b")] == 2);
  CHECK(g.degree[g.entity_id("c")] == 1);
  // ids dense, by first appearance in the descriptions file
  CHECK(g.entity_id("a") == 0);
  CHECK(g.entity_id("c") == 2);
  // reserved relations sit after the file relations
  CHECK(g.interact_relation() == 2);
  CHECK(g.self_relation() == 3);
}

TEST_CASE("empty triple file still yields entities") {
  TempDir dir("kg_empty");
  write_file(dir.file("t.tsv"), "");
  write_file(dir.file("d.tsv"), "only\tOnly\tsome thing\n");
  KnowledgeGraph g = load_graph(dir.file("t.tsv"), dir.file("d.tsv"), tiny_vocab());
  CHECK(g.num_entities() == 1);
  CHECK(g.triples.empty());
  CHECK(g.degree[0] == 0);
}

TEST_CASE("blank description falls back to a single UNK token") {
  TempDir dir("kg_blank");
  write_file(dir.file("t.tsv"), "");
  write_file(dir.file("d.tsv"), "x\tX\t\n");
  KnowledgeGraph g = load_graph(dir.file("t.tsv"), dir.file("d.tsv"), tiny_vocab());
  CHECK(g.entities[0].desc == std::vector<int>{Vocab::kUnk});
}

TEST_CASE("load errors name the offending line") {
  TempDir dir("kg_err");
  write_file(dir.file("d.tsv"), "a\tA\tx\n");
  write_file(dir.file("t.tsv"), "a\tr\tmissing\n");
  CHECK_THROWS_WITH_AS(load_graph(dir.file("t.tsv"), dir.file("d.tsv"), tiny_vocab()),
                       doctest::Contains(":1"), std::runtime_error);
  CHECK_THROWS_WITH_AS(load_graph(dir.file("t.tsv"), dir.file("d.tsv"), tiny_vocab()),
                       doctest::Contains("missing"), std::runtime_error);

  write_file(dir.file("dup.tsv"), "a\tA\tx\na\tA2\ty\n");
  write_file(dir.file("t0.tsv"), "");
  CHECK_THROWS_WITH_AS(load_graph(dir.file("t0.tsv"), dir.file("dup.tsv"), tiny_vocab()),
                       doctest::Contains("duplicate"), std::runtime_error);
}

TEST_CASE("self-loops contribute two to the degree") {
  TempDir dir("kg_loop");
  write_file(dir.file("t.tsv"), "a\tr\ta\n");
  write_file(dir.file("d.tsv"), "a\tA\tx\n");
  KnowledgeGraph g = load_graph(dir.file("t.tsv"), dir.file("d.tsv"), tiny_vocab());
  CHECK(g.degree[0] == 2);
}

TEST_CASE("degrees on a random fixture match an independent recount") {
  Fixture f(50, 180, 17);
  KnowledgeGraph g = load_graph(f.triples_path, f.desc_path, tiny_vocab());
  auto expected = oracles::recount_degrees(f.n, g.triples);
  CHECK(g.degree == expected);
  int sum = 0;
  for (int d : g.degree) sum += d;
  CHECK(sum == 2 * static_cast<int>(g.triples.size()));
}

TEST_CASE("khop on a chain") {
  TempDir dir("kg_chain");
  write_file(dir.file("t.tsv"), "a\tr\tb\nb\tr\tc\n");
  write_file(dir.file("d.tsv"), "a\tA\tx\nb\tB\tx\nc\tC\tx\n");
  KnowledgeGraph g = load_graph(dir.file("t.tsv"), dir.file("d.tsv"), tiny_vocab());
  EntityId a = g.entity_id("a"), b = g.entity_id("b"), c = g.entity_id("c");

  auto r1 = khop_reach(g, {a}, 1);
  REQUIRE(r1.size() == 1);
  CHECK(r1.at(b).dist == 1);
  CHECK(r1.at(b).seeds == std::set<EntityId>{a});

  auto r2 = khop_reach(g, {a, c}, 1);
  REQUIRE(r2.size() == 1);
  CHECK(r2.at(b).dist == 1);
  CHECK(r2.at(b).seeds == std::set<EntityId>{a, c});

  auto r3 = khop_reach(g, {a}, 2);
  CHECK(r3.size() == 2);
  CHECK(r3.at(c).dist == 2);

  CHECK_THROWS_AS(khop_reach(g, {99}, 1), std::invalid_argument);
  CHECK_THROWS_AS(khop_reach(g, {a}, 0), std::invalid_argument);
}

TEST_CASE("khop equals Floyd-Warshall reachability on a random graph") {
  Fixture f(50, 140, 23);
  KnowledgeGraph g = load_graph(f.triples_path, f.desc_path, tiny_vocab());
  auto d = oracles::floyd_warshall(f.n, g.triples);
  std::set<EntityId> seeds{3, 17, 41};
  for (int k = 1; k <= 3; ++k) {
    auto reach = khop_reach(g, seeds, k);
    for (int e = 0; e < f.n; ++e) {
      if (seeds.count(e)) {
        CHECK(reach.count(e) == 0);
        continue;
      }
      int best = oracles::kInf;
      std::set<EntityId> within;
      for (EntityId s : seeds) {
        best = std::min(best, d[s][e]);
        if (d[s][e] <= k) within.insert(s);
      }
      if (!within.empty()) {
        REQUIRE(reach.count(e) == 1);
        CHECK(reach.at(e).dist == best);
        CHECK(reach.at(e).seeds == within);
      } else {
        CHECK(reach.count(e) == 0);
      }
    }
  }
}

TEST_CASE("khop is monotone in k") {
  Fixture f(40, 100, 5);
  KnowledgeGraph g = load_graph(f.triples_path, f.desc_path, tiny_vocab());
  std::set<EntityId> seeds{1, 2};
  auto prev = khop_reach(g, seeds, 1);
  for (int k = 2; k <= 4; ++k) {
    auto cur = khop_reach(g, seeds, k);
    for (const auto& [e, info] : prev) {
      REQUIRE(cur.count(e) == 1);
      CHECK(cur.at(e).dist == info.dist);
    }
    prev = cur;
  }
}

TEST_CASE("connecting triples: direction preserved, oracle equivalence") {
  TempDir dir("kg_conn");
  write_file(dir.file("t.tsv"), "a\tr\tb\n");
  write_file(dir.file("d.tsv"), "a\tA\tx\nb\tB\tx\n");
  KnowledgeGraph g = load_graph(dir.file("t.tsv"), dir.file("d.tsv"), tiny_vocab());
  auto both = connecting_triples(g, {0, 1});
  REQUIRE(both.size() == 1);
  CHECK(both[0].head == g.entity_id("a"));
  CHECK(both[0].tail == g.entity_id("b"));
  CHECK(connecting_triples(g, {g.entity_id("a")}).empty());

  Fixture f(30, 90, 77);
  KnowledgeGraph big = load_graph(f.triples_path, f.desc_path, tiny_vocab());
  Rng rng(4);
  std::set<EntityId> nodes;
  while (nodes.size() < 12) nodes.insert(rng.uniform_int(f.n));
  auto got = connecting_triples(big, nodes);
  auto expected = oracles::connecting_scan(big.triples, nodes);
  REQUIRE(got.size() == expected.size());
  for (size_t i = 0; i < got.size(); ++i) CHECK(got[i] == expected[i]);
}

TEST_SUITE_END();
