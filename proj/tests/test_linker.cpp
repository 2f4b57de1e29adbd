#include <doctest.h>

#include <algorithm>
#include <set>

#include "awn/linker.hpp"
#include "fixture_micro.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace awn;

TEST_CASE("cluster_similarity") {
  SUBCASE("identical vectors") {
    auto emb = testutil::make_embeddings({{"a", {1, 0}}, {"b", {1, 0}}, {"c", {1, 0}}});
    std::vector<int> c1{0, 1}, c2{1, 2};
    CHECK(linker::cluster_similarity(c1, c2, emb.matrix) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("orthogonal singletons") {
    auto emb = testutil::make_embeddings({{"a", {1, 0}}, {"b", {0, 1}}});
    std::vector<int> c1{0}, c2{1};
    CHECK(linker::cluster_similarity(c1, c2, emb.matrix) == 0.0);
  }
  SUBCASE("pair enumeration with a diagonal cluster") {
    auto emb = testutil::make_embeddings({{"a", {1, 0}}, {"b", {0, 1}}, {"d", {1, 1}}});
    std::vector<int> c1{0, 1}, c2{2};
    CHECK(linker::cluster_similarity(c1, c2, emb.matrix) ==
          doctest::Approx(0.7071067811865475).epsilon(1e-9));
  }
  SUBCASE("empty cluster is an error") {
    auto emb = testutil::make_embeddings({{"a", {1, 0}}});
    std::vector<int> c1{0}, c2;
    CHECK_THROWS_AS(static_cast<void>(linker::cluster_similarity(c1, c2, emb.matrix)),
                    std::invalid_argument);
  }
}

TEST_CASE("cluster_similarity is exactly symmetric on random clusters") {
  DetRng rng(77);
  std::vector<std::pair<std::string, std::vector<double>>> entries;
  for (int i = 0; i < 20; ++i) {
    std::vector<double> v(5);
    for (auto& x : v) x = rng.next_normal();
    entries.push_back({"w" + std::to_string(i), v});
  }
  auto emb = testutil::make_embeddings(entries);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> c1, c2;
    for (int i = 0; i < 20; ++i) {
      if (rng.next_double() < 0.3) c1.push_back(i);
      if (rng.next_double() < 0.3) c2.push_back(i);
    }
    if (c1.empty() || c2.empty()) continue;
    CHECK(linker::cluster_similarity(c1, c2, emb.matrix) ==
          linker::cluster_similarity(c2, c1, emb.matrix));
    CHECK(linker::is_similar(c1, c2, emb.matrix) == linker::is_similar(c2, c1, emb.matrix));
  }
}

TEST_CASE("is_similar") {
  SUBCASE("reflexive, including the equality case") {
    auto emb = testutil::make_embeddings({{"a", {1, 0}}, {"b", {0.9, 0.1}}});
    std::vector<int> c{0, 1};
    CHECK(linker::is_similar(c, c, emb.matrix));
  }
  SUBCASE("tight orthogonal clusters are not similar") {
    auto emb = testutil::make_embeddings(
        {{"a", {1, 0}}, {"b", {1, 0}}, {"c", {0, 1}}, {"d", {0, 1}}});
    std::vector<int> c1{0, 1}, c2{2, 3};
    CHECK_FALSE(linker::is_similar(c1, c2, emb.matrix));
  }
}

TEST_CASE("assign_synset on the dalle fixture") {
  auto world = fixture::make_dalle_world();
  const int dalle = world->word("dalle");
  auto cands = world->gen->candidates(dalle);
  purifier::PurifyConfig cfg;  // n=5, minCos=0.2

  auto flagstone = linker::assign_synset(dalle, "flag.n.06", cands, world->model, cfg,
                                         world->embeddings.vocab, world->embeddings.matrix);
  auto slab = linker::assign_synset(dalle, "slab.n.01", cands, world->model, cfg,
                                    world->embeddings.vocab, world->embeddings.matrix);
  auto pennant = linker::assign_synset(dalle, "flag.n.04", cands, world->model, cfg,
                                       world->embeddings.vocab, world->embeddings.matrix);

  REQUIRE(flagstone.hasAtom());
  REQUIRE(slab.hasAtom());
  REQUIRE(pennant.hasAtom());

  // The two paving senses share their synset-atom and tiling clusters; the
  // pennant sense lands on the flag atom with flag words.
  CHECK(flagstone.atomIndex == slab.atomIndex);
  CHECK(pennant.atomIndex != flagstone.atomIndex);
  auto contains = [&](const linker::SynsetAssignment& a, const char* token) {
    const int id = world->word(token);
    return std::find(a.cluster.words.begin(), a.cluster.words.end(), id) !=
           a.cluster.words.end();
  };
  CHECK(contains(flagstone, "dallage"));
  CHECK(contains(flagstone, "carrelage"));
  CHECK(contains(slab, "carrelage"));
  CHECK(contains(slab, "carreau"));
  CHECK(contains(pennant, "fanion"));
  CHECK(contains(pennant, "flamme"));

  CHECK(flagstone.objectiveValue == doctest::Approx(std::clamp(flagstone.cluster.gamma, 0.0, 1.0)));
  CHECK(flagstone.objectiveValue > pennant.objectiveValue);
}

TEST_CASE("assign_synset without positive atoms flags the score-only path") {
  auto world = fixture::make_dalle_world();
  const int dalle = world->word("dalle");
  auto cands = world->gen->candidates(dalle);

  wsi::WsiModel noAtoms = world->model;
  for (auto& code : noAtoms.codes)
    for (auto& e : code) e.coef = -std::abs(e.coef);
  auto assignment = linker::assign_synset(dalle, "flag.n.06", cands, noAtoms, {},
                                          world->embeddings.vocab, world->embeddings.matrix);
  CHECK_FALSE(assignment.hasAtom());
  CHECK(assignment.objectiveValue == 0.0);
}

TEST_CASE("assign_synset with an empty search space degenerates to the singleton") {
  auto world = fixture::make_dalle_world();
  const int dalle = world->word("dalle");
  auto cands = world->gen->candidates(dalle);
  // flag.n.07 has no related synsets and only dalle/drapeau as own
  // translations; dropping own lemmas leaves nothing to purify over.
  auto assignment =
      linker::assign_synset(dalle, "flag.n.07", cands, world->model, {},
                            world->embeddings.vocab, world->embeddings.matrix, false);
  REQUIRE(assignment.hasAtom());
  CHECK(assignment.cluster.words == std::vector<int>{dalle});
  const double expected = std::clamp(
      world->model.atoms.col(assignment.atomIndex).dot(
          world->embeddings.matrix.row(dalle).transpose()),
      0.0, 1.0);
  CHECK(assignment.objectiveValue == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("sense_cluster merges the paving senses of dalle") {
  auto world = fixture::make_dalle_world();
  const int dalle = world->word("dalle");
  auto cands = world->gen->candidates(dalle);

  std::map<std::string, linker::SynsetAssignment> assignments;
  for (const auto& id : cands.candidates)
    assignments[id] = linker::assign_synset(dalle, id, cands, world->model, {},
                                            world->embeddings.vocab, world->embeddings.matrix);
  auto clustering =
      linker::sense_cluster(dalle, cands.candidates, assignments, world->embeddings.matrix);

  // Output is a partition of the input synsets.
  std::set<std::string> seen;
  for (const auto& group : clustering.groups)
    for (const auto& id : group) CHECK(seen.insert(id).second);
  CHECK(seen == std::set<std::string>(cands.candidates.begin(), cands.candidates.end()));

  auto group_of = [&](const std::string& id) {
    for (std::size_t g = 0; g < clustering.groups.size(); ++g)
      for (const auto& member : clustering.groups[g])
        if (member == id) return g;
    throw std::logic_error("missing synset");
  };
  CHECK(group_of("flag.n.06") == group_of("slab.n.01"));
  CHECK(group_of("flag.n.01") == group_of("flag.n.04"));
  CHECK(group_of("flag.n.06") != group_of("flag.n.04"));
}

TEST_CASE("sense_cluster edge behavior") {
  auto emb = testutil::make_embeddings({{"w", {1, 0}}, {"u", {0.9, 0.4358898943540673}}});

  SUBCASE("distinct atoms never merge") {
    std::map<std::string, linker::SynsetAssignment> assignments;
    linker::SynsetAssignment a;
    a.synsetId = "a.n.01";
    a.atomIndex = 0;
    a.cluster.words = {0, 1};
    linker::SynsetAssignment b = a;
    b.synsetId = "b.n.01";
    b.atomIndex = 1;
    assignments["a.n.01"] = a;
    assignments["b.n.01"] = b;
    std::vector<std::string> ids{"a.n.01", "b.n.01"};
    auto clustering = linker::sense_cluster(0, ids, assignments, emb.matrix);
    CHECK(clustering.groups.size() == 2);
  }
  SUBCASE("same atom and identical clusters merge") {
    std::map<std::string, linker::SynsetAssignment> assignments;
    linker::SynsetAssignment a;
    a.synsetId = "a.n.01";
    a.atomIndex = 3;
    a.cluster.words = {0, 1};
    linker::SynsetAssignment b = a;
    b.synsetId = "b.n.01";
    assignments["a.n.01"] = a;
    assignments["b.n.01"] = b;
    std::vector<std::string> ids{"a.n.01", "b.n.01"};
    auto clustering = linker::sense_cluster(0, ids, assignments, emb.matrix);
    REQUIRE(clustering.groups.size() == 1);
    CHECK(clustering.groups[0] == std::vector<std::string>{"a.n.01", "b.n.01"});
  }
  SUBCASE("synsets without atoms stay singletons") {
    std::map<std::string, linker::SynsetAssignment> assignments;
    assignments["a.n.01"].synsetId = "a.n.01";
    assignments["b.n.01"].synsetId = "b.n.01";
    std::vector<std::string> ids{"a.n.01", "b.n.01"};
    auto clustering = linker::sense_cluster(0, ids, assignments, emb.matrix);
    CHECK(clustering.groups.size() == 2);
  }
}

TEST_CASE("sense_cluster output is independent of the input synset order") {
  auto world = fixture::make_dalle_world();
  const int dalle = world->word("dalle");
  auto cands = world->gen->candidates(dalle);
  std::map<std::string, linker::SynsetAssignment> assignments;
  for (const auto& id : cands.candidates)
    assignments[id] = linker::assign_synset(dalle, id, cands, world->model, {},
                                            world->embeddings.vocab, world->embeddings.matrix);
  auto base = linker::sense_cluster(dalle, cands.candidates, assignments,
                                    world->embeddings.matrix);

  DetRng rng(5);
  auto permuted = cands.candidates;
  for (int round = 0; round < 6; ++round) {
    rng.shuffle(permuted);
    auto again =
        linker::sense_cluster(dalle, permuted, assignments, world->embeddings.matrix);
    CHECK(again.groups == base.groups);
  }
}

TEST_CASE("merges close transitively") {
  // Three loose clusters along an arc: A={0,60}, B={30,90}, C={60,120}
  // degrees. Adjacent clusters interleave enough to be similar (cross
  // median 0.866 vs self 0.75) while A and C are not (0.5 < 0.75); the
  // transitive closure pulls all three together.
  constexpr double kHalfRoot3 = 0.8660254037844386;
  auto emb = testutil::make_embeddings({{"a1", {1, 0}},
                                        {"a2", {0.5, kHalfRoot3}},
                                        {"b1", {kHalfRoot3, 0.5}},
                                        {"b2", {0, 1}},
                                        {"c1", {0.5, kHalfRoot3}},
                                        {"c2", {-0.5, kHalfRoot3}}});
  std::map<std::string, linker::SynsetAssignment> assignments;
  auto put = [&](const char* id, std::vector<int> words) {
    linker::SynsetAssignment a;
    a.synsetId = id;
    a.atomIndex = 0;
    a.cluster.words = std::move(words);
    assignments[id] = std::move(a);
  };
  put("a.n.01", {0, 1});
  put("b.n.01", {2, 3});
  put("c.n.01", {4, 5});
  std::vector<std::string> ids{"a.n.01", "b.n.01", "c.n.01"};

  const auto& m = emb.matrix;
  const bool ab = linker::is_similar(assignments["a.n.01"].cluster.words,
                                     assignments["b.n.01"].cluster.words, m);
  const bool bc = linker::is_similar(assignments["b.n.01"].cluster.words,
                                     assignments["c.n.01"].cluster.words, m);
  const bool ac = linker::is_similar(assignments["a.n.01"].cluster.words,
                                     assignments["c.n.01"].cluster.words, m);
  REQUIRE(ab);
  REQUIRE(bc);
  REQUIRE_FALSE(ac);

  auto clustering = linker::sense_cluster(0, ids, assignments, m);
  REQUIRE(clustering.groups.size() == 1);
  CHECK(clustering.groups[0].size() == 3);
}
