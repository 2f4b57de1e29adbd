#include <doctest.h>

#include <fstream>

#include "awn/ontology.hpp"
#include "fixture_micro.hpp"
#include "test_util.hpp"

using namespace awn;

namespace {

std::filesystem::path write_file(const std::filesystem::path& dir, const std::string& name,
                                 const std::string& content) {
  auto path = dir / name;
  std::ofstream out(path);
  out << content;
  return path;
}

constexpr const char* kMinimalSynset =
    R"({"id":"cat.n.01","pos":"noun","lemmas":["cat"],"gloss":"feline","examples":[],"related":[]})";

}  // namespace

TEST_CASE("load_synsets accepts a single record without relations") {
  auto dir = testutil::make_temp_dir("onto");
  auto db = ontology::load_synsets(write_file(dir, "one.jsonl", std::string(kMinimalSynset) + "\n"));
  CHECK(db.size() == 1);
  CHECK(db.record(0).pos == Pos::Noun);
}

TEST_CASE("load_synsets rejects invalid databases") {
  auto dir = testutil::make_temp_dir("onto");
  SUBCASE("dangling related id") {
    auto path = write_file(
        dir, "dangling.jsonl",
        R"({"id":"a.n.01","pos":"noun","lemmas":["a"],"gloss":"","examples":[],"related":["ghost.n.01"]})"
        "\n");
    CHECK_THROWS_WITH_AS(static_cast<void>(ontology::load_synsets(path)),
                         doctest::Contains("ghost.n.01"), InputError);
  }
  SUBCASE("duplicate id") {
    auto path = write_file(dir, "dup.jsonl",
                           std::string(kMinimalSynset) + "\n" + kMinimalSynset + "\n");
    CHECK_THROWS_AS(static_cast<void>(ontology::load_synsets(path)), InputError);
  }
  SUBCASE("missing key") {
    auto path = write_file(dir, "missing.jsonl",
                           R"({"id":"a.n.01","pos":"noun","lemmas":["a"],"examples":[],"related":[]})"
                           "\n");
    CHECK_THROWS_AS(static_cast<void>(ontology::load_synsets(path)), InputError);
  }
  SUBCASE("pos contradicting id suffix") {
    auto path = write_file(
        dir, "pos.jsonl",
        R"({"id":"a.v.01","pos":"noun","lemmas":["a"],"gloss":"","examples":[],"related":[]})"
        "\n");
    CHECK_THROWS_AS(static_cast<void>(ontology::load_synsets(path)), InputError);
  }
}

TEST_CASE("the eight dalle candidate records load as a fixture") {
  auto world = fixture::make_dalle_world();
  CHECK(world->db->size() == 8);
  for (const char* id : {"flag.n.01", "flag.n.04", "flag.n.06", "flag.n.07", "iris.n.01",
                         "masthead.n.01", "pin.n.08", "slab.n.01"})
    CHECK(world->db->find(id).has_value());
}

TEST_CASE("relation edges are symmetrized for neighbor queries") {
  auto dir = testutil::make_temp_dir("onto");
  auto path = write_file(
      dir, "asym.jsonl",
      R"({"id":"a.n.01","pos":"noun","lemmas":["a"],"gloss":"","examples":[],"related":["b.n.01"]})"
      "\n"
      R"({"id":"b.n.01","pos":"noun","lemmas":["b"],"gloss":"","examples":[],"related":[]})"
      "\n");
  auto db = ontology::load_synsets(path);
  CHECK(db.neighbors(db.require("b.n.01")) == std::vector<int>{db.require("a.n.01")});
}

TEST_CASE("bilingual dictionary is a transpose pair") {
  auto dir = testutil::make_temp_dir("onto");
  auto dict = ontology::load_dictionary(
      write_file(dir, "d.tsv", "liver\tfoie\nflag\tdrapeau\nflag\tdalle\nflag\tdrapeau\n"));
  CHECK(dict.pair_count() == 3);  // duplicate collapsed
  CHECK(dict.targets_of("flag") == std::set<std::string>{"dalle", "drapeau"});
  CHECK(dict.english_of("dalle") == std::set<std::string>{"flag"});
  CHECK(dict.targets_of("unknown").empty());

  // transpose property over every pair
  for (const auto& en : {"liver", "flag"})
    for (const auto& tgt : dict.targets_of(en)) CHECK(dict.english_of(tgt).count(en) == 1);
}

TEST_CASE("glosses must resolve in the synset database") {
  auto dir = testutil::make_temp_dir("onto");
  auto db = ontology::load_synsets(write_file(dir, "db.jsonl", std::string(kMinimalSynset) + "\n"));
  auto good = write_file(dir, "g.jsonl", R"({"id":"cat.n.01","gloss":"felin","examples":["un felin"]})"
                                         "\n");
  auto table = ontology::load_glosses(good, db);
  CHECK(table.at("cat.n.01").gloss == "felin");
  auto bad = write_file(dir, "bad.jsonl", R"({"id":"dog.n.01","gloss":"","examples":[]})"
                                          "\n");
  CHECK_THROWS_AS(static_cast<void>(ontology::load_glosses(bad, db)), InputError);
}

TEST_CASE("foie reaches all four liver synsets") {
  auto emb = testutil::make_embeddings({{"foie", {1, 0}}, {"organe", {0.9, 0.1}}});
  std::vector<ontology::SynsetRecord> records;
  for (int i = 1; i <= 4; ++i) {
    ontology::SynsetRecord r;
    r.id = "liver.n.0" + std::to_string(i);
    r.pos = Pos::Noun;
    r.lemmas = {"liver"};
    records.push_back(std::move(r));
  }
  ontology::OntologyDb db(std::move(records));
  ontology::BilingualDict dict;
  dict.add("liver", "foie");
  ontology::CandidateGenerator gen(db, dict, emb.vocab);

  auto cands = gen.candidates(emb.vocab.require("foie"));
  CHECK(cands.candidates.size() == 4);
  CHECK(std::is_sorted(cands.candidates.begin(), cands.candidates.end()));
}

TEST_CASE("candidate generation edge cases") {
  auto world = fixture::make_dalle_world();
  const auto& vocab = world->embeddings.vocab;

  SUBCASE("word with no translations yields an empty candidate set") {
    auto cands = world->gen->candidates(world->word("mosaique"));
    CHECK(cands.candidates.empty());
  }
  SUBCASE("unknown word id is an error") {
    CHECK_THROWS_AS(static_cast<void>(world->gen->candidates(vocab.size() + 3)), InputError);
  }
  SUBCASE("shared synsets are deduplicated and sorted") {
    // dalle translates to flag, flagstone and slab; flag.n.06 lists both
    // flag and flagstone, so it must appear exactly once.
    auto cands = world->gen->candidates(world->word("dalle"));
    CHECK(cands.candidates ==
          std::vector<std::string>{"flag.n.01", "flag.n.04", "flag.n.06", "flag.n.07",
                                   "slab.n.01"});
  }
  SUBCASE("translated lemma and related sets stay in vocabulary") {
    auto cands = world->gen->candidates(world->word("dalle"));
    for (const auto& id : cands.candidates) {
      for (int w : cands.translatedLemmas.at(id)) CHECK((w >= 0 && w < vocab.size()));
      for (int w : cands.relatedLemmas.at(id)) CHECK((w >= 0 && w < vocab.size()));
    }
    // flag.n.06 is related to slab.n.01, so R_S holds slab's translations.
    const auto& related = cands.relatedLemmas.at("flag.n.06");
    CHECK(std::find(related.begin(), related.end(), world->word("carreau")) != related.end());
  }
  SUBCASE("candidate generation is deterministic") {
    auto a = world->gen->candidates(world->word("dalle"));
    auto b = world->gen->candidates(world->word("dalle"));
    CHECK(a.candidates == b.candidates);
    CHECK(a.translatedLemmas == b.translatedLemmas);
    CHECK(a.relatedLemmas == b.relatedLemmas);
  }
}
