#include <doctest.h>

#include "awn/reference.hpp"
#include "fixture_micro.hpp"
#include "test_util.hpp"

using namespace awn;

// The OpenMP kernels must reproduce the serial reference bit for bit at any
// thread count.

TEST_CASE("parallel encode_all equals the serial reference") {
  DetRng rng(404);
  lexicon::EmbeddingMatrix emb;
  emb.dim = 10;
  emb.rows.resize(150, 10);
  for (int w = 0; w < 150; ++w)
    for (int j = 0; j < 10; ++j) emb.rows(w, j) = rng.next_normal();
  emb.normalize_rows();
  Eigen::MatrixXd atoms = testutil::random_unit_columns(10, 20, rng);

  const auto serial = ref::encode_all(emb, atoms, 3);
  for (int threads : {1, 2, 8}) {
    const auto parallel = wsi::encode_all(emb, atoms, 3, threads);
    REQUIRE(parallel.size() == serial.size());
    for (std::size_t w = 0; w < serial.size(); ++w) {
      REQUIRE(parallel[w].size() == serial[w].size());
      for (std::size_t e = 0; e < serial[w].size(); ++e) {
        CHECK(parallel[w][e].atom == serial[w][e].atom);
        CHECK(parallel[w][e].coef == serial[w][e].coef);
      }
    }
  }
}

TEST_CASE("parallel synset embedding equals the serial reference") {
  auto world = fixture::make_dalle_world();
  for (auto repr : {embedder::SynsetRepr::Baseline, embedder::SynsetRepr::Full}) {
    const auto serial =
        ref::embed_all_synsets(*world->db, world->gen->translation_index(), world->glosses,
                               world->embeddings.vocab, world->embeddings.matrix, world->freqs,
                               {}, repr);
    for (int threads : {1, 4}) {
      const auto parallel = embedder::embed_all_synsets(
          *world->db, world->gen->translation_index(), world->glosses, world->embeddings.vocab,
          world->embeddings.matrix, world->freqs, {}, repr, threads);
      REQUIRE(parallel.byIndex.size() == serial.byIndex.size());
      for (std::size_t i = 0; i < serial.byIndex.size(); ++i) {
        REQUIRE(parallel.byIndex[i].has_value() == serial.byIndex[i].has_value());
        if (!serial.byIndex[i]) continue;
        CHECK((parallel.byIndex[i]->vector.array() == serial.byIndex[i]->vector.array()).all());
        CHECK(parallel.byIndex[i]->componentsUsed == serial.byIndex[i]->componentsUsed);
      }
    }
  }
}

TEST_CASE("parallel build equals the serial reference on the micro language") {
  auto dir = testutil::make_temp_dir("ref-build");
  auto fx = fixture::write_micro_language(dir);

  auto embeddings = lexicon::load_embeddings(fx.emb);
  auto freqs = lexicon::load_frequencies(fx.freq, embeddings.vocab);
  auto db = ontology::load_synsets(fx.synsets);
  auto dict = ontology::load_dictionary(fx.dict);
  auto glosses = ontology::load_glosses(fx.glosses, db);
  ontology::CandidateGenerator gen(db, dict, embeddings.vocab);

  wsi::WsiConfig wsiCfg;
  wsiCfg.k = 12;
  wsiCfg.s = 2;
  wsiCfg.iterations = 6;
  wsiCfg.seed = 7;
  auto model = wsi::ksvd_fit(embeddings.matrix, wsiCfg, 4);

  builder::BuildConfig cfg;
  cfg.method = builder::Method::RepresentationWsi;
  cfg.alpha = 0.45;
  cfg.beta = 0.25;
  auto table = embedder::embed_all_synsets(db, gen.translation_index(), glosses,
                                           embeddings.vocab, embeddings.matrix, freqs, cfg.sif,
                                           embedder::SynsetRepr::Full, 4);
  builder::WordnetResources res{embeddings.vocab, embeddings.matrix, db, gen, table, &model};

  const auto serial = ref::build_wordnet(res, cfg);
  for (int threads : {1, 8}) {
    const auto parallel = builder::build_wordnet(res, cfg, threads);
    REQUIRE(parallel.rows.size() == serial.rows.size());
    for (std::size_t i = 0; i < serial.rows.size(); ++i) {
      CHECK(parallel.rows[i].word == serial.rows[i].word);
      CHECK(parallel.rows[i].pos == serial.rows[i].pos);
      CHECK(parallel.rows[i].alphaW == serial.rows[i].alphaW);
      REQUIRE(parallel.rows[i].matched.size() == serial.rows[i].matched.size());
      for (std::size_t j = 0; j < serial.rows[i].matched.size(); ++j) {
        CHECK(parallel.rows[i].matched[j].synsetId == serial.rows[i].matched[j].synsetId);
        CHECK(parallel.rows[i].matched[j].score == serial.rows[i].matched[j].score);
      }
    }
    CHECK(parallel.summary.matchedPairs == serial.summary.matchedPairs);
    CHECK(parallel.summary.distinctSynsets == serial.summary.distinctSynsets);
  }
}
