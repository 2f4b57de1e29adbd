#include <doctest.h>

#include <Eigen/Dense>

#include "awn/wsi.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace awn;

namespace {

/// Words drawn as sparse combinations of planted atoms plus Gaussian noise,
/// packed into a normalized embedding matrix.
struct Planted {
  Eigen::MatrixXd atoms;
  lexicon::EmbeddingMatrix emb;
};

Planted make_planted(int dim, int k, int s, int words, double noise, DetRng& rng) {
  Planted out;
  out.atoms = testutil::random_unit_columns(dim, k, rng);
  out.emb.dim = dim;
  out.emb.rows.resize(words, dim);
  for (int w = 0; w < words; ++w) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
    std::vector<int> support;
    while (static_cast<int>(support.size()) < s) {
      int atom = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(k)));
      if (std::find(support.begin(), support.end(), atom) == support.end())
        support.push_back(atom);
    }
    for (int atom : support) {
      const double sign = rng.next_double() < 0.5 ? -1.0 : 1.0;
      const double magnitude = 0.5 + rng.next_double();
      v += sign * magnitude * out.atoms.col(atom);
    }
    for (int i = 0; i < dim; ++i) v(i) += noise * rng.next_normal();
    out.emb.rows.row(w) = v.transpose();
  }
  out.emb.normalize_rows();
  return out;
}

}  // namespace

TEST_CASE("omp_encode identities") {
  Eigen::MatrixXd atoms = Eigen::MatrixXd::Identity(8, 8);

  SUBCASE("an atom encodes as itself") {
    Eigen::VectorXd v = atoms.col(7);
    auto code = wsi::omp_encode(v, atoms, 3);
    REQUIRE(code.size() == 1);
    CHECK(code[0].atom == 7);
    CHECK(code[0].coef == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("a vector orthogonal to all atoms encodes empty") {
    Eigen::MatrixXd firstFour = atoms.leftCols(4);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(8);
    v(6) = 0.8;
    auto code = wsi::omp_encode(v, firstFour, 2);
    CHECK(code.empty());
  }
  SUBCASE("largest-correlation atom wins at s=1") {
    Eigen::MatrixXd basis3 = Eigen::MatrixXd::Identity(3, 3);
    Eigen::VectorXd v(3);
    v << 0.6, 0.8, 0.0;
    auto code = wsi::omp_encode(v, basis3, 1);
    REQUIRE(code.size() == 1);
    const auto [bestAtom, bestCoef] = oracle::best_single_atom(v, basis3);
    CHECK(code[0].atom == bestAtom);
    CHECK(code[0].atom == 1);
    CHECK(code[0].coef == doctest::Approx(bestCoef).epsilon(1e-12));
    CHECK(code[0].coef == doctest::Approx(0.8).epsilon(1e-12));
  }
  SUBCASE("non-finite input is rejected") {
    Eigen::VectorXd v = Eigen::VectorXd::Constant(8, std::nan(""));
    CHECK_THROWS_AS(static_cast<void>(wsi::omp_encode(v, atoms, 2)), InputError);
  }
}

TEST_CASE("omp_encode s=1 agrees with exhaustive single-atom fits") {
  DetRng rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::MatrixXd atoms = testutil::random_unit_columns(6, 12, rng);
    Eigen::VectorXd v(6);
    for (int i = 0; i < 6; ++i) v(i) = rng.next_normal();
    auto code = wsi::omp_encode(v, atoms, 1);
    const auto [bestAtom, bestCoef] = oracle::best_single_atom(v, atoms);
    REQUIRE(code.size() == 1);
    CHECK(code[0].atom == bestAtom);
    CHECK(code[0].coef == doctest::Approx(bestCoef).epsilon(1e-9));
  }
}

TEST_CASE("omp_encode never exceeds the sparsity budget and shrinks residuals") {
  DetRng rng(42);
  Eigen::MatrixXd atoms = testutil::random_unit_columns(10, 25, rng);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd v(10);
    for (int i = 0; i < 10; ++i) v(i) = rng.next_normal();
    v /= v.norm();
    const int s = 1 + static_cast<int>(rng.uniform_index(6));
    auto code = wsi::omp_encode(v, atoms, s);
    CHECK(static_cast<int>(code.size()) <= s);
    Eigen::VectorXd r = v;
    for (const auto& e : code) r -= e.coef * atoms.col(e.atom);
    CHECK(r.norm() <= v.norm() + 1e-12);
  }
}

TEST_CASE("ksvd_fit validates its configuration") {
  auto planted = [&] {
    DetRng rng(1);
    return make_planted(4, 3, 1, 20, 0.0, rng);
  }();
  wsi::WsiConfig bad;
  bad.k = 0;
  CHECK_THROWS_AS(static_cast<void>(wsi::ksvd_fit(planted.emb, bad)), InputError);
  bad.k = 3;
  bad.s = 4;
  CHECK_THROWS_AS(static_cast<void>(wsi::ksvd_fit(planted.emb, bad)), InputError);
}

TEST_CASE("ksvd recovers an exact 1-sparse orthonormal dictionary") {
  DetRng rng(7);
  // Orthonormal atoms via QR of a random matrix.
  Eigen::MatrixXd seed(10, 10);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) seed(i, j) = rng.next_normal();
  Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(seed).householderQ();

  lexicon::EmbeddingMatrix emb;
  emb.dim = 10;
  emb.rows.resize(200, 10);
  for (int w = 0; w < 200; ++w) {
    const int atom = static_cast<int>(rng.uniform_index(10));
    const double scale = 0.5 + rng.next_double();
    emb.rows.row(w) = (scale * q.col(atom)).transpose();
  }
  emb.normalize_rows();

  wsi::WsiConfig cfg;
  cfg.k = 10;
  cfg.s = 1;
  cfg.iterations = 20;
  cfg.seed = 3;
  auto model = wsi::ksvd_fit(emb, cfg);

  auto matches = oracle::greedy_match_cosines(q, model.atoms);
  for (double m : matches) CHECK(m > 0.999);
}

TEST_CASE("ksvd synthetic recovery with noise") {
  DetRng rng(2024);
  auto planted = make_planted(20, 30, 3, 500, 0.01, rng);
  wsi::WsiConfig cfg;
  cfg.k = 30;
  cfg.s = 3;
  cfg.iterations = 50;
  cfg.seed = 5;
  auto model = wsi::ksvd_fit(planted.emb, cfg, 2);

  auto matches = oracle::greedy_match_cosines(planted.atoms, model.atoms);
  int recovered = 0;
  for (double m : matches)
    if (m > 0.95) ++recovered;
  CHECK(recovered >= 24);  // at least 80% of 30
}

TEST_CASE("ksvd objective is monotone and the model invariants hold") {
  DetRng rng(99);
  auto planted = make_planted(8, 12, 2, 120, 0.05, rng);
  wsi::WsiConfig cfg;
  cfg.k = 12;
  cfg.s = 2;
  cfg.iterations = 15;
  cfg.seed = 21;
  auto model = wsi::ksvd_fit(planted.emb, cfg);

  for (std::size_t t = 1; t < model.mseTrace.size(); ++t)
    CHECK(model.mseTrace[t] <= model.mseTrace[t - 1] + 1e-9);
  for (int j = 0; j < model.k; ++j)
    CHECK(model.atoms.col(j).norm() == doctest::Approx(1.0).epsilon(1e-6));
  for (int w = 0; w < 120; ++w) {
    const auto& code = model.codes[static_cast<std::size_t>(w)];
    CHECK(static_cast<int>(code.size()) <= cfg.s);
    const Eigen::VectorXd v = planted.emb.row(w).transpose();
    const double actual = (v - model.reconstruct(w)).norm();
    CHECK(model.residualNorms[static_cast<std::size_t>(w)] ==
          doctest::Approx(actual).epsilon(1e-6));
    CHECK(actual <= v.norm() + 1e-12);
  }
}

TEST_CASE("ksvd iterations=0 returns the initial atoms with their codes") {
  DetRng rng(13);
  auto planted = make_planted(6, 8, 2, 40, 0.02, rng);
  wsi::WsiConfig cfg;
  cfg.k = 8;
  cfg.s = 2;
  cfg.iterations = 0;
  cfg.seed = 77;
  auto model = wsi::ksvd_fit(planted.emb, cfg);
  CHECK(model.mseTrace.size() == 1);
  for (int w = 0; w < 40; ++w) {
    auto direct = wsi::omp_encode(planted.emb.row(w).transpose(), model.atoms, cfg.s);
    const auto& stored = model.codes[static_cast<std::size_t>(w)];
    REQUIRE(stored.size() == direct.size());
    for (std::size_t e = 0; e < direct.size(); ++e) {
      CHECK(stored[e].atom == direct[e].atom);
      CHECK(stored[e].coef == direct[e].coef);
    }
  }
}

TEST_CASE("ksvd is bit-deterministic for a fixed seed") {
  DetRng rng(55);
  auto planted = make_planted(8, 10, 2, 60, 0.03, rng);
  wsi::WsiConfig cfg;
  cfg.k = 10;
  cfg.s = 2;
  cfg.iterations = 8;
  cfg.seed = 42;
  auto a = wsi::ksvd_fit(planted.emb, cfg, 1);
  auto b = wsi::ksvd_fit(planted.emb, cfg, 4);
  CHECK((a.atoms.array() == b.atoms.array()).all());
  REQUIRE(a.codes.size() == b.codes.size());
  for (std::size_t w = 0; w < a.codes.size(); ++w) {
    REQUIRE(a.codes[w].size() == b.codes[w].size());
    for (std::size_t e = 0; e < a.codes[w].size(); ++e) {
      CHECK(a.codes[w][e].atom == b.codes[w][e].atom);
      CHECK(a.codes[w][e].coef == b.codes[w][e].coef);
    }
  }
  CHECK(a.mseTrace == b.mseTrace);
}

TEST_CASE("word_atoms filters positives and orders by coefficient") {
  wsi::WsiModel model;
  model.dim = 2;
  model.k = 10;
  model.s = 3;
  model.atoms = Eigen::MatrixXd::Zero(2, 10);
  model.codes = {{{3, 0.9}, {8, -0.2}}, {}, {{3, 0.9}, {9, 0.1}, {5, 0.4}}};
  model.residualNorms = {0, 0, 0};

  CHECK(wsi::word_atoms(model, 0) == std::vector<int>{3});
  CHECK(wsi::word_atoms(model, 1).empty());
  CHECK(wsi::word_atoms(model, 2) == std::vector<int>{3, 5, 9});
  CHECK_THROWS_AS(static_cast<void>(wsi::word_atoms(model, 5)), InputError);
}

TEST_CASE("model files round-trip exactly in both formats") {
  DetRng rng(31);
  auto planted = make_planted(6, 9, 2, 30, 0.02, rng);
  wsi::WsiConfig cfg;
  cfg.k = 9;
  cfg.s = 2;
  cfg.iterations = 4;
  cfg.seed = 9;
  auto model = wsi::ksvd_fit(planted.emb, cfg);

  auto dir = testutil::make_temp_dir("wsi");
  auto same = [&](const wsi::WsiModel& other) {
    CHECK(other.dim == model.dim);
    CHECK(other.k == model.k);
    CHECK(other.s == model.s);
    CHECK(other.seed == model.seed);
    CHECK(other.iterations == model.iterations);
    CHECK((other.atoms.array() == model.atoms.array()).all());
    REQUIRE(other.codes.size() == model.codes.size());
    for (std::size_t w = 0; w < model.codes.size(); ++w) {
      REQUIRE(other.codes[w].size() == model.codes[w].size());
      for (std::size_t e = 0; e < model.codes[w].size(); ++e) {
        CHECK(other.codes[w][e].atom == model.codes[w][e].atom);
        CHECK(other.codes[w][e].coef == model.codes[w][e].coef);
      }
    }
    CHECK(other.residualNorms == model.residualNorms);
    CHECK(other.mseTrace == model.mseTrace);
  };

  wsi::save_model_json(dir / "m.json", model);
  same(wsi::load_model_json(dir / "m.json"));
  same(wsi::load_model(dir / "m.json"));
  wsi::save_model_binary(dir / "m.bin", model);
  same(wsi::load_model_binary(dir / "m.bin"));
  same(wsi::load_model(dir / "m.bin"));
}
