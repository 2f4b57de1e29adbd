// Timings of the OpenMP batch kernels against their serial reference
// implementations. Not a correctness gate; the equality checks live in the
// test suite.

#ifdef _OPENMP
#include <omp.h>
#endif

#include <chrono>
#include <cstdio>
#include <functional>

#include "awn/purifier.hpp"
#include "awn/reference.hpp"
#include "awn/wsi.hpp"

using namespace awn;

namespace {

double time_of(const std::function<void()>& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void row(const char* name, double serial, double parallel, int threads) {
  std::printf("%-28s serial %8.3fs   parallel(%d) %8.3fs   speedup %5.2fx\n", name, serial,
              threads, parallel, parallel > 0 ? serial / parallel : 0.0);
}

lexicon::EmbeddingMatrix random_embeddings(int words, int dim, DetRng& rng) {
  lexicon::EmbeddingMatrix emb;
  emb.dim = dim;
  emb.rows.resize(words, dim);
  for (int w = 0; w < words; ++w)
    for (int j = 0; j < dim; ++j) emb.rows(w, j) = rng.next_normal();
  emb.normalize_rows();
  return emb;
}

}  // namespace

int main() {
#ifdef _OPENMP
  const int threads = omp_get_max_threads();
#else
  const int threads = 1;
#endif
  std::printf("kernel benchmark, %d hardware threads\n\n", threads);

  DetRng rng(12);

  {
    const auto emb = random_embeddings(20000, 100, rng);
    Eigen::MatrixXd atoms(100, 400);
    {
      DetRng atomRng(13);
      for (int j = 0; j < 400; ++j) {
        Eigen::VectorXd v(100);
        for (int i = 0; i < 100; ++i) v(i) = atomRng.next_normal();
        atoms.col(j) = v / v.norm();
      }
    }
    const double serial = time_of([&] { ref::encode_all(emb, atoms, 4); });
    const double parallel = time_of([&] { wsi::encode_all(emb, atoms, 4, threads); });
    row("omp encode (20k x 400)", serial, parallel, threads);
  }

  {
    const auto emb = random_embeddings(3000, 50, rng);
    wsi::WsiConfig cfg;
    cfg.k = 100;
    cfg.s = 4;
    cfg.iterations = 3;
    cfg.seed = 1;
    const double serial = time_of([&] { wsi::ksvd_fit(emb, cfg, 1); });
    const double parallel = time_of([&] { wsi::ksvd_fit(emb, cfg, threads); });
    row("ksvd 3 sweeps (3k x 100)", serial, parallel, threads);
  }

  {
    // Purification sweep over every (word, atom) pair, the hot loop behind
    // synset assignment. The parallel variant mirrors the purify subcommand.
    const auto emb = random_embeddings(400, 16, rng);
    lexicon::Vocabulary vocab;
    for (int w = 0; w < 400; ++w) vocab.add("w" + std::to_string(w));
    DetRng atomRng(14);
    Eigen::MatrixXd atoms(16, 8);
    for (int j = 0; j < 8; ++j) {
      Eigen::VectorXd v(16);
      for (int i = 0; i < 16; ++i) v(i) = atomRng.next_normal();
      atoms.col(j) = v / v.norm();
    }
    std::vector<int> searchSpace(400);
    for (int w = 0; w < 400; ++w) searchSpace[static_cast<std::size_t>(w)] = w;
    purifier::PurifyConfig cfg;

    auto sweep = [&](int nt) {
      std::vector<double> gammas(400 * 8);
#pragma omp parallel for schedule(dynamic, 4) num_threads(nt)
      for (int w = 0; w < 400; ++w)
        for (int a = 0; a < 8; ++a)
          gammas[static_cast<std::size_t>(w * 8 + a)] =
              purifier::purify(w, a, searchSpace, cfg, vocab, emb, atoms).gamma;
      return gammas;
    };
    const double serial = time_of([&] { sweep(1); });
    const double parallel = time_of([&] { sweep(threads); });
    row("purify sweep (400 x 8)", serial, parallel, threads);
  }

  return 0;
}
