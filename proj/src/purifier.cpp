#include "awn/purifier.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace awn::purifier {

double objective(std::span<const int> cluster, int word, const Eigen::VectorXd& atom,
                 const lexicon::EmbeddingMatrix& emb) {
  if (cluster.empty()) throw std::invalid_argument("objective: empty cluster");
  if (std::find(cluster.begin(), cluster.end(), word) == cluster.end())
    throw std::invalid_argument("objective: seed word not in cluster");

  double gamma = std::numeric_limits<double>::infinity();
  std::vector<double> dots;
  dots.reserve(cluster.size());

  for (int x : cluster) {
    dots.clear();
    for (int other : cluster)
      if (other != x) dots.push_back(emb.cosine(x, other));
    if (dots.empty()) continue;  // singleton: member constraint does not bind
    gamma = std::min(gamma, median(dots));
  }

  dots.clear();
  for (int w : cluster) dots.push_back(atom.dot(emb.row(w).transpose()));
  gamma = std::min(gamma, median(dots));
  return gamma;
}

PurifiedCluster purify(int word, int atomIndex, std::span<const int> searchSpace,
                       const PurifyConfig& cfg, const lexicon::Vocabulary& vocab,
                       const lexicon::EmbeddingMatrix& emb, const Eigen::MatrixXd& atoms) {
  if (cfg.n < 1) throw InputError("purify: cluster size must be at least 1");
  if (cfg.minCos < -1.0 || cfg.minCos > 1.0)
    throw InputError("purify: cosine floor must lie in [-1, 1]");
  if (atomIndex < 0 || atomIndex >= atoms.cols())
    throw InputError("purify: invalid atom index " + std::to_string(atomIndex));
  const Eigen::VectorXd atom = atoms.col(atomIndex);

  std::set<int> unique(searchSpace.begin(), searchSpace.end());
  unique.erase(word);
  std::vector<int> candidates;
  for (int x : unique) {
    if (emb.cosine(x, word) < cfg.minCos) continue;
    if (atom.dot(emb.row(x).transpose()) < cfg.minCos) continue;
    candidates.push_back(x);
  }
  // Canonical evaluation order so that exact ties resolve to the
  // lexicographically smallest token.
  std::sort(candidates.begin(), candidates.end(),
            [&](int a, int b) { return vocab.token(a) < vocab.token(b); });

  PurifiedCluster result;
  result.atomIndex = atomIndex;
  result.searchSpaceSize = static_cast<int>(candidates.size());
  result.words.push_back(word);

  std::vector<int> trial;
  while (static_cast<int>(result.words.size()) < cfg.n && !candidates.empty()) {
    double bestGamma = -std::numeric_limits<double>::infinity();
    std::size_t bestIdx = 0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      trial = result.words;
      trial.push_back(candidates[i]);
      const double g = objective(trial, word, atom, emb);
      if (g > bestGamma) {
        bestGamma = g;
        bestIdx = i;
      }
    }
    result.words.push_back(candidates[bestIdx]);
    candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(bestIdx));
  }

  result.gamma = objective(result.words, word, atom, emb);
  return result;
}

PurifiedCluster best_atom_cluster(int word, std::span<const int> atomIndices,
                                  std::span<const int> searchSpace, const PurifyConfig& cfg,
                                  const lexicon::Vocabulary& vocab,
                                  const lexicon::EmbeddingMatrix& emb,
                                  const Eigen::MatrixXd& atoms) {
  if (atomIndices.empty()) throw InputError("best_atom_cluster: no atoms given");
  std::optional<PurifiedCluster> best;
  for (int atomIndex : atomIndices) {
    PurifiedCluster cluster = purify(word, atomIndex, searchSpace, cfg, vocab, emb, atoms);
    if (!best || cluster.gamma > best->gamma ||
        (cluster.gamma == best->gamma && cluster.atomIndex < best->atomIndex))
      best = std::move(cluster);
  }
  return *best;
}

}  // namespace awn::purifier
