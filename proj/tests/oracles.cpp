#include "oracles.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <stdexcept>

namespace oracle {

double naive_median(std::vector<double> values) {
  if (values.empty()) throw std::logic_error("naive_median: empty");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return (values[mid - 1] + values[mid]) / 2.0;
}

double naive_objective(const std::vector<int>& cluster, const Eigen::VectorXd& atom,
                       const awn::lexicon::EmbeddingMatrix& emb) {
  double gamma = std::numeric_limits<double>::infinity();
  for (int x : cluster) {
    std::vector<double> dots;
    for (int y : cluster) {
      if (y == x) continue;
      dots.push_back(emb.rows.row(x).dot(emb.rows.row(y)));
    }
    if (!dots.empty()) gamma = std::min(gamma, naive_median(dots));
  }
  std::vector<double> atomDots;
  for (int y : cluster) atomDots.push_back(emb.rows.row(y).dot(atom));
  return std::min(gamma, naive_median(atomDots));
}

NaiveCluster naive_purify(int word, const Eigen::VectorXd& atom, std::vector<int> searchSpace,
                          int n, double minCos, const awn::lexicon::Vocabulary& vocab,
                          const awn::lexicon::EmbeddingMatrix& emb) {
  std::set<int> pool(searchSpace.begin(), searchSpace.end());
  pool.erase(word);
  std::vector<int> candidates;
  for (int x : pool) {
    const double toWord = emb.rows.row(x).dot(emb.rows.row(word));
    const double toAtom = emb.rows.row(x).dot(atom);
    if (toWord >= minCos && toAtom >= minCos) candidates.push_back(x);
  }

  NaiveCluster out;
  out.words = {word};
  while (static_cast<int>(out.words.size()) < n && !candidates.empty()) {
    int bestWord = -1;
    double bestGamma = -std::numeric_limits<double>::infinity();
    for (int c : candidates) {
      std::vector<int> trial = out.words;
      trial.push_back(c);
      const double g = naive_objective(trial, atom, emb);
      if (g > bestGamma || (g == bestGamma && vocab.token(c) < vocab.token(bestWord))) {
        bestGamma = g;
        bestWord = c;
      }
    }
    out.words.push_back(bestWord);
    candidates.erase(std::find(candidates.begin(), candidates.end(), bestWord));
  }
  out.gamma = naive_objective(out.words, atom, emb);
  return out;
}

std::pair<int, double> best_single_atom(const Eigen::VectorXd& v, const Eigen::MatrixXd& atoms) {
  int best = -1;
  double bestResidual = std::numeric_limits<double>::infinity();
  double bestCoef = 0.0;
  for (int j = 0; j < atoms.cols(); ++j) {
    // Least squares for a single unit atom: c = a.v
    const double c = atoms.col(j).dot(v);
    const double residual = (v - c * atoms.col(j)).norm();
    if (residual < bestResidual) {
      bestResidual = residual;
      best = j;
      bestCoef = c;
    }
  }
  return {best, bestCoef};
}

std::vector<double> greedy_match_cosines(const Eigen::MatrixXd& generators,
                                         const Eigen::MatrixXd& learned) {
  Eigen::MatrixXd similarity = (generators.transpose() * learned).cwiseAbs();
  std::vector<char> generatorUsed(static_cast<std::size_t>(generators.cols()), 0);
  std::vector<char> learnedUsed(static_cast<std::size_t>(learned.cols()), 0);
  std::vector<double> matches;
  const int rounds = static_cast<int>(std::min(generators.cols(), learned.cols()));
  for (int round = 0; round < rounds; ++round) {
    int bestG = -1, bestL = -1;
    double best = -1.0;
    for (int g = 0; g < similarity.rows(); ++g) {
      if (generatorUsed[static_cast<std::size_t>(g)]) continue;
      for (int l = 0; l < similarity.cols(); ++l) {
        if (learnedUsed[static_cast<std::size_t>(l)]) continue;
        if (similarity(g, l) > best) {
          best = similarity(g, l);
          bestG = g;
          bestL = l;
        }
      }
    }
    generatorUsed[static_cast<std::size_t>(bestG)] = 1;
    learnedUsed[static_cast<std::size_t>(bestL)] = 1;
    matches.push_back(best);
  }
  return matches;
}

}  // namespace oracle
