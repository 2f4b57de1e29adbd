#pragma once

#include <Eigen/Core>

#include <span>
#include <vector>

#include "awn/lexicon.hpp"

namespace awn::purifier {

struct PurifyConfig {
  int n = 5;            // target cluster size
  double minCos = 0.2;  // search-space cosine floor against both the word and the atom
};

/// Word cluster grown around (word, atom) together with its objective value.
/// words[0] is always the seed word; the rest follow greedy insertion order,
/// so a smaller-n run is a prefix of a larger-n run.
struct PurifiedCluster {
  std::vector<int> words;
  double gamma = 0.0;
  int atomIndex = -1;
  // Number of distinct candidate words that survived the cosine filter
  // (the seed word itself not counted).
  int searchSpaceSize = 0;
};

/// Objective value of a cluster: the minimum over the per-member medians
/// Median{v_x . v_w' : w' in C\{x}} and the atom median
/// Median{atom . v_w' : w' in C}. An empty median (the member constraint of
/// a singleton) does not bind.
double objective(std::span<const int> cluster, int word, const Eigen::VectorXd& atom,
                 const lexicon::EmbeddingMatrix& emb);

/// Greedy purification: filters the search space by minCos against both the
/// seed word and the atom, then repeatedly adds the candidate yielding the
/// highest new objective until the cluster reaches n words or candidates run
/// out. Exact objective ties break on lexicographic token order, which makes
/// the result independent of the search-space ordering.
PurifiedCluster purify(int word, int atomIndex, std::span<const int> searchSpace,
                       const PurifyConfig& cfg, const lexicon::Vocabulary& vocab,
                       const lexicon::EmbeddingMatrix& emb, const Eigen::MatrixXd& atoms);

/// Runs purify for each atom and keeps the cluster with the highest
/// objective; ties go to the lower atom index.
PurifiedCluster best_atom_cluster(int word, std::span<const int> atomIndices,
                                  std::span<const int> searchSpace, const PurifyConfig& cfg,
                                  const lexicon::Vocabulary& vocab,
                                  const lexicon::EmbeddingMatrix& emb,
                                  const Eigen::MatrixXd& atoms);

}  // namespace awn::purifier
