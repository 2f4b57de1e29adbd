#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "awn/ontology.hpp"
#include "awn/purifier.hpp"
#include "awn/wsi.hpp"

namespace awn::linker {

/// Median of all pairwise dot products between the two clusters (overlapping
/// members contribute their self-similarity of 1).
double cluster_similarity(std::span<const int> c1, std::span<const int> c2,
                          const lexicon::EmbeddingMatrix& emb);

/// Two clusters are similar when their cross similarity reaches the smaller
/// of the two self similarities.
bool is_similar(std::span<const int> c1, std::span<const int> c2,
                const lexicon::EmbeddingMatrix& emb);

/// Synset-atom and synset-cluster chosen for one word-synset pair. A word
/// with no positive atoms yields hasAtom() == false and the pair falls back
/// to plain score thresholding downstream.
struct SynsetAssignment {
  std::string synsetId;
  int atomIndex = -1;
  purifier::PurifiedCluster cluster;
  double objectiveValue = 0.0;  // cluster gamma clamped to [0, 1]

  bool hasAtom() const { return atomIndex >= 0; }
};

/// Purifies the word against each of its positive atoms using the synset's
/// translated related lemmas (plus its own translated lemmas when
/// includeOwnLemmas is set) as the search space, keeping the best cluster.
SynsetAssignment assign_synset(int word, const std::string& synsetId,
                               const ontology::CandidateSet& cands, const wsi::WsiModel& model,
                               const purifier::PurifyConfig& cfg,
                               const lexicon::Vocabulary& vocab,
                               const lexicon::EmbeddingMatrix& emb,
                               bool includeOwnLemmas = true);

/// Partition of a word's candidate synsets into merged sense groups.
struct SenseClustering {
  int word = -1;
  std::vector<std::vector<std::string>> groups;
};

/// Merges synsets that share a synset-atom and have similar clusters; the
/// merge relation is closed transitively so the output is a partition.
/// Synsets without an atom stay singletons. Groups and their members are
/// sorted by synset id.
SenseClustering sense_cluster(int word, std::span<const std::string> synsets,
                              const std::map<std::string, SynsetAssignment>& assignments,
                              const lexicon::EmbeddingMatrix& emb);

}  // namespace awn::linker
