#include "awn/linker.hpp"

#include <algorithm>
#include <numeric>

namespace awn::linker {

double cluster_similarity(std::span<const int> c1, std::span<const int> c2,
                          const lexicon::EmbeddingMatrix& emb) {
  if (c1.empty() || c2.empty())
    throw std::invalid_argument("cluster_similarity: empty cluster");
  std::vector<double> dots;
  dots.reserve(c1.size() * c2.size());
  for (int x : c1)
    for (int y : c2) dots.push_back(emb.cosine(x, y));
  return median(std::move(dots));
}

bool is_similar(std::span<const int> c1, std::span<const int> c2,
                const lexicon::EmbeddingMatrix& emb) {
  const double cross = cluster_similarity(c1, c2, emb);
  const double self1 = cluster_similarity(c1, c1, emb);
  const double self2 = cluster_similarity(c2, c2, emb);
  return cross >= std::min(self1, self2);
}

SynsetAssignment assign_synset(int word, const std::string& synsetId,
                               const ontology::CandidateSet& cands, const wsi::WsiModel& model,
                               const purifier::PurifyConfig& cfg,
                               const lexicon::Vocabulary& vocab,
                               const lexicon::EmbeddingMatrix& emb, bool includeOwnLemmas) {
  SynsetAssignment out;
  out.synsetId = synsetId;

  const auto atoms = wsi::word_atoms(model, word);
  if (atoms.empty()) return out;  // no positive atoms: score-only path downstream

  std::vector<int> searchSpace;
  if (auto it = cands.relatedLemmas.find(synsetId); it != cands.relatedLemmas.end())
    searchSpace = it->second;
  if (includeOwnLemmas) {
    if (auto it = cands.translatedLemmas.find(synsetId); it != cands.translatedLemmas.end())
      searchSpace.insert(searchSpace.end(), it->second.begin(), it->second.end());
  }

  out.cluster = purifier::best_atom_cluster(word, atoms, searchSpace, cfg, vocab, emb,
                                            model.atoms);
  out.atomIndex = out.cluster.atomIndex;
  out.objectiveValue = std::clamp(out.cluster.gamma, 0.0, 1.0);
  return out;
}

SenseClustering sense_cluster(int word, std::span<const std::string> synsets,
                              const std::map<std::string, SynsetAssignment>& assignments,
                              const lexicon::EmbeddingMatrix& emb) {
  const int n = static_cast<int>(synsets.size());
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  auto merge = [&](int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); };

  for (int i = 0; i < n; ++i) {
    auto ai = assignments.find(synsets[static_cast<std::size_t>(i)]);
    if (ai == assignments.end() || !ai->second.hasAtom()) continue;
    for (int j = i + 1; j < n; ++j) {
      auto aj = assignments.find(synsets[static_cast<std::size_t>(j)]);
      if (aj == assignments.end() || !aj->second.hasAtom()) continue;
      if (ai->second.atomIndex != aj->second.atomIndex) continue;
      if (is_similar(ai->second.cluster.words, aj->second.cluster.words, emb)) merge(i, j);
    }
  }

  std::map<int, std::vector<std::string>> byRoot;
  for (int i = 0; i < n; ++i)
    byRoot[find(i)].push_back(synsets[static_cast<std::size_t>(i)]);

  SenseClustering out;
  out.word = word;
  for (auto& [root, group] : byRoot) {
    std::sort(group.begin(), group.end());
    out.groups.push_back(std::move(group));
  }
  std::sort(out.groups.begin(), out.groups.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return out;
}

}  // namespace awn::linker
