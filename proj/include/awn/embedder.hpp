#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "awn/lexicon.hpp"
#include "awn/ontology.hpp"

namespace awn::embedder {

struct SifConfig {
  double a = 1e-4;
  // When set, the SIF weight uses raw corpus counts instead of relative
  // frequencies.
  bool useRawCounts = false;
  // When cleared, the four synset components enter the final average as
  // computed instead of being unit-normalized first.
  bool normalizeComponents = true;
};

enum class Component { Lemma, Related, Definition, Examples };

std::string_view to_string(Component c);
std::optional<Component> component_from_string(std::string_view s);

/// Unit vector representing one synset in target embedding space.
struct SynsetEmbedding {
  std::string synsetId;
  Eigen::VectorXd vector;
  std::vector<Component> componentsUsed;
};

/// Sum of word vectors, unit-normalized. Duplicates contribute multiply.
/// Empty input is a caller bug; exact cancellation yields nullopt.
std::optional<Eigen::VectorXd> sum_embed(std::span<const int> words,
                                         const lexicon::EmbeddingMatrix& emb);

/// Smooth-inverse-frequency weighted sum a/(a+f_w) * v_w, unit-normalized.
std::optional<Eigen::VectorXd> sif_embed(std::span<const int> words,
                                         const lexicon::EmbeddingMatrix& emb,
                                         const lexicon::FrequencyTable& freqs,
                                         const SifConfig& cfg);

/// Lowercases ASCII letters, strips leading/trailing ASCII punctuation from
/// each whitespace-separated token, and drops out-of-vocabulary tokens.
std::vector<int> tokenize_to_vocab(std::string_view text, const lexicon::Vocabulary& vocab);

/// Mean of the synset's translated-lemma vectors, unit-normalized; nullopt
/// when the synset has no in-vocabulary lemma translations.
std::optional<SynsetEmbedding> baseline_synset_embedding(const std::string& synsetId,
                                                         std::span<const int> lemmaWords,
                                                         const lexicon::EmbeddingMatrix& emb);

/// Average of up to four component embeddings (lemma sum, related-synset
/// sum, SIF gloss, mean of per-sentence SIF example embeddings). Each
/// available component is unit-normalized before averaging and the average
/// is normalized again; missing components are left out. nullopt when no
/// component is computable.
std::optional<SynsetEmbedding> full_synset_embedding(
    const std::string& synsetId, std::span<const int> lemmaWords,
    std::span<const int> relatedWords, const ontology::GlossEntry* gloss,
    const lexicon::Vocabulary& vocab, const lexicon::EmbeddingMatrix& emb,
    const lexicon::FrequencyTable& freqs, const SifConfig& cfg);

enum class SynsetRepr { Baseline, Full };

/// One optional embedding per synset, aligned with OntologyDb record order.
struct SynsetEmbeddingTable {
  std::vector<std::optional<SynsetEmbedding>> byIndex;

  const SynsetEmbedding* get(int idx) const {
    const auto& slot = byIndex.at(static_cast<std::size_t>(idx));
    return slot ? &*slot : nullptr;
  }
};

/// Embeds every synset in the database; parallel across synsets.
SynsetEmbeddingTable embed_all_synsets(const ontology::OntologyDb& db,
                                       const ontology::TranslationIndex& tindex,
                                       const ontology::TranslatedGlossTable& glosses,
                                       const lexicon::Vocabulary& vocab,
                                       const lexicon::EmbeddingMatrix& emb,
                                       const lexicon::FrequencyTable& freqs,
                                       const SifConfig& cfg, SynsetRepr repr, int threads = 1);

/// JSON-lines cache {synsetId, vector[], componentsUsed[]}; doubles survive
/// the round trip bit-exactly.
void save_embedding_cache(const std::filesystem::path& path, const SynsetEmbeddingTable& table,
                          const ontology::OntologyDb& db);
SynsetEmbeddingTable load_embedding_cache(const std::filesystem::path& path,
                                          const ontology::OntologyDb& db);

}  // namespace awn::embedder
