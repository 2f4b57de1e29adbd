#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "awn/embedder.hpp"
#include "awn/linker.hpp"
#include "awn/ontology.hpp"
#include "awn/wsi.hpp"

namespace awn::builder {

enum class Method { Baseline, Representation, RepresentationWsi };

std::string_view to_string(Method m);
std::optional<Method> method_from_string(std::string_view s);

struct PosCutoffs {
  double alpha = 0.4;
  double beta = 0.25;
};

struct BuildConfig {
  double alpha = 0.4;
  double beta = 0.25;
  Method method = Method::RepresentationWsi;
  // Explicit per-POS cutoffs; adverbs fall back to the adjective entry when
  // they have none of their own.
  std::map<Pos, PosCutoffs> perPosOverrides;
  purifier::PurifyConfig purify;
  embedder::SifConfig sif;
  bool includeOwnLemmas = true;
  // Experimental: rerun recovery until no synset is added, letting recovered
  // synsets anchor further recoveries. The default single pass keeps the
  // matched sets fixed.
  bool recoveryFixpoint = false;

  PosCutoffs cutoffs_for(Pos pos) const;
  void validate() const;  // beta <= alpha (per POS) when the method recovers
};

enum class Provenance { Threshold, ArgmaxFallback, AlphaW, Recovery };

std::string_view to_string(Provenance p);
std::optional<Provenance> provenance_from_string(std::string_view s);

struct Match {
  std::string synsetId;
  double score = 0.0;
  Provenance provenance = Provenance::Threshold;
};

struct MatchResult {
  std::string word;
  Pos pos = Pos::Noun;
  double alphaW = 0.0;
  std::vector<Match> matched;  // sorted by synset id
};

struct ScoredSynset {
  std::string synsetId;
  double score = 0.0;
};

/// Matches every candidate scoring at least alpha; when none does and
/// candidates exist, the single highest-scoring one is matched instead
/// (ties to the lexicographically smallest id).
MatchResult score_threshold(const std::string& word, Pos pos,
                            const std::vector<ScoredSynset>& scored, double alpha);

/// Same rule against the lowered cutoff alphaW <= alpha, with provenance
/// recording whether a match cleared alpha itself or only alphaW.
MatchResult match_with_cutoffs(const std::string& word, Pos pos,
                               const std::vector<ScoredSynset>& scored, double alpha,
                               double alphaW);

/// min(alpha, score of S*), where S* is the candidate whose synset-cluster
/// has the best objective value (ties: higher score, then smaller id).
/// Candidates without an atom-backed assignment are ignored; if none has
/// one, the cutoff stays at alpha.
double effective_cutoff(const std::vector<ScoredSynset>& scored,
                        const std::map<std::string, linker::SynsetAssignment>& assignments,
                        double alpha);

/// Synset recovery: an unmatched candidate scoring in [beta, alphaW) is
/// matched when it shares its synset-atom with at least one matched
/// candidate and its cluster is similar to the clusters of all matched
/// candidates on that atom. Matched sets per atom are frozen from the
/// initial pass unless fixpoint mode is on. Never removes matches.
MatchResult recover_synsets(MatchResult result, const std::vector<ScoredSynset>& scored,
                            const std::map<std::string, linker::SynsetAssignment>& assignments,
                            double beta, const lexicon::EmbeddingMatrix& emb,
                            bool fixpoint = false);

/// Everything a build needs, already loaded. `model` may be null unless the
/// method is RepresentationWsi.
struct WordnetResources {
  const lexicon::Vocabulary& vocab;
  const lexicon::EmbeddingMatrix& emb;
  const ontology::OntologyDb& db;
  const ontology::CandidateGenerator& gen;
  const embedder::SynsetEmbeddingTable& synsetEmb;
  const wsi::WsiModel* model = nullptr;
};

/// Cutoff-independent per-word state: scores and (for the WSI method)
/// synset assignments, grouped by candidate POS. Computing this once lets
/// tuning sweep many cutoff pairs cheaply.
struct WordPlan {
  int word = -1;
  std::string wordToken;
  Pos pos = Pos::Noun;
  std::vector<ScoredSynset> scored;  // sorted by synset id
  std::vector<std::string> unscorable;
  std::map<std::string, linker::SynsetAssignment> assignments;
};

std::vector<WordPlan> prepare_word(int word, const WordnetResources& res,
                                   const BuildConfig& cfg);

MatchResult match_plan(const WordPlan& plan, const BuildConfig& cfg,
                       const lexicon::EmbeddingMatrix& emb);

struct BuildSummary {
  std::int64_t wordsWithCandidates = 0;
  std::int64_t rows = 0;
  std::int64_t matchedPairs = 0;
  std::int64_t distinctSynsets = 0;
  std::int64_t unscorableCandidates = 0;
  std::int64_t failedWords = 0;
};

struct BuildOutput {
  std::vector<MatchResult> rows;
  BuildSummary summary;
};

/// Runs the method pipeline for every vocabulary word with candidates.
/// Parallel across words; rows come out in vocabulary order regardless of
/// thread count. Per-word failures are logged and skipped.
BuildOutput build_wordnet(const WordnetResources& res, const BuildConfig& cfg, int threads = 1);

void save_wordnet_jsonl(const std::filesystem::path& path, const std::vector<MatchResult>& rows);
std::vector<MatchResult> load_wordnet_jsonl(const std::filesystem::path& path);

}  // namespace awn::builder
