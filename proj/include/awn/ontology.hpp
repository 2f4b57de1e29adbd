#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "awn/common.hpp"
#include "awn/lexicon.hpp"

namespace awn::ontology {

struct SynsetRecord {
  std::string id;
  Pos pos = Pos::Noun;
  std::vector<std::string> lemmas;
  std::string gloss;
  std::vector<std::string> examples;
  std::vector<std::string> related;
  // Optional edge-type provenance from the source file; not used by the
  // pipeline, which treats all relations uniformly.
  std::map<std::string, std::vector<std::string>> relatedTyped;
};

/// English synset database with id, lemma, and neighbor indexes. Relation
/// edges are symmetrized: S' is a neighbor of S if either lists the other.
class OntologyDb {
 public:
  explicit OntologyDb(std::vector<SynsetRecord> records);

  int size() const { return static_cast<int>(records_.size()); }
  const std::vector<SynsetRecord>& records() const { return records_; }
  const SynsetRecord& record(int idx) const { return records_.at(static_cast<std::size_t>(idx)); }

  std::optional<int> find(std::string_view id) const;
  int require(std::string_view id) const;

  const std::vector<int>& neighbors(int idx) const {
    return neighbors_.at(static_cast<std::size_t>(idx));
  }
  /// Synset indexes containing the given English lemma, ascending.
  const std::vector<int>& synsets_of_lemma(const std::string& lemma) const;

 private:
  std::vector<SynsetRecord> records_;
  std::unordered_map<std::string, int> by_id_;
  std::vector<std::vector<int>> neighbors_;
  std::unordered_map<std::string, std::vector<int>> lemma_index_;
};

/// JSON-lines ingest: one object per line with keys id/pos/lemmas/gloss/
/// examples/related (relatedTyped optional). Duplicate ids, dangling
/// related ids, id-suffix/pos mismatches, and missing keys are rejected.
OntologyDb load_synsets(const std::filesystem::path& path);

/// Many-to-many English<->target lookup; the two directions are transposes
/// of the same pair set. Unknown keys yield empty sets.
class BilingualDict {
 public:
  void add(const std::string& english, const std::string& target);
  const std::set<std::string>& targets_of(const std::string& english) const;
  const std::set<std::string>& english_of(const std::string& target) const;
  std::size_t pair_count() const { return pairs_; }

 private:
  std::unordered_map<std::string, std::set<std::string>> en2tgt_;
  std::unordered_map<std::string, std::set<std::string>> tgt2en_;
  std::size_t pairs_ = 0;
};

/// TSV ingest, "english<TAB>target" per line; duplicate pairs collapse.
BilingualDict load_dictionary(const std::filesystem::path& path);

struct GlossEntry {
  std::string gloss;
  std::vector<std::string> examples;
};

/// synset id -> translated gloss and example sentences.
using TranslatedGlossTable = std::unordered_map<std::string, GlossEntry>;

/// JSON-lines ingest of {id, gloss, examples[]}; every id must resolve in db.
TranslatedGlossTable load_glosses(const std::filesystem::path& path, const OntologyDb& db);

/// Per-synset target-language word sets, fixed once dict and vocabulary are
/// known: lemmaWords[S] holds the in-vocabulary translations of S's lemmas,
/// relatedWords[S] the union of lemmaWords over S's neighbors (depth 1).
struct TranslationIndex {
  std::vector<std::vector<int>> lemmaWords;
  std::vector<std::vector<int>> relatedWords;
};

TranslationIndex build_translation_index(const OntologyDb& db, const BilingualDict& dict,
                                         const lexicon::Vocabulary& vocab);

/// Candidate synsets of one target word plus the word sets used to embed
/// and purify them.
struct CandidateSet {
  int word = -1;
  std::vector<std::string> candidates;  // deduplicated, sorted by id
  std::unordered_map<std::string, std::vector<int>> translatedLemmas;  // T_S
  std::unordered_map<std::string, std::vector<int>> relatedLemmas;     // R_S
};

/// Generates candidates by collecting every synset that lists any English
/// translation of the word as a lemma.
class CandidateGenerator {
 public:
  CandidateGenerator(const OntologyDb& db, const BilingualDict& dict,
                     const lexicon::Vocabulary& vocab);

  CandidateSet candidates(int word) const;

  const TranslationIndex& translation_index() const { return index_; }

 private:
  const OntologyDb& db_;
  const BilingualDict& dict_;
  const lexicon::Vocabulary& vocab_;
  TranslationIndex index_;
};

}  // namespace awn::ontology
