#include "awn/ontology.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>

namespace awn::ontology {

namespace {

using nlohmann::json;

const std::set<std::string> kEmptyStringSet;
const std::vector<int> kEmptyIntVec;

std::string loc(const std::filesystem::path& path, std::size_t lineno) {
  return path.string() + ":" + std::to_string(lineno);
}

/// Maps a "word.p.nn" id suffix letter to a Pos, if the id carries one.
std::optional<Pos> pos_from_id(const std::string& id) {
  auto parts = split_char(id, '.');
  if (parts.size() < 3) return std::nullopt;
  auto letter = parts[parts.size() - 2];
  if (letter.size() != 1) return std::nullopt;
  switch (letter[0]) {
    case 'n': return Pos::Noun;
    case 'v': return Pos::Verb;
    case 'a': return Pos::Adj;
    case 's': return Pos::Adj;  // satellite adjectives
    case 'r': return Pos::Adv;
    default: return std::nullopt;
  }
}

json parse_json_line(const std::string& line, const std::filesystem::path& path,
                     std::size_t lineno) {
  json obj = json::parse(line, nullptr, false);
  if (obj.is_discarded() || !obj.is_object())
    throw InputError("invalid JSON object at " + loc(path, lineno));
  return obj;
}

}  // namespace

OntologyDb::OntologyDb(std::vector<SynsetRecord> records) : records_(std::move(records)) {
  for (int i = 0; i < size(); ++i) {
    auto [it, inserted] = by_id_.emplace(records_[static_cast<std::size_t>(i)].id, i);
    if (!inserted)
      throw InputError("duplicate synset id: " + records_[static_cast<std::size_t>(i)].id);
  }

  std::vector<std::set<int>> nbr(records_.size());
  for (int i = 0; i < size(); ++i) {
    const auto& rec = records_[static_cast<std::size_t>(i)];
    for (const auto& rid : rec.related) {
      auto target = find(rid);
      if (!target)
        throw InputError("synset " + rec.id + " refers to unknown related id: " + rid);
      if (*target == i) continue;
      nbr[static_cast<std::size_t>(i)].insert(*target);
      nbr[static_cast<std::size_t>(*target)].insert(i);
    }
  }
  neighbors_.reserve(nbr.size());
  for (auto& s : nbr) neighbors_.emplace_back(s.begin(), s.end());

  for (int i = 0; i < size(); ++i)
    for (const auto& lemma : records_[static_cast<std::size_t>(i)].lemmas)
      lemma_index_[lemma].push_back(i);
}

std::optional<int> OntologyDb::find(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

int OntologyDb::require(std::string_view id) const {
  auto idx = find(id);
  if (!idx) throw InputError("unknown synset id: " + std::string(id));
  return *idx;
}

const std::vector<int>& OntologyDb::synsets_of_lemma(const std::string& lemma) const {
  auto it = lemma_index_.find(lemma);
  if (it == lemma_index_.end()) return kEmptyIntVec;
  return it->second;
}

OntologyDb load_synsets(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open synset file: " + path.string());

  std::vector<SynsetRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json obj = parse_json_line(line, path, lineno);
    for (const char* key : {"id", "pos", "lemmas", "gloss", "examples", "related"})
      if (!obj.contains(key))
        throw InputError(std::string("missing key '") + key + "' at " + loc(path, lineno));

    SynsetRecord rec;
    rec.id = obj.at("id").get<std::string>();
    auto pos = pos_from_string(obj.at("pos").get<std::string>());
    if (!pos)
      throw InputError("invalid pos for synset " + rec.id + " at " + loc(path, lineno));
    rec.pos = *pos;
    if (auto suffix = pos_from_id(rec.id); suffix && *suffix != rec.pos)
      throw InputError("pos '" + std::string(to_string(rec.pos)) +
                       "' contradicts id suffix of " + rec.id);
    rec.lemmas = obj.at("lemmas").get<std::vector<std::string>>();
    rec.gloss = obj.at("gloss").get<std::string>();
    rec.examples = obj.at("examples").get<std::vector<std::string>>();
    rec.related = obj.at("related").get<std::vector<std::string>>();
    if (obj.contains("relatedTyped"))
      rec.relatedTyped =
          obj.at("relatedTyped").get<std::map<std::string, std::vector<std::string>>>();
    records.push_back(std::move(rec));
  }
  return OntologyDb(std::move(records));
}

void BilingualDict::add(const std::string& english, const std::string& target) {
  if (en2tgt_[english].insert(target).second) ++pairs_;
  tgt2en_[target].insert(english);
}

const std::set<std::string>& BilingualDict::targets_of(const std::string& english) const {
  auto it = en2tgt_.find(english);
  return it == en2tgt_.end() ? kEmptyStringSet : it->second;
}

const std::set<std::string>& BilingualDict::english_of(const std::string& target) const {
  auto it = tgt2en_.find(target);
  return it == tgt2en_.end() ? kEmptyStringSet : it->second;
}

BilingualDict load_dictionary(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open dictionary file: " + path.string());
  BilingualDict dict;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_char(line, '\t');
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty())
      throw InputError("expected english<TAB>target at " + loc(path, lineno));
    dict.add(std::string(fields[0]), std::string(fields[1]));
  }
  return dict;
}

TranslatedGlossTable load_glosses(const std::filesystem::path& path, const OntologyDb& db) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open gloss file: " + path.string());
  TranslatedGlossTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json obj = parse_json_line(line, path, lineno);
    for (const char* key : {"id", "gloss", "examples"})
      if (!obj.contains(key))
        throw InputError(std::string("missing key '") + key + "' at " + loc(path, lineno));
    auto id = obj.at("id").get<std::string>();
    if (!db.find(id))
      throw InputError("gloss for unknown synset id " + id + " at " + loc(path, lineno));
    GlossEntry entry;
    entry.gloss = obj.at("gloss").get<std::string>();
    entry.examples = obj.at("examples").get<std::vector<std::string>>();
    table[id] = std::move(entry);
  }
  return table;
}

TranslationIndex build_translation_index(const OntologyDb& db, const BilingualDict& dict,
                                         const lexicon::Vocabulary& vocab) {
  TranslationIndex index;
  index.lemmaWords.resize(static_cast<std::size_t>(db.size()));
  index.relatedWords.resize(static_cast<std::size_t>(db.size()));

  for (int i = 0; i < db.size(); ++i) {
    std::set<int> words;
    for (const auto& lemma : db.record(i).lemmas)
      for (const auto& target : dict.targets_of(lemma))
        if (auto id = vocab.find(target)) words.insert(*id);  // OOV translations dropped
    index.lemmaWords[static_cast<std::size_t>(i)].assign(words.begin(), words.end());
  }
  for (int i = 0; i < db.size(); ++i) {
    std::set<int> words;
    for (int nbr : db.neighbors(i)) {
      const auto& tw = index.lemmaWords[static_cast<std::size_t>(nbr)];
      words.insert(tw.begin(), tw.end());
    }
    index.relatedWords[static_cast<std::size_t>(i)].assign(words.begin(), words.end());
  }
  return index;
}

CandidateGenerator::CandidateGenerator(const OntologyDb& db, const BilingualDict& dict,
                                       const lexicon::Vocabulary& vocab)
    : db_(db), dict_(dict), vocab_(vocab), index_(build_translation_index(db, dict, vocab)) {}

CandidateSet CandidateGenerator::candidates(int word) const {
  if (word < 0 || word >= vocab_.size())
    throw InputError("candidate_synsets: unknown vocabulary id " + std::to_string(word));

  std::set<int> synsets;
  for (const auto& english : dict_.english_of(vocab_.token(word)))
    for (int idx : db_.synsets_of_lemma(english)) synsets.insert(idx);

  CandidateSet out;
  out.word = word;
  for (int idx : synsets) out.candidates.push_back(db_.record(idx).id);
  std::sort(out.candidates.begin(), out.candidates.end());
  for (const auto& id : out.candidates) {
    int idx = db_.require(id);
    out.translatedLemmas[id] = index_.lemmaWords[static_cast<std::size_t>(idx)];
    out.relatedLemmas[id] = index_.relatedWords[static_cast<std::size_t>(idx)];
  }
  return out;
}

}  // namespace awn::ontology
