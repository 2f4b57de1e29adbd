#include "awn/embedder.hpp"

#include <json.hpp>

#include <cctype>
#include <cmath>
#include <fstream>

namespace awn::embedder {

namespace {

using nlohmann::json;

constexpr double kNormEps = 1e-12;

std::optional<Eigen::VectorXd> normalize_or_null(Eigen::VectorXd v) {
  const double norm = v.norm();
  if (norm < kNormEps) return std::nullopt;
  v /= norm;
  return v;
}

}  // namespace

std::string_view to_string(Component c) {
  switch (c) {
    case Component::Lemma: return "lemma";
    case Component::Related: return "related";
    case Component::Definition: return "definition";
    case Component::Examples: return "examples";
  }
  return "?";
}

std::optional<Component> component_from_string(std::string_view s) {
  if (s == "lemma") return Component::Lemma;
  if (s == "related") return Component::Related;
  if (s == "definition") return Component::Definition;
  if (s == "examples") return Component::Examples;
  return std::nullopt;
}

std::optional<Eigen::VectorXd> sum_embed(std::span<const int> words,
                                         const lexicon::EmbeddingMatrix& emb) {
  if (words.empty()) throw std::invalid_argument("sum_embed: empty word list");
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(emb.dim);
  for (int w : words) sum += emb.row(w).transpose();
  return normalize_or_null(std::move(sum));
}

std::optional<Eigen::VectorXd> sif_embed(std::span<const int> words,
                                         const lexicon::EmbeddingMatrix& emb,
                                         const lexicon::FrequencyTable& freqs,
                                         const SifConfig& cfg) {
  if (words.empty()) throw std::invalid_argument("sif_embed: empty word list");
  if (cfg.a <= 0) throw std::invalid_argument("sif_embed: a must be positive");
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(emb.dim);
  for (int w : words) {
    const double f = cfg.useRawCounts
                         ? static_cast<double>(freqs.counts.at(static_cast<std::size_t>(w)))
                         : freqs.rel_freq(w);
    sum += (cfg.a / (cfg.a + f)) * emb.row(w).transpose();
  }
  return normalize_or_null(std::move(sum));
}

std::vector<int> tokenize_to_vocab(std::string_view text, const lexicon::Vocabulary& vocab) {
  std::vector<int> out;
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
  auto is_ascii_punct = [](char c) {
    return std::ispunct(static_cast<unsigned char>(c)) != 0 &&
           static_cast<unsigned char>(c) < 0x80;
  };
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i == start) continue;
    std::string token(text.substr(start, i - start));
    std::size_t lo = 0, hi = token.size();
    while (lo < hi && is_ascii_punct(token[lo])) ++lo;
    while (hi > lo && is_ascii_punct(token[hi - 1])) --hi;
    token = token.substr(lo, hi - lo);
    for (char& c : token)
      if (static_cast<unsigned char>(c) < 0x80)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (token.empty()) continue;
    if (auto id = vocab.find(token)) out.push_back(*id);
  }
  return out;
}

std::optional<SynsetEmbedding> baseline_synset_embedding(const std::string& synsetId,
                                                         std::span<const int> lemmaWords,
                                                         const lexicon::EmbeddingMatrix& emb) {
  if (lemmaWords.empty()) return std::nullopt;
  auto vec = sum_embed(lemmaWords, emb);
  if (!vec) return std::nullopt;
  return SynsetEmbedding{synsetId, std::move(*vec), {Component::Lemma}};
}

std::optional<SynsetEmbedding> full_synset_embedding(
    const std::string& synsetId, std::span<const int> lemmaWords,
    std::span<const int> relatedWords, const ontology::GlossEntry* gloss,
    const lexicon::Vocabulary& vocab, const lexicon::EmbeddingMatrix& emb,
    const lexicon::FrequencyTable& freqs, const SifConfig& cfg) {
  if (cfg.a <= 0) throw std::invalid_argument("full_synset_embedding: a must be positive");
  std::vector<Component> used;
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(emb.dim);
  // Each component joins the average unit-normalized by default; the raw
  // alternative keeps the vectors as computed. Components that cancel to
  // zero are dropped either way.
  auto add_component = [&](Eigen::VectorXd v, Component component) {
    if (v.norm() < kNormEps) return;
    if (cfg.normalizeComponents) v /= v.norm();
    acc += v;
    used.push_back(component);
  };

  if (!lemmaWords.empty()) {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(emb.dim);
    for (int w : lemmaWords) sum += emb.row(w).transpose();
    add_component(std::move(sum), Component::Lemma);
  }
  if (!relatedWords.empty()) {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(emb.dim);
    for (int w : relatedWords) sum += emb.row(w).transpose();
    add_component(std::move(sum), Component::Related);
  }
  if (gloss != nullptr) {
    auto tokens = tokenize_to_vocab(gloss->gloss, vocab);
    if (!tokens.empty()) {
      Eigen::VectorXd sum = Eigen::VectorXd::Zero(emb.dim);
      for (int w : tokens) {
        const double f = cfg.useRawCounts
                             ? static_cast<double>(freqs.counts.at(static_cast<std::size_t>(w)))
                             : freqs.rel_freq(w);
        sum += (cfg.a / (cfg.a + f)) * emb.row(w).transpose();
      }
      add_component(std::move(sum), Component::Definition);
    }
    // Example sentences are averaged after per-sentence normalization and
    // skipped entirely when the synset has none.
    Eigen::VectorXd exampleSum = Eigen::VectorXd::Zero(emb.dim);
    int exampleCount = 0;
    for (const auto& sentence : gloss->examples) {
      auto sentTokens = tokenize_to_vocab(sentence, vocab);
      if (sentTokens.empty()) continue;
      if (auto v = sif_embed(sentTokens, emb, freqs, cfg)) {
        exampleSum += *v;
        ++exampleCount;
      }
    }
    if (exampleCount > 0) add_component(exampleSum / exampleCount, Component::Examples);
  }

  if (used.empty()) return std::nullopt;
  auto vec = normalize_or_null(acc / static_cast<double>(used.size()));
  if (!vec) return std::nullopt;
  return SynsetEmbedding{synsetId, std::move(*vec), std::move(used)};
}

SynsetEmbeddingTable embed_all_synsets(const ontology::OntologyDb& db,
                                       const ontology::TranslationIndex& tindex,
                                       const ontology::TranslatedGlossTable& glosses,
                                       const lexicon::Vocabulary& vocab,
                                       const lexicon::EmbeddingMatrix& emb,
                                       const lexicon::FrequencyTable& freqs,
                                       const SifConfig& cfg, SynsetRepr repr, int threads) {
  SynsetEmbeddingTable table;
  table.byIndex.resize(static_cast<std::size_t>(db.size()));
  const int n = db.size();
#pragma omp parallel for schedule(static) num_threads(threads > 0 ? threads : 1)
  for (int i = 0; i < n; ++i) {
    const auto& rec = db.record(i);
    const auto& lemmaWords = tindex.lemmaWords[static_cast<std::size_t>(i)];
    if (repr == SynsetRepr::Baseline) {
      table.byIndex[static_cast<std::size_t>(i)] =
          baseline_synset_embedding(rec.id, lemmaWords, emb);
    } else {
      auto it = glosses.find(rec.id);
      table.byIndex[static_cast<std::size_t>(i)] = full_synset_embedding(
          rec.id, lemmaWords, tindex.relatedWords[static_cast<std::size_t>(i)],
          it == glosses.end() ? nullptr : &it->second, vocab, emb, freqs, cfg);
    }
  }
  return table;
}

void save_embedding_cache(const std::filesystem::path& path, const SynsetEmbeddingTable& table,
                          const ontology::OntologyDb& db) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write embedding cache: " + path.string());
  for (int i = 0; i < db.size(); ++i) {
    const auto* se = table.get(i);
    if (se == nullptr) continue;
    json obj;
    obj["synsetId"] = se->synsetId;
    obj["vector"] = std::vector<double>(se->vector.data(), se->vector.data() + se->vector.size());
    std::vector<std::string> comps;
    for (auto c : se->componentsUsed) comps.emplace_back(to_string(c));
    obj["componentsUsed"] = comps;
    out << obj.dump() << '\n';
  }
  if (!out) throw InputError("write failed: " + path.string());
}

SynsetEmbeddingTable load_embedding_cache(const std::filesystem::path& path,
                                          const ontology::OntologyDb& db) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open embedding cache: " + path.string());
  SynsetEmbeddingTable table;
  table.byIndex.resize(static_cast<std::size_t>(db.size()));
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded())
      throw InputError("invalid JSON at " + path.string() + ":" + std::to_string(lineno));
    SynsetEmbedding se;
    se.synsetId = obj.at("synsetId").get<std::string>();
    auto values = obj.at("vector").get<std::vector<double>>();
    se.vector = Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
    for (const auto& name : obj.at("componentsUsed").get<std::vector<std::string>>()) {
      auto c = component_from_string(name);
      if (!c) throw InputError("unknown component '" + name + "' in " + path.string());
      se.componentsUsed.push_back(*c);
    }
    int idx = db.require(se.synsetId);
    table.byIndex[static_cast<std::size_t>(idx)] = std::move(se);
  }
  return table;
}

}  // namespace awn::embedder
