#include "awn/builder.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <set>

namespace awn::builder {

namespace {

using nlohmann::json;

std::string loc(const std::filesystem::path& path, std::size_t lineno) {
  return path.string() + ":" + std::to_string(lineno);
}

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::Baseline: return "baseline";
    case Method::Representation: return "representation";
    case Method::RepresentationWsi: return "representation+wsi";
  }
  return "?";
}

std::optional<Method> method_from_string(std::string_view s) {
  if (s == "baseline") return Method::Baseline;
  if (s == "representation") return Method::Representation;
  if (s == "representation+wsi") return Method::RepresentationWsi;
  return std::nullopt;
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::Threshold: return "threshold";
    case Provenance::ArgmaxFallback: return "argmax-fallback";
    case Provenance::AlphaW: return "alpha_w";
    case Provenance::Recovery: return "recovery";
  }
  return "?";
}

std::optional<Provenance> provenance_from_string(std::string_view s) {
  if (s == "threshold") return Provenance::Threshold;
  if (s == "argmax-fallback") return Provenance::ArgmaxFallback;
  if (s == "alpha_w") return Provenance::AlphaW;
  if (s == "recovery") return Provenance::Recovery;
  return std::nullopt;
}

PosCutoffs BuildConfig::cutoffs_for(Pos pos) const {
  if (auto it = perPosOverrides.find(pos); it != perPosOverrides.end()) return it->second;
  if (pos == Pos::Adv) {
    if (auto it = perPosOverrides.find(Pos::Adj); it != perPosOverrides.end()) return it->second;
  }
  return {alpha, beta};
}

void BuildConfig::validate() const {
  if (method != Method::RepresentationWsi) return;
  for (Pos pos : kAllPos) {
    const auto c = cutoffs_for(pos);
    if (c.beta > c.alpha)
      throw InputError("beta " + std::to_string(c.beta) + " exceeds alpha " +
                       std::to_string(c.alpha) + " for pos " + std::string(to_string(pos)));
  }
}

MatchResult match_with_cutoffs(const std::string& word, Pos pos,
                               const std::vector<ScoredSynset>& scored, double alpha,
                               double alphaW) {
  MatchResult out;
  out.word = word;
  out.pos = pos;
  out.alphaW = alphaW;

  for (const auto& s : scored) {
    if (s.score >= alphaW)
      out.matched.push_back(
          {s.synsetId, s.score, s.score >= alpha ? Provenance::Threshold : Provenance::AlphaW});
  }
  if (out.matched.empty() && !scored.empty()) {
    const ScoredSynset* best = &scored.front();
    for (const auto& s : scored) {
      if (s.score > best->score ||
          (s.score == best->score && s.synsetId < best->synsetId))
        best = &s;
    }
    out.matched.push_back({best->synsetId, best->score, Provenance::ArgmaxFallback});
  }
  std::sort(out.matched.begin(), out.matched.end(),
            [](const Match& a, const Match& b) { return a.synsetId < b.synsetId; });
  return out;
}

MatchResult score_threshold(const std::string& word, Pos pos,
                            const std::vector<ScoredSynset>& scored, double alpha) {
  return match_with_cutoffs(word, pos, scored, alpha, alpha);
}

double effective_cutoff(const std::vector<ScoredSynset>& scored,
                        const std::map<std::string, linker::SynsetAssignment>& assignments,
                        double alpha) {
  const ScoredSynset* best = nullptr;
  double bestObjective = 0.0;
  for (const auto& s : scored) {
    auto it = assignments.find(s.synsetId);
    if (it == assignments.end() || !it->second.hasAtom()) continue;
    const double f = it->second.objectiveValue;
    if (best == nullptr || f > bestObjective ||
        (f == bestObjective &&
         (s.score > best->score || (s.score == best->score && s.synsetId < best->synsetId)))) {
      best = &s;
      bestObjective = f;
    }
  }
  if (best == nullptr) return alpha;
  return std::min(alpha, best->score);
}

MatchResult recover_synsets(MatchResult result, const std::vector<ScoredSynset>& scored,
                            const std::map<std::string, linker::SynsetAssignment>& assignments,
                            double beta, const lexicon::EmbeddingMatrix& emb, bool fixpoint) {
  const double alphaW = result.alphaW;

  std::set<std::string> matched;
  for (const auto& m : result.matched) matched.insert(m.synsetId);

  // Candidates per synset-atom, in scored (id) order.
  std::map<int, std::vector<const ScoredSynset*>> byAtom;
  for (const auto& s : scored) {
    auto it = assignments.find(s.synsetId);
    if (it != assignments.end() && it->second.hasAtom())
      byAtom[it->second.atomIndex].push_back(&s);
  }

  bool changed = true;
  bool firstPass = true;
  while (changed && (firstPass || fixpoint)) {
    changed = false;
    for (const auto& [atom, group] : byAtom) {
      std::vector<const ScoredSynset*> anchors;
      for (const auto* s : group)
        if (matched.count(s->synsetId)) anchors.push_back(s);
      if (anchors.empty()) continue;  // an empty universal does not recover

      for (const auto* s : group) {
        if (matched.count(s->synsetId)) continue;
        if (s->score < beta || s->score >= alphaW) continue;
        const auto& cluster = assignments.at(s->synsetId).cluster.words;
        bool similarToAll = true;
        for (const auto* anchor : anchors) {
          if (!linker::is_similar(cluster, assignments.at(anchor->synsetId).cluster.words,
                                  emb)) {
            similarToAll = false;
            break;
          }
        }
        if (similarToAll) {
          result.matched.push_back({s->synsetId, s->score, Provenance::Recovery});
          matched.insert(s->synsetId);
          changed = true;
        }
      }
    }
    firstPass = false;
  }

  std::sort(result.matched.begin(), result.matched.end(),
            [](const Match& a, const Match& b) { return a.synsetId < b.synsetId; });
  return result;
}

std::vector<WordPlan> prepare_word(int word, const WordnetResources& res,
                                   const BuildConfig& cfg) {
  if (cfg.method == Method::RepresentationWsi && res.model == nullptr)
    throw InputError("method representation+wsi requires a WSI model");
  const auto cands = res.gen.candidates(word);
  if (cands.candidates.empty()) return {};

  // Candidates are partitioned by synset POS; each group runs the pipeline
  // with its own cutoffs and produces its own output row.
  std::map<Pos, WordPlan> byPos;
  for (const auto& id : cands.candidates) {
    const int idx = res.db.require(id);
    const Pos pos = res.db.record(idx).pos;
    auto& plan = byPos[pos];
    plan.word = word;
    plan.wordToken = res.vocab.token(word);
    plan.pos = pos;
    const auto* se = res.synsetEmb.get(idx);
    if (se == nullptr) {
      plan.unscorable.push_back(id);
      continue;
    }
    const double score = se->vector.dot(res.emb.row(word).transpose());
    plan.scored.push_back({id, score});
    if (cfg.method == Method::RepresentationWsi) {
      plan.assignments[id] = linker::assign_synset(word, id, cands, *res.model, cfg.purify,
                                                   res.vocab, res.emb, cfg.includeOwnLemmas);
    }
  }

  std::vector<WordPlan> plans;
  for (Pos pos : kAllPos) {
    auto it = byPos.find(pos);
    if (it != byPos.end()) plans.push_back(std::move(it->second));
  }
  return plans;
}

MatchResult match_plan(const WordPlan& plan, const BuildConfig& cfg,
                       const lexicon::EmbeddingMatrix& emb) {
  const auto cutoffs = cfg.cutoffs_for(plan.pos);
  const std::string& word = plan.wordToken;
  switch (cfg.method) {
    case Method::Baseline:
    case Method::Representation:
      return score_threshold(word, plan.pos, plan.scored, cutoffs.alpha);
    case Method::RepresentationWsi: {
      const double alphaW = effective_cutoff(plan.scored, plan.assignments, cutoffs.alpha);
      MatchResult r = match_with_cutoffs(word, plan.pos, plan.scored, cutoffs.alpha, alphaW);
      return recover_synsets(std::move(r), plan.scored, plan.assignments, cutoffs.beta, emb,
                             cfg.recoveryFixpoint);
    }
  }
  throw std::logic_error("unreachable method");
}

BuildOutput build_wordnet(const WordnetResources& res, const BuildConfig& cfg, int threads) {
  cfg.validate();
  if (cfg.method == Method::RepresentationWsi && res.model == nullptr)
    throw InputError("method representation+wsi requires a WSI model");

  const int n = res.vocab.size();
  std::vector<std::vector<MatchResult>> perWord(static_cast<std::size_t>(n));
  std::vector<std::vector<std::string>> perWordUnscorable(static_cast<std::size_t>(n));
  std::vector<std::string> errors(static_cast<std::size_t>(n));

#pragma omp parallel for schedule(dynamic, 8) num_threads(threads > 0 ? threads : 1)
  for (int w = 0; w < n; ++w) {
    try {
      for (auto& plan : prepare_word(w, res, cfg)) {
        perWordUnscorable[static_cast<std::size_t>(w)].insert(
            perWordUnscorable[static_cast<std::size_t>(w)].end(), plan.unscorable.begin(),
            plan.unscorable.end());
        perWord[static_cast<std::size_t>(w)].push_back(match_plan(plan, cfg, res.emb));
      }
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(w)] = e.what();
    }
  }

  BuildOutput out;
  std::set<std::string> distinct;
  for (int w = 0; w < n; ++w) {
    if (!errors[static_cast<std::size_t>(w)].empty()) {
      std::cerr << "build: skipping word '" << res.vocab.token(w)
                << "': " << errors[static_cast<std::size_t>(w)] << "\n";
      ++out.summary.failedWords;
      continue;
    }
    const auto& rows = perWord[static_cast<std::size_t>(w)];
    if (!rows.empty()) ++out.summary.wordsWithCandidates;
    for (const auto& row : rows) {
      out.summary.matchedPairs += static_cast<std::int64_t>(row.matched.size());
      for (const auto& m : row.matched) distinct.insert(m.synsetId);
      out.rows.push_back(row);
    }
    out.summary.unscorableCandidates +=
        static_cast<std::int64_t>(perWordUnscorable[static_cast<std::size_t>(w)].size());
  }
  out.summary.rows = static_cast<std::int64_t>(out.rows.size());
  out.summary.distinctSynsets = static_cast<std::int64_t>(distinct.size());
  return out;
}

void save_wordnet_jsonl(const std::filesystem::path& path, const std::vector<MatchResult>& rows) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write wordnet file: " + path.string());
  for (const auto& row : rows) {
    json matches = json::array();
    for (const auto& m : row.matched) {
      json obj;
      obj["synsetId"] = m.synsetId;
      obj["score"] = m.score;
      obj["provenance"] = std::string(to_string(m.provenance));
      matches.push_back(std::move(obj));
    }
    json obj;
    obj["word"] = row.word;
    obj["pos"] = std::string(to_string(row.pos));
    obj["alphaW"] = row.alphaW;
    obj["matches"] = std::move(matches);
    out << obj.dump() << '\n';
  }
  if (!out) throw InputError("write failed: " + path.string());
}

std::vector<MatchResult> load_wordnet_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open wordnet file: " + path.string());
  std::vector<MatchResult> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded()) throw InputError("invalid JSON at " + loc(path, lineno));
    MatchResult row;
    row.word = obj.at("word").get<std::string>();
    auto pos = pos_from_string(obj.at("pos").get<std::string>());
    if (!pos) throw InputError("invalid pos at " + loc(path, lineno));
    row.pos = *pos;
    row.alphaW = obj.at("alphaW").get<double>();
    for (const auto& m : obj.at("matches")) {
      auto prov = provenance_from_string(m.at("provenance").get<std::string>());
      if (!prov) throw InputError("invalid provenance at " + loc(path, lineno));
      row.matched.push_back({m.at("synsetId").get<std::string>(), m.at("score").get<double>(),
                             *prov});
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace awn::builder
