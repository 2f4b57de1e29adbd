#include "awn/reference.hpp"

#include <iostream>
#include <set>

namespace awn::ref {

std::vector<wsi::SparseCode> encode_all(const lexicon::EmbeddingMatrix& emb,
                                        const Eigen::MatrixXd& atoms, int s) {
  const int n = static_cast<int>(emb.rows.rows());
  std::vector<wsi::SparseCode> codes(static_cast<std::size_t>(n));
  for (int w = 0; w < n; ++w)
    codes[static_cast<std::size_t>(w)] = wsi::omp_encode(emb.row(w).transpose(), atoms, s);
  return codes;
}

embedder::SynsetEmbeddingTable embed_all_synsets(const ontology::OntologyDb& db,
                                                 const ontology::TranslationIndex& tindex,
                                                 const ontology::TranslatedGlossTable& glosses,
                                                 const lexicon::Vocabulary& vocab,
                                                 const lexicon::EmbeddingMatrix& emb,
                                                 const lexicon::FrequencyTable& freqs,
                                                 const embedder::SifConfig& cfg,
                                                 embedder::SynsetRepr repr) {
  embedder::SynsetEmbeddingTable table;
  table.byIndex.resize(static_cast<std::size_t>(db.size()));
  for (int i = 0; i < db.size(); ++i) {
    const auto& rec = db.record(i);
    const auto& lemmaWords = tindex.lemmaWords[static_cast<std::size_t>(i)];
    if (repr == embedder::SynsetRepr::Baseline) {
      table.byIndex[static_cast<std::size_t>(i)] =
          embedder::baseline_synset_embedding(rec.id, lemmaWords, emb);
    } else {
      auto it = glosses.find(rec.id);
      table.byIndex[static_cast<std::size_t>(i)] = embedder::full_synset_embedding(
          rec.id, lemmaWords, tindex.relatedWords[static_cast<std::size_t>(i)],
          it == glosses.end() ? nullptr : &it->second, vocab, emb, freqs, cfg);
    }
  }
  return table;
}

builder::BuildOutput build_wordnet(const builder::WordnetResources& res,
                                   const builder::BuildConfig& cfg) {
  cfg.validate();
  if (cfg.method == builder::Method::RepresentationWsi && res.model == nullptr)
    throw InputError("method representation+wsi requires a WSI model");

  builder::BuildOutput out;
  std::set<std::string> distinct;
  for (int w = 0; w < res.vocab.size(); ++w) {
    try {
      const auto plans = builder::prepare_word(w, res, cfg);
      if (!plans.empty()) ++out.summary.wordsWithCandidates;
      for (const auto& plan : plans) {
        out.summary.unscorableCandidates += static_cast<std::int64_t>(plan.unscorable.size());
        auto row = builder::match_plan(plan, cfg, res.emb);
        out.summary.matchedPairs += static_cast<std::int64_t>(row.matched.size());
        for (const auto& m : row.matched) distinct.insert(m.synsetId);
        out.rows.push_back(std::move(row));
      }
    } catch (const std::exception& e) {
      std::cerr << "build: skipping word '" << res.vocab.token(w) << "': " << e.what() << "\n";
      ++out.summary.failedWords;
    }
  }
  out.summary.rows = static_cast<std::int64_t>(out.rows.size());
  out.summary.distinctSynsets = static_cast<std::int64_t>(distinct.size());
  return out;
}

}  // namespace awn::ref
