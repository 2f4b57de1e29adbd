#pragma once

#include "awn/builder.hpp"
#include "awn/embedder.hpp"
#include "awn/wsi.hpp"

// Plain serial implementations of the batch kernels that run under OpenMP
// elsewhere. Tests assert the parallel paths reproduce these bit for bit and
// the benchmark target compares their throughput.
namespace awn::ref {

std::vector<wsi::SparseCode> encode_all(const lexicon::EmbeddingMatrix& emb,
                                        const Eigen::MatrixXd& atoms, int s);

embedder::SynsetEmbeddingTable embed_all_synsets(const ontology::OntologyDb& db,
                                                 const ontology::TranslationIndex& tindex,
                                                 const ontology::TranslatedGlossTable& glosses,
                                                 const lexicon::Vocabulary& vocab,
                                                 const lexicon::EmbeddingMatrix& emb,
                                                 const lexicon::FrequencyTable& freqs,
                                                 const embedder::SifConfig& cfg,
                                                 embedder::SynsetRepr repr);

builder::BuildOutput build_wordnet(const builder::WordnetResources& res,
                                   const builder::BuildConfig& cfg);

}  // namespace awn::ref
