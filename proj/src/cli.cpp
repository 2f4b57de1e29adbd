#include "awn/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>

#include "awn/builder.hpp"
#include "awn/common.hpp"
#include "awn/embedder.hpp"
#include "awn/evaluator.hpp"
#include "awn/lexicon.hpp"
#include "awn/linker.hpp"
#include "awn/manifest.hpp"
#include "awn/ontology.hpp"
#include "awn/purifier.hpp"
#include "awn/wsi.hpp"

namespace awn::cli {

namespace {

using nlohmann::json;

int resolve_threads(int requested) {
  if (requested > 0) return requested;
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

double snap(double value) { return std::round(value * 1e9) / 1e9; }

struct CommonOpts {
  std::string emb;
  std::string freq;
  std::string synsets;
  std::string dict;
  std::string glosses;
  int threads = 0;
};

/// Loaded pipeline inputs. Constructed in place; the candidate generator
/// keeps references into the other members.
struct World {
  lexicon::Embeddings embeddings;
  lexicon::FrequencyTable freqs;
  std::optional<ontology::OntologyDb> db;
  ontology::BilingualDict dict;
  ontology::TranslatedGlossTable glosses;
  std::optional<ontology::CandidateGenerator> gen;

  static World load(const CommonOpts& opts) {
    World world;
    world.embeddings = lexicon::load_embeddings(opts.emb);
    if (!opts.freq.empty())
      world.freqs = lexicon::load_frequencies(opts.freq, world.embeddings.vocab);
    else
      world.freqs = uniform_frequencies(world.embeddings.vocab);
    world.db = ontology::load_synsets(opts.synsets);
    world.dict = ontology::load_dictionary(opts.dict);
    if (!opts.glosses.empty()) world.glosses = ontology::load_glosses(opts.glosses, *world.db);
    world.gen.emplace(*world.db, world.dict, world.embeddings.vocab);
    return world;
  }

  static lexicon::FrequencyTable uniform_frequencies(const lexicon::Vocabulary& vocab) {
    lexicon::FrequencyTable table;
    table.counts.assign(static_cast<std::size_t>(vocab.size()), 1);
    table.total = vocab.size();
    return table;
  }
};

void add_common_inputs(CLI::App* cmd, CommonOpts& opts, bool needGlosses) {
  cmd->add_option("--emb", opts.emb, "Embedding file: optional 'count dim' header, then one 'token x1..xd' line per word")
      ->required();
  cmd->add_option("--freq", opts.freq, "Frequency TSV: token<TAB>count per line (uniform if omitted)");
  cmd->add_option("--synsets", opts.synsets,
                  "Synset DB, JSON-lines {id,pos,lemmas,gloss,examples,related}")
      ->required();
  cmd->add_option("--dict", opts.dict, "Bilingual dictionary TSV: english<TAB>target")
      ->required();
  auto* glosses = cmd->add_option("--glosses", opts.glosses,
                                  "Translated glosses, JSON-lines {id,gloss,examples}");
  if (needGlosses) glosses->required();
  cmd->add_option("--threads", opts.threads, "Worker threads (0 = all hardware threads)");
}

json sif_params(const embedder::SifConfig& cfg) {
  json j;
  j["a"] = cfg.a;
  j["useRawCounts"] = cfg.useRawCounts;
  j["normalizeComponents"] = cfg.normalizeComponents;
  return j;
}

json model_params(const wsi::WsiModel& model) {
  json j;
  j["dim"] = model.dim;
  j["k"] = model.k;
  j["s"] = model.s;
  j["seed"] = model.seed;
  j["iterations"] = model.iterations;
  return j;
}

json purify_params(const purifier::PurifyConfig& cfg) {
  json j;
  j["n"] = cfg.n;
  j["minCos"] = cfg.minCos;
  return j;
}

// ---------------------------------------------------------------------------
// validate

struct ValidateOpts {
  CommonOpts common;
  std::string testset;
  std::string core;
};

int cmd_validate(const ValidateOpts& opts) {
  World world = World::load(opts.common);
  const auto& vocab = world.embeddings.vocab;
  std::cout << "vocabulary: " << vocab.size() << " words, dim " << world.embeddings.matrix.dim
            << "\n";
  std::cout << "synsets: " << world.db->size() << "\n";
  std::cout << "dictionary pairs: " << world.dict.pair_count() << "\n";
  std::cout << "translated glosses: " << world.glosses.size() << "\n";

  std::map<Pos, std::pair<std::int64_t, std::int64_t>> perPos;  // (candidates, words)
  std::int64_t wordsWithCandidates = 0;
  for (int w = 0; w < vocab.size(); ++w) {
    const auto cands = world.gen->candidates(w);
    if (cands.candidates.empty()) continue;
    ++wordsWithCandidates;
    std::map<Pos, std::int64_t> counts;
    for (const auto& id : cands.candidates)
      ++counts[world.db->record(world.db->require(id)).pos];
    for (const auto& [pos, count] : counts) {
      perPos[pos].first += count;
      perPos[pos].second += 1;
    }
  }
  std::cout << "words with candidates: " << wordsWithCandidates << "\n";
  for (const auto& [pos, stat] : perPos) {
    std::cout << "  " << to_string(pos) << ": avg "
              << (stat.second > 0 ? static_cast<double>(stat.first) /
                                        static_cast<double>(stat.second)
                                  : 0.0)
              << " candidates over " << stat.second << " words\n";
  }

  if (!opts.testset.empty()) {
    const auto testSet = evaluator::load_testset(opts.testset);
    std::int64_t pairs = 0;
    for (const auto& e : testSet.entries) pairs += static_cast<std::int64_t>(e.candidates.size());
    std::cout << "test set: " << testSet.entries.size() << " words, " << pairs
              << " candidate pairs\n";
  }
  if (!opts.core.empty())
    std::cout << "core synsets: " << evaluator::load_core_list(opts.core).size() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// embed-synsets

struct EmbedOpts {
  CommonOpts common;
  std::string method = "representation";
  double a = 1e-4;
  bool rawCounts = false;
  bool rawComponents = false;
  std::string out;
};

int cmd_embed_synsets(const EmbedOpts& opts) {
  if (opts.a <= 0) throw InputError("--a must be positive");
  if (opts.method != "baseline" && opts.method != "representation")
    throw InputError("unknown embedding method: " + opts.method);
  World world = World::load(opts.common);
  embedder::SifConfig sif{opts.a, opts.rawCounts, !opts.rawComponents};
  const auto repr = opts.method == "baseline" ? embedder::SynsetRepr::Baseline
                                              : embedder::SynsetRepr::Full;
  const auto table = embedder::embed_all_synsets(
      *world.db, world.gen->translation_index(), world.glosses, world.embeddings.vocab,
      world.embeddings.matrix, world.freqs, sif, repr, resolve_threads(opts.common.threads));

  std::filesystem::path out = opts.out;
  if (out.empty()) {
    const char* cacheDir = std::getenv("AWN_CACHE_DIR");
    out = std::filesystem::path(cacheDir ? cacheDir : ".") / "synset-cache.jsonl";
  }
  embedder::save_embedding_cache(out, table, *world.db);

  std::int64_t embedded = 0;
  for (const auto& slot : table.byIndex)
    if (slot) ++embedded;
  std::cout << "embedded " << embedded << "/" << world.db->size() << " synsets -> " << out
            << "\n";

  manifest::RunManifest m;
  m.subcommand = "embed-synsets";
  m.parameters = {{"method", opts.method}, {"sif", sif_params(sif)}};
  m.inputs = {opts.common.emb, opts.common.synsets, opts.common.dict};
  if (!opts.common.freq.empty()) m.inputs.push_back(opts.common.freq);
  if (!opts.common.glosses.empty()) m.inputs.push_back(opts.common.glosses);
  m.outputs = {out};
  manifest::write(m);
  return 0;
}

// ---------------------------------------------------------------------------
// fit-wsi

struct FitOpts {
  std::string emb;
  wsi::WsiConfig cfg;
  std::string format = "json";
  std::string out;
  int threads = 0;
};

int cmd_fit_wsi(const FitOpts& opts) {
  const auto embeddings = lexicon::load_embeddings(opts.emb);
  const auto model = wsi::ksvd_fit(embeddings.matrix, opts.cfg, resolve_threads(opts.threads));
  if (opts.format == "binary")
    wsi::save_model_binary(opts.out, model);
  else
    wsi::save_model_json(opts.out, model);
  std::cout << "fit " << model.k << " atoms over " << model.codes.size() << " words; mse "
            << model.mseTrace.front() << " -> " << model.mseTrace.back() << " -> " << opts.out
            << "\n";

  manifest::RunManifest m;
  m.subcommand = "fit-wsi";
  m.parameters = {{"k", opts.cfg.k},
                  {"s", opts.cfg.s},
                  {"iterations", opts.cfg.iterations},
                  {"seed", opts.cfg.seed},
                  {"reinitThreshold", opts.cfg.reinitThreshold},
                  {"format", opts.format}};
  m.inputs = {opts.emb};
  m.outputs = {opts.out};
  manifest::write(m);
  return 0;
}

// ---------------------------------------------------------------------------
// purify

struct PurifyOpts {
  std::string emb;
  std::string model;
  std::string words;
  purifier::PurifyConfig cfg;
  std::string out;
  int threads = 0;
};

int cmd_purify(const PurifyOpts& opts) {
  const auto embeddings = lexicon::load_embeddings(opts.emb);
  const auto& vocab = embeddings.vocab;
  const auto model = wsi::load_model(opts.model);
  if (static_cast<int>(model.codes.size()) != vocab.size())
    throw InputError("model was fit on a different vocabulary size");

  std::vector<int> words;
  if (opts.words.empty()) {
    for (int w = 0; w < vocab.size(); ++w) words.push_back(w);
  } else {
    std::ifstream in(opts.words);
    if (!in) throw InputError("cannot open word list: " + opts.words);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) words.push_back(vocab.require(line));
    }
  }

  // Full vocabulary as the search space; purify filters it per word-atom.
  std::vector<int> searchSpace(static_cast<std::size_t>(vocab.size()));
  for (int w = 0; w < vocab.size(); ++w) searchSpace[static_cast<std::size_t>(w)] = w;

  std::vector<std::string> lines(words.size());
  std::vector<std::string> errors(words.size());
  const int count = static_cast<int>(words.size());
  const int threads = resolve_threads(opts.threads);
#pragma omp parallel for schedule(dynamic, 4) num_threads(threads)
  for (int i = 0; i < count; ++i) {
    const int w = words[static_cast<std::size_t>(i)];
    try {
      std::string block;
      for (int atom : wsi::word_atoms(model, w)) {
        const auto cluster = purifier::purify(w, atom, searchSpace, opts.cfg, vocab,
                                              embeddings.matrix, model.atoms);
        json obj;
        obj["word"] = vocab.token(w);
        obj["atom"] = atom;
        json members = json::array();
        for (int member : cluster.words) members.push_back(vocab.token(member));
        obj["cluster"] = std::move(members);
        obj["gamma"] = cluster.gamma;
        block += obj.dump();
        block += '\n';
      }
      lines[static_cast<std::size_t>(i)] = std::move(block);
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(i)] = e.what();
    }
  }
  for (int i = 0; i < count; ++i)
    if (!errors[static_cast<std::size_t>(i)].empty())
      std::cerr << "purify: skipping word '" << vocab.token(words[static_cast<std::size_t>(i)])
                << "': " << errors[static_cast<std::size_t>(i)] << "\n";

  std::ofstream out(opts.out);
  if (!out) throw InputError("cannot write cluster file: " + opts.out);
  for (const auto& block : lines) out << block;
  out.close();
  std::cout << "purified " << count << " words -> " << opts.out << "\n";

  manifest::RunManifest m;
  m.subcommand = "purify";
  m.parameters = purify_params(opts.cfg);
  m.inputs = {opts.emb, opts.model};
  if (!opts.words.empty()) m.inputs.push_back(opts.words);
  m.outputs = {opts.out};
  manifest::write(m);
  return 0;
}

// ---------------------------------------------------------------------------
// build

struct BuildOpts {
  CommonOpts common;
  std::string model;
  std::string method = "representation+wsi";
  double alpha = 0.4;
  double beta = 0.25;
  std::string posConfig;
  purifier::PurifyConfig purify;
  double a = 1e-4;
  bool rawCounts = false;
  bool rawComponents = false;
  bool searchRelatedOnly = false;
  bool recoveryFixpoint = false;
  std::string synsetCache;
  std::string out;
};

builder::BuildConfig make_build_config(const BuildOpts& opts) {
  builder::BuildConfig cfg;
  auto method = builder::method_from_string(opts.method);
  if (!method) throw InputError("unknown method: " + opts.method);
  if (opts.a <= 0) throw InputError("--a must be positive");
  cfg.method = *method;
  cfg.alpha = opts.alpha;
  cfg.beta = opts.beta;
  cfg.purify = opts.purify;
  cfg.sif = {opts.a, opts.rawCounts, !opts.rawComponents};
  cfg.includeOwnLemmas = !opts.searchRelatedOnly;
  cfg.recoveryFixpoint = opts.recoveryFixpoint;
  if (!opts.posConfig.empty()) {
    std::ifstream in(opts.posConfig);
    if (!in) throw InputError("cannot open pos config: " + opts.posConfig);
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
      throw InputError("invalid pos config: " + opts.posConfig);
    for (const auto& [key, value] : doc.items()) {
      auto pos = pos_from_string(key);
      if (!pos) throw InputError("unknown pos '" + key + "' in " + opts.posConfig);
      cfg.perPosOverrides[*pos] = {value.at("alpha").get<double>(),
                                   value.at("beta").get<double>()};
    }
  }
  cfg.validate();
  return cfg;
}

embedder::SynsetEmbeddingTable synset_table_for(const World& world,
                                                const builder::BuildConfig& cfg,
                                                const std::string& cachePath, int threads) {
  if (!cachePath.empty()) return embedder::load_embedding_cache(cachePath, *world.db);
  const auto repr = cfg.method == builder::Method::Baseline ? embedder::SynsetRepr::Baseline
                                                            : embedder::SynsetRepr::Full;
  return embedder::embed_all_synsets(*world.db, world.gen->translation_index(), world.glosses,
                                     world.embeddings.vocab, world.embeddings.matrix, world.freqs,
                                     cfg.sif, repr, threads);
}

int cmd_build(const BuildOpts& opts) {
  World world = World::load(opts.common);
  const auto cfg = make_build_config(opts);
  const int threads = resolve_threads(opts.common.threads);

  std::optional<wsi::WsiModel> model;
  if (cfg.method == builder::Method::RepresentationWsi) {
    if (opts.model.empty()) throw InputError("--model is required for representation+wsi");
    model = wsi::load_model(opts.model);
    if (static_cast<int>(model->codes.size()) != world.embeddings.vocab.size())
      throw InputError("model was fit on a different vocabulary size");
  }

  const auto table = synset_table_for(world, cfg, opts.synsetCache, threads);
  builder::WordnetResources res{world.embeddings.vocab, world.embeddings.matrix, *world.db,
                                *world.gen,             table,
                                model ? &*model : nullptr};
  const auto output = builder::build_wordnet(res, cfg, threads);
  builder::save_wordnet_jsonl(opts.out, output.rows);

  std::cout << "built wordnet: " << output.summary.rows << " rows over "
            << output.summary.wordsWithCandidates << " words; " << output.summary.matchedPairs
            << " matches, " << output.summary.distinctSynsets << " distinct synsets -> "
            << opts.out << "\n";
  if (output.summary.unscorableCandidates > 0)
    std::cout << "  unscorable candidates skipped: " << output.summary.unscorableCandidates
              << "\n";
  if (output.summary.failedWords > 0)
    std::cout << "  words skipped on error: " << output.summary.failedWords << "\n";

  manifest::RunManifest m;
  m.subcommand = "build";
  m.parameters = {{"method", opts.method},
                  {"alpha", opts.alpha},
                  {"beta", opts.beta},
                  {"purify", purify_params(cfg.purify)},
                  {"sif", sif_params(cfg.sif)},
                  {"summary",
                   {{"rows", output.summary.rows},
                    {"matchedPairs", output.summary.matchedPairs},
                    {"distinctSynsets", output.summary.distinctSynsets},
                    {"unscorableCandidates", output.summary.unscorableCandidates},
                    {"failedWords", output.summary.failedWords}}}};
  if (model) m.parameters["model"] = model_params(*model);
  m.inputs = {opts.common.emb, opts.common.synsets, opts.common.dict};
  if (!opts.common.freq.empty()) m.inputs.push_back(opts.common.freq);
  if (!opts.common.glosses.empty()) m.inputs.push_back(opts.common.glosses);
  if (!opts.model.empty()) m.inputs.push_back(opts.model);
  m.outputs = {opts.out};
  manifest::write(m);
  return 0;
}

// ---------------------------------------------------------------------------
// cluster-senses

struct ClusterOpts {
  CommonOpts common;
  std::string model;
  purifier::PurifyConfig purify;
  std::string out;
};

int cmd_cluster_senses(const ClusterOpts& opts) {
  World world = World::load(opts.common);
  const auto& vocab = world.embeddings.vocab;
  const auto model = wsi::load_model(opts.model);
  if (static_cast<int>(model.codes.size()) != vocab.size())
    throw InputError("model was fit on a different vocabulary size");
  const int threads = resolve_threads(opts.common.threads);

  std::vector<std::string> lines(static_cast<std::size_t>(vocab.size()));
  std::vector<std::string> errors(static_cast<std::size_t>(vocab.size()));
#pragma omp parallel for schedule(dynamic, 4) num_threads(threads)
  for (int w = 0; w < vocab.size(); ++w) {
    try {
      const auto cands = world.gen->candidates(w);
      if (cands.candidates.empty()) continue;
      std::map<std::string, linker::SynsetAssignment> assignments;
      for (const auto& id : cands.candidates)
        assignments[id] = linker::assign_synset(w, id, cands, model, opts.purify, vocab,
                                                world.embeddings.matrix);
      const auto clustering =
          linker::sense_cluster(w, cands.candidates, assignments, world.embeddings.matrix);
      json obj;
      obj["word"] = vocab.token(w);
      obj["groups"] = clustering.groups;
      lines[static_cast<std::size_t>(w)] = obj.dump() + '\n';
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(w)] = e.what();
    }
  }
  for (int w = 0; w < vocab.size(); ++w)
    if (!errors[static_cast<std::size_t>(w)].empty())
      std::cerr << "cluster-senses: skipping word '" << vocab.token(w)
                << "': " << errors[static_cast<std::size_t>(w)] << "\n";

  std::ofstream out(opts.out);
  if (!out) throw InputError("cannot write cluster file: " + opts.out);
  for (const auto& line : lines) out << line;
  out.close();
  std::cout << "clustered senses -> " << opts.out << "\n";

  manifest::RunManifest m;
  m.subcommand = "cluster-senses";
  m.parameters = purify_params(opts.purify);
  m.inputs = {opts.common.emb, opts.common.synsets, opts.common.dict, opts.model};
  m.outputs = {opts.out};
  manifest::write(m);
  return 0;
}

// ---------------------------------------------------------------------------
// tune

struct TuneOpts {
  BuildOpts build;
  std::string testset;
  std::string grid = "0:1:0.01";
  std::uint64_t seed = 0;
  std::string mode = "candidate-restricted";
  std::string agg = "pooled";
  std::string out;
};

int cmd_tune(const TuneOpts& opts) {
  World world = World::load(opts.build.common);
  auto cfg = make_build_config(opts.build);
  const int threads = resolve_threads(opts.build.common.threads);
  const auto testSet = evaluator::load_testset(opts.testset);

  std::optional<wsi::WsiModel> model;
  if (cfg.method == builder::Method::RepresentationWsi) {
    if (opts.build.model.empty()) throw InputError("--model is required for representation+wsi");
    model = wsi::load_model(opts.build.model);
    if (static_cast<int>(model->codes.size()) != world.embeddings.vocab.size())
      throw InputError("model was fit on a different vocabulary size");
  }
  const auto table = synset_table_for(world, cfg, opts.build.synsetCache, threads);
  builder::WordnetResources res{world.embeddings.vocab, world.embeddings.matrix, *world.db,
                                *world.gen,             table,
                                model ? &*model : nullptr};

  // Cutoff-independent plans for the test words only; each grid point is
  // then a cheap re-threshold.
  std::set<std::string> testWords;
  for (const auto& e : testSet.entries) testWords.insert(e.word);
  std::vector<int> wordIds;
  for (const auto& token : testWords) {
    if (auto id = world.embeddings.vocab.find(token))
      wordIds.push_back(*id);
    else
      std::cerr << "tune: test word '" << token << "' not in vocabulary; skipped\n";
  }
  std::vector<std::vector<builder::WordPlan>> plans(wordIds.size());
  const int wordCount = static_cast<int>(wordIds.size());
#pragma omp parallel for schedule(dynamic, 4) num_threads(threads)
  for (int i = 0; i < wordCount; ++i)
    plans[static_cast<std::size_t>(i)] =
        builder::prepare_word(wordIds[static_cast<std::size_t>(i)], res, cfg);

  auto buildFn = [&](double alpha, double beta) {
    builder::BuildConfig point = cfg;
    point.alpha = alpha;
    point.beta = beta;
    point.perPosOverrides.clear();
    std::vector<builder::MatchResult> rows;
    for (const auto& wordPlans : plans)
      for (const auto& plan : wordPlans)
        rows.push_back(builder::match_plan(plan, point, world.embeddings.matrix));
    return rows;
  };

  auto grid = parse_grid_spec(opts.grid);
  auto modeValue = evaluator::eval_mode_from_string(opts.mode);
  if (!modeValue) throw InputError("unknown eval mode: " + opts.mode);
  auto aggValue = evaluator::pos_agg_from_string(opts.agg);
  if (!aggValue) throw InputError("unknown aggregation: " + opts.agg);

  const auto result =
      evaluator::tune(buildFn, testSet, grid, opts.seed, *modeValue, *aggValue, threads);

  std::cout << "tuned alpha=" << result.alpha << " beta=" << result.beta << " (grid of "
            << result.table.size() << " points; " << result.tuningEntries << " tuning / "
            << result.heldOutEntries << " held-out words)\n";
  std::cout << evaluator::render_table(result.heldOutReport);

  json doc;
  doc["alpha"] = result.alpha;
  doc["beta"] = result.beta;
  doc["tuningEntries"] = result.tuningEntries;
  doc["heldOutEntries"] = result.heldOutEntries;
  doc["heldOutReport"] = evaluator::report_to_json(result.heldOutReport);
  json tableJson = json::array();
  for (const auto& p : result.table)
    tableJson.push_back({{"alpha", p.alpha}, {"beta", p.beta}, {"tuningF05", p.tuningF05}});
  doc["grid"] = std::move(tableJson);
  std::ofstream out(opts.out);
  if (!out) throw InputError("cannot write tune report: " + opts.out);
  out << doc.dump(2) << '\n';
  out.close();

  manifest::RunManifest m;
  m.subcommand = "tune";
  m.parameters = {{"method", opts.build.method}, {"grid", opts.grid},   {"seed", opts.seed},
                  {"mode", opts.mode},           {"agg", opts.agg},     {"alpha", result.alpha},
                  {"beta", result.beta},         {"purify", purify_params(cfg.purify)},
                  {"sif", sif_params(cfg.sif)}};
  if (model) m.parameters["model"] = model_params(*model);
  m.inputs = {opts.build.common.emb, opts.build.common.synsets, opts.build.common.dict,
              opts.testset};
  if (!opts.build.common.freq.empty()) m.inputs.push_back(opts.build.common.freq);
  if (!opts.build.common.glosses.empty()) m.inputs.push_back(opts.build.common.glosses);
  if (!opts.build.model.empty()) m.inputs.push_back(opts.build.model);
  m.outputs = {opts.out};
  manifest::write(m);
  return 0;
}

// ---------------------------------------------------------------------------
// eval

struct EvalOpts {
  std::string wordnet;
  std::string testset;
  std::string core;
  std::string mode = "candidate-restricted";
  std::string agg = "pooled";
  std::string out;
};

int cmd_eval(const EvalOpts& opts) {
  const auto rows = builder::load_wordnet_jsonl(opts.wordnet);
  const auto testSet = evaluator::load_testset(opts.testset);
  auto modeValue = evaluator::eval_mode_from_string(opts.mode);
  if (!modeValue) throw InputError("unknown eval mode: " + opts.mode);
  auto aggValue = evaluator::pos_agg_from_string(opts.agg);
  if (!aggValue) throw InputError("unknown aggregation: " + opts.agg);

  auto pooled = evaluator::evaluate(rows, testSet, *modeValue, evaluator::PosAgg::PooledWithinPos);
  auto macro = evaluator::evaluate(rows, testSet, *modeValue, evaluator::PosAgg::PerWordMacro);
  if (!opts.core.empty()) {
    const auto core = evaluator::load_core_list(opts.core);
    const double cov = evaluator::coverage(rows, core);
    pooled.coverage = cov;
    macro.coverage = cov;
  }
  const auto& primary =
      *aggValue == evaluator::PosAgg::PooledWithinPos ? pooled : macro;
  std::cout << evaluator::render_table(primary);

  if (!opts.out.empty()) {
    json doc;
    doc["primaryAggregation"] = opts.agg;
    doc["pooled"] = evaluator::report_to_json(pooled);
    doc["perWordMacro"] = evaluator::report_to_json(macro);
    std::ofstream out(opts.out);
    if (!out) throw InputError("cannot write eval report: " + opts.out);
    out << doc.dump(2) << '\n';
    out.close();

    manifest::RunManifest m;
    m.subcommand = "eval";
    m.parameters = {{"mode", opts.mode}, {"agg", opts.agg}};
    m.inputs = {opts.wordnet, opts.testset};
    if (!opts.core.empty()) m.inputs.push_back(opts.core);
    m.outputs = {opts.out};
    manifest::write(m);
  }
  return 0;
}

void add_build_options(CLI::App* cmd, BuildOpts& opts, bool needGlosses) {
  add_common_inputs(cmd, opts.common, needGlosses);
  cmd->add_option("--model", opts.model, "WSI model file (fit-wsi output)");
  cmd->add_option("--method", opts.method,
                  "baseline | representation | representation+wsi");
  cmd->add_option("--alpha", opts.alpha, "Score cutoff");
  cmd->add_option("--beta", opts.beta, "Recovery cutoff (<= alpha)");
  cmd->add_option("--pos-config", opts.posConfig,
                  "JSON {pos: {alpha, beta}} per-POS overrides");
  cmd->add_option("--n", opts.purify.n, "Purification cluster size");
  cmd->add_option("--min-cos", opts.purify.minCos, "Purification search-space cosine floor");
  cmd->add_option("--a", opts.a, "SIF smoothing parameter");
  cmd->add_flag("--sif-raw-counts", opts.rawCounts,
                "Use raw counts instead of relative frequencies in SIF weights");
  cmd->add_flag("--raw-component-average", opts.rawComponents,
                "Average the synset components without normalizing them first");
  cmd->add_flag("--search-related-only", opts.searchRelatedOnly,
                "Purify over related-synset translations only, without the synset's own lemmas");
  cmd->add_flag("--recovery-fixpoint", opts.recoveryFixpoint,
                "Experimental: iterate synset recovery until no synset is added");
  cmd->add_option("--synset-cache", opts.synsetCache,
                  "Reuse a synset embedding cache (embed-synsets output)");
}

}  // namespace

std::vector<std::pair<double, double>> parse_grid_spec(const std::string& spec) {
  auto fields = split_char(spec, ':');
  if (fields.size() != 3) throw InputError("grid spec must be start:end:step");
  double start = 0, end = 0, step = 0;
  try {
    start = std::stod(std::string(fields[0]));
    end = std::stod(std::string(fields[1]));
    step = std::stod(std::string(fields[2]));
  } catch (const std::exception&) {
    throw InputError("invalid grid spec: " + spec);
  }
  if (step <= 0 || end < start) throw InputError("invalid grid spec: " + spec);

  std::vector<double> values;
  for (int i = 0;; ++i) {
    const double v = snap(start + i * step);
    if (v > end + 1e-12) break;
    values.push_back(v);
  }
  std::vector<std::pair<double, double>> grid;
  for (double alpha : values)
    for (double beta : values)
      if (beta <= alpha) grid.emplace_back(alpha, beta);
  return grid;
}

int run(std::vector<std::string> args) {
  CLI::App app{"Automated Wordnet construction from word embeddings"};
  app.require_subcommand(1);

  ValidateOpts validateOpts;
  auto* validate = app.add_subcommand("validate", "Load and validate all inputs");
  add_common_inputs(validate, validateOpts.common, false);
  validate->add_option("--testset", validateOpts.testset, "Gold test set JSON-lines");
  validate->add_option("--core", validateOpts.core, "Core synset list, one id per line");

  EmbedOpts embedOpts;
  auto* embed = app.add_subcommand("embed-synsets", "Compute and cache synset embeddings");
  add_common_inputs(embed, embedOpts.common, true);
  embed->add_option("--method", embedOpts.method, "baseline | representation");
  embed->add_option("--a", embedOpts.a, "SIF smoothing parameter");
  embed->add_flag("--sif-raw-counts", embedOpts.rawCounts,
                  "Use raw counts instead of relative frequencies in SIF weights");
  embed->add_flag("--raw-component-average", embedOpts.rawComponents,
                  "Average the synset components without normalizing them first");
  embed->add_option("--out", embedOpts.out,
                    "Output JSON-lines cache (default: $AWN_CACHE_DIR/synset-cache.jsonl)");

  FitOpts fitOpts;
  auto* fit = app.add_subcommand("fit-wsi", "Fit the sparse-coding sense model");
  fit->add_option("--emb", fitOpts.emb, "Embedding file")->required();
  fit->add_option("--k", fitOpts.cfg.k, "Atom count");
  fit->add_option("--s", fitOpts.cfg.s, "Sparsity (max atoms per word)");
  fit->add_option("--iterations", fitOpts.cfg.iterations, "Training sweeps");
  fit->add_option("--seed", fitOpts.cfg.seed, "RNG seed");
  fit->add_option("--reinit-threshold", fitOpts.cfg.reinitThreshold,
                  "Minimum users before an atom is reinitialized");
  fit->add_option("--format", fitOpts.format, "json | binary")
      ->check(CLI::IsMember({"json", "binary"}));
  fit->add_option("--threads", fitOpts.threads, "Worker threads (0 = all)");
  fit->add_option("--out", fitOpts.out, "Output model file")->required();

  PurifyOpts purifyOpts;
  auto* purify = app.add_subcommand("purify", "Export sense-purification clusters");
  purify->add_option("--emb", purifyOpts.emb, "Embedding file")->required();
  purify->add_option("--model", purifyOpts.model, "WSI model file")->required();
  purify->add_option("--words", purifyOpts.words, "Word list file (default: whole vocabulary)");
  purify->add_option("--n", purifyOpts.cfg.n, "Cluster size");
  purify->add_option("--min-cos", purifyOpts.cfg.minCos, "Search-space cosine floor");
  purify->add_option("--threads", purifyOpts.threads, "Worker threads (0 = all)");
  purify->add_option("--out", purifyOpts.out, "Output JSON-lines {word,atom,cluster,gamma}")
      ->required();

  BuildOpts buildOpts;
  auto* build = app.add_subcommand("build", "Build the automated wordnet");
  add_build_options(build, buildOpts, false);
  build->add_option("--out", buildOpts.out, "Output wordnet JSON-lines")->required();

  ClusterOpts clusterOpts;
  auto* cluster = app.add_subcommand("cluster-senses", "Merge closely related candidate senses");
  add_common_inputs(cluster, clusterOpts.common, false);
  cluster->add_option("--model", clusterOpts.model, "WSI model file")->required();
  cluster->add_option("--n", clusterOpts.purify.n, "Purification cluster size");
  cluster->add_option("--min-cos", clusterOpts.purify.minCos,
                      "Purification search-space cosine floor");
  cluster->add_option("--out", clusterOpts.out, "Output JSON-lines {word,groups}")->required();

  TuneOpts tuneOpts;
  auto* tune = app.add_subcommand("tune", "Grid-search cutoffs on half the test set");
  add_build_options(tune, tuneOpts.build, false);
  tune->add_option("--testset", tuneOpts.testset, "Gold test set JSON-lines")->required();
  tune->add_option("--grid", tuneOpts.grid, "Cutoff grid start:end:step");
  tune->add_option("--seed", tuneOpts.seed, "Split seed");
  tune->add_option("--mode", tuneOpts.mode, "candidate-restricted | raw");
  tune->add_option("--agg", tuneOpts.agg, "pooled | per-word-macro");
  tune->add_option("--out", tuneOpts.out, "Output report JSON")->required();

  EvalOpts evalOpts;
  auto* eval = app.add_subcommand("eval", "Score a wordnet against a gold test set");
  eval->add_option("--wordnet", evalOpts.wordnet, "Wordnet JSON-lines (build output)")
      ->required();
  eval->add_option("--testset", evalOpts.testset, "Gold test set JSON-lines")->required();
  eval->add_option("--core", evalOpts.core, "Core synset list for coverage");
  eval->add_option("--mode", evalOpts.mode, "candidate-restricted | raw");
  eval->add_option("--agg", evalOpts.agg, "pooled | per-word-macro");
  eval->add_option("--out", evalOpts.out, "Output report JSON");

  std::vector<const char*> argv;
  argv.push_back("awn");
  for (const auto& arg : args) argv.push_back(arg.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*validate) return cmd_validate(validateOpts);
    if (*embed) return cmd_embed_synsets(embedOpts);
    if (*fit) return cmd_fit_wsi(fitOpts);
    if (*purify) return cmd_purify(purifyOpts);
    if (*build) return cmd_build(buildOpts);
    if (*cluster) return cmd_cluster_senses(clusterOpts);
    if (*tune) return cmd_tune(tuneOpts);
    if (*eval) return cmd_eval(evalOpts);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace awn::cli
