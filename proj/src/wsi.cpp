#include "awn/wsi.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <numeric>

namespace awn::wsi {

namespace {

using nlohmann::json;

constexpr double kResidualTol = 1e-6;
constexpr double kDeadAtomSigma = 1e-12;
constexpr char kBinaryMagic[8] = {'A', 'W', 'N', 'W', 'S', 'I', '0', '1'};

void check_finite(const Eigen::VectorXd& v) {
  if (!v.allFinite()) throw InputError("omp_encode: non-finite input vector");
}

Eigen::VectorXd residual_of(const Eigen::VectorXd& v, const Eigen::MatrixXd& atoms,
                            const SparseCode& code) {
  Eigen::VectorXd r = v;
  for (const auto& e : code) r -= e.coef * atoms.col(e.atom);
  return r;
}

/// Rebuilds per-atom user lists from the current codes. Entries with an
/// exactly zero coefficient do not count as usage.
std::vector<std::vector<int>> atom_users(const std::vector<SparseCode>& codes, int k) {
  std::vector<std::vector<int>> users(static_cast<std::size_t>(k));
  for (int w = 0; w < static_cast<int>(codes.size()); ++w)
    for (const auto& e : codes[static_cast<std::size_t>(w)])
      if (e.coef != 0.0) users[static_cast<std::size_t>(e.atom)].push_back(w);
  return users;
}

double mean_squared_residual(const std::vector<double>& residualNorms) {
  double acc = 0.0;
  for (double r : residualNorms) acc += r * r;
  return acc / static_cast<double>(residualNorms.size());
}

}  // namespace

Eigen::VectorXd WsiModel::reconstruct(int word) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
  for (const auto& e : codes.at(static_cast<std::size_t>(word))) v += e.coef * atoms.col(e.atom);
  return v;
}

SparseCode omp_encode(const Eigen::VectorXd& v, const Eigen::MatrixXd& atoms, int s) {
  check_finite(v);
  if (s <= 0) return {};
  const int k = static_cast<int>(atoms.cols());

  std::vector<int> support;
  std::vector<char> selected(static_cast<std::size_t>(k), 0);
  Eigen::VectorXd r = v;
  Eigen::VectorXd coefs;

  for (int step = 0; step < s; ++step) {
    if (r.norm() < kResidualTol) break;
    Eigen::VectorXd corr = atoms.transpose() * r;
    int best = -1;
    double bestAbs = 0.0;
    for (int j = 0; j < k; ++j) {
      if (selected[static_cast<std::size_t>(j)]) continue;
      const double a = std::abs(corr(j));
      if (a > bestAbs) {
        bestAbs = a;
        best = j;
      }
    }
    if (best < 0 || bestAbs == 0.0) break;
    support.push_back(best);
    selected[static_cast<std::size_t>(best)] = 1;

    Eigen::MatrixXd sub(atoms.rows(), static_cast<Eigen::Index>(support.size()));
    for (std::size_t i = 0; i < support.size(); ++i)
      sub.col(static_cast<Eigen::Index>(i)) = atoms.col(support[i]);
    coefs = sub.colPivHouseholderQr().solve(v);
    r = v - sub * coefs;
  }

  SparseCode code;
  code.reserve(support.size());
  for (std::size_t i = 0; i < support.size(); ++i)
    code.push_back({support[i], coefs(static_cast<Eigen::Index>(i))});
  return code;
}

SparseCode refit_support(const Eigen::VectorXd& v, const Eigen::MatrixXd& atoms,
                         const SparseCode& previous) {
  if (previous.empty()) return {};
  Eigen::MatrixXd sub(atoms.rows(), static_cast<Eigen::Index>(previous.size()));
  for (std::size_t i = 0; i < previous.size(); ++i)
    sub.col(static_cast<Eigen::Index>(i)) = atoms.col(previous[i].atom);
  Eigen::VectorXd coefs = sub.colPivHouseholderQr().solve(v);
  SparseCode code;
  code.reserve(previous.size());
  for (std::size_t i = 0; i < previous.size(); ++i)
    code.push_back({previous[i].atom, coefs(static_cast<Eigen::Index>(i))});
  return code;
}

std::vector<SparseCode> encode_all(const lexicon::EmbeddingMatrix& emb,
                                   const Eigen::MatrixXd& atoms, int s, int threads) {
  const int n = static_cast<int>(emb.rows.rows());
  std::vector<SparseCode> codes(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static) num_threads(threads > 0 ? threads : 1)
  for (int w = 0; w < n; ++w)
    codes[static_cast<std::size_t>(w)] = omp_encode(emb.row(w).transpose(), atoms, s);
  return codes;
}

namespace {

/// Sparse stage with coefficient reuse: a word keeps its previous support
/// (refit under the current atoms) whenever the fresh pursuit would leave a
/// larger residual. This makes the sweep-level objective non-increasing.
void encode_sweep(const lexicon::EmbeddingMatrix& emb, const Eigen::MatrixXd& atoms, int s,
                  int threads, std::vector<SparseCode>& codes,
                  std::vector<double>& residualNorms) {
  const int n = static_cast<int>(emb.rows.rows());
#pragma omp parallel for schedule(static) num_threads(threads > 0 ? threads : 1)
  for (int w = 0; w < n; ++w) {
    const Eigen::VectorXd v = emb.row(w).transpose();
    SparseCode fresh = omp_encode(v, atoms, s);
    const double freshNorm = residual_of(v, atoms, fresh).norm();
    const auto& previous = codes[static_cast<std::size_t>(w)];
    if (!previous.empty()) {
      SparseCode kept = refit_support(v, atoms, previous);
      const double keptNorm = residual_of(v, atoms, kept).norm();
      if (keptNorm < freshNorm) {
        codes[static_cast<std::size_t>(w)] = std::move(kept);
        residualNorms[static_cast<std::size_t>(w)] = keptNorm;
        continue;
      }
    }
    codes[static_cast<std::size_t>(w)] = std::move(fresh);
    residualNorms[static_cast<std::size_t>(w)] = freshNorm;
  }
}

/// Picks the word with the largest current residual that has not yet been
/// consumed by a reinit this sweep; ties go to the lower word id.
int worst_reconstructed(const std::vector<double>& residualNorms,
                        const std::vector<char>& consumed) {
  int best = -1;
  double bestNorm = -1.0;
  for (int w = 0; w < static_cast<int>(residualNorms.size()); ++w) {
    if (consumed[static_cast<std::size_t>(w)]) continue;
    if (residualNorms[static_cast<std::size_t>(w)] > bestNorm) {
      bestNorm = residualNorms[static_cast<std::size_t>(w)];
      best = w;
    }
  }
  return best;
}

void dictionary_update(const lexicon::EmbeddingMatrix& emb, Eigen::MatrixXd& atoms,
                       std::vector<SparseCode>& codes, std::vector<double>& residualNorms,
                       int reinitThreshold) {
  const int k = static_cast<int>(atoms.cols());
  auto users = atom_users(codes, k);
  std::vector<char> consumed(static_cast<std::size_t>(emb.rows.rows()), 0);

  for (int j = 0; j < k; ++j) {
    auto& atomUsers = users[static_cast<std::size_t>(j)];
    if (static_cast<int>(atomUsers.size()) < reinitThreshold) {
      const int w = worst_reconstructed(residualNorms, consumed);
      if (w >= 0) {
        atoms.col(j) = emb.row(w).transpose();  // rows are unit vectors
        consumed[static_cast<std::size_t>(w)] = 1;
      }
      continue;
    }

    const int m = static_cast<int>(atomUsers.size());
    Eigen::MatrixXd restricted(atoms.rows(), m);
    std::vector<std::size_t> entryOf(static_cast<std::size_t>(m));
    for (int c = 0; c < m; ++c) {
      const int w = atomUsers[static_cast<std::size_t>(c)];
      const auto& code = codes[static_cast<std::size_t>(w)];
      Eigen::VectorXd col = emb.row(w).transpose();
      for (std::size_t e = 0; e < code.size(); ++e) {
        if (code[e].atom == j) {
          entryOf[static_cast<std::size_t>(c)] = e;
          continue;
        }
        col -= code[e].coef * atoms.col(code[e].atom);
      }
      restricted.col(c) = col;
    }

    Eigen::BDCSVD<Eigen::MatrixXd> svd(restricted, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double sigma = svd.singularValues()(0);
    if (sigma < kDeadAtomSigma) {
      const int w = worst_reconstructed(residualNorms, consumed);
      if (w >= 0) {
        atoms.col(j) = emb.row(w).transpose();
        consumed[static_cast<std::size_t>(w)] = 1;
      }
      continue;
    }
    Eigen::VectorXd atom = svd.matrixU().col(0);
    Eigen::VectorXd gains = sigma * svd.matrixV().col(0);
    // The SVD leaves the sign pair (atom, gains) ambiguous. Orient the atom
    // toward its users (positive coefficient mass); the positivity filter
    // on word senses reads coefficients under exactly this convention.
    double orientation = gains.sum();
    if (orientation == 0.0) {
      Eigen::Index maxIdx = 0;
      gains.cwiseAbs().maxCoeff(&maxIdx);
      orientation = gains(maxIdx);
    }
    if (orientation < 0) {
      atom = -atom;
      gains = -gains;
    }
    atoms.col(j) = atom;
    for (int c = 0; c < m; ++c) {
      const int w = atomUsers[static_cast<std::size_t>(c)];
      auto& code = codes[static_cast<std::size_t>(w)];
      code[entryOf[static_cast<std::size_t>(c)]].coef = gains(c);
      residualNorms[static_cast<std::size_t>(w)] =
          residual_of(emb.row(w).transpose(), atoms, code).norm();
    }
  }
}

Eigen::MatrixXd init_atoms(const lexicon::EmbeddingMatrix& emb, const WsiConfig& cfg) {
  const int n = static_cast<int>(emb.rows.rows());
  Eigen::MatrixXd atoms(emb.dim, cfg.k);
  DetRng rng(cfg.seed);

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);

  // Word vectors sampled without replacement, preferring directions not yet
  // taken. Two near-identical initial atoms would split one direction's
  // users between them and leave both alive, starving some other direction.
  constexpr double kDuplicateCos = 0.999;
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  int placed = 0;
  for (int w : order) {
    if (placed >= cfg.k) break;
    const Eigen::VectorXd v = emb.row(w).transpose();
    bool duplicate = false;
    for (int j = 0; j < placed && !duplicate; ++j)
      if (std::abs(atoms.col(j).dot(v)) > kDuplicateCos) duplicate = true;
    if (duplicate) continue;
    atoms.col(placed++) = v;
    used[static_cast<std::size_t>(w)] = 1;
  }
  for (int w : order) {
    if (placed >= cfg.k) break;
    if (!used[static_cast<std::size_t>(w)]) atoms.col(placed++) = emb.row(w).transpose();
  }
  while (placed < cfg.k) {
    // More atoms than words: fill the rest with random unit directions.
    Eigen::VectorXd v(emb.dim);
    do {
      for (int i = 0; i < emb.dim; ++i) v(i) = rng.next_normal();
    } while (v.norm() < 1e-9);
    atoms.col(placed++) = v / v.norm();
  }
  return atoms;
}

}  // namespace

WsiModel ksvd_fit(const lexicon::EmbeddingMatrix& emb, const WsiConfig& cfg, int threads) {
  if (cfg.k <= 0) throw InputError("ksvd_fit: k must be positive");
  if (cfg.s <= 0 || cfg.s > cfg.k) throw InputError("ksvd_fit: need 0 < s <= k");
  if (cfg.iterations < 0) throw InputError("ksvd_fit: iterations must be nonnegative");
  if (!emb.normalized) throw std::logic_error("ksvd_fit: matrix must be normalized");
  const int n = static_cast<int>(emb.rows.rows());
  if (n < cfg.k)
    std::cerr << "warning: vocabulary size " << n << " is below atom count " << cfg.k << "\n";

  WsiModel model;
  model.dim = emb.dim;
  model.k = cfg.k;
  model.s = cfg.s;
  model.iterations = cfg.iterations;
  model.seed = cfg.seed;
  model.atoms = init_atoms(emb, cfg);
  model.codes.assign(static_cast<std::size_t>(n), {});
  model.residualNorms.assign(static_cast<std::size_t>(n), 0.0);

  encode_sweep(emb, model.atoms, cfg.s, threads, model.codes, model.residualNorms);
  model.mseTrace.push_back(mean_squared_residual(model.residualNorms));

  for (int iter = 0; iter < cfg.iterations; ++iter) {
    dictionary_update(emb, model.atoms, model.codes, model.residualNorms, cfg.reinitThreshold);
    encode_sweep(emb, model.atoms, cfg.s, threads, model.codes, model.residualNorms);
    model.mseTrace.push_back(mean_squared_residual(model.residualNorms));
  }

  // Final exact residual norms from the atoms and codes as stored.
  for (int w = 0; w < n; ++w)
    model.residualNorms[static_cast<std::size_t>(w)] =
        residual_of(emb.row(w).transpose(), model.atoms, model.codes[static_cast<std::size_t>(w)])
            .norm();
  return model;
}

std::vector<int> word_atoms(const WsiModel& model, int word) {
  if (word < 0 || word >= static_cast<int>(model.codes.size()))
    throw InputError("word_atoms: unknown word id " + std::to_string(word));
  std::vector<const SparseEntry*> positive;
  for (const auto& e : model.codes[static_cast<std::size_t>(word)])
    if (e.coef > 0.0) positive.push_back(&e);
  std::sort(positive.begin(), positive.end(), [](const SparseEntry* a, const SparseEntry* b) {
    if (a->coef != b->coef) return a->coef > b->coef;
    return a->atom < b->atom;
  });
  std::vector<int> out;
  out.reserve(positive.size());
  for (const auto* e : positive) out.push_back(e->atom);
  return out;
}

void save_model_json(const std::filesystem::path& path, const WsiModel& model) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write model file: " + path.string());
  json header;
  header["dim"] = model.dim;
  header["k"] = model.k;
  header["s"] = model.s;
  header["iterations"] = model.iterations;
  header["seed"] = model.seed;
  json atoms = json::array();
  for (int j = 0; j < model.k; ++j)
    atoms.push_back(std::vector<double>(model.atoms.col(j).data(),
                                        model.atoms.col(j).data() + model.dim));
  json codes = json::array();
  for (const auto& code : model.codes) {
    json entries = json::array();
    for (const auto& e : code) entries.push_back({e.atom, e.coef});
    codes.push_back(std::move(entries));
  }
  json doc;
  doc["header"] = std::move(header);
  doc["atoms"] = std::move(atoms);
  doc["codes"] = std::move(codes);
  doc["residualNorms"] = model.residualNorms;
  doc["mseTrace"] = model.mseTrace;
  out << doc.dump() << '\n';
  if (!out) throw InputError("write failed: " + path.string());
}

WsiModel load_model_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open model file: " + path.string());
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw InputError("invalid model JSON: " + path.string());

  WsiModel model;
  const auto& header = doc.at("header");
  model.dim = header.at("dim").get<int>();
  model.k = header.at("k").get<int>();
  model.s = header.at("s").get<int>();
  model.iterations = header.at("iterations").get<int>();
  model.seed = header.at("seed").get<std::uint64_t>();

  model.atoms.resize(model.dim, model.k);
  const auto& atoms = doc.at("atoms");
  if (static_cast<int>(atoms.size()) != model.k)
    throw InputError("model atom count mismatch: " + path.string());
  for (int j = 0; j < model.k; ++j) {
    auto col = atoms.at(static_cast<std::size_t>(j)).get<std::vector<double>>();
    if (static_cast<int>(col.size()) != model.dim)
      throw InputError("model atom dim mismatch: " + path.string());
    model.atoms.col(j) = Eigen::Map<Eigen::VectorXd>(col.data(), model.dim);
  }
  for (const auto& entries : doc.at("codes")) {
    SparseCode code;
    for (const auto& e : entries) code.push_back({e.at(0).get<int>(), e.at(1).get<double>()});
    if (static_cast<int>(code.size()) > model.s)
      throw InputError("model code exceeds sparsity: " + path.string());
    model.codes.push_back(std::move(code));
  }
  model.residualNorms = doc.at("residualNorms").get<std::vector<double>>();
  model.mseTrace = doc.at("mseTrace").get<std::vector<double>>();
  if (model.residualNorms.size() != model.codes.size())
    throw InputError("model residual count mismatch: " + path.string());
  return model;
}

namespace {

template <typename T>
void write_pod(std::ofstream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in, const std::filesystem::path& path) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T)))
    throw InputError("truncated model file: " + path.string());
  return value;
}

}  // namespace

void save_model_binary(const std::filesystem::path& path, const WsiModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write model file: " + path.string());
  out.write(kBinaryMagic, sizeof(kBinaryMagic));
  write_pod(out, static_cast<std::int32_t>(model.dim));
  write_pod(out, static_cast<std::int32_t>(model.k));
  write_pod(out, static_cast<std::int32_t>(model.s));
  write_pod(out, static_cast<std::int32_t>(model.iterations));
  write_pod(out, model.seed);
  write_pod(out, static_cast<std::int64_t>(model.codes.size()));
  write_pod(out, static_cast<std::int64_t>(model.mseTrace.size()));
  out.write(reinterpret_cast<const char*>(model.atoms.data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(model.dim) *
                                         static_cast<std::size_t>(model.k)));
  for (const auto& code : model.codes) {
    write_pod(out, static_cast<std::int32_t>(code.size()));
    for (const auto& e : code) {
      write_pod(out, static_cast<std::int32_t>(e.atom));
      write_pod(out, e.coef);
    }
  }
  for (double r : model.residualNorms) write_pod(out, r);
  for (double m : model.mseTrace) write_pod(out, m);
  if (!out) throw InputError("write failed: " + path.string());
}

WsiModel load_model_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open model file: " + path.string());
  char magic[sizeof(kBinaryMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kBinaryMagic, sizeof(magic)) != 0)
    throw InputError("not a binary model file: " + path.string());

  WsiModel model;
  model.dim = read_pod<std::int32_t>(in, path);
  model.k = read_pod<std::int32_t>(in, path);
  model.s = read_pod<std::int32_t>(in, path);
  model.iterations = read_pod<std::int32_t>(in, path);
  model.seed = read_pod<std::uint64_t>(in, path);
  const auto words = read_pod<std::int64_t>(in, path);
  const auto traceLen = read_pod<std::int64_t>(in, path);
  if (model.dim <= 0 || model.k <= 0 || words < 0)
    throw InputError("corrupt model header: " + path.string());

  model.atoms.resize(model.dim, model.k);
  if (!in.read(reinterpret_cast<char*>(model.atoms.data()),
               static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(model.dim) *
                                            static_cast<std::size_t>(model.k))))
    throw InputError("truncated model file: " + path.string());
  model.codes.resize(static_cast<std::size_t>(words));
  for (auto& code : model.codes) {
    const auto len = read_pod<std::int32_t>(in, path);
    if (len < 0 || len > model.s) throw InputError("corrupt code length: " + path.string());
    code.resize(static_cast<std::size_t>(len));
    for (auto& e : code) {
      e.atom = read_pod<std::int32_t>(in, path);
      e.coef = read_pod<double>(in, path);
    }
  }
  model.residualNorms.resize(static_cast<std::size_t>(words));
  for (auto& r : model.residualNorms) r = read_pod<double>(in, path);
  model.mseTrace.resize(static_cast<std::size_t>(traceLen));
  for (auto& m : model.mseTrace) m = read_pod<double>(in, path);
  return model;
}

WsiModel load_model(const std::filesystem::path& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw InputError("cannot open model file: " + path.string());
  char magic[sizeof(kBinaryMagic)] = {};
  probe.read(magic, sizeof(magic));
  probe.close();
  if (std::memcmp(magic, kBinaryMagic, sizeof(magic)) == 0) return load_model_binary(path);
  return load_model_json(path);
}

}  // namespace awn::wsi
