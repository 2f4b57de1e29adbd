#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <vector>

#include "awn/lexicon.hpp"

namespace awn::wsi {

struct WsiConfig {
  int k = 2000;
  int s = 4;
  int iterations = 30;
  std::uint64_t seed = 0;
  // Atoms used by fewer than this many words are reinitialized during the
  // dictionary update.
  int reinitThreshold = 1;
};

struct SparseEntry {
  int atom = -1;
  double coef = 0.0;
};

/// At most s entries, in OMP selection order.
using SparseCode = std::vector<SparseEntry>;

struct WsiModel {
  int dim = 0;
  int k = 0;
  int s = 0;
  int iterations = 0;
  std::uint64_t seed = 0;
  Eigen::MatrixXd atoms;  // dim x k, unit columns
  std::vector<SparseCode> codes;
  std::vector<double> residualNorms;
  // Mean squared residual after the initial encode and after each sweep;
  // non-increasing by construction.
  std::vector<double> mseTrace;

  Eigen::VectorXd reconstruct(int word) const;
};

/// Greedy orthogonal matching pursuit: repeatedly selects the atom with the
/// largest absolute residual correlation (ties to the lowest index) and
/// least-squares refits the chosen support. Stops early once the residual
/// norm drops below 1e-6 or no atom correlates with the residual.
SparseCode omp_encode(const Eigen::VectorXd& v, const Eigen::MatrixXd& atoms, int s);

/// Least-squares coefficients for a fixed support; used to decide whether a
/// word keeps its previous support when a fresh pursuit is no better.
SparseCode refit_support(const Eigen::VectorXd& v, const Eigen::MatrixXd& atoms,
                         const SparseCode& previous);

/// Encodes every row of the matrix; parallel across words.
std::vector<SparseCode> encode_all(const lexicon::EmbeddingMatrix& emb,
                                   const Eigen::MatrixXd& atoms, int s, int threads = 1);

/// K-SVD: alternates a full OMP encode with sequential per-atom updates
/// (rank-1 SVD of the residual restricted to each atom's users, in atom
/// index order). Unused atoms are reset to the currently worst-reconstructed
/// word vector. Deterministic for a fixed seed, independent of threads.
WsiModel ksvd_fit(const lexicon::EmbeddingMatrix& emb, const WsiConfig& cfg, int threads = 1);

/// Atom indices with strictly positive coefficient, by descending
/// coefficient (ties to the lower index).
std::vector<int> word_atoms(const WsiModel& model, int word);

void save_model_json(const std::filesystem::path& path, const WsiModel& model);
WsiModel load_model_json(const std::filesystem::path& path);
void save_model_binary(const std::filesystem::path& path, const WsiModel& model);
WsiModel load_model_binary(const std::filesystem::path& path);

/// Loads either variant, keyed on the file's magic bytes.
WsiModel load_model(const std::filesystem::path& path);

}  // namespace awn::wsi
