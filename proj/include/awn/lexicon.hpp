#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "awn/common.hpp"

namespace awn::lexicon {

/// Token inventory with dense ids 0..|V|-1 in source-file order.
class Vocabulary {
 public:
  /// Adds a token; duplicates are an InputError.
  int add(std::string token);

  std::optional<int> find(std::string_view token) const;
  int require(std::string_view token) const;
  bool contains(std::string_view token) const { return find(token).has_value(); }

  const std::string& token(int id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  int size() const { return static_cast<int>(tokens_.size()); }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// One unit row vector per vocabulary id.
struct EmbeddingMatrix {
  int dim = 0;
  RowMatrix rows;
  bool normalized = false;

  auto row(int id) const { return rows.row(id); }

  /// Dot product of two unit rows; requires a normalized matrix.
  double cosine(int w1, int w2) const;

  /// Scales every row to unit norm. Zero rows are an InputError.
  void normalize_rows();
};

struct Embeddings {
  Vocabulary vocab;
  EmbeddingMatrix matrix;
};

/// Reads whitespace-separated vectors, one "token x1 .. xd" per line, with an
/// optional "count dim" header (detected when the first line is exactly two
/// integers). Rows come back unit-normalized.
Embeddings load_embeddings(const std::filesystem::path& path,
                           std::optional<int> expect_dim = std::nullopt);

/// Writes the same format with a header; floats carry 17 significant digits
/// so that load(save(x)) is bit-identical.
void save_embeddings(const std::filesystem::path& path, const Vocabulary& vocab,
                     const EmbeddingMatrix& matrix);

/// Raw corpus counts per vocabulary id plus their total. Counts below the
/// floor are raised to it, so every word has positive relative frequency.
struct FrequencyTable {
  std::vector<std::int64_t> counts;
  std::int64_t total = 0;

  double rel_freq(int id) const {
    return static_cast<double>(counts.at(static_cast<std::size_t>(id))) /
           static_cast<double>(total);
  }
};

/// Reads "token<TAB>count" lines; vocabulary words absent from the file get
/// count 0 before the floor is applied. Tokens outside the vocabulary are
/// ignored.
FrequencyTable load_frequencies(const std::filesystem::path& path, const Vocabulary& vocab,
                                std::int64_t floor = 1);

}  // namespace awn::lexicon
