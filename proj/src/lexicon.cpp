#include "awn/lexicon.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace awn::lexicon {

namespace {

bool parse_double(std::string_view s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

bool parse_int(std::string_view s, std::int64_t& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::string loc(const std::filesystem::path& path, std::size_t lineno) {
  return path.string() + ":" + std::to_string(lineno);
}

}  // namespace

int Vocabulary::add(std::string token) {
  auto [it, inserted] = index_.emplace(token, static_cast<int>(tokens_.size()));
  if (!inserted) throw InputError("duplicate token: " + token);
  tokens_.push_back(std::move(token));
  return it->second;
}

std::optional<int> Vocabulary::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int Vocabulary::require(std::string_view token) const {
  auto id = find(token);
  if (!id) throw InputError("token not in vocabulary: " + std::string(token));
  return *id;
}

double EmbeddingMatrix::cosine(int w1, int w2) const {
  if (!normalized) throw std::logic_error("cosine requires a normalized matrix");
  if (w1 < 0 || w1 >= rows.rows() || w2 < 0 || w2 >= rows.rows())
    throw std::out_of_range("cosine: unknown vocabulary id");
  return rows.row(w1).dot(rows.row(w2));
}

void EmbeddingMatrix::normalize_rows() {
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const double norm = rows.row(i).norm();
    if (norm == 0.0) throw InputError("zero vector at row " + std::to_string(i));
    // Rows already unit to within 1e-9 are left untouched, so reloading a
    // serialized matrix reproduces it bit for bit.
    if (std::abs(norm - 1.0) <= 1e-9) continue;
    rows.row(i) /= norm;
  }
  normalized = true;
}

Embeddings load_embeddings(const std::filesystem::path& path, std::optional<int> expect_dim) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open embedding file: " + path.string());

  Embeddings result;
  std::vector<double> values;
  std::string line;
  std::size_t lineno = 0;
  int dim = expect_dim.value_or(0);
  std::int64_t declared_count = -1;
  bool first_content_line = true;

  while (std::getline(in, line)) {
    ++lineno;
    auto fields = split_whitespace(line);
    if (fields.empty()) continue;

    if (first_content_line && fields.size() == 2) {
      std::int64_t a = 0, b = 0;
      if (parse_int(fields[0], a) && parse_int(fields[1], b) && a >= 0 && b > 0) {
        declared_count = a;
        if (dim != 0 && dim != b)
          throw InputError("header dim " + std::to_string(b) + " does not match expected " +
                           std::to_string(dim) + " at " + loc(path, lineno));
        dim = static_cast<int>(b);
        first_content_line = false;
        continue;
      }
    }
    first_content_line = false;

    if (fields.size() < 2)
      throw InputError("expected token plus vector at " + loc(path, lineno));
    const int line_dim = static_cast<int>(fields.size()) - 1;
    if (dim == 0) {
      dim = line_dim;
    } else if (line_dim != dim) {
      throw InputError("dimension mismatch at " + loc(path, lineno) + ": got " +
                       std::to_string(line_dim) + ", expected " + std::to_string(dim));
    }

    result.vocab.add(std::string(fields[0]));
    for (int j = 0; j < dim; ++j) {
      double x = 0.0;
      if (!parse_double(fields[static_cast<std::size_t>(j) + 1], x))
        throw InputError("unparseable number at " + loc(path, lineno));
      if (!std::isfinite(x))
        throw InputError("non-finite value at " + loc(path, lineno));
      values.push_back(x);
    }
  }

  const int count = result.vocab.size();
  if (count == 0) throw InputError("empty embedding file: " + path.string());
  if (declared_count >= 0 && declared_count != count)
    throw InputError("header declares " + std::to_string(declared_count) + " vectors, file has " +
                     std::to_string(count));

  result.matrix.dim = dim;
  result.matrix.rows = Eigen::Map<RowMatrix>(values.data(), count, dim);
  result.matrix.normalize_rows();
  return result;
}

void save_embeddings(const std::filesystem::path& path, const Vocabulary& vocab,
                     const EmbeddingMatrix& matrix) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write embedding file: " + path.string());
  out << vocab.size() << ' ' << matrix.dim << '\n';
  for (int i = 0; i < vocab.size(); ++i) {
    out << vocab.token(i);
    for (int j = 0; j < matrix.dim; ++j) out << ' ' << format_double(matrix.rows(i, j));
    out << '\n';
  }
  if (!out) throw InputError("write failed: " + path.string());
}

FrequencyTable load_frequencies(const std::filesystem::path& path, const Vocabulary& vocab,
                                std::int64_t floor) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open frequency file: " + path.string());
  if (floor < 0) throw InputError("frequency floor must be nonnegative");

  FrequencyTable table;
  table.counts.assign(static_cast<std::size_t>(vocab.size()), 0);

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_char(line, '\t');
    if (fields.size() != 2)
      throw InputError("expected token<TAB>count at " + loc(path, lineno));
    std::int64_t count = 0;
    if (!parse_int(fields[1], count))
      throw InputError("unparseable count at " + loc(path, lineno));
    if (count < 0) throw InputError("negative count at " + loc(path, lineno));
    if (auto id = vocab.find(fields[0])) table.counts[static_cast<std::size_t>(*id)] = count;
  }

  for (auto& c : table.counts) c = std::max(c, floor);
  table.total = 0;
  for (auto c : table.counts) table.total += c;
  if (table.total <= 0)
    throw InputError("frequency table has zero total; use a positive floor");
  return table;
}

}  // namespace awn::lexicon
