#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace awn {

/// Error in user-supplied input (files, flags). The CLI maps this to exit
/// code 1; anything else escaping to main is an internal error (exit 2).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Pos { Noun, Verb, Adj, Adv };

std::string_view to_string(Pos pos);
std::optional<Pos> pos_from_string(std::string_view s);

/// The four POS in a fixed order, used wherever per-POS output must be
/// deterministic.
inline constexpr Pos kAllPos[] = {Pos::Noun, Pos::Verb, Pos::Adj, Pos::Adv};

/// Deterministic RNG: mt19937_64 (whose sequence the standard pins down)
/// plus hand-rolled draws, so results do not depend on the standard
/// library's distribution implementations.
class DetRng {
 public:
  explicit DetRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, n) by rejection sampling.
  std::uint64_t uniform_index(std::uint64_t n);

  /// Uniform in [0, 1) with 53 random bits.
  double next_double();

  /// Standard normal via Box-Muller.
  double next_normal();

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_index(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Median of an unsorted sample; even-sized input yields the midpoint of
/// the two middle values. Empty input is a caller bug.
double median(std::vector<double> values);

std::vector<std::string_view> split_whitespace(std::string_view line);
std::vector<std::string_view> split_char(std::string_view line, char sep);

/// FNV-1a 64-bit digest of a file's bytes, as a hex string.
std::string fnv1a64_file(const std::filesystem::path& path);

/// Formats a double with enough digits to round-trip exactly.
std::string format_double(double value);

}  // namespace awn
