#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "awn/builder.hpp"
#include "awn/common.hpp"

namespace awn::evaluator {

struct TestCandidate {
  std::string synsetId;
  bool good = false;
};

struct TestEntry {
  std::string word;
  Pos pos = Pos::Noun;
  std::vector<TestCandidate> candidates;
};

struct TestSet {
  std::vector<TestEntry> entries;
};

/// JSON-lines ingest of {word, pos, candidates:[{synsetId, label}]};
/// labels are "good"/"bad", POS one of adj/noun/verb, candidate ids unique
/// per entry.
TestSet load_testset(const std::filesystem::path& path);

/// Precision-weighted F measure 1.25*p*r / (0.25*p + r); 0 when both are 0.
double f05(double p, double r);

enum class EvalMode { CandidateRestricted, Raw };
enum class PosAgg { PooledWithinPos, PerWordMacro };

std::string_view to_string(EvalMode m);
std::string_view to_string(PosAgg a);
std::optional<EvalMode> eval_mode_from_string(std::string_view s);
std::optional<PosAgg> pos_agg_from_string(std::string_view s);

struct MetricRow {
  double precision = 0.0;  // percent
  double recall = 0.0;
  double f05 = 0.0;
  std::int64_t entries = 0;
};

struct EvalReport {
  std::map<Pos, MetricRow> perPos;
  MetricRow total;  // unweighted mean of the POS rows present
  std::optional<double> coverage;
  std::int64_t synsetCount = 0;  // distinct synsets across all predictions
  EvalMode mode = EvalMode::CandidateRestricted;
  PosAgg agg = PosAgg::PooledWithinPos;
};

/// Scores predictions against the gold test set. Prediction rows are
/// matched to entries by (word, pos) with set semantics; in
/// candidate-restricted mode, predicted synsets outside an entry's
/// candidate list are dropped before counting. Pooled aggregation counts
/// TP/FP/FN across a POS and derives P/R/F from the pools; per-word macro
/// averages per-entry P/R instead (entries with no predictions count P=100
/// when they also have no good candidates, else 0, and symmetrically for R).
EvalReport evaluate(const std::vector<builder::MatchResult>& predictions, const TestSet& testSet,
                    EvalMode mode = EvalMode::CandidateRestricted,
                    PosAgg agg = PosAgg::PooledWithinPos);

/// Percent of core synsets appearing in any prediction.
double coverage(const std::vector<builder::MatchResult>& predictions,
                std::span<const std::string> coreSynsets);

/// One synset id per line.
std::vector<std::string> load_core_list(const std::filesystem::path& path);

struct GridPoint {
  double alpha = 0.0;
  double beta = 0.0;
  double tuningF05 = 0.0;
};

struct TuneResult {
  double alpha = 0.0;
  double beta = 0.0;
  EvalReport heldOutReport;
  std::vector<GridPoint> table;
  std::int64_t tuningEntries = 0;
  std::int64_t heldOutEntries = 0;
};

/// Splits the test set 50/50 (stratified by POS, seeded), picks the grid
/// pair with the highest tuning-half total F0.5 (ties: smaller alpha, then
/// smaller beta), and reports the held-out half at that pair. Grid points
/// with beta > alpha are rejected. The build callback maps (alpha, beta) to
/// prediction rows and is invoked in parallel across grid points.
TuneResult tune(const std::function<std::vector<builder::MatchResult>(double, double)>& buildFn,
                const TestSet& testSet, std::span<const std::pair<double, double>> grid,
                std::uint64_t seed, EvalMode mode = EvalMode::CandidateRestricted,
                PosAgg agg = PosAgg::PooledWithinPos, int threads = 1);

/// Seeded POS-stratified 50/50 split; first element is the tuning half.
std::pair<TestSet, TestSet> split_testset(const TestSet& testSet, std::uint64_t seed);

/// Text table with one row per POS plus a total row, percentages at one
/// decimal place.
std::string render_table(const EvalReport& report);

/// Full-precision machine-readable form.
nlohmann::json report_to_json(const EvalReport& report);

}  // namespace awn::evaluator
