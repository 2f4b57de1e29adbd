#include "awn/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace awn::evaluator {

namespace {

using nlohmann::json;

/// Only these POS may appear in gold test sets.
constexpr Pos kTestPos[] = {Pos::Noun, Pos::Verb, Pos::Adj};

struct Counts {
  std::int64_t tp = 0, fp = 0, fn = 0;
};

Counts entry_counts(const TestEntry& entry, const std::set<std::string>& predicted,
                    EvalMode mode) {
  std::set<std::string> good;
  std::set<std::string> candidates;
  for (const auto& c : entry.candidates) {
    candidates.insert(c.synsetId);
    if (c.good) good.insert(c.synsetId);
  }
  Counts counts;
  for (const auto& p : predicted) {
    if (mode == EvalMode::CandidateRestricted && !candidates.count(p)) continue;
    if (good.count(p))
      ++counts.tp;
    else
      ++counts.fp;
  }
  for (const auto& g : good)
    if (!predicted.count(g)) ++counts.fn;
  return counts;
}

double pct(std::int64_t num, std::int64_t den) {
  return den == 0 ? 0.0 : 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

std::string one_decimal(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", value);
  return std::string(buf);
}

}  // namespace

TestSet load_testset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open test set: " + path.string());
  TestSet set;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded())
      throw InputError("invalid JSON at " + path.string() + ":" + std::to_string(lineno));
    TestEntry entry;
    entry.word = obj.at("word").get<std::string>();
    auto pos = pos_from_string(obj.at("pos").get<std::string>());
    if (!pos || *pos == Pos::Adv)
      throw InputError("test-set pos must be adj/noun/verb at " + path.string() + ":" +
                       std::to_string(lineno));
    entry.pos = *pos;
    std::set<std::string> seen;
    for (const auto& c : obj.at("candidates")) {
      TestCandidate cand;
      cand.synsetId = c.at("synsetId").get<std::string>();
      auto label = c.at("label").get<std::string>();
      if (label != "good" && label != "bad")
        throw InputError("label must be good/bad at " + path.string() + ":" +
                         std::to_string(lineno));
      cand.good = label == "good";
      if (!seen.insert(cand.synsetId).second)
        throw InputError("duplicate candidate " + cand.synsetId + " at " + path.string() + ":" +
                         std::to_string(lineno));
      entry.candidates.push_back(std::move(cand));
    }
    set.entries.push_back(std::move(entry));
  }
  return set;
}

double f05(double p, double r) {
  const double den = 0.25 * p + r;
  if (den == 0.0) return 0.0;
  return 1.25 * p * r / den;
}

std::string_view to_string(EvalMode m) {
  return m == EvalMode::CandidateRestricted ? "candidate-restricted" : "raw";
}

std::string_view to_string(PosAgg a) {
  return a == PosAgg::PooledWithinPos ? "pooled" : "per-word-macro";
}

std::optional<EvalMode> eval_mode_from_string(std::string_view s) {
  if (s == "candidate-restricted") return EvalMode::CandidateRestricted;
  if (s == "raw") return EvalMode::Raw;
  return std::nullopt;
}

std::optional<PosAgg> pos_agg_from_string(std::string_view s) {
  if (s == "pooled") return PosAgg::PooledWithinPos;
  if (s == "per-word-macro") return PosAgg::PerWordMacro;
  return std::nullopt;
}

EvalReport evaluate(const std::vector<builder::MatchResult>& predictions, const TestSet& testSet,
                    EvalMode mode, PosAgg agg) {
  // (word, pos) -> union of predicted synsets.
  std::map<std::pair<std::string, Pos>, std::set<std::string>> predicted;
  std::set<std::string> allSynsets;
  for (const auto& row : predictions) {
    auto& slot = predicted[{row.word, row.pos}];
    for (const auto& m : row.matched) {
      slot.insert(m.synsetId);
      allSynsets.insert(m.synsetId);
    }
  }
  static const std::set<std::string> kEmpty;
  auto predicted_for = [&](const TestEntry& e) -> const std::set<std::string>& {
    auto it = predicted.find({e.word, e.pos});
    return it == predicted.end() ? kEmpty : it->second;
  };

  EvalReport report;
  report.mode = mode;
  report.agg = agg;
  report.synsetCount = static_cast<std::int64_t>(allSynsets.size());

  for (Pos pos : kTestPos) {
    std::int64_t entries = 0;
    Counts pooled;
    double pSum = 0.0, rSum = 0.0;
    for (const auto& entry : testSet.entries) {
      if (entry.pos != pos) continue;
      ++entries;
      const auto& pred = predicted_for(entry);
      const Counts c = entry_counts(entry, pred, mode);
      pooled.tp += c.tp;
      pooled.fp += c.fp;
      pooled.fn += c.fn;
      if (agg == PosAgg::PerWordMacro) {
        pSum += (c.tp + c.fp) > 0 ? pct(c.tp, c.tp + c.fp) : (c.tp + c.fn == 0 ? 100.0 : 0.0);
        rSum += (c.tp + c.fn) > 0 ? pct(c.tp, c.tp + c.fn) : (c.tp + c.fp == 0 ? 100.0 : 0.0);
      }
    }
    if (entries == 0) continue;
    MetricRow row;
    row.entries = entries;
    if (agg == PosAgg::PooledWithinPos) {
      row.precision = pct(pooled.tp, pooled.tp + pooled.fp);
      row.recall = pct(pooled.tp, pooled.tp + pooled.fn);
    } else {
      row.precision = pSum / static_cast<double>(entries);
      row.recall = rSum / static_cast<double>(entries);
    }
    row.f05 = f05(row.precision, row.recall);
    report.perPos[pos] = row;
  }

  if (!report.perPos.empty()) {
    const double n = static_cast<double>(report.perPos.size());
    for (const auto& [pos, row] : report.perPos) {
      report.total.precision += row.precision / n;
      report.total.recall += row.recall / n;
      report.total.f05 += row.f05 / n;
      report.total.entries += row.entries;
    }
  }
  return report;
}

double coverage(const std::vector<builder::MatchResult>& predictions,
                std::span<const std::string> coreSynsets) {
  if (coreSynsets.empty()) throw InputError("coverage: empty core synset list");
  std::set<std::string> matched;
  for (const auto& row : predictions)
    for (const auto& m : row.matched) matched.insert(m.synsetId);
  std::set<std::string> core(coreSynsets.begin(), coreSynsets.end());
  std::int64_t hit = 0;
  for (const auto& id : core)
    if (matched.count(id)) ++hit;
  return 100.0 * static_cast<double>(hit) / static_cast<double>(core.size());
}

std::vector<std::string> load_core_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open core list: " + path.string());
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) ids.push_back(line);
  }
  return ids;
}

std::pair<TestSet, TestSet> split_testset(const TestSet& testSet, std::uint64_t seed) {
  DetRng rng(seed);
  TestSet tuning, heldOut;
  for (Pos pos : kTestPos) {
    std::vector<std::size_t> indices;
    for (std::size_t i = 0; i < testSet.entries.size(); ++i)
      if (testSet.entries[i].pos == pos) indices.push_back(i);
    rng.shuffle(indices);
    const std::size_t half = (indices.size() + 1) / 2;
    for (std::size_t i = 0; i < indices.size(); ++i) {
      auto& target = i < half ? tuning : heldOut;
      target.entries.push_back(testSet.entries[indices[i]]);
    }
  }
  return {std::move(tuning), std::move(heldOut)};
}

TuneResult tune(const std::function<std::vector<builder::MatchResult>(double, double)>& buildFn,
                const TestSet& testSet, std::span<const std::pair<double, double>> grid,
                std::uint64_t seed, EvalMode mode, PosAgg agg, int threads) {
  std::vector<std::pair<double, double>> points;
  for (const auto& [alpha, beta] : grid)
    if (beta <= alpha) points.emplace_back(alpha, beta);
  if (points.empty()) throw InputError("tune: grid has no points with beta <= alpha");

  auto [tuning, heldOut] = split_testset(testSet, seed);

  std::vector<GridPoint> table(points.size());
  const int count = static_cast<int>(points.size());
#pragma omp parallel for schedule(dynamic) num_threads(threads > 0 ? threads : 1)
  for (int i = 0; i < count; ++i) {
    const auto [alpha, beta] = points[static_cast<std::size_t>(i)];
    const auto predictions = buildFn(alpha, beta);
    const EvalReport report = evaluate(predictions, tuning, mode, agg);
    table[static_cast<std::size_t>(i)] = {alpha, beta, report.total.f05};
  }

  // Full grid materialized above; the winner is picked serially so the
  // result does not depend on thread interleaving.
  std::size_t best = 0;
  for (std::size_t i = 1; i < table.size(); ++i) {
    const auto& a = table[i];
    const auto& b = table[best];
    if (a.tuningF05 > b.tuningF05 ||
        (a.tuningF05 == b.tuningF05 &&
         (a.alpha < b.alpha || (a.alpha == b.alpha && a.beta < b.beta))))
      best = i;
  }

  TuneResult result;
  result.alpha = table[best].alpha;
  result.beta = table[best].beta;
  result.table = std::move(table);
  result.tuningEntries = static_cast<std::int64_t>(tuning.entries.size());
  result.heldOutEntries = static_cast<std::int64_t>(heldOut.entries.size());
  result.heldOutReport = evaluate(buildFn(result.alpha, result.beta), heldOut, mode, agg);
  return result;
}

std::string render_table(const EvalReport& report) {
  std::ostringstream out;
  out << "POS     F.5    Prec.  Rec.   Coverage  Synsets\n";
  auto row = [&](std::string_view name, const MetricRow& m, std::optional<double> cov,
                 std::optional<std::int64_t> synsets) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%-7s %-6s %-6s %-6s %-9s %s\n", std::string(name).c_str(),
                  one_decimal(m.f05).c_str(), one_decimal(m.precision).c_str(),
                  one_decimal(m.recall).c_str(), cov ? one_decimal(*cov).c_str() : "-",
                  synsets ? std::to_string(*synsets).c_str() : "-");
    out << buf;
  };
  for (Pos pos : kTestPos) {
    auto it = report.perPos.find(pos);
    if (it != report.perPos.end()) row(to_string(pos), it->second, std::nullopt, std::nullopt);
  }
  row("total", report.total, report.coverage, report.synsetCount);
  return out.str();
}

json report_to_json(const EvalReport& report) {
  json doc;
  doc["mode"] = std::string(to_string(report.mode));
  doc["aggregation"] = std::string(to_string(report.agg));
  json perPos;
  for (const auto& [pos, row] : report.perPos) {
    json r;
    r["precision"] = row.precision;
    r["recall"] = row.recall;
    r["f05"] = row.f05;
    r["entries"] = row.entries;
    perPos[std::string(to_string(pos))] = std::move(r);
  }
  doc["perPos"] = std::move(perPos);
  json total;
  total["precision"] = report.total.precision;
  total["recall"] = report.total.recall;
  total["f05"] = report.total.f05;
  total["entries"] = report.total.entries;
  doc["total"] = std::move(total);
  if (report.coverage) doc["coverage"] = *report.coverage;
  doc["synsetCount"] = report.synsetCount;
  return doc;
}

}  // namespace awn::evaluator
