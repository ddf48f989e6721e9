#pragma once

#include <cstdint>
#include <vector>

#include "xling/types.hpp"
#include "vendor/json.hpp"

namespace xling::metrics {

// Confusion counts with the abusive class as positive.
struct ConfusionMatrix {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;

  std::uint64_t total() const { return tp + fp + fn + tn; }
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct MetricsReport {
  double accuracy = 0.0;
  ClassMetrics abusive;
  ClassMetrics normal;
  double macro_f1 = 0.0;
  ConfusionMatrix confusion;
  std::size_t n = 0;
};

struct Spread {
  double min = 0.0;
  double max = 0.0;
};

// Unweighted means over repeats, with per-field spreads. Confusion counts
// are averaged as reals.
struct AggregateReport {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  Spread accuracy_spread;
  Spread macro_f1_spread;
  ClassMetrics abusive;
  ClassMetrics normal;
  double tp = 0.0;
  double fp = 0.0;
  double fn = 0.0;
  double tn = 0.0;
  std::size_t repeats = 0;
  std::vector<MetricsReport> per_repeat;
};

MetricsReport evaluate(const std::vector<BinaryLabel>& gold,
                       const std::vector<BinaryLabel>& pred);

AggregateReport aggregate(const std::vector<MetricsReport>& reports);

nlohmann::json to_json(const MetricsReport& report);
nlohmann::json to_json(const AggregateReport& report);
MetricsReport report_from_json(const nlohmann::json& value);
AggregateReport aggregate_from_json(const nlohmann::json& value);

}  // namespace xling::metrics
