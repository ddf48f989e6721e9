#include "xling/metrics.hpp"

#include <algorithm>
#include <limits>

#include "xling/errors.hpp"

namespace xling::metrics {

namespace {

double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

double f1_of(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

ClassMetrics class_metrics(double tp, double fp, double fn) {
  ClassMetrics m;
  m.precision = ratio(tp, tp + fp);
  m.recall = ratio(tp, tp + fn);
  m.f1 = f1_of(m.precision, m.recall);
  return m;
}

nlohmann::json class_to_json(const ClassMetrics& m) {
  return {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}

ClassMetrics class_from_json(const nlohmann::json& value) {
  ClassMetrics m;
  m.precision = value.at("precision").get<double>();
  m.recall = value.at("recall").get<double>();
  m.f1 = value.at("f1").get<double>();
  return m;
}

}  // namespace

MetricsReport evaluate(const std::vector<BinaryLabel>& gold,
                       const std::vector<BinaryLabel>& pred) {
  if (gold.size() != pred.size()) {
    throw LengthMismatch("gold has " + std::to_string(gold.size()) +
                         " labels, predictions have " + std::to_string(pred.size()));
  }
  if (gold.empty()) throw EmptyEvaluation("no labels to evaluate");

  MetricsReport report;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const bool gold_abusive = gold[i] == BinaryLabel::Abusive;
    const bool pred_abusive = pred[i] == BinaryLabel::Abusive;
    if (gold_abusive && pred_abusive) ++report.confusion.tp;
    else if (!gold_abusive && pred_abusive) ++report.confusion.fp;
    else if (gold_abusive && !pred_abusive) ++report.confusion.fn;
    else ++report.confusion.tn;
  }
  report.n = gold.size();

  const auto& c = report.confusion;
  report.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(report.n);
  report.abusive = class_metrics(static_cast<double>(c.tp), static_cast<double>(c.fp),
                                 static_cast<double>(c.fn));
  report.normal = class_metrics(static_cast<double>(c.tn), static_cast<double>(c.fn),
                                static_cast<double>(c.fp));
  report.macro_f1 = (report.abusive.f1 + report.normal.f1) / 2.0;
  return report;
}

AggregateReport aggregate(const std::vector<MetricsReport>& reports) {
  if (reports.empty()) throw EmptyList("no reports to aggregate");

  AggregateReport agg;
  agg.repeats = reports.size();
  agg.per_repeat = reports;
  agg.accuracy_spread = {std::numeric_limits<double>::infinity(),
                         -std::numeric_limits<double>::infinity()};
  agg.macro_f1_spread = agg.accuracy_spread;

  const double k = static_cast<double>(reports.size());
  for (const auto& r : reports) {
    agg.accuracy += r.accuracy / k;
    agg.macro_f1 += r.macro_f1 / k;
    agg.accuracy_spread.min = std::min(agg.accuracy_spread.min, r.accuracy);
    agg.accuracy_spread.max = std::max(agg.accuracy_spread.max, r.accuracy);
    agg.macro_f1_spread.min = std::min(agg.macro_f1_spread.min, r.macro_f1);
    agg.macro_f1_spread.max = std::max(agg.macro_f1_spread.max, r.macro_f1);
    agg.abusive.precision += r.abusive.precision / k;
    agg.abusive.recall += r.abusive.recall / k;
    agg.abusive.f1 += r.abusive.f1 / k;
    agg.normal.precision += r.normal.precision / k;
    agg.normal.recall += r.normal.recall / k;
    agg.normal.f1 += r.normal.f1 / k;
    agg.tp += static_cast<double>(r.confusion.tp) / k;
    agg.fp += static_cast<double>(r.confusion.fp) / k;
    agg.fn += static_cast<double>(r.confusion.fn) / k;
    agg.tn += static_cast<double>(r.confusion.tn) / k;
  }
  return agg;
}

nlohmann::json to_json(const MetricsReport& report) {
  return {{"accuracy", report.accuracy},
          {"macro_f1", report.macro_f1},
          {"per_class",
           {{"abusive", class_to_json(report.abusive)},
            {"normal", class_to_json(report.normal)}}},
          {"confusion",
           {{"tp", report.confusion.tp},
            {"fp", report.confusion.fp},
            {"fn", report.confusion.fn},
            {"tn", report.confusion.tn}}},
          {"n", report.n}};
}

nlohmann::json to_json(const AggregateReport& report) {
  nlohmann::json repeats = nlohmann::json::array();
  for (const auto& r : report.per_repeat) repeats.push_back(to_json(r));
  return {{"accuracy", report.accuracy},
          {"macro_f1", report.macro_f1},
          {"accuracy_spread", {{"min", report.accuracy_spread.min}, {"max", report.accuracy_spread.max}}},
          {"macro_f1_spread", {{"min", report.macro_f1_spread.min}, {"max", report.macro_f1_spread.max}}},
          {"per_class",
           {{"abusive", class_to_json(report.abusive)},
            {"normal", class_to_json(report.normal)}}},
          {"confusion",
           {{"tp", report.tp}, {"fp", report.fp}, {"fn", report.fn}, {"tn", report.tn}}},
          {"n", report.repeats == 0 ? 0 : report.per_repeat.front().n},
          {"repeats", repeats}};
}

MetricsReport report_from_json(const nlohmann::json& value) {
  MetricsReport report;
  report.accuracy = value.at("accuracy").get<double>();
  report.macro_f1 = value.at("macro_f1").get<double>();
  report.abusive = class_from_json(value.at("per_class").at("abusive"));
  report.normal = class_from_json(value.at("per_class").at("normal"));
  const auto& c = value.at("confusion");
  report.confusion.tp = c.at("tp").get<std::uint64_t>();
  report.confusion.fp = c.at("fp").get<std::uint64_t>();
  report.confusion.fn = c.at("fn").get<std::uint64_t>();
  report.confusion.tn = c.at("tn").get<std::uint64_t>();
  report.n = value.at("n").get<std::size_t>();
  return report;
}

AggregateReport aggregate_from_json(const nlohmann::json& value) {
  std::vector<MetricsReport> repeats;
  for (const auto& r : value.at("repeats")) repeats.push_back(report_from_json(r));
  AggregateReport agg = aggregate(repeats);
  return agg;
}

}  // namespace xling::metrics
