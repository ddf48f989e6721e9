#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "xling/attack.hpp"
#include "xling/metrics.hpp"
#include "xling/transfer.hpp"

namespace xling::reporting {

// One finished experiment cell, as loaded back from a run directory.
struct CellSummary {
  transfer::ExperimentPlan plan;
  std::string model;  // display label for the backend
  metrics::AggregateReport report;
};

// Every report is emitted in three synchronized renderings.
struct Artifact {
  std::string csv;
  std::string json;
  std::string markdown;
};

// Writes dir/<stem>.csv, .json, and .md.
void write_artifact(const Artifact& artifact, const std::filesystem::path& dir,
                    const std::string& stem);

// Cell directory round-trip: plan.json, metrics.json, predictions.tsv,
// lineage.json.
void write_cell_artifacts(const transfer::ExperimentResult& result,
                          const std::filesystem::path& dir);
CellSummary load_cell_summary(const std::filesystem::path& dir);
std::vector<CellSummary> load_run(const std::filesystem::path& run_root);

// Per-language rows with columns {Lang, Model, Accuracy, M-F1}; the winning
// model per language is bolded in the Markdown rendering.
Artifact emit_elfi_table(const std::vector<CellSummary>& results);

// Rows (target, model), columns the ten language types plus AllBOne. Best
// cell per row bold, second best italic, best row per target gets a dagger;
// ties fall to the lexicographically earlier column, then model.
Artifact emit_transfer_matrix(const std::vector<CellSummary>& results, int shots);

// Per-cell difference of two shot levels (high minus low) where both exist.
Artifact emit_delta_matrix(const std::vector<CellSummary>& results, int low_shots,
                           int high_shots);

struct AttackSeriesRow {
  std::string language;
  attack::AttackKind kind = attack::AttackKind::RemoveSpaces;
  double rate = 0.0;
  metrics::MetricsReport report;
};

// Long-form series sorted by (language, kind, rate).
Artifact emit_attack_series(const std::vector<AttackSeriesRow>& rows);

// Self-contained SVG: one panel per language, one line per attack kind.
std::string render_attack_svg(const std::vector<AttackSeriesRow>& rows);

}  // namespace xling::reporting
