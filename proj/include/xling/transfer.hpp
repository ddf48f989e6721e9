#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "xling/backend.hpp"
#include "xling/corpus.hpp"
#include "xling/metrics.hpp"
#include "xling/translation.hpp"
#include "vendor/json.hpp"

namespace xling::transfer {

enum class Regime { ELFI, JOINT, MTX, ALLBONE, IX, STX };

std::string_view to_string(Regime regime);
Regime parse_regime(const std::string& text);

struct ExperimentPlan {
  Regime regime = Regime::ELFI;
  LanguageCode target = LanguageCode::En;
  // Empty for ELFI always; for JOINT/ALLBONE an empty list means "resolve
  // against the registry at run time".
  std::vector<LanguageCode> sources;
  int shots = 0;
  int repeats = 1;
  backend::BackendKind backend_kind = backend::BackendKind::Reference;
  backend::BackendConfig config;
  std::uint64_t master_seed = 0;
  std::string translation_provider_id;
};

ExperimentPlan build_plan(Regime regime, LanguageCode target,
                          std::vector<LanguageCode> sources, int shots,
                          backend::BackendKind backend_kind,
                          const backend::BackendConfig& config, std::uint64_t master_seed,
                          std::string translation_provider_id = "");

// Stable directory-safe name, e.g. "mtx32_Bn_from_Ur".
std::string cell_id(const ExperimentPlan& plan);

nlohmann::json plan_to_json(const ExperimentPlan& plan);
ExperimentPlan plan_from_json(const nlohmann::json& value);

struct Registry {
  std::map<LanguageCode, corpus::Corpus> corpora;
  std::map<LanguageCode, corpus::SplitAssignment> splits;

  std::vector<LanguageCode> languages() const;
  const corpus::Corpus& corpus_for(LanguageCode language) const;
  const corpus::SplitAssignment& split_for(LanguageCode language) const;
};

struct RepeatResult {
  metrics::MetricsReport report;
  std::vector<backend::Prediction> predictions;
  std::vector<BinaryLabel> gold;
  std::vector<backend::LineageEntry> lineage;
};

struct ExperimentResult {
  ExperimentPlan plan;
  std::vector<RepeatResult> per_repeat;
  metrics::AggregateReport mean_report;
  std::string prediction_dump_ref;
};

// Runs one plan cell. The translator is required for IX/STX and ignored
// otherwise. The backend must match plan.backend_kind.
ExperimentResult run_experiment(const ExperimentPlan& plan, const Registry& registry,
                                backend::Backend& backend,
                                translation::Translator* translator);

struct GridOptions {
  std::vector<Regime> regimes;
  std::vector<int> shots_list = {0};
  std::vector<LanguageCode> targets;  // empty: every registry language
  backend::BackendKind backend_kind = backend::BackendKind::Reference;
  backend::BackendConfig config;
  std::uint64_t master_seed = 0;
  std::string translation_provider_id;
  LanguageCode stx_source = LanguageCode::En;
};

// Cartesian enumeration under the regime constraints; invalid cells are
// skipped, duplicates (by cell id) dropped.
std::vector<ExperimentPlan> full_grid(const std::vector<LanguageCode>& available,
                                      const GridOptions& options);

}  // namespace xling::transfer
