#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "xling/manifest.hpp"
#include "xling/transfer.hpp"
#include "xling/translation.hpp"

namespace xling::runner {

// Folded into every cell fingerprint so resumed runs never mix versions.
inline constexpr const char* kCodeVersion = "xling-core-1";

struct RunOptions {
  std::filesystem::path manifest_path;
  std::vector<std::string> only;  // cell-id prefixes; empty = everything
  bool resume = false;
  int jobs = 1;
  std::optional<translation::Mode> mode_override;
  std::filesystem::path output_root_override;
};

struct RunOutcome {
  int executed = 0;
  int skipped = 0;
  int failed = 0;
  std::filesystem::path output_root;
  std::vector<std::string> failures;
};

struct Context {
  manifest::RunManifest manifest;
  transfer::Registry registry;
  std::vector<transfer::ExperimentPlan> plans;
  std::filesystem::path output_root;
  std::string registry_fingerprint;
  std::shared_ptr<translation::Provider> provider;
  std::shared_ptr<translation::Cache> cache;
  translation::Mode mode = translation::Mode::Live;
};

transfer::Registry build_registry(const manifest::RunManifest& manifest,
                                  std::uint64_t master_seed);

Context load_context(const RunOptions& options);

std::string cell_fingerprint(const transfer::ExperimentPlan& plan,
                             const std::string& registry_fingerprint);

// Executes every (filtered) plan cell into output_root/cells/<cell_id>.
RunOutcome execute_run(const RunOptions& options, std::ostream& log);

// Trains the per-language models and sweeps the attack grid into
// output_root/attacks/<Lang>.
RunOutcome execute_attacks(const RunOptions& options, std::ostream& log);

// Dry-run ingestion of every dataset; returns a process exit code.
int validate_datasets(const std::filesystem::path& manifest_path, std::ostream& log);

// Writes split manifests under output_root/splits.
void write_splits(const Context& context);

// kind: all | elfi | transfer | delta | attack.
void write_reports(const std::filesystem::path& run_root, const std::string& kind,
                   std::ostream& log);

void write_plot(const std::filesystem::path& run_root, std::ostream& log);

}  // namespace xling::runner
