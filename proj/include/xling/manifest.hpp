#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "xling/attack.hpp"
#include "xling/backend.hpp"
#include "xling/transfer.hpp"
#include "xling/translation.hpp"
#include "vendor/json.hpp"

namespace xling::manifest {

struct BackendSettings {
  backend::BackendKind kind = backend::BackendKind::Reference;
  std::string adapter_command;
  backend::BackendConfig config;
};

struct TranslationSettings {
  std::string provider = "identity";  // identity | dictionary
  std::filesystem::path dictionary_path;
  std::filesystem::path cache_path;
  translation::Mode mode = translation::Mode::Live;
};

struct GridSpec {
  std::vector<transfer::Regime> regimes;
  std::vector<int> shots = {0};
  std::vector<LanguageCode> targets;  // empty: every registry language
  LanguageCode stx_source = LanguageCode::En;
};

struct CellSpec {
  transfer::Regime regime = transfer::Regime::ELFI;
  LanguageCode target = LanguageCode::En;
  std::vector<LanguageCode> sources;
  int shots = 0;
};

struct AttackSettings {
  std::vector<attack::AttackKind> kinds;  // empty: all six
  std::vector<double> rates = {0, 25, 50, 75, 100};
  std::vector<LanguageCode> languages;  // empty: every registry language
  bool per_post = false;
  std::string special_charset = "*!@#$%&";
};

struct RunManifest {
  int manifest_version = 1;
  std::uint64_t master_seed = 0;
  std::filesystem::path output_root;
  std::vector<std::filesystem::path> descriptor_paths;
  BackendSettings backend;
  std::optional<TranslationSettings> translation;
  std::vector<GridSpec> grids;
  std::vector<CellSpec> cells;
  std::optional<AttackSettings> attacks;
};

// The published JSON schema the loader mirrors.
const std::string& schema_json();

// Structural validation; throws ManifestError naming the offending field.
void validate_manifest_json(const nlohmann::json& value);

// Parse + validate; relative paths resolve against the manifest's directory.
RunManifest load_manifest(const std::filesystem::path& file);

}  // namespace xling::manifest
