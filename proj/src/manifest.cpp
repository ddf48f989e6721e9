#include "xling/manifest.hpp"

#include <algorithm>
#include <set>

#include "xling/errors.hpp"
#include "xling/io.hpp"

namespace xling::manifest {

namespace {

const char* const kSchema = R"SCHEMA({
  "$schema": "http://json-schema.org/draft-07/schema#",
  "title": "xling run manifest",
  "type": "object",
  "required": ["manifest_version", "master_seed", "registry", "backend", "plans"],
  "additionalProperties": false,
  "properties": {
    "manifest_version": { "type": "integer", "const": 1 },
    "master_seed": { "type": "integer", "minimum": 0 },
    "output_root": { "type": "string", "minLength": 1 },
    "registry": {
      "type": "object",
      "required": ["descriptors"],
      "additionalProperties": false,
      "properties": {
        "descriptors": {
          "type": "array",
          "minItems": 1,
          "items": { "type": "string", "minLength": 1 }
        }
      }
    },
    "backend": {
      "type": "object",
      "required": ["kind"],
      "additionalProperties": false,
      "properties": {
        "kind": { "enum": ["reference", "transformer-adapter"] },
        "adapter_command": { "type": "string" },
        "config": {
          "type": "object",
          "additionalProperties": false,
          "properties": {
            "epochs": { "type": "integer", "minimum": 1 },
            "batch_size": { "type": "integer", "minimum": 1 },
            "learning_rate": { "type": "number", "exclusiveMinimum": 0 },
            "adam_epsilon": { "type": "number", "exclusiveMinimum": 0 },
            "max_tokens": { "type": "integer", "minimum": 1, "maximum": 512 }
          }
        }
      }
    },
    "translation": {
      "type": "object",
      "required": ["provider"],
      "additionalProperties": false,
      "properties": {
        "provider": { "enum": ["identity", "dictionary"] },
        "dictionary_path": {
          "type": "string",
          "minLength": 1,
          "description": "required when provider is dictionary"
        },
        "cache_path": { "type": "string", "minLength": 1 },
        "mode": { "enum": ["live", "offline"] }
      }
    },
    "plans": {
      "type": "array",
      "minItems": 1,
      "items": {
        "type": "object",
        "minProperties": 1,
        "maxProperties": 1,
        "additionalProperties": false,
        "properties": {
          "grid": {
            "type": "object",
            "required": ["regimes"],
            "additionalProperties": false,
            "properties": {
              "regimes": {
                "type": "array",
                "minItems": 1,
                "items": { "enum": ["elfi", "joint", "mtx", "allbone", "ix", "stx"] }
              },
              "shots": { "type": "array", "minItems": 1, "items": { "enum": [0, 32, 64] } },
              "targets": { "type": "array", "items": { "$ref": "#/definitions/language" } },
              "stx_source": { "$ref": "#/definitions/language" }
            }
          },
          "cell": {
            "type": "object",
            "required": ["regime", "target"],
            "additionalProperties": false,
            "properties": {
              "regime": { "enum": ["elfi", "joint", "mtx", "allbone", "ix", "stx"] },
              "target": { "$ref": "#/definitions/language" },
              "sources": { "type": "array", "items": { "$ref": "#/definitions/language" } },
              "shots": { "enum": [0, 32, 64] }
            }
          }
        }
      }
    },
    "attacks": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "kinds": {
          "type": "array",
          "minItems": 1,
          "items": {
            "enum": ["remove_spaces", "add_spaces_in_words", "remove_chars_from_words",
                     "introduce_special_chars", "swap_adjacent_chars", "swap_adjacent_words"]
          }
        },
        "rates": {
          "type": "array",
          "minItems": 1,
          "items": { "type": "number", "minimum": 0, "maximum": 100 },
          "description": "ascending, first element 0"
        },
        "languages": { "type": "array", "items": { "$ref": "#/definitions/language" } },
        "per_post": { "type": "boolean" },
        "special_charset": { "type": "string", "minLength": 1 }
      }
    }
  },
  "definitions": {
    "language": {
      "enum": ["Bn", "En", "Hi", "Hi-En", "Ka-En", "Ma-En", "Mr", "Ta-En", "Ur-En", "Ur"]
    }
  }
}
)SCHEMA";

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ManifestError("manifest field " + path + ": " + message);
}

const nlohmann::json& expect_object(const nlohmann::json& value, const std::string& path) {
  if (!value.is_object()) fail(path, "must be an object");
  return value;
}

const nlohmann::json& expect_array(const nlohmann::json& value, const std::string& path,
                                   std::size_t min_items = 0) {
  if (!value.is_array()) fail(path, "must be an array");
  if (value.size() < min_items) {
    fail(path, "needs at least " + std::to_string(min_items) + " item(s)");
  }
  return value;
}

std::string expect_string(const nlohmann::json& value, const std::string& path,
                          bool non_empty = true) {
  if (!value.is_string()) fail(path, "must be a string");
  const auto text = value.get<std::string>();
  if (non_empty && text.empty()) fail(path, "must not be empty");
  return text;
}

std::int64_t expect_integer(const nlohmann::json& value, const std::string& path) {
  if (!value.is_number_integer()) fail(path, "must be an integer");
  return value.get<std::int64_t>();
}

double expect_number(const nlohmann::json& value, const std::string& path) {
  if (!value.is_number()) fail(path, "must be a number");
  return value.get<double>();
}

void check_keys(const nlohmann::json& object, const std::string& path,
                const std::set<std::string>& allowed) {
  for (const auto& [key, unused] : object.items()) {
    if (!allowed.contains(key)) fail(path + "." + key, "unknown field");
  }
}

void expect_language(const nlohmann::json& value, const std::string& path) {
  try {
    parse_language(expect_string(value, path));
  } catch (const Error& e) {
    fail(path, e.what());
  }
}

void expect_regime(const nlohmann::json& value, const std::string& path) {
  try {
    transfer::parse_regime(expect_string(value, path));
  } catch (const Error& e) {
    fail(path, e.what());
  }
}

void expect_shots(const nlohmann::json& value, const std::string& path) {
  const auto shots = expect_integer(value, path);
  if (shots != 0 && shots != 32 && shots != 64) fail(path, "must be 0, 32, or 64");
}

void validate_backend(const nlohmann::json& value, const std::string& path) {
  expect_object(value, path);
  check_keys(value, path, {"kind", "adapter_command", "config"});
  if (!value.contains("kind")) fail(path + ".kind", "required");
  const auto kind = expect_string(value.at("kind"), path + ".kind");
  if (kind != "reference" && kind != "transformer-adapter") {
    fail(path + ".kind", "must be reference or transformer-adapter");
  }
  if (value.contains("adapter_command")) {
    expect_string(value.at("adapter_command"), path + ".adapter_command", false);
  }
  if (value.contains("config")) {
    const auto& config = expect_object(value.at("config"), path + ".config");
    check_keys(config, path + ".config",
               {"epochs", "batch_size", "learning_rate", "adam_epsilon", "max_tokens"});
    for (const auto* field : {"epochs", "batch_size"}) {
      if (config.contains(field) &&
          expect_integer(config.at(field), path + ".config." + field) < 1) {
        fail(path + ".config." + field, "must be at least 1");
      }
    }
    for (const auto* field : {"learning_rate", "adam_epsilon"}) {
      if (config.contains(field) &&
          expect_number(config.at(field), path + ".config." + field) <= 0) {
        fail(path + ".config." + field, "must be positive");
      }
    }
    if (config.contains("max_tokens")) {
      const auto tokens = expect_integer(config.at("max_tokens"), path + ".config.max_tokens");
      if (tokens < 1 || tokens > 512) fail(path + ".config.max_tokens", "must be in [1, 512]");
    }
  }
}

void validate_translation(const nlohmann::json& value, const std::string& path) {
  expect_object(value, path);
  check_keys(value, path, {"provider", "dictionary_path", "cache_path", "mode"});
  if (!value.contains("provider")) fail(path + ".provider", "required");
  const auto provider = expect_string(value.at("provider"), path + ".provider");
  if (provider != "identity" && provider != "dictionary") {
    fail(path + ".provider", "must be identity or dictionary");
  }
  if (provider == "dictionary" && !value.contains("dictionary_path")) {
    fail(path + ".dictionary_path", "required for the dictionary provider");
  }
  if (value.contains("dictionary_path")) {
    expect_string(value.at("dictionary_path"), path + ".dictionary_path");
  }
  if (value.contains("cache_path")) {
    expect_string(value.at("cache_path"), path + ".cache_path");
  }
  if (value.contains("mode")) {
    const auto mode = expect_string(value.at("mode"), path + ".mode");
    if (mode != "live" && mode != "offline") fail(path + ".mode", "must be live or offline");
  }
}

void validate_plan_entry(const nlohmann::json& value, const std::string& path) {
  expect_object(value, path);
  check_keys(value, path, {"grid", "cell"});
  if (value.size() != 1) fail(path, "must hold exactly one of grid or cell");

  if (value.contains("grid")) {
    const auto& grid = expect_object(value.at("grid"), path + ".grid");
    check_keys(grid, path + ".grid", {"regimes", "shots", "targets", "stx_source"});
    if (!grid.contains("regimes")) fail(path + ".grid.regimes", "required");
    const auto& regimes = expect_array(grid.at("regimes"), path + ".grid.regimes", 1);
    for (std::size_t i = 0; i < regimes.size(); ++i) {
      expect_regime(regimes[i], path + ".grid.regimes[" + std::to_string(i) + "]");
    }
    if (grid.contains("shots")) {
      const auto& shots = expect_array(grid.at("shots"), path + ".grid.shots", 1);
      for (std::size_t i = 0; i < shots.size(); ++i) {
        expect_shots(shots[i], path + ".grid.shots[" + std::to_string(i) + "]");
      }
    }
    if (grid.contains("targets")) {
      const auto& targets = expect_array(grid.at("targets"), path + ".grid.targets");
      for (std::size_t i = 0; i < targets.size(); ++i) {
        expect_language(targets[i], path + ".grid.targets[" + std::to_string(i) + "]");
      }
    }
    if (grid.contains("stx_source")) {
      expect_language(grid.at("stx_source"), path + ".grid.stx_source");
    }
    return;
  }
  if (value.contains("cell")) {
    const auto& cell = expect_object(value.at("cell"), path + ".cell");
    check_keys(cell, path + ".cell", {"regime", "target", "sources", "shots"});
    if (!cell.contains("regime")) fail(path + ".cell.regime", "required");
    expect_regime(cell.at("regime"), path + ".cell.regime");
    if (!cell.contains("target")) fail(path + ".cell.target", "required");
    expect_language(cell.at("target"), path + ".cell.target");
    if (cell.contains("sources")) {
      const auto& sources = expect_array(cell.at("sources"), path + ".cell.sources");
      for (std::size_t i = 0; i < sources.size(); ++i) {
        expect_language(sources[i], path + ".cell.sources[" + std::to_string(i) + "]");
      }
    }
    if (cell.contains("shots")) expect_shots(cell.at("shots"), path + ".cell.shots");
    return;
  }
  fail(path, "must hold exactly one of grid or cell");
}

void validate_attacks(const nlohmann::json& value, const std::string& path) {
  expect_object(value, path);
  check_keys(value, path, {"kinds", "rates", "languages", "per_post", "special_charset"});
  if (value.contains("kinds")) {
    const auto& kinds = expect_array(value.at("kinds"), path + ".kinds", 1);
    for (std::size_t i = 0; i < kinds.size(); ++i) {
      const auto item = expect_string(kinds[i], path + ".kinds[" + std::to_string(i) + "]");
      try {
        attack::parse_attack_kind(item);
      } catch (const Error& e) {
        fail(path + ".kinds[" + std::to_string(i) + "]", e.what());
      }
    }
  }
  if (value.contains("rates")) {
    const auto& rates = expect_array(value.at("rates"), path + ".rates", 1);
    double previous = -1.0;
    for (std::size_t i = 0; i < rates.size(); ++i) {
      const auto item = path + ".rates[" + std::to_string(i) + "]";
      const double rate = expect_number(rates[i], item);
      if (rate < 0.0 || rate > 100.0) fail(item, "must be in [0, 100]");
      if (i == 0 && rate != 0.0) fail(item, "the first rate must be 0");
      if (rate <= previous) fail(item, "rates must be strictly ascending");
      previous = rate;
    }
  }
  if (value.contains("languages")) {
    const auto& languages = expect_array(value.at("languages"), path + ".languages");
    for (std::size_t i = 0; i < languages.size(); ++i) {
      expect_language(languages[i], path + ".languages[" + std::to_string(i) + "]");
    }
  }
  if (value.contains("per_post") && !value.at("per_post").is_boolean()) {
    fail(path + ".per_post", "must be a boolean");
  }
  if (value.contains("special_charset")) {
    expect_string(value.at("special_charset"), path + ".special_charset");
  }
}

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::filesystem::path& path) {
  return path.is_absolute() ? path : base / path;
}

}  // namespace

const std::string& schema_json() {
  static const std::string schema = kSchema;
  return schema;
}

void validate_manifest_json(const nlohmann::json& value) {
  expect_object(value, "$");
  check_keys(value, "$",
             {"manifest_version", "master_seed", "output_root", "registry", "backend",
              "translation", "plans", "attacks"});
  for (const auto* field : {"manifest_version", "master_seed", "registry", "backend", "plans"}) {
    if (!value.contains(field)) fail(std::string("$.") + field, "required");
  }
  if (expect_integer(value.at("manifest_version"), "$.manifest_version") != 1) {
    fail("$.manifest_version", "must be 1");
  }
  if (!value.at("master_seed").is_number_unsigned() &&
      !(value.at("master_seed").is_number_integer() &&
        value.at("master_seed").get<std::int64_t>() >= 0)) {
    fail("$.master_seed", "must be a non-negative integer");
  }
  if (value.contains("output_root")) expect_string(value.at("output_root"), "$.output_root");

  const auto& registry = expect_object(value.at("registry"), "$.registry");
  check_keys(registry, "$.registry", {"descriptors"});
  if (!registry.contains("descriptors")) fail("$.registry.descriptors", "required");
  const auto& descriptors =
      expect_array(registry.at("descriptors"), "$.registry.descriptors", 1);
  for (std::size_t i = 0; i < descriptors.size(); ++i) {
    expect_string(descriptors[i], "$.registry.descriptors[" + std::to_string(i) + "]");
  }

  validate_backend(value.at("backend"), "$.backend");
  if (value.contains("translation")) {
    validate_translation(value.at("translation"), "$.translation");
  }

  const auto& plans = expect_array(value.at("plans"), "$.plans", 1);
  for (std::size_t i = 0; i < plans.size(); ++i) {
    validate_plan_entry(plans[i], "$.plans[" + std::to_string(i) + "]");
  }

  if (value.contains("attacks")) validate_attacks(value.at("attacks"), "$.attacks");
}

RunManifest load_manifest(const std::filesystem::path& file) {
  nlohmann::json value;
  try {
    value = nlohmann::json::parse(io::read_file(file));
  } catch (const nlohmann::json::parse_error& e) {
    throw ManifestError("manifest " + file.string() + " is not valid JSON: " + e.what());
  }
  validate_manifest_json(value);

  const auto base = std::filesystem::absolute(file).parent_path();

  RunManifest manifest;
  manifest.manifest_version = value.at("manifest_version").get<int>();
  manifest.master_seed = value.at("master_seed").get<std::uint64_t>();
  if (value.contains("output_root")) {
    manifest.output_root = resolve(base, value.at("output_root").get<std::string>());
  }
  for (const auto& descriptor : value.at("registry").at("descriptors")) {
    manifest.descriptor_paths.push_back(resolve(base, descriptor.get<std::string>()));
  }

  const auto& backend_json = value.at("backend");
  manifest.backend.kind =
      backend::parse_backend_kind(backend_json.at("kind").get<std::string>());
  manifest.backend.adapter_command = backend_json.value("adapter_command", std::string());
  if (backend_json.contains("config")) {
    manifest.backend.config = backend::config_from_json(backend_json.at("config"));
  }
  manifest.backend.config.master_seed = manifest.master_seed;

  if (value.contains("translation")) {
    TranslationSettings settings;
    const auto& translation_json = value.at("translation");
    settings.provider = translation_json.at("provider").get<std::string>();
    if (translation_json.contains("dictionary_path")) {
      settings.dictionary_path =
          resolve(base, translation_json.at("dictionary_path").get<std::string>());
    }
    settings.cache_path =
        resolve(base, translation_json.value("cache_path", std::string("translation_cache.jsonl")));
    settings.mode =
        translation::parse_mode(translation_json.value("mode", std::string("live")));
    manifest.translation = std::move(settings);
  }

  for (const auto& entry : value.at("plans")) {
    if (entry.contains("grid")) {
      const auto& grid_json = entry.at("grid");
      GridSpec grid;
      for (const auto& regime : grid_json.at("regimes")) {
        grid.regimes.push_back(transfer::parse_regime(regime.get<std::string>()));
      }
      if (grid_json.contains("shots")) {
        grid.shots.clear();
        for (const auto& shots : grid_json.at("shots")) grid.shots.push_back(shots.get<int>());
      }
      if (grid_json.contains("targets")) {
        for (const auto& target : grid_json.at("targets")) {
          grid.targets.push_back(parse_language(target.get<std::string>()));
        }
      }
      if (grid_json.contains("stx_source")) {
        grid.stx_source = parse_language(grid_json.at("stx_source").get<std::string>());
      }
      manifest.grids.push_back(std::move(grid));
    } else {
      const auto& cell_json = entry.at("cell");
      CellSpec cell;
      cell.regime = transfer::parse_regime(cell_json.at("regime").get<std::string>());
      cell.target = parse_language(cell_json.at("target").get<std::string>());
      if (cell_json.contains("sources")) {
        for (const auto& source : cell_json.at("sources")) {
          cell.sources.push_back(parse_language(source.get<std::string>()));
        }
      }
      cell.shots = cell_json.value("shots", 0);
      manifest.cells.push_back(std::move(cell));
    }
  }

  if (value.contains("attacks")) {
    AttackSettings settings;
    const auto& attacks_json = value.at("attacks");
    if (attacks_json.contains("kinds")) {
      for (const auto& kind : attacks_json.at("kinds")) {
        settings.kinds.push_back(attack::parse_attack_kind(kind.get<std::string>()));
      }
    }
    if (attacks_json.contains("rates")) {
      settings.rates.clear();
      for (const auto& rate : attacks_json.at("rates")) {
        settings.rates.push_back(rate.get<double>());
      }
    }
    if (attacks_json.contains("languages")) {
      for (const auto& language : attacks_json.at("languages")) {
        settings.languages.push_back(parse_language(language.get<std::string>()));
      }
    }
    settings.per_post = attacks_json.value("per_post", false);
    settings.special_charset =
        attacks_json.value("special_charset", std::string("*!@#$%&"));
    manifest.attacks = std::move(settings);
  }

  return manifest;
}

}  // namespace xling::manifest
