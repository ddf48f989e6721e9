#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "vendor/json.hpp"
#include "xling/corpus.hpp"
#include "xling/types.hpp"

// A three-language synthetic corpus family built for end-to-end runs. Every
// language is separable on its own, a shared marker pair appears in half of
// the abusive posts of every language so that zero-shot transfer works
// partially, and a per-language marker pair appears in all abusive posts so
// that few-shot fine-tuning has something real to learn. The same marker
// bigrams occur inside normal-only camouflage words, which forces the
// classifier to key on word-boundary n-grams and makes spacing attacks bite.
namespace fixture {

inline constexpr std::size_t kPerClass = 200;
inline constexpr std::uint64_t kMasterSeed = 425;

// Bn, En, Hi.
std::vector<xling::LanguageCode> languages();

std::string dataset_id(xling::LanguageCode language);

// Deterministic content; ids match what ingesting the written registry yields.
xling::corpus::Corpus make_corpus(xling::LanguageCode language,
                                  std::size_t per_class = kPerClass);

// Word-by-word tables for every ordered pair of fixture languages.
nlohmann::json dictionary_tables();

struct Registry {
  std::filesystem::path root;
  std::filesystem::path manifest;
  std::filesystem::path dictionary;
  std::vector<std::filesystem::path> descriptors;
};

// Writes data files, descriptors, the dictionary, and a full-grid manifest
// (no output_root, so callers pick one per run).
Registry write_registry(const std::filesystem::path& dir,
                        std::size_t per_class = kPerClass);

// Path of the CLI binary under test, from XLING_BIN.
std::string xling_binary();

// Scratch directory for a test, wiped on creation.
std::filesystem::path fresh_dir(const std::string& name);

}  // namespace fixture
