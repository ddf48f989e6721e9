#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "xling/types.hpp"
#include "vendor/json.hpp"

namespace xling::corpus {

enum class MappedLabel { Abusive, Normal, Drop };

struct ExpectedCounts {
  std::uint64_t abusive = 0;
  std::uint64_t normal = 0;
};

struct DatasetDescriptor {
  std::string dataset_id;
  LanguageCode language_type = LanguageCode::En;
  std::string format;  // "tsv" or "jsonl"
  std::string data_path;
  std::string text_field;
  std::string label_field;
  std::map<std::string, MappedLabel> raw_label_map;
  std::optional<ExpectedCounts> expected_counts;
};

struct Post {
  std::string post_id;
  std::string text;
  BinaryLabel label = BinaryLabel::Normal;
  LanguageCode language_type = LanguageCode::En;
  std::string dataset_id;
};

struct Corpus {
  LanguageCode language_type = LanguageCode::En;
  std::vector<Post> posts;
  std::vector<std::string> provenance;
};

struct IngestStats {
  std::uint64_t dropped_labels = 0;
  std::uint64_t rejected_empty = 0;
};

// Returns nullopt for labels mapped to Drop. Unknown labels throw.
std::optional<BinaryLabel> harmonize_label(const DatasetDescriptor& descriptor,
                                           const std::string& raw);

Corpus ingest_dataset(const DatasetDescriptor& descriptor,
                      const std::vector<std::pair<std::string, std::string>>& records,
                      IngestStats* stats = nullptr);

// Reads the descriptor's data file (TSV with a header row, or JSONL).
Corpus ingest_file(const DatasetDescriptor& descriptor,
                   const std::filesystem::path& data_file,
                   IngestStats* stats = nullptr);

DatasetDescriptor descriptor_from_json(const nlohmann::json& value);
nlohmann::json descriptor_to_json(const DatasetDescriptor& descriptor);

// Loads a descriptor JSON file; a relative data_path is resolved against
// the descriptor's directory.
DatasetDescriptor load_descriptor(const std::filesystem::path& file);

Corpus merge_corpora(const std::vector<Corpus>& corpora, LanguageCode result_type);

struct SplitAssignment {
  std::vector<std::string> train;
  std::vector<std::string> validation;
  std::vector<std::string> test;
  std::uint64_t seed = 0;
};

// Per-class shuffle, then test = floor(0.20 n), validation = floor(0.10 n),
// train = remainder. Bucket id lists keep corpus order.
SplitAssignment stratified_split(const Corpus& corpus, std::uint64_t seed);

struct FewShotSet {
  std::size_t shots_per_label = 0;
  int repeat_index = 0;
  std::vector<std::string> post_ids;
  std::uint64_t seed = 0;
};

FewShotSet sample_few_shot(const SplitAssignment& split, const Corpus& corpus,
                           std::size_t n, int repeat_index, std::uint64_t seed);

// Posts for the given ids, in the given order. Unknown ids throw.
std::vector<Post> subset(const Corpus& corpus, const std::vector<std::string>& ids);

std::uint64_t count_label(const Corpus& corpus, BinaryLabel label);

// Content digest over language, provenance, and every post.
std::string fingerprint(const Corpus& corpus);

nlohmann::json split_to_json(const SplitAssignment& split);
SplitAssignment split_from_json(const nlohmann::json& value);

}  // namespace xling::corpus
