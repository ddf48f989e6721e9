#include "xling/corpus.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "xling/digest.hpp"
#include "xling/errors.hpp"
#include "xling/io.hpp"
#include "xling/rng.hpp"

namespace xling::corpus {

namespace {

MappedLabel mapped_from_string(const std::string& value) {
  if (value == "abusive") return MappedLabel::Abusive;
  if (value == "normal") return MappedLabel::Normal;
  if (value == "DROP") return MappedLabel::Drop;
  throw ManifestError("raw_label_map values must be abusive, normal, or DROP; got \"" +
                      value + "\"");
}

std::string mapped_to_string(MappedLabel value) {
  switch (value) {
    case MappedLabel::Abusive: return "abusive";
    case MappedLabel::Normal: return "normal";
    case MappedLabel::Drop: return "DROP";
  }
  throw Error("unreachable mapped label");
}

std::vector<std::pair<std::string, std::string>> read_tsv_records(
    const DatasetDescriptor& descriptor, const std::filesystem::path& data_file) {
  const auto lines = io::read_lines(data_file);
  if (lines.empty()) {
    throw ManifestError("TSV file has no header row: " + data_file.string());
  }
  const auto header = io::split(lines.front(), '\t');
  std::size_t text_col = header.size();
  std::size_t label_col = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == descriptor.text_field) text_col = i;
    if (header[i] == descriptor.label_field) label_col = i;
  }
  if (text_col == header.size() || label_col == header.size()) {
    throw ManifestError("TSV header of " + data_file.string() + " lacks column \"" +
                        descriptor.text_field + "\" or \"" + descriptor.label_field + "\"");
  }
  std::vector<std::pair<std::string, std::string>> records;
  records.reserve(lines.size() - 1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto cells = io::split(lines[i], '\t');
    if (cells.size() <= std::max(text_col, label_col)) {
      throw ManifestError("row " + std::to_string(i + 1) + " of " + data_file.string() +
                          " has too few columns");
    }
    records.emplace_back(cells[text_col], cells[label_col]);
  }
  return records;
}

std::vector<std::pair<std::string, std::string>> read_jsonl_records(
    const DatasetDescriptor& descriptor, const std::filesystem::path& data_file) {
  std::vector<std::pair<std::string, std::string>> records;
  for (const auto& line : io::read_lines(data_file)) {
    if (io::trim(line).empty()) continue;
    nlohmann::json row;
    try {
      row = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ManifestError("bad JSONL line in " + data_file.string() + ": " + e.what());
    }
    if (!row.contains(descriptor.text_field) || !row.contains(descriptor.label_field)) {
      throw ManifestError("JSONL record in " + data_file.string() + " lacks field \"" +
                          descriptor.text_field + "\" or \"" + descriptor.label_field + "\"");
    }
    records.emplace_back(row.at(descriptor.text_field).get<std::string>(),
                         row.at(descriptor.label_field).get<std::string>());
  }
  return records;
}

// Indices of corpus posts with the given label, in corpus order.
std::vector<std::size_t> class_indices(const Corpus& corpus, BinaryLabel label) {
  std::vector<std::size_t> indices;
  for (std::size_t i = 0; i < corpus.posts.size(); ++i) {
    if (corpus.posts[i].label == label) indices.push_back(i);
  }
  return indices;
}

std::vector<std::string> ids_in_corpus_order(const Corpus& corpus,
                                             std::vector<std::size_t> indices) {
  std::sort(indices.begin(), indices.end());
  std::vector<std::string> ids;
  ids.reserve(indices.size());
  for (auto i : indices) ids.push_back(corpus.posts[i].post_id);
  return ids;
}

}  // namespace

std::optional<BinaryLabel> harmonize_label(const DatasetDescriptor& descriptor,
                                           const std::string& raw) {
  const auto it = descriptor.raw_label_map.find(raw);
  if (it == descriptor.raw_label_map.end()) {
    throw UnknownRawLabel("dataset " + descriptor.dataset_id +
                          " has no mapping for raw label \"" + raw + "\"");
  }
  switch (it->second) {
    case MappedLabel::Abusive: return BinaryLabel::Abusive;
    case MappedLabel::Normal: return BinaryLabel::Normal;
    case MappedLabel::Drop: return std::nullopt;
  }
  throw Error("unreachable mapped label");
}

Corpus ingest_dataset(const DatasetDescriptor& descriptor,
                      const std::vector<std::pair<std::string, std::string>>& records,
                      IngestStats* stats) {
  Corpus corpus;
  corpus.language_type = descriptor.language_type;
  corpus.provenance.push_back(descriptor.dataset_id);

  IngestStats local;
  std::uint64_t abusive = 0;
  std::uint64_t normal = 0;
  std::uint64_t ordinal = 0;
  for (const auto& [raw_text, raw_label] : records) {
    ++ordinal;
    const auto label = harmonize_label(descriptor, raw_label);
    if (!label.has_value()) {
      ++local.dropped_labels;
      continue;
    }
    const std::string text = io::trim(raw_text);
    if (text.empty()) {
      ++local.rejected_empty;
      continue;
    }
    Post post;
    post.post_id = descriptor.dataset_id + ":" + std::to_string(ordinal);
    post.text = text;
    post.label = *label;
    post.language_type = descriptor.language_type;
    post.dataset_id = descriptor.dataset_id;
    if (post.label == BinaryLabel::Abusive) ++abusive; else ++normal;
    corpus.posts.push_back(std::move(post));
  }

  if (descriptor.expected_counts.has_value()) {
    const auto& expected = *descriptor.expected_counts;
    if (abusive != expected.abusive || normal != expected.normal) {
      throw CountMismatch("dataset " + descriptor.dataset_id + " expected " +
                          std::to_string(expected.abusive) + " abusive / " +
                          std::to_string(expected.normal) + " normal, ingested " +
                          std::to_string(abusive) + " / " + std::to_string(normal));
    }
  }
  if (stats != nullptr) *stats = local;
  return corpus;
}

Corpus ingest_file(const DatasetDescriptor& descriptor,
                   const std::filesystem::path& data_file, IngestStats* stats) {
  if (descriptor.format == "tsv") {
    return ingest_dataset(descriptor, read_tsv_records(descriptor, data_file), stats);
  }
  if (descriptor.format == "jsonl") {
    return ingest_dataset(descriptor, read_jsonl_records(descriptor, data_file), stats);
  }
  throw ManifestError("dataset " + descriptor.dataset_id + " has unsupported format \"" +
                      descriptor.format + "\" (expected tsv or jsonl)");
}

DatasetDescriptor descriptor_from_json(const nlohmann::json& value) {
  DatasetDescriptor d;
  d.dataset_id = value.at("dataset_id").get<std::string>();
  d.language_type = parse_language(value.at("language_type").get<std::string>());
  d.format = value.at("format").get<std::string>();
  d.data_path = value.value("data_path", std::string());
  d.text_field = value.at("text_field").get<std::string>();
  d.label_field = value.at("label_field").get<std::string>();
  for (const auto& [raw, mapped] : value.at("raw_label_map").items()) {
    d.raw_label_map[raw] = mapped_from_string(mapped.get<std::string>());
  }
  if (value.contains("expected_counts") && !value.at("expected_counts").is_null()) {
    ExpectedCounts counts;
    counts.abusive = value.at("expected_counts").at("abusive").get<std::uint64_t>();
    counts.normal = value.at("expected_counts").at("normal").get<std::uint64_t>();
    d.expected_counts = counts;
  }
  return d;
}

nlohmann::json descriptor_to_json(const DatasetDescriptor& descriptor) {
  nlohmann::json labels = nlohmann::json::object();
  for (const auto& [raw, mapped] : descriptor.raw_label_map) {
    labels[raw] = mapped_to_string(mapped);
  }
  nlohmann::json value = {{"dataset_id", descriptor.dataset_id},
                          {"language_type", to_string(descriptor.language_type)},
                          {"format", descriptor.format},
                          {"data_path", descriptor.data_path},
                          {"text_field", descriptor.text_field},
                          {"label_field", descriptor.label_field},
                          {"raw_label_map", labels}};
  if (descriptor.expected_counts.has_value()) {
    value["expected_counts"] = {{"abusive", descriptor.expected_counts->abusive},
                                {"normal", descriptor.expected_counts->normal}};
  }
  return value;
}

DatasetDescriptor load_descriptor(const std::filesystem::path& file) {
  nlohmann::json value;
  try {
    value = nlohmann::json::parse(io::read_file(file));
  } catch (const nlohmann::json::parse_error& e) {
    throw ManifestError("bad descriptor JSON " + file.string() + ": " + e.what());
  }
  DatasetDescriptor d = descriptor_from_json(value);
  if (!d.data_path.empty()) {
    const std::filesystem::path data(d.data_path);
    if (data.is_relative()) d.data_path = (file.parent_path() / data).string();
  }
  return d;
}

Corpus merge_corpora(const std::vector<Corpus>& corpora, LanguageCode result_type) {
  if (corpora.empty()) throw EmptyList("no corpora to merge");
  Corpus merged;
  merged.language_type = result_type;
  std::unordered_set<std::string> seen;
  for (const auto& corpus : corpora) {
    for (const auto& id : corpus.provenance) merged.provenance.push_back(id);
    for (const auto& post : corpus.posts) {
      if (!seen.insert(post.post_id).second) {
        throw DuplicatePostId("post id \"" + post.post_id + "\" appears in two corpora");
      }
      merged.posts.push_back(post);
    }
  }
  return merged;
}

SplitAssignment stratified_split(const Corpus& corpus, std::uint64_t seed) {
  SplitAssignment split;
  split.seed = seed;

  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> val_idx;
  std::vector<std::size_t> test_idx;
  for (const BinaryLabel label : {BinaryLabel::Abusive, BinaryLabel::Normal}) {
    auto indices = class_indices(corpus, label);
    if (indices.size() < 5) {
      throw ClassTooSmall("class " + std::string(to_string(label)) + " has " +
                          std::to_string(indices.size()) + " posts, need at least 5");
    }
    rng::SplitMix64 gen(rng::derive_all(seed, "split", to_string(label)));
    rng::shuffle(indices, gen);
    const std::size_t n = indices.size();
    const std::size_t n_test = n * 20 / 100;
    const std::size_t n_val = n * 10 / 100;
    test_idx.insert(test_idx.end(), indices.begin(), indices.begin() + n_test);
    val_idx.insert(val_idx.end(), indices.begin() + n_test, indices.begin() + n_test + n_val);
    train_idx.insert(train_idx.end(), indices.begin() + n_test + n_val, indices.end());
  }
  split.train = ids_in_corpus_order(corpus, std::move(train_idx));
  split.validation = ids_in_corpus_order(corpus, std::move(val_idx));
  split.test = ids_in_corpus_order(corpus, std::move(test_idx));
  return split;
}

FewShotSet sample_few_shot(const SplitAssignment& split, const Corpus& corpus,
                           std::size_t n, int repeat_index, std::uint64_t seed) {
  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < corpus.posts.size(); ++i) {
    position[corpus.posts[i].post_id] = i;
  }

  FewShotSet set;
  set.shots_per_label = n;
  set.repeat_index = repeat_index;
  set.seed = seed;

  rng::SplitMix64 gen(rng::derive_all(seed, "fewshot", repeat_index));
  std::vector<std::size_t> chosen;
  for (const BinaryLabel label : {BinaryLabel::Abusive, BinaryLabel::Normal}) {
    std::vector<std::size_t> candidates;
    for (const auto& id : split.train) {
      const auto it = position.find(id);
      if (it == position.end()) {
        throw MissingSplit("train split id \"" + id + "\" is not in the corpus");
      }
      if (corpus.posts[it->second].label == label) candidates.push_back(it->second);
    }
    if (candidates.size() < n) {
      throw InsufficientGold("train split has " + std::to_string(candidates.size()) + " " +
                             std::string(to_string(label)) + " posts, need " +
                             std::to_string(n));
    }
    for (auto pick : rng::sample_without_replacement(candidates.size(), n, gen)) {
      chosen.push_back(candidates[pick]);
    }
  }
  set.post_ids = ids_in_corpus_order(corpus, std::move(chosen));
  return set;
}

std::vector<Post> subset(const Corpus& corpus, const std::vector<std::string>& ids) {
  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < corpus.posts.size(); ++i) {
    position[corpus.posts[i].post_id] = i;
  }
  std::vector<Post> posts;
  posts.reserve(ids.size());
  for (const auto& id : ids) {
    const auto it = position.find(id);
    if (it == position.end()) {
      throw MissingSplit("post id \"" + id + "\" is not in the corpus");
    }
    posts.push_back(corpus.posts[it->second]);
  }
  return posts;
}

std::uint64_t count_label(const Corpus& corpus, BinaryLabel label) {
  std::uint64_t count = 0;
  for (const auto& post : corpus.posts) {
    if (post.label == label) ++count;
  }
  return count;
}

std::string fingerprint(const Corpus& corpus) {
  std::string blob;
  blob += to_string(corpus.language_type);
  blob += '\n';
  for (const auto& id : corpus.provenance) {
    blob += id;
    blob += '\n';
  }
  for (const auto& post : corpus.posts) {
    blob += post.post_id;
    blob += '\t';
    blob += to_string(post.label);
    blob += '\t';
    blob += post.text;
    blob += '\n';
  }
  return digest::sha256_hex(blob);
}

nlohmann::json split_to_json(const SplitAssignment& split) {
  return {{"seed", split.seed},
          {"train", split.train},
          {"validation", split.validation},
          {"test", split.test}};
}

SplitAssignment split_from_json(const nlohmann::json& value) {
  SplitAssignment split;
  split.seed = value.at("seed").get<std::uint64_t>();
  split.train = value.at("train").get<std::vector<std::string>>();
  split.validation = value.at("validation").get<std::vector<std::string>>();
  split.test = value.at("test").get<std::vector<std::string>>();
  return split;
}

}  // namespace xling::corpus
