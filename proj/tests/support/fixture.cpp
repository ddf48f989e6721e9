#include "tests/support/fixture.hpp"

#include <array>
#include <cstdlib>
#include <map>

#include "xling/io.hpp"
#include "xling/rng.hpp"

namespace fixture {

namespace {

using xling::BinaryLabel;
using xling::LanguageCode;

constexpr int kWordsPerPost = 11;
constexpr int kFillerCount = 20;

const std::array<const char*, 2> kSharedMarkers = {"qj", "zx"};

std::string filler_prefix(LanguageCode language) {
  switch (language) {
    case LanguageCode::Bn: return "dbn";
    case LanguageCode::En: return "den";
    case LanguageCode::Hi: return "dhi";
    default: break;
  }
  throw std::logic_error("fixture has no vocabulary for this language");
}

// Marker alphabets are disjoint across languages so that a model trained on
// one language learns no word-boundary evidence for another language's
// abusive vocabulary. Shared markers below are the only transferable signal.
std::array<std::string, 2> markers(LanguageCode language) {
  switch (language) {
    case LanguageCode::Bn: return {"uf", "fu"};
    case LanguageCode::En: return {"wk", "kw"};
    case LanguageCode::Hi: return {"yp", "py"};
    default: break;
  }
  throw std::logic_error("fixture has no markers for this language");
}

// Normal-only single-character words built from the marker alphabet. They
// make isolated marker characters class-neutral, so only intact marker words
// separate the classes.
std::array<std::string, 2> decoys(LanguageCode language) {
  const auto own = markers(language);
  return {std::string(1, own[0][0]), std::string(1, own[0][1])};
}

std::string filler(LanguageCode language, std::uint64_t index) {
  return filler_prefix(language) + static_cast<char>('a' + index % kFillerCount);
}

// Normal-only words carrying every marker bigram word-internally.
std::vector<std::string> camouflage_words() {
  std::vector<std::string> words;
  for (const auto* marker : kSharedMarkers) words.push_back("a" + std::string(marker) + "o");
  for (const auto language : languages()) {
    for (const auto& marker : markers(language)) words.push_back("a" + marker + "o");
  }
  return words;
}

std::string join(const std::vector<std::string>& words) {
  std::string text;
  for (const auto& word : words) {
    if (!text.empty()) text += ' ';
    text += word;
  }
  return text;
}

std::string make_text(LanguageCode language, BinaryLabel label, std::size_t index) {
  xling::rng::SplitMix64 gen(xling::rng::derive_all(
      kMasterSeed, "fixture", to_string(language), to_string(label), index));
  std::vector<std::string> words;
  words.reserve(kWordsPerPost);
  for (int i = 0; i < kWordsPerPost; ++i) {
    words.push_back(filler(language, gen.next_below(kFillerCount)));
  }
  if (label == BinaryLabel::Abusive) {
    const auto own = markers(language);
    words[2] = own[0];
    words[4] = own[1];
    if (index % 2 == 0) {
      words[6] = kSharedMarkers[0];
      words[8] = kSharedMarkers[1];
    }
  } else {
    static const std::vector<std::string> camouflage = camouflage_words();
    const auto neutral = decoys(language);
    words[3] = camouflage[gen.next_below(camouflage.size())];
    words[7] = camouflage[gen.next_below(camouflage.size())];
    words[5] = neutral[0];
    words[9] = neutral[1];
  }
  return join(words);
}

}  // namespace

std::vector<LanguageCode> languages() {
  return {LanguageCode::Bn, LanguageCode::En, LanguageCode::Hi};
}

std::string dataset_id(LanguageCode language) {
  return "fix-" + std::string(to_string(language));
}

xling::corpus::Corpus make_corpus(LanguageCode language, std::size_t per_class) {
  xling::corpus::Corpus corpus;
  corpus.language_type = language;
  corpus.provenance.push_back(dataset_id(language));
  std::size_t ordinal = 0;
  for (const BinaryLabel label : {BinaryLabel::Abusive, BinaryLabel::Normal}) {
    for (std::size_t i = 0; i < per_class; ++i) {
      xling::corpus::Post post;
      post.post_id = dataset_id(language) + ":" + std::to_string(++ordinal);
      post.text = make_text(language, label, i);
      post.label = label;
      post.language_type = language;
      post.dataset_id = dataset_id(language);
      corpus.posts.push_back(std::move(post));
    }
  }
  return corpus;
}

nlohmann::json dictionary_tables() {
  nlohmann::json tables = nlohmann::json::object();
  for (const auto src : languages()) {
    for (const auto tgt : languages()) {
      if (src == tgt) continue;
      nlohmann::json table = nlohmann::json::object();
      for (int i = 0; i < kFillerCount; ++i) {
        table[filler(src, i)] = filler(tgt, i);
      }
      const auto from = markers(src);
      const auto to = markers(tgt);
      table[from[0]] = to[0];
      table[from[1]] = to[1];
      const auto from_decoys = decoys(src);
      const auto to_decoys = decoys(tgt);
      table[from_decoys[0]] = to_decoys[0];
      table[from_decoys[1]] = to_decoys[1];
      tables[std::string(to_string(src)) + "->" + std::string(to_string(tgt))] = table;
    }
  }
  return tables;
}

Registry write_registry(const std::filesystem::path& dir, std::size_t per_class) {
  namespace fs = std::filesystem;
  Registry registry;
  registry.root = dir;
  fs::create_directories(dir);

  for (const auto language : languages()) {
    const auto corpus = make_corpus(language, per_class);
    std::string data;
    for (const auto& post : corpus.posts) {
      const nlohmann::json row = {
          {"text", post.text},
          {"label", post.label == BinaryLabel::Abusive ? "off" : "not"}};
      data += row.dump() + "\n";
    }
    const std::string name(to_string(language));
    xling::io::write_file(dir / "data" / (name + ".jsonl"), data);

    xling::corpus::DatasetDescriptor descriptor;
    descriptor.dataset_id = dataset_id(language);
    descriptor.language_type = language;
    descriptor.format = "jsonl";
    descriptor.data_path = "../data/" + name + ".jsonl";
    descriptor.text_field = "text";
    descriptor.label_field = "label";
    descriptor.raw_label_map = {
        {"off", xling::corpus::MappedLabel::Abusive},
        {"not", xling::corpus::MappedLabel::Normal}};
    descriptor.expected_counts =
        xling::corpus::ExpectedCounts{per_class, per_class};
    const auto descriptor_path = dir / "descriptors" / (name + ".json");
    xling::io::write_file(descriptor_path,
                          xling::corpus::descriptor_to_json(descriptor).dump(2) + "\n");
    registry.descriptors.push_back(descriptor_path);
  }

  registry.dictionary = dir / "dictionary.json";
  xling::io::write_file(registry.dictionary, dictionary_tables().dump(2) + "\n");

  nlohmann::json descriptor_list = nlohmann::json::array();
  for (const auto language : languages()) {
    descriptor_list.push_back("descriptors/" + std::string(to_string(language)) + ".json");
  }
  const nlohmann::json manifest = {
      {"manifest_version", 1},
      {"master_seed", kMasterSeed},
      {"registry", {{"descriptors", descriptor_list}}},
      {"backend", {{"kind", "reference"}}},
      {"translation",
       {{"provider", "dictionary"},
        {"dictionary_path", "dictionary.json"},
        {"cache_path", "cache/translation_cache.jsonl"},
        {"mode", "live"}}},
      {"plans",
       nlohmann::json::array(
           {{{"grid", {{"regimes", nlohmann::json::array({"elfi", "joint"})}}}},
            {{"grid",
              {{"regimes", nlohmann::json::array({"mtx", "allbone", "ix", "stx"})},
               {"shots", nlohmann::json::array({0, 32, 64})},
               {"stx_source", "En"}}}}})},
      {"attacks", {{"rates", nlohmann::json::array({0, 25, 50, 75, 100})}}}};
  registry.manifest = dir / "manifest.json";
  xling::io::write_file(registry.manifest, manifest.dump(2) + "\n");
  return registry;
}

std::string xling_binary() {
  if (const char* env = std::getenv("XLING_BIN"); env && *env) return env;
  return "";
}

std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "xling-tests" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fixture
