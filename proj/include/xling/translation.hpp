#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "xling/corpus.hpp"
#include "xling/types.hpp"

namespace xling::translation {

enum class Mode { Live, Offline };

std::string_view to_string(Mode mode);
Mode parse_mode(const std::string& text);

struct TranslationRequest {
  std::string text;
  LanguageCode src = LanguageCode::En;
  LanguageCode tgt = LanguageCode::En;
  std::string provider_id;
};

std::string cache_key(const TranslationRequest& request);

class Provider {
 public:
  virtual ~Provider() = default;
  virtual std::string id() const = 0;
  virtual std::string translate(const std::string& text, LanguageCode src,
                                LanguageCode tgt) = 0;
};

std::unique_ptr<Provider> make_identity_provider();

// Word-by-word lookup; unknown words pass through unchanged. The table file
// maps "<Src>-><Tgt>" to {word: translation}.
std::unique_ptr<Provider> make_dictionary_provider(const std::filesystem::path& table_file);

// Append-only JSONL store. Every entry's key is re-checked against its
// inputs when the file is loaded.
class Cache {
 public:
  explicit Cache(std::filesystem::path file);

  std::optional<std::string> lookup(const std::string& key) const;
  void put(const TranslationRequest& request, const std::string& translation);
  std::size_t size() const;

 private:
  std::filesystem::path file_;
  std::unordered_map<std::string, std::string> entries_;
  mutable std::mutex mutex_;
};

class Translator {
 public:
  Translator(std::shared_ptr<Provider> provider, std::shared_ptr<Cache> cache, Mode mode,
             int retry_delay_ms = 50);

  std::vector<std::string> translate_batch(const std::vector<TranslationRequest>& requests);

  // Silver copy: same label and order, ids suffixed "::silver-<Tgt>",
  // result typed tgt, provenance extended with a silver marker.
  corpus::Corpus translate_corpus(const corpus::Corpus& corpus, LanguageCode src,
                                  LanguageCode tgt);

  Mode mode() const { return mode_; }
  const std::string& provider_id() const { return provider_id_; }

 private:
  std::string translate_one(const TranslationRequest& request);

  std::shared_ptr<Provider> provider_;
  std::shared_ptr<Cache> cache_;
  Mode mode_;
  int retry_delay_ms_;
  std::string provider_id_;
};

// Strips a trailing "::silver-…" marker, returning the gold post id.
std::string base_post_id(const std::string& post_id);

}  // namespace xling::translation
