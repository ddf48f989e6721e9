#include "xling/translation.hpp"

#include <chrono>
#include <thread>

#include "xling/digest.hpp"
#include "xling/errors.hpp"
#include "xling/io.hpp"
#include "vendor/json.hpp"

namespace xling::translation {

namespace {

constexpr char kSilverMarker[] = "::silver-";
constexpr int kMaxAttempts = 3;

class IdentityProvider final : public Provider {
 public:
  std::string id() const override { return "identity"; }
  std::string translate(const std::string& text, LanguageCode, LanguageCode) override {
    return text;
  }
};

class DictionaryProvider final : public Provider {
 public:
  explicit DictionaryProvider(const std::filesystem::path& table_file) {
    nlohmann::json table;
    try {
      table = nlohmann::json::parse(io::read_file(table_file));
    } catch (const nlohmann::json::parse_error& e) {
      throw ManifestError("bad dictionary JSON " + table_file.string() + ": " + e.what());
    }
    for (const auto& [pair, words] : table.items()) {
      for (const auto& [word, translated] : words.items()) {
        tables_[pair][word] = translated.get<std::string>();
      }
    }
  }

  std::string id() const override { return "dictionary"; }

  std::string translate(const std::string& text, LanguageCode src,
                        LanguageCode tgt) override {
    const std::string pair =
        std::string(to_string(src)) + "->" + std::string(to_string(tgt));
    const auto table = tables_.find(pair);
    std::string out;
    bool first = true;
    for (const auto& word : split_words(text)) {
      if (!first) out.push_back(' ');
      first = false;
      if (table != tables_.end()) {
        const auto hit = table->second.find(word);
        out += hit != table->second.end() ? hit->second : word;
      } else {
        out += word;
      }
    }
    return out;
  }

 private:
  static std::vector<std::string> split_words(const std::string& text) {
    std::vector<std::string> words;
    std::string current;
    const auto is_space = [](char c) {
      return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
    };
    for (char c : text) {
      if (is_space(c)) {
        if (!current.empty()) words.push_back(std::move(current));
        current.clear();
      } else {
        current.push_back(c);
      }
    }
    if (!current.empty()) words.push_back(std::move(current));
    return words;
  }

  std::map<std::string, std::unordered_map<std::string, std::string>> tables_;
};

void check_request(const TranslationRequest& request) {
  if (request.src == request.tgt) {
    throw InvalidConfig("translation source and target are both " +
                        std::string(to_string(request.src)));
  }
  if (!is_monolingual(request.src) || !is_monolingual(request.tgt)) {
    throw InvalidConfig("translation requires monolingual types, got " +
                        std::string(to_string(request.src)) + " -> " +
                        std::string(to_string(request.tgt)));
  }
}

}  // namespace

std::string_view to_string(Mode mode) {
  return mode == Mode::Live ? "live" : "offline";
}

Mode parse_mode(const std::string& text) {
  if (text == "live") return Mode::Live;
  if (text == "offline") return Mode::Offline;
  throw InvalidConfig("unknown translation mode \"" + text + "\" (expected live or offline)");
}

std::string cache_key(const TranslationRequest& request) {
  std::string blob = request.provider_id;
  blob.push_back('\x1f');
  blob += to_string(request.src);
  blob.push_back('\x1f');
  blob += to_string(request.tgt);
  blob.push_back('\x1f');
  blob += request.text;
  return digest::sha256_hex(blob);
}

std::unique_ptr<Provider> make_identity_provider() {
  return std::make_unique<IdentityProvider>();
}

std::unique_ptr<Provider> make_dictionary_provider(const std::filesystem::path& table_file) {
  return std::make_unique<DictionaryProvider>(table_file);
}

Cache::Cache(std::filesystem::path file) : file_(std::move(file)) {
  if (!std::filesystem::exists(file_)) return;
  for (const auto& line : io::read_lines(file_)) {
    if (io::trim(line).empty()) continue;
    nlohmann::json entry;
    try {
      entry = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error("bad cache line in " + file_.string() + ": " + e.what());
    }
    TranslationRequest request;
    request.provider_id = entry.at("provider_id").get<std::string>();
    request.src = parse_language(entry.at("src").get<std::string>());
    request.tgt = parse_language(entry.at("tgt").get<std::string>());
    request.text = entry.at("text").get<std::string>();
    const auto key = entry.at("key").get<std::string>();
    if (cache_key(request) != key) {
      throw Error("cache entry key mismatch in " + file_.string() +
                  "; the file has been tampered with or corrupted");
    }
    entries_[key] = entry.at("translation").get<std::string>();
  }
}

std::optional<std::string> Cache::lookup(const std::string& key) const {
  std::lock_guard lock(mutex_);
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void Cache::put(const TranslationRequest& request, const std::string& translation) {
  const std::string key = cache_key(request);
  std::lock_guard lock(mutex_);
  if (entries_.contains(key)) return;
  entries_[key] = translation;
  const nlohmann::json entry = {
      {"key", key},
      {"provider_id", request.provider_id},
      {"src", std::string(to_string(request.src))},
      {"tgt", std::string(to_string(request.tgt))},
      {"text", request.text},
      {"translation", translation},
      {"created_at",
       std::chrono::duration_cast<std::chrono::seconds>(
           std::chrono::system_clock::now().time_since_epoch())
           .count()}};
  io::append_line(file_, entry.dump());
}

std::size_t Cache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

Translator::Translator(std::shared_ptr<Provider> provider, std::shared_ptr<Cache> cache,
                       Mode mode, int retry_delay_ms)
    : provider_(std::move(provider)),
      cache_(std::move(cache)),
      mode_(mode),
      retry_delay_ms_(retry_delay_ms),
      provider_id_(provider_ ? provider_->id() : "") {
  if (!provider_ && mode_ == Mode::Live) {
    throw InvalidConfig("live translation mode requires a provider");
  }
  if (!cache_) throw InvalidConfig("translator requires a cache");
}

std::string Translator::translate_one(const TranslationRequest& request) {
  const std::string key = cache_key(request);
  if (const auto hit = cache_->lookup(key)) return *hit;
  if (mode_ == Mode::Offline) {
    throw CacheMiss("offline translation miss for " + std::string(to_string(request.src)) +
                    "->" + std::string(to_string(request.tgt)) + " text \"" + request.text +
                    "\"");
  }

  std::string last_error;
  for (int attempt = 1; attempt <= kMaxAttempts; ++attempt) {
    try {
      const std::string translation =
          provider_->translate(request.text, request.src, request.tgt);
      cache_->put(request, translation);
      return translation;
    } catch (const std::exception& e) {
      last_error = e.what();
      if (attempt < kMaxAttempts) {
        std::this_thread::sleep_for(
            std::chrono::milliseconds(retry_delay_ms_ * (1 << (attempt - 1))));
      }
    }
  }
  throw ProviderFailure("provider " + provider_id_ + " failed after " +
                        std::to_string(kMaxAttempts) + " attempts: " + last_error);
}

std::vector<std::string> Translator::translate_batch(
    const std::vector<TranslationRequest>& requests) {
  std::vector<std::string> out;
  out.reserve(requests.size());
  for (const auto& request : requests) {
    check_request(request);
    out.push_back(translate_one(request));
  }
  return out;
}

corpus::Corpus Translator::translate_corpus(const corpus::Corpus& corpus, LanguageCode src,
                                            LanguageCode tgt) {
  std::vector<TranslationRequest> requests;
  requests.reserve(corpus.posts.size());
  for (const auto& post : corpus.posts) {
    requests.push_back({post.text, src, tgt, provider_id_});
  }
  const auto translations = translate_batch(requests);

  corpus::Corpus silver;
  silver.language_type = tgt;
  silver.provenance = corpus.provenance;
  silver.provenance.push_back("silver:" + std::string(to_string(src)) + "->" +
                              std::string(to_string(tgt)) + ":" + provider_id_);
  silver.posts.reserve(corpus.posts.size());
  for (std::size_t i = 0; i < corpus.posts.size(); ++i) {
    corpus::Post post = corpus.posts[i];
    post.post_id += kSilverMarker + std::string(to_string(tgt));
    post.text = translations[i];
    post.language_type = tgt;
    silver.posts.push_back(std::move(post));
  }
  return silver;
}

std::string base_post_id(const std::string& post_id) {
  const auto pos = post_id.find(kSilverMarker);
  return pos == std::string::npos ? post_id : post_id.substr(0, pos);
}

}  // namespace xling::translation
