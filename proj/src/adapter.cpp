#include "xling/adapter.hpp"

#include <atomic>
#include <cstdlib>
#include <filesystem>

#include "xling/errors.hpp"
#include "xling/io.hpp"
#include "vendor/json.hpp"

namespace xling::adapter {

namespace {

namespace fs = std::filesystem;
using backend::Backend;
using backend::BackendConfig;
using backend::BackendKind;
using backend::ModelHandle;
using backend::Prediction;

std::atomic<std::uint64_t> g_call_counter{0};

nlohmann::json posts_to_json(const corpus::Corpus& corpus) {
  nlohmann::json posts = nlohmann::json::array();
  for (const auto& post : corpus.posts) {
    posts.push_back({{"post_id", post.post_id},
                     {"text", post.text},
                     {"label", std::string(to_string(post.label))},
                     {"language_type", std::string(to_string(post.language_type))}});
  }
  return posts;
}

nlohmann::json config_with_seed(const BackendConfig& config, std::uint64_t seed) {
  nlohmann::json value = backend::config_to_json(config);
  value["seed"] = seed;
  return value;
}

void require_both_labels(const corpus::Corpus& corpus, const std::string& what) {
  const auto abusive = corpus::count_label(corpus, BinaryLabel::Abusive);
  const auto normal = corpus::count_label(corpus, BinaryLabel::Normal);
  if (abusive == 0 || normal == 0) {
    throw SingleClassCorpus(what + " has " + std::to_string(abusive) + " abusive and " +
                            std::to_string(normal) + " normal posts; both classes required");
  }
}

class SubprocessBackend final : public Backend {
 public:
  explicit SubprocessBackend(std::string command) : command_(std::move(command)) {}

  BackendKind kind() const override { return BackendKind::TransformerAdapter; }

  ModelHandle train(const corpus::Corpus& train_corpus, const corpus::Corpus& val_corpus,
                    const BackendConfig& config, std::uint64_t seed) override {
    config.validate();
    require_both_labels(train_corpus, "training corpus");
    nlohmann::json request = {{"action", "train"},
                              {"config", config_with_seed(config, seed)},
                              {"train", posts_to_json(train_corpus)},
                              {"validation", posts_to_json(val_corpus)}};
    const nlohmann::json response = invoke(request);

    ModelHandle handle;
    handle.backend_kind = BackendKind::TransformerAdapter;
    handle.model_ref = response.at("model_ref").get<std::string>();
    handle.lineage.push_back({"train", corpus::fingerprint(train_corpus), config, seed});
    return handle;
  }

  ModelHandle fine_tune(const ModelHandle& handle, const corpus::Corpus& gold,
                        const BackendConfig& config, std::uint64_t seed) override {
    config.validate();
    require_both_labels(gold, "fine-tuning corpus");
    nlohmann::json request = {{"action", "fine_tune"},
                              {"config", config_with_seed(config, seed)},
                              {"model_ref", handle.model_ref},
                              {"gold", posts_to_json(gold)}};
    const nlohmann::json response = invoke(request);

    ModelHandle next;
    next.backend_kind = BackendKind::TransformerAdapter;
    next.model_ref = response.at("model_ref").get<std::string>();
    next.lineage = handle.lineage;
    next.lineage.push_back({"fine_tune", corpus::fingerprint(gold), config, seed});
    return next;
  }

  std::vector<Prediction> predict(
      const ModelHandle& handle,
      const std::vector<std::pair<std::string, std::string>>& texts) override {
    nlohmann::json items = nlohmann::json::array();
    for (const auto& [post_id, text] : texts) {
      items.push_back({{"post_id", post_id}, {"text", text}});
    }
    nlohmann::json request = {{"action", "predict"},
                              {"model_ref", handle.model_ref},
                              {"max_tokens", handle.active_config().max_tokens},
                              {"texts", items}};
    const nlohmann::json response = invoke(request);

    std::vector<Prediction> predictions;
    for (const auto& row : response.at("predictions")) {
      Prediction p;
      p.post_id = row.at("post_id").get<std::string>();
      p.score = row.at("score").get<double>();
      p.label = parse_label(row.at("label").get<std::string>());
      predictions.push_back(std::move(p));
    }
    if (predictions.size() != texts.size()) {
      throw LengthMismatch("adapter returned " + std::to_string(predictions.size()) +
                           " predictions for " + std::to_string(texts.size()) + " texts");
    }
    return predictions;
  }

 private:
  nlohmann::json invoke(const nlohmann::json& request) {
    const std::uint64_t call = g_call_counter.fetch_add(1);
    const fs::path dir = fs::temp_directory_path();
    const fs::path request_file =
        dir / ("xling-adapter-req-" + std::to_string(call) + ".json");
    const fs::path response_file =
        dir / ("xling-adapter-resp-" + std::to_string(call) + ".json");

    io::write_file(request_file, request.dump());
    const std::string cmd =
        command_ + " '" + request_file.string() + "' '" + response_file.string() + "'";
    const int rc = std::system(cmd.c_str());
    if (rc != 0) {
      fs::remove(request_file);
      throw BackendUnavailable("adapter command exited with status " + std::to_string(rc) +
                               ": " + command_);
    }
    nlohmann::json response;
    try {
      response = nlohmann::json::parse(io::read_file(response_file));
    } catch (const Error&) {
      throw BackendUnavailable("adapter wrote no response file: " + command_);
    } catch (const nlohmann::json::parse_error& e) {
      throw BackendUnavailable("adapter response is not valid JSON: " + std::string(e.what()));
    }
    fs::remove(request_file);
    fs::remove(response_file);
    return response;
  }

  std::string command_;
};

}  // namespace

std::unique_ptr<backend::Backend> make_adapter_backend(std::string command) {
  if (io::trim(command).empty()) {
    throw BackendUnavailable("no adapter command configured for the transformer backend");
  }
  return std::make_unique<SubprocessBackend>(std::move(command));
}

}  // namespace xling::adapter
