#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "xling/corpus.hpp"
#include "xling/types.hpp"
#include "vendor/json.hpp"

namespace xling::backend {

enum class BackendKind { Reference, TransformerAdapter };

std::string_view to_string(BackendKind kind);
BackendKind parse_backend_kind(const std::string& text);

struct BackendConfig {
  int epochs = 10;
  int batch_size = 16;
  double learning_rate = 2e-5;
  double adam_epsilon = 1e-8;
  int max_tokens = 128;  // hard cap 512
  std::uint64_t master_seed = 0;

  void validate() const;
};

nlohmann::json config_to_json(const BackendConfig& config);
BackendConfig config_from_json(const nlohmann::json& value);

struct LineageEntry {
  std::string action;  // "train" or "fine_tune"
  std::string corpus_fingerprint;
  BackendConfig config;
  std::uint64_t seed = 0;
};

struct ReferenceWeights {
  std::vector<double> w;
  double bias = 0.0;
};

struct ModelHandle {
  BackendKind backend_kind = BackendKind::Reference;
  std::vector<LineageEntry> lineage;
  std::shared_ptr<const ReferenceWeights> weights;  // reference backend only
  std::string model_ref;                            // adapter backend only

  const BackendConfig& active_config() const;
};

struct Prediction {
  std::string post_id;
  BinaryLabel label = BinaryLabel::Normal;
  double score = 0.0;  // probability of abusive
};

// Abusive strictly above 0.5; an exact 0.5 goes to normal.
BinaryLabel label_from_score(double score);

class Backend {
 public:
  virtual ~Backend() = default;
  virtual BackendKind kind() const = 0;
  virtual ModelHandle train(const corpus::Corpus& train_corpus,
                            const corpus::Corpus& val_corpus,
                            const BackendConfig& config, std::uint64_t seed) = 0;
  virtual ModelHandle fine_tune(const ModelHandle& handle, const corpus::Corpus& gold,
                                const BackendConfig& config, std::uint64_t seed) = 0;
  virtual std::vector<Prediction> predict(
      const ModelHandle& handle,
      const std::vector<std::pair<std::string, std::string>>& texts) = 0;
};

// adapter_command is required for the transformer adapter; it is invoked as
// `<command> <request.json> <response.json>`.
std::unique_ptr<Backend> make_backend(BackendKind kind, std::string adapter_command = "");

void save_model(const ModelHandle& handle, const std::filesystem::path& dir);
ModelHandle load_model(const std::filesystem::path& dir);

// Reference featurization, exposed so tests can pin it down.
namespace reference {

inline constexpr std::size_t kBuckets = std::size_t{1} << 18;
inline constexpr int kIterations = 200;
inline constexpr double kStep = 0.5;
inline constexpr int kCheckpointEvery = 20;

// ASCII-whitespace tokens, first max_tokens of them, joined by single spaces.
std::string canonical_text(std::string_view text, std::size_t max_tokens);

// L2-normalized counts of hashed byte n-grams (n = 1..3) of the canonical text.
std::vector<std::pair<std::uint32_t, double>> featurize(std::string_view text,
                                                        std::size_t max_tokens);

}  // namespace reference

}  // namespace xling::backend
