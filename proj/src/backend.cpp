#include "xling/backend.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <map>

#include "xling/adapter.hpp"
#include "xling/errors.hpp"
#include "xling/io.hpp"
#include "xling/metrics.hpp"

namespace xling::backend {

namespace {

constexpr char kWeightsMagic[8] = {'X', 'L', 'W', 'T', '0', '0', '0', '1'};

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

std::uint64_t fnv1a64(const char* data, std::size_t size) {
  std::uint64_t h = 14695981039346656037ull;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= 1099511628211ull;
  }
  return h;
}

struct SparseDoc {
  std::vector<std::pair<std::uint32_t, double>> feats;
  double y = 0.0;
};

std::vector<SparseDoc> featurize_corpus(const corpus::Corpus& corpus, int max_tokens) {
  std::vector<SparseDoc> docs;
  docs.reserve(corpus.posts.size());
  for (const auto& post : corpus.posts) {
    SparseDoc doc;
    doc.feats = reference::featurize(post.text, static_cast<std::size_t>(max_tokens));
    doc.y = post.label == BinaryLabel::Abusive ? 1.0 : 0.0;
    docs.push_back(std::move(doc));
  }
  return docs;
}

double score_doc(const ReferenceWeights& weights, const SparseDoc& doc) {
  double z = weights.bias;
  for (const auto& [idx, value] : doc.feats) z += weights.w[idx] * value;
  return sigmoid(z);
}

double validation_macro_f1(const ReferenceWeights& weights,
                           const std::vector<SparseDoc>& val_docs) {
  std::vector<BinaryLabel> gold;
  std::vector<BinaryLabel> pred;
  gold.reserve(val_docs.size());
  pred.reserve(val_docs.size());
  for (const auto& doc : val_docs) {
    gold.push_back(doc.y == 1.0 ? BinaryLabel::Abusive : BinaryLabel::Normal);
    pred.push_back(label_from_score(score_doc(weights, doc)));
  }
  return metrics::evaluate(gold, pred).macro_f1;
}

// Full-batch logistic-regression gradient descent: fixed iteration count and
// step, no regularization. When validation docs are present the weights with
// the best (strictly improving) validation macro-F1 across the periodic
// checkpoints are kept; otherwise the final iterate is. Buckets no training
// doc touches have zero gradient, so updates only visit the active set.
ReferenceWeights run_gradient_descent(ReferenceWeights weights,
                                      const std::vector<SparseDoc>& docs,
                                      const std::vector<SparseDoc>& val_docs) {
  std::vector<std::uint32_t> active;
  {
    std::vector<char> seen(reference::kBuckets, 0);
    for (const auto& doc : docs) {
      for (const auto& [idx, value] : doc.feats) {
        if (!seen[idx]) {
          seen[idx] = 1;
          active.push_back(idx);
        }
      }
    }
    std::sort(active.begin(), active.end());
  }

  const double n = static_cast<double>(docs.size());
  std::vector<double> grad(reference::kBuckets, 0.0);

  ReferenceWeights best;
  double best_f1 = -1.0;

  for (int iter = 1; iter <= reference::kIterations; ++iter) {
    for (auto idx : active) grad[idx] = 0.0;
    double grad_bias = 0.0;
    for (const auto& doc : docs) {
      const double err = score_doc(weights, doc) - doc.y;
      for (const auto& [idx, value] : doc.feats) grad[idx] += err * value;
      grad_bias += err;
    }
    for (auto idx : active) {
      weights.w[idx] -= reference::kStep * grad[idx] / n;
    }
    weights.bias -= reference::kStep * grad_bias / n;

    if (!val_docs.empty() && iter % reference::kCheckpointEvery == 0) {
      const double f1 = validation_macro_f1(weights, val_docs);
      if (f1 > best_f1) {
        best_f1 = f1;
        best = weights;
      }
    }
  }
  return val_docs.empty() ? weights : best;
}

void require_both_labels(const corpus::Corpus& corpus, const std::string& what) {
  const auto abusive = corpus::count_label(corpus, BinaryLabel::Abusive);
  const auto normal = corpus::count_label(corpus, BinaryLabel::Normal);
  if (abusive == 0 || normal == 0) {
    throw SingleClassCorpus(what + " has " + std::to_string(abusive) + " abusive and " +
                            std::to_string(normal) + " normal posts; both classes required");
  }
}

class ReferenceBackend final : public Backend {
 public:
  BackendKind kind() const override { return BackendKind::Reference; }

  ModelHandle train(const corpus::Corpus& train_corpus, const corpus::Corpus& val_corpus,
                    const BackendConfig& config, std::uint64_t seed) override {
    config.validate();
    require_both_labels(train_corpus, "training corpus");

    ReferenceWeights init;
    init.w.assign(reference::kBuckets, 0.0);
    const auto docs = featurize_corpus(train_corpus, config.max_tokens);
    const auto val_docs = featurize_corpus(val_corpus, config.max_tokens);

    ModelHandle handle;
    handle.backend_kind = BackendKind::Reference;
    handle.weights = std::make_shared<const ReferenceWeights>(
        run_gradient_descent(std::move(init), docs, val_docs));
    handle.lineage.push_back(
        {"train", corpus::fingerprint(train_corpus), config, seed});
    return handle;
  }

  ModelHandle fine_tune(const ModelHandle& handle, const corpus::Corpus& gold,
                        const BackendConfig& config, std::uint64_t seed) override {
    config.validate();
    require_both_labels(gold, "fine-tuning corpus");
    if (!handle.weights) throw Error("model handle carries no weights");

    const auto docs = featurize_corpus(gold, config.max_tokens);

    ModelHandle next;
    next.backend_kind = BackendKind::Reference;
    next.weights = std::make_shared<const ReferenceWeights>(
        run_gradient_descent(*handle.weights, docs, {}));
    next.lineage = handle.lineage;
    next.lineage.push_back({"fine_tune", corpus::fingerprint(gold), config, seed});
    return next;
  }

  std::vector<Prediction> predict(
      const ModelHandle& handle,
      const std::vector<std::pair<std::string, std::string>>& texts) override {
    if (!handle.weights) throw Error("model handle carries no weights");
    const auto max_tokens = static_cast<std::size_t>(handle.active_config().max_tokens);
    std::vector<Prediction> predictions;
    predictions.reserve(texts.size());
    for (const auto& [post_id, text] : texts) {
      SparseDoc doc;
      doc.feats = reference::featurize(text, max_tokens);
      Prediction p;
      p.post_id = post_id;
      p.score = score_doc(*handle.weights, doc);
      p.label = label_from_score(p.score);
      predictions.push_back(std::move(p));
    }
    return predictions;
  }
};

void put_u32(std::string& out, std::uint32_t value) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((value >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t value) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((value >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double value) {
  put_u64(out, std::bit_cast<std::uint64_t>(value));
}

std::uint32_t get_u32(const std::string& data, std::size_t& pos) {
  std::uint32_t value = 0;
  for (int i = 0; i < 4; ++i) {
    value |= static_cast<std::uint32_t>(static_cast<unsigned char>(data.at(pos++))) << (8 * i);
  }
  return value;
}

std::uint64_t get_u64(const std::string& data, std::size_t& pos) {
  std::uint64_t value = 0;
  for (int i = 0; i < 8; ++i) {
    value |= static_cast<std::uint64_t>(static_cast<unsigned char>(data.at(pos++))) << (8 * i);
  }
  return value;
}

double get_f64(const std::string& data, std::size_t& pos) {
  return std::bit_cast<double>(get_u64(data, pos));
}

nlohmann::json lineage_to_json(const ModelHandle& handle) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& entry : handle.lineage) {
    entries.push_back({{"action", entry.action},
                       {"corpus_fingerprint", entry.corpus_fingerprint},
                       {"config", config_to_json(entry.config)},
                       {"seed", entry.seed}});
  }
  return {{"backend_kind", std::string(to_string(handle.backend_kind))},
          {"model_ref", handle.model_ref},
          {"lineage", entries}};
}

}  // namespace

std::string_view to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::Reference: return "reference";
    case BackendKind::TransformerAdapter: return "transformer-adapter";
  }
  throw Error("unreachable backend kind");
}

BackendKind parse_backend_kind(const std::string& text) {
  if (text == "reference") return BackendKind::Reference;
  if (text == "transformer-adapter") return BackendKind::TransformerAdapter;
  throw InvalidConfig("unknown backend kind \"" + text + "\"");
}

void BackendConfig::validate() const {
  if (epochs <= 0) throw InvalidConfig("epochs must be positive");
  if (batch_size <= 0) throw InvalidConfig("batch_size must be positive");
  if (learning_rate <= 0.0) throw InvalidConfig("learning_rate must be positive");
  if (adam_epsilon <= 0.0) throw InvalidConfig("adam_epsilon must be positive");
  if (max_tokens <= 0) throw InvalidConfig("max_tokens must be positive");
  if (max_tokens > 512) {
    throw InvalidConfig("max_tokens is capped at 512, got " + std::to_string(max_tokens));
  }
}

nlohmann::json config_to_json(const BackendConfig& config) {
  return {{"epochs", config.epochs},
          {"batch_size", config.batch_size},
          {"learning_rate", config.learning_rate},
          {"adam_epsilon", config.adam_epsilon},
          {"max_tokens", config.max_tokens},
          {"master_seed", config.master_seed}};
}

BackendConfig config_from_json(const nlohmann::json& value) {
  BackendConfig config;
  config.epochs = value.value("epochs", config.epochs);
  config.batch_size = value.value("batch_size", config.batch_size);
  config.learning_rate = value.value("learning_rate", config.learning_rate);
  config.adam_epsilon = value.value("adam_epsilon", config.adam_epsilon);
  config.max_tokens = value.value("max_tokens", config.max_tokens);
  config.master_seed = value.value("master_seed", config.master_seed);
  return config;
}

const BackendConfig& ModelHandle::active_config() const {
  if (lineage.empty()) throw Error("model handle has empty lineage");
  return lineage.back().config;
}

BinaryLabel label_from_score(double score) {
  return score > 0.5 ? BinaryLabel::Abusive : BinaryLabel::Normal;
}

std::unique_ptr<Backend> make_backend(BackendKind kind, std::string adapter_command) {
  switch (kind) {
    case BackendKind::Reference: return std::make_unique<ReferenceBackend>();
    case BackendKind::TransformerAdapter:
      return adapter::make_adapter_backend(std::move(adapter_command));
  }
  throw Error("unreachable backend kind");
}

void save_model(const ModelHandle& handle, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  io::write_file(dir / "lineage.json", lineage_to_json(handle).dump(2) + "\n");
  if (handle.backend_kind != BackendKind::Reference) return;
  if (!handle.weights) throw Error("model handle carries no weights");

  std::string blob(kWeightsMagic, sizeof kWeightsMagic);
  std::uint64_t nonzero = 0;
  for (double v : handle.weights->w) {
    if (v != 0.0) ++nonzero;
  }
  put_u64(blob, nonzero);
  for (std::size_t i = 0; i < handle.weights->w.size(); ++i) {
    if (handle.weights->w[i] != 0.0) {
      put_u32(blob, static_cast<std::uint32_t>(i));
      put_f64(blob, handle.weights->w[i]);
    }
  }
  put_f64(blob, handle.weights->bias);
  io::write_file(dir / "weights.bin", blob);
}

ModelHandle load_model(const std::filesystem::path& dir) {
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(io::read_file(dir / "lineage.json"));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error("bad lineage JSON in " + dir.string() + ": " + e.what());
  }

  ModelHandle handle;
  handle.backend_kind = parse_backend_kind(meta.at("backend_kind").get<std::string>());
  handle.model_ref = meta.value("model_ref", std::string());
  for (const auto& entry : meta.at("lineage")) {
    handle.lineage.push_back({entry.at("action").get<std::string>(),
                              entry.at("corpus_fingerprint").get<std::string>(),
                              config_from_json(entry.at("config")),
                              entry.at("seed").get<std::uint64_t>()});
  }
  if (handle.backend_kind != BackendKind::Reference) return handle;

  const std::string blob = io::read_file(dir / "weights.bin");
  if (blob.size() < sizeof kWeightsMagic ||
      std::memcmp(blob.data(), kWeightsMagic, sizeof kWeightsMagic) != 0) {
    throw Error("weights file in " + dir.string() + " has a bad header");
  }
  std::size_t pos = sizeof kWeightsMagic;
  const std::uint64_t nonzero = get_u64(blob, pos);
  ReferenceWeights weights;
  weights.w.assign(reference::kBuckets, 0.0);
  for (std::uint64_t i = 0; i < nonzero; ++i) {
    const std::uint32_t idx = get_u32(blob, pos);
    if (idx >= reference::kBuckets) {
      throw Error("weights file in " + dir.string() + " has an out-of-range index");
    }
    weights.w[idx] = get_f64(blob, pos);
  }
  weights.bias = get_f64(blob, pos);
  handle.weights = std::make_shared<const ReferenceWeights>(std::move(weights));
  return handle;
}

namespace reference {

std::string canonical_text(std::string_view text, std::size_t max_tokens) {
  std::string canonical;
  std::size_t tokens = 0;
  std::size_t i = 0;
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
  };
  while (i < text.size() && tokens < max_tokens) {
    while (i < text.size() && is_space(text[i])) ++i;
    if (i >= text.size()) break;
    if (tokens > 0) canonical.push_back(' ');
    while (i < text.size() && !is_space(text[i])) canonical.push_back(text[i++]);
    ++tokens;
  }
  return canonical;
}

std::vector<std::pair<std::uint32_t, double>> featurize(std::string_view text,
                                                        std::size_t max_tokens) {
  const std::string canonical = canonical_text(text, max_tokens);
  std::map<std::uint32_t, double> counts;
  for (std::size_t n = 1; n <= 3; ++n) {
    if (canonical.size() < n) break;
    for (std::size_t i = 0; i + n <= canonical.size(); ++i) {
      const auto bucket =
          static_cast<std::uint32_t>(fnv1a64(canonical.data() + i, n) & (kBuckets - 1));
      counts[bucket] += 1.0;
    }
  }
  double norm = 0.0;
  for (const auto& [idx, value] : counts) norm += value * value;
  norm = std::sqrt(norm);
  std::vector<std::pair<std::uint32_t, double>> feats;
  feats.reserve(counts.size());
  for (const auto& [idx, value] : counts) {
    feats.emplace_back(idx, norm == 0.0 ? 0.0 : value / norm);
  }
  return feats;
}

}  // namespace reference

}  // namespace xling::backend
