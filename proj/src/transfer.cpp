#include "xling/transfer.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "xling/errors.hpp"
#include "xling/rng.hpp"

namespace xling::transfer {

namespace {

bool shot_capable(Regime regime) {
  return regime == Regime::MTX || regime == Regime::ALLBONE || regime == Regime::IX ||
         regime == Regime::STX;
}

std::string join_sources(const std::vector<LanguageCode>& sources) {
  std::string joined;
  for (const auto source : sources) {
    if (!joined.empty()) joined.push_back('+');
    joined += to_string(source);
  }
  return joined;
}

corpus::Corpus materialize(const corpus::Corpus& corpus,
                           const std::vector<std::string>& ids) {
  corpus::Corpus out;
  out.language_type = corpus.language_type;
  out.provenance = corpus.provenance;
  out.posts = corpus::subset(corpus, ids);
  return out;
}

std::vector<LanguageCode> resolve_sources(const ExperimentPlan& plan,
                                          const Registry& registry) {
  switch (plan.regime) {
    case Regime::ELFI:
      return {};
    case Regime::JOINT: {
      if (!plan.sources.empty()) return plan.sources;
      return registry.languages();
    }
    case Regime::ALLBONE: {
      if (!plan.sources.empty()) return plan.sources;
      std::vector<LanguageCode> sources;
      for (const auto language : registry.languages()) {
        if (language != plan.target) sources.push_back(language);
      }
      return sources;
    }
    default:
      return plan.sources;
  }
}

// Gold ids behind any silver suffix, for the leakage check.
std::unordered_set<std::string> base_ids(const corpus::Corpus& corpus) {
  std::unordered_set<std::string> ids;
  for (const auto& post : corpus.posts) {
    ids.insert(translation::base_post_id(post.post_id));
  }
  return ids;
}

void check_hygiene(const std::vector<const corpus::Corpus*>& training_corpora,
                   const std::vector<std::string>& test_ids, const ExperimentPlan& plan) {
  std::unordered_set<std::string> train_ids;
  for (const auto* corpus : training_corpora) {
    const auto ids = base_ids(*corpus);
    train_ids.insert(ids.begin(), ids.end());
  }
  for (const auto& id : test_ids) {
    if (train_ids.contains(translation::base_post_id(id))) {
      throw HygieneViolation("test post \"" + id + "\" leaked into training data of cell " +
                             cell_id(plan));
    }
  }
}

struct EvaluationSet {
  corpus::Corpus corpus;           // what the model sees
  std::vector<BinaryLabel> gold;   // aligned gold labels
};

RepeatResult evaluate_on(backend::Backend& backend, const backend::ModelHandle& handle,
                         const EvaluationSet& test) {
  std::vector<std::pair<std::string, std::string>> texts;
  texts.reserve(test.corpus.posts.size());
  for (const auto& post : test.corpus.posts) texts.emplace_back(post.post_id, post.text);

  RepeatResult repeat;
  repeat.predictions = backend.predict(handle, texts);
  repeat.gold = test.gold;
  std::vector<BinaryLabel> pred;
  pred.reserve(repeat.predictions.size());
  for (const auto& p : repeat.predictions) pred.push_back(p.label);
  repeat.report = metrics::evaluate(test.gold, pred);
  repeat.lineage = handle.lineage;
  return repeat;
}

}  // namespace

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::ELFI: return "elfi";
    case Regime::JOINT: return "joint";
    case Regime::MTX: return "mtx";
    case Regime::ALLBONE: return "allbone";
    case Regime::IX: return "ix";
    case Regime::STX: return "stx";
  }
  throw Error("unreachable regime");
}

Regime parse_regime(const std::string& text) {
  for (const Regime regime : {Regime::ELFI, Regime::JOINT, Regime::MTX, Regime::ALLBONE,
                              Regime::IX, Regime::STX}) {
    if (text == to_string(regime)) return regime;
  }
  throw InvalidConfig("unknown regime \"" + text + "\"");
}

ExperimentPlan build_plan(Regime regime, LanguageCode target,
                          std::vector<LanguageCode> sources, int shots,
                          backend::BackendKind backend_kind,
                          const backend::BackendConfig& config, std::uint64_t master_seed,
                          std::string translation_provider_id) {
  config.validate();
  if (shots != 0 && shots != 32 && shots != 64) {
    throw RegimeConstraintViolation("shots must be 0, 32, or 64; got " +
                                    std::to_string(shots));
  }

  ExperimentPlan plan;
  plan.regime = regime;
  plan.target = target;
  plan.sources = std::move(sources);
  plan.shots = shots;
  plan.repeats = shots > 0 ? 3 : 1;
  plan.backend_kind = backend_kind;
  plan.config = config;
  plan.master_seed = master_seed;
  plan.translation_provider_id = std::move(translation_provider_id);

  const auto require = [&](bool ok, const std::string& message) {
    if (!ok) {
      throw RegimeConstraintViolation(std::string(to_string(regime)) + " plan for target " +
                                      std::string(to_string(target)) + ": " + message);
    }
  };

  switch (regime) {
    case Regime::ELFI:
      require(plan.sources.empty(), "sources must be empty");
      require(shots == 0, "few-shot does not apply");
      break;
    case Regime::JOINT:
      require(shots == 0, "few-shot does not apply");
      require(plan.sources.empty() ||
                  std::find(plan.sources.begin(), plan.sources.end(), target) !=
                      plan.sources.end(),
              "sources must include the target");
      break;
    case Regime::MTX:
      require(plan.sources.size() == 1, "exactly one source required");
      require(plan.sources.front() != target, "source must differ from the target");
      break;
    case Regime::ALLBONE:
      require(std::find(plan.sources.begin(), plan.sources.end(), target) ==
                  plan.sources.end(),
              "sources must exclude the target");
      break;
    case Regime::IX:
      require(plan.sources.size() == 1, "exactly one source required");
      require(plan.sources.front() != target, "source must differ from the target");
      require(is_monolingual(target), "target must be monolingual");
      require(is_monolingual(plan.sources.front()), "source must be monolingual");
      break;
    case Regime::STX:
      require(plan.sources.size() == 1, "exactly one source required");
      require(plan.sources.front() != target, "source must differ from the target");
      require(is_monolingual(target), "target must be monolingual");
      require(is_monolingual(plan.sources.front()), "source must be monolingual");
      break;
  }
  return plan;
}

std::string cell_id(const ExperimentPlan& plan) {
  std::string id(to_string(plan.regime));
  if (shot_capable(plan.regime)) id += std::to_string(plan.shots);
  id += "_";
  id += to_string(plan.target);
  if (plan.regime == Regime::MTX || plan.regime == Regime::IX ||
      plan.regime == Regime::STX) {
    id += "_from_";
    id += to_string(plan.sources.front());
  }
  return id;
}

nlohmann::json plan_to_json(const ExperimentPlan& plan) {
  nlohmann::json sources = nlohmann::json::array();
  for (const auto source : plan.sources) sources.push_back(std::string(to_string(source)));
  return {{"regime", std::string(to_string(plan.regime))},
          {"target", std::string(to_string(plan.target))},
          {"sources", sources},
          {"shots", plan.shots},
          {"repeats", plan.repeats},
          {"backend_kind", std::string(backend::to_string(plan.backend_kind))},
          {"config", backend::config_to_json(plan.config)},
          {"master_seed", plan.master_seed},
          {"translation_provider_id", plan.translation_provider_id}};
}

ExperimentPlan plan_from_json(const nlohmann::json& value) {
  std::vector<LanguageCode> sources;
  for (const auto& source : value.at("sources")) {
    sources.push_back(parse_language(source.get<std::string>()));
  }
  ExperimentPlan plan = build_plan(
      parse_regime(value.at("regime").get<std::string>()),
      parse_language(value.at("target").get<std::string>()), std::move(sources),
      value.at("shots").get<int>(),
      backend::parse_backend_kind(value.at("backend_kind").get<std::string>()),
      backend::config_from_json(value.at("config")),
      value.at("master_seed").get<std::uint64_t>(),
      value.value("translation_provider_id", std::string()));
  return plan;
}

std::vector<LanguageCode> Registry::languages() const {
  std::vector<LanguageCode> result;
  for (const auto& [language, corpus] : corpora) result.push_back(language);
  return result;
}

const corpus::Corpus& Registry::corpus_for(LanguageCode language) const {
  const auto it = corpora.find(language);
  if (it == corpora.end()) {
    throw MissingSplit("no corpus registered for " + std::string(to_string(language)));
  }
  return it->second;
}

const corpus::SplitAssignment& Registry::split_for(LanguageCode language) const {
  const auto it = splits.find(language);
  if (it == splits.end()) {
    throw MissingSplit("no split registered for " + std::string(to_string(language)));
  }
  return it->second;
}

ExperimentResult run_experiment(const ExperimentPlan& plan, const Registry& registry,
                                backend::Backend& backend,
                                translation::Translator* translator) {
  if (backend.kind() != plan.backend_kind) {
    throw InvalidConfig("plan wants backend " +
                        std::string(backend::to_string(plan.backend_kind)) + " but got " +
                        std::string(backend::to_string(backend.kind())));
  }
  const bool needs_translator = plan.regime == Regime::IX || plan.regime == Regime::STX;
  if (needs_translator && translator == nullptr) {
    throw InvalidConfig("regime " + std::string(to_string(plan.regime)) +
                        " requires a translator");
  }

  const auto sources = resolve_sources(plan, registry);
  if (plan.regime == Regime::JOINT &&
      std::find(sources.begin(), sources.end(), plan.target) == sources.end()) {
    throw RegimeConstraintViolation("joint sources must include the target");
  }

  const std::uint64_t cell_seed =
      rng::derive_all(plan.master_seed, "cell", to_string(plan.regime),
                      to_string(plan.target), join_sources(sources),
                      static_cast<std::uint64_t>(plan.shots));

  const auto& target_corpus = registry.corpus_for(plan.target);
  const auto& target_split = registry.split_for(plan.target);

  // Assemble the base training and validation corpora per regime.
  corpus::Corpus train_corpus;
  corpus::Corpus val_corpus;
  switch (plan.regime) {
    case Regime::ELFI: {
      train_corpus = materialize(target_corpus, target_split.train);
      val_corpus = materialize(target_corpus, target_split.validation);
      break;
    }
    case Regime::JOINT: {
      std::vector<corpus::Corpus> parts;
      for (const auto language : sources) {
        parts.push_back(
            materialize(registry.corpus_for(language), registry.split_for(language).train));
      }
      train_corpus = corpus::merge_corpora(parts, plan.target);
      val_corpus = materialize(target_corpus, target_split.validation);
      break;
    }
    case Regime::MTX:
    case Regime::IX: {
      const auto source = sources.front();
      const auto& source_corpus = registry.corpus_for(source);
      const auto& source_split = registry.split_for(source);
      train_corpus = materialize(source_corpus, source_split.train);
      val_corpus = materialize(source_corpus, source_split.validation);
      break;
    }
    case Regime::ALLBONE: {
      std::vector<corpus::Corpus> train_parts;
      std::vector<corpus::Corpus> val_parts;
      for (const auto language : sources) {
        const auto& corpus = registry.corpus_for(language);
        const auto& split = registry.split_for(language);
        train_parts.push_back(materialize(corpus, split.train));
        val_parts.push_back(materialize(corpus, split.validation));
      }
      train_corpus = corpus::merge_corpora(train_parts, plan.target);
      val_corpus = corpus::merge_corpora(val_parts, plan.target);
      break;
    }
    case Regime::STX: {
      const auto source = sources.front();
      const auto& source_corpus = registry.corpus_for(source);
      const auto& source_split = registry.split_for(source);
      train_corpus = translator->translate_corpus(
          materialize(source_corpus, source_split.train), source, plan.target);
      val_corpus = translator->translate_corpus(
          materialize(source_corpus, source_split.validation), source, plan.target);
      break;
    }
  }

  // The evaluation set is always the target's gold test split; IX swaps in
  // translated copies of the same posts.
  EvaluationSet test;
  test.corpus = materialize(target_corpus, target_split.test);
  for (const auto& post : test.corpus.posts) test.gold.push_back(post.label);
  if (plan.regime == Regime::IX) {
    test.corpus = translator->translate_corpus(test.corpus, plan.target, sources.front());
  }

  ExperimentResult result;
  result.plan = plan;
  result.plan.sources = sources;

  const auto base_model = backend.train(train_corpus, val_corpus, plan.config,
                                        rng::derive(cell_seed, "train"));

  std::vector<std::string> test_ids;
  for (const auto& post : test.corpus.posts) test_ids.push_back(post.post_id);

  if (plan.shots == 0) {
    check_hygiene({&train_corpus, &val_corpus}, test_ids, plan);
    result.per_repeat.push_back(evaluate_on(backend, base_model, test));
  } else {
    for (int repeat = 0; repeat < plan.repeats; ++repeat) {
      const auto few = corpus::sample_few_shot(target_split, target_corpus,
                                               static_cast<std::size_t>(plan.shots),
                                               repeat, cell_seed);
      corpus::Corpus gold_corpus = materialize(target_corpus, few.post_ids);
      if (plan.regime == Regime::IX) {
        gold_corpus =
            translator->translate_corpus(gold_corpus, plan.target, sources.front());
      }
      check_hygiene({&train_corpus, &val_corpus, &gold_corpus}, test_ids, plan);
      const auto tuned =
          backend.fine_tune(base_model, gold_corpus, plan.config,
                            rng::derive_all(cell_seed, "repeat", repeat));
      result.per_repeat.push_back(evaluate_on(backend, tuned, test));
    }
  }

  std::vector<metrics::MetricsReport> reports;
  for (const auto& repeat : result.per_repeat) reports.push_back(repeat.report);
  result.mean_report = metrics::aggregate(reports);
  return result;
}

std::vector<ExperimentPlan> full_grid(const std::vector<LanguageCode>& available,
                                      const GridOptions& options) {
  const std::vector<LanguageCode> targets =
      options.targets.empty() ? available : options.targets;

  std::vector<int> shots_list = options.shots_list;
  if (shots_list.empty()) shots_list = {0};

  std::vector<ExperimentPlan> plans;
  std::set<std::string> seen;
  const auto add = [&](ExperimentPlan plan) {
    if (seen.insert(cell_id(plan)).second) plans.push_back(std::move(plan));
  };

  std::vector<LanguageCode> monolingual;
  for (const auto language : available) {
    if (is_monolingual(language)) monolingual.push_back(language);
  }

  for (const auto regime : options.regimes) {
    for (const auto target : targets) {
      switch (regime) {
        case Regime::ELFI:
          add(build_plan(Regime::ELFI, target, {}, 0, options.backend_kind,
                         options.config, options.master_seed));
          break;
        case Regime::JOINT:
          add(build_plan(Regime::JOINT, target, available, 0, options.backend_kind,
                         options.config, options.master_seed));
          break;
        case Regime::MTX:
          for (const auto source : available) {
            if (source == target) continue;
            for (const int shots : shots_list) {
              add(build_plan(Regime::MTX, target, {source}, shots, options.backend_kind,
                             options.config, options.master_seed));
            }
          }
          break;
        case Regime::ALLBONE: {
          std::vector<LanguageCode> complement;
          for (const auto language : available) {
            if (language != target) complement.push_back(language);
          }
          if (complement.empty()) break;
          for (const int shots : shots_list) {
            add(build_plan(Regime::ALLBONE, target, complement, shots,
                           options.backend_kind, options.config, options.master_seed));
          }
          break;
        }
        case Regime::IX:
          if (!is_monolingual(target) || target == LanguageCode::En) break;
          for (const auto source : monolingual) {
            if (source == target) continue;
            for (const int shots : shots_list) {
              add(build_plan(Regime::IX, target, {source}, shots, options.backend_kind,
                             options.config, options.master_seed,
                             options.translation_provider_id));
            }
          }
          break;
        case Regime::STX:
          if (!is_monolingual(target) || target == options.stx_source) break;
          if (std::find(monolingual.begin(), monolingual.end(), options.stx_source) ==
              monolingual.end()) {
            break;
          }
          for (const int shots : shots_list) {
            add(build_plan(Regime::STX, target, {options.stx_source}, shots,
                           options.backend_kind, options.config, options.master_seed,
                           options.translation_provider_id));
          }
          break;
      }
    }
  }
  return plans;
}

}  // namespace xling::transfer
