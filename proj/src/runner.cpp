#include "xling/runner.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "xling/adapter.hpp"
#include "xling/attack.hpp"
#include "xling/digest.hpp"
#include "xling/errors.hpp"
#include "xling/io.hpp"
#include "xling/reporting.hpp"
#include "xling/rng.hpp"

namespace xling::runner {

namespace {

namespace fs = std::filesystem;

std::unique_ptr<backend::Backend> make_backend_for(const manifest::RunManifest& manifest) {
  return backend::make_backend(manifest.backend.kind, manifest.backend.adapter_command);
}

std::shared_ptr<translation::Provider> make_provider(
    const manifest::TranslationSettings& settings) {
  if (settings.provider == "identity") return translation::make_identity_provider();
  return translation::make_dictionary_provider(settings.dictionary_path);
}

bool matches_only(const std::string& cell_id, const std::vector<std::string>& only) {
  if (only.empty()) return true;
  return std::any_of(only.begin(), only.end(), [&](const std::string& prefix) {
    return cell_id.rfind(prefix, 0) == 0;
  });
}

bool needs_translation(const transfer::ExperimentPlan& plan) {
  return plan.regime == transfer::Regime::IX || plan.regime == transfer::Regime::STX;
}

std::vector<reporting::AttackSeriesRow> load_sweeps(const fs::path& run_root) {
  std::vector<reporting::AttackSeriesRow> rows;
  const fs::path attacks_dir = run_root / "attacks";
  if (!fs::exists(attacks_dir)) return rows;
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(attacks_dir)) {
    if (entry.is_directory() && fs::exists(entry.path() / "sweep.json")) {
      dirs.push_back(entry.path());
    }
  }
  std::sort(dirs.begin(), dirs.end());
  for (const auto& dir : dirs) {
    const auto sweep = nlohmann::json::parse(io::read_file(dir / "sweep.json"));
    for (const auto& row : sweep) {
      reporting::AttackSeriesRow series;
      series.language = dir.filename().string();
      series.kind = attack::parse_attack_kind(row.at("kind").get<std::string>());
      series.rate = row.at("rate").get<double>();
      series.report.accuracy = row.at("accuracy").get<double>();
      series.report.macro_f1 = row.at("macro_f1").get<double>();
      rows.push_back(std::move(series));
    }
  }
  return rows;
}

corpus::Corpus materialize(const corpus::Corpus& corpus,
                           const std::vector<std::string>& ids) {
  corpus::Corpus out;
  out.language_type = corpus.language_type;
  out.provenance = corpus.provenance;
  out.posts = corpus::subset(corpus, ids);
  return out;
}

std::string sweep_csv(const std::vector<attack::SweepRow>& rows) {
  std::string csv = "kind,rate,accuracy,macro_f1\n";
  for (const auto& row : rows) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s,%g,%.6f,%.6f\n",
                  std::string(attack::to_string(row.kind)).c_str(), row.rate,
                  row.report.accuracy, row.report.macro_f1);
    csv += buf;
  }
  return csv;
}

nlohmann::json sweep_json(const std::vector<attack::SweepRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& row : rows) {
    out.push_back({{"kind", std::string(attack::to_string(row.kind))},
                   {"rate", row.rate},
                   {"accuracy", row.report.accuracy},
                   {"macro_f1", row.report.macro_f1}});
  }
  return out;
}

}  // namespace

transfer::Registry build_registry(const manifest::RunManifest& manifest,
                                  std::uint64_t master_seed) {
  std::map<LanguageCode, std::vector<corpus::DatasetDescriptor>> by_language;
  std::set<std::string> dataset_ids;
  for (const auto& path : manifest.descriptor_paths) {
    auto descriptor = corpus::load_descriptor(path);
    if (!dataset_ids.insert(descriptor.dataset_id).second) {
      throw ManifestError("dataset id \"" + descriptor.dataset_id +
                          "\" appears in two descriptors");
    }
    if (descriptor.data_path.empty()) {
      throw ManifestError("descriptor " + path.string() + " lacks data_path");
    }
    by_language[descriptor.language_type].push_back(std::move(descriptor));
  }

  transfer::Registry registry;
  for (auto& [language, descriptors] : by_language) {
    std::sort(descriptors.begin(), descriptors.end(),
              [](const corpus::DatasetDescriptor& a, const corpus::DatasetDescriptor& b) {
                return a.dataset_id < b.dataset_id;
              });
    std::vector<corpus::Corpus> parts;
    for (const auto& descriptor : descriptors) {
      parts.push_back(corpus::ingest_file(descriptor, descriptor.data_path));
    }
    registry.corpora[language] = corpus::merge_corpora(parts, language);
    registry.splits[language] = corpus::stratified_split(
        registry.corpora[language],
        rng::derive_all(master_seed, "corpus", to_string(language)));
  }
  return registry;
}

Context load_context(const RunOptions& options) {
  Context context;
  context.manifest = manifest::load_manifest(options.manifest_path);

  context.output_root = !options.output_root_override.empty()
                            ? options.output_root_override
                            : context.manifest.output_root;
  if (context.output_root.empty()) {
    throw ManifestError(
        "no output root: set output_root in the manifest, pass --out, or export "
        "XLING_OUTPUT_ROOT");
  }

  context.registry = build_registry(context.manifest, context.manifest.master_seed);

  const std::string provider_id =
      context.manifest.translation ? context.manifest.translation->provider : "";

  std::set<std::string> seen;
  const auto add_plan = [&](transfer::ExperimentPlan plan) {
    if (seen.insert(transfer::cell_id(plan)).second) {
      context.plans.push_back(std::move(plan));
    }
  };
  for (const auto& grid : context.manifest.grids) {
    transfer::GridOptions grid_options;
    grid_options.regimes = grid.regimes;
    grid_options.shots_list = grid.shots;
    grid_options.targets = grid.targets;
    grid_options.backend_kind = context.manifest.backend.kind;
    grid_options.config = context.manifest.backend.config;
    grid_options.master_seed = context.manifest.master_seed;
    grid_options.translation_provider_id = provider_id;
    grid_options.stx_source = grid.stx_source;
    for (auto& plan : transfer::full_grid(context.registry.languages(), grid_options)) {
      add_plan(std::move(plan));
    }
  }
  for (const auto& cell : context.manifest.cells) {
    add_plan(transfer::build_plan(cell.regime, cell.target, cell.sources, cell.shots,
                                  context.manifest.backend.kind,
                                  context.manifest.backend.config,
                                  context.manifest.master_seed, provider_id));
  }

  const bool any_translation =
      std::any_of(context.plans.begin(), context.plans.end(), needs_translation);
  if (any_translation && !context.manifest.translation) {
    throw ManifestError("plans include ix/stx cells but the manifest has no translation section");
  }
  if (context.manifest.translation) {
    context.provider = make_provider(*context.manifest.translation);
    context.cache =
        std::make_shared<translation::Cache>(context.manifest.translation->cache_path);
    context.mode = options.mode_override.value_or(context.manifest.translation->mode);
  }

  std::string blob;
  for (const auto& [language, corpus] : context.registry.corpora) {
    blob += to_string(language);
    blob += ' ';
    blob += corpus::fingerprint(corpus);
    blob += ' ';
    blob += std::to_string(context.registry.splits.at(language).seed);
    blob += '\n';
  }
  context.registry_fingerprint = digest::sha256_hex(blob);
  return context;
}

std::string cell_fingerprint(const transfer::ExperimentPlan& plan,
                             const std::string& registry_fingerprint) {
  return digest::sha256_hex(transfer::plan_to_json(plan).dump() + "\n" +
                            registry_fingerprint + "\n" + kCodeVersion);
}

void write_splits(const Context& context) {
  for (const auto& [language, split] : context.registry.splits) {
    nlohmann::json value = corpus::split_to_json(split);
    value["language"] = std::string(to_string(language));
    io::write_file(context.output_root / "splits" /
                       (std::string(to_string(language)) + ".json"),
                   value.dump(2) + "\n");
  }
}

RunOutcome execute_run(const RunOptions& options, std::ostream& log) {
  Context context = load_context(options);
  write_splits(context);

  std::vector<const transfer::ExperimentPlan*> selected;
  for (const auto& plan : context.plans) {
    if (matches_only(transfer::cell_id(plan), options.only)) selected.push_back(&plan);
  }

  RunOutcome outcome;
  outcome.output_root = context.output_root;

  std::mutex mutex;
  std::atomic<std::size_t> next{0};
  const int jobs = std::max(1, options.jobs);

  const auto worker = [&]() {
    auto backend = make_backend_for(context.manifest);
    std::unique_ptr<translation::Translator> translator;
    if (context.provider) {
      translator = std::make_unique<translation::Translator>(context.provider,
                                                             context.cache, context.mode);
    }
    while (true) {
      const std::size_t index = next.fetch_add(1);
      if (index >= selected.size()) break;
      const auto& plan = *selected[index];
      const std::string id = transfer::cell_id(plan);
      const fs::path cell_dir = context.output_root / "cells" / id;
      const std::string fingerprint =
          cell_fingerprint(plan, context.registry_fingerprint);

      if (options.resume && fs::exists(cell_dir / "metrics.json") &&
          fs::exists(cell_dir / "fingerprint.txt") &&
          io::trim(io::read_file(cell_dir / "fingerprint.txt")) == fingerprint) {
        std::lock_guard lock(mutex);
        ++outcome.skipped;
        log << "skip " << id << " (up to date)\n";
        continue;
      }

      try {
        auto result =
            transfer::run_experiment(plan, context.registry, *backend, translator.get());
        result.prediction_dump_ref = (cell_dir / "predictions.tsv").string();
        reporting::write_cell_artifacts(result, cell_dir);
        io::write_file(cell_dir / "fingerprint.txt", fingerprint + "\n");
        std::lock_guard lock(mutex);
        ++outcome.executed;
        log << "done " << id << " macro_f1=" << result.mean_report.macro_f1 << "\n";
      } catch (const std::exception& e) {
        io::write_file(cell_dir / "error.txt", std::string(e.what()) + "\n");
        std::lock_guard lock(mutex);
        ++outcome.failed;
        outcome.failures.push_back(id + ": " + e.what());
        log << "FAIL " << id << ": " << e.what() << "\n";
      }
    }
  };

  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(jobs));
    for (int i = 0; i < jobs; ++i) threads.emplace_back(worker);
    for (auto& thread : threads) thread.join();
  }

  nlohmann::json summary = {{"code_version", kCodeVersion},
                            {"master_seed", context.manifest.master_seed},
                            {"executed", outcome.executed},
                            {"skipped", outcome.skipped},
                            {"failed", outcome.failed},
                            {"failures", outcome.failures}};
  io::write_file(context.output_root / "run.json", summary.dump(2) + "\n");
  return outcome;
}

RunOutcome execute_attacks(const RunOptions& options, std::ostream& log) {
  Context context = load_context(options);
  const auto settings = context.manifest.attacks.value_or(manifest::AttackSettings{});

  std::vector<attack::AttackKind> kinds = settings.kinds;
  if (kinds.empty()) {
    const auto all = attack::all_attack_kinds();
    kinds.assign(all.begin(), all.end());
  }
  std::vector<LanguageCode> languages = settings.languages;
  if (languages.empty()) languages = context.registry.languages();

  RunOutcome outcome;
  outcome.output_root = context.output_root;

  auto backend = make_backend_for(context.manifest);
  for (const auto language : languages) {
    const std::string name(to_string(language));
    try {
      const auto& corpus = context.registry.corpus_for(language);
      const auto& split = context.registry.split_for(language);
      // Same derivation as the ELFI cell, so the attacked model is the
      // ELFI model.
      const std::uint64_t cell_seed =
          rng::derive_all(context.manifest.master_seed, "cell", "elfi", name, "",
                          std::uint64_t{0});
      const auto model = backend->train(materialize(corpus, split.train),
                                        materialize(corpus, split.validation),
                                        context.manifest.backend.config,
                                        rng::derive(cell_seed, "train"));
      const auto rows = attack::attack_sweep(
          *backend, model, materialize(corpus, split.test), kinds, settings.rates,
          rng::derive_all(context.manifest.master_seed, "attack", name),
          settings.special_charset, settings.per_post);

      const fs::path dir = context.output_root / "attacks" / name;
      io::write_file(dir / "sweep.json", sweep_json(rows).dump(2) + "\n");
      io::write_file(dir / "sweep.csv", sweep_csv(rows));
      ++outcome.executed;
      log << "done attack sweep " << name << " (" << rows.size() << " rows)\n";
    } catch (const std::exception& e) {
      ++outcome.failed;
      outcome.failures.push_back(name + ": " + e.what());
      log << "FAIL attack sweep " << name << ": " << e.what() << "\n";
    }
  }
  return outcome;
}

int validate_datasets(const std::filesystem::path& manifest_path, std::ostream& log) {
  manifest::RunManifest run_manifest;
  try {
    run_manifest = manifest::load_manifest(manifest_path);
  } catch (const Error& e) {
    log << "manifest error: " << e.what() << "\n";
    return 2;
  }

  bool ok = true;
  for (const auto& path : run_manifest.descriptor_paths) {
    std::string dataset_id = path.string();
    try {
      const auto descriptor = corpus::load_descriptor(path);
      dataset_id = descriptor.dataset_id;
      if (descriptor.data_path.empty()) {
        throw ManifestError("descriptor lacks data_path");
      }
      corpus::IngestStats stats;
      const auto corpus = corpus::ingest_file(descriptor, descriptor.data_path, &stats);
      log << dataset_id << ": OK (" << corpus.posts.size() << " posts, "
          << corpus::count_label(corpus, BinaryLabel::Abusive) << " abusive / "
          << corpus::count_label(corpus, BinaryLabel::Normal) << " normal, dropped "
          << stats.dropped_labels << ", rejected empty " << stats.rejected_empty << ")\n";
    } catch (const std::exception& e) {
      log << dataset_id << ": FAIL " << e.what() << "\n";
      ok = false;
    }
  }
  return ok ? 0 : 2;
}

void write_reports(const std::filesystem::path& run_root, const std::string& kind,
                   std::ostream& log) {
  const bool all = kind == "all";
  const fs::path reports = run_root / "reports";

  std::vector<reporting::CellSummary> summaries;
  if (fs::exists(run_root / "cells")) {
    summaries = reporting::load_run(run_root / "cells");
  }

  if (all || kind == "elfi") {
    reporting::write_artifact(reporting::emit_elfi_table(summaries), reports, "elfi_table");
    log << "wrote elfi_table\n";
  }
  if (all || kind == "transfer") {
    for (const int shots : {0, 32, 64}) {
      const bool any = std::any_of(
          summaries.begin(), summaries.end(), [&](const reporting::CellSummary& s) {
            return (s.plan.regime == transfer::Regime::MTX ||
                    s.plan.regime == transfer::Regime::ALLBONE) &&
                   s.plan.shots == shots;
          });
      if (!any) continue;
      reporting::write_artifact(reporting::emit_transfer_matrix(summaries, shots), reports,
                                "transfer_matrix_" + std::to_string(shots));
      log << "wrote transfer_matrix_" << shots << "\n";
    }
  }
  if (all || kind == "delta") {
    reporting::write_artifact(reporting::emit_delta_matrix(summaries, 32, 64), reports,
                              "delta_matrix_64_vs_32");
    log << "wrote delta_matrix_64_vs_32\n";
  }
  if (all || kind == "attack") {
    const auto rows = load_sweeps(run_root);
    if (rows.empty()) {
      log << "no sweep data under " << (run_root / "attacks").string() << "\n";
    } else {
      reporting::write_artifact(reporting::emit_attack_series(rows), reports,
                                "attack_series");
      log << "wrote attack_series\n";
    }
  }
}

void write_plot(const std::filesystem::path& run_root, std::ostream& log) {
  const auto rows = load_sweeps(run_root);
  if (rows.empty()) {
    log << "no sweep data under " << (run_root / "attacks").string() << "\n";
    return;
  }
  io::write_file(run_root / "reports" / "attack_panels.svg",
                 reporting::render_attack_svg(rows));
  log << "wrote attack_panels.svg\n";
}

}  // namespace xling::runner
