#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "vendor/CLI11.hpp"
#include "xling/errors.hpp"
#include "xling/manifest.hpp"
#include "xling/runner.hpp"

namespace {

using xling::runner::RunOptions;

xling::translation::Mode parse_mode(const std::string& text) {
  if (text == "live") return xling::translation::Mode::Live;
  if (text == "offline") return xling::translation::Mode::Offline;
  throw xling::InvalidConfig("translation mode must be \"live\" or \"offline\", got \"" +
                             text + "\"");
}

// Flag beats environment beats manifest.
RunOptions resolve_options(const std::string& manifest_path,
                           const std::vector<std::string>& only, bool resume, int jobs,
                           const std::string& out_flag, const std::string& mode_flag) {
  RunOptions options;
  options.manifest_path = manifest_path;
  options.only = only;
  options.resume = resume;
  options.jobs = jobs;

  if (!out_flag.empty()) {
    options.output_root_override = out_flag;
  } else if (const char* env = std::getenv("XLING_OUTPUT_ROOT"); env && *env) {
    options.output_root_override = env;
  }

  if (!mode_flag.empty()) {
    options.mode_override = parse_mode(mode_flag);
  } else if (const char* env = std::getenv("XLING_TRANSLATION_MODE"); env && *env) {
    options.mode_override = parse_mode(env);
  }
  return options;
}

int exit_code(const xling::runner::RunOutcome& outcome) {
  return outcome.failed > 0 ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-lingual transfer and robustness experiment runner"};
  app.require_subcommand(1);

  std::string manifest_path;
  std::string run_root;
  std::string out_flag;
  std::string mode_flag;
  std::string report_kind = "all";
  std::vector<std::string> only;
  bool resume = false;
  int jobs = 1;

  auto* datasets = app.add_subcommand("datasets", "Dataset registry utilities");
  datasets->require_subcommand(1);
  auto* validate = datasets->add_subcommand(
      "validate", "Dry-run ingestion of every dataset in the manifest");
  validate->add_option("manifest", manifest_path, "Run manifest path")->required();

  auto* split = app.add_subcommand("split", "Compute and persist the per-language splits");
  split->add_option("manifest", manifest_path, "Run manifest path")->required();
  split->add_option("--out", out_flag, "Output root override");

  auto* run = app.add_subcommand("run", "Execute the manifest's experiment cells");
  run->add_option("manifest", manifest_path, "Run manifest path")->required();
  run->add_option("--only", only, "Only cells whose id starts with one of these prefixes");
  run->add_flag("--resume", resume, "Skip cells already finished for the same plan");
  run->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  run->add_option("--out", out_flag, "Output root override");
  run->add_option("--translation-mode", mode_flag, "live or offline");

  auto* attack = app.add_subcommand("attack", "Run the adversarial sweep per language");
  attack->add_option("manifest", manifest_path, "Run manifest path")->required();
  attack->add_option("--out", out_flag, "Output root override");
  attack->add_option("--translation-mode", mode_flag, "live or offline");

  auto* report = app.add_subcommand("report", "Emit tables from a finished run");
  report->add_option("run_root", run_root, "Run output root")->required();
  report->add_option("--kind", report_kind, "all, elfi, transfer, delta, or attack")
      ->check(CLI::IsMember({"all", "elfi", "transfer", "delta", "attack"}));

  auto* plot = app.add_subcommand("plot", "Render the attack sweep figure");
  plot->add_option("run_root", run_root, "Run output root")->required();

  auto* schema = app.add_subcommand("schema", "Print the manifest JSON schema");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (validate->parsed()) {
      return xling::runner::validate_datasets(manifest_path, std::cout);
    }
    if (split->parsed()) {
      const auto options =
          resolve_options(manifest_path, {}, false, 1, out_flag, mode_flag);
      const auto context = xling::runner::load_context(options);
      xling::runner::write_splits(context);
      std::cout << "wrote " << context.registry.splits.size() << " split files under "
                << (context.output_root / "splits").string() << "\n";
      return 0;
    }
    if (run->parsed()) {
      const auto options =
          resolve_options(manifest_path, only, resume, jobs, out_flag, mode_flag);
      const auto outcome = xling::runner::execute_run(options, std::cout);
      std::cout << "executed " << outcome.executed << ", skipped " << outcome.skipped
                << ", failed " << outcome.failed << "\n";
      return exit_code(outcome);
    }
    if (attack->parsed()) {
      const auto options =
          resolve_options(manifest_path, {}, false, 1, out_flag, mode_flag);
      const auto outcome = xling::runner::execute_attacks(options, std::cout);
      return exit_code(outcome);
    }
    if (report->parsed()) {
      xling::runner::write_reports(run_root, report_kind, std::cout);
      return 0;
    }
    if (plot->parsed()) {
      xling::runner::write_plot(run_root, std::cout);
      return 0;
    }
    if (schema->parsed()) {
      std::cout << xling::manifest::schema_json();
      return 0;
    }
  } catch (const xling::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
