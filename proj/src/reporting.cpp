#include "xling/reporting.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>

#include "xling/errors.hpp"
#include "xling/io.hpp"

namespace xling::reporting {

namespace {

std::string fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

std::string signed_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%+.*f", decimals, value);
  return buf;
}

std::string rate_text(double rate) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", rate);
  return buf;
}

std::string score_text(double score) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", score);
  return buf;
}

// Row-key ordering for matrix reports: target enum order, then model label.
struct RowKey {
  LanguageCode target;
  std::string model;

  bool operator<(const RowKey& other) const {
    if (target != other.target) return target < other.target;
    return model < other.model;
  }
};

std::vector<std::string> matrix_columns() {
  std::vector<std::string> columns;
  for (const auto language : all_language_types()) {
    columns.emplace_back(to_string(language));
  }
  columns.emplace_back("AllBOne");
  return columns;
}

std::string source_column(const transfer::ExperimentPlan& plan) {
  if (plan.regime == transfer::Regime::ALLBONE) return "AllBOne";
  return std::string(to_string(plan.sources.front()));
}

using MatrixCells = std::map<RowKey, std::map<std::string, double>>;

MatrixCells collect_matrix_cells(const std::vector<CellSummary>& results, int shots) {
  MatrixCells cells;
  for (const auto& summary : results) {
    const auto regime = summary.plan.regime;
    if (regime != transfer::Regime::MTX && regime != transfer::Regime::ALLBONE) continue;
    if (summary.plan.shots != shots) continue;
    const RowKey key{summary.plan.target, summary.model};
    const std::string column = source_column(summary.plan);
    if (!cells[key].emplace(column, summary.report.macro_f1).second) {
      throw Error("duplicate transfer cell for target " +
                  std::string(to_string(key.target)) + ", model " + key.model +
                  ", source " + column);
    }
  }
  return cells;
}

std::string md_table(const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows) {
  std::string md = "|";
  for (const auto& cell : header) md += " " + cell + " |";
  md += "\n|";
  for (std::size_t i = 0; i < header.size(); ++i) md += " --- |";
  md += "\n";
  for (const auto& row : rows) {
    md += "|";
    for (const auto& cell : row) md += " " + cell + " |";
    md += "\n";
  }
  return md;
}

}  // namespace

void write_artifact(const Artifact& artifact, const std::filesystem::path& dir,
                    const std::string& stem) {
  io::write_file(dir / (stem + ".csv"), artifact.csv);
  io::write_file(dir / (stem + ".json"), artifact.json);
  io::write_file(dir / (stem + ".md"), artifact.markdown);
}

void write_cell_artifacts(const transfer::ExperimentResult& result,
                          const std::filesystem::path& dir) {
  io::write_file(dir / "plan.json", transfer::plan_to_json(result.plan).dump(2) + "\n");
  io::write_file(dir / "metrics.json",
                 metrics::to_json(result.mean_report).dump(2) + "\n");

  std::string tsv = "post_id\tgold\tpred\tscore\n";
  for (const auto& repeat : result.per_repeat) {
    for (std::size_t i = 0; i < repeat.predictions.size(); ++i) {
      const auto& p = repeat.predictions[i];
      tsv += p.post_id;
      tsv += '\t';
      tsv += to_string(repeat.gold[i]);
      tsv += '\t';
      tsv += to_string(p.label);
      tsv += '\t';
      tsv += score_text(p.score);
      tsv += '\n';
    }
  }
  io::write_file(dir / "predictions.tsv", tsv);

  nlohmann::json lineage = nlohmann::json::array();
  for (const auto& repeat : result.per_repeat) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& entry : repeat.lineage) {
      entries.push_back({{"action", entry.action},
                         {"corpus_fingerprint", entry.corpus_fingerprint},
                         {"config", backend::config_to_json(entry.config)},
                         {"seed", entry.seed}});
    }
    lineage.push_back(entries);
  }
  io::write_file(dir / "lineage.json", lineage.dump(2) + "\n");
}

CellSummary load_cell_summary(const std::filesystem::path& dir) {
  CellSummary summary;
  summary.plan = transfer::plan_from_json(
      nlohmann::json::parse(io::read_file(dir / "plan.json")));
  summary.model = std::string(backend::to_string(summary.plan.backend_kind));
  summary.report = metrics::aggregate_from_json(
      nlohmann::json::parse(io::read_file(dir / "metrics.json")));
  return summary;
}

std::vector<CellSummary> load_run(const std::filesystem::path& run_root) {
  std::vector<std::filesystem::path> dirs;
  for (const auto& entry : std::filesystem::directory_iterator(run_root)) {
    if (entry.is_directory() && std::filesystem::exists(entry.path() / "plan.json")) {
      dirs.push_back(entry.path());
    }
  }
  std::sort(dirs.begin(), dirs.end());
  std::vector<CellSummary> summaries;
  summaries.reserve(dirs.size());
  for (const auto& dir : dirs) summaries.push_back(load_cell_summary(dir));
  return summaries;
}

Artifact emit_elfi_table(const std::vector<CellSummary>& results) {
  std::map<LanguageCode, std::map<std::string, const CellSummary*>> table;
  std::set<std::string> models;
  for (const auto& summary : results) {
    if (summary.plan.regime != transfer::Regime::ELFI) continue;
    if (!table[summary.plan.target].emplace(summary.model, &summary).second) {
      throw Error("duplicate cell for language " +
                  std::string(to_string(summary.plan.target)) + ", model " +
                  summary.model);
    }
    models.insert(summary.model);
  }

  std::string csv = "Lang,Model,Accuracy,M-F1\n";
  nlohmann::json rows = nlohmann::json::array();
  nlohmann::json missing = nlohmann::json::array();
  std::vector<std::vector<std::string>> md_rows;

  for (const auto& [language, by_model] : table) {
    std::string best_model;
    double best_f1 = -1.0;
    for (const auto& [model, cell] : by_model) {
      if (cell->report.macro_f1 > best_f1) {
        best_f1 = cell->report.macro_f1;
        best_model = model;
      }
    }
    for (const auto& model : models) {
      const auto it = by_model.find(model);
      if (it == by_model.end()) {
        missing.push_back(std::string(to_string(language)) + "/" + model);
        continue;
      }
      const auto& report = it->second->report;
      const bool best = model == best_model;
      csv += std::string(to_string(language)) + "," + model + "," +
             fixed(report.accuracy, 6) + "," + fixed(report.macro_f1, 6) + "\n";
      rows.push_back({{"lang", std::string(to_string(language))},
                      {"model", model},
                      {"accuracy", report.accuracy},
                      {"macro_f1", report.macro_f1},
                      {"best", best}});
      const std::string acc = fixed(report.accuracy, 3);
      const std::string f1 = fixed(report.macro_f1, 3);
      md_rows.push_back({std::string(to_string(language)), model,
                         best ? "**" + acc + "**" : acc, best ? "**" + f1 + "**" : f1});
    }
  }

  Artifact artifact;
  artifact.csv = csv;
  artifact.json = nlohmann::json({{"rows", rows}, {"missing", missing}}).dump(2) + "\n";
  artifact.markdown = md_table({"Lang", "Model", "Accuracy", "M-F1"}, md_rows);
  return artifact;
}

Artifact emit_transfer_matrix(const std::vector<CellSummary>& results, int shots) {
  const auto cells = collect_matrix_cells(results, shots);
  const auto columns = matrix_columns();

  // Best (model, column) per target, for the dagger annotation.
  std::map<LanguageCode, std::pair<std::string, std::string>> target_best;
  std::map<LanguageCode, double> target_best_value;
  for (const auto& [key, row] : cells) {
    for (const auto& column : columns) {
      const auto it = row.find(column);
      if (it == row.end()) continue;
      const auto seen = target_best_value.find(key.target);
      if (seen == target_best_value.end() || it->second > seen->second) {
        target_best_value[key.target] = it->second;
        target_best[key.target] = {key.model, column};
      }
    }
  }

  std::string csv = "target,model,source,macro_f1\n";
  nlohmann::json json_rows = nlohmann::json::array();
  nlohmann::json missing = nlohmann::json::array();
  std::vector<std::vector<std::string>> md_rows;

  for (const auto& [key, row] : cells) {
    std::string best_column;
    std::string second_column;
    double best_value = -1.0;
    double second_value = -1.0;
    for (const auto& column : columns) {
      const auto it = row.find(column);
      if (it == row.end()) continue;
      if (it->second > best_value) {
        second_value = best_value;
        second_column = best_column;
        best_value = it->second;
        best_column = column;
      } else if (it->second > second_value) {
        second_value = it->second;
        second_column = column;
      }
    }

    nlohmann::json json_cells = nlohmann::json::object();
    std::vector<std::string> md_row = {std::string(to_string(key.target)), key.model};
    for (const auto& column : columns) {
      const auto it = row.find(column);
      if (it == row.end()) {
        md_row.push_back("-");
        if (column != to_string(key.target)) {
          missing.push_back(std::string(to_string(key.target)) + "/" + key.model + "/" +
                            column);
        }
        continue;
      }
      csv += std::string(to_string(key.target)) + "," + key.model + "," + column + "," +
             fixed(it->second, 6) + "\n";
      json_cells[column] = it->second;
      std::string text = fixed(it->second, 3);
      if (column == best_column) {
        text = "**" + text + "**";
        const auto best = target_best.find(key.target);
        if (best != target_best.end() && best->second.first == key.model &&
            best->second.second == column) {
          text += "†";
        }
      } else if (column == second_column) {
        text = "_" + text + "_";
      }
      md_row.push_back(text);
    }
    md_rows.push_back(md_row);
    json_rows.push_back({{"target", std::string(to_string(key.target))},
                         {"model", key.model},
                         {"cells", json_cells},
                         {"best", best_column},
                         {"second", second_column}});
  }

  nlohmann::json per_target = nlohmann::json::object();
  for (const auto& [target, winner] : target_best) {
    per_target[std::string(to_string(target))] = {{"model", winner.first},
                                                  {"source", winner.second}};
  }

  std::vector<std::string> header = {"Target", "Model"};
  header.insert(header.end(), columns.begin(), columns.end());

  Artifact artifact;
  artifact.csv = csv;
  artifact.json = nlohmann::json({{"shots", shots},
                                  {"columns", columns},
                                  {"rows", json_rows},
                                  {"per_target_best", per_target},
                                  {"missing", missing}})
                      .dump(2) +
                  "\n";
  artifact.markdown = md_table(header, md_rows);
  return artifact;
}

Artifact emit_delta_matrix(const std::vector<CellSummary>& results, int low_shots,
                           int high_shots) {
  const auto low = collect_matrix_cells(results, low_shots);
  const auto high = collect_matrix_cells(results, high_shots);
  const auto columns = matrix_columns();

  std::string csv = "target,model,source,delta_macro_f1\n";
  nlohmann::json json_rows = nlohmann::json::array();
  std::vector<std::vector<std::string>> md_rows;

  for (const auto& [key, low_row] : low) {
    const auto high_it = high.find(key);
    if (high_it == high.end()) continue;
    nlohmann::json json_cells = nlohmann::json::object();
    std::vector<std::string> md_row = {std::string(to_string(key.target)), key.model};
    bool any = false;
    for (const auto& column : columns) {
      const auto low_cell = low_row.find(column);
      const auto high_cell = high_it->second.find(column);
      if (low_cell == low_row.end() || high_cell == high_it->second.end()) {
        md_row.push_back("-");
        continue;
      }
      const double delta = high_cell->second - low_cell->second;
      any = true;
      csv += std::string(to_string(key.target)) + "," + key.model + "," + column + "," +
             fixed(delta, 6) + "\n";
      json_cells[column] = delta;
      md_row.push_back(signed_fixed(delta, 3));
    }
    if (!any) continue;
    md_rows.push_back(md_row);
    json_rows.push_back({{"target", std::string(to_string(key.target))},
                         {"model", key.model},
                         {"cells", json_cells}});
  }

  std::vector<std::string> header = {"Target", "Model"};
  header.insert(header.end(), columns.begin(), columns.end());

  Artifact artifact;
  artifact.csv = csv;
  artifact.json = nlohmann::json({{"low_shots", low_shots},
                                  {"high_shots", high_shots},
                                  {"rows", json_rows}})
                      .dump(2) +
                  "\n";
  artifact.markdown = md_table(header, md_rows);
  return artifact;
}

Artifact emit_attack_series(const std::vector<AttackSeriesRow>& rows) {
  std::vector<AttackSeriesRow> sorted = rows;
  std::sort(sorted.begin(), sorted.end(),
            [](const AttackSeriesRow& a, const AttackSeriesRow& b) {
              if (a.language != b.language) return a.language < b.language;
              if (a.kind != b.kind) return a.kind < b.kind;
              return a.rate < b.rate;
            });

  std::string csv = "language,kind,rate,macro_f1\n";
  nlohmann::json json_rows = nlohmann::json::array();
  std::vector<std::vector<std::string>> md_rows;
  for (const auto& row : sorted) {
    csv += row.language + "," + std::string(attack::to_string(row.kind)) + "," +
           rate_text(row.rate) + "," + fixed(row.report.macro_f1, 6) + "\n";
    json_rows.push_back({{"language", row.language},
                         {"kind", std::string(attack::to_string(row.kind))},
                         {"rate", row.rate},
                         {"accuracy", row.report.accuracy},
                         {"macro_f1", row.report.macro_f1}});
    md_rows.push_back({row.language, std::string(attack::to_string(row.kind)),
                       rate_text(row.rate), fixed(row.report.macro_f1, 3)});
  }

  Artifact artifact;
  artifact.csv = csv;
  artifact.json = nlohmann::json({{"rows", json_rows}}).dump(2) + "\n";
  artifact.markdown = md_table({"Language", "Attack", "Rate", "Macro-F1"}, md_rows);
  return artifact;
}

std::string render_attack_svg(const std::vector<AttackSeriesRow>& rows) {
  static constexpr const char* kColors[attack::kAttackKindCount] = {
      "#4363d8", "#e6194b", "#3cb44b", "#f58231", "#911eb4", "#469990"};
  constexpr double kPanelW = 280;
  constexpr double kPanelH = 200;
  constexpr double kMarginL = 48;
  constexpr double kMarginB = 36;
  constexpr double kMarginT = 28;
  constexpr double kGap = 24;
  constexpr int kPerRow = 3;

  std::map<std::string, std::map<attack::AttackKind, std::map<double, double>>> series;
  double max_rate = 0.0;
  for (const auto& row : rows) {
    series[row.language][row.kind][row.rate] = row.report.macro_f1;
    max_rate = std::max(max_rate, row.rate);
  }
  if (max_rate == 0.0) max_rate = 100.0;

  const int n_panels = static_cast<int>(series.size());
  const int n_rows = n_panels == 0 ? 1 : (n_panels + kPerRow - 1) / kPerRow;
  const int n_cols = std::min(std::max(n_panels, 1), kPerRow);
  const double cell_w = kMarginL + kPanelW + kGap;
  const double cell_h = kMarginT + kPanelH + kMarginB + kGap;
  const double legend_h = 24;
  const double width = n_cols * cell_w + kGap;
  const double height = n_rows * cell_h + legend_h + kGap;

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                    rate_text(width) + "\" height=\"" + rate_text(height) +
                    "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  double legend_x = kGap;
  for (std::size_t i = 0; i < attack::kAttackKindCount; ++i) {
    const auto kind = attack::all_attack_kinds()[i];
    svg += "<rect x=\"" + rate_text(legend_x) + "\" y=\"8\" width=\"12\" height=\"12\" fill=\"" +
           kColors[i] + "\"/>\n";
    svg += "<text x=\"" + rate_text(legend_x + 16) + "\" y=\"18\">" +
           std::string(attack::to_string(kind)) + "</text>\n";
    legend_x += 24 + 8.0 * static_cast<double>(attack::to_string(kind).size());
  }

  int panel = 0;
  for (const auto& [language, by_kind] : series) {
    const double ox = kGap + (panel % kPerRow) * cell_w + kMarginL;
    const double oy = legend_h + kGap + (panel / kPerRow) * cell_h + kMarginT;
    ++panel;

    svg += "<text x=\"" + rate_text(ox + kPanelW / 2) + "\" y=\"" + rate_text(oy - 10) +
           "\" text-anchor=\"middle\" font-weight=\"bold\">" + language + "</text>\n";
    svg += "<rect x=\"" + rate_text(ox) + "\" y=\"" + rate_text(oy) + "\" width=\"" +
           rate_text(kPanelW) + "\" height=\"" + rate_text(kPanelH) +
           "\" fill=\"none\" stroke=\"#555\"/>\n";

    for (const double tick : {0.0, 0.5, 1.0}) {
      const double y = oy + kPanelH * (1.0 - tick);
      svg += "<line x1=\"" + rate_text(ox - 4) + "\" y1=\"" + rate_text(y) + "\" x2=\"" +
             rate_text(ox) + "\" y2=\"" + rate_text(y) + "\" stroke=\"#555\"/>\n";
      svg += "<text x=\"" + rate_text(ox - 8) + "\" y=\"" + rate_text(y + 4) +
             "\" text-anchor=\"end\">" + fixed(tick, 1) + "</text>\n";
    }

    std::set<double> ticks;
    for (const auto& [kind, points] : by_kind) {
      for (const auto& [rate, value] : points) ticks.insert(rate);
    }
    for (const double tick : ticks) {
      const double x = ox + kPanelW * (tick / max_rate);
      svg += "<line x1=\"" + rate_text(x) + "\" y1=\"" + rate_text(oy + kPanelH) +
             "\" x2=\"" + rate_text(x) + "\" y2=\"" + rate_text(oy + kPanelH + 4) +
             "\" stroke=\"#555\"/>\n";
      svg += "<text x=\"" + rate_text(x) + "\" y=\"" + rate_text(oy + kPanelH + 16) +
             "\" text-anchor=\"middle\">" + rate_text(tick) + "</text>\n";
    }

    for (const auto& [kind, points] : by_kind) {
      std::string path;
      for (const auto& [rate, value] : points) {
        const double x = ox + kPanelW * (rate / max_rate);
        const double y = oy + kPanelH * (1.0 - value);
        path += (path.empty() ? "M" : " L") + rate_text(x) + " " + rate_text(y);
      }
      const auto kinds = attack::all_attack_kinds();
      const auto index = static_cast<std::size_t>(
          std::find(kinds.begin(), kinds.end(), kind) - kinds.begin());
      svg += "<path d=\"" + path + "\" fill=\"none\" stroke=\"" + kColors[index] +
             "\" stroke-width=\"1.5\"/>\n";
    }
  }

  svg += "</svg>\n";
  return svg;
}

}  // namespace xling::reporting
