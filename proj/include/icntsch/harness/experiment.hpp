#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "icntsch/harness/network.hpp"
#include "icntsch/tsch/schedule_io.hpp"

namespace icntsch::harness {

inline void write_adaptation_csv(std::ostream& os, const std::vector<adapt::AdaptationLogRow>& rows) {
  os << adapt::kAdaptationCsvHeader << "\n";
  for (const auto& r : rows) {
    os << r.asn << "," << r.from << "->" << r.to << "," << detail::num(r.utilization) << ","
       << adapt::decision_token(r.decision) << "," << r.dyn_cells_after << "\n";
  }
}

inline void write_trace(std::ostream& os, const TraceLog& trace) {
  for (const auto& e : trace.events()) os << to_json_line(e) << "\n";
}

struct ExperimentOptions {
  std::uint64_t seed = 1;
  std::optional<std::size_t> repetitions;  // empty: run until the key metric settles
  std::filesystem::path out = "out";
  bool verbose_trace = false;
  RepetitionPolicy policy;
};

struct ExperimentResult {
  std::map<MacMode, std::vector<MetricsRecord>> runs;
  std::vector<Summary> summaries;
};

// Runs every configured mode over consecutive seeds and writes results.csv,
// summary.csv, one trace per run, adaptation logs, the static schedule and
// the effective configuration into `out`.
inline ExperimentResult run_scenario(const ScenarioConfig& cfg, const ExperimentOptions& o,
                                     std::ostream* progress = nullptr) {
  namespace fs = std::filesystem;
  fs::create_directories(o.out);
  {
    std::ofstream f(o.out / "effective_config.json");
    f << to_json(cfg).dump(2) << "\n";
  }
  const auto nodes = cfg.graph().nodes();
  const bool any_tsch = std::any_of(cfg.modes.begin(), cfg.modes.end(), is_tsch);
  if (any_tsch) {
    auto g = cfg.graph();
    auto sched = tsch::build_static_schedule(g, routing::build_dodag(g, cfg.root), cfg.schedule);
    std::ofstream f(o.out / "schedule.csv");
    tsch::write_schedule_csv(f, sched);
  }

  ExperimentResult result;
  std::ofstream csv(o.out / "results.csv");
  csv << results_header(nodes) << "\n";
  for (MacMode mode : cfg.modes) {
    auto& runs = result.runs[mode];
    for (std::size_t r = 0;; ++r) {
      if (o.repetitions ? r >= *o.repetitions : converged(runs, o.policy)) break;
      const std::uint64_t seed = o.seed + r;
      auto out = run_experiment(cfg, mode, seed, {o.verbose_trace, false});
      const std::string tag = std::string(mode_name(mode)) + "_" + std::to_string(seed);
      {
        std::ofstream f(o.out / ("trace_" + tag + ".jsonl"));
        write_trace(f, out.trace);
      }
      if (mode == MacMode::kAdinr) {
        std::ofstream f(o.out / ("adaptation_" + tag + ".csv"));
        write_adaptation_csv(f, out.adaptation);
      }
      csv << results_row(out.metrics, nodes) << "\n";
      if (progress) {
        *progress << mode_name(mode) << " seed " << seed << ": pdr " << out.metrics.pdr << ", ttc "
                  << (out.metrics.completed ? detail::num(out.metrics.ttc_s) + " s" : std::string("censored")) << "\n";
      }
      runs.push_back(std::move(out.metrics));
    }
    auto s = summarize(runs);
    csv << summary_row(s, nodes) << "\n";
    result.summaries.push_back(std::move(s));
  }
  std::ofstream sf(o.out / "summary.csv");
  write_summary_csv(sf, result.summaries);
  return result;
}

}  // namespace icntsch::harness
