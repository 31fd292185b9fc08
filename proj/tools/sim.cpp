#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "icntsch/icntsch.hpp"

using namespace icntsch;

namespace {

int cmd_run(const std::string& scenario, std::uint64_t seed, const std::string& reps, const std::string& out,
            bool verbose) {
  auto cfg = harness::load_scenario(scenario);
  harness::ExperimentOptions o;
  o.seed = seed;
  o.out = out;
  o.verbose_trace = verbose;
  if (reps != "auto") {
    try {
      o.repetitions = std::stoul(reps);
    } catch (const std::exception&) {
      throw ConfigError("--repetitions takes 'auto' or a positive count");
    }
    if (*o.repetitions == 0) throw ConfigError("--repetitions must be >= 1");
  }
  auto res = harness::run_scenario(cfg, o, &std::cerr);
  for (const auto& s : res.summaries) {
    std::cout << s.config << ": runs " << s.runs << ", completed " << s.completed << ", pdr "
              << s.stats.at("pdr").mean << ", ttc_s "
              << (s.completed ? harness::detail::num(s.stats.at("ttc_s").mean) : std::string("censored")) << "\n";
  }
  return 0;
}

int cmd_check(const std::string& scenario, const std::string& schedule_file, const std::string& write_to) {
  auto cfg = harness::load_scenario(scenario);
  auto g = cfg.graph();
  tsch::NetworkSchedule sched;
  if (!schedule_file.empty()) {
    std::ifstream in(schedule_file);
    if (!in) throw ConfigError("cannot open " + schedule_file);
    sched = tsch::read_schedule_csv(in, cfg.schedule.partition);
  } else {
    try {
      sched = tsch::build_static_schedule(g, routing::build_dodag(g, cfg.root), cfg.schedule);
    } catch (const ScheduleInfeasible& e) {
      std::cout << "INFEASIBLE " << e.what() << "\n";
      return 1;
    }
  }
  if (!write_to.empty()) {
    std::ofstream f(write_to);
    tsch::write_schedule_csv(f, sched);
  }
  auto v = tsch::check_collision_free(sched, g);
  for (const auto& x : v) {
    std::cout << tsch::violation_token(x.kind) << " slot " << x.slot << " channel " << int(x.channel) << " nodes";
    for (NodeId n : x.nodes) std::cout << " " << n;
    std::cout << ": " << x.detail << "\n";
  }
  std::size_t cells = 0;
  for (const auto& [_, m] : sched) cells += m.cells().size();
  std::cout << (v.empty() ? "OK" : "VIOLATIONS") << " nodes " << sched.size() << " cells " << cells
            << " violations " << v.size() << "\n";
  return v.empty() ? 0 : 1;
}

int cmd_urt(std::uint32_t n, std::uint32_t iters, const std::string& out, std::uint64_t seed, bool exclude_root) {
  auto analytic = urt::subtree_size_distribution<double>(n, !exclude_root);
  auto empirical = urt::monte_carlo_distribution(n, iters, seed, !exclude_root);
  std::ofstream f(out);
  if (!f) throw ConfigError("cannot write " + out);
  f << "j,analytic_p,empirical_p\n";
  f.precision(12);
  for (std::uint32_t j = 0; j < n; ++j) f << j << "," << analytic[j] << "," << empirical[j] << "\n";
  // Descendants beyond 7, and subtrees (node plus descendants) beyond 7.
  std::cout << "tv " << urt::total_variation(analytic, empirical) << " P(descendants>7) "
            << urt::tail_probability(analytic, 7) << " P(subtree>7) " << urt::tail_probability(analytic, 6) << "\n";
  return 0;
}

int cmd_dodag(const std::string& scenario) {
  auto cfg = harness::load_scenario(scenario);
  auto g = cfg.graph();
  auto d = routing::build_dodag(g, cfg.root);
  std::cout << "node,parent,rank\n";
  for (NodeId n : g.nodes()) {
    std::cout << n << ",";
    if (d.is_root(n)) {
      std::cout << "-";
    } else {
      std::cout << d.parent(n);
    }
    std::cout << "," << d.rank(n) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ICN over TSCH network simulator"};
  app.require_subcommand(1);

  std::string scenario, out, reps = "auto", schedule_file, write_to;
  std::uint64_t seed = 1;
  std::uint32_t n = 100, iters = 10000;
  bool verbose = false, exclude_root = false;

  auto* run = app.add_subcommand("run", "simulate every configured MAC mode");
  run->add_option("--scenario", scenario, "scenario JSON")->required();
  run->add_option("--seed", seed, "first seed")->required();
  run->add_option("--repetitions", reps, "'auto' or a run count per mode");
  run->add_option("--out", out, "output directory")->required();
  run->add_flag("--verbose-trace", verbose, "include per-frame MAC and forwarding events");

  auto* check = app.add_subcommand("check-schedule", "build the static schedule and verify it");
  check->add_option("--scenario", scenario, "scenario JSON")->required();
  check->add_option("--schedule", schedule_file, "verify this schedule CSV instead of building one");
  check->add_option("--write", write_to, "write the checked schedule as CSV");

  auto* urt_cmd = app.add_subcommand("analyze-urt", "analytic vs sampled subtree-size distribution");
  urt_cmd->add_option("--n", n, "tree size")->required()->check(CLI::Range(2u, 100000u));
  urt_cmd->add_option("--iters", iters, "sampled trees")->required();
  urt_cmd->add_option("--out", out, "CSV output")->required();
  urt_cmd->add_option("--seed", seed, "sampling seed");
  urt_cmd->add_flag("--exclude-root", exclude_root, "leave the root out of both distributions");

  auto* dodag = app.add_subcommand("dump-dodag", "print the routing tree as CSV");
  dodag->add_option("--scenario", scenario, "scenario JSON")->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(scenario, seed, reps, out, verbose);
    if (*check) return cmd_check(scenario, schedule_file, write_to);
    if (*urt_cmd) return cmd_urt(n, iters, out, seed, exclude_root);
    if (*dodag) return cmd_dodag(scenario);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ScheduleInfeasible& e) {
    std::cerr << "schedule infeasible: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
