// Batch CLI for the OCPC engine: generate synthetic bid logs, replay them
// under a strategy, compare runs, and evaluate ranking metrics.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ocpc/ocpc.hpp"

namespace {

int exit_code_for(ocpc::Errc code) {
  switch (code) {
    case ocpc::Errc::io_error: return 2;
    case ocpc::Errc::manifest_mismatch: return 4;
    default: return 3;  // validation / contract violations
  }
}

ocpc::Strategy parse_strategy(int value) {
  if (value < 0 || value > 3)
    ocpc::fail(ocpc::Errc::invalid_spec, "--strategy must be 0..3");
  return static_cast<ocpc::Strategy>(value);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"OCPC bid optimization engine and offline auction simulator"};
  app.require_subcommand(1);

  // generate ----------------------------------------------------------------
  auto* gen = app.add_subcommand("generate", "Write a synthetic bid log");
  std::string gen_spec_path;
  std::string gen_out;
  std::uint64_t gen_seed = 0;
  bool gen_seed_set = false;
  gen->add_option("--spec", gen_spec_path,
                  "GenSpec JSON file (default: pinned desk-scale spec)");
  gen->add_option("--out", gen_out, "output bid-log path")->required();
  gen->add_option("--seed", gen_seed, "override the spec seed")
      ->each([&](const std::string&) { gen_seed_set = true; });

  // simulate ----------------------------------------------------------------
  auto* sim = app.add_subcommand("simulate", "Replay a bid log under a strategy");
  std::string sim_log, sim_out;
  int sim_strategy = 2;
  std::string sim_objective = "sigma-gmv";
  double sim_alpha = 1.0;
  double sim_w = 0.0;
  bool sim_w_set = false;
  double sim_ra = 0.0;
  bool sim_ra_set = false;
  double sim_tc = 0.012;
  int sim_slots = 0;
  bool sim_slots_set = false;
  double sim_reserve = 0.0;
  bool sim_budget = true;
  std::vector<double> sim_sweep;
  sim->add_option("--log", sim_log, "input bid-log path")->required();
  sim->add_option("--out", sim_out, "output directory")->required();
  sim->add_option("--strategy", sim_strategy, "bid strategy: 0, 1, 2 or 3");
  sim->add_option("--objective", sim_objective,
                  "str2 ranking index: f1|f2|sigma-gmv|sigma-cvr|sigma-asr");
  sim->add_option("--alpha", sim_alpha, "f2 trade-off coefficient");
  sim->add_option("--w", sim_w, "sigma exponent (default 2 for str1, 6 for str2)")
      ->each([&](const std::string&) { sim_w_set = true; });
  sim->add_option("--ra", sim_ra, "override every candidate's adjust range")
      ->each([&](const std::string&) { sim_ra_set = true; });
  sim->add_option("--tc", sim_tc, "calibration threshold (1.0 disables)");
  sim->add_option("--slots", sim_slots, "override slots per PV")
      ->each([&](const std::string&) { sim_slots_set = true; });
  sim->add_option("--reserve", sim_reserve, "reserve rank score (eCPM)");
  sim->add_flag("--budget,!--no-budget", sim_budget,
                "enforce campaign budgets (default on)");
  sim->add_option("--sweep-ra", sim_sweep,
                  "comma-separated adjust ranges; one sub-run each")
      ->delimiter(',');

  // compare -----------------------------------------------------------------
  auto* cmp = app.add_subcommand("compare", "Diff two simulate runs");
  std::string cmp_base, cmp_test, cmp_out;
  double cmp_min_conversions = 5.0;
  cmp->add_option("--base", cmp_base, "baseline run directory")->required();
  cmp->add_option("--test", cmp_test, "test run directory")->required();
  cmp->add_option("--out", cmp_out, "directory for delta CSVs");
  cmp->add_option("--min-conversions", cmp_min_conversions,
                  "per-campaign inclusion threshold (expected conversions)");

  // eval --------------------------------------------------------------------
  auto* eval = app.add_subcommand("eval", "AUC/GAUC and gap curve for a scores file");
  std::string eval_scores, eval_weight = "impressions", eval_out;
  std::size_t eval_buckets = 20;
  eval->add_option("--scores", eval_scores, "scores CSV path")->required();
  eval->add_option("--weight", eval_weight, "GAUC weights: impressions|clicks");
  eval->add_option("--out", eval_out, "directory for gap_curve.csv");
  eval->add_option("--buckets", eval_buckets, "gap curve buckets");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      ocpc::GenSpec spec = gen_spec_path.empty()
                               ? ocpc::GenSpec::desk_scale()
                               : ocpc::load_gen_spec(gen_spec_path);
      if (gen_seed_set) spec.seed = gen_seed;
      ocpc::cmd_generate(spec, gen_out);
    } else if (sim->parsed()) {
      ocpc::StrategyConfig config;
      config.strategy = parse_strategy(sim_strategy);
      const double objective_w = sim_w_set ? sim_w : 6.0;
      config.objective =
          ocpc::parse_objective(sim_objective, sim_alpha, objective_w);
      config.w = sim_w_set ? sim_w : 2.0;
      config.calibration_threshold = sim_tc;
      config.reserve_score = sim_reserve;
      config.enforce_budget = sim_budget;
      if (sim_ra_set) config.ra_override = sim_ra;
      if (sim_slots_set) config.slots_override = sim_slots;
      if (!sim_sweep.empty())
        ocpc::cmd_simulate_sweep(sim_log, sim_out, config, sim_sweep);
      else
        ocpc::cmd_simulate(sim_log, sim_out, config);
    } else if (cmp->parsed()) {
      std::optional<std::string> out_dir;
      if (!cmp_out.empty()) out_dir = cmp_out;
      ocpc::cmd_compare(cmp_base, cmp_test, out_dir, std::cout,
                        cmp_min_conversions);
    } else if (eval->parsed()) {
      ocpc::GaucWeight weight;
      if (eval_weight == "impressions") weight = ocpc::GaucWeight::impressions;
      else if (eval_weight == "clicks") weight = ocpc::GaucWeight::clicks;
      else ocpc::fail(ocpc::Errc::invalid_spec,
                      "--weight must be impressions or clicks");
      std::optional<std::string> out_dir;
      if (!eval_out.empty()) out_dir = eval_out;
      ocpc::cmd_eval(eval_scores, weight, out_dir, eval_buckets);
    }
  } catch (const ocpc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  }
  return 0;
}
