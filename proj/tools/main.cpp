#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "cdt/io.hpp"

namespace {

// Channel-source and solver flags shared by solve/sweep/oracle.
struct CommonArgs {
  std::string channel;
  std::string preset;
  cdt::PresetSpec preset_spec;
  double cost_limit = -1.0;  // < 0 means unset
  bool has_cost_limit = false;
};

void add_channel_flags(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--channel", args.channel, "channel spec JSON file");
  cmd->add_option("--preset", args.preset, "preset channel: binary | awgn");
  cmd->add_option("--q", args.preset_spec.q, "binary preset: P_S(1), in [0, 1/2]");
  cmd->add_option("--power-db", args.preset_spec.power_db, "awgn preset: input power in dB");
  cmd->add_option("--pam", args.preset_spec.pam, "awgn preset: PAM order M");
  cmd->add_option("--state-levels", args.preset_spec.state_levels, "awgn preset: state quantization levels");
  cmd->add_option("--output-levels", args.preset_spec.output_levels, "awgn preset: output bins");
  cmd->add_option("--range-sigma", args.preset_spec.range_sigma, "awgn preset: output grid margin in noise sigmas");
}

void add_solver_flags(CLI::App* cmd, cdt::RunConfig& cfg, CommonArgs& args) {
  cmd->add_option("--cost-limit", args.cost_limit, "input cost limit B (dual ascent)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--tol", cfg.tol, "convergence tolerance on the objective (nats)");
  cmd->add_option("--max-iters", cfg.max_iters, "outer iteration limit");
  cmd->add_option("--dual-step0", cfg.dual_step0, "initial dual ascent step");
  cmd->add_option("--dual-iters", cfg.dual_iters, "dual ascent iteration limit");
  cmd->add_option("--dual-tol", cfg.dual_tol, "dual ascent residual tolerance");
  cmd->add_option("--lambda0", cfg.lambda0, "initial dual variable");
}

void finish_config(cdt::RunConfig& cfg, const CommonArgs& args, const CLI::App* cmd) {
  if (!args.channel.empty()) cfg.channel_path = args.channel;
  if (!args.preset.empty()) {
    cdt::PresetSpec spec = args.preset_spec;
    spec.name = args.preset;
    cfg.preset = spec;
  }
  if (cmd->count("--cost-limit") > 0) cfg.cost_limit = args.cost_limit;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"capacity-distortion-cost tradeoff solver for state-dependent DMCs"};
  app.require_subcommand(1);

  cdt::RunConfig cfg;
  CommonArgs args;
  std::string format = "csv";

  auto* solve = app.add_subcommand("solve", "one modified Blahut-Arimoto solve at fixed mu");
  add_channel_flags(solve, args);
  add_solver_flags(solve, cfg, args);
  solve->add_option("--mu", cfg.mu, "distortion penalty weight")->check(CLI::NonNegativeNumber);
  solve->add_option("--out", cfg.out_path, "output file (default stdout)");
  solve->add_option("--format", format, "csv | json");
  solve->add_flag("--trace", cfg.trace, "write per-iteration trace to <out>.trace.csv");

  auto* sweep = app.add_subcommand("sweep", "trace the (C, D) curve over a mu grid");
  add_channel_flags(sweep, args);
  add_solver_flags(sweep, cfg, args);
  std::string mu_grid;
  sweep->add_option("--mu-grid", mu_grid, "start:stop:count,geometric|linear (default 0 + geometric ramp)");
  sweep->add_option("--out", cfg.out_path, "output file (default stdout)");
  sweep->add_option("--format", format, "csv | json");
  sweep->add_option("--jobs", cfg.jobs, "parallel sweep workers (needs --no-warm-start)");
  bool no_warm = false;
  sweep->add_flag("--no-warm-start", no_warm, "solve every point from the uniform start");

  auto* preset = app.add_subcommand("preset", "write a preset channel spec file");
  std::string preset_name;
  preset->add_option("name", preset_name, "binary | awgn")->required();
  preset->add_option("--q", args.preset_spec.q, "binary: P_S(1), in [0, 1/2]");
  preset->add_option("--power-db", args.preset_spec.power_db, "awgn: input power in dB");
  preset->add_option("--pam", args.preset_spec.pam, "awgn: PAM order M");
  preset->add_option("--state-levels", args.preset_spec.state_levels, "awgn: state quantization levels");
  preset->add_option("--output-levels", args.preset_spec.output_levels, "awgn: output bins");
  preset->add_option("--range-sigma", args.preset_spec.range_sigma, "awgn: output grid margin in sigmas");
  preset->add_option("--out", cfg.out_path, "channel file to write")->required();

  auto* oracle = app.add_subcommand("oracle", "exhaustive simplex-grid maximization (nx <= 4)");
  add_channel_flags(oracle, args);
  oracle->add_option("--mu", cfg.mu, "distortion penalty weight")->check(CLI::NonNegativeNumber);
  oracle->add_option("--step", cfg.oracle_step, "simplex grid step");
  oracle->add_option("--out", cfg.out_path, "output file (default stdout)");
  oracle->add_option("--format", format, "csv | json");

  auto* check = app.add_subcommand("check", "verify monotonicity/concavity of a curve CSV");
  check->add_option("curve", cfg.check_path, "curve CSV file")->required();
  check->add_option("--tol", cfg.check_tol, "tolerance in bits");
  check->add_option("--out", cfg.out_path, "report file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  if (format == "json")
    cfg.format = cdt::OutputFormat::kJson;
  else if (format != "csv") {
    std::cerr << "error: --format must be csv or json\n";
    return 1;
  }

  if (solve->parsed()) {
    cfg.command = cdt::Command::kSolve;
    finish_config(cfg, args, solve);
  } else if (sweep->parsed()) {
    cfg.command = cdt::Command::kSweep;
    finish_config(cfg, args, sweep);
    if (!mu_grid.empty()) cfg.mu_grid = mu_grid;
    cfg.warm_start = !no_warm;
  } else if (preset->parsed()) {
    cfg.command = cdt::Command::kPreset;
    cdt::PresetSpec spec = args.preset_spec;
    spec.name = preset_name;
    cfg.preset = spec;
  } else if (oracle->parsed()) {
    cfg.command = cdt::Command::kOracle;
    finish_config(cfg, args, oracle);
  } else if (check->parsed()) {
    cfg.command = cdt::Command::kCheck;
  }

  return cdt::run(cfg, std::cerr);
}
