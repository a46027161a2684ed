#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cdt/tradeoff.hpp"

namespace cdt {

// --- channel spec files (UTF-8 JSON) ---------------------------------------
//
// Fields: nx, ns, ny, nz, p_s, kernel [x][s][y][z]; optional x_values,
// s_values, distortion {d, shat_values}, cost, estimator_mode
// ("restricted" | "posterior_mean"), id. Perfect-feedback channels may store
// the compact form instead of the dense kernel: perfect_feedback=true plus
// kernel_y [x][s][y] (z == y implied); the loader accepts both forms and the
// writer emits the compact one whenever the channel is perfect-feedback.

// Throws std::runtime_error with a diagnostic naming the first violated
// constraint (parse position, dimension, or normalization failure).
ChannelModel load_channel(const std::string& path);
void save_channel(const ChannelModel& m, const std::string& path);

// --- result serialization ---------------------------------------------------
// CSV columns: mu,lambda,rate_bits,distortion,input_cost,iterations,converged.
// JSON mirrors the CSV fields one-to-one.

void write_solve_csv(const SolveResult& r, std::ostream& os);
void write_curve_csv(const TradeoffCurve& curve, std::ostream& os);
void write_solve_json(const SolveResult& r, std::ostream& os);
void write_curve_json(const TradeoffCurve& curve, std::ostream& os);
void write_trace_csv(const std::vector<TraceRow>& trace, std::ostream& os);

// Reads a curve CSV (as written by write_curve_csv); columns located by
// header name. Throws std::runtime_error with the offending line number.
std::vector<CurvePoint> read_curve_csv(std::istream& is);

// "start:stop:count,geometric" or "start:stop:count,linear".
std::vector<double> parse_mu_grid(const std::string& spec);

// --- CLI --------------------------------------------------------------------

enum class Command { kSolve, kSweep, kPreset, kOracle, kCheck };
enum class OutputFormat { kCsv, kJson };

struct PresetSpec {
  std::string name;  // "binary" | "awgn"
  double q = 0.4;
  double power_db = 10.0;  // dB at the interface, linear internally
  int pam = 2;
  int state_levels = 64;
  int output_levels = 513;
  double range_sigma = 5.0;
};

ChannelModel build_preset(const PresetSpec& spec);

struct RunConfig {
  Command command = Command::kSolve;
  std::optional<std::string> channel_path;  // exactly one channel source
  std::optional<PresetSpec> preset;

  double mu = 0.0;
  std::optional<std::string> mu_grid;  // sweep; absent = default grid
  std::optional<double> cost_limit;
  double tol = 1e-9;
  int max_iters = 20000;
  double dual_step0 = 0.1;
  int dual_iters = 200;
  double dual_tol = 1e-7;
  double lambda0 = 1.0;

  std::string out_path;  // empty = stdout
  OutputFormat format = OutputFormat::kCsv;
  bool trace = false;  // per-iteration CSV next to the output file
  int jobs = 1;
  bool warm_start = true;

  double oracle_step = 1e-3;

  std::string check_path;
  double check_tol = 2e-3;
};

// Exit status: 0 success; 2 results written but some solve did not converge
// (or a checked curve failed); 1 error, message on err.
int run(const RunConfig& cfg, std::ostream& err);

}  // namespace cdt
