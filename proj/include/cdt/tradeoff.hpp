#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cdt/solver.hpp"

namespace cdt {

/// One (C_mu(B), D_mu(B)) point per mu, ascending in mu.
struct TradeoffCurve {
  std::vector<SolveResult> points;
  std::string channel_id;
  std::optional<double> cost_limit;
};

struct SweepOptions {
  SolveOptions solve;      // mu is overridden per grid point
  bool warm_start = true;  // reuse the previous point's P_X as the next start
  int jobs = 1;            // parallel points; only used when warm_start is off
};

// Default mu grid: {0} followed by a geometric ramp 0.01 * 1.3^k, k = 0..30.
std::vector<double> default_mu_grid();

// One solve per mu. The grid must be sorted ascending and nonnegative.
// Non-converged points are kept in the curve with converged == false.
TradeoffCurve sweep(const ChannelModel& model, const std::vector<double>& mu_grid,
                    const SweepOptions& opts);

// Closed form for the binary multiplicative-state channel:
//   C(p) = q H2(p) bits, D(p) = q p,  q in [0, 1/2], p in [0, 1/2].
std::pair<double, double> binary_closed_form(double q, double p);

struct GridOracleResult {
  Pmf p_x;
  double objective_nats = 0.0;
};

// Exhaustive maximization of I - mu E[c] over the simplex discretized with the
// given step. Independent check for solve; nx <= 4 (combinatorial grid).
GridOracleResult grid_oracle(const ChannelModel& model, double mu, double step);

struct CurvePoint {
  double distortion = 0.0;
  double rate_bits = 0.0;
  bool converged = true;
};

struct CurveCheckReport {
  bool monotone_ok = false;
  bool concave_ok = false;
  std::vector<std::string> violations;
  bool ok() const { return monotone_ok && concave_ok; }
};

// Structural checks on a swept frontier: sorted by distortion, the rate must
// be nondecreasing within tol, and no point may sit more than tol below the
// upper concave envelope of the point set. Needs >= 3 converged points.
CurveCheckReport check_curve_properties(const std::vector<CurvePoint>& points, double tol);
CurveCheckReport check_curve_properties(const TradeoffCurve& curve, double tol);

// Time-sharing segment between two (D, C) corners, inclusive.
std::vector<std::pair<double, double>> separation_baseline(std::pair<double, double> corner_low,
                                                           std::pair<double, double> corner_high,
                                                           int n_points);

}  // namespace cdt
