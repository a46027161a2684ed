#pragma once

#include <optional>
#include <vector>

#include "cdt/model.hpp"

namespace cdt {

/// Options for one solve at a fixed distortion penalty mu and optional input
/// cost limit B.
struct SolveOptions {
  double mu = 0.0;                      // distortion penalty weight, >= 0
  std::optional<double> cost_limit;     // B; absent disables the dual loop (lambda == 0)
  double outer_tol = 1e-9;              // |change| of I - mu*E[c] in nats
  int max_outer_iters = 20000;
  double dual_step0 = 0.1;              // alpha_l = dual_step0 / sqrt(l)
  int dual_iters = 200;
  double dual_tol = 1e-7;               // on the KKT residual of the cost constraint
  double lambda0 = 1.0;                 // initial dual variable when B is set
  bool record_trace = false;
};

struct TraceRow {
  int iter;
  double objective_nats;
  double lambda;
  double cost;
  double distortion;
};

struct SolveResult {
  Pmf p_x;
  double rate_bits = 0.0;
  double distortion = 0.0;   // NaN when the model has no distortion measure
  double input_cost = 0.0;
  double lambda = 0.0;
  double mu = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<TraceRow> trace;  // filled when record_trace is set
};

// I(X;Y|S) in nats for input law p_x:
//   sum_s P_S(s) sum_{x,y} P_X(x) P_{Y|XS}(y|xs) log[ P_{Y|XS}(y|xs) / P_{Y|S}(y|s) ]
// with P_{Y|S}(y|s) = sum_x' P_X(x') P_{Y|XS}(y|x's) and 0 log 0 = 0.
double conditional_mutual_information(const Pmf& p_x, const StateChannel& ch);

// J(P_X, P_{Y|XS}, Q | P_S) in nats; q indexed [y][s][x].
// Returns -inf when Q(x|ys) = 0 on a term with positive weight.
double j_functional(const Pmf& p_x, const Tensor3& q, const StateChannel& ch);

// Q*(x|ys) = P_X(x) P_{Y|XS}(y|xs) / sum_x' P_X(x') P_{Y|XS}(y|x's), [y][s][x].
// Rows for unreachable (y,s) are set uniform; they never enter J.
Tensor3 update_q(const Pmf& p_x, const StateChannel& ch);

// P*(x) proportional to exp(g(x)) with
//   g(x) = sum_{s,y} P_S(s) P_{Y|XS}(y|xs) log Q(x|ys) - lambda b(x) - mu c(x).
// Computed with max subtraction; g(x) = -inf maps to probability zero. Throws
// std::domain_error if every g(x) is -inf.
Pmf update_p(const Tensor3& q, const StateChannel& ch, const std::vector<double>& c,
             const std::vector<double>& b, double lambda, double mu);

// Modified Blahut-Arimoto: alternate the Q and P steps from uniform (or the
// given warm start); with a cost limit the P step runs projected dual ascent
// on lambda with steps dual_step0/sqrt(l). Stops when the penalized objective
// I - mu*E[c] moves less than outer_tol. Throws std::invalid_argument when the
// cost limit is infeasible (B < min_x b(x)).
SolveResult solve(const ChannelModel& model, const SolveOptions& opts,
                  const Pmf* warm_start = nullptr);

}  // namespace cdt
