#include "cdt/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace cdt {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<double> softmax(const std::vector<double>& g) {
  double mx = kNegInf;
  for (double v : g) mx = std::max(mx, v);
  if (!(mx > kNegInf)) throw std::domain_error("update_p: every exponent is -inf (degenerate Q)");
  std::vector<double> p(g.size(), 0.0);
  double sum = 0.0;
  for (size_t i = 0; i < g.size(); ++i) {
    if (g[i] == kNegInf) continue;
    p[i] = std::exp(g[i] - mx);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// KKT residual of the cost constraint E[b] <= B: primal violation plus the
// complementary-slackness mismatch (lambda > 0 demands E[b] == B).
double dual_residual(double lambda, double cost, double limit) {
  double v = cost - limit;
  return std::max(0.0, v) + std::min(lambda, std::abs(v));
}

}  // namespace

double conditional_mutual_information(const Pmf& p_x, const StateChannel& ch) {
  if (p_x.size() != ch.nx)
    throw std::invalid_argument("conditional_mutual_information: p_x size does not match nx");
  Tensor3 w = marginal_y_given_xs(ch);
  std::vector<double> p_y_s(ch.ny, 0.0);
  double total = 0.0;
  for (int s = 0; s < ch.ns; ++s) {
    const double ps = ch.p_s[s];
    if (ps <= 0.0) continue;
    std::fill(p_y_s.begin(), p_y_s.end(), 0.0);
    for (int x = 0; x < ch.nx; ++x) {
      const double px = p_x[x];
      if (px <= 0.0) continue;
      for (int y = 0; y < ch.ny; ++y) p_y_s[y] += px * w(x, s, y);
    }
    for (int x = 0; x < ch.nx; ++x) {
      const double px = p_x[x];
      if (px <= 0.0) continue;
      double acc = 0.0;
      for (int y = 0; y < ch.ny; ++y) {
        const double wy = w(x, s, y);
        if (wy <= 0.0) continue;
        acc += wy * std::log(wy / p_y_s[y]);
      }
      total += ps * px * acc;
    }
  }
  return std::max(total, 0.0);
}

double j_functional(const Pmf& p_x, const Tensor3& q, const StateChannel& ch) {
  if (p_x.size() != ch.nx || q.dim0() != ch.ny || q.dim1() != ch.ns || q.dim2() != ch.nx)
    throw std::invalid_argument("j_functional: dimension mismatch");
  Tensor3 w = marginal_y_given_xs(ch);
  double total = 0.0;
  for (int s = 0; s < ch.ns; ++s) {
    const double ps = ch.p_s[s];
    if (ps <= 0.0) continue;
    for (int x = 0; x < ch.nx; ++x) {
      const double px = p_x[x];
      if (px <= 0.0) continue;
      for (int y = 0; y < ch.ny; ++y) {
        const double wy = w(x, s, y);
        if (wy <= 0.0) continue;
        const double qv = q(y, s, x);
        if (qv <= 0.0) return kNegInf;  // legal marker: Q kills a positive-weight term
        total += ps * px * wy * std::log(qv / px);
      }
    }
  }
  return total;
}

Tensor3 update_q(const Pmf& p_x, const StateChannel& ch) {
  if (p_x.size() != ch.nx) throw std::invalid_argument("update_q: p_x size does not match nx");
  Tensor3 w = marginal_y_given_xs(ch);
  Tensor3 q(ch.ny, ch.ns, ch.nx, 0.0);
  for (int y = 0; y < ch.ny; ++y)
    for (int s = 0; s < ch.ns; ++s) {
      double denom = 0.0;
      for (int x = 0; x < ch.nx; ++x) denom += p_x[x] * w(x, s, y);
      if (denom > 0.0) {
        for (int x = 0; x < ch.nx; ++x) q(y, s, x) = p_x[x] * w(x, s, y) / denom;
      } else {
        for (int x = 0; x < ch.nx; ++x) q(y, s, x) = 1.0 / ch.nx;
      }
    }
  return q;
}

Pmf update_p(const Tensor3& q, const StateChannel& ch, const std::vector<double>& c,
             const std::vector<double>& b, double lambda, double mu) {
  if (q.dim0() != ch.ny || q.dim1() != ch.ns || q.dim2() != ch.nx)
    throw std::invalid_argument("update_p: q dimensions do not match channel");
  if (!c.empty() && static_cast<int>(c.size()) != ch.nx)
    throw std::invalid_argument("update_p: c size does not match nx");
  if (!b.empty() && static_cast<int>(b.size()) != ch.nx)
    throw std::invalid_argument("update_p: b size does not match nx");
  if (lambda < 0.0 || mu < 0.0) throw std::invalid_argument("update_p: lambda and mu must be >= 0");

  Tensor3 w = marginal_y_given_xs(ch);
  std::vector<double> g(ch.nx, 0.0);
  for (int x = 0; x < ch.nx; ++x) {
    double acc = 0.0;
    bool neg_inf = false;
    for (int s = 0; s < ch.ns && !neg_inf; ++s) {
      const double ps = ch.p_s[s];
      if (ps <= 0.0) continue;
      for (int y = 0; y < ch.ny; ++y) {
        const double wy = w(x, s, y);
        if (wy <= 0.0) continue;
        const double qv = q(y, s, x);
        if (qv <= 0.0) {
          neg_inf = true;
          break;
        }
        acc += ps * wy * std::log(qv);
      }
    }
    if (neg_inf) {
      g[x] = kNegInf;
      continue;
    }
    if (!c.empty()) acc -= mu * c[x];
    if (!b.empty()) acc -= lambda * b[x];
    g[x] = acc;
  }
  return Pmf(softmax(g));
}

SolveResult solve(const ChannelModel& model, const SolveOptions& opts, const Pmf* warm_start) {
  const StateChannel& ch = model.channel;
  if (opts.mu < 0.0) throw std::invalid_argument("solve: mu must be >= 0");
  if (opts.outer_tol <= 0.0 || opts.dual_tol <= 0.0 || opts.dual_step0 <= 0.0)
    throw std::invalid_argument("solve: tolerances and dual step must be > 0");
  if (opts.max_outer_iters <= 0 || opts.dual_iters <= 0)
    throw std::invalid_argument("solve: iteration limits must be > 0");

  std::vector<double> b = model.cost.b;
  if (b.empty()) b.assign(ch.nx, 0.0);
  if (static_cast<int>(b.size()) != ch.nx)
    throw std::invalid_argument("solve: cost vector size does not match nx");

  std::vector<double> c;
  if (model.distortion.has_value()) {
    EstimatorTable est = optimal_estimator(ch, *model.distortion, model.estimator_mode);
    c = distortion_cost(ch, est, *model.distortion);
  } else if (opts.mu > 0.0) {
    throw std::invalid_argument("solve: distortion required for solve/sweep with mu > 0");
  }

  if (opts.cost_limit) {
    double bmin = *std::min_element(b.begin(), b.end());
    if (*opts.cost_limit < bmin - 1e-12)
      throw std::invalid_argument("solve: infeasible cost limit (B < min_x b(x))");
  }

  Tensor3 w = marginal_y_given_xs(ch);

  // a(x) = sum_{s,y} P_S(s) W(y|x,s) log W(y|x,s); constant across iterations.
  std::vector<double> a(ch.nx, 0.0);
  for (int x = 0; x < ch.nx; ++x) {
    double acc = 0.0;
    for (int s = 0; s < ch.ns; ++s) {
      const double ps = ch.p_s[s];
      if (ps <= 0.0) continue;
      for (int y = 0; y < ch.ny; ++y) {
        const double wy = w(x, s, y);
        if (wy > 0.0) acc += ps * wy * std::log(wy);
      }
    }
    a[x] = acc;
  }

  std::vector<double> p;
  if (warm_start) {
    if (warm_start->size() != ch.nx)
      throw std::invalid_argument("solve: warm start size does not match nx");
    p = warm_start->probs();
  } else {
    p.assign(ch.nx, 1.0 / ch.nx);
  }

  double lambda = opts.cost_limit ? opts.lambda0 : 0.0;
  double prev_obj = std::numeric_limits<double>::quiet_NaN();
  bool converged = false;
  int iters_run = 0;
  double dual_resid = 0.0;

  SolveResult res;
  res.mu = opts.mu;

  // Work buffers: denom(s,y) = sum_x p(x) W(y|x,s) = P_{Y|S}(y|s).
  const size_t nsy = static_cast<size_t>(ch.ns) * ch.ny;
  std::vector<double> denom(nsy), log_denom(nsy);
  std::vector<double> t(ch.nx), g(ch.nx);

  auto fill_denom = [&](const std::vector<double>& px) {
    std::fill(denom.begin(), denom.end(), 0.0);
    for (int x = 0; x < ch.nx; ++x) {
      const double pv = px[x];
      if (pv <= 0.0) continue;
      for (int s = 0; s < ch.ns; ++s) {
        double* row = denom.data() + static_cast<size_t>(s) * ch.ny;
        for (int y = 0; y < ch.ny; ++y) row[y] += pv * w(x, s, y);
      }
    }
  };

  for (int iter = 1; iter <= opts.max_outer_iters; ++iter) {
    iters_run = iter;

    // Q step folded into the exponent:
    //   t(x) = log p(x) + a(x) - sum_{s,y} P_S(s) W(y|x,s) log P_{Y|S}(y|s)
    // which equals sum_{s,y} P_S W log Q*(x|ys) for Q* from the current p.
    fill_denom(p);
    for (size_t i = 0; i < nsy; ++i) log_denom[i] = denom[i] > 0.0 ? std::log(denom[i]) : 0.0;
    for (int x = 0; x < ch.nx; ++x) {
      if (p[x] <= 0.0) {
        t[x] = kNegInf;
        continue;
      }
      double acc = 0.0;
      for (int s = 0; s < ch.ns; ++s) {
        const double ps = ch.p_s[s];
        if (ps <= 0.0) continue;
        const double* ld = log_denom.data() + static_cast<size_t>(s) * ch.ny;
        double inner = 0.0;
        for (int y = 0; y < ch.ny; ++y) inner += w(x, s, y) * ld[y];
        acc += ps * inner;
      }
      t[x] = std::log(p[x]) + a[x] - acc;
    }

    // P step: plain softmax without a cost limit, projected dual ascent with.
    if (opts.cost_limit) {
      const double limit = *opts.cost_limit;
      for (int l = 1; l <= opts.dual_iters; ++l) {
        for (int x = 0; x < ch.nx; ++x) {
          double gx = t[x];
          if (gx != kNegInf) {
            gx -= lambda * b[x];
            if (!c.empty()) gx -= opts.mu * c[x];
          }
          g[x] = gx;
        }
        p = softmax(g);
        const double cost = dot(b, p);
        dual_resid = dual_residual(lambda, cost, limit);
        if (dual_resid < opts.dual_tol) break;
        const double step = opts.dual_step0 / std::sqrt(static_cast<double>(l));
        lambda = std::max(0.0, lambda + step * (cost - limit));
      }
    } else {
      for (int x = 0; x < ch.nx; ++x) {
        double gx = t[x];
        if (gx != kNegInf && !c.empty()) gx -= opts.mu * c[x];
        g[x] = gx;
      }
      p = softmax(g);
    }

    // Penalized objective I - mu E[c] at the new p.
    fill_denom(p);
    double cond_ent = 0.0;  // H(Y|S)
    for (int s = 0; s < ch.ns; ++s) {
      const double ps = ch.p_s[s];
      if (ps <= 0.0) continue;
      const double* row = denom.data() + static_cast<size_t>(s) * ch.ny;
      double h = 0.0;
      for (int y = 0; y < ch.ny; ++y)
        if (row[y] > 0.0) h += row[y] * std::log(row[y]);
      cond_ent -= ps * h;
    }
    double mi = cond_ent + dot(p, a);  // I = H(Y|S) - H(Y|XS)
    double e_c = c.empty() ? 0.0 : dot(c, p);
    double obj = mi - opts.mu * e_c;

    if (opts.record_trace)
      res.trace.push_back({iter, obj, lambda, dot(b, p), c.empty() ? 0.0 : e_c});

    if (iter > 1 && std::abs(obj - prev_obj) < opts.outer_tol) {
      converged = !opts.cost_limit || dual_resid < opts.dual_tol;
      break;
    }
    prev_obj = obj;
  }

  res.p_x = Pmf(p);
  res.rate_bits = conditional_mutual_information(res.p_x, ch) / std::numbers::ln2_v<double>;
  res.distortion = c.empty() ? std::numeric_limits<double>::quiet_NaN() : dot(c, p);
  res.input_cost = dot(b, p);
  res.lambda = lambda;
  res.iterations = iters_run;
  res.converged = converged;
  return res;
}

}  // namespace cdt
