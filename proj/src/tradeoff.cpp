#include "cdt/tradeoff.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <future>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace cdt {

namespace {

double h2_bits(double p) {
  double h = 0.0;
  if (p > 0.0) h -= p * std::log2(p);
  if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
  return h;
}

double cross(std::pair<double, double> o, std::pair<double, double> a,
             std::pair<double, double> b) {
  return (a.first - o.first) * (b.second - o.second) -
         (a.second - o.second) * (b.first - o.first);
}

// Upper concave envelope of points sorted ascending in x.
std::vector<std::pair<double, double>> upper_hull(std::vector<std::pair<double, double>> pts) {
  std::vector<std::pair<double, double>> hull;
  for (const auto& p : pts) {
    while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) >= 0.0)
      hull.pop_back();
    hull.push_back(p);
  }
  return hull;
}

double hull_value_at(const std::vector<std::pair<double, double>>& hull, double x) {
  if (hull.size() == 1) return hull.front().second;
  if (x <= hull.front().first) return hull.front().second;
  if (x >= hull.back().first) return hull.back().second;
  for (size_t i = 1; i < hull.size(); ++i) {
    if (x <= hull[i].first) {
      double x0 = hull[i - 1].first, y0 = hull[i - 1].second;
      double x1 = hull[i].first, y1 = hull[i].second;
      if (x1 - x0 <= 0.0) return std::max(y0, y1);
      double t = (x - x0) / (x1 - x0);
      return y0 + t * (y1 - y0);
    }
  }
  return hull.back().second;
}

}  // namespace

std::vector<double> default_mu_grid() {
  std::vector<double> grid;
  grid.push_back(0.0);
  for (int k = 0; k <= 30; ++k) grid.push_back(0.01 * std::pow(1.3, k));
  return grid;
}

TradeoffCurve sweep(const ChannelModel& model, const std::vector<double>& mu_grid,
                    const SweepOptions& opts) {
  if (mu_grid.empty()) throw std::invalid_argument("sweep: empty mu grid");
  for (size_t i = 0; i < mu_grid.size(); ++i) {
    if (mu_grid[i] < 0.0) throw std::invalid_argument("sweep: mu grid entries must be >= 0");
    if (i > 0 && mu_grid[i] < mu_grid[i - 1])
      throw std::invalid_argument("sweep: mu grid must be sorted ascending");
  }

  TradeoffCurve curve;
  curve.channel_id = model.id;
  curve.cost_limit = opts.solve.cost_limit;
  curve.points.resize(mu_grid.size());

  if (!opts.warm_start && opts.jobs > 1) {
    std::atomic<size_t> next{0};
    auto worker = [&]() {
      for (;;) {
        size_t i = next.fetch_add(1);
        if (i >= mu_grid.size()) return;
        SolveOptions so = opts.solve;
        so.mu = mu_grid[i];
        curve.points[i] = solve(model, so, nullptr);
      }
    };
    int jobs = std::min<int>(opts.jobs, static_cast<int>(mu_grid.size()));
    std::vector<std::future<void>> futs;
    for (int j = 0; j < jobs; ++j) futs.push_back(std::async(std::launch::async, worker));
    for (auto& f : futs) f.get();
    return curve;
  }

  const Pmf* start = nullptr;
  for (size_t i = 0; i < mu_grid.size(); ++i) {
    SolveOptions so = opts.solve;
    so.mu = mu_grid[i];
    curve.points[i] = solve(model, so, start);
    if (opts.warm_start) start = &curve.points[i].p_x;
  }
  return curve;
}

std::pair<double, double> binary_closed_form(double q, double p) {
  if (!(q >= 0.0 && q <= 0.5)) throw std::invalid_argument("binary_closed_form: q outside [0, 1/2]");
  if (!(p >= 0.0 && p <= 0.5)) throw std::invalid_argument("binary_closed_form: p outside [0, 1/2]");
  return {q * h2_bits(p), q * p};
}

GridOracleResult grid_oracle(const ChannelModel& model, double mu, double step) {
  const StateChannel& ch = model.channel;
  if (ch.nx > 4) throw std::invalid_argument("grid_oracle: nx must be <= 4");
  if (!(step > 0.0 && step <= 1.0)) throw std::invalid_argument("grid_oracle: bad step");
  if (mu < 0.0) throw std::invalid_argument("grid_oracle: mu must be >= 0");

  std::vector<double> c;
  if (model.distortion.has_value()) {
    EstimatorTable est = optimal_estimator(ch, *model.distortion, model.estimator_mode);
    c = distortion_cost(ch, est, *model.distortion);
  } else if (mu > 0.0) {
    throw std::invalid_argument("grid_oracle: distortion required when mu > 0");
  }

  const int n_ticks = std::max(1, static_cast<int>(std::llround(1.0 / step)));
  std::vector<int> counts(ch.nx, 0);
  std::vector<double> probs(ch.nx, 0.0);
  GridOracleResult best;
  best.objective_nats = -std::numeric_limits<double>::infinity();

  // Enumerate compositions of n_ticks into nx parts.
  auto evaluate = [&]() {
    for (int x = 0; x < ch.nx; ++x) probs[x] = static_cast<double>(counts[x]) / n_ticks;
    Pmf p(probs);
    double obj = conditional_mutual_information(p, ch);
    if (!c.empty()) {
      double e_c = 0.0;
      for (int x = 0; x < ch.nx; ++x) e_c += c[x] * probs[x];
      obj -= mu * e_c;
    }
    if (obj > best.objective_nats) {
      best.objective_nats = obj;
      best.p_x = p;
    }
  };
  std::function<void(int, int)> rec = [&](int dim, int remaining) {
    if (dim == ch.nx - 1) {
      counts[dim] = remaining;
      evaluate();
      return;
    }
    for (int k = 0; k <= remaining; ++k) {
      counts[dim] = k;
      rec(dim + 1, remaining - k);
    }
  };
  rec(0, n_ticks);
  return best;
}

CurveCheckReport check_curve_properties(const std::vector<CurvePoint>& points, double tol) {
  if (tol <= 0.0) throw std::invalid_argument("check_curve_properties: tol must be > 0");
  std::vector<std::pair<double, double>> pts;  // (D, C)
  for (const auto& p : points)
    if (p.converged) pts.emplace_back(p.distortion, p.rate_bits);
  if (pts.size() < 3)
    throw std::invalid_argument("check_curve_properties: need at least 3 converged points");

  std::sort(pts.begin(), pts.end());

  CurveCheckReport report;
  report.monotone_ok = true;
  report.concave_ok = true;

  double max_c = pts.front().second;
  for (size_t i = 1; i < pts.size(); ++i) {
    if (pts[i].second < max_c - tol) {
      report.monotone_ok = false;
      std::ostringstream os;
      os << "rate decreases at D=" << pts[i].first << " (C=" << pts[i].second
         << " after max " << max_c << ")";
      report.violations.push_back(os.str());
    }
    max_c = std::max(max_c, pts[i].second);
  }

  // Collapse near-equal distortions to their best rate before hull building.
  std::vector<std::pair<double, double>> collapsed;
  for (const auto& p : pts) {
    if (!collapsed.empty() && p.first - collapsed.back().first < 1e-15)
      collapsed.back().second = std::max(collapsed.back().second, p.second);
    else
      collapsed.push_back(p);
  }
  auto hull = upper_hull(collapsed);
  for (const auto& p : pts) {
    double env = hull_value_at(hull, p.first);
    if (env - p.second > tol) {
      report.concave_ok = false;
      std::ostringstream os;
      os << "point (D=" << p.first << ", C=" << p.second << ") lies " << env - p.second
         << " below the concave envelope";
      report.violations.push_back(os.str());
    }
  }
  return report;
}

CurveCheckReport check_curve_properties(const TradeoffCurve& curve, double tol) {
  std::vector<CurvePoint> pts;
  pts.reserve(curve.points.size());
  for (const auto& r : curve.points)
    pts.push_back({r.distortion, r.rate_bits, r.converged});
  return check_curve_properties(pts, tol);
}

std::vector<std::pair<double, double>> separation_baseline(std::pair<double, double> corner_low,
                                                           std::pair<double, double> corner_high,
                                                           int n_points) {
  if (n_points <= 0) throw std::invalid_argument("separation_baseline: n_points must be > 0");
  std::vector<std::pair<double, double>> seg;
  if (n_points == 1) {
    seg.push_back(corner_low);
    return seg;
  }
  for (int i = 0; i < n_points; ++i) {
    double t = static_cast<double>(i) / (n_points - 1);
    seg.emplace_back(corner_low.first + t * (corner_high.first - corner_low.first),
                     corner_low.second + t * (corner_high.second - corner_low.second));
  }
  return seg;
}

}  // namespace cdt
