#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "cdt/builders.hpp"
#include "cdt/tradeoff.hpp"
#include "test_util.hpp"

using namespace cdt;

namespace {

double h2_bits(double p) {
  double h = 0.0;
  if (p > 0.0) h -= p * std::log2(p);
  if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
  return h;
}

}  // namespace

TEST_CASE("default mu grid: zero then a geometric ramp") {
  auto grid = default_mu_grid();
  REQUIRE(grid.size() == 32);
  CHECK(grid[0] == 0.0);
  CHECK(grid[1] == doctest::Approx(0.01));
  CHECK(grid[31] == doctest::Approx(0.01 * std::pow(1.3, 30)));
  for (size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] > grid[i - 1]);
}

TEST_CASE("binary sweep endpoints and closed-form agreement") {
  auto m = build_binary_multiplicative(0.4);
  SweepOptions opts;
  auto curve = sweep(m, default_mu_grid(), opts);
  REQUIRE(curve.points.size() == 32);

  const auto& first = curve.points.front();  // mu = 0
  CHECK(first.converged);
  CHECK(std::abs(first.distortion - 0.2) < 1e-4);
  CHECK(std::abs(first.rate_bits - 0.4) < 1e-4);

  const auto& last = curve.points.back();  // mu ~ 26: both coordinates near 0
  CHECK(last.converged);
  CHECK(last.distortion < 1e-3);
  CHECK(last.rate_bits < 1e-3);

  for (const auto& pt : curve.points) {
    if (!pt.converged) continue;
    double expect = 0.4 * h2_bits(pt.distortion / 0.4);
    CHECK(std::abs(pt.rate_bits - expect) < 1e-3);
  }

  // penalization monotonicity along ascending mu
  for (size_t i = 1; i < curve.points.size(); ++i) {
    CHECK(curve.points[i].distortion <= curve.points[i - 1].distortion + 1e-9);
    CHECK(curve.points[i].rate_bits <= curve.points[i - 1].rate_bits + 1e-9);
  }
}

TEST_CASE("single-point grid reduces to solve") {
  auto m = build_binary_multiplicative(0.4);
  SweepOptions opts;
  auto curve = sweep(m, {0.0}, opts);
  REQUIRE(curve.points.size() == 1);
  CHECK(std::abs(curve.points[0].rate_bits - 0.4) < 1e-4);
}

TEST_CASE("sweep rejects unsorted or negative grids") {
  auto m = build_binary_multiplicative(0.4);
  SweepOptions opts;
  CHECK_THROWS_AS(sweep(m, {0.5, 0.1}, opts), std::invalid_argument);
  CHECK_THROWS_AS(sweep(m, {-0.1, 0.5}, opts), std::invalid_argument);
  CHECK_THROWS_AS(sweep(m, {}, opts), std::invalid_argument);
}

TEST_CASE("sweep keeps non-converged points, flagged") {
  auto m = build_binary_multiplicative(0.4);
  SweepOptions opts;
  opts.solve.max_outer_iters = 1;
  auto curve = sweep(m, {0.0, 0.5}, opts);
  REQUIRE(curve.points.size() == 2);
  for (const auto& pt : curve.points) CHECK_FALSE(pt.converged);
}

TEST_CASE("warm and cold sweeps agree in objective") {
  std::mt19937 rng(71);
  auto m = cdt::test::random_pf_model(rng, 3, 2, 3);
  std::vector<double> grid{0.0, 0.3, 0.9, 2.7};
  SweepOptions warm;
  SweepOptions cold;
  cold.warm_start = false;
  auto cw = sweep(m, grid, warm);
  auto cc = sweep(m, grid, cold);
  constexpr double kLn2 = std::numbers::ln2_v<double>;
  for (size_t i = 0; i < grid.size(); ++i) {
    double ow = cw.points[i].rate_bits * kLn2 - grid[i] * cw.points[i].distortion;
    double oc = cc.points[i].rate_bits * kLn2 - grid[i] * cc.points[i].distortion;
    CHECK(std::abs(ow - oc) < 1e-6);
  }
}

TEST_CASE("parallel cold sweep matches sequential cold sweep") {
  std::mt19937 rng(73);
  auto m = cdt::test::random_pf_model(rng, 2, 2, 2);
  std::vector<double> grid{0.0, 0.2, 0.8, 1.6, 3.2};
  SweepOptions seq;
  seq.warm_start = false;
  SweepOptions par;
  par.warm_start = false;
  par.jobs = 4;
  auto cs = sweep(m, grid, seq);
  auto cp = sweep(m, grid, par);
  for (size_t i = 0; i < grid.size(); ++i) {
    CHECK(cp.points[i].rate_bits == doctest::Approx(cs.points[i].rate_bits).epsilon(1e-12));
    CHECK(cp.points[i].distortion == doctest::Approx(cs.points[i].distortion).epsilon(1e-12));
  }
}

TEST_CASE("binary closed form values") {
  auto [c1, d1] = binary_closed_form(0.4, 0.5);
  CHECK(c1 == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(d1 == doctest::Approx(0.2).epsilon(1e-12));

  auto [c2, d2] = binary_closed_form(0.4, 0.0);
  CHECK(c2 == doctest::Approx(0.0));
  CHECK(d2 == doctest::Approx(0.0));

  auto [c3, d3] = binary_closed_form(0.5, 0.25);  // H2(0.25) = 0.811278 bits
  CHECK(c3 == doctest::Approx(0.405639).epsilon(1e-6));
  CHECK(d3 == doctest::Approx(0.125).epsilon(1e-12));

  CHECK_THROWS_AS(binary_closed_form(0.6, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(binary_closed_form(0.4, 0.7), std::invalid_argument);
}

TEST_CASE("grid oracle on the binary channel at mu=0") {
  auto m = build_binary_multiplicative(0.4);
  auto res = grid_oracle(m, 0.0, 1e-3);
  CHECK(std::abs(res.p_x[0] - 0.5) < 2e-3);
  CHECK(res.objective_nats == doctest::Approx(0.4 * std::numbers::ln2_v<double>).epsilon(1e-6));
}

TEST_CASE("grid oracle with a huge penalty picks the cheapest symbol") {
  auto m = build_binary_multiplicative(0.4);
  auto res = grid_oracle(m, 1e6, 1e-2);
  CHECK(res.p_x[1] == doctest::Approx(1.0));  // c(1) = 0
}

TEST_CASE("coarse grid oracle is suboptimal but legal") {
  auto m = build_binary_multiplicative(0.4);
  auto coarse = grid_oracle(m, 0.3, 0.5);   // grid {0, 0.5, 1}
  auto fine = grid_oracle(m, 0.3, 1e-3);
  CHECK(coarse.objective_nats <= fine.objective_nats + 1e-12);
}

TEST_CASE("grid oracle rejects nx > 4") {
  std::mt19937 rng(79);
  ChannelModel m;
  m.channel = cdt::test::random_pf_channel(rng, 5, 2, 2);
  CHECK_THROWS_AS(grid_oracle(m, 0.0, 0.1), std::invalid_argument);
}

TEST_CASE("curve checks pass on the closed-form frontier") {
  std::vector<CurvePoint> pts;
  for (double p = 0.0; p <= 0.5001; p += 0.1) {
    auto [c, d] = binary_closed_form(0.4, std::min(p, 0.5));
    pts.push_back({d, c, true});
  }
  auto rep = check_curve_properties(pts, 1e-6);
  CHECK(rep.ok());
  CHECK(rep.violations.empty());
}

TEST_CASE("a bumped point breaks concavity") {
  const double tol = 1e-3;
  std::vector<CurvePoint> pts;
  for (double p = 0.05; p <= 0.5001; p += 0.05) {
    auto [c, d] = binary_closed_form(0.4, std::min(p, 0.5));
    pts.push_back({d, c, true});
  }
  pts[4].rate_bits += 10 * tol;
  auto rep = check_curve_properties(pts, tol);
  CHECK_FALSE(rep.concave_ok);
  CHECK_FALSE(rep.violations.empty());
}

TEST_CASE("a dropped point breaks monotonicity") {
  std::vector<CurvePoint> pts = {
      {0.0, 0.0, true}, {0.1, 0.3, true}, {0.15, 0.1, true}, {0.2, 0.4, true}};
  auto rep = check_curve_properties(pts, 1e-3);
  CHECK_FALSE(rep.monotone_ok);
}

TEST_CASE("curve check needs three converged points") {
  std::vector<CurvePoint> two = {{0.0, 0.0, true}, {0.1, 0.1, true}};
  CHECK_THROWS_AS(check_curve_properties(two, 1e-3), std::invalid_argument);
  std::vector<CurvePoint> flagged = {
      {0.0, 0.0, true}, {0.1, 0.1, true}, {0.2, 0.2, false}};
  CHECK_THROWS_AS(check_curve_properties(flagged, 1e-3), std::invalid_argument);
}

TEST_CASE("separation baseline: segment, midpoint, degenerate corners") {
  auto seg = separation_baseline({0.0, 0.0}, {0.4, 0.4}, 3);
  REQUIRE(seg.size() == 3);
  CHECK(seg[1].first == doctest::Approx(0.2));
  CHECK(seg[1].second == doctest::Approx(0.2));

  auto two = separation_baseline({0.1, 0.2}, {0.3, 0.4}, 2);
  REQUIRE(two.size() == 2);
  CHECK(two[0].first == doctest::Approx(0.1));
  CHECK(two[1].second == doctest::Approx(0.4));

  auto same = separation_baseline({0.3, 0.3}, {0.3, 0.3}, 5);
  for (const auto& pt : same) {
    CHECK(pt.first == doctest::Approx(0.3));
    CHECK(pt.second == doctest::Approx(0.3));
  }
}

TEST_CASE("joint design dominates time-sharing on the binary example") {
  auto m = build_binary_multiplicative(0.4);
  SweepOptions opts;
  auto curve = sweep(m, default_mu_grid(), opts);
  // baseline through (0,0) and (q, q): C = D
  for (const auto& pt : curve.points) {
    if (!pt.converged) continue;
    if (pt.distortion < 0.02 || pt.distortion > 0.19) continue;  // interior only
    CHECK(pt.rate_bits > pt.distortion);
  }
}
