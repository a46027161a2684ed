#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "cdt/builders.hpp"
#include "cdt/solver.hpp"
#include "cdt/tradeoff.hpp"
#include "test_util.hpp"

using namespace cdt;

namespace {

constexpr double kLn2 = std::numbers::ln2_v<double>;

double h2_nats(double p) {
  double h = 0.0;
  if (p > 0.0) h -= p * std::log(p);
  if (p < 1.0) h -= (1.0 - p) * std::log(1.0 - p);
  return h;
}

// Golden-section maximization of a concave scalar function on [lo, hi].
template <typename Fn>
double golden_max(Fn f, double lo, double hi) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  for (int i = 0; i < 200; ++i) {
    if (f(c) > f(d))
      b = d;
    else
      a = c;
    c = b - inv_phi * (b - a);
    d = a + inv_phi * (b - a);
  }
  return 0.5 * (a + b);
}

Tensor3 random_q(std::mt19937& rng, int ny, int ns, int nx) {
  Tensor3 q(ny, ns, nx, 0.0);
  for (int y = 0; y < ny; ++y)
    for (int s = 0; s < ns; ++s) {
      auto row = cdt::test::random_simplex(rng, nx);
      for (int x = 0; x < nx; ++x) q(y, s, x) = row[x];
    }
  return q;
}

}  // namespace

TEST_CASE("conditional MI on the binary channel equals q*H2(p)") {
  auto m = build_binary_multiplicative(0.4);

  double i_half = conditional_mutual_information(Pmf({0.5, 0.5}), m.channel);
  CHECK(i_half == doctest::Approx(0.4 * kLn2).epsilon(1e-12));  // 0.27726 nats
  CHECK(i_half / kLn2 == doctest::Approx(0.4).epsilon(1e-12));  // 0.4 bits

  double i_p11 = conditional_mutual_information(Pmf({0.11, 0.89}), m.channel);
  CHECK(i_p11 == doctest::Approx(0.4 * h2_nats(0.11)).epsilon(1e-12));

  double i_point = conditional_mutual_information(Pmf::point_mass(2, 1), m.channel);
  CHECK(i_point == doctest::Approx(0.0));
}

TEST_CASE("J at the Bayes posterior collapses to the mutual information") {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    auto ch = cdt::test::random_pf_channel(rng, 3, 2, 3);
    Pmf p(cdt::test::random_simplex(rng, 3));
    auto q_star = update_q(p, ch);
    CHECK(j_functional(p, q_star, ch) ==
          doctest::Approx(conditional_mutual_information(p, ch)).epsilon(1e-12));
  }
}

TEST_CASE("J with Q = P_X replicated is zero") {
  std::mt19937 rng(33);
  auto ch = cdt::test::random_pf_channel(rng, 3, 2, 3);
  Pmf p(cdt::test::random_simplex(rng, 3));
  Tensor3 q(ch.ny, ch.ns, ch.nx, 0.0);
  for (int y = 0; y < ch.ny; ++y)
    for (int s = 0; s < ch.ns; ++s)
      for (int x = 0; x < ch.nx; ++x) q(y, s, x) = p[x];
  CHECK(j_functional(p, q, ch) == doctest::Approx(0.0));
}

TEST_CASE("Q* maximizes J over Q (Theorem 2b)") {
  std::mt19937 rng(37);
  auto m = build_binary_multiplicative(0.4);
  Pmf p({0.5, 0.5});
  double j_star = j_functional(p, update_q(p, m.channel), m.channel);
  for (int trial = 0; trial < 50; ++trial) {
    Tensor3 q = random_q(rng, m.channel.ny, m.channel.ns, m.channel.nx);
    CHECK(j_functional(p, q, m.channel) <= j_star + 1e-12);
  }
}

TEST_CASE("J returns -inf when Q kills a positive-weight term") {
  auto m = build_binary_multiplicative(0.4);
  Pmf p({0.5, 0.5});
  Tensor3 q(2, 2, 2, 0.5);
  q(0, 0, 0) = 0.0;  // (y=0,s=0,x=0) has positive weight
  q(0, 0, 1) = 1.0;
  CHECK(j_functional(p, q, m.channel) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("update_q hand values on the binary channel") {
  auto m = build_binary_multiplicative(0.4);
  auto q = update_q(Pmf({0.5, 0.5}), m.channel);
  // given s=1, y reveals x: y=1 forces x=1, y=0 forces x=0
  CHECK(q(1, 1, 1) == doctest::Approx(1.0));
  CHECK(q(1, 1, 0) == doctest::Approx(0.0));
  CHECK(q(0, 1, 0) == doctest::Approx(1.0));
  // given s=0, y=0 carries no information: Q* = P_X
  CHECK(q(0, 0, 0) == doctest::Approx(0.5));
  CHECK(q(0, 0, 1) == doctest::Approx(0.5));
}

TEST_CASE("update_q with an input-independent channel returns P_X") {
  std::mt19937 rng(41);
  Tensor3 w(3, 2, 4, 0.0);
  for (int s = 0; s < 2; ++s) {
    auto row = cdt::test::random_simplex(rng, 4);
    for (int x = 0; x < 3; ++x)
      for (int y = 0; y < 4; ++y) w(x, s, y) = row[y];
  }
  auto ch = from_perfect_feedback(w, Pmf({0.3, 0.7}));
  Pmf p(cdt::test::random_simplex(rng, 3));
  auto q = update_q(p, ch);
  for (int y = 0; y < 4; ++y)
    for (int s = 0; s < 2; ++s)
      for (int x = 0; x < 3; ++x) CHECK(q(y, s, x) == doctest::Approx(p[x]).epsilon(1e-12));
}

TEST_CASE("update_p keeps the symmetric fixed point uniform") {
  auto m = build_binary_multiplicative(0.4);
  Pmf uniform({0.5, 0.5});
  auto q = update_q(uniform, m.channel);
  Pmf next = update_p(q, m.channel, {}, {}, 0.0, 0.0);
  CHECK(next[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(next[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("update_p concentrates mass on the cheap symbol for large mu") {
  auto m = build_binary_multiplicative(0.4);
  auto est = optimal_estimator(m.channel, *m.distortion, EstimatorMode::kRestricted);
  auto c = distortion_cost(m.channel, est, *m.distortion);  // c = (q, 0)
  Pmf uniform({0.5, 0.5});
  auto q = update_q(uniform, m.channel);
  Pmf next = update_p(q, m.channel, c, {}, 0.0, 50.0);
  CHECK(next[1] > 0.999);  // c(1) = 0 < c(0)
}

TEST_CASE("iterating the two public updates reaches p = 1/2 on the binary channel") {
  auto m = build_binary_multiplicative(0.4);
  Pmf p({0.9, 0.1});
  for (int k = 0; k < 200; ++k) p = update_p(update_q(p, m.channel), m.channel, {}, {}, 0.0, 0.0);
  CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("update_p rejects a fully degenerate Q") {
  auto m = build_binary_multiplicative(0.4);
  Tensor3 q(2, 2, 2, 0.0);  // zero everywhere: every g(x) is -inf
  CHECK_THROWS_AS(update_p(q, m.channel, {}, {}, 0.0, 0.0), std::domain_error);
}

TEST_CASE("one solve iteration equals the composition of the public updates") {
  std::mt19937 rng(43);
  for (int trial = 0; trial < 10; ++trial) {
    auto m = cdt::test::random_pf_model(rng, 3, 2, 3);
    auto est = optimal_estimator(m.channel, *m.distortion, m.estimator_mode);
    auto c = distortion_cost(m.channel, est, *m.distortion);

    Pmf p0 = Pmf::uniform(3);
    Pmf composed = update_p(update_q(p0, m.channel), m.channel, c, {}, 0.0, 0.7);

    SolveOptions opts;
    opts.mu = 0.7;
    opts.max_outer_iters = 1;
    SolveResult r = solve(m, opts);
    for (int x = 0; x < 3; ++x) CHECK(r.p_x[x] == doctest::Approx(composed[x]).epsilon(1e-12));
  }
}

TEST_CASE("binary solve at mu=0 hits the capacity corner") {
  auto m = build_binary_multiplicative(0.4);
  SolveOptions opts;
  SolveResult r = solve(m, opts);
  CHECK(r.converged);
  CHECK(std::abs(r.rate_bits - 0.4) < 1e-4);
  CHECK(std::abs(r.distortion - 0.2) < 1e-4);
  CHECK(std::abs(r.p_x[0] - 0.5) < 1e-4);
  CHECK(std::abs(r.p_x[1] - 0.5) < 1e-4);
  CHECK(r.input_cost == doctest::Approx(0.0));
  CHECK(r.lambda == doctest::Approx(0.0));
}

TEST_CASE("binary solve at mu=10 collapses to the zero-distortion corner") {
  auto m = build_binary_multiplicative(0.4);
  SolveOptions opts;
  opts.mu = 10.0;
  SolveResult r = solve(m, opts);
  CHECK(r.converged);
  CHECK(r.rate_bits < 1e-3);
  CHECK(r.distortion < 1e-3);
}

TEST_CASE("binary solve matches a golden-section oracle at mu=0.5") {
  const double q = 0.4, mu = 0.5;
  // with p = P_X(0): objective(p) = q*h(p) - mu*q*p in nats (c(0)=q, c(1)=0)
  auto objective = [&](double p) { return q * h2_nats(p) - mu * q * p; };
  double p_star = golden_max(objective, 0.0, 1.0);
  CHECK(p_star == doctest::Approx(1.0 / (1.0 + std::exp(mu))).epsilon(1e-6));  // stationarity

  auto m = build_binary_multiplicative(q);
  SolveOptions opts;
  opts.mu = mu;
  SolveResult r = solve(m, opts);
  CHECK(r.converged);
  CHECK(std::abs(r.p_x[0] - p_star) < 1e-5);
  CHECK(std::abs(r.rate_bits - q * h2_nats(p_star) / kLn2) < 1e-6);
  CHECK(std::abs(r.distortion - q * p_star) < 1e-6);
}

TEST_CASE("mu=0 solve reduces to textbook BA: BSC(0.1) capacity") {
  // collapse the state to a single value; perfect feedback is immaterial here
  Tensor3 w(2, 1, 2, 0.0);
  w(0, 0, 0) = 0.9;
  w(0, 0, 1) = 0.1;
  w(1, 0, 0) = 0.1;
  w(1, 0, 1) = 0.9;
  ChannelModel m;
  m.channel = from_perfect_feedback(w, Pmf({1.0}));
  SolveOptions opts;
  SolveResult r = solve(m, opts);
  double expect = 1.0 - h2_nats(0.1) / kLn2;  // 0.53100440641...
  CHECK(r.converged);
  CHECK(std::abs(r.rate_bits - expect) < 1e-6);
  CHECK(std::isnan(r.distortion));  // no distortion measure attached
}

TEST_CASE("solve without a distortion measure rejects mu > 0") {
  Tensor3 w(2, 1, 2, 0.5);
  ChannelModel m;
  m.channel = from_perfect_feedback(w, Pmf({1.0}));
  SolveOptions opts;
  opts.mu = 0.5;
  CHECK_THROWS_AS(solve(m, opts), std::invalid_argument);
  auto msg = cdt::test::thrown_message([&] { solve(m, opts); });
  CHECK(msg.find("distortion required") != std::string::npos);
}

TEST_CASE("rate stays within [0, log2 min(nx, ny)]") {
  std::mt19937 rng(47);
  for (int trial = 0; trial < 20; ++trial) {
    auto m = cdt::test::random_pf_model(rng, 3, 2, 2);
    SolveOptions opts;
    opts.mu = (trial % 3) * 0.5;
    SolveResult r = solve(m, opts);
    CHECK(r.rate_bits >= 0.0);
    CHECK(r.rate_bits <= std::log2(2.0) + 1e-12);
  }
}

TEST_CASE("penalized objective is nondecreasing across iterations without a cost limit") {
  std::mt19937 rng(53);
  for (int trial = 0; trial < 10; ++trial) {
    auto m = cdt::test::random_pf_model(rng, 3, 3, 3);
    SolveOptions opts;
    opts.mu = 0.8;
    opts.record_trace = true;
    SolveResult r = solve(m, opts);
    REQUIRE(r.trace.size() >= 2);
    for (size_t i = 1; i < r.trace.size(); ++i)
      CHECK(r.trace[i].objective_nats >= r.trace[i - 1].objective_nats - 1e-12);
  }
}

TEST_CASE("active cost limit: constraint met with complementary slackness") {
  auto m = build_binary_multiplicative(0.4);
  m.cost.b = {1.0, 0.0};  // charge for x=0; unconstrained optimum spends 0.5
  SolveOptions opts;
  opts.cost_limit = 0.3;
  SolveResult r = solve(m, opts);
  CHECK(r.converged);
  CHECK(r.input_cost <= 0.3 + 1e-5);
  CHECK(std::abs(r.p_x[0] - 0.3) < 1e-4);
  CHECK(std::abs(r.rate_bits - 0.4 * h2_nats(0.3) / kLn2) < 1e-4);
  CHECK(r.lambda > 0.0);
  // lambda* from stationarity: q*log((1-p)/p) at p = 0.3
  CHECK(std::abs(r.lambda - 0.4 * std::log(0.7 / 0.3)) < 1e-3);
  double resid =
      std::max(0.0, r.input_cost - 0.3) + std::min(r.lambda, std::abs(r.input_cost - 0.3));
  CHECK(resid < 1e-5);
}

TEST_CASE("slack cost limit drives lambda to zero") {
  auto m = build_binary_multiplicative(0.4);
  m.cost.b = {1.0, 0.0};
  SolveOptions opts;
  opts.cost_limit = 0.8;  // optimum spends 0.5 < 0.8
  SolveResult r = solve(m, opts);
  CHECK(r.converged);
  CHECK(r.lambda < 1e-6);
  CHECK(std::abs(r.p_x[0] - 0.5) < 1e-4);
  CHECK(std::abs(r.rate_bits - 0.4) < 1e-4);
}

TEST_CASE("infeasible cost limit throws") {
  auto m = build_binary_multiplicative(0.4);
  m.cost.b = {1.0, 2.0};
  SolveOptions opts;
  opts.cost_limit = 0.5;  // below min b(x) = 1
  CHECK_THROWS_AS(solve(m, opts), std::invalid_argument);
}

TEST_CASE("iteration cap reports non-convergence honestly") {
  std::mt19937 rng(59);
  auto m = cdt::test::random_pf_model(rng, 3, 3, 3);
  SolveOptions opts;
  opts.mu = 0.2;
  opts.max_outer_iters = 2;
  SolveResult r = solve(m, opts);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 2);
}

TEST_CASE("solve agrees with the exhaustive grid oracle on small random channels") {
  std::mt19937 rng(61);
  for (int trial = 0; trial < 8; ++trial) {
    int nx = 2 + trial % 2;
    auto m = cdt::test::random_pf_model(rng, nx, 2, 2);
    for (double mu : {0.0, 0.5, 2.0}) {
      SolveOptions opts;
      opts.mu = mu;
      SolveResult r = solve(m, opts);
      double solve_obj = r.rate_bits * kLn2 - mu * r.distortion;
      auto oracle = grid_oracle(m, mu, 1e-3);
      CHECK(std::abs(solve_obj - oracle.objective_nats) < 1e-4);
    }
  }
}

TEST_CASE("Theorem 2a at convergence: max_Q J equals I") {
  std::mt19937 rng(67);
  auto m = cdt::test::random_pf_model(rng, 3, 2, 3);
  SolveOptions opts;
  SolveResult r = solve(m, opts);
  double i_val = conditional_mutual_information(r.p_x, m.channel);
  double j_val = j_functional(r.p_x, update_q(r.p_x, m.channel), m.channel);
  CHECK(std::abs(i_val - j_val) < 1e-8);
}
