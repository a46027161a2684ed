#include "cdt/builders.hpp"

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace cdt {

namespace {

double normal_pdf(double t) {
  return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi_v<double>);
}

double normal_cdf(double t) { return 0.5 * std::erfc(-t / std::numbers::sqrt2_v<double>); }

// Pre-fold tail loss beyond which the output grid is considered too coarse.
constexpr double kMaxTailLoss = 1e-5;

}  // namespace

ChannelModel build_binary_multiplicative(double q) {
  if (!(q >= 0.0 && q <= 0.5))
    throw std::invalid_argument("build_binary_multiplicative: q outside [0, 1/2]");

  Tensor3 w(2, 2, 2, 0.0);  // [x][s][y], y = s*x deterministic
  for (int x = 0; x < 2; ++x)
    for (int s = 0; s < 2; ++s) w(x, s, x * s) = 1.0;

  ChannelModel m;
  m.channel = from_perfect_feedback(w, Pmf({1.0 - q, q}));

  DistortionMatrix d;
  d.d = Matrix(2, 2, 0.0);
  d.d(0, 1) = 1.0;  // Hamming: d(s, shat) = s xor shat
  d.d(1, 0) = 1.0;
  d.shat_values = {0.0, 1.0};
  m.distortion = d;
  m.cost.b = {0.0, 0.0};
  m.estimator_mode = EstimatorMode::kRestricted;

  std::ostringstream id;
  id << "binary(q=" << q << ")";
  m.id = id.str();
  return m;
}

std::vector<double> build_pam_constellation(int m, double power) {
  if (m < 2) throw std::invalid_argument("build_pam_constellation: M must be >= 2");
  if (!(power > 0.0)) throw std::invalid_argument("build_pam_constellation: power must be > 0");
  const double a = std::sqrt(3.0 * power / (static_cast<double>(m) * m - 1.0));
  std::vector<double> levels(m);
  for (int i = 1; i <= m; ++i) levels[i - 1] = a * (2.0 * i - 1.0 - m);
  return levels;
}

std::pair<std::vector<double>, Pmf> quantize_gaussian_state(int k) {
  if (k < 2) throw std::invalid_argument("quantize_gaussian_state: K must be >= 2");
  boost::math::normal_distribution<double> n01;
  std::vector<double> values(k);
  for (int i = 0; i < k; ++i) {
    // Cell boundaries at the i/K and (i+1)/K quantiles; conditional mean of a
    // normal cell is K * (pdf(lo) - pdf(hi)).
    double pdf_lo = (i == 0) ? 0.0 : normal_pdf(boost::math::quantile(n01, static_cast<double>(i) / k));
    double pdf_hi = (i == k - 1) ? 0.0 : normal_pdf(boost::math::quantile(n01, static_cast<double>(i + 1) / k));
    values[i] = k * (pdf_lo - pdf_hi);
  }
  return {values, Pmf::uniform(k)};
}

ChannelModel build_fading_awgn(const AwgnModelSpec& spec) {
  if (spec.pam_order < 2 || spec.state_levels < 2 || spec.output_levels < 2)
    throw std::invalid_argument("build_fading_awgn: alphabet sizes must be >= 2");
  if (!(spec.power > 0.0)) throw std::invalid_argument("build_fading_awgn: power must be > 0");
  if (!(spec.output_range_sigma > 0.0))
    throw std::invalid_argument("build_fading_awgn: output range must be > 0");

  std::vector<double> x_values = build_pam_constellation(spec.pam_order, spec.power);
  auto [s_values, p_s] = quantize_gaussian_state(spec.state_levels);

  double max_mean = 0.0;
  for (double s : s_values)
    for (double x : x_values) max_mean = std::max(max_mean, std::abs(s * x));
  const double half_width = max_mean + spec.output_range_sigma;  // noise sigma is 1

  const int ky = spec.output_levels;
  const int nx = spec.pam_order;
  const int ns = spec.state_levels;
  const double bin = 2.0 * half_width / ky;

  Tensor3 w(nx, ns, ky, 0.0);
  for (int xi = 0; xi < nx; ++xi) {
    for (int si = 0; si < ns; ++si) {
      const double mean = s_values[si] * x_values[xi];
      // Tail mass that edge folding will absorb; reject grids that fold more
      // than kMaxTailLoss.
      const double loss = normal_cdf(-half_width - mean) + normal_cdf(mean - half_width);
      if (loss > kMaxTailLoss) {
        std::ostringstream os;
        os << "build_fading_awgn: output grid too coarse: pre-fold tail loss " << loss
           << " at (x=" << xi << ", s=" << si << ")";
        throw std::invalid_argument(os.str());
      }
      double prev_cdf = 0.0;  // edge bins take everything beyond the grid
      for (int y = 0; y < ky; ++y) {
        const double upper = -half_width + (y + 1) * bin;
        const double cdf = (y == ky - 1) ? 1.0 : normal_cdf(upper - mean);
        w(xi, si, y) = cdf - prev_cdf;
        prev_cdf = cdf;
      }
    }
  }

  ChannelModel m;
  m.channel = from_perfect_feedback(w, p_s, x_values, s_values);

  DistortionMatrix d;
  d.d = Matrix(ns, ns, 0.0);
  for (int i = 0; i < ns; ++i)
    for (int j = 0; j < ns; ++j) {
      double diff = s_values[i] - s_values[j];
      d.d(i, j) = diff * diff;
    }
  d.shat_values = s_values;
  m.distortion = d;

  m.cost.b.resize(nx);
  for (int xi = 0; xi < nx; ++xi) m.cost.b[xi] = x_values[xi] * x_values[xi];
  m.estimator_mode = EstimatorMode::kPosteriorMean;

  std::ostringstream id;
  id << "awgn(P=" << spec.power << ",M=" << spec.pam_order << ",Ks=" << spec.state_levels
     << ",Ky=" << spec.output_levels << ",range=" << spec.output_range_sigma << ")";
  m.id = id.str();
  return m;
}

double unconstrained_capacity_reference(double power, int n_quad) {
  if (!(power > 0.0)) throw std::invalid_argument("unconstrained_capacity_reference: power must be > 0");
  if (n_quad < 100) throw std::invalid_argument("unconstrained_capacity_reference: n_quad must be >= 100");
  int n = n_quad + (n_quad % 2);  // Simpson needs an even count
  const double lo = -8.0, hi = 8.0;
  const double h = (hi - lo) / n;
  auto f = [power](double s) { return normal_pdf(s) * 0.5 * std::log2(1.0 + s * s * power); };
  double sum = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) sum += f(lo + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

}  // namespace cdt
