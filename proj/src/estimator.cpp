#include "cdt/estimator.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace cdt {

PosteriorSXZ posterior_s_given_xz(const StateChannel& ch) {
  Tensor3 p_z_xs = marginal_z_given_xs(ch);  // [x][s][z]
  PosteriorSXZ out;
  out.p = Tensor3(ch.nx, ch.nz, ch.ns, 0.0);
  out.reachable.assign(static_cast<size_t>(ch.nx) * ch.nz, 0);
  out.p_z_given_x = Matrix(ch.nx, ch.nz, 0.0);

  for (int x = 0; x < ch.nx; ++x) {
    for (int z = 0; z < ch.nz; ++z) {
      double pz = 0.0;
      for (int s = 0; s < ch.ns; ++s) pz += ch.p_s[s] * p_z_xs(x, s, z);
      out.p_z_given_x(x, z) = pz;
      if (pz > 0.0) {
        out.reachable[static_cast<size_t>(x) * ch.nz + z] = 1;
        for (int s = 0; s < ch.ns; ++s)
          out.p(x, z, s) = ch.p_s[s] * p_z_xs(x, s, z) / pz;
      }
    }
  }
  return out;
}

EstimatorTable optimal_estimator(const StateChannel& ch, const DistortionMatrix& d,
                                 EstimatorMode mode) {
  PosteriorSXZ post = posterior_s_given_xz(ch);

  EstimatorTable est;
  est.mode = mode;
  est.nx = ch.nx;
  est.nz = ch.nz;
  est.reachable = post.reachable;
  const size_t n = static_cast<size_t>(ch.nx) * ch.nz;
  est.shat_index.assign(n, kUnreachablePair);
  est.shat_value.assign(n, std::numeric_limits<double>::quiet_NaN());

  if (mode == EstimatorMode::kPosteriorMean) {
    if (ch.s_values.empty())
      throw std::invalid_argument("optimal_estimator: posterior-mean mode requires s_values");
    for (int x = 0; x < ch.nx; ++x)
      for (int z = 0; z < ch.nz; ++z) {
        if (!post.is_reachable(x, z)) continue;
        double mean = 0.0;
        for (int s = 0; s < ch.ns; ++s) mean += post.p(x, z, s) * ch.s_values[s];
        est.shat_value[est.at(x, z)] = mean;
      }
    return est;
  }

  if (d.d.rows() != ch.ns)
    throw std::invalid_argument("optimal_estimator: distortion rows do not match ns");
  const int nhat = d.d.cols();
  if (nhat <= 0) throw std::invalid_argument("optimal_estimator: empty reconstruction alphabet");
  if (static_cast<int>(d.shat_values.size()) != nhat)
    throw std::invalid_argument("optimal_estimator: shat_values do not match distortion columns");
  est.shat_values = d.shat_values;

  for (int x = 0; x < ch.nx; ++x)
    for (int z = 0; z < ch.nz; ++z) {
      if (!post.is_reachable(x, z)) continue;
      int best = 0;
      double best_cost = std::numeric_limits<double>::infinity();
      for (int j = 0; j < nhat; ++j) {
        double cost = 0.0;
        for (int s = 0; s < ch.ns; ++s) cost += post.p(x, z, s) * d.d(s, j);
        if (cost < best_cost) {  // strict: ties keep the smallest index
          best_cost = cost;
          best = j;
        }
      }
      est.shat_index[est.at(x, z)] = best;
      est.shat_value[est.at(x, z)] = est.shat_values[best];
    }
  return est;
}

std::vector<double> distortion_cost(const StateChannel& ch, const EstimatorTable& est,
                                    const DistortionMatrix& d) {
  if (est.nx != ch.nx || est.nz != ch.nz)
    throw std::invalid_argument("distortion_cost: estimator dimensions do not match channel");
  if (est.mode == EstimatorMode::kRestricted && d.d.rows() != ch.ns)
    throw std::invalid_argument("distortion_cost: distortion rows do not match ns");

  PosteriorSXZ post = posterior_s_given_xz(ch);
  std::vector<double> c(ch.nx, 0.0);

  for (int x = 0; x < ch.nx; ++x) {
    double acc = 0.0;
    for (int z = 0; z < ch.nz; ++z) {
      double pz = post.p_z_given_x(x, z);
      if (pz <= 0.0) continue;
      double ed = 0.0;
      if (est.mode == EstimatorMode::kPosteriorMean) {
        double m = est.shat_value[est.at(x, z)];
        for (int s = 0; s < ch.ns; ++s) {
          double diff = ch.s_values[s] - m;
          ed += post.p(x, z, s) * diff * diff;
        }
      } else {
        int j = est.shat_index[est.at(x, z)];
        for (int s = 0; s < ch.ns; ++s) ed += post.p(x, z, s) * d.d(s, j);
      }
      acc += pz * ed;
    }
    c[x] = acc;
  }
  return c;
}

double min_distortion(const std::vector<double>& c) {
  if (c.empty()) throw std::invalid_argument("min_distortion: empty cost vector");
  double m = c[0];
  for (double v : c) m = std::min(m, v);
  return m;
}

void write_estimator_csv(const EstimatorTable& est, std::ostream& os) {
  os << "x,z,shat_value,reachable\n";
  for (int x = 0; x < est.nx; ++x)
    for (int z = 0; z < est.nz; ++z) {
      os << x << ',' << z << ',';
      if (est.is_reachable(x, z))
        os << est.shat_value[est.at(x, z)];
      else
        os << "";
      os << ',' << (est.is_reachable(x, z) ? 1 : 0) << '\n';
    }
}

}  // namespace cdt
