#include "cdt/channel.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cdt {

Pmf::Pmf(std::vector<double> probs) : p_(std::move(probs)) {
  if (p_.empty()) throw std::invalid_argument("Pmf: empty probability vector");
  double sum = 0.0;
  for (size_t i = 0; i < p_.size(); ++i) {
    if (!(p_[i] >= 0.0)) {
      std::ostringstream os;
      os << "Pmf: negative probability at index " << i << " (" << p_[i] << ")";
      throw std::invalid_argument(os.str());
    }
    sum += p_[i];
  }
  if (std::abs(sum - 1.0) > kNormTol) {
    std::ostringstream os;
    os << "Pmf: entries sum to " << sum << ", expected 1 within " << kNormTol;
    throw std::invalid_argument(os.str());
  }
}

Pmf Pmf::uniform(int n) {
  if (n <= 0) throw std::invalid_argument("Pmf::uniform: n must be positive");
  return Pmf(std::vector<double>(n, 1.0 / n));
}

Pmf Pmf::point_mass(int n, int i) {
  if (n <= 0 || i < 0 || i >= n) throw std::invalid_argument("Pmf::point_mass: bad index");
  std::vector<double> p(n, 0.0);
  p[i] = 1.0;
  return Pmf(std::move(p));
}

std::vector<std::string> validate_channel(const StateChannel& ch) {
  std::vector<std::string> report;
  auto add = [&report](const std::string& msg) { report.push_back(msg); };

  if (ch.nx <= 0 || ch.ns <= 0 || ch.ny <= 0 || ch.nz <= 0) {
    add("alphabet sizes must be positive");
    return report;
  }
  if (ch.p_s.size() != ch.ns) add("p_s dimension does not match ns");
  for (int s = 0; s < ch.p_s.size(); ++s) {
    if (!(ch.p_s[s] >= 0.0)) {
      std::ostringstream os;
      os << "negative probability in p_s at s=" << s;
      add(os.str());
    }
  }
  if (!ch.x_values.empty() && static_cast<int>(ch.x_values.size()) != ch.nx)
    add("x_values dimension does not match nx");
  if (!ch.s_values.empty() && static_cast<int>(ch.s_values.size()) != ch.ns)
    add("s_values dimension does not match ns");

  if (ch.perfect_feedback) {
    if (ch.nz != ch.ny) add("perfect feedback requires nz == ny");
    if (ch.kernel_y.dim0() != ch.nx || ch.kernel_y.dim1() != ch.ns ||
        ch.kernel_y.dim2() != ch.ny) {
      add("kernel_y dimensions do not match (nx, ns, ny)");
      return report;
    }
    for (int x = 0; x < ch.nx; ++x) {
      for (int s = 0; s < ch.ns; ++s) {
        double sum = 0.0;
        bool neg = false;
        for (int y = 0; y < ch.ny; ++y) {
          double v = ch.kernel_y(x, s, y);
          if (!(v >= 0.0)) neg = true;
          sum += v;
        }
        if (neg) {
          std::ostringstream os;
          os << "negative probability in kernel slice (x=" << x << ", s=" << s << ")";
          add(os.str());
        }
        if (std::abs(sum - 1.0) > kNormTol) {
          std::ostringstream os;
          os << "kernel slice (x=" << x << ", s=" << s << ") sums to " << sum;
          add(os.str());
        }
      }
    }
  } else {
    if (ch.kernel.dim0() != ch.nx || ch.kernel.dim1() != ch.ns ||
        ch.kernel.dim2() != ch.ny || ch.kernel.dim3() != ch.nz) {
      add("kernel dimensions do not match (nx, ns, ny, nz)");
      return report;
    }
    for (int x = 0; x < ch.nx; ++x) {
      for (int s = 0; s < ch.ns; ++s) {
        double sum = 0.0;
        bool neg = false;
        for (int y = 0; y < ch.ny; ++y)
          for (int z = 0; z < ch.nz; ++z) {
            double v = ch.kernel(x, s, y, z);
            if (!(v >= 0.0)) neg = true;
            sum += v;
          }
        if (neg) {
          std::ostringstream os;
          os << "negative probability in kernel slice (x=" << x << ", s=" << s << ")";
          add(os.str());
        }
        if (std::abs(sum - 1.0) > kNormTol) {
          std::ostringstream os;
          os << "kernel slice (x=" << x << ", s=" << s << ") sums to " << sum;
          add(os.str());
        }
      }
    }
  }
  return report;
}

Tensor3 marginal_y_given_xs(const StateChannel& ch) {
  if (ch.perfect_feedback) return ch.kernel_y;
  Tensor3 out(ch.nx, ch.ns, ch.ny, 0.0);
  for (int x = 0; x < ch.nx; ++x)
    for (int s = 0; s < ch.ns; ++s)
      for (int y = 0; y < ch.ny; ++y) {
        double sum = 0.0;
        for (int z = 0; z < ch.nz; ++z) sum += ch.kernel(x, s, y, z);
        out(x, s, y) = sum;
      }
  return out;
}

Tensor3 marginal_z_given_xs(const StateChannel& ch) {
  if (ch.perfect_feedback) return ch.kernel_y;
  Tensor3 out(ch.nx, ch.ns, ch.nz, 0.0);
  for (int x = 0; x < ch.nx; ++x)
    for (int s = 0; s < ch.ns; ++s)
      for (int y = 0; y < ch.ny; ++y)
        for (int z = 0; z < ch.nz; ++z) out(x, s, z) += ch.kernel(x, s, y, z);
  return out;
}

Matrix marginal_z_given_x(const StateChannel& ch) {
  Matrix out(ch.nx, ch.nz, 0.0);
  if (ch.perfect_feedback) {
    for (int x = 0; x < ch.nx; ++x)
      for (int s = 0; s < ch.ns; ++s) {
        double ps = ch.p_s[s];
        for (int z = 0; z < ch.nz; ++z) out(x, z) += ps * ch.kernel_y(x, s, z);
      }
    return out;
  }
  for (int x = 0; x < ch.nx; ++x)
    for (int s = 0; s < ch.ns; ++s) {
      double ps = ch.p_s[s];
      for (int y = 0; y < ch.ny; ++y)
        for (int z = 0; z < ch.nz; ++z) out(x, z) += ps * ch.kernel(x, s, y, z);
    }
  return out;
}

StateChannel from_perfect_feedback(const Tensor3& p_y_given_xs, const Pmf& p_s,
                                   std::vector<double> x_values,
                                   std::vector<double> s_values,
                                   bool renormalize) {
  StateChannel ch;
  ch.nx = p_y_given_xs.dim0();
  ch.ns = p_y_given_xs.dim1();
  ch.ny = p_y_given_xs.dim2();
  ch.nz = ch.ny;
  ch.p_s = p_s;
  ch.perfect_feedback = true;
  ch.kernel_y = p_y_given_xs;
  ch.x_values = std::move(x_values);
  ch.s_values = std::move(s_values);

  for (int x = 0; x < ch.nx; ++x)
    for (int s = 0; s < ch.ns; ++s) {
      double sum = 0.0;
      for (int y = 0; y < ch.ny; ++y) {
        double v = ch.kernel_y(x, s, y);
        if (!(v >= 0.0)) {
          std::ostringstream os;
          os << "from_perfect_feedback: negative probability at (x=" << x << ", s=" << s
             << ", y=" << y << ")";
          throw std::invalid_argument(os.str());
        }
        sum += v;
      }
      if (renormalize) {
        if (sum <= 0.0) {
          std::ostringstream os;
          os << "from_perfect_feedback: row (x=" << x << ", s=" << s << ") has zero mass";
          throw std::invalid_argument(os.str());
        }
        for (int y = 0; y < ch.ny; ++y) ch.kernel_y(x, s, y) /= sum;
      } else if (std::abs(sum - 1.0) > kNormTol) {
        std::ostringstream os;
        os << "from_perfect_feedback: row (x=" << x << ", s=" << s << ") sums to " << sum;
        throw std::invalid_argument(os.str());
      }
    }

  auto report = validate_channel(ch);
  if (!report.empty()) throw std::invalid_argument("from_perfect_feedback: " + report.front());
  return ch;
}

StateChannel make_channel(const Tensor4& kernel, const Pmf& p_s,
                          std::vector<double> x_values, std::vector<double> s_values) {
  StateChannel ch;
  ch.nx = kernel.dim0();
  ch.ns = kernel.dim1();
  ch.ny = kernel.dim2();
  ch.nz = kernel.dim3();
  ch.p_s = p_s;
  ch.kernel = kernel;
  ch.x_values = std::move(x_values);
  ch.s_values = std::move(s_values);
  auto report = validate_channel(ch);
  if (!report.empty()) throw std::invalid_argument("make_channel: " + report.front());
  return ch;
}

}  // namespace cdt
