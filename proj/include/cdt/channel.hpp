#pragma once

#include <string>
#include <vector>

#include "cdt/tensor.hpp"

namespace cdt {

// Normalization tolerance for pmfs and kernel rows. Renormalization is never
// done silently; constructors either accept within this tolerance or reject.
inline constexpr double kNormTol = 1e-9;

/// Probability vector over a finite alphabet.
class Pmf {
 public:
  Pmf() = default;
  // Throws std::invalid_argument if entries are negative or do not sum to 1
  // within kNormTol.
  explicit Pmf(std::vector<double> probs);

  static Pmf uniform(int n);
  static Pmf point_mass(int n, int i);

  int size() const { return static_cast<int>(p_.size()); }
  double operator[](int i) const { return p_[i]; }
  const std::vector<double>& probs() const { return p_; }

 private:
  std::vector<double> p_;
};

/// State-dependent discrete memoryless channel P_{YZ|XS} with i.i.d. state
/// P_S. Two storage forms:
///   - general: dense rank-4 kernel [x][s][y][z]
///   - perfect feedback (z == y): rank-3 P_{Y|XS} only, with nz == ny
/// The second avoids materializing an ny*nz joint that is diagonal anyway and
/// keeps the fading-AWGN model (ny = nz = 513) tractable. All consumers go
/// through the marginal_* accessors, which behave identically for both forms.
struct StateChannel {
  int nx = 0, ns = 0, ny = 0, nz = 0;
  Pmf p_s;

  bool perfect_feedback = false;
  Tensor4 kernel;        // P_{YZ|XS}, [x][s][y][z]; empty in perfect-feedback form
  Tensor3 kernel_y;      // P_{Y|XS}, [x][s][y]; the storage in perfect-feedback form

  std::vector<double> x_values;  // physical input values (e.g. PAM amplitudes); empty if none
  std::vector<double> s_values;  // physical state values; empty if none
};

/// Distortion function d: S x Shat -> [0, inf) as a matrix [s][shat] plus the
/// reconstruction values labelling the columns.
struct DistortionMatrix {
  Matrix d;
  std::vector<double> shat_values;
};

/// Per-symbol input cost b(x).
struct CostVector {
  std::vector<double> b;
};

// Report-style validation: returns the list of violated invariants, each
// naming the offending index. Empty means valid.
std::vector<std::string> validate_channel(const StateChannel& ch);

// P_{Y|XS}(y|x,s) = sum_z kernel[x][s][y][z], shape [x][s][y].
Tensor3 marginal_y_given_xs(const StateChannel& ch);

// P_{Z|XS}(z|x,s) = sum_y kernel[x][s][y][z], shape [x][s][z].
Tensor3 marginal_z_given_xs(const StateChannel& ch);

// P_{Z|X}(z|x) = sum_s p_s(s) sum_y kernel[x][s][y][z], shape [x][z].
// Well-defined without an input law because S is independent of X.
Matrix marginal_z_given_x(const StateChannel& ch);

// Builds the perfect-feedback channel (z == y) from P_{Y|XS}. Rows must be
// normalized within kNormTol unless renormalize is set; otherwise throws
// std::invalid_argument naming the offending (x,s).
StateChannel from_perfect_feedback(const Tensor3& p_y_given_xs, const Pmf& p_s,
                                   std::vector<double> x_values = {},
                                   std::vector<double> s_values = {},
                                   bool renormalize = false);

// Builds a general channel from the dense rank-4 kernel; throws
// std::invalid_argument if any invariant fails (no silent renormalization).
StateChannel make_channel(const Tensor4& kernel, const Pmf& p_s,
                          std::vector<double> x_values = {},
                          std::vector<double> s_values = {});

}  // namespace cdt
