#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "cdt/channel.hpp"

namespace cdt {

/// Posterior P_{S|XZ} and the reachability of each (x,z) pair. Independent of
/// the input law (S is independent of X), so it can be computed once per
/// channel and reused for every solve.
struct PosteriorSXZ {
  Tensor3 p;                       // [x][z][s]; rows on reachable pairs sum to 1
  std::vector<std::uint8_t> reachable;  // [x*nz + z], 1 iff P_{Z|X}(z|x) > 0
  Matrix p_z_given_x;              // [x][z]

  bool is_reachable(int x, int z) const { return reachable[static_cast<size_t>(x) * p.dim1() + z] != 0; }
};

PosteriorSXZ posterior_s_given_xz(const StateChannel& ch);

enum class EstimatorMode {
  kRestricted,     // argmin over a finite reconstruction alphabet
  kPosteriorMean,  // conditional mean of s_values; Bayes-optimal for squared error
};

// Sentinel index for (x,z) pairs the channel can never produce. Their
// reconstruction never enters an expectation.
inline constexpr int kUnreachablePair = -1;

/// Deterministic estimator table shat(x,z).
struct EstimatorTable {
  EstimatorMode mode = EstimatorMode::kRestricted;
  int nx = 0, nz = 0;
  std::vector<double> shat_values;      // reconstruction alphabet (restricted mode)
  std::vector<int> shat_index;          // [x*nz+z]; kUnreachablePair where masked or posterior-mean
  std::vector<double> shat_value;       // [x*nz+z]; NaN on unreachable pairs
  std::vector<std::uint8_t> reachable;  // [x*nz+z]

  size_t at(int x, int z) const { return static_cast<size_t>(x) * nz + z; }
  bool is_reachable(int x, int z) const { return reachable[at(x, z)] != 0; }
};

// Bayes-optimal deterministic estimator.
//   restricted:     shat(x,z) = argmin_{shat} sum_s P_{S|XZ}(s|x,z) d(s, shat),
//                   ties broken by smallest reconstruction index.
//   posterior-mean: shat(x,z) = sum_s P_{S|XZ}(s|x,z) s_values[s]; requires the
//                   channel to carry s_values and d to be squared error.
EstimatorTable optimal_estimator(const StateChannel& ch, const DistortionMatrix& d,
                                 EstimatorMode mode);

// Per-input distortion cost
//   c(x) = sum_z P_{Z|X}(z|x) sum_s P_{S|XZ}(s|x,z) d(s, shat(x,z)).
// Unreachable pairs carry zero P_{Z|X} weight and contribute nothing.
std::vector<double> distortion_cost(const StateChannel& ch, const EstimatorTable& est,
                                    const DistortionMatrix& d);

// D_min = min_x c(x); E[d] is linear in P_X once the estimator is fixed, so
// the minimum over input laws sits on a point mass.
double min_distortion(const std::vector<double>& c);

// CSV rows: x,z,shat_value,reachable
void write_estimator_csv(const EstimatorTable& est, std::ostream& os);

}  // namespace cdt
