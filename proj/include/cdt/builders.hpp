#pragma once

#include <utility>
#include <vector>

#include "cdt/model.hpp"

namespace cdt {

/// Quantization spec for the real fading channel Y = S*X + N with S, N both
/// standard normal and an M-PAM input of average power P.
struct AwgnModelSpec {
  double power = 10.0;            // linear E[X^2] budget
  int pam_order = 2;              // M
  int state_levels = 64;          // K_s equiprobable cells for S
  int output_levels = 513;        // K_y uniform bins for Y
  double output_range_sigma = 5.0;  // Y grid half-width beyond max|s*x|, in noise sigmas
};

// Binary channel y = s*x with S ~ Bernoulli(q), q in [0, 1/2], perfect
// feedback z = y, Hamming distortion, zero input cost.
ChannelModel build_binary_multiplicative(double q);

// M equally spaced amplitudes a*(2m - 1 - M), m = 1..M, scaled so that the
// uniform-input average power equals `power` exactly.
std::vector<double> build_pam_constellation(int m, double power);

// Equiprobable quantization of the standard normal: K cells of mass 1/K,
// represented by their conditional means.
std::pair<std::vector<double>, Pmf> quantize_gaussian_state(int k);

// Quantized fading-AWGN model: PAM input values, quantized Gaussian state,
// uniform output bins with tail mass folded into the edge bins, perfect
// feedback, squared-error distortion in posterior-mean mode, cost b(x) = x^2.
ChannelModel build_fading_awgn(const AwgnModelSpec& spec);

// 0.5 * E[log2(1 + S^2 * power)] for S ~ N(0,1), by composite Simpson
// quadrature over +-8 sigma with n_quad subintervals. In bits.
double unconstrained_capacity_reference(double power, int n_quad);

}  // namespace cdt
