#pragma once

#include <cstdint>

#include "genmarket/coefficients.hpp"
#include "genmarket/gaussian.hpp"

namespace genmarket {

inline constexpr int kDefaultQuadSteps = 1024;
inline constexpr int kMinQuadSteps = 100;

/// Law of X_t started at x0.
struct MarginalLaw {
  GaussianMeasure law;
  double t;
  Vector x0;
};

/// Gaussian law of X_t^{x0}. The mean solves m' = mu_t + M_t m, m(0) = x0;
/// the covariance is Phi(t) [int_0^t Phi(s)^{-1} sigma_s sigma_s^T Phi(s)^{-T} ds] Phi(t)^T
/// with Phi' = M_t Phi, Phi(0) = I. Everything is integrated jointly by
/// fixed-step RK4 on `quad_steps` intervals.
MarginalLaw exact_marginal(const OUCoefficients& coeffs, const Vector& x0, double t,
                           int quad_steps = kDefaultQuadSteps);

/// Terminal states (n_paths x D) of the Euler-Maruyama scheme with step
/// t / n_steps. Path i draws from its own generator keyed by (seed, i).
SampleMatrix euler_maruyama_paths(const OUCoefficients& coeffs, const Vector& x0, double t,
                                  int n_steps, int n_paths, std::uint64_t seed);

}  // namespace genmarket
