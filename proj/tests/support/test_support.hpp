#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "genmarket/gaussian.hpp"
#include "genmarket/linalg.hpp"

namespace gm_test {

using genmarket::Matrix;
using genmarket::Vector;

inline Vector random_vector(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = nd(rng);
  return v;
}

// A A^T + floor I with A Gaussian, so eigenvalues stay well away from zero.
inline Matrix random_spd(std::mt19937_64& rng, int n, double floor = 0.2) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = nd(rng);
  Matrix s = a * a.transpose() / n + floor * Matrix::Identity(n, n);
  return 0.5 * (s + s.transpose());
}

inline Matrix random_symmetric(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = nd(rng);
  return 0.5 * (a + a.transpose());
}

inline genmarket::GaussianMeasure random_gaussian(std::mt19937_64& rng, int n) {
  return {random_vector(rng, n), random_spd(rng, n)};
}

// Eigen's own solver gives an oracle independent of the library's helpers.
inline Matrix eig_apply(const Matrix& s, double (*f)(double)) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  Vector d = es.eigenvalues().unaryExpr(f);
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace gm_test
