#include "genmarket/ou.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "genmarket/errors.hpp"
#include "genmarket/parallel.hpp"
#include "genmarket/random.hpp"

namespace genmarket {
namespace {

struct FlowState {
  Vector mean;
  Matrix phi;
  Matrix phi_inv;
  Matrix gram;  // running integral of Phi^{-1} sigma sigma^T Phi^{-T}

  FlowState operator+(const FlowState& o) const {
    return {mean + o.mean, phi + o.phi, phi_inv + o.phi_inv, gram + o.gram};
  }
  FlowState operator*(double a) const { return {a * mean, a * phi, a * phi_inv, a * gram}; }
};

FlowState flow_rhs(const OUCoefficients& c, double s, const FlowState& y) {
  const Matrix m = c.reversion(s);
  const Matrix sig = c.vol(s);
  const Matrix q = y.phi_inv * sig;
  return {c.drift(s) + m * y.mean, m * y.phi, -y.phi_inv * m, q * q.transpose()};
}

}  // namespace

MarginalLaw exact_marginal(const OUCoefficients& coeffs, const Vector& x0, double t,
                           int quad_steps) {
  const int d = coeffs.dim();
  if (x0.size() != d) {
    std::ostringstream os;
    os << "exact_marginal: x0 has length " << x0.size() << ", expected " << d;
    throw DimensionError(os.str());
  }
  if (!(t > 0.0) || !std::isfinite(t)) {
    std::ostringstream os;
    os << "exact_marginal: time must be positive, got " << t;
    throw DomainError(os.str());
  }
  if (quad_steps < kMinQuadSteps) {
    std::ostringstream os;
    os << "exact_marginal: quad_steps must be at least " << kMinQuadSteps << ", got " << quad_steps;
    throw PreconditionError(os.str());
  }

  const Matrix eye = Matrix::Identity(d, d);
  FlowState y{x0, eye, eye, Matrix::Zero(d, d)};
  const double h = t / quad_steps;
  for (int k = 0; k < quad_steps; ++k) {
    const double s = k * h;
    const FlowState k1 = flow_rhs(coeffs, s, y);
    const FlowState k2 = flow_rhs(coeffs, s + 0.5 * h, y + k1 * (0.5 * h));
    const FlowState k3 = flow_rhs(coeffs, s + 0.5 * h, y + k2 * (0.5 * h));
    const FlowState k4 = flow_rhs(coeffs, s + h, y + k3 * h);
    y = y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
  }

  Matrix cov = y.phi * y.gram * y.phi.transpose();
  cov = 0.5 * (cov + cov.transpose());
  if (!cov.allFinite() || !y.mean.allFinite()) {
    throw NumericError("exact_marginal: non-finite result");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(cov, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  const double lmax = es.eigenvalues().maxCoeff();
  if (!(lmax > 0.0) || lmin < kDefaultEigenFloor * lmax) {
    std::ostringstream os;
    os << "exact_marginal: covariance at t=" << t << " is near-singular (smallest eigenvalue "
       << lmin << ")";
    throw NearSingularError(os.str(), lmin);
  }
  return MarginalLaw{GaussianMeasure(y.mean, cov), t, x0};
}

SampleMatrix euler_maruyama_paths(const OUCoefficients& coeffs, const Vector& x0, double t,
                                  int n_steps, int n_paths, std::uint64_t seed) {
  const int d = coeffs.dim();
  if (x0.size() != d) throw DimensionError("euler_maruyama_paths: x0 dimension mismatch");
  if (n_steps < 1 || n_paths < 1) {
    throw PreconditionError("euler_maruyama_paths: n_steps and n_paths must be positive");
  }
  if (!(t > 0.0)) throw DomainError("euler_maruyama_paths: time must be positive");

  const double h = t / n_steps;
  const double sqrt_h = std::sqrt(h);
  std::vector<Vector> drift(n_steps);
  std::vector<Matrix> reversion(n_steps);
  std::vector<Matrix> vol(n_steps);
  for (int k = 0; k < n_steps; ++k) {
    drift[k] = coeffs.drift(k * h) * h;
    reversion[k] = coeffs.reversion(k * h) * h;
    vol[k] = coeffs.vol(k * h) * sqrt_h;
  }

  SampleMatrix out(n_paths, d);
  constexpr int kPathsPerTask = 256;
  const auto tasks = static_cast<std::size_t>((n_paths + kPathsPerTask - 1) / kPathsPerTask);
  parallel_for(tasks, [&](std::size_t task) {
    const int begin = static_cast<int>(task) * kPathsPerTask;
    const int end = std::min(n_paths, begin + kPathsPerTask);
    std::vector<double> x(d), next(d), z(d);
    for (int p = begin; p < end; ++p) {
      KeyedRng rng(seed, static_cast<std::uint64_t>(RngStream::kEulerMaruyama),
                   static_cast<std::uint64_t>(p));
      for (int i = 0; i < d; ++i) x[i] = x0[i];
      for (int k = 0; k < n_steps; ++k) {
        for (int j = 0; j < d; ++j) z[j] = rng.normal();
        const Matrix& mk = reversion[k];
        const Matrix& sk = vol[k];
        for (int i = 0; i < d; ++i) {
          double acc = x[i] + drift[k][i];
          for (int j = 0; j < d; ++j) acc += mk(i, j) * x[j] + sk(i, j) * z[j];
          next[i] = acc;
        }
        x.swap(next);
      }
      for (int i = 0; i < d; ++i) out(p, i) = x[i];
    }
  });
  if (!out.allFinite()) throw NumericError("euler_maruyama_paths: state overflowed");
  return out;
}

}  // namespace genmarket
