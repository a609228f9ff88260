#include "genmarket/gaussian.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "genmarket/errors.hpp"

namespace genmarket {

// Window below zero in which a negative Bures trace term is read as round-off.
inline constexpr double kTraceClampWindow = 1e-9;

GaussianMeasure::GaussianMeasure(Vector mean, Matrix cov) : mean_(std::move(mean)), cov_(std::move(cov)) {
  if (cov_.rows() != mean_.size() || cov_.cols() != mean_.size()) {
    std::ostringstream os;
    os << "GaussianMeasure: mean has length " << mean_.size() << " but covariance is "
       << cov_.rows() << "x" << cov_.cols();
    throw DimensionError(os.str());
  }
  if (!mean_.allFinite() || !cov_.allFinite()) {
    throw NumericError("GaussianMeasure: non-finite mean or covariance");
  }
  if (!is_symmetric(cov_, 1e-12)) throw DomainError("GaussianMeasure: covariance is not symmetric");
  Eigen::LLT<Matrix> llt(cov_);
  if (llt.info() != Eigen::Success) {
    throw DomainError("GaussianMeasure: covariance is not positive definite");
  }
}

GaussianMeasure GaussianMeasure::standard(int dim) {
  return GaussianMeasure(Vector::Zero(dim), Matrix::Identity(dim, dim));
}

Vector ChartCoords::flat() const {
  Vector out(mu.size() + sigma_coords.size());
  out << mu, sigma_coords;
  return out;
}

ChartCoords ChartCoords::from_flat(const Vector& flat, int dim) {
  if (flat.size() != dim + sym_size(dim)) {
    std::ostringstream os;
    os << "chart coordinates for D=" << dim << " need length " << dim + sym_size(dim) << ", got "
       << flat.size();
    throw DimensionError(os.str());
  }
  return ChartCoords{flat.head(dim), flat.tail(sym_size(dim))};
}

GaussianMeasure chart_decode(const ChartCoords& c) {
  if (!c.mu.allFinite() || !c.sigma_coords.allFinite()) {
    throw NumericError("chart_decode: non-finite coordinates");
  }
  return GaussianMeasure(c.mu, matrix_exp(sym_embed(c.sigma_coords, c.dim())));
}

ChartCoords chart_encode(const GaussianMeasure& g) {
  return ChartCoords{g.mean(), sym_extract(matrix_log(g.cov()))};
}

double w2_distance(const GaussianMeasure& a, const GaussianMeasure& b) {
  if (a.dim() != b.dim()) {
    std::ostringstream os;
    os << "w2_distance: dimension mismatch " << a.dim() << " vs " << b.dim();
    throw DimensionError(os.str());
  }
  const double mean_term = (a.mean() - b.mean()).squaredNorm();
  const Matrix root_b = spd_sqrt(b.cov());
  Matrix inner = root_b * a.cov() * root_b;
  inner = 0.5 * (inner + inner.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(inner, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("w2_distance: eigendecomposition failed");
  const double cross = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  double trace_term = a.cov().trace() + b.cov().trace() - 2.0 * cross;
  if (trace_term < 0.0) {
    if (trace_term < -kTraceClampWindow) {
      std::ostringstream os;
      os << "w2_distance: Bures trace term is negative beyond round-off (" << trace_term << ")";
      throw NumericError(os.str());
    }
    trace_term = 0.0;
  }
  return std::sqrt(mean_term + trace_term);
}

Matrix transport_matrix(const GaussianMeasure& a, const GaussianMeasure& b) {
  if (a.dim() != b.dim()) throw DimensionError("transport_matrix: dimension mismatch");
  const Matrix root_a = spd_sqrt(a.cov());
  Matrix inner = root_a * b.cov() * root_a;
  inner = 0.5 * (inner + inner.transpose());
  const Matrix middle = spd_sqrt(inner);
  // root_a^{-1} middle root_a^{-1}, via solves against the symmetric root.
  const Eigen::LLT<Matrix> llt(root_a);
  Matrix left = llt.solve(middle);
  Matrix out = llt.solve(left.transpose()).transpose();
  return 0.5 * (out + out.transpose());
}

}  // namespace genmarket
