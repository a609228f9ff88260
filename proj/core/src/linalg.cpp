#include "genmarket/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "genmarket/errors.hpp"

namespace genmarket {
namespace {

Eigen::SelfAdjointEigenSolver<Matrix> eigen_of(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  if (es.info() != Eigen::Success) {
    throw NumericError("symmetric eigendecomposition failed");
  }
  return es;
}

Matrix rebuild(const Eigen::SelfAdjointEigenSolver<Matrix>& es, const Vector& values) {
  const Matrix& q = es.eigenvectors();
  Matrix out = q * values.asDiagonal() * q.transpose();
  return 0.5 * (out + out.transpose());
}

void require_square(const Matrix& s, const char* what) {
  if (s.rows() != s.cols()) {
    std::ostringstream os;
    os << what << ": expected a square matrix, got " << s.rows() << "x" << s.cols();
    throw DimensionError(os.str());
  }
}

void require_finite(const Matrix& s, const char* what) {
  if (!s.allFinite()) throw NumericError(std::string(what) + ": non-finite entry");
}

}  // namespace

int sym_dim_from_size(int len) {
  for (int d = 0; sym_size(d) <= len; ++d) {
    if (sym_size(d) == len) return d;
  }
  return -1;
}

Matrix sym_embed(const Vector& x, int dim) {
  if (x.size() != sym_size(dim)) {
    std::ostringstream os;
    os << "sym_embed: expected length " << sym_size(dim) << " for D=" << dim << ", got "
       << x.size();
    throw DimensionError(os.str());
  }
  Matrix s(dim, dim);
  Eigen::Index k = 0;
  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j) {
      s(i, j) = x[k];
      s(j, i) = x[k];
      ++k;
    }
  }
  return s;
}

Vector sym_extract(const Matrix& s) {
  require_square(s, "sym_extract");
  const int dim = static_cast<int>(s.rows());
  Vector x(sym_size(dim));
  Eigen::Index k = 0;
  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j) x[k++] = s(i, j);
  }
  return x;
}

bool is_symmetric(const Matrix& s, double rel_tol) {
  if (s.rows() != s.cols()) return false;
  if (s.size() == 0) return true;
  const double scale = 1.0 + s.cwiseAbs().maxCoeff();
  return (s - s.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

double min_eigenvalue(const Matrix& s) {
  require_square(s, "min_eigenvalue");
  Eigen::SelfAdjointEigenSolver<Matrix> es(s, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("symmetric eigendecomposition failed");
  return es.eigenvalues().minCoeff();
}

Matrix spd_sqrt(const Matrix& s, double floor) {
  require_square(s, "spd_sqrt");
  require_finite(s, "spd_sqrt");
  const auto es = eigen_of(s);
  const Vector& lambda = es.eigenvalues();  // ascending
  const double lmax = lambda.maxCoeff();
  const double lmin = lambda.minCoeff();
  if (!(lmax > 0.0) || lmin < floor * lmax) {
    std::ostringstream os;
    os << "spd_sqrt: matrix is singular or not positive definite (smallest eigenvalue " << lmin
       << ", largest " << lmax << ")";
    throw NearSingularError(os.str(), lmin);
  }
  return rebuild(es, lambda.cwiseSqrt());
}

Matrix matrix_exp(const Matrix& s) {
  require_square(s, "matrix_exp");
  require_finite(s, "matrix_exp");
  const auto es = eigen_of(s);
  return rebuild(es, es.eigenvalues().array().exp().matrix());
}

Matrix matrix_log(const Matrix& s) {
  require_square(s, "matrix_log");
  require_finite(s, "matrix_log");
  const auto es = eigen_of(s);
  const Vector& lambda = es.eigenvalues();
  if (lambda.size() > 0 && !(lambda.minCoeff() > 0.0)) {
    std::ostringstream os;
    os << "matrix_log: matrix is not positive definite (smallest eigenvalue "
       << lambda.minCoeff() << ")";
    throw DomainError(os.str());
  }
  return rebuild(es, lambda.array().log().matrix());
}

}  // namespace genmarket
