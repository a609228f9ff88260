#pragma once

#include <Eigen/Core>

namespace genmarket {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
// Row-major sample storage: one draw per row.
using SampleMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kDefaultEigenFloor = 1e-12;

/// Number of free entries of a symmetric D x D matrix, D(D+1)/2.
constexpr int sym_size(int dim) { return dim * (dim + 1) / 2; }

/// Recovers D from D(D+1)/2; returns -1 if `len` is not triangular.
int sym_dim_from_size(int len);

/// Packs a vector of length D(D+1)/2 into a symmetric matrix, row by row over
/// the upper triangle: row 0 takes x[0..D), row 1 takes x[D..2D-1), ...
Matrix sym_embed(const Vector& x, int dim);

/// Inverse of sym_embed. Reads the upper triangle only.
Vector sym_extract(const Matrix& s);

bool is_symmetric(const Matrix& s, double rel_tol = 1e-12);

/// Symmetric (not Cholesky) square root via eigendecomposition. Throws
/// NearSingularError if the smallest eigenvalue falls below
/// `floor * largest eigenvalue`.
Matrix spd_sqrt(const Matrix& s, double floor = kDefaultEigenFloor);

/// exp of a symmetric matrix; result is SPD and exactly symmetric.
Matrix matrix_exp(const Matrix& s);

/// Principal logarithm of an SPD matrix. Throws DomainError if `s` is not SPD.
Matrix matrix_log(const Matrix& s);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Matrix& s);

}  // namespace genmarket
