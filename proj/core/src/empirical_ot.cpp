#include "genmarket/empirical_ot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "genmarket/errors.hpp"

namespace genmarket {
namespace {

double sorted_w2(const SampleMatrix& a, const SampleMatrix& b) {
  std::vector<double> xa(a.data(), a.data() + a.rows());
  std::vector<double> xb(b.data(), b.data() + b.rows());
  std::sort(xa.begin(), xa.end());
  std::sort(xb.begin(), xb.end());
  double acc = 0.0;
  for (std::size_t i = 0; i < xa.size(); ++i) acc += (xa[i] - xb[i]) * (xa[i] - xb[i]);
  return std::sqrt(acc / static_cast<double>(xa.size()));
}

double median_of(const Matrix& c) {
  std::vector<double> v(c.data(), c.data() + c.size());
  auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

// Sinkhorn in scaling form with dual absorption: the kernel is always
// exp((f_i + g_j - C_ij) / eps), so scalings u, v stay near 1 and nothing
// underflows as eps shrinks.
class StabilizedSinkhorn {
 public:
  explicit StabilizedSinkhorn(const Matrix& cost)
      : cost_(cost),
        n_(cost.rows()),
        log_weight_(-std::log(static_cast<double>(cost.rows()))),
        f_(Vector::Zero(n_)),
        g_(Vector::Zero(n_)) {}

  void run_stage(double eps, int iterations) {
    eps_ = eps;
    rebuild_kernel();
    u_.setOnes(n_);
    v_.setOnes(n_);
    const double weight = std::exp(log_weight_);
    for (int it = 0; it < iterations; ++it) {
      Vector kv = kernel_ * v_;
      if (!positive(kv)) {
        log_domain_step();
        continue;
      }
      u_ = kv.cwiseInverse() * weight;
      Vector ktu = kernel_.transpose() * u_;
      if (!positive(ktu)) {
        log_domain_step();
        continue;
      }
      v_ = ktu.cwiseInverse() * weight;
      if (u_.array().log().abs().maxCoeff() > kAbsorbLog ||
          v_.array().log().abs().maxCoeff() > kAbsorbLog) {
        absorb();
      }
    }
    absorb();
  }

  // <P, C> / sum(P) for the current plan.
  double transport_cost() const {
    double mass = 0.0, cost = 0.0;
    for (Eigen::Index j = 0; j < n_; ++j) {
      for (Eigen::Index i = 0; i < n_; ++i) {
        const double p = std::exp((f_[i] + g_[j] - cost_(i, j)) / eps_);
        mass += p;
        cost += p * cost_(i, j);
      }
    }
    if (!(mass > 0.0)) throw NumericError("sinkhorn: transport plan vanished");
    return cost / mass;
  }

 private:
  static constexpr double kAbsorbLog = 30.0;

  static bool positive(const Vector& x) {
    return x.allFinite() && x.minCoeff() > 0.0;
  }

  void rebuild_kernel() {
    kernel_.resize(n_, n_);
    for (Eigen::Index j = 0; j < n_; ++j) {
      for (Eigen::Index i = 0; i < n_; ++i) {
        kernel_(i, j) = std::exp((f_[i] + g_[j] - cost_(i, j)) / eps_);
      }
    }
  }

  void absorb() {
    f_ += eps_ * u_.array().log().matrix();
    g_ += eps_ * v_.array().log().matrix();
    u_.setOnes(n_);
    v_.setOnes(n_);
    rebuild_kernel();
  }

  // One exact log-sum-exp update of both duals, used when a kernel row or
  // column underflows entirely.
  void log_domain_step() {
    f_ += eps_ * u_.array().log().matrix();
    g_ += eps_ * v_.array().log().matrix();
    for (Eigen::Index i = 0; i < n_; ++i) {
      double mx = -std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < n_; ++j) mx = std::max(mx, (g_[j] - cost_(i, j)) / eps_);
      double s = 0.0;
      for (Eigen::Index j = 0; j < n_; ++j) s += std::exp((g_[j] - cost_(i, j)) / eps_ - mx);
      f_[i] = eps_ * (log_weight_ - mx - std::log(s));
    }
    for (Eigen::Index j = 0; j < n_; ++j) {
      double mx = -std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < n_; ++i) mx = std::max(mx, (f_[i] - cost_(i, j)) / eps_);
      double s = 0.0;
      for (Eigen::Index i = 0; i < n_; ++i) s += std::exp((f_[i] - cost_(i, j)) / eps_ - mx);
      g_[j] = eps_ * (log_weight_ - mx - std::log(s));
    }
    u_.setOnes(n_);
    v_.setOnes(n_);
    rebuild_kernel();
  }

  const Matrix& cost_;
  Eigen::Index n_;
  double log_weight_;
  double eps_ = 1.0;
  Vector f_, g_, u_, v_;
  Matrix kernel_;
};

}  // namespace

Matrix pairwise_sq_dist(const SampleMatrix& a, const SampleMatrix& b) {
  if (a.cols() != b.cols()) throw DimensionError("pairwise_sq_dist: dimension mismatch");
  Matrix c(a.rows(), b.rows());
  for (Eigen::Index j = 0; j < b.rows(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) c(i, j) = (a.row(i) - b.row(j)).squaredNorm();
  }
  return c;
}

std::vector<int> optimal_assignment(const Matrix& cost) {
  if (cost.rows() != cost.cols()) throw DimensionError("optimal_assignment: cost must be square");
  const int n = static_cast<int>(cost.rows());
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based potentials; column 0 is the virtual start of each augmenting path.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n);
  for (int j = 1; j <= n; ++j) row_to_col[match[j] - 1] = j - 1;
  return row_to_col;
}

EmpiricalW2 empirical_w2(const SampleMatrix& a, const SampleMatrix& b, OtMethod method,
                         const SinkhornOptions& opts) {
  if (a.rows() != b.rows()) {
    std::ostringstream os;
    os << "empirical_w2: sample counts differ (" << a.rows() << " vs " << b.rows() << ")";
    throw DimensionError(os.str());
  }
  if (a.cols() != b.cols()) throw DimensionError("empirical_w2: dimension mismatch");
  if (a.rows() < 1) throw PreconditionError("empirical_w2: need at least one sample");
  if (!a.allFinite() || !b.allFinite()) throw NumericError("empirical_w2: non-finite samples");

  if (method == OtMethod::kAuto) method = a.cols() == 1 ? OtMethod::kSorted : OtMethod::kSinkhorn;
  const auto n = a.rows();
  if (a == b) return {0.0, 0.0, method};

  switch (method) {
    case OtMethod::kSorted: {
      if (a.cols() != 1) throw DimensionError("empirical_w2: sorted coupling needs D = 1");
      return {sorted_w2(a, b), 0.0, OtMethod::kSorted};
    }
    case OtMethod::kAssignment: {
      if (n > kMaxAssignmentSize) {
        std::ostringstream os;
        os << "empirical_w2: exact assignment limited to " << kMaxAssignmentSize << " samples";
        throw PreconditionError(os.str());
      }
      const Matrix c = pairwise_sq_dist(a, b);
      const auto match = optimal_assignment(c);
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) acc += c(i, match[static_cast<std::size_t>(i)]);
      return {std::sqrt(acc / static_cast<double>(n)), 0.0, OtMethod::kAssignment};
    }
    case OtMethod::kSinkhorn: {
      if (opts.stages < 1 || opts.iterations < opts.stages || !(opts.end_fraction > 0.0) ||
          opts.start_fraction < opts.end_fraction) {
        throw ConfigError("empirical_w2: invalid Sinkhorn schedule");
      }
      const Matrix c = pairwise_sq_dist(a, b);
      const double med = median_of(c);
      if (!(med > 0.0)) return {0.0, 0.0, OtMethod::kSinkhorn};  // (near-)identical point sets
      StabilizedSinkhorn solver(c);
      const double ratio = opts.stages > 1
                               ? std::pow(opts.end_fraction / opts.start_fraction,
                                          1.0 / (opts.stages - 1))
                               : 1.0;
      double eps = (opts.stages > 1 ? opts.start_fraction : opts.end_fraction) * med;
      const int per_stage = opts.iterations / opts.stages;
      for (int s = 0; s < opts.stages; ++s) {
        const int iters = s + 1 == opts.stages ? opts.iterations - per_stage * s : per_stage;
        solver.run_stage(eps, iters);
        if (s + 1 < opts.stages) eps *= ratio;
      }
      return {std::sqrt(std::max(0.0, solver.transport_cost())), eps, OtMethod::kSinkhorn};
    }
    case OtMethod::kAuto:
      break;
  }
  throw ConfigError("empirical_w2: unknown method");
}

}  // namespace genmarket
