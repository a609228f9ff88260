#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "genmarket/gaussian.hpp"

namespace genmarket {

/// Hidden-layer nonlinearity. Tanh, sigmoid and softplus are smooth and
/// non-polynomial; ReLU is offered for comparison but is not smooth.
enum class Activation { kTanh, kSigmoid, kSoftplus, kRelu };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& name);

/// Width D(6 + 2D + D^2)/2 of the fixed-time approximating network.
constexpr int fixed_time_width(int dim) { return (dim * (6 + 2 * dim + dim * dim) + 1) / 2; }

/// [1 + D, width x (depth - 1), D + D(D+1)/2].
std::vector<int> gdn_layer_dims(int dim, int width, int depth);

/// Feedforward network on (x, t) whose last affine output is read as chart
/// coordinates of a Gaussian. weights[k] is d_{k+1} x d_k (output x input).
struct GDNParams {
  std::vector<int> layer_dims;
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
  Activation activation = Activation::kTanh;
  int declared_width = 0;  // 0: no declared bound beyond the hidden dims

  int dim() const { return layer_dims.empty() ? 0 : layer_dims.front() - 1; }
  int depth() const { return static_cast<int>(weights.size()); }
  int width() const;  // largest hidden dimension
  Eigen::Index parameter_count() const;

  void validate() const;

  Vector flatten() const;
  void assign_flat(const Vector& flat);

  static GDNParams zeros(std::vector<int> layer_dims, Activation activation = Activation::kTanh);
  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases.
  static GDNParams initialize(std::vector<int> layer_dims, Activation activation,
                              std::uint64_t seed);
};

/// Network with every hidden layer exactly fixed_time_width(D) wide.
GDNParams fixed_time_network(int dim, int depth, Activation activation, std::uint64_t seed);

struct TrainingPair {
  Vector x;
  double t = 0.0;
  ChartCoords target;
};

/// Raw network output (chart coordinates, flattened) at (x, t).
Vector gdn_raw(const GDNParams& params, const Vector& x, double t);

/// Raw outputs for a batch of inputs stored column-wise ((1 + D) x B).
Matrix gdn_raw_batch(const GDNParams& params, const Matrix& inputs);

GaussianMeasure gdn_forward(const GDNParams& params, const Vector& x, double t);

struct GDNGradient {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
  double loss = 0.0;

  Vector flatten() const;
};

/// Chart-MSE loss, mean over the batch of ||raw - target||^2.
double chart_mse(const GDNParams& params, std::span<const TrainingPair> batch);

/// Loss and its gradient by reverse accumulation.
GDNGradient gdn_gradient(const GDNParams& params, std::span<const TrainingPair> batch);

}  // namespace genmarket
