#include "genmarket/gdn.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "genmarket/errors.hpp"
#include "genmarket/random.hpp"

namespace genmarket {
namespace {

void activate(Activation a, const Matrix& z, Matrix& h) {
  switch (a) {
    case Activation::kTanh:
      h = z.array().tanh().matrix();
      return;
    case Activation::kSigmoid:
      h = (1.0 / (1.0 + (-z.array()).exp())).matrix();
      return;
    case Activation::kSoftplus:
      // log(1 + e^z) = max(z, 0) + log1p(e^{-|z|})
      h = (z.array().max(0.0) + (-z.array().abs()).exp().log1p()).matrix();
      return;
    case Activation::kRelu:
      h = z.array().max(0.0).matrix();
      return;
  }
}

// Elementwise derivative of the activation, given pre-activation z and output h.
Matrix activation_slope(Activation a, const Matrix& z, const Matrix& h) {
  switch (a) {
    case Activation::kTanh:
      return (1.0 - h.array().square()).matrix();
    case Activation::kSigmoid:
      return (h.array() * (1.0 - h.array())).matrix();
    case Activation::kSoftplus:
      return (1.0 / (1.0 + (-z.array()).exp())).matrix();
    case Activation::kRelu:
      return (z.array() > 0.0).cast<double>().matrix();
  }
  return Matrix();
}

Matrix stack_inputs(std::span<const TrainingPair> batch, int dim) {
  Matrix in(dim + 1, static_cast<Eigen::Index>(batch.size()));
  for (std::size_t b = 0; b < batch.size(); ++b) {
    if (batch[b].x.size() != dim) throw DimensionError("training pair has wrong state dimension");
    in.col(static_cast<Eigen::Index>(b)) << batch[b].x, batch[b].t;
  }
  return in;
}

Matrix stack_targets(std::span<const TrainingPair> batch, int out_dim) {
  Matrix y(out_dim, static_cast<Eigen::Index>(batch.size()));
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const Vector flat = batch[b].target.flat();
    if (flat.size() != out_dim) throw DimensionError("training target has wrong length");
    y.col(static_cast<Eigen::Index>(b)) = flat;
  }
  return y;
}

}  // namespace

std::string to_string(Activation a) {
  switch (a) {
    case Activation::kTanh: return "tanh";
    case Activation::kSigmoid: return "sigmoid";
    case Activation::kSoftplus: return "softplus";
    case Activation::kRelu: return "relu";
  }
  return "unknown";
}

Activation activation_from_string(const std::string& name) {
  if (name == "tanh") return Activation::kTanh;
  if (name == "sigmoid") return Activation::kSigmoid;
  if (name == "softplus") return Activation::kSoftplus;
  if (name == "relu") return Activation::kRelu;
  throw ConfigError("unknown activation '" + name + "' (expected tanh, sigmoid, softplus, relu)");
}

std::vector<int> gdn_layer_dims(int dim, int width, int depth) {
  if (dim < 1 || width < 1 || depth < 1) {
    throw ConfigError("network needs dimension, width and depth of at least 1");
  }
  std::vector<int> dims;
  dims.push_back(1 + dim);
  for (int k = 1; k < depth; ++k) dims.push_back(width);
  dims.push_back(dim + sym_size(dim));
  return dims;
}

int GDNParams::width() const {
  int w = 0;
  for (std::size_t k = 1; k + 1 < layer_dims.size(); ++k) w = std::max(w, layer_dims[k]);
  return w;
}

Eigen::Index GDNParams::parameter_count() const {
  Eigen::Index n = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) n += weights[k].size() + biases[k].size();
  return n;
}

void GDNParams::validate() const {
  if (layer_dims.size() < 2) throw ConfigError("network needs at least input and output layers");
  const int d = dim();
  if (d < 1) throw ConfigError("network input must be (x, t) with x of dimension >= 1");
  if (layer_dims.back() != d + sym_size(d)) {
    std::ostringstream os;
    os << "network output must have D + D(D+1)/2 = " << d + sym_size(d) << " units, got "
       << layer_dims.back();
    throw DimensionError(os.str());
  }
  if (weights.size() + 1 != layer_dims.size() || biases.size() != weights.size()) {
    throw DimensionError("network weight/bias count does not match layer_dims");
  }
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k].rows() != layer_dims[k + 1] || weights[k].cols() != layer_dims[k] ||
        biases[k].size() != layer_dims[k + 1]) {
      std::ostringstream os;
      os << "layer " << k << " has shape " << weights[k].rows() << "x" << weights[k].cols()
         << ", expected " << layer_dims[k + 1] << "x" << layer_dims[k];
      throw DimensionError(os.str());
    }
    if (!weights[k].allFinite() || !biases[k].allFinite()) {
      throw NumericError("network parameters are not finite");
    }
  }
  if (declared_width > 0 && width() > declared_width) {
    std::ostringstream os;
    os << "hidden width " << width() << " exceeds declared width " << declared_width;
    throw ConfigError(os.str());
  }
}

Vector GDNParams::flatten() const {
  Vector flat(parameter_count());
  Eigen::Index pos = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    flat.segment(pos, weights[k].size()) = weights[k].reshaped();
    pos += weights[k].size();
    flat.segment(pos, biases[k].size()) = biases[k];
    pos += biases[k].size();
  }
  return flat;
}

void GDNParams::assign_flat(const Vector& flat) {
  if (flat.size() != parameter_count()) throw DimensionError("flat parameter length mismatch");
  Eigen::Index pos = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    weights[k].reshaped() = flat.segment(pos, weights[k].size());
    pos += weights[k].size();
    biases[k] = flat.segment(pos, biases[k].size());
    pos += biases[k].size();
  }
}

GDNParams GDNParams::zeros(std::vector<int> layer_dims, Activation activation) {
  GDNParams p;
  p.layer_dims = std::move(layer_dims);
  p.activation = activation;
  for (std::size_t k = 0; k + 1 < p.layer_dims.size(); ++k) {
    p.weights.push_back(Matrix::Zero(p.layer_dims[k + 1], p.layer_dims[k]));
    p.biases.push_back(Vector::Zero(p.layer_dims[k + 1]));
  }
  p.validate();
  return p;
}

GDNParams GDNParams::initialize(std::vector<int> layer_dims, Activation activation,
                                std::uint64_t seed) {
  GDNParams p = zeros(std::move(layer_dims), activation);
  for (std::size_t k = 0; k < p.weights.size(); ++k) {
    KeyedRng rng(seed, static_cast<std::uint64_t>(RngStream::kInit), k);
    const double bound = 1.0 / std::sqrt(static_cast<double>(p.layer_dims[k]));
    Matrix& w = p.weights[k];
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = bound * (2.0 * rng.uniform() - 1.0);
    }
  }
  return p;
}

GDNParams fixed_time_network(int dim, int depth, Activation activation, std::uint64_t seed) {
  GDNParams p = GDNParams::initialize(gdn_layer_dims(dim, fixed_time_width(dim), depth),
                                      activation, seed);
  p.declared_width = fixed_time_width(dim);
  return p;
}

Matrix gdn_raw_batch(const GDNParams& params, const Matrix& inputs) {
  if (inputs.rows() != params.layer_dims.front()) {
    std::ostringstream os;
    os << "network expects inputs of length " << params.layer_dims.front() << ", got "
       << inputs.rows();
    throw DimensionError(os.str());
  }
  Matrix h = inputs;
  Matrix z;
  const int depth = params.depth();
  for (int k = 0; k < depth; ++k) {
    z = params.weights[k] * h;
    z.colwise() += params.biases[k];
    if (k + 1 < depth) {
      activate(params.activation, z, h);
    } else {
      h = std::move(z);
    }
  }
  return h;
}

Vector gdn_raw(const GDNParams& params, const Vector& x, double t) {
  if (x.size() != params.dim()) {
    std::ostringstream os;
    os << "network state dimension is " << params.dim() << ", got x of length " << x.size();
    throw DimensionError(os.str());
  }
  Matrix in(x.size() + 1, 1);
  in.col(0) << x, t;
  return gdn_raw_batch(params, in).col(0);
}

GaussianMeasure gdn_forward(const GDNParams& params, const Vector& x, double t) {
  return chart_decode(ChartCoords::from_flat(gdn_raw(params, x, t), params.dim()));
}

Vector GDNGradient::flatten() const {
  Eigen::Index n = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) n += weights[k].size() + biases[k].size();
  Vector flat(n);
  Eigen::Index pos = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    flat.segment(pos, weights[k].size()) = weights[k].reshaped();
    pos += weights[k].size();
    flat.segment(pos, biases[k].size()) = biases[k];
    pos += biases[k].size();
  }
  return flat;
}

double chart_mse(const GDNParams& params, std::span<const TrainingPair> batch) {
  if (batch.empty()) throw PreconditionError("chart_mse: empty batch");
  const Matrix raw = gdn_raw_batch(params, stack_inputs(batch, params.dim()));
  const Matrix y = stack_targets(batch, params.layer_dims.back());
  return (raw - y).squaredNorm() / static_cast<double>(batch.size());
}

GDNGradient gdn_gradient(const GDNParams& params, std::span<const TrainingPair> batch) {
  if (batch.empty()) throw PreconditionError("gdn_gradient: empty batch");
  const int depth = params.depth();
  const double inv_b = 1.0 / static_cast<double>(batch.size());

  // Forward pass, keeping pre-activations and layer outputs.
  std::vector<Matrix> pre(depth), out(depth + 1);
  out[0] = stack_inputs(batch, params.dim());
  for (int k = 0; k < depth; ++k) {
    pre[k] = params.weights[k] * out[k];
    pre[k].colwise() += params.biases[k];
    if (k + 1 < depth) {
      activate(params.activation, pre[k], out[k + 1]);
    } else {
      out[k + 1] = pre[k];
    }
  }

  const Matrix residual = out[depth] - stack_targets(batch, params.layer_dims.back());
  GDNGradient grad;
  grad.loss = residual.squaredNorm() * inv_b;
  grad.weights.resize(depth);
  grad.biases.resize(depth);

  Matrix delta = 2.0 * inv_b * residual;  // dL/d(pre-activation) of the current layer
  for (int k = depth - 1; k >= 0; --k) {
    grad.weights[k] = delta * out[k].transpose();
    grad.biases[k] = delta.rowwise().sum();
    if (k > 0) {
      Matrix back = params.weights[k].transpose() * delta;
      delta = back.cwiseProduct(activation_slope(params.activation, pre[k - 1], out[k]));
    }
  }
  return grad;
}

}  // namespace genmarket
