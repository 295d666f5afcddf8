#pragma once

#include <span>
#include <vector>

#include "hmcpso/rng.hpp"
#include "hmcpso/vec_ops.hpp"

namespace hmcpso::nn {

// Row-major dense matrix, sized for desk-scale models.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

  double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
  bool same_shape(const Matrix& other) const { return rows == other.rows && cols == other.cols; }
};

// Fully connected net: rectifier on hidden layers, identity logits at the
// output. weights[l] maps layer l activations (cols = in) to layer l+1
// (rows = out).
struct MlpModel {
  std::vector<int> layer_sizes;
  std::vector<Matrix> weights;
  std::vector<Vec> biases;

  int num_layers() const { return static_cast<int>(weights.size()); }
  void validate() const;

  // He-scaled uniform weights, zero biases.
  static MlpModel random_init(std::vector<int> layer_sizes, Rng& rng);
};

struct ForwardCache {
  std::vector<Matrix> activations;  // activations[0] = input, back() = logits
};

// Forward pass for a batch (rows = samples). Pass a cache to enable backward.
Matrix forward(const MlpModel& model, const Matrix& input, ForwardCache* cache = nullptr);

struct LayerGrads {
  Matrix dw;
  Vec db;
};

// Backpropagates a dLoss/dLogits seed through the cached forward pass.
std::vector<LayerGrads> backward(const MlpModel& model, const ForwardCache& cache,
                                 const Matrix& dlogits);

struct AdamParams {
  double alpha = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Moment accumulators for one parameter tensor.
struct AdamState {
  AdamParams hp;
  Vec m;
  Vec v;
  long long step = 0;

  explicit AdamState(std::size_t n = 0, AdamParams params = {})
      : hp(params), m(n, 0.0), v(n, 0.0) {}
};

// One bias-corrected Adam step in place. Rejects NaN gradients.
void adam_update(std::span<double> params, std::span<const double> grads, AdamState& state);

}  // namespace hmcpso::nn
