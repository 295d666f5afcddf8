#include "hmcpso/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace hmcpso::nn {

void MlpModel::validate() const {
  if (layer_sizes.size() < 2) throw std::invalid_argument("MlpModel: need at least two layers");
  if (weights.size() != layer_sizes.size() - 1 || biases.size() != weights.size())
    throw std::invalid_argument("MlpModel: weight/bias count mismatch");
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (weights[l].rows != layer_sizes[l + 1] || weights[l].cols != layer_sizes[l])
      throw std::invalid_argument("MlpModel: weight shapes do not chain");
    if (static_cast<int>(biases[l].size()) != layer_sizes[l + 1])
      throw std::invalid_argument("MlpModel: bias shape mismatch");
  }
}

MlpModel MlpModel::random_init(std::vector<int> sizes, Rng& rng) {
  MlpModel m;
  m.layer_sizes = std::move(sizes);
  for (std::size_t l = 0; l + 1 < m.layer_sizes.size(); ++l) {
    const int in = m.layer_sizes[l];
    const int out = m.layer_sizes[l + 1];
    Matrix w(out, in);
    const double scale = std::sqrt(2.0 / in);
    for (double& x : w.data) x = rng.uniform(-scale, scale);
    m.weights.push_back(std::move(w));
    m.biases.emplace_back(out, 0.0);
  }
  m.validate();
  return m;
}

Matrix forward(const MlpModel& model, const Matrix& input, ForwardCache* cache) {
  if (input.cols != model.layer_sizes.front())
    throw std::invalid_argument("forward: input width does not match the first layer");
  if (cache) {
    cache->activations.clear();
    cache->activations.push_back(input);
  }
  Matrix a = input;
  for (int l = 0; l < model.num_layers(); ++l) {
    const Matrix& w = model.weights[l];
    const Vec& b = model.biases[l];
    Matrix z(a.rows, w.rows);
    for (int r = 0; r < a.rows; ++r)
      for (int o = 0; o < w.rows; ++o) {
        double s = b[o];
        for (int i = 0; i < w.cols; ++i) s += a.at(r, i) * w.at(o, i);
        z.at(r, o) = s;
      }
    const bool last = (l == model.num_layers() - 1);
    if (!last)
      for (double& x : z.data) x = x > 0.0 ? x : 0.0;
    if (cache) cache->activations.push_back(z);
    a = std::move(z);
  }
  return a;
}

std::vector<LayerGrads> backward(const MlpModel& model, const ForwardCache& cache,
                                 const Matrix& dlogits) {
  const int layers = model.num_layers();
  if (static_cast<int>(cache.activations.size()) != layers + 1)
    throw std::invalid_argument("backward: cache does not match the model");
  if (!dlogits.same_shape(cache.activations.back()))
    throw std::invalid_argument("backward: seed shape does not match the logits");

  std::vector<LayerGrads> grads(layers);
  Matrix delta = dlogits;
  for (int l = layers - 1; l >= 0; --l) {
    const Matrix& a_in = cache.activations[l];
    const Matrix& w = model.weights[l];
    LayerGrads& g = grads[l];
    g.dw = Matrix(w.rows, w.cols);
    g.db.assign(w.rows, 0.0);
    for (int r = 0; r < delta.rows; ++r)
      for (int o = 0; o < w.rows; ++o) {
        const double d = delta.at(r, o);
        g.db[o] += d;
        for (int i = 0; i < w.cols; ++i) g.dw.at(o, i) += d * a_in.at(r, i);
      }
    if (l > 0) {
      // Push through W^T, then gate on the rectifier: the cached activation
      // is relu(z), so activation > 0 marks the pass-through units.
      Matrix prev(delta.rows, w.cols);
      for (int r = 0; r < delta.rows; ++r)
        for (int i = 0; i < w.cols; ++i) {
          double s = 0.0;
          for (int o = 0; o < w.rows; ++o) s += delta.at(r, o) * w.at(o, i);
          prev.at(r, i) = a_in.at(r, i) > 0.0 ? s : 0.0;
        }
      delta = std::move(prev);
    }
  }
  return grads;
}

void adam_update(std::span<double> params, std::span<const double> grads, AdamState& state) {
  if (params.size() != grads.size() || params.size() != state.m.size())
    throw std::invalid_argument("adam_update: shape mismatch");
  for (double g : grads)
    if (std::isnan(g)) throw std::invalid_argument("adam_update: NaN gradient");

  ++state.step;
  const AdamParams& hp = state.hp;
  const double corr1 = 1.0 - std::pow(hp.beta1, static_cast<double>(state.step));
  const double corr2 = 1.0 - std::pow(hp.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = hp.beta1 * state.m[i] + (1.0 - hp.beta1) * grads[i];
    state.v[i] = hp.beta2 * state.v[i] + (1.0 - hp.beta2) * grads[i] * grads[i];
    const double m_hat = state.m[i] / corr1;
    const double v_hat = state.v[i] / corr2;
    params[i] -= hp.alpha * m_hat / (std::sqrt(v_hat) + hp.epsilon);
  }
}

}  // namespace hmcpso::nn
