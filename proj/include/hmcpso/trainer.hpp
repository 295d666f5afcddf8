#pragma once

#include <string>
#include <vector>

#include "hmcpso/coupler.hpp"
#include "hmcpso/mlp.hpp"

namespace hmcpso::nn {

enum class LossKind { cross_entropy, multi_margin };

LossKind loss_kind_from_string(const std::string& name);

// Mean batch loss of a logits matrix (rows = samples) against integer labels.
// Cross-entropy uses a log-sum-exp that stays finite for any finite logits;
// multi-margin is the mean hinge sum (margin 1, p = 1) over wrong classes.
double batch_loss(const Matrix& logits, const std::vector<int>& labels, LossKind kind);

// Exact dLoss/dLogits, used by the plain-Adam baseline and as a test oracle.
Matrix batch_loss_gradient(const Matrix& logits, const std::vector<int>& labels, LossKind kind);

double accuracy(const Matrix& logits, const std::vector<int>& labels);

// ---------------------------------------------------------------------------
// Swarm coupling
// ---------------------------------------------------------------------------

struct SwarmLabelInit {
  int batch_size = 0;
  int num_classes = 0;
  double target_value = 1.0;
  double off_value = -4.0;
  // Per-entry perturbation: zero-mean normal with this standard deviation,
  // clamped at +-noise_stddev so every particle stays within inf-norm
  // noise_stddev of the base matrix. 0 disables the noise.
  double noise_stddev = 0.1;
};

// One position matrix per particle: target_value at the label column of each
// row, off_value elsewhere, plus the clamped noise.
std::vector<Matrix> init_swarm_from_labels(const std::vector<int>& labels,
                                           const SwarmLabelInit& cfg, int n_particles, Rng& rng);

// grad = -((c1r1 + c2r2) / lr_eps) * (gbest - y)
Matrix estimate_output_gradient(const Matrix& gbest, const Matrix& y, const SampledCoeffs& coeffs,
                                double lr_eps);

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

struct TrainerConfig {
  int num_features = 0;
  int num_classes = 0;
  std::vector<int> hidden = {32};
  int batch_size = 16;
  int epochs = 10;
  LossKind loss = LossKind::cross_entropy;
  double lr_eps = 0.01;  // scale of the output-gradient estimate
  AdamParams adam;
  SwarmLabelInit label_init;  // batch_size/num_classes filled per batch
  // Inner HMC-PSO budget per batch.
  int inner_iters = 5;
  int inner_particles = 4;
  int inner_hmc = 1;
  PsoParams inner_pso;      // dims filled per batch
  double inner_step_size = 0.05;
  int inner_num_steps = 5;
  std::uint64_t seed = 42;
  bool use_swarm_gradient = true;  // false: plain-Adam baseline on exact gradients
};

struct Dataset {
  Matrix features;
  std::vector<int> labels;

  int size() const { return features.rows; }
};

// CSV rows: feature columns then an integer label column. Parse or range
// failures name the offending 1-based row.
Dataset load_dataset_csv(const std::string& path, int num_features, int num_classes);

struct BatchMetrics {
  double loss = 0.0;
  double acc = 0.0;
};

// Backpropagates a dLoss/dLogits seed and applies one Adam step per layer.
// Expects 2 * num_layers states (weights then biases, per layer).
void apply_output_gradient(MlpModel& model, const ForwardCache& cache, const Matrix& dlogits,
                           std::vector<AdamState>& adam);

// One batch: forward, inner HMC-PSO over label-seeded particle matrices,
// output-gradient estimate from the inner g_best, backprop, Adam on every
// layer. The baseline path swaps the estimate for the exact loss gradient.
BatchMetrics train_step(MlpModel& model, const Matrix& batch_x, const std::vector<int>& batch_y,
                        const TrainerConfig& cfg, std::vector<AdamState>& adam, Rng& rng);

double evaluate(const MlpModel& model, const Dataset& data);

struct EpochMetrics {
  int epoch = 0;
  double train_loss = 0.0;
  double train_acc = 0.0;
  double test_acc = 0.0;
};

std::vector<EpochMetrics> train(MlpModel& model, const Dataset& train_data,
                                const Dataset& test_data, const TrainerConfig& cfg);

// `epoch,train_loss,train_acc,test_acc`
void write_metrics_csv(const std::vector<EpochMetrics>& metrics, const std::string& path);

}  // namespace hmcpso::nn
