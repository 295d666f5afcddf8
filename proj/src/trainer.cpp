#include "hmcpso/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hmcpso::nn {

LossKind loss_kind_from_string(const std::string& name) {
  if (name == "cross_entropy") return LossKind::cross_entropy;
  if (name == "multi_margin") return LossKind::multi_margin;
  throw std::runtime_error("unknown loss kind: " + name);
}

namespace {

void check_labels(const Matrix& logits, const std::vector<int>& labels) {
  if (static_cast<int>(labels.size()) != logits.rows)
    throw std::invalid_argument("loss: label count does not match batch size");
  for (int y : labels)
    if (y < 0 || y >= logits.cols) throw std::invalid_argument("loss: label out of range");
}

}  // namespace

double batch_loss(const Matrix& logits, const std::vector<int>& labels, LossKind kind) {
  check_labels(logits, labels);
  const int n = logits.rows, c = logits.cols;
  double total = 0.0;
  for (int r = 0; r < n; ++r) {
    if (kind == LossKind::cross_entropy) {
      double mx = logits.at(r, 0);
      for (int j = 1; j < c; ++j) mx = std::max(mx, logits.at(r, j));
      double sum = 0.0;
      for (int j = 0; j < c; ++j) sum += std::exp(logits.at(r, j) - mx);
      total += mx + std::log(sum) - logits.at(r, labels[r]);
    } else {
      const double target = logits.at(r, labels[r]);
      double row = 0.0;
      for (int j = 0; j < c; ++j)
        if (j != labels[r]) row += std::max(0.0, 1.0 - target + logits.at(r, j));
      total += row / c;
    }
  }
  return total / n;
}

Matrix batch_loss_gradient(const Matrix& logits, const std::vector<int>& labels, LossKind kind) {
  check_labels(logits, labels);
  const int n = logits.rows, c = logits.cols;
  Matrix grad(n, c);
  for (int r = 0; r < n; ++r) {
    if (kind == LossKind::cross_entropy) {
      double mx = logits.at(r, 0);
      for (int j = 1; j < c; ++j) mx = std::max(mx, logits.at(r, j));
      double sum = 0.0;
      for (int j = 0; j < c; ++j) sum += std::exp(logits.at(r, j) - mx);
      for (int j = 0; j < c; ++j) grad.at(r, j) = std::exp(logits.at(r, j) - mx) / sum / n;
      grad.at(r, labels[r]) -= 1.0 / n;
    } else {
      const double target = logits.at(r, labels[r]);
      for (int j = 0; j < c; ++j) {
        if (j == labels[r]) continue;
        if (1.0 - target + logits.at(r, j) > 0.0) {
          grad.at(r, j) += 1.0 / (c * n);
          grad.at(r, labels[r]) -= 1.0 / (c * n);
        }
      }
    }
  }
  return grad;
}

double accuracy(const Matrix& logits, const std::vector<int>& labels) {
  check_labels(logits, labels);
  int correct = 0;
  for (int r = 0; r < logits.rows; ++r) {
    int best = 0;
    for (int j = 1; j < logits.cols; ++j)
      if (logits.at(r, j) > logits.at(r, best)) best = j;
    if (best == labels[r]) ++correct;
  }
  return static_cast<double>(correct) / logits.rows;
}

std::vector<Matrix> init_swarm_from_labels(const std::vector<int>& labels,
                                           const SwarmLabelInit& cfg, int n_particles, Rng& rng) {
  if (cfg.num_classes < 1) throw std::invalid_argument("init_swarm_from_labels: num_classes < 1");
  if (static_cast<int>(labels.size()) != cfg.batch_size)
    throw std::invalid_argument("init_swarm_from_labels: label count != batch_size");
  for (int y : labels)
    if (y < 0 || y >= cfg.num_classes)
      throw std::invalid_argument("init_swarm_from_labels: label out of range");

  Matrix base(cfg.batch_size, cfg.num_classes);
  for (int r = 0; r < cfg.batch_size; ++r)
    for (int j = 0; j < cfg.num_classes; ++j)
      base.at(r, j) = (j == labels[r]) ? cfg.target_value : cfg.off_value;

  std::vector<Matrix> particles(n_particles, base);
  if (cfg.noise_stddev > 0.0) {
    for (auto& p : particles)
      for (double& x : p.data)
        x += std::clamp(rng.normal(0.0, cfg.noise_stddev), -cfg.noise_stddev, cfg.noise_stddev);
  }
  return particles;
}

Matrix estimate_output_gradient(const Matrix& gbest, const Matrix& y, const SampledCoeffs& coeffs,
                                double lr_eps) {
  if (!gbest.same_shape(y))
    throw std::invalid_argument("estimate_output_gradient: shape mismatch");
  if (!(lr_eps > 0.0)) throw std::invalid_argument("estimate_output_gradient: lr_eps must be > 0");
  Matrix grad(y.rows, y.cols);
  const double scale = -(coeffs.c1r1 + coeffs.c2r2) / lr_eps;
  for (std::size_t i = 0; i < grad.data.size(); ++i)
    grad.data[i] = scale * (gbest.data[i] - y.data[i]);
  return grad;
}

Dataset load_dataset_csv(const std::string& path, int num_features, int num_classes) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset: " + path);
  std::vector<double> features;
  std::vector<int> labels;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::vector<double> values;
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t pos = 0;
        values.push_back(std::stod(cell, &pos));
        if (pos != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw std::runtime_error(path + " row " + std::to_string(lineno) +
                                 ": not a number: " + cell);
      }
    }
    if (static_cast<int>(values.size()) != num_features + 1)
      throw std::runtime_error(path + " row " + std::to_string(lineno) + ": expected " +
                               std::to_string(num_features + 1) + " columns, got " +
                               std::to_string(values.size()));
    const double raw_label = values.back();
    const int label = static_cast<int>(raw_label);
    if (raw_label != static_cast<double>(label) || label < 0 || label >= num_classes)
      throw std::runtime_error(path + " row " + std::to_string(lineno) +
                               ": label out of range [0, " + std::to_string(num_classes) + ")");
    features.insert(features.end(), values.begin(), values.end() - 1);
    labels.push_back(label);
  }
  Dataset d;
  d.features = Matrix(static_cast<int>(labels.size()), num_features);
  d.features.data = std::move(features);
  d.labels = std::move(labels);
  return d;
}

namespace {

// Runs the per-batch inner swarm and returns (gbest matrix, last coefficients).
std::pair<Matrix, SampledCoeffs> inner_swarm_gbest(const Matrix& y,
                                                   const std::vector<int>& batch_y,
                                                   const TrainerConfig& cfg, Rng& rng) {
  const int batch = y.rows, classes = y.cols;
  SwarmLabelInit init = cfg.label_init;
  init.batch_size = batch;
  init.num_classes = classes;

  const int total = cfg.inner_particles + cfg.inner_hmc;
  std::vector<Matrix> seeds = init_swarm_from_labels(batch_y, init, total, rng);
  std::vector<Vec> positions;
  positions.reserve(total);
  for (auto& s : seeds) positions.push_back(std::move(s.data));

  RunConfig rc;
  rc.n_particles = cfg.inner_particles;
  rc.n_hmc = cfg.inner_hmc;
  rc.pso = cfg.inner_pso;
  rc.pso.dims = batch * classes;
  rc.hmc.step_size = cfg.inner_step_size;
  rc.hmc.num_steps = cfg.inner_num_steps;
  rc.max_iters = cfg.inner_iters;
  rc.conv_window = cfg.inner_iters;
  rc.conv_tol = 0.0;
  rc.seed = rng.next_u64();
  const double lo = std::min(init.off_value, init.target_value) - 1.0;
  const double hi = std::max(init.off_value, init.target_value) + 1.0;
  rc.init_lo.assign(rc.pso.dims, lo);
  rc.init_hi.assign(rc.pso.dims, hi);

  const LossKind kind = cfg.loss;
  FitnessFn fitness = [batch, classes, &batch_y, kind](std::span<const double> pos) {
    Matrix logits(batch, classes);
    logits.data.assign(pos.begin(), pos.end());
    return batch_loss(logits, batch_y, kind);
  };

  RunTrace trace = run_hmc_pso(fitness, rc, positions);
  Matrix gbest(batch, classes);
  gbest.data = trace.final_best.position;
  return {std::move(gbest), trace.records.back().coeffs};
}

}  // namespace

void apply_output_gradient(MlpModel& model, const ForwardCache& cache, const Matrix& dlogits,
                           std::vector<AdamState>& adam) {
  if (adam.size() != static_cast<std::size_t>(2 * model.num_layers()))
    throw std::invalid_argument("apply_output_gradient: need two Adam states per layer");
  std::vector<LayerGrads> grads = backward(model, cache, dlogits);
  for (int l = 0; l < model.num_layers(); ++l) {
    adam_update(model.weights[l].data, grads[l].dw.data, adam[2 * l]);
    adam_update(model.biases[l], grads[l].db, adam[2 * l + 1]);
  }
}

BatchMetrics train_step(MlpModel& model, const Matrix& batch_x, const std::vector<int>& batch_y,
                        const TrainerConfig& cfg, std::vector<AdamState>& adam, Rng& rng) {
  if (batch_x.rows == 0) throw std::invalid_argument("train_step: empty batch");
  ForwardCache cache;
  const Matrix logits = forward(model, batch_x, &cache);

  Matrix seed;
  if (cfg.use_swarm_gradient) {
    auto [gbest, coeffs] = inner_swarm_gbest(logits, batch_y, cfg, rng);
    seed = estimate_output_gradient(gbest, logits, coeffs, cfg.lr_eps);
  } else {
    seed = batch_loss_gradient(logits, batch_y, cfg.loss);
  }
  apply_output_gradient(model, cache, seed, adam);

  BatchMetrics m;
  m.loss = batch_loss(logits, batch_y, cfg.loss);
  m.acc = accuracy(logits, batch_y);
  return m;
}

double evaluate(const MlpModel& model, const Dataset& data) {
  if (data.size() == 0) throw std::invalid_argument("evaluate: empty dataset");
  const Matrix logits = forward(model, data.features);
  return accuracy(logits, data.labels);
}

std::vector<EpochMetrics> train(MlpModel& model, const Dataset& train_data,
                                const Dataset& test_data, const TrainerConfig& cfg) {
  if (train_data.size() == 0) throw std::invalid_argument("train: empty training set");
  Rng rng(cfg.seed);
  std::vector<AdamState> adam;
  for (int l = 0; l < model.num_layers(); ++l) {
    adam.emplace_back(model.weights[l].data.size(), cfg.adam);
    adam.emplace_back(model.biases[l].size(), cfg.adam);
  }

  std::vector<int> order(train_data.size());
  for (int i = 0; i < train_data.size(); ++i) order[i] = i;

  std::vector<EpochMetrics> history;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    // Fisher-Yates off the run stream.
    for (int i = train_data.size() - 1; i > 0; --i) {
      const int j = static_cast<int>(rng.uniform() * (i + 1));
      std::swap(order[i], order[j]);
    }

    double loss_sum = 0.0, acc_sum = 0.0;
    int batches = 0;
    for (int start = 0; start < train_data.size(); start += cfg.batch_size) {
      const int end = std::min(start + cfg.batch_size, train_data.size());
      Matrix bx(end - start, cfg.num_features);
      std::vector<int> by(end - start);
      for (int r = start; r < end; ++r) {
        const int src = order[r];
        by[r - start] = train_data.labels[src];
        for (int c = 0; c < cfg.num_features; ++c)
          bx.at(r - start, c) = train_data.features.at(src, c);
      }
      BatchMetrics bm;
      try {
        bm = train_step(model, bx, by, cfg, adam, rng);
      } catch (const std::exception& e) {
        throw std::runtime_error("epoch " + std::to_string(epoch) + " batch " +
                                 std::to_string(batches) + ": " + e.what());
      }
      loss_sum += bm.loss;
      acc_sum += bm.acc;
      ++batches;
    }

    EpochMetrics em;
    em.epoch = epoch;
    em.train_loss = loss_sum / batches;
    em.train_acc = acc_sum / batches;
    em.test_acc = test_data.size() > 0 ? evaluate(model, test_data) : 0.0;
    history.push_back(em);
  }
  return history;
}

void write_metrics_csv(const std::vector<EpochMetrics>& metrics, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write metrics file: " + path);
  out << "epoch,train_loss,train_acc,test_acc\n";
  for (const auto& m : metrics) {
    out << m.epoch << ',' << format_double(m.train_loss) << ',' << format_double(m.train_acc)
        << ',' << format_double(m.test_acc) << '\n';
  }
}

}  // namespace hmcpso::nn
