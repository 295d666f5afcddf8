#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "hmcpso/config.hpp"
#include "hmcpso/coupler.hpp"
#include "hmcpso/objectives.hpp"
#include "hmcpso/trainer.hpp"

namespace fs = std::filesystem;
using namespace hmcpso;

namespace {

struct CommonOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed_override;
  std::string out_dir = "out";
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool config_required = true) {
  auto* c = cmd->add_option("--config", opts.config_path, "configuration file");
  if (config_required) c->required();
  cmd->add_option("--seed", opts.seed_override, "seed override");
  cmd->add_option("--out", opts.out_dir, "output directory");
}

fs::path prepare_out_dir(const std::string& dir) {
  fs::path p(dir);
  fs::create_directories(p);
  return p;
}

Vec expand_bound(const KeyValueConfig& cfg, const std::string& key, int dims, const Vec& fallback) {
  if (!cfg.has(key)) return fallback;
  Vec v = cfg.get_doubles(key);
  if (static_cast<int>(v.size()) == 1) v.assign(dims, v[0]);
  if (static_cast<int>(v.size()) != dims)
    throw std::runtime_error(key + " must be a scalar or a list of " + std::to_string(dims));
  return v;
}

RunConfig build_run_config(const KeyValueConfig& cfg, const Objective& obj,
                           const CommonOpts& opts, int default_max_iters = 500) {
  RunConfig rc;
  rc.pso.dims = obj.dims;
  rc.pso.c1 = cfg.get_double("pso.c1", rc.pso.c1);
  rc.pso.c2 = cfg.get_double("pso.c2", rc.pso.c2);
  rc.pso.inertia_w = cfg.get_double("pso.inertia_w", rc.pso.inertia_w);
  rc.pso.beta = cfg.get_double("pso.beta", rc.pso.beta);

  rc.hmc.step_size = cfg.get_double("hmc.step_size", rc.hmc.step_size);
  rc.hmc.num_steps = static_cast<int>(cfg.get_int("hmc.num_steps", rc.hmc.num_steps));
  rc.hmc.metropolis = cfg.get_bool("hmc.metropolis", true);
  if (cfg.has("hmc.mass")) {
    Vec mass = cfg.get_doubles("hmc.mass");
    if (static_cast<int>(mass.size()) == 1) mass.assign(obj.dims, mass[0]);
    rc.hmc.mass_diag = std::move(mass);
  }

  rc.n_particles = static_cast<int>(cfg.get_int("run.n_particles", 20));
  rc.n_hmc = static_cast<int>(cfg.get_int("run.n_hmc", 1));
  rc.max_iters = static_cast<int>(cfg.get_int("run.max_iters", default_max_iters));
  rc.conv_window = static_cast<int>(cfg.get_int("run.conv_window", std::min(50, rc.max_iters)));
  rc.conv_tol = cfg.get_double("run.conv_tol", 1e-8);
  rc.seed = static_cast<std::uint64_t>(cfg.get_int("run.seed", 42));
  if (opts.seed_override) rc.seed = *opts.seed_override;
  rc.init_lo = expand_bound(cfg, "run.init_lo", obj.dims, obj.init_lo);
  rc.init_hi = expand_bound(cfg, "run.init_hi", obj.dims, obj.init_hi);
  return rc;
}

Objective objective_from_config(const KeyValueConfig& cfg) {
  const std::string name = cfg.get_string("objective.name");
  const int dims = static_cast<int>(cfg.get_int("objective.dims", 2));
  if (name == "sphere") return make_sphere(dims);
  if (name == "rastrigin") return make_rastrigin(dims);
  if (name == "ackley") return make_ackley(dims);
  if (name == "multiwell_quartic") return make_multiwell_quartic();
  if (name == "mixture") {
    GaussianMixture gm = load_mixture(cfg.get_string("objective.modes_file"));
    const double box = cfg.get_double("objective.box", 6.0);
    return make_mixture_objective("mixture", std::move(gm), box);
  }
  if (name == "golomb") {
    const int order = static_cast<int>(cfg.get_int("objective.order"));
    const GolombDefaults d = golomb_defaults(order);
    const int k = static_cast<int>(cfg.get_int("objective.k", d.k));
    const long long box_hi = cfg.get_int("objective.box_hi", d.box_hi);
    return make_golomb_objective(order, k, box_hi);
  }
  throw std::runtime_error("unknown objective: " + name);
}

std::string position_to_string(const Vec& x) {
  std::string s = "(";
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) s += ", ";
    s += format_double(x[i]);
  }
  return s + ")";
}

void write_run_outputs(const RunTrace& trace, const fs::path& out) {
  write_trace_csv(trace, (out / "trace.csv").string(), (out / "trace_positions.csv").string());
}

void print_summary(const RunTrace& trace) {
  std::cout << "gbest_value=" << format_double(trace.final_best.value)
            << " gbest_position=" << position_to_string(trace.final_best.position)
            << " iterations=" << trace.records.size() << " termination="
            << (trace.reason == TerminationReason::converged ? "converged" : "max_iters") << "\n";
}

int cmd_optimize(const CommonOpts& opts) {
  const KeyValueConfig cfg = KeyValueConfig::parse_file(opts.config_path);
  const Objective obj = objective_from_config(cfg);
  const RunConfig rc = build_run_config(cfg, obj, opts);
  const fs::path out = prepare_out_dir(opts.out_dir);
  const RunTrace trace = run_hmc_pso(obj.eval, rc);
  write_run_outputs(trace, out);
  std::cout << "objective=" << obj.name << " dims=" << obj.dims << "\n";
  print_summary(trace);
  return 0;
}

int cmd_golomb(int order, const CommonOpts& opts) {
  if (order < 2 || order > 50) throw std::runtime_error("golomb order must be in [2, 50]");
  const KeyValueConfig cfg = KeyValueConfig::parse_file(opts.config_path);

  const GolombDefaults d = golomb_defaults(order);
  const int k = static_cast<int>(cfg.get_int("objective.k", d.k));
  const long long box_hi = cfg.get_int("objective.box_hi", d.box_hi);
  const Objective obj = make_golomb_objective(order, k, box_hi);

  const int default_iters = 1000;
  KeyValueConfig patched = cfg;
  if (!cfg.has("run.conv_window")) {
    // Golomb searches keep exploring through long plateaus; default to a
    // budget-driven run.
    const int iters = static_cast<int>(cfg.get_int("run.max_iters", default_iters));
    patched.set("run.conv_window", std::to_string(iters));
  }
  RunConfig rc = build_run_config(patched, obj, opts, default_iters);
  if (!cfg.has("hmc.metropolis")) rc.hmc.metropolis = d.hmc_metropolis;
  const fs::path out = prepare_out_dir(opts.out_dir);
  const RunTrace trace = run_hmc_pso(obj.eval, rc);
  write_run_outputs(trace, out);

  const GolombRuler best = decode_ruler(trace.final_best.position);
  std::cout << "order=" << order << " k=" << k << "\nmarks=";
  for (std::size_t i = 0; i < best.marks.size(); ++i)
    std::cout << (i ? "," : "") << best.marks[i];
  std::cout << "\nviolations=" << total_violation(best) << " length=" << best.length()
            << " loss=" << format_double(trace.final_best.value) << "\n";
  if (auto opt = optimal_golomb_length(order))
    std::cout << "optimal_length=" << *opt << " optimal_loss="
              << format_double(std::pow(10.0, -k) * static_cast<double>(*opt)) << "\n";
  print_summary(trace);
  return 0;
}

nn::TrainerConfig trainer_config_from(const KeyValueConfig& cfg, const CommonOpts& opts) {
  nn::TrainerConfig tc;
  tc.num_features = static_cast<int>(cfg.get_int("data.features"));
  tc.num_classes = static_cast<int>(cfg.get_int("data.classes"));
  if (cfg.has("train.hidden")) {
    tc.hidden.clear();
    for (double h : cfg.get_doubles("train.hidden")) tc.hidden.push_back(static_cast<int>(h));
  }
  tc.batch_size = static_cast<int>(cfg.get_int("train.batch_size", 16));
  tc.epochs = static_cast<int>(cfg.get_int("train.epochs", 10));
  tc.loss = nn::loss_kind_from_string(cfg.get_string("train.loss", "cross_entropy"));
  tc.lr_eps = cfg.get_double("train.lr_eps", 0.01);
  tc.adam.alpha = cfg.get_double("train.alpha", 0.001);
  tc.label_init.target_value = cfg.get_double("train.target_value", 1.0);
  tc.label_init.off_value = cfg.get_double("train.off_value", -4.0);
  tc.label_init.noise_stddev = cfg.get_double("train.noise_stddev", 0.1);
  tc.inner_iters = static_cast<int>(cfg.get_int("train.inner_iters", 5));
  tc.inner_particles = static_cast<int>(cfg.get_int("train.inner_particles", 4));
  tc.inner_hmc = static_cast<int>(cfg.get_int("train.inner_hmc", 1));
  tc.inner_step_size = cfg.get_double("train.inner_step_size", 0.05);
  tc.inner_num_steps = static_cast<int>(cfg.get_int("train.inner_num_steps", 5));
  tc.use_swarm_gradient = !cfg.get_bool("train.baseline", false);
  tc.seed = static_cast<std::uint64_t>(cfg.get_int("run.seed", 42));
  if (opts.seed_override) tc.seed = *opts.seed_override;
  return tc;
}

int cmd_train(const CommonOpts& opts) {
  const KeyValueConfig cfg = KeyValueConfig::parse_file(opts.config_path);
  const nn::TrainerConfig tc = trainer_config_from(cfg, opts);
  const nn::Dataset train_data =
      nn::load_dataset_csv(cfg.get_string("data.train"), tc.num_features, tc.num_classes);
  const nn::Dataset test_data =
      nn::load_dataset_csv(cfg.get_string("data.test"), tc.num_features, tc.num_classes);

  std::vector<int> sizes{tc.num_features};
  for (int h : tc.hidden) sizes.push_back(h);
  sizes.push_back(tc.num_classes);
  Rng init_rng(tc.seed ^ 0x9e3779b97f4a7c15ULL);
  nn::MlpModel model = nn::MlpModel::random_init(sizes, init_rng);

  const std::vector<nn::EpochMetrics> metrics = nn::train(model, train_data, test_data, tc);
  const fs::path out = prepare_out_dir(opts.out_dir);
  nn::write_metrics_csv(metrics, (out / "metrics.csv").string());
  std::cout << "epochs=" << metrics.size()
            << " final_test_accuracy=" << format_double(metrics.back().test_acc) << "\n";
  return 0;
}

int cmd_bench(const CommonOpts& opts) {
  KeyValueConfig cfg;
  if (!opts.config_path.empty()) cfg = KeyValueConfig::parse_file(opts.config_path);
  if (!cfg.has("run.conv_window")) {
    // Benchmarks are exploration demos; run the full budget by default.
    cfg.set("run.conv_window", std::to_string(cfg.get_int("run.max_iters", 600)));
  }
  const fs::path out = prepare_out_dir(opts.out_dir);

  std::ofstream csv(out / "bench.csv", std::ios::binary);
  if (!csv) throw std::runtime_error("cannot write bench.csv");
  csv << "objective,dims,best_value,known_optimum,iterations,termination\n";

  std::cout << "objective            dims   best_value       known_optimum\n";
  for (const Objective& obj : benchmark_suite()) {
    const RunConfig rc = build_run_config(cfg, obj, opts, 600);
    const RunTrace trace = run_hmc_pso(obj.eval, rc);
    const std::string best = format_double(trace.final_best.value);
    const std::string known = obj.best_value ? format_double(*obj.best_value) : "-";
    csv << obj.name << ',' << obj.dims << ',' << best << ',' << known << ','
        << trace.records.size() << ','
        << (trace.reason == TerminationReason::converged ? "converged" : "max_iters") << '\n';
    std::cout << obj.name;
    for (std::size_t i = obj.name.size(); i < 21; ++i) std::cout << ' ';
    std::cout << obj.dims << "      " << best << "    " << known << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hmcpso: coupled swarm/Hamiltonian Monte Carlo optimizer"};
  app.require_subcommand(1);

  CommonOpts opt_optimize, opt_golomb, opt_train, opt_bench;
  int golomb_order = 0;

  auto* optimize = app.add_subcommand("optimize", "run the optimizer on a configured objective");
  add_common(optimize, opt_optimize);
  auto* golomb = app.add_subcommand("golomb", "search for a Golomb ruler of the given order");
  golomb->add_option("--order", golomb_order, "ruler order")->required();
  add_common(golomb, opt_golomb);
  auto* train = app.add_subcommand("train", "train a classifier with swarm-estimated gradients");
  add_common(train, opt_train);
  auto* bench = app.add_subcommand("bench", "run the benchmark suite");
  add_common(bench, opt_bench, /*config_required=*/false);

  try {
    app.parse(argc, argv);
    if (optimize->parsed()) return cmd_optimize(opt_optimize);
    if (golomb->parsed()) return cmd_golomb(golomb_order, opt_golomb);
    if (train->parsed()) return cmd_train(opt_train);
    if (bench->parsed()) return cmd_bench(opt_bench);
    return 2;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
