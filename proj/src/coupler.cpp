#include "hmcpso/coupler.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace hmcpso {

void RunConfig::validate() const {
  pso.validate();
  hmc.validate();
  if (n_particles < 1) throw std::invalid_argument("RunConfig: n_particles must be >= 1");
  if (n_hmc != 0 && n_hmc != 1) throw std::invalid_argument("RunConfig: n_hmc must be 0 or 1");
  if (max_iters < 1) throw std::invalid_argument("RunConfig: max_iters must be >= 1");
  if (conv_window < 1 || conv_window > max_iters)
    throw std::invalid_argument("RunConfig: conv_window must be in [1, max_iters]");
  if (conv_tol < 0.0) throw std::invalid_argument("RunConfig: conv_tol must be >= 0");
  const std::size_t d = static_cast<std::size_t>(pso.dims);
  if (init_lo.size() != d || init_hi.size() != d)
    throw std::invalid_argument("RunConfig: init bounds must have pso.dims entries");
  for (std::size_t i = 0; i < d; ++i)
    if (!(init_lo[i] < init_hi[i]))
      throw std::invalid_argument("RunConfig: init_lo must be < init_hi componentwise");
}

bool convergence_check(const RunTrace& trace, int window, double tol) {
  if (trace.records.empty()) throw std::invalid_argument("convergence_check: empty trace");
  const int t = static_cast<int>(trace.records.size()) - 1;
  if (t + 1 < window) return false;
  const int back = std::max(0, t - window);
  return trace.records[back].gbest_value - trace.records[t].gbest_value <= tol;
}

namespace {

std::vector<Vec> draw_initial_positions(const RunConfig& cfg, Rng& rng) {
  std::vector<Vec> positions;
  const int total = cfg.n_particles + cfg.n_hmc;
  positions.reserve(total);
  for (int i = 0; i < total; ++i) {
    Vec x(cfg.pso.dims);
    for (int d = 0; d < cfg.pso.dims; ++d) x[d] = rng.uniform(cfg.init_lo[d], cfg.init_hi[d]);
    positions.push_back(std::move(x));
  }
  return positions;
}

RunTrace run_loop(const FitnessFn& fitness, const RunConfig& cfg,
                  const std::vector<Vec>& initial_positions, Rng& rng) {
  HmcConfig hmc_cfg = cfg.hmc;
  if (hmc_cfg.mass_diag.empty()) hmc_cfg.mass_diag.assign(cfg.pso.dims, 1.0);
  if (static_cast<int>(hmc_cfg.mass_diag.size()) != cfg.pso.dims)
    throw std::invalid_argument("RunConfig: mass_diag must be scalar-broadcast or dims-sized");

  std::vector<ParticleState> swarm;
  swarm.reserve(cfg.n_particles);
  for (int i = 0; i < cfg.n_particles; ++i) swarm.push_back(make_particle(initial_positions[i]));
  HmcParticle hmc_particle;
  if (cfg.n_hmc == 1) hmc_particle = make_hmc_particle(initial_positions[cfg.n_particles]);

  GlobalBest gbest = GlobalBest::undefined_best();
  RunTrace trace;
  trace.reason = TerminationReason::max_iters;

  try {
    for (int iter = 1; iter <= cfg.max_iters; ++iter) {
      // Fitness loop over the whole swarm, HMC particle included.
      for (auto& p : swarm) update_best(p, gbest, fitness(p.position));
      if (cfg.n_hmc == 1) {
        const double f = fitness(hmc_particle.position);
        update_best_fields(f, hmc_particle.position, hmc_particle.pbest_value,
                           hmc_particle.pbest_position, gbest);
      }

      // Move loop: one coefficient pair per particle, drawn in index order
      // from the single run stream.
      TraceRecord rec;
      for (auto& p : swarm) {
        p.last_coeffs = sample_coeffs(cfg.pso, rng);
        empso_step(p, gbest, cfg.pso, p.last_coeffs);
      }
      if (cfg.n_hmc == 1) {
        const SampledCoeffs coeffs = sample_coeffs(cfg.pso, rng);
        const HmcMoveResult move = hmc_move(hmc_particle, gbest, fitness, coeffs, hmc_cfg, rng);
        if (move.diverged) ++trace.hmc_divergences;
        rec.hmc_accepted = move.accepted;
        rec.coeffs = coeffs;
        // The move already refreshed the particle's personal best; fold it
        // into the shared record.
        if (hmc_particle.pbest_value < gbest.value) {
          gbest.value = hmc_particle.pbest_value;
          gbest.position = hmc_particle.pbest_position;
          gbest.defined = true;
        }
      }

      rec.iter = iter;
      rec.gbest_value = gbest.value;
      rec.gbest_position = gbest.position;
      trace.records.push_back(std::move(rec));

      if (convergence_check(trace, cfg.conv_window, cfg.conv_tol)) {
        trace.reason = TerminationReason::converged;
        break;
      }
    }
  } catch (const RunAborted&) {
    throw;
  } catch (const std::exception& e) {
    trace.final_best = gbest;
    throw RunAborted(std::string("fitness evaluation failed: ") + e.what(), std::move(trace));
  }

  trace.final_best = gbest;
  return trace;
}

}  // namespace

RunTrace run_hmc_pso(const FitnessFn& fitness, const RunConfig& cfg) {
  cfg.validate();
  // Initial positions come off the same stream the loop continues from.
  Rng rng(cfg.seed);
  const std::vector<Vec> positions = draw_initial_positions(cfg, rng);
  return run_loop(fitness, cfg, positions, rng);
}

RunTrace run_hmc_pso(const FitnessFn& fitness, const RunConfig& cfg,
                     const std::vector<Vec>& initial_positions) {
  cfg.validate();
  if (static_cast<int>(initial_positions.size()) != cfg.n_particles + cfg.n_hmc)
    throw std::invalid_argument("run_hmc_pso: need n_particles + n_hmc initial positions");
  for (const auto& x : initial_positions)
    if (static_cast<int>(x.size()) != cfg.pso.dims)
      throw std::invalid_argument("run_hmc_pso: initial position dimension mismatch");
  Rng rng(cfg.seed);
  return run_loop(fitness, cfg, initial_positions, rng);
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, ptr);
}

void write_trace_csv(const RunTrace& trace, const std::string& trace_path,
                     const std::string& positions_path) {
  std::ofstream out(trace_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write trace file: " + trace_path);
  out << "iter,gbest_value,hmc_accepted,c1r1,c2r2\n";
  for (const auto& r : trace.records) {
    out << r.iter << ',' << format_double(r.gbest_value) << ',' << (r.hmc_accepted ? 1 : 0) << ','
        << format_double(r.coeffs.c1r1) << ',' << format_double(r.coeffs.c2r2) << '\n';
  }

  std::ofstream pos(positions_path, std::ios::binary);
  if (!pos) throw std::runtime_error("cannot write positions file: " + positions_path);
  for (const auto& r : trace.records) {
    for (std::size_t d = 0; d < r.gbest_position.size(); ++d) {
      if (d) pos << ',';
      pos << format_double(r.gbest_position[d]);
    }
    pos << '\n';
  }
}

}  // namespace hmcpso
