#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hmcpso/hmc.hpp"
#include "hmcpso/swarm.hpp"

namespace hmcpso {

// Full configuration of one coupled run: N EM-PSO particles plus n_hmc (0 or
// 1) HMC particles sharing the global best.
struct RunConfig {
  int n_particles = 20;
  int n_hmc = 1;
  PsoParams pso;
  HmcConfig hmc;
  int max_iters = 500;
  int conv_window = 50;
  double conv_tol = 1e-8;
  std::uint64_t seed = 42;
  Vec init_lo;  // componentwise box bounds, sized pso.dims
  Vec init_hi;

  void validate() const;
};

enum class TerminationReason { converged, max_iters };

struct TraceRecord {
  int iter = 0;  // 1-based, matching the loop count
  double gbest_value = 0.0;
  Vec gbest_position;
  bool hmc_accepted = false;
  SampledCoeffs coeffs;  // the HMC particle's draw for this iteration
};

struct RunTrace {
  std::vector<TraceRecord> records;
  GlobalBest final_best;
  TerminationReason reason = TerminationReason::max_iters;
  int hmc_divergences = 0;
};

// Raised when the fitness function throws mid-run; carries whatever trace had
// been recorded up to that point.
class RunAborted : public std::runtime_error {
 public:
  RunAborted(const std::string& what, RunTrace partial)
      : std::runtime_error(what), partial_trace(std::move(partial)) {}
  RunTrace partial_trace;
};

// True once the window is full and the best value improved by at most tol
// over the last `window` records.
bool convergence_check(const RunTrace& trace, int window, double tol);

// Algorithm: evaluate all particles (HMC included) and fold into p_best /
// g_best, then move every swarm particle by one EM-PSO step, then move the
// HMC particle along a leapfrog trajectory under the swarm-derived gradient.
// Deterministic for a fixed (fitness, cfg, seed).
RunTrace run_hmc_pso(const FitnessFn& fitness, const RunConfig& cfg);

// Same loop with caller-provided initial positions (n_particles + n_hmc rows);
// the trainer seeds particles from batch labels this way.
RunTrace run_hmc_pso(const FitnessFn& fitness, const RunConfig& cfg,
                     const std::vector<Vec>& initial_positions);

// Trace CSV: header `iter,gbest_value,hmc_accepted,c1r1,c2r2`, one row per
// iteration. The sidecar holds the g_best position per iteration, one
// comma-separated row each, written alongside as <stem>_positions.csv.
void write_trace_csv(const RunTrace& trace, const std::string& trace_path,
                     const std::string& positions_path);

std::string format_double(double v);  // shortest round-trip decimal text

}  // namespace hmcpso
