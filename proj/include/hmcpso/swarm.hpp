#pragma once

#include <span>
#include <vector>

#include "hmcpso/rng.hpp"
#include "hmcpso/vec_ops.hpp"

namespace hmcpso {

// EM-PSO swarm parameters. c1/c2 are the cognitive/social coefficients,
// inertia_w retains velocity, beta is the exponential-momentum decay.
struct PsoParams {
  double c1 = 2.0;
  double c2 = 2.0;
  double inertia_w = 0.7;
  double beta = 0.9;
  int dims = 1;

  void validate() const;
};

// One per-particle, per-iteration draw of the stochastic attraction weights:
// c1r1 = c1*u1, c2r2 = c2*u2 with u1, u2 uniform on [0,1]. Scalars shared
// across dimensions; the last pair drawn also feeds the trainer's output
// gradient estimate.
struct SampledCoeffs {
  double c1r1 = 0.0;
  double c2r2 = 0.0;
};

struct ParticleState {
  Vec position;
  Vec velocity;
  Vec em_momentum;
  double pbest_value;
  Vec pbest_position;
  SampledCoeffs last_coeffs;
};

// Best fitness/position seen by any particle. `defined` stays false until the
// first successful update; value is non-increasing from then on.
struct GlobalBest {
  double value;
  Vec position;
  bool defined = false;

  static GlobalBest undefined_best();
};

SampledCoeffs sample_coeffs(const PsoParams& params, Rng& rng);

// Creates a particle at `position` with zero velocity/momentum and an
// untouched personal best (+inf), so the first evaluation always records it.
ParticleState make_particle(Vec position);

// One EM-PSO update:
//   em'  = beta*em + (1-beta)*v
//   v'   = w*em' + c1r1*(pbest - x) + c2r2*(gbest - x)
//   x'   = x + v'
// Personal best fields are left untouched; update_best handles those.
void empso_step(ParticleState& p, const GlobalBest& gbest, const PsoParams& params,
                const SampledCoeffs& coeffs);

// Algorithm-style best bookkeeping with strict inequalities: the personal
// best improves first, and only then may the global best improve.
void update_best(ParticleState& p, GlobalBest& gbest, double fitness_value);

// Same nesting for any (pbest_value, pbest_position) pair; shared with the
// HMC particle.
void update_best_fields(double f, std::span<const double> position, double& pbest_value,
                        Vec& pbest_position, GlobalBest& gbest);

// The EM-PSO gradient surrogate:
//   grad(x) = -(c1r1*(pbest - x) + c2r2*(gbest - x)) / eta
Vec approx_gradient(std::span<const double> x, std::span<const double> pbest,
                    std::span<const double> gbest, const SampledCoeffs& coeffs, double eta);

}  // namespace hmcpso
