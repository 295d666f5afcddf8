#pragma once

#include <functional>
#include <span>
#include <vector>

#include "hmcpso/rng.hpp"
#include "hmcpso/swarm.hpp"
#include "hmcpso/vec_ops.hpp"

namespace hmcpso {

// Leapfrog/HMC settings. eta() is always recomputed from step_size * num_steps
// so it cannot drift from the two fields it derives from. num_steps = 0 is
// allowed and degenerates a move to a momentum resample.
//
// Default path length eta = 2.5: under the swarm surrogate the particle rides
// a harmonic force with frequency sqrt((c1r1+c2r2)/eta), so a trajectory
// sweeps phase sqrt(eta*(c1r1+c2r2)) — between a quarter and half orbit for
// typical coefficient draws. Longer defaults put average draws near a full
// orbit, where proposals return to their start.
struct HmcConfig {
  double step_size = 0.25;
  int num_steps = 10;
  Vec mass_diag;  // diagonal of the mass matrix; broadcast to dims at run start
  bool metropolis = true;

  double eta() const { return step_size * num_steps; }
  void validate() const;
};

struct HmcParticle {
  Vec position;
  Vec last_momentum;  // diagnostic only; resampled at every move
  double pbest_value;
  Vec pbest_position;
  SampledCoeffs last_coeffs;
};

HmcParticle make_hmc_particle(Vec position);

using GradientFn = std::function<Vec(std::span<const double>)>;
using FitnessFn = std::function<double(std::span<const double>)>;

// K(p) = sum_i p_i^2 / (2 m_i)
double kinetic_energy(std::span<const double> p, std::span<const double> mass_diag);

// H = U + K; rejects NaN inputs.
double hamiltonian(double potential, double kinetic);

struct LeapfrogResult {
  Vec q;
  Vec p;
  bool diverged = false;  // non-finite state encountered along the trajectory
};

// Standard leapfrog: half momentum step, alternating full position/momentum
// steps, trailing half momentum step. Deterministic given its inputs; a
// non-finite state is reported through `diverged` rather than thrown.
LeapfrogResult leapfrog(std::span<const double> q0, std::span<const double> p0,
                        const GradientFn& grad_fn, const HmcConfig& cfg);

// Accept with probability min(1, exp(H_old - H_new)). Non-finite H_new is an
// automatic reject and consumes no draw.
bool metropolis_accept(double h_old, double h_new, Rng& rng);

struct HmcMoveResult {
  bool accepted = false;
  bool diverged = false;
  double final_fitness = 0.0;  // fitness at the retained position
};

// One HMC move with an explicit gradient: sample momentum ~ N(0, M), integrate,
// Metropolis-accept with U := fitness, then refresh the particle's personal
// best at the final position. The caller folds the returned fitness into the
// shared global best.
HmcMoveResult hmc_move_with_gradient(HmcParticle& h, const FitnessFn& fitness,
                                     const GradientFn& grad_fn, const HmcConfig& cfg, Rng& rng);

// The coupled move: gradient surrogate built from the swarm's attractors,
// frozen for the whole trajectory so the integrator stays reversible.
HmcMoveResult hmc_move(HmcParticle& h, const GlobalBest& gbest, const FitnessFn& fitness,
                       const SampledCoeffs& coeffs, const HmcConfig& cfg, Rng& rng);

}  // namespace hmcpso
