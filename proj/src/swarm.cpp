#include "hmcpso/swarm.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hmcpso {

void PsoParams::validate() const {
  if (!(c1 > 0.0) || !(c2 > 0.0))
    throw std::invalid_argument("PsoParams: c1 and c2 must be > 0");
  if (!(inertia_w >= 0.0 && inertia_w <= 1.0))
    throw std::invalid_argument("PsoParams: inertia_w must be in [0, 1]");
  if (!(beta >= 0.0 && beta < 1.0))
    throw std::invalid_argument("PsoParams: beta must be in [0, 1)");
  if (dims < 1) throw std::invalid_argument("PsoParams: dims must be >= 1");
}

GlobalBest GlobalBest::undefined_best() {
  GlobalBest g;
  g.value = std::numeric_limits<double>::infinity();
  g.defined = false;
  return g;
}

SampledCoeffs sample_coeffs(const PsoParams& params, Rng& rng) {
  return SampledCoeffs{params.c1 * rng.uniform(), params.c2 * rng.uniform()};
}

ParticleState make_particle(Vec position) {
  ParticleState p;
  p.velocity.assign(position.size(), 0.0);
  p.em_momentum.assign(position.size(), 0.0);
  p.pbest_value = std::numeric_limits<double>::infinity();
  p.pbest_position = position;
  p.position = std::move(position);
  return p;
}

void empso_step(ParticleState& p, const GlobalBest& gbest, const PsoParams& params,
                const SampledCoeffs& coeffs) {
  if (!gbest.defined) throw std::logic_error("empso_step: global best is undefined");
  const std::size_t n = p.position.size();
  for (std::size_t i = 0; i < n; ++i) {
    p.em_momentum[i] = params.beta * p.em_momentum[i] + (1.0 - params.beta) * p.velocity[i];
    p.velocity[i] = params.inertia_w * p.em_momentum[i] +
                    coeffs.c1r1 * (p.pbest_position[i] - p.position[i]) +
                    coeffs.c2r2 * (gbest.position[i] - p.position[i]);
    p.position[i] += p.velocity[i];
  }
}

void update_best_fields(double f, std::span<const double> position, double& pbest_value,
                        Vec& pbest_position, GlobalBest& gbest) {
  if (std::isnan(f)) throw std::invalid_argument("update_best: NaN fitness");
  if (f < pbest_value) {
    pbest_value = f;
    pbest_position.assign(position.begin(), position.end());
    if (f < gbest.value) {
      gbest.value = f;
      gbest.position.assign(position.begin(), position.end());
      gbest.defined = true;
    }
  }
}

void update_best(ParticleState& p, GlobalBest& gbest, double fitness_value) {
  update_best_fields(fitness_value, p.position, p.pbest_value, p.pbest_position, gbest);
}

Vec approx_gradient(std::span<const double> x, std::span<const double> pbest,
                    std::span<const double> gbest, const SampledCoeffs& coeffs, double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("approx_gradient: eta must be > 0");
  Vec grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    grad[i] = -(coeffs.c1r1 * (pbest[i] - x[i]) + coeffs.c2r2 * (gbest[i] - x[i])) / eta;
  }
  return grad;
}

}  // namespace hmcpso
