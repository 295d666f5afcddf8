#include "hmcpso/hmc.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hmcpso {

namespace {
// |dH| above this counts as a divergent trajectory.
constexpr double kDivergenceThreshold = 1000.0;
}  // namespace

void HmcConfig::validate() const {
  if (!(step_size > 0.0)) throw std::invalid_argument("HmcConfig: step_size must be > 0");
  if (num_steps < 0) throw std::invalid_argument("HmcConfig: num_steps must be >= 0");
  for (double m : mass_diag)
    if (!(m > 0.0)) throw std::invalid_argument("HmcConfig: mass entries must be > 0");
}

HmcParticle make_hmc_particle(Vec position) {
  HmcParticle h;
  h.last_momentum.assign(position.size(), 0.0);
  h.pbest_value = std::numeric_limits<double>::infinity();
  h.pbest_position = position;
  h.position = std::move(position);
  return h;
}

double kinetic_energy(std::span<const double> p, std::span<const double> mass_diag) {
  if (p.size() != mass_diag.size())
    throw std::invalid_argument("kinetic_energy: length mismatch");
  double k = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(mass_diag[i] > 0.0))
      throw std::invalid_argument("kinetic_energy: mass entries must be > 0");
    k += p[i] * p[i] / (2.0 * mass_diag[i]);
  }
  return k;
}

double hamiltonian(double potential, double kinetic) {
  if (std::isnan(potential) || std::isnan(kinetic))
    throw std::invalid_argument("hamiltonian: NaN input");
  return potential + kinetic;
}

LeapfrogResult leapfrog(std::span<const double> q0, std::span<const double> p0,
                        const GradientFn& grad_fn, const HmcConfig& cfg) {
  LeapfrogResult out;
  out.q.assign(q0.begin(), q0.end());
  out.p.assign(p0.begin(), p0.end());
  if (cfg.num_steps == 0) return out;

  const double eps = cfg.step_size;
  const std::size_t n = out.q.size();

  auto kick = [&](double scale) {
    Vec g = grad_fn(out.q);
    for (std::size_t i = 0; i < n; ++i) out.p[i] -= scale * g[i];
  };
  auto drift = [&] {
    for (std::size_t i = 0; i < n; ++i) out.q[i] += eps * out.p[i] / cfg.mass_diag[i];
  };

  kick(eps / 2.0);
  for (int step = 0; step < cfg.num_steps - 1; ++step) {
    drift();
    if (!all_finite(out.q)) {
      out.diverged = true;
      return out;
    }
    kick(eps);
  }
  drift();
  kick(eps / 2.0);
  if (!all_finite(out.q) || !all_finite(out.p)) out.diverged = true;
  return out;
}

bool metropolis_accept(double h_old, double h_new, Rng& rng) {
  if (!std::isfinite(h_new)) return false;
  // exp(h_old - h_new) >= 1 accepts unconditionally since uniform() < 1.
  return rng.uniform() < std::exp(h_old - h_new);
}

HmcMoveResult hmc_move_with_gradient(HmcParticle& h, const FitnessFn& fitness,
                                     const GradientFn& grad_fn, const HmcConfig& cfg, Rng& rng) {
  cfg.validate();
  const std::size_t n = h.position.size();
  if (cfg.mass_diag.size() != n)
    throw std::invalid_argument("hmc_move: mass_diag length mismatch");

  // Fresh fictitious momentum, componentwise N(0, m_i).
  Vec p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = std::sqrt(cfg.mass_diag[i]) * rng.normal();
  h.last_momentum = p;

  const double u_old = fitness(h.position);
  const double h_old = hamiltonian(u_old, kinetic_energy(p, cfg.mass_diag));

  LeapfrogResult traj = leapfrog(h.position, p, grad_fn, cfg);

  HmcMoveResult result;
  if (!traj.diverged) {
    const double u_new = fitness(traj.q);
    const double h_new = hamiltonian(u_new, kinetic_energy(traj.p, cfg.mass_diag));
    if (!std::isfinite(h_new) || std::abs(h_new - h_old) > kDivergenceThreshold) {
      result.diverged = true;
    } else if (!cfg.metropolis || metropolis_accept(h_old, h_new, rng)) {
      h.position = traj.q;
      result.accepted = true;
    }
  } else {
    result.diverged = true;
  }

  // Always re-evaluate at the retained position and refresh the personal best;
  // the caller propagates the value to the global best.
  result.final_fitness = fitness(h.position);
  if (std::isnan(result.final_fitness))
    throw std::invalid_argument("hmc_move: NaN fitness at final position");
  if (result.final_fitness < h.pbest_value) {
    h.pbest_value = result.final_fitness;
    h.pbest_position = h.position;
  }
  return result;
}

HmcMoveResult hmc_move(HmcParticle& h, const GlobalBest& gbest, const FitnessFn& fitness,
                       const SampledCoeffs& coeffs, const HmcConfig& cfg, Rng& rng) {
  if (!gbest.defined) throw std::logic_error("hmc_move: global best is undefined");
  h.last_coeffs = coeffs;
  // Coefficients and attractors are frozen for the duration of the move.
  Vec pbest = h.pbest_position;
  Vec gpos = gbest.position;
  const double eta = cfg.eta();
  GradientFn surrogate = [pbest = std::move(pbest), gpos = std::move(gpos), coeffs,
                          eta](std::span<const double> x) {
    return approx_gradient(x, pbest, gpos, coeffs, eta);
  };
  return hmc_move_with_gradient(h, fitness, surrogate, cfg, rng);
}

}  // namespace hmcpso
