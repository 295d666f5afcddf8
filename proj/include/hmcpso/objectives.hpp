#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hmcpso/vec_ops.hpp"

namespace hmcpso {

// A fitness function plus the metadata the engine and the CLI need: the
// suggested initialization box and, for benchmarks, the known optimum.
struct Objective {
  std::string name;
  int dims = 0;
  Vec init_lo;
  Vec init_hi;
  std::function<double(std::span<const double>)> eval;
  std::optional<double> best_value;
  Vec best_position;

  double evaluate(std::span<const double> x) const { return eval(x); }
};

// ---------------------------------------------------------------------------
// Golomb rulers
// ---------------------------------------------------------------------------

// Marks are kept as a sorted multiset; duplicates produced by decoding are
// preserved so the violation count can penalize them.
struct GolombRuler {
  std::vector<long long> marks;

  int order() const { return static_cast<int>(marks.size()); }
  long long length() const;
  bool valid() const;
};

// marks_i = floor(|p_i|)
GolombRuler decode_ruler(std::span<const double> position);

// Excess occurrences of pairwise distance d: max(0, #pairs at distance d - 1).
long long violation_score(const GolombRuler& g, long long d);

// Sum of excess occurrences over d = 1..length plus one count per duplicate
// mark. Zero iff the ruler is a valid Golomb ruler.
long long total_violation(const GolombRuler& g);

// L(G) = V(G) + 10^-k * length. Requires 10^-k * length < 1 for nonzero
// length, so a violation always outweighs any length difference.
double golomb_loss(const GolombRuler& g, int k);

// Shortest known length per order, where tabulated.
std::optional<long long> optimal_golomb_length(int order);

struct GolombDefaults {
  long long box_hi;  // marks initialized uniformly in [0, box_hi]
  int k;
  // The ruler landscape is piecewise constant, so the solver keeps the HMC
  // particle's proposals ungated by default: plateau diffusion does the
  // exploring while the best records ratchet.
  bool hmc_metropolis = false;
};

// Initialization box and length-penalty exponent per order. Through order 11
// the box sits on the optimal-length scale with the paper's k=3; beyond that
// the box grows to keep random marks collision-rare (validity first) with k
// scaled to match.
GolombDefaults golomb_defaults(int order);

// Total fitness over R^order: decode, then L(G). Positions whose decoded
// length breaks the 10^-k bound get V(G) + 1 + 10^-k*length, which dominates
// every in-bound loss at equal violation and still pulls back toward shorter
// rulers.
Objective make_golomb_objective(int order, int k, long long box_hi);
Objective make_golomb_objective(int order);  // uses golomb_defaults

// ---------------------------------------------------------------------------
// Gaussian mixtures
// ---------------------------------------------------------------------------

struct GaussianMode {
  Vec center;
  Vec var_diag;
  double weight = 1.0;
};

class GaussianMixture {
 public:
  // Validates shapes/positivity and normalizes weights to sum 1.
  explicit GaussianMixture(std::vector<GaussianMode> modes);

  double density(std::span<const double> x) const;
  int dims() const { return dims_; }
  const std::vector<GaussianMode>& modes() const { return modes_; }

 private:
  std::vector<GaussianMode> modes_;
  int dims_ = 0;
};

// Negative mixture density (minimization convention).
double gaussian_mixture_loss(std::span<const double> x, const GaussianMixture& gm);

// Plain-text landscape file, one mode per line:
//   <center components...> <variance> <weight>
// '#' starts a comment. All lines must agree on dimensionality.
GaussianMixture load_mixture(const std::string& path);

// side x side grid of modes in 2-d with the given spacing, unit variance and
// equal weights; center_weight, when set, overrides the middle mode's weight
// before normalization.
GaussianMixture make_grid_mixture(int side, double spacing,
                                  std::optional<double> center_weight = std::nullopt);

Objective make_mixture_objective(std::string name, GaussianMixture gm, double box_halfwidth);

// ---------------------------------------------------------------------------
// Continuous benchmarks
// ---------------------------------------------------------------------------

Objective make_sphere(int dims);
Objective make_rastrigin(int dims);
Objective make_ackley(int dims);
Objective make_multiwell_quartic();  // 1-d, two unequal wells

std::vector<Objective> benchmark_suite();

}  // namespace hmcpso
