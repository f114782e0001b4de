#pragma once

// Free Poincare constant: lower bounds from truncated polynomial spaces, Voiculescu's upper
// bounds from operator norms, and the semicircular-gap inequality check.

#include <cstddef>
#include <optional>
#include <vector>

#include "freestein/states.hpp"
#include "freestein/stein.hpp"

namespace freestein {

struct PoincareEstimate {
  std::size_t degree = 0;
  double c_lower = 0.0;       // largest generalized Rayleigh quotient over degree <= d
  std::size_t basis_size = 0;
  std::size_t null_dim = 0;   // Dirichlet-form null space dimension
  std::size_t infinite_ratio_witnesses = 0;  // null vectors with positive variance
  double min_variance_eigenvalue = 0.0;
  double min_dirichlet_eigenvalue = 0.0;
};

/// Largest eigenvalue of the pencil (S, E) on nonconstant monomials of degree <= d, with
/// S(u, v) = phi((u - phi u)(v - phi v)^*) and E the Dirichlet form, restricted to the
/// complement of E's null space.
PoincareEstimate poincare_lower_bound(const MomentFunctional& phi, std::size_t degree, const Tolerances& tol = {});

struct VoiculescuBound {
  double norm = 0.0;
  double tracial_bound = 0.0;   // 2 n ||X||^2
  double general_bound = 0.0;   // 4 n ||X||^2
  bool tracial = false;
  double applicable() const { return tracial ? tracial_bound : general_bound; }
};

/// Bounds from a given norm ||X|| = max_i ||x_i||.
VoiculescuBound voiculescu_bound(std::size_t nvars, double norm, bool tracial);

struct VoiculescuReport {
  std::vector<NormEstimate> norms;
  VoiculescuBound from_lower;                 // an estimate, not a certified bound
  std::optional<VoiculescuBound> from_upper;  // certified when the backend supplies norm upper bounds
};

/// Norm estimates from phi(x_i^order)^(1/order) and backend upper estimates.
VoiculescuReport voiculescu_bound(const MomentFunctional& phi, std::size_t norm_order);

struct BianeGapReport {
  std::size_t degree = 0;
  double c_lower = 0.0;
  double sigma_lower_sq = 0.0;
  double required = 0.0;                  // 1 + sigma_lower_sq / n, a lower bound on C_opt
  std::optional<double> c_upper;          // certified Voiculescu bound, when available
  std::optional<double> margin;           // c_upper - required
  bool contradiction = false;             // c_upper < required - 1e-6
};

/// Requires X centered with sum_i phi(x_i^2) = n (within 1e-8); throws kInadmissible otherwise.
BianeGapReport biane_gap_check(std::shared_ptr<const MomentFunctional> phi, std::size_t degree,
                               std::size_t norm_order = 0, const Tolerances& tol = {});

}  // namespace freestein
