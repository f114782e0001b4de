#pragma once

// Free central limit experiments in cumulant space.

#include <cstddef>
#include <optional>
#include <ostream>
#include <vector>

#include "freestein/states.hpp"
#include "freestein/stein.hpp"

namespace freestein {

/// Cumulants of k^{-1/2}(X^(1) + ... + X^(k)) for free copies X^(i): kappa(w) * k^{1 - |w|/2}.
CumulantSpec rescale_cumulants(const CumulantSpec& base, std::size_t k);

struct CltExperiment {
  CumulantSpec base;              // centered with identity covariance
  std::vector<std::size_t> ks{1, 2, 4, 8, 16, 32, 64};
  std::size_t degree = 3;

  /// Throws kInadmissible unless kappa(i) = 0 and kappa(i, j) = delta_ij within 1e-9.
  void validate() const;
};

struct CltRow {
  std::size_t k = 0;
  double m4_yk = 0.0;
  double c_lower = 0.0;               // Poincare lower bound for Y^k at the experiment degree
  double sigma_lower_sq = 0.0;
  double sigma_lower = 0.0;
  double constant_m4 = 0.0;           // sqrt(n (n + n m4(X) - 1) / 2)
  std::optional<double> constant_copt;  // sqrt(n (C_upper - 1)) from a certified bound on C_opt(X)
  double theorem_constant = 0.0;      // min of the available branches
  double bound_over_sqrt_k = 0.0;     // theorem_constant / sqrt(k)
  double ratio = 0.0;                 // sigma_lower / bound_over_sqrt_k
  bool within_m4_bound = false;       // sigma_lower <= constant_m4 / sqrt(k) + 1e-6
};

std::vector<CltRow> clt_rate_table(const CltExperiment& exp, const Tolerances& tol = {});

/// Header plus one row per k: k,m4_Yk,sigma_d_lower,theorem_constant,bound_over_sqrt_k,ratio.
void write_clt_csv(std::ostream& out, const std::vector<CltRow>& rows);

}  // namespace freestein
