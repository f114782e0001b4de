#pragma once

// Free Stein kernels: the explicit kernel, its exact distance to the identity, and the
// minimal-norm kernel on finite-degree truncations of the Jacobian span.

#include <complex>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "freestein/ncalg.hpp"
#include "freestein/states.hpp"

namespace freestein {

/// Numerical tolerances shared by the stein and poincare modules.
struct Tolerances {
  double identity = 1e-10;       // Stein identity residuals
  double psd = 1e-8;             // negative-eigenvalue slack, relative to the largest magnitude
  double pinv = 1e-10;           // pseudo-inverse cutoff, relative to the largest eigenvalue
  double admissibility = 1e-9;   // |phi(D_i V)| allowed for an admissible problem
};

/// A state, a potential V, and the centering of its cyclic gradient.
class SteinProblem {
 public:
  SteinProblem(std::shared_ptr<const MomentFunctional> phi, NcPoly potential);

  const MomentFunctional& state() const { return *phi_; }
  std::shared_ptr<const MomentFunctional> state_ptr() const { return phi_; }
  const NcPoly& potential() const { return potential_; }
  std::size_t nvars() const { return potential_.nvars(); }
  const PolyTuple& gradient() const { return gradient_; }
  /// phi(D_i V(X)) per coordinate.
  const std::vector<Complex>& centering() const { return centering_; }
  /// max_i |phi(D_i V(X))|.
  double centering_defect() const;
  bool admissible(double tol = 1e-9) const { return centering_defect() <= tol; }
  /// Throws kInadmissible on a centering defect.
  void require_admissible(double tol = 1e-9) const;
  bool quadratic() const { return potential_ == NcPoly::quadratic_potential(nvars()); }

 private:
  std::shared_ptr<const MomentFunctional> phi_;
  NcPoly potential_;
  PolyTuple gradient_;
  std::vector<Complex> centering_;
};

/// Monomial tuples e_{w,i}: word w (|w| <= degree) in slot i, ordered by slot then graded-lex word.
class TruncationBasis {
 public:
  TruncationBasis(std::size_t nvars, std::size_t degree);

  std::size_t nvars() const { return nvars_; }
  std::size_t degree() const { return degree_; }
  std::size_t size() const { return nvars_ * words_.size(); }
  const std::vector<Word>& words() const { return words_; }
  std::size_t slot(std::size_t k) const { return k / words_.size(); }
  const Word& word(std::size_t k) const { return words_[k % words_.size()]; }
  PolyTuple element(std::size_t k) const;

 private:
  std::size_t nvars_;
  std::size_t degree_;
  std::vector<Word> words_;
};

/// H(a, b) = sum_j <d_j w_a (X), d_j w_b (X)>: the Dirichlet form on single monomials.
Eigen::MatrixXcd dirichlet_form(const MomentFunctional& phi, const std::vector<Word>& words);

/// <D V(X) - phi(D V(X)), P(X)>_phi - <A, J P(X)>.
Complex stein_residual(const SteinProblem& prob, const KernelMatrix& a, const PolyTuple& p);

struct ExplicitDistance {
  double distance_sq = 0.0;                   // ||A(X) - I||^2 by the generic pairing
  std::optional<double> distance_sq_closed;   // quadratic V: fourth-moment expansion
  std::optional<double> m4;                   // max_i phi(x_i^4), quadratic V only
  std::optional<double> bound;                // (n^2 + n^2 m4) / 2
  std::optional<double> bound_reduced;        // (n^2 + n^2 m4 - n) / 2
};

/// ||A - (1 (x) 1) I_n||^2 for A = explicit_kernel(V). For the quadratic potential it is also
/// computed from the expansion
///   ||A||^2 = 1/4 sum_ij [2 phi(x_i x_j^2 x_i) + 2 phi(x_i x_j)^2 + 2 phi(x_j x_i)^2 + 2 phi(x_i^2) phi(x_j^2)]
/// (centered X), and both routes are returned. Throws kInadmissible for a non-centered state
/// with the quadratic potential.
///
/// A is a Stein kernel only for tracial phi: in general
///   <A, J P> = <D V - phi(D V), P> - 1/2 sum_i [phi(D_i V P_i^*) - phi(P_i^* D_i V)].
ExplicitDistance explicit_kernel_distance_sq(const SteinProblem& prob);

struct MinimalKernelResult {
  std::size_t degree = 0;
  std::vector<Complex> coefficients;  // over TruncationBasis
  std::size_t gram_rank = 0;
  std::size_t null_dim = 0;
  double min_gram_eigenvalue = 0.0;
  double sigma_lower_sq = 0.0;        // ||projection of A0 - I onto the degree-d Jacobian span||^2
  KernelMatrix kernel;                // I + sum_k c_k J e_k
};

/// Projects K - I onto span{J e_k(X)} by pseudo-inverse least squares, where K is any Stein kernel
/// (the projection does not depend on which). I + projection is a Stein kernel on the degree-d test
/// span and sigma_lower_sq <= Sigma*(X|V)^2.
MinimalKernelResult minimal_kernel(const SteinProblem& prob, std::size_t degree, const Tolerances& tol = {});

struct BoundReport {
  std::size_t degree = 0;
  double sigma_lower_sq = 0.0;
  std::optional<double> upper_explicit_sq;   // explicit-kernel distance; tracial states only
  double upper_poincare_sq = 0.0;
  std::optional<double> upper_isotropic_sq;  // n (C - 1), quadratic V with centered identity covariance
  double poincare_constant = 0.0;
  std::size_t gram_rank = 0;
  std::size_t null_dim = 0;
  double centering_defect = 0.0;
  std::vector<std::string> violations;       // lower bound above some upper bound
  bool consistent() const { return violations.empty(); }
};

/// Lower bound Sigma_d^2 against the explicit-kernel distance and the Poincare-constant bound
/// n + C ||D V(X)||^2 - 2 Re <D V(X), X>.
BoundReport discrepancy_bounds(const SteinProblem& prob, std::size_t degree, double poincare_constant,
                               const Tolerances& tol = {});

}  // namespace freestein
