#include "freestein/stein.hpp"

#include <algorithm>
#include <cmath>

#include "freestein/errors.hpp"

namespace freestein {
namespace {

Word power(std::size_t letter, std::size_t count) { return Word(std::vector<Letter>(count, static_cast<Letter>(letter))); }

}  // namespace

// ---------------------------------------------------------------------------
// SteinProblem

SteinProblem::SteinProblem(std::shared_ptr<const MomentFunctional> phi, NcPoly potential)
    : phi_(std::move(phi)), potential_(std::move(potential)), gradient_(cyclic_gradient(potential_)) {
  if (!phi_) throw Error(ErrorCode::kOther, "missing state", "state");
  if (phi_->nvars() != potential_.nvars()) {
    throw Error(ErrorCode::kOther, "potential and state disagree on nvars", "potential");
  }
  phi_->require_order(gradient_.degree(), "centering of the cyclic gradient");
  for (std::size_t i = 0; i < nvars(); ++i) centering_.push_back(moment_of_poly(*phi_, gradient_[i]));
}

double SteinProblem::centering_defect() const {
  double d = 0.0;
  for (const Complex& c : centering_) d = std::max(d, std::abs(c));
  return d;
}

void SteinProblem::require_admissible(double tol) const {
  if (!admissible(tol)) {
    throw Error(ErrorCode::kInadmissible,
                "centering defect: max |phi(D_i V(X))| = " + std::to_string(centering_defect()) +
                    " exceeds " + std::to_string(tol) + "; no Stein kernel exists",
                "potential");
  }
}

// ---------------------------------------------------------------------------
// TruncationBasis

TruncationBasis::TruncationBasis(std::size_t nvars, std::size_t degree)
    : nvars_(nvars), degree_(degree), words_(words_up_to(nvars, degree)) {}

PolyTuple TruncationBasis::element(std::size_t k) const {
  PolyTuple out = PolyTuple::zero(nvars_);
  out[slot(k)] = NcPoly(nvars_, word(k));
  return out;
}

// ---------------------------------------------------------------------------
// Forms

Eigen::MatrixXcd dirichlet_form(const MomentFunctional& phi, const std::vector<Word>& words) {
  std::size_t longest = 0;
  for (const Word& w : words) longest = std::max(longest, w.size());
  if (longest > 0) phi.require_order(2 * (longest - 1), "Dirichlet form");
  const std::size_t size = words.size();
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(size, size);
  for (std::size_t a = 0; a < size; ++a) {
    const Word& u = words[a];
    for (std::size_t b = a; b < size; ++b) {
      const Word& v = words[b];
      Complex acc{};
      for (std::size_t p = 0; p < u.size(); ++p) {
        for (std::size_t q = 0; q < v.size(); ++q) {
          if (u[p] != v[q]) continue;
          acc += phi.moment(u.slice(0, p) * v.slice(0, q).reversed()) *
                 phi.moment(v.slice(q + 1, v.size()).reversed() * u.slice(p + 1, u.size()));
        }
      }
      h(a, b) = acc;
      h(b, a) = std::conj(acc);
    }
  }
  return h;
}

// ---------------------------------------------------------------------------
// Stein identity

Complex stein_residual(const SteinProblem& prob, const KernelMatrix& a, const PolyTuple& p) {
  const MomentFunctional& phi = prob.state();
  const PolyTuple& grad = prob.gradient();
  Complex lhs{};
  for (std::size_t i = 0; i < prob.nvars(); ++i) {
    phi.require_order(grad[i].degree() + p[i].degree(), "stein_residual");
    for (const auto& [wg, cg] : grad[i].terms()) {
      for (const auto& [wp, cp] : p[i].terms()) {
        lhs += cg.to_complex() * std::conj(cp.to_complex()) * phi.moment(wg * wp.reversed());
      }
    }
    lhs -= prob.centering()[i] * std::conj(moment_of_poly(phi, p[i]));
  }
  return lhs - inner_matrix(phi, a, jacobian(p));
}

// ---------------------------------------------------------------------------
// Explicit kernel distance

ExplicitDistance explicit_kernel_distance_sq(const SteinProblem& prob) {
  const MomentFunctional& phi = prob.state();
  const std::size_t n = prob.nvars();
  ExplicitDistance out;
  const KernelMatrix diff = explicit_kernel(prob.potential()) - KernelMatrix::identity(n);
  out.distance_sq = inner_matrix(phi, diff, diff).real();
  if (!prob.quadratic()) return out;

  phi.require_order(4, "quadratic explicit-kernel distance");
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(phi.moment(Word::letter(i))) > 1e-9) {
      throw Error(ErrorCode::kInadmissible, "non-centered state: the quadratic fast path needs phi(x_i) = 0", "state");
    }
  }
  auto mom = [&](std::initializer_list<std::size_t> letters) {
    std::vector<Letter> w;
    for (auto l : letters) w.push_back(static_cast<Letter>(l));
    return phi.moment(Word(std::move(w)));
  };
  Complex norm_a{};
  Complex second_moments{};
  double m4 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    second_moments += mom({i, i});
    m4 = std::max(m4, phi.moment(power(i, 4)).real());
    for (std::size_t j = 0; j < n; ++j) {
      const Complex xij = mom({i, j});
      const Complex xji = mom({j, i});
      norm_a += 2.0 * mom({i, j, j, i}) + 2.0 * xij * xij + 2.0 * xji * xji + 2.0 * mom({i, i}) * mom({j, j});
    }
  }
  norm_a *= 0.25;
  const double nn = static_cast<double>(n);
  out.distance_sq_closed = norm_a.real() - 2.0 * second_moments.real() + nn;
  out.m4 = m4;
  out.bound = (nn * nn + nn * nn * m4) / 2.0;
  out.bound_reduced = (nn * nn + nn * nn * m4 - nn) / 2.0;
  return out;
}

// ---------------------------------------------------------------------------
// Minimal kernel

MinimalKernelResult minimal_kernel(const SteinProblem& prob, std::size_t degree, const Tolerances& tol) {
  prob.require_admissible(tol.admissibility);
  const MomentFunctional& phi = prob.state();
  const std::size_t n = prob.nvars();
  const TruncationBasis basis(n, degree);
  const std::size_t words = basis.words().size();

  const PolyTuple& grad = prob.gradient();
  if (degree > 0) {
    std::size_t grad_degree = 0;
    for (std::size_t i = 0; i < n; ++i) grad_degree = std::max(grad_degree, grad[i].degree());
    phi.require_order(std::max(2 * (degree - 1), grad_degree + degree), "minimal_kernel");
  }

  // Normal equations M c = r with M(p, q) = <J e_q, J e_p> and r_p = <K - I, J e_p> for any Stein
  // kernel K, i.e. r_p = <D V - phi(D V), e_p> - <I, J e_p>.
  // M is block diagonal over slots with every block equal to conj(H).
  const Eigen::MatrixXcd block = dirichlet_form(phi, basis.words()).conjugate();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(block);
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const double scale = lambda.cwiseAbs().maxCoeff();
  MinimalKernelResult out{degree, {}, 0, 0, lambda.minCoeff(), 0.0, KernelMatrix::identity(n)};
  if (out.min_gram_eigenvalue < -tol.psd * scale) {
    throw Error(ErrorCode::kInvalidState,
                "Jacobian Gram matrix is not positive semidefinite (eigenvalue " +
                    std::to_string(out.min_gram_eigenvalue) + "); the moments do not come from a state",
                "state");
  }
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(words);
  std::size_t rank = 0;
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    if (lambda(k) > tol.pinv * scale && lambda(k) > 0.0) {
      inv(k) = 1.0 / lambda(k);
      ++rank;
    }
  }
  out.gram_rank = rank * n;
  out.null_dim = basis.size() - out.gram_rank;

  std::vector<std::vector<TensorPoly>> partials(words);
  for (std::size_t w = 0; w < words; ++w) {
    for (std::size_t j = 0; j < n; ++j) partials[w].push_back(partial(j, NcPoly(n, basis.words()[w])));
  }

  out.coefficients.assign(basis.size(), Complex{});
  double sigma = 0.0;
  for (std::size_t slot = 0; slot < n; ++slot) {
    Eigen::VectorXcd r(words);
    for (std::size_t w = 0; w < words; ++w) {
      const Word back = basis.words()[w].reversed();
      Complex acc = -prob.centering()[slot] * phi.moment(back);
      for (const auto& [wg, cg] : grad[slot].terms()) acc += cg.to_complex() * phi.moment(wg * back);
      acc -= tensor_inner(phi, TensorPoly::unit(n), partials[w][slot]);
      r(static_cast<Eigen::Index>(w)) = acc;
    }
    const Eigen::VectorXcd c = eig.eigenvectors() * (inv.asDiagonal() * (eig.eigenvectors().adjoint() * r));
    sigma += r.dot(c).real();  // r^H c
    for (std::size_t w = 0; w < words; ++w) {
      const Complex cw = c(static_cast<Eigen::Index>(w));
      out.coefficients[slot * words + w] = cw;
      if (cw == Complex{}) continue;
      const Coeff exact = Coeff::from_double(cw);
      for (std::size_t j = 0; j < n; ++j) out.kernel(slot, j) += partials[w][j] * exact;
    }
  }
  out.sigma_lower_sq = std::max(sigma, 0.0);
  return out;
}

// ---------------------------------------------------------------------------
// Bounds

BoundReport discrepancy_bounds(const SteinProblem& prob, std::size_t degree, double poincare_constant,
                               const Tolerances& tol) {
  prob.require_admissible(tol.admissibility);
  const MomentFunctional& phi = prob.state();
  const std::size_t n = prob.nvars();
  const double nn = static_cast<double>(n);

  BoundReport report;
  report.degree = degree;
  report.poincare_constant = poincare_constant;
  report.centering_defect = prob.centering_defect();

  const MinimalKernelResult mk = minimal_kernel(prob, degree, tol);
  report.sigma_lower_sq = mk.sigma_lower_sq;
  report.gram_rank = mk.gram_rank;
  report.null_dim = mk.null_dim;
  // The explicit kernel is a Stein kernel only when phi is tracial.
  if (phi.tracial()) report.upper_explicit_sq = explicit_kernel_distance_sq(prob).distance_sq;

  const PolyTuple& grad = prob.gradient();
  const double grad_sq = inner_tuple(phi, grad, grad).real();
  const double grad_x = inner_tuple(phi, grad, PolyTuple::coordinates(n)).real();
  report.upper_poincare_sq = nn + poincare_constant * grad_sq - 2.0 * grad_x;

  if (prob.quadratic()) {
    bool isotropic = true;
    for (std::size_t i = 0; i < n && isotropic; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const Complex cov = phi.moment(Word{static_cast<Letter>(i), static_cast<Letter>(j)});
        if (std::abs(cov - (i == j ? 1.0 : 0.0)) > 1e-8) {
          isotropic = false;
          break;
        }
      }
    }
    if (isotropic) report.upper_isotropic_sq = nn * (poincare_constant - 1.0);
  }

  const double slack = 1e-8;
  auto check = [&](double upper, const char* name) {
    if (report.sigma_lower_sq > upper + slack) {
      report.violations.push_back(std::string("sigma_lower_sq exceeds ") + name);
    }
  };
  if (report.upper_explicit_sq) check(*report.upper_explicit_sq, "upper_explicit_sq");
  check(report.upper_poincare_sq, "upper_poincare_sq");
  if (report.upper_isotropic_sq) check(*report.upper_isotropic_sq, "upper_isotropic_sq");
  return report;
}

}  // namespace freestein
