#include "freestein/poincare.hpp"

#include <algorithm>
#include <cmath>

#include "freestein/errors.hpp"

namespace freestein {

PoincareEstimate poincare_lower_bound(const MomentFunctional& phi, std::size_t degree, const Tolerances& tol) {
  PoincareEstimate est;
  est.degree = degree;
  if (degree == 0) return est;
  phi.require_order(2 * degree, "poincare_lower_bound");

  std::vector<Word> words = words_up_to(phi.nvars(), degree);
  words.erase(words.begin());  // constants have no variance and no gradient
  const std::size_t size = words.size();
  est.basis_size = size;

  std::vector<Complex> means(size);
  for (std::size_t a = 0; a < size; ++a) means[a] = phi.moment(words[a]);
  Eigen::MatrixXcd s(size, size);
  for (std::size_t a = 0; a < size; ++a) {
    for (std::size_t b = a; b < size; ++b) {
      const Complex v = phi.moment(words[a] * words[b].reversed()) - means[a] * std::conj(means[b]);
      s(a, b) = v;
      s(b, a) = std::conj(v);
    }
  }
  const Eigen::MatrixXcd e = dirichlet_form(phi, words);

  // Rayleigh quotients y^H S y / y^H E y; the same pencil as the coefficient-side forms.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig_s(s, Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig_e(e);
  const double s_scale = std::max(1.0, eig_s.eigenvalues().cwiseAbs().maxCoeff());
  const double e_scale = eig_e.eigenvalues().cwiseAbs().maxCoeff();
  est.min_variance_eigenvalue = eig_s.eigenvalues().minCoeff();
  est.min_dirichlet_eigenvalue = eig_e.eigenvalues().minCoeff();
  if (est.min_variance_eigenvalue < -tol.psd * s_scale) {
    throw Error(ErrorCode::kInvalidState, "variance form is indefinite; the moments do not come from a state", "state");
  }
  if (est.min_dirichlet_eigenvalue < -tol.psd * std::max(1.0, e_scale)) {
    throw Error(ErrorCode::kInvalidState, "Dirichlet form is indefinite; the moments do not come from a state", "state");
  }

  std::vector<Eigen::Index> kept;
  std::vector<Eigen::Index> null;
  for (Eigen::Index k = 0; k < eig_e.eigenvalues().size(); ++k) {
    const double lambda = eig_e.eigenvalues()(k);
    (lambda > tol.pinv * e_scale && lambda > 0.0 ? kept : null).push_back(k);
  }
  est.null_dim = null.size();

  if (!kept.empty()) {
    Eigen::MatrixXcd w(size, static_cast<Eigen::Index>(kept.size()));
    for (std::size_t c = 0; c < kept.size(); ++c) {
      w.col(static_cast<Eigen::Index>(c)) = eig_e.eigenvectors().col(kept[c]) / std::sqrt(eig_e.eigenvalues()(kept[c]));
    }
    const Eigen::MatrixXcd reduced = w.adjoint() * s * w;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(0.5 * (reduced + reduced.adjoint()), Eigen::EigenvaluesOnly);
    est.c_lower = std::max(0.0, eig.eigenvalues().maxCoeff());
  }
  if (!null.empty()) {
    Eigen::MatrixXcd z(size, static_cast<Eigen::Index>(null.size()));
    for (std::size_t c = 0; c < null.size(); ++c) z.col(static_cast<Eigen::Index>(c)) = eig_e.eigenvectors().col(null[c]);
    const Eigen::MatrixXcd restricted = z.adjoint() * s * z;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(0.5 * (restricted + restricted.adjoint()), Eigen::EigenvaluesOnly);
    for (Eigen::Index k = 0; k < eig.eigenvalues().size(); ++k) {
      if (eig.eigenvalues()(k) > tol.psd) ++est.infinite_ratio_witnesses;
    }
  }
  return est;
}

VoiculescuBound voiculescu_bound(std::size_t nvars, double norm, bool tracial) {
  const double base = static_cast<double>(nvars) * norm * norm;
  return {norm, 2.0 * base, 4.0 * base, tracial};
}

VoiculescuReport voiculescu_bound(const MomentFunctional& phi, std::size_t norm_order) {
  VoiculescuReport report;
  double lower = 0.0;
  double upper = 0.0;
  bool have_upper = true;
  for (std::size_t i = 0; i < phi.nvars(); ++i) {
    NormEstimate est = operator_norm_estimate(phi, i, norm_order);
    lower = std::max(lower, est.lower);
    if (est.upper) {
      upper = std::max(upper, *est.upper);
    } else {
      have_upper = false;
    }
    report.norms.push_back(est);
  }
  report.from_lower = voiculescu_bound(phi.nvars(), lower, phi.tracial());
  if (have_upper) report.from_upper = voiculescu_bound(phi.nvars(), upper, phi.tracial());
  return report;
}

BianeGapReport biane_gap_check(std::shared_ptr<const MomentFunctional> phi, std::size_t degree,
                               std::size_t norm_order, const Tolerances& tol) {
  const std::size_t n = phi->nvars();
  phi->require_order(2, "biane_gap_check");
  double trace = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(phi->moment(Word::letter(i))) > 1e-8) {
      throw Error(ErrorCode::kInadmissible, "hypothesis violated: X is not centered", "state");
    }
    trace += phi->moment(Word{static_cast<Letter>(i), static_cast<Letter>(i)}).real();
  }
  if (std::abs(trace - static_cast<double>(n)) > 1e-8) {
    throw Error(ErrorCode::kInadmissible,
                "hypothesis violated: sum_i phi(x_i^2) = " + std::to_string(trace) + " differs from n", "state");
  }

  BianeGapReport report;
  report.degree = degree;
  report.c_lower = poincare_lower_bound(*phi, degree, tol).c_lower;
  const SteinProblem prob(phi, NcPoly::quadratic_potential(n));
  report.sigma_lower_sq = minimal_kernel(prob, degree, tol).sigma_lower_sq;
  report.required = 1.0 + report.sigma_lower_sq / static_cast<double>(n);

  if (norm_order == 0) norm_order = phi->max_order() - phi->max_order() % 2;
  if (norm_order >= 2) {
    const VoiculescuReport v = voiculescu_bound(*phi, norm_order);
    if (v.from_upper) {
      report.c_upper = v.from_upper->applicable();
      report.margin = *report.c_upper - report.required;
      report.contradiction = *report.margin < -1e-6;
    }
  }
  return report;
}

}  // namespace freestein
