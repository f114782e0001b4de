#include "freestein/cltlab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

#include "freestein/errors.hpp"
#include "freestein/poincare.hpp"

namespace freestein {

CumulantSpec rescale_cumulants(const CumulantSpec& base, std::size_t k) {
  if (k == 0) throw Error(ErrorCode::kOther, "copy count k must be >= 1", "k");
  CumulantSpec out(base.nvars(), base.max_order());
  const double kk = static_cast<double>(k);
  for (const auto& [w, v] : base.values()) {
    out.set(w, v * std::pow(kk, 1.0 - static_cast<double>(w.size()) / 2.0));
  }
  return out;
}

void CltExperiment::validate() const {
  const std::size_t n = base.nvars();
  if (base.max_order() < 2) throw Error(ErrorCode::kInadmissible, "base needs cumulants up to order 2", "base");
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(base.kappa(Word::letter(i))) > 1e-9) {
      throw Error(ErrorCode::kInadmissible, "base is not centered", "base.kappa");
    }
    for (std::size_t j = 0; j < n; ++j) {
      const Complex cov = base.kappa(Word{static_cast<Letter>(i), static_cast<Letter>(j)});
      if (std::abs(cov - (i == j ? 1.0 : 0.0)) > 1e-9) {
        throw Error(ErrorCode::kInadmissible, "base covariance is not the identity", "base.kappa");
      }
    }
  }
  if (ks.empty()) throw Error(ErrorCode::kOther, "empty k grid", "ks");
}

std::vector<CltRow> clt_rate_table(const CltExperiment& exp, const Tolerances& tol) {
  exp.validate();
  const std::size_t n = exp.base.nvars();
  const double nn = static_cast<double>(n);
  const std::size_t needed = std::max<std::size_t>(2 * exp.degree + 2, 4);
  if (exp.base.max_order() < needed) {
    throw Error(ErrorCode::kBudgetExceeded,
                "base cumulants must reach order " + std::to_string(needed) + " for degree " +
                    std::to_string(exp.degree),
                "base.max_order");
  }

  auto base_state = std::make_shared<CumulantState>(exp.base);
  double m4_x = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    m4_x = std::max(m4_x, base_state->moment(Word(std::vector<Letter>(4, static_cast<Letter>(i)))).real());
  }
  const double constant_m4 = std::sqrt(nn * (nn + nn * m4_x - 1.0) / 2.0);
  std::optional<double> constant_copt;
  const VoiculescuReport v = voiculescu_bound(*base_state, 2);
  if (v.from_upper) constant_copt = std::sqrt(nn * std::max(0.0, v.from_upper->applicable() - 1.0));

  std::vector<CltRow> rows;
  for (std::size_t k : exp.ks) {
    auto state = std::make_shared<CumulantState>(rescale_cumulants(exp.base, k));
    CltRow row;
    row.k = k;
    for (std::size_t i = 0; i < n; ++i) {
      row.m4_yk = std::max(row.m4_yk, state->moment(Word(std::vector<Letter>(4, static_cast<Letter>(i)))).real());
    }
    row.c_lower = poincare_lower_bound(*state, exp.degree, tol).c_lower;
    const SteinProblem prob(state, NcPoly::quadratic_potential(n));
    row.sigma_lower_sq = minimal_kernel(prob, exp.degree, tol).sigma_lower_sq;
    row.sigma_lower = std::sqrt(row.sigma_lower_sq);
    row.constant_m4 = constant_m4;
    row.constant_copt = constant_copt;
    row.theorem_constant = constant_copt ? std::min(constant_m4, *constant_copt) : constant_m4;
    const double sqrt_k = std::sqrt(static_cast<double>(k));
    row.bound_over_sqrt_k = row.theorem_constant / sqrt_k;
    row.ratio = row.bound_over_sqrt_k > 0.0 ? row.sigma_lower / row.bound_over_sqrt_k : 0.0;
    row.within_m4_bound = row.sigma_lower <= constant_m4 / sqrt_k + 1e-6;
    rows.push_back(row);
  }
  return rows;
}

void write_clt_csv(std::ostream& out, const std::vector<CltRow>& rows) {
  out << "k,m4_Yk,sigma_d_lower,theorem_constant,bound_over_sqrt_k,ratio\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.k, r.m4_yk, r.sigma_lower,
                  r.theorem_constant, r.bound_over_sqrt_k, r.ratio);
    out << buf;
  }
}

}  // namespace freestein
