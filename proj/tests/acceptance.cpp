// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "freestein/cltlab.hpp"
#include "freestein/ensemble.hpp"
#include "freestein/ncalg.hpp"
#include "freestein/poincare.hpp"
#include "freestein/states.hpp"
#include "freestein/stein.hpp"
#include "test_support.hpp"

using namespace freestein;
namespace ft = freestein::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::shared_ptr<const MomentFunctional> semicircle(std::size_t n, std::size_t order) {
  return std::make_shared<CumulantState>(CumulantSpec::semicircular(n, order));
}

std::shared_ptr<const MomentFunctional> free_poisson(std::size_t n, std::size_t order) {
  return std::make_shared<CumulantState>(CumulantSpec::centered_free_poisson(n, order));
}

Outcome symbolic_identities() {
  std::mt19937_64 rng(101);
  std::size_t cases = 0, failures = 0;
  auto check = [&](bool ok) {
    ++cases;
    failures += !ok;
  };
  for (int trial = 0; trial < 120; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const NcPoly p = ft::random_poly(rng, n, 6, 5);
    const NcPoly q = ft::random_poly(rng, n, 6, 5);
    TensorPoly via(n);
    for (std::size_t i = 0; i < n; ++i) via += sharp(partial(i, p), delta(NcPoly::variable(n, i)));
    check(delta(p) == via);
    for (std::size_t i = 0; i < n; ++i) check(partial(i, p * q) == right_act(partial(i, p), q) + left_act(p, partial(i, q)));
    check(delta(p * q) == right_act(delta(p), q) + left_act(p, delta(q)));

    const TensorPoly a = ft::random_tensor(rng, n, 3, 3);
    const TensorPoly b = ft::random_tensor(rng, n, 3, 3);
    const TensorPoly c = ft::random_tensor(rng, n, 3, 3);
    check(sharp(sharp(a, b), c) == sharp(a, sharp(b, c)));
    check(sharp(a, TensorPoly::unit(n)) == a && sharp(TensorPoly::unit(n), a) == a);

    check(involution(involution(p)) == p);
    check(involution(p * q) == involution(q) * involution(p));
    check(tensor_involution(tensor_involution(a)) == a);
    const KernelMatrix m = ft::random_kernel(rng, n, 2, 2);
    check(matrix_adjoint(matrix_adjoint(m)) == m);
  }
  return {failures == 0 && cases >= 500, fmt("%zu randomized identities, %zu mismatches", cases, failures)};
}

Outcome stein_identity() {
  std::mt19937_64 rng(102);
  std::size_t triples = 0, cumulant = 0, table = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 240; ++trial) {
    const std::size_t n = 1 + trial % 2;
    std::shared_ptr<const MomentFunctional> phi;
    switch (trial % 4) {
      case 0:
        phi = semicircle(n, 10);
        ++cumulant;
        break;
      case 1:
        phi = free_poisson(n, 10);
        ++cumulant;
        break;
      case 2:
        phi = std::make_shared<CumulantState>(moments_to_cumulants(*ft::matrix_state(rng, n, 3, 10, true), 10));
        ++cumulant;
        break;
      default:
        // The explicit kernel identity needs a tracial state; see the non-tracial unit test.
        phi = ft::matrix_state(rng, n, 4, 10, true);
        ++table;
    }
    const NcPoly v = ft::random_self_adjoint(rng, n, 4, 4);
    const PolyTuple p = ft::random_tuple(rng, n, 4, 3);
    SteinProblem prob(phi, v);
    worst = std::max(worst, std::abs(stein_residual(prob, explicit_kernel(v), p)));
    ++triples;
  }
  return {worst <= 1e-10 && triples >= 200,
          fmt("%zu triples (%zu cumulant, %zu table), max residual %.3g", triples, cumulant, table, worst)};
}

Outcome semicircular_distance() {
  SteinProblem prob(semicircle(1, 8), NcPoly::quadratic_potential(1));
  const ExplicitDistance d = explicit_kernel_distance_sq(prob);
  const bool ok = std::abs(d.distance_sq - 1.0) <= 1e-9 && std::abs(*d.bound_reduced - 1.0) <= 1e-9;
  return {ok, fmt("||A-I||^2 = %.12g (closed form %.12g), (n^2+n^2 m4-n)/2 = %.12g, (n^2+n^2 m4)/2 = %.12g; expected 1 and 1",
                  d.distance_sq, *d.distance_sq_closed, *d.bound_reduced, *d.bound)};
}

Outcome zero_discrepancy() {
  double worst_sigma = 0.0, worst_residual = 0.0;
  for (std::size_t n : {1, 2}) {
    SteinProblem prob(semicircle(n, 12), NcPoly::quadratic_potential(n));
    for (std::size_t d = 1; d <= 4; ++d) worst_sigma = std::max(worst_sigma, minimal_kernel(prob, d).sigma_lower_sq);
    const TruncationBasis basis(n, 5);
    for (std::size_t k = 0; k < basis.size(); ++k) {
      worst_residual =
          std::max(worst_residual, std::abs(stein_residual(prob, KernelMatrix::identity(n), basis.element(k))));
    }
  }
  return {worst_sigma <= 1e-8 && worst_residual <= 1e-10,
          fmt("max Sigma_d^2 = %.3g (d<=4, n<=2), identity residual %.3g on degree<=5", worst_sigma, worst_residual)};
}

Outcome poincare_semicircle() {
  double worst = 0.0;
  for (std::size_t n : {1, 2}) {
    CumulantState phi(CumulantSpec::semicircular(n, 12));
    for (std::size_t d = 1; d <= 4; ++d) worst = std::max(worst, std::abs(poincare_lower_bound(phi, d).c_lower - 1.0));
  }

  MatrixEnsembleConfig cfg;
  cfg.matrix_size = 30;
  cfg.samples = 30;
  cfg.seed = 5;
  cfg.generators = {GeneratorSpec::gue()};
  const std::vector<std::pair<std::string, std::shared_ptr<const MomentFunctional>>> states = {
      {"semicircular n=1", semicircle(1, 12)},   {"semicircular n=2", semicircle(2, 10)},
      {"free Poisson n=1", free_poisson(1, 12)}, {"free Poisson n=2", free_poisson(2, 10)},
      {"GUE table n=1", mc_moment_table(cfg, 10)},
  };
  bool monotone = true, below = true;
  std::size_t compared = 0;
  for (const auto& [name, phi] : states) {
    double previous = 0.0;
    const VoiculescuReport v = voiculescu_bound(*phi, phi->max_order() - phi->max_order() % 2);
    const std::size_t top = phi->nvars() == 1 ? 5 : 4;
    for (std::size_t d = 1; d <= top; ++d) {
      const double c = poincare_lower_bound(*phi, d).c_lower;
      monotone &= c >= previous - 1e-9;
      previous = c;
      if (v.from_upper) {
        below &= c <= v.from_upper->applicable() + 1e-9;
        ++compared;
      }
    }
  }
  return {worst <= 1e-6 && monotone && below,
          fmt("max |C_d-1| = %.3g; monotone on %zu states: %s; %zu C_d values below certified Voiculescu bounds: %s", worst,
              states.size(), monotone ? "yes" : "no", compared, below ? "yes" : "no")};
}

Outcome biane_gap() {
  std::string detail;
  bool ok = true;
  for (std::size_t n : {1, 2}) {
    auto phi = free_poisson(n, 12);
    double min_margin = 1e300;
    for (std::size_t d = 1; d <= 4; ++d) {
      const BianeGapReport r = biane_gap_check(phi, d);
      ok &= !r.contradiction && r.margin.has_value() && *r.margin >= 0.0;
      if (r.margin) min_margin = std::min(min_margin, *r.margin);
      if (d == 4) {
        detail += fmt("n=%zu: 1+Sigma_4^2/n = %.6g <= C_upper = %.6g (min margin %.6g); ", n, r.required,
                      r.c_upper.value_or(NAN), min_margin);
      }
    }
  }
  return {ok, detail + "no certified contradiction"};
}

Outcome clt_rate() {
  CltExperiment exp{CumulantSpec::centered_free_poisson(1, 8)};
  const std::vector<CltRow> rows = clt_rate_table(exp);
  bool within = true;
  double lo = 1e300, hi = 0.0;
  for (const CltRow& r : rows) {
    within &= r.sigma_lower <= r.constant_m4 / std::sqrt(static_cast<double>(r.k)) + 1e-6;
    const double scaled = r.sigma_lower * std::sqrt(static_cast<double>(r.k));
    lo = std::min(lo, scaled);
    hi = std::max(hi, scaled);
  }
  const double spread = lo > 0.0 ? hi / lo : INFINITY;
  return {within && spread <= 3.0,
          fmt("k = 1..64, d = 3: Sigma_d(Y^k) <= %.6g/sqrt(k) for all k: %s; sqrt(k) Sigma_d in [%.6g, %.6g], max/min %.6g",
              rows.front().constant_m4, within ? "yes" : "no", lo, hi, spread)};
}

Outcome cumulant_oracle() {
  std::mt19937_64 rng(108);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CumulantSpec random_spec(2, 7);
  for (const Word& w : words_up_to(2, 7)) {
    if (!w.empty()) random_spec.set(w, {u(rng), u(rng)});
  }
  double worst = 0.0;
  std::size_t words = 0;
  for (const CumulantSpec& spec : {random_spec, CumulantSpec::centered_free_poisson(3, 7)}) {
    CumulantState phi(spec);
    for (const Word& w : words_up_to(spec.nvars(), 7)) {
      worst = std::max(worst, std::abs(phi.moment(w) - ft::brute_force_moment(spec, w)));
      ++words;
    }
  }
  double round_trip = 0.0;
  const auto table = ft::matrix_state(rng, 2, 4, 7, true);
  const CumulantSpec inverted = moments_to_cumulants(*table, 7);
  CumulantState rebuilt(inverted);
  for (const Word& w : words_up_to(2, 7)) round_trip = std::max(round_trip, std::abs(rebuilt.moment(w) - table->moment(w)));
  const CumulantSpec again = moments_to_cumulants(CumulantState(random_spec), 7);
  for (const Word& w : words_up_to(2, 7)) {
    if (!w.empty()) round_trip = std::max(round_trip, std::abs(again.kappa(w) - random_spec.kappa(w)));
  }
  return {worst <= 1e-12 && round_trip <= 1e-9,
          fmt("%zu words of length <= 7, max |engine - enumerator| = %.3g; round trip %.3g", words, worst, round_trip)};
}

Outcome monte_carlo() {
  const std::vector<std::size_t> sizes = {50, 100, 200};
  const std::size_t n = 2;
  CumulantState reference(CumulantSpec::semicircular(n, 6));
  std::vector<std::shared_ptr<MomentTable>> tables;
  for (std::size_t N : sizes) {
    MatrixEnsembleConfig cfg;
    cfg.matrix_size = N;
    cfg.samples = 200;
    cfg.seed = 7;
    cfg.compute_norms = false;
    cfg.generators.assign(n, GeneratorSpec::gue());
    tables.push_back(mc_moment_table(cfg, 6));
  }
  std::size_t tracked = 0, outside = 0, net_decrease = 0, strict_decrease = 0;
  double worst_z = 0.0;
  std::string worst_word;
  std::vector<double> max_dev(sizes.size(), 0.0);
  for (const Word& w : words_up_to(n, 6)) {
    if (w.empty()) continue;
    ++tracked;
    std::vector<double> dev(sizes.size());
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      dev[k] = std::abs(tables[k]->moment(w) - reference.moment(w));
      const Complex se = *tables[k]->standard_error(w);
      const double s = std::hypot(se.real(), se.imag());
      const double z = s > 0.0 ? dev[k] / s : (dev[k] > 0.0 ? INFINITY : 0.0);
      if (z > 3.0) ++outside;
      if (z > worst_z) {
        worst_z = z;
        worst_word = w.to_string() + " at N=" + std::to_string(sizes[k]);
      }
      max_dev[k] = std::max(max_dev[k], dev[k]);
    }
    net_decrease += dev.back() < dev.front();
    strict_decrease += dev[0] > dev[1] && dev[1] > dev[2];
  }
  const double fraction = static_cast<double>(net_decrease) / static_cast<double>(tracked);
  return {outside == 0 && fraction >= 0.8,
          fmt("n=2, S=200, seed 7, %zu words x 3 sizes: %zu outside 3 se (worst %.3g se, %s); deviation(N=200) < "
              "deviation(N=50) for %zu/%zu words (%.0f%%), strictly monotone for %zu; max deviation %.3g, %.3g, %.3g",
              tracked, outside, worst_z, worst_word.c_str(), net_decrease, tracked, 100.0 * fraction, strict_decrease,
              max_dev[0], max_dev[1], max_dev[2])};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"symbolic identities", symbolic_identities},
      {"Stein identity for the explicit kernel", stein_identity},
      {"exact distance at the semicircular point", semicircular_distance},
      {"zero discrepancy at the fixed point", zero_discrepancy},
      {"Poincare constant at the semicircular point", poincare_semicircle},
      {"semicircular gap inequality chain", biane_gap},
      {"free CLT rate, fourth-moment branch", clt_rate},
      {"cumulant engine vs enumeration oracle", cumulant_oracle},
      {"Monte Carlo convergence", monte_carlo},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !o.pass;
    std::printf("%s criterion %zu (%s): %s [%.2fs]\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
