#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "freestein/errors.hpp"
#include "freestein/states.hpp"
#include "test_support.hpp"

using namespace freestein;
namespace ft = freestein::testing;

namespace {

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode{0};
}

CumulantSpec random_spec(std::mt19937_64& rng, std::size_t n, std::size_t order) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CumulantSpec spec(n, order);
  for (const Word& w : words_up_to(n, order)) {
    if (!w.empty()) spec.set(w, {u(rng), u(rng)});
  }
  return spec;
}

}  // namespace

TEST_CASE("semicircular moments are Catalan numbers") {
  CumulantState phi(CumulantSpec::semicircular(1, 12));
  CHECK(phi.moment(Word{0, 0, 0, 0}).real() == doctest::Approx(2.0));
  CHECK(phi.moment(Word{0, 0, 0, 0, 0, 0}).real() == doctest::Approx(5.0));
  CHECK(std::abs(phi.moment(Word{0, 0, 0})) < 1e-15);
  for (std::size_t m = 0; m <= 6; ++m) {
    CHECK(phi.moment(Word(std::vector<Letter>(2 * m, 0))).real() == doctest::Approx(double(catalan(m))));
  }

  CumulantState two(CumulantSpec::semicircular(2, 8));
  CHECK(std::abs(two.moment(Word{0, 1, 0, 1})) < 1e-15);
  CHECK(two.moment(Word{0, 1, 1, 0}).real() == doctest::Approx(1.0));
  CHECK(two.moment(Word{0, 0, 1, 1}).real() == doctest::Approx(1.0));
  CHECK(two.tracial());
}

TEST_CASE("noncrossing partition counts") {
  CHECK(nc_partitions(1).size() == 1);
  CHECK(nc_partitions(3).size() == 5);
  CHECK(nc_partitions(4).size() == 14);
  for (std::size_t m = 1; m <= 10; ++m) CHECK(nc_partitions(m).size() == catalan(m));

  for (std::size_t m = 1; m <= 7; ++m) {
    const auto fast = nc_partitions(m);
    const auto slow = ft::brute_force_nc(m);
    CHECK(std::set<Partition>(fast.begin(), fast.end()) == std::set<Partition>(slow.begin(), slow.end()));
  }
}

TEST_CASE("cumulant engine matches brute-force enumeration") {
  std::mt19937_64 rng(21);
  const CumulantSpec spec = random_spec(rng, 2, 7);
  CumulantState phi(spec);
  double worst = 0.0;
  for (const Word& w : words_up_to(2, 7)) {
    worst = std::max(worst, std::abs(phi.moment(w) - ft::brute_force_moment(spec, w)));
    CHECK(std::abs(cumulants_to_moment(spec, w) - phi.moment(w)) < 1e-12);
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("moments_to_cumulants inverts the moment map") {
  std::mt19937_64 rng(22);
  const CumulantSpec spec = random_spec(rng, 2, 6);
  CumulantState phi(spec);
  const CumulantSpec back = moments_to_cumulants(phi, 6);
  for (const Word& w : words_up_to(2, 6)) {
    if (!w.empty()) CHECK(std::abs(back.kappa(w) - spec.kappa(w)) < 1e-9);
  }

  const auto table = ft::matrix_state(rng, 2, 4, 6, true);
  CumulantState rebuilt(moments_to_cumulants(*table, 6));
  for (const Word& w : words_up_to(2, 6)) CHECK(std::abs(rebuilt.moment(w) - table->moment(w)) < 1e-9);
}

TEST_CASE("centered free Poisson moments") {
  CumulantState phi(CumulantSpec::centered_free_poisson(1, 10));
  CHECK(phi.moment(Word{0, 0}).real() == doctest::Approx(1.0));
  CHECK(phi.moment(Word{0, 0, 0}).real() == doctest::Approx(1.0));
  CHECK(phi.moment(Word{0, 0, 0, 0}).real() == doctest::Approx(3.0));
  for (std::size_t m = 1; m <= 10; ++m) {
    CHECK(phi.moment(Word(std::vector<Letter>(m, 0))).real() ==
          doctest::Approx(ft::free_poisson_centered_moment(m)));
  }
}

TEST_CASE("budget and missing entries") {
  CumulantState phi(CumulantSpec::semicircular(1, 4));
  CHECK(code_of([&] { phi.moment(Word{0, 0, 0, 0, 0}); }) == ErrorCode::kBudgetExceeded);
  CumulantState wider(CumulantSpec::semicircular(1, 4), 8);
  CHECK(wider.moment(Word(std::vector<Letter>(8, 0))).real() == doctest::Approx(14.0));

  MomentTable table(1, 2, true);
  table.set(Word{0, 0}, 1.0);
  CHECK(table.moment(Word{}).real() == 1.0);
  CHECK(code_of([&] { table.moment(Word{0}); }) == ErrorCode::kInvalidState);
  CHECK(code_of([&] { table.moment(Word{0, 0, 0}); }) == ErrorCode::kBudgetExceeded);
}

TEST_CASE("state validation") {
  std::mt19937_64 rng(23);
  for (bool tracial : {true, false}) {
    const auto table = ft::matrix_state(rng, 2, 5, 6, tracial);
    const StateCheck check = check_state(*table);
    CHECK(check.ok());
    CHECK(check.gram_words > 0);
  }
  CHECK(check_state(CumulantState(CumulantSpec::semicircular(2, 8))).ok());
  CHECK(check_state(CumulantState(CumulantSpec::centered_free_poisson(2, 8))).ok());

  auto negative = MomentTable::from_functional(CumulantState(CumulantSpec::semicircular(1, 4)), 4);
  negative->set(Word{0, 0}, -1.0);
  CHECK_FALSE(check_state(*negative).ok());
  CHECK(code_of([&] { require_valid_state(*negative); }) == ErrorCode::kInvalidState);

  auto skew = MomentTable::from_functional(CumulantState(CumulantSpec::semicircular(2, 4)), 4);
  skew->set(Word{0, 1}, Complex(0.0, 0.5));
  CHECK_FALSE(check_state(*skew).ok());

  auto unital = MomentTable::from_functional(CumulantState(CumulantSpec::semicircular(1, 4)), 4);
  unital->set(Word{}, 2.0);
  CHECK_FALSE(check_state(*unital).ok());

  const auto vector_state = ft::matrix_state(rng, 2, 4, 4, false);
  auto claimed = std::make_shared<MomentTable>(2, 4, true);
  for (const auto& [w, e] : vector_state->entries()) claimed->set(w, e.value);
  CHECK_FALSE(check_state(*claimed).ok());
}

TEST_CASE("term-wise and symbolic pairings agree") {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + trial % 2;
    const auto phi = ft::matrix_state(rng, n, 4, 8, trial % 3 != 0);
    const KernelMatrix a = ft::random_kernel(rng, n, 2, 3);
    const KernelMatrix b = ft::random_kernel(rng, n, 2, 3);
    const Complex fast = inner_matrix(*phi, a, b);
    CHECK(std::abs(fast - inner_matrix_symbolic(*phi, a, b)) < 1e-9 * (1.0 + std::abs(fast)));
    CHECK(std::abs(inner_matrix(*phi, b, a) - std::conj(fast)) < 1e-9 * (1.0 + std::abs(fast)));
    const Complex self = inner_matrix(*phi, a, a);
    CHECK(self.real() > -1e-9);
    CHECK(std::abs(self.imag()) < 1e-9 * (1.0 + self.real()));

    const PolyTuple p = ft::random_tuple(rng, n, 4, 3);
    const Complex pp = inner_tuple(*phi, p, p);
    CHECK(pp.real() > -1e-9);
    CHECK(std::abs(pp.imag()) < 1e-9 * (1.0 + pp.real()));
  }
}

TEST_CASE("operator norm estimates") {
  CumulantState phi(CumulantSpec::semicircular(1, 12));
  const NormEstimate est = operator_norm_estimate(phi, 0, 12);
  CHECK(est.lower == doctest::Approx(std::pow(132.0, 1.0 / 12.0)));
  CHECK(est.lower == doctest::Approx(1.502).epsilon(1e-3));
  REQUIRE(est.upper.has_value());
  CHECK(*est.upper >= 2.0);
  CHECK(*est.upper >= est.lower);
  CHECK_THROWS_AS(operator_norm_estimate(phi, 0, 5), Error);

  std::mt19937_64 rng(25);
  const auto table = ft::matrix_state(rng, 1, 4, 6, true);
  CHECK_FALSE(operator_norm_estimate(*table, 0, 6).upper.has_value());
}

TEST_CASE("cumulant traciality flag follows cyclic invariance") {
  CumulantSpec spec = CumulantSpec::semicircular(2, 4);
  spec.set(Word{0, 0, 1}, 0.1);
  CHECK_FALSE(spec.cyclically_invariant());
  CHECK_FALSE(CumulantState(spec).tracial());
  spec.set(Word{0, 1, 0}, 0.1);
  spec.set(Word{1, 0, 0}, 0.1);
  CHECK(spec.cyclically_invariant());
  CHECK(CumulantState(spec).tracial());
}
