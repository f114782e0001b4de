#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "freestein/errors.hpp"
#include "freestein/io.hpp"
#include "test_support.hpp"

using namespace freestein;
using freestein::io::json;
namespace ft = freestein::testing;

namespace {

std::string field_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kOther);
    return e.field();
  }
  return "<no error>";
}

}  // namespace

TEST_CASE("polynomial round trip is exact") {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 30; ++trial) {
    const NcPoly p = ft::random_poly(rng, 3, 4, 6);
    CHECK(io::poly_from_json(json::parse(io::to_json(p).dump())) == p);
  }
  NcPoly huge(1, Word{0});
  huge *= Coeff(mpq_class("123456789012345678901234567890/7"));
  const json j = io::to_json(huge);
  CHECK(j["terms"][0]["re_num"].is_string());
  CHECK(io::poly_from_json(j) == huge);
}

TEST_CASE("polynomial JSON uses 1-based words") {
  const json j = json::parse(R"({"nvars": 2, "terms": [{"word": [2, 1], "re_num": 3, "re_den": 2}]})");
  const NcPoly p = io::poly_from_json(j);
  CHECK(p == NcPoly(2, Word{1, 0}) * Coeff::ratio(3, 2));
  CHECK(io::to_json(p)["terms"][0]["word"] == json::array({2, 1}));
}

TEST_CASE("tuple round trip") {
  std::mt19937_64 rng(52);
  const PolyTuple t = ft::random_tuple(rng, 2, 3, 3);
  CHECK(io::tuple_from_json(io::to_json(t)) == t);
}

TEST_CASE("moment table round trip") {
  std::mt19937_64 rng(53);
  const auto table = ft::matrix_state(rng, 2, 3, 4, false);
  table->set(Word{0, 1}, table->moment(Word{0, 1}), Complex(0.01, 0.02));
  table->set_norm_upper_estimates({1.5, 2.5});
  const auto back = io::table_from_json(json::parse(io::to_json(*table).dump()));
  CHECK(back->tracial() == table->tracial());
  CHECK(back->max_order() == table->max_order());
  for (const Word& w : words_up_to(2, 4)) CHECK(back->moment(w) == table->moment(w));
  CHECK(back->standard_error(Word{0, 1}) == Complex(0.01, 0.02));
  CHECK(back->norm_upper_estimates() == table->norm_upper_estimates());
}

TEST_CASE("cumulant round trip") {
  CumulantSpec spec = CumulantSpec::centered_free_poisson(2, 5);
  spec.set(Word{0, 1}, Complex(0.25, -0.5));
  const CumulantSpec back = io::cumulants_from_json(json::parse(io::to_json(spec).dump()));
  CHECK(back.values() == spec.values());
  CHECK(back.max_order() == 5);
}

TEST_CASE("ensemble configuration") {
  const json j = json::parse(R"({
    "N": 20, "samples": 5, "seed": 7,
    "generators": [
      {"kind": "gue"},
      {"kind": "poly_of_gue", "fresh_gues": 1,
       "poly": {"nvars": 1, "terms": [{"word": [1, 1], "re_num": 1}, {"word": [], "re_num": -1}]}}
    ]})");
  const MatrixEnsembleConfig c = io::ensemble_from_json(j);
  CHECK(c.matrix_size == 20);
  CHECK(c.samples == 5);
  CHECK(c.seed == 7);
  REQUIRE(c.generators.size() == 2);
  CHECK(c.generators[1].kind == GeneratorSpec::Kind::kPolyOfGue);
  CHECK(c.generators[1].fresh_gues == 1);
}

TEST_CASE("parse errors name the offending field") {
  CHECK(field_of([] { io::poly_from_json(json::parse(R"({"terms": []})")); }) == "poly.nvars");
  CHECK(field_of([] {
          io::poly_from_json(json::parse(R"({"nvars": 1, "terms": [{"word": [2], "re_num": 1}]})"));
        }) == "poly.terms[0].word[0]");
  CHECK(field_of([] {
          io::poly_from_json(json::parse(R"({"nvars": 1, "terms": [{"word": [1], "re_num": 1, "re_den": 0}]})"));
        }) == "poly.terms[0].re_den");
  CHECK(field_of([] {
          io::table_from_json(json::parse(R"({"nvars": 1, "max_order": 2, "tracial": "yes", "entries": []})"));
        }) == "state.tracial");
  CHECK(field_of([] {
          io::table_from_json(
              json::parse(R"({"nvars": 1, "max_order": 1, "tracial": true, "entries": [{"word": [1, 1], "re": 1}]})"));
        }) == "state.entries[0].word");
  CHECK(field_of([] {
          io::cumulants_from_json(json::parse(R"({"nvars": 1, "max_order": 4, "kappa": [{"word": [], "re": 1}]})"));
        }) == "cumulants.kappa[0].word");
  CHECK(field_of([] {
          io::ensemble_from_json(json::parse(R"({"N": 4, "samples": 2, "seed": 1, "generators": [{"kind": "goe"}]})"));
        }) == "ensemble.generators[0].kind");
  CHECK(field_of([] { io::read_json_file("/nonexistent/state.json"); }) == "/nonexistent/state.json");

  const std::string path = "freestein_io_bad.json";
  std::ofstream(path) << "{ not json";
  CHECK(field_of([&] { io::read_json_file(path); }) == path);
  std::remove(path.c_str());
}

TEST_CASE("reports") {
  auto phi = std::make_shared<CumulantState>(CumulantSpec::centered_free_poisson(1, 10));
  SteinProblem prob(phi, NcPoly::quadratic_potential(1));
  const json r = io::stein_report(prob, discrepancy_bounds(prob, 2, 32.0), explicit_kernel_distance_sq(prob));
  CHECK(r["sigma_lower_sq"].get<double>() == doctest::Approx(0.5));
  CHECK(r["violations"].empty());

  const json p = io::poincare_report(poincare_lower_bound(*phi, 2), voiculescu_bound(*phi, 10));
  CHECK(p["voiculescu_certified"].get<bool>());
  CHECK(p["c_lower"].get<double>() > 1.0);
}
