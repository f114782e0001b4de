#include "freestein/io.hpp"

#include <algorithm>
#include <optional>
#include <fstream>
#include <sstream>

#include "freestein/errors.hpp"

namespace freestein::io {
namespace {

[[noreturn]] void fail(const std::string& field, const std::string& message) {
  throw Error(ErrorCode::kOther, field + ": " + message, field);
}

const json& member(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(where + "." + key, "missing field");
  return *it;
}

std::size_t as_count(const json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 0) fail(where, "expected a non-negative integer");
  return j.get<std::size_t>();
}

json integer_json(const mpz_class& z) {
  if (z.fits_slong_p()) return z.get_si();
  return z.get_str();
}

mpz_class integer_from(const json& j, const std::string& where) {
  if (j.is_number_integer()) return mpz_class(std::to_string(j.get<long long>()));
  if (j.is_string()) {
    mpz_class z;
    if (z.set_str(j.get<std::string>(), 10) != 0) fail(where, "malformed integer string");
    return z;
  }
  fail(where, "expected an integer");
}

mpq_class rational_from(const json& term, const char* num, const char* den, const std::string& where) {
  mpz_class n = term.contains(num) ? integer_from(term[num], where + "." + num) : mpz_class(0);
  mpz_class d = term.contains(den) ? integer_from(term[den], where + "." + den) : mpz_class(1);
  if (d == 0) fail(where + "." + den, "zero denominator");
  mpq_class q(n, d);
  q.canonicalize();
  return q;
}

void put_coeff(json& term, const Coeff& c) {
  term["re_num"] = integer_json(c.re().get_num());
  term["re_den"] = integer_json(c.re().get_den());
  term["im_num"] = integer_json(c.im().get_num());
  term["im_den"] = integer_json(c.im().get_den());
}

json word_json(const Word& w) {
  json arr = json::array();
  for (Letter l : w) arr.push_back(static_cast<int>(l) + 1);
  return arr;
}

Word word_from(const json& j, std::size_t nvars, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of 1-based indices");
  std::vector<Letter> letters;
  for (std::size_t k = 0; k < j.size(); ++k) {
    if (!j[k].is_number_integer()) fail(where, "expected integer letters");
    const long long l = j[k].get<long long>();
    if (l < 1 || static_cast<std::size_t>(l) > nvars) {
      fail(where + "[" + std::to_string(k) + "]", "index " + std::to_string(l) + " outside 1.." + std::to_string(nvars));
    }
    letters.push_back(static_cast<Letter>(l - 1));
  }
  return Word(std::move(letters));
}

Complex complex_from(const json& entry, const std::string& where) {
  auto get = [&](const char* key) -> double {
    if (!entry.contains(key)) return 0.0;
    if (!entry[key].is_number()) fail(where + "." + key, "expected a number");
    return entry[key].get<double>();
  };
  if (!entry.contains("re")) fail(where + ".re", "missing field");
  return {get("re"), get("im")};
}

std::size_t nvars_from(const json& j, const std::string& where) {
  const std::size_t n = as_count(member(j, "nvars", where), where + ".nvars");
  if (n == 0 || n > 255) fail(where + ".nvars", "must lie in 1..255");
  return n;
}

}  // namespace

json to_json(const NcPoly& p) {
  json terms = json::array();
  for (const auto& [w, c] : p.terms()) {
    json t;
    t["word"] = word_json(w);
    put_coeff(t, c);
    terms.push_back(std::move(t));
  }
  return {{"nvars", p.nvars()}, {"terms", std::move(terms)}};
}

json to_json(const TensorPoly& q) {
  json terms = json::array();
  for (const auto& [k, c] : q.terms()) {
    json t;
    t["left"] = word_json(k.first);
    t["right"] = word_json(k.second);
    put_coeff(t, c);
    terms.push_back(std::move(t));
  }
  return {{"nvars", q.nvars()}, {"terms", std::move(terms)}};
}

json to_json(const PolyTuple& t) {
  json entries = json::array();
  for (const auto& p : t.entries()) entries.push_back(to_json(p));
  return {{"nvars", t.nvars()}, {"entries", std::move(entries)}};
}

json to_json(const KernelMatrix& a) {
  json rows = json::array();
  for (std::size_t i = 0; i < a.dim(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < a.dim(); ++j) row.push_back(to_json(a(i, j)));
    rows.push_back(std::move(row));
  }
  return {{"nvars", a.nvars()}, {"entries", std::move(rows)}};
}

json to_json(const MomentTable& table) {
  std::vector<Word> words;
  for (const auto& [w, e] : table.entries()) words.push_back(w);
  std::sort(words.begin(), words.end());
  json entries = json::array();
  for (const Word& w : words) {
    const auto& e = table.entries().at(w);
    json entry = {{"word", word_json(w)}, {"re", e.value.real()}, {"im", e.value.imag()}};
    if (e.standard_error) entry["se"] = {e.standard_error->real(), e.standard_error->imag()};
    entries.push_back(std::move(entry));
  }
  json out = {{"nvars", table.nvars()}, {"max_order", table.max_order()}, {"tracial", table.tracial()},
              {"entries", std::move(entries)}};
  if (auto norms = table.norm_upper_estimates()) out["norm_upper"] = *norms;
  return out;
}

json to_json(const CumulantSpec& spec) {
  std::vector<Word> words;
  for (const auto& [w, v] : spec.values()) words.push_back(w);
  std::sort(words.begin(), words.end());
  json kappa = json::array();
  for (const Word& w : words) {
    const Complex v = spec.kappa(w);
    kappa.push_back({{"word", word_json(w)}, {"re", v.real()}, {"im", v.imag()}});
  }
  return {{"nvars", spec.nvars()}, {"max_order", spec.max_order()}, {"kappa", std::move(kappa)}};
}

NcPoly poly_from_json(const json& j) {
  const std::size_t n = nvars_from(j, "poly");
  const json& terms = member(j, "terms", "poly");
  if (!terms.is_array()) fail("poly.terms", "expected an array");
  NcPoly p(n);
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const std::string where = "poly.terms[" + std::to_string(k) + "]";
    const Word w = word_from(member(terms[k], "word", where), n, where + ".word");
    p.add_term(w, Coeff(rational_from(terms[k], "re_num", "re_den", where),
                        rational_from(terms[k], "im_num", "im_den", where)));
  }
  return p;
}

PolyTuple tuple_from_json(const json& j) {
  const std::size_t n = nvars_from(j, "tuple");
  const json& entries = member(j, "entries", "tuple");
  if (!entries.is_array() || entries.size() != n) fail("tuple.entries", "expected nvars polynomials");
  std::vector<NcPoly> polys;
  for (const auto& e : entries) {
    NcPoly p = poly_from_json(e);
    if (p.nvars() != n) fail("tuple.entries", "polynomial nvars differs from the tuple's");
    polys.push_back(std::move(p));
  }
  return PolyTuple(std::move(polys));
}

std::shared_ptr<MomentTable> table_from_json(const json& j) {
  const std::size_t n = nvars_from(j, "state");
  const std::size_t max_order = as_count(member(j, "max_order", "state"), "state.max_order");
  const json& tracial = member(j, "tracial", "state");
  if (!tracial.is_boolean()) fail("state.tracial", "expected a boolean");
  auto table = std::make_shared<MomentTable>(n, max_order, tracial.get<bool>());
  const json& entries = member(j, "entries", "state");
  if (!entries.is_array()) fail("state.entries", "expected an array");
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const std::string where = "state.entries[" + std::to_string(k) + "]";
    const Word w = word_from(member(entries[k], "word", where), n, where + ".word");
    if (w.size() > max_order) fail(where + ".word", "longer than max_order");
    std::optional<Complex> se;
    if (entries[k].contains("se")) {
      const json& pair = entries[k]["se"];
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
        fail(where + ".se", "expected [re, im] standard errors");
      }
      se = Complex(pair[0].get<double>(), pair[1].get<double>());
    }
    table->set(w, complex_from(entries[k], where), se);
  }
  if (j.contains("norm_upper")) {
    const json& norms = j["norm_upper"];
    if (!norms.is_array() || norms.size() != n) fail("state.norm_upper", "expected nvars numbers");
    table->set_norm_upper_estimates(norms.get<std::vector<double>>());
  }
  return table;
}

CumulantSpec cumulants_from_json(const json& j) {
  const std::size_t n = nvars_from(j, "cumulants");
  const std::size_t max_order = as_count(member(j, "max_order", "cumulants"), "cumulants.max_order");
  if (max_order < 1 || max_order > kMaxPartitionOrder) fail("cumulants.max_order", "must lie in 1..16");
  CumulantSpec spec(n, max_order);
  const json& kappa = member(j, "kappa", "cumulants");
  if (!kappa.is_array()) fail("cumulants.kappa", "expected an array");
  for (std::size_t k = 0; k < kappa.size(); ++k) {
    const std::string where = "cumulants.kappa[" + std::to_string(k) + "]";
    const Word w = word_from(member(kappa[k], "word", where), n, where + ".word");
    if (w.empty() || w.size() > max_order) fail(where + ".word", "length must lie in 1..max_order");
    spec.set(w, complex_from(kappa[k], where));
  }
  return spec;
}

MatrixEnsembleConfig ensemble_from_json(const json& j) {
  MatrixEnsembleConfig cfg;
  cfg.matrix_size = as_count(member(j, "N", "ensemble"), "ensemble.N");
  cfg.samples = as_count(member(j, "samples", "ensemble"), "ensemble.samples");
  const json& seed = member(j, "seed", "ensemble");
  if (!seed.is_number_unsigned() && !seed.is_number_integer()) fail("ensemble.seed", "expected an integer");
  cfg.seed = seed.get<std::uint64_t>();
  const json& gens = member(j, "generators", "ensemble");
  if (!gens.is_array() || gens.empty()) fail("ensemble.generators", "expected a non-empty array");
  for (std::size_t k = 0; k < gens.size(); ++k) {
    const std::string where = "ensemble.generators[" + std::to_string(k) + "]";
    const json& kind = member(gens[k], "kind", where);
    if (kind == "gue") {
      cfg.generators.push_back(GeneratorSpec::gue());
    } else if (kind == "poly_of_gue") {
      NcPoly p = poly_from_json(member(gens[k], "poly", where));
      const std::size_t fresh = as_count(member(gens[k], "fresh_gues", where), where + ".fresh_gues");
      if (fresh != p.nvars()) fail(where + ".fresh_gues", "must equal the polynomial's nvars");
      cfg.generators.push_back(GeneratorSpec::poly_of_gue(std::move(p)));
    } else {
      fail(where + ".kind", "expected \"gue\" or \"poly_of_gue\"");
    }
  }
  if (j.contains("compute_norms")) {
    if (!j["compute_norms"].is_boolean()) fail("ensemble.compute_norms", "expected a boolean");
    cfg.compute_norms = j["compute_norms"].get<bool>();
  }
  return cfg;
}

json stein_report(const SteinProblem& prob, const BoundReport& b, const ExplicitDistance& e) {
  json out = {{"n", prob.nvars()},
              {"potential", to_json(prob.potential())},
              {"degree", b.degree},
              {"sigma_lower_sq", b.sigma_lower_sq},
              {"upper_explicit_sq", b.upper_explicit_sq ? json(*b.upper_explicit_sq) : json(nullptr)},
              {"upper_poincare_sq", b.upper_poincare_sq},
              {"gram_rank", b.gram_rank},
              {"null_dim", b.null_dim},
              {"centering_defect", b.centering_defect},
              {"poincare_constant", b.poincare_constant}};
  if (b.upper_isotropic_sq) out["upper_isotropic_sq"] = *b.upper_isotropic_sq;
  if (e.bound) {
    out["m4"] = *e.m4;
    out["fourth_moment_bound_sq"] = *e.bound;
    out["fourth_moment_bound_reduced_sq"] = *e.bound_reduced;
  }
  out["violations"] = b.violations;
  return out;
}

json poincare_report(const PoincareEstimate& est, const VoiculescuReport& v) {
  json norms = json::array();
  for (const auto& n : v.norms) {
    json entry = {{"lower", n.lower}};
    entry["upper"] = n.upper ? json(*n.upper) : json(nullptr);
    norms.push_back(std::move(entry));
  }
  const VoiculescuBound& bound = v.from_upper ? *v.from_upper : v.from_lower;
  return {{"degree", est.degree},
          {"c_lower", est.c_lower},
          {"voiculescu_tracial", bound.tracial_bound},
          {"voiculescu_general", bound.general_bound},
          {"voiculescu_certified", v.from_upper.has_value()},
          {"tracial", bound.tracial},
          {"null_dim", est.null_dim},
          {"infinite_ratio_witnesses", est.infinite_ratio_witnesses},
          {"norm_estimates", std::move(norms)}};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kOther, "cannot open " + path, path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kOther, path + ": " + e.what(), path);
  }
}

}  // namespace freestein::io
