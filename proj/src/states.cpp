#include "freestein/states.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <mutex>

#include <Eigen/Dense>

#include "freestein/errors.hpp"

namespace freestein {
namespace {

std::string word_label(const Word& w) {
  std::string out = "[";
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (k) out += ",";
    out += std::to_string(static_cast<int>(w[k]) + 1);
  }
  return out + "]";
}

std::size_t max_leg(const TensorPoly& q, bool left) {
  std::size_t d = 0;
  for (const auto& [k, c] : q.terms()) d = std::max(d, left ? k.first.size() : k.second.size());
  return d;
}

}  // namespace

// ---------------------------------------------------------------------------
// MomentFunctional

MomentFunctional::MomentFunctional(std::size_t nvars, std::size_t max_order, bool tracial)
    : nvars_(nvars), max_order_(max_order), tracial_(tracial) {
  if (nvars == 0) throw Error(ErrorCode::kOther, "states need at least one variable", "nvars");
}

Complex MomentFunctional::moment(const Word& w) const {
  if (w.empty()) return lookup(w);
  if (w.size() > max_order_) {
    throw Error(ErrorCode::kBudgetExceeded,
                "moment of length " + std::to_string(w.size()) + " exceeds max_order " + std::to_string(max_order_),
                "max_order");
  }
  if (w.min_nvars() > nvars_) throw Error(ErrorCode::kOther, "word " + word_label(w) + " uses an unknown letter", "word");
  return lookup(w);
}

void MomentFunctional::require_order(std::size_t order, const std::string& what) const {
  if (order > max_order_) {
    throw Error(ErrorCode::kBudgetExceeded,
                what + " needs moments of order " + std::to_string(order) + " but the state provides " +
                    std::to_string(max_order_),
                "max_order");
  }
}

// ---------------------------------------------------------------------------
// MomentTable

MomentTable::MomentTable(std::size_t nvars, std::size_t max_order, bool tracial)
    : MomentFunctional(nvars, max_order, tracial) {
  entries_.emplace(Word::unit(), Entry{1.0, std::nullopt});
}

std::shared_ptr<MomentTable> MomentTable::from_functional(const MomentFunctional& phi, std::size_t max_order) {
  phi.require_order(max_order, "materializing a moment table");
  auto table = std::make_shared<MomentTable>(phi.nvars(), max_order, phi.tracial());
  for (const Word& w : words_up_to(phi.nvars(), max_order)) table->set(w, phi.moment(w));
  if (auto norms = phi.norm_upper_estimates()) table->set_norm_upper_estimates(*norms);
  return table;
}

void MomentTable::set(const Word& w, Complex value, std::optional<Complex> standard_error) {
  if (w.size() > max_order()) throw Error(ErrorCode::kOther, "word " + word_label(w) + " longer than max_order", "word");
  if (w.min_nvars() > nvars()) throw Error(ErrorCode::kOther, "word " + word_label(w) + " uses an unknown letter", "word");
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
    throw Error(ErrorCode::kInvalidState, "non-finite moment for word " + word_label(w), "entries");
  }
  entries_[w] = Entry{value, standard_error};
}

std::optional<Complex> MomentTable::standard_error(const Word& w) const {
  auto it = entries_.find(w);
  return it == entries_.end() ? std::nullopt : it->second.standard_error;
}

Complex MomentTable::lookup(const Word& w) const {
  auto it = entries_.find(w);
  if (it == entries_.end()) {
    throw Error(ErrorCode::kInvalidState, "missing moment for word " + word_label(w), "entries");
  }
  return it->second.value;
}

// ---------------------------------------------------------------------------
// CumulantSpec

CumulantSpec::CumulantSpec(std::size_t nvars, std::size_t max_order) : nvars_(nvars), max_order_(max_order) {
  if (nvars == 0) throw Error(ErrorCode::kOther, "cumulant spec needs at least one variable", "nvars");
  if (max_order == 0 || max_order > kMaxPartitionOrder) {
    throw Error(ErrorCode::kOther, "cumulant max_order must lie in 1..16", "max_order");
  }
}

CumulantSpec CumulantSpec::semicircular(std::size_t nvars, std::size_t max_order) {
  CumulantSpec spec(nvars, max_order);
  for (std::size_t i = 0; i < nvars; ++i) spec.set(Word{static_cast<Letter>(i), static_cast<Letter>(i)}, 1.0);
  return spec;
}

CumulantSpec CumulantSpec::centered_free_poisson(std::size_t nvars, std::size_t max_order) {
  CumulantSpec spec(nvars, max_order);
  for (std::size_t i = 0; i < nvars; ++i) {
    for (std::size_t m = 2; m <= max_order; ++m) {
      spec.set(Word(std::vector<Letter>(m, static_cast<Letter>(i))), 1.0);
    }
  }
  return spec;
}

Complex CumulantSpec::kappa(const Word& w) const {
  auto it = kappa_.find(w);
  return it == kappa_.end() ? Complex{} : it->second;
}

void CumulantSpec::set(const Word& w, Complex value) {
  if (w.empty() || w.size() > max_order_) {
    throw Error(ErrorCode::kOther, "cumulant word " + word_label(w) + " has invalid length", "kappa");
  }
  if (w.min_nvars() > nvars_) throw Error(ErrorCode::kOther, "cumulant word " + word_label(w) + " uses an unknown letter", "kappa");
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
    throw Error(ErrorCode::kInvalidState, "non-finite cumulant for word " + word_label(w), "kappa");
  }
  if (value == Complex{}) {
    kappa_.erase(w);
  } else {
    kappa_[w] = value;
  }
}

bool CumulantSpec::cyclically_invariant(double tol) const {
  for (const auto& [w, v] : kappa_) {
    for (std::size_t s = 1; s < w.size(); ++s) {
      if (std::abs(kappa(w.rotated(s)) - v) > tol) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// CumulantState

CumulantState::CumulantState(CumulantSpec spec, std::optional<std::size_t> moment_order)
    : MomentFunctional(spec.nvars(), moment_order.value_or(spec.max_order()), spec.cyclically_invariant()),
      spec_(std::move(spec)) {
  if (max_order() > kMaxPartitionOrder) {
    throw Error(ErrorCode::kBudgetExceeded, "cumulant engine supports words up to length 16", "max_order");
  }
}

std::optional<std::vector<double>> CumulantState::norm_upper_estimates() const {
  std::vector<double> out(nvars(), 0.0);
  for (const auto& [w, v] : spec_.values()) {
    const Letter first = w[0];
    if (std::any_of(w.begin(), w.end(), [&](Letter l) { return l != first; })) continue;
    const double r = std::pow(std::abs(v), 1.0 / static_cast<double>(w.size()));
    out[first] = std::max(out[first], 4.0 * r);
  }
  return out;
}

Complex CumulantState::lookup(const Word& w) const {
  {
    std::shared_lock lock(cache_mutex_);
    if (auto it = cache_.find(w); it != cache_.end()) return it->second;
  }
  const Complex value = compute(w);
  std::unique_lock lock(cache_mutex_);
  cache_.emplace(w, value);
  return value;
}

Complex CumulantState::compute(const Word& w) const {
  const std::size_t m = w.size();
  if (m == 0) return 1.0;
  const std::size_t max_block = std::min(m, spec_.max_order());
  Complex total{};
  std::vector<std::size_t> positions;
  std::vector<Letter> block;
  // Subsets of {1..m-1}; together with position 0 they form the first block.
  const std::uint32_t limit = 1u << (m - 1);
  for (std::uint32_t mask = 0; mask < limit; ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) + 1 > max_block) continue;
    positions.assign(1, 0);
    block.assign(1, w[0]);
    for (std::size_t k = 1; k < m; ++k) {
      if (mask & (1u << (k - 1))) {
        positions.push_back(k);
        block.push_back(w[k]);
      }
    }
    Complex term = spec_.kappa(Word(block));
    if (term == Complex{}) continue;
    positions.push_back(m);
    for (std::size_t b = 0; b + 1 < positions.size() && term != Complex{}; ++b) {
      if (positions[b + 1] > positions[b] + 1) term *= moment(w.slice(positions[b] + 1, positions[b + 1]));
    }
    total += term;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Noncrossing partitions

namespace {

// Open blocks form a stack; joining an open block closes every block opened after it.
void nc_recurse(std::size_t k, std::size_t m, Partition& labels, std::vector<std::uint8_t>& open,
                std::uint8_t next_label, const std::function<void(const Partition&)>& visit) {
  if (k == m) {
    visit(labels);
    return;
  }
  labels[k] = next_label;
  open.push_back(next_label);
  nc_recurse(k + 1, m, labels, open, static_cast<std::uint8_t>(next_label + 1), visit);
  open.pop_back();
  for (std::size_t p = open.size(); p-- > 0;) {
    std::vector<std::uint8_t> saved(open.begin() + static_cast<std::ptrdiff_t>(p) + 1, open.end());
    open.resize(p + 1);
    labels[k] = open[p];
    nc_recurse(k + 1, m, labels, open, next_label, visit);
    open.insert(open.end(), saved.begin(), saved.end());
  }
}

}  // namespace

void for_each_nc_partition(std::size_t m, const std::function<void(const Partition&)>& visit) {
  if (m < 1 || m > kMaxPartitionOrder) throw Error(ErrorCode::kOther, "partition order must lie in 1..16", "m");
  Partition labels(m, 0);
  std::vector<std::uint8_t> open;
  nc_recurse(0, m, labels, open, 0, visit);
}

std::vector<Partition> nc_partitions(std::size_t m) {
  std::vector<Partition> out;
  out.reserve(catalan(m));
  for_each_nc_partition(m, [&](const Partition& p) { out.push_back(p); });
  return out;
}

std::uint64_t catalan(std::size_t m) {
  std::uint64_t c = 1;
  for (std::size_t k = 0; k < m; ++k) c = c * 2 * (2 * k + 1) / (k + 2);
  return c;
}

Complex cumulants_to_moment(const CumulantSpec& spec, const Word& w) {
  if (w.size() > kMaxPartitionOrder) {
    throw Error(ErrorCode::kBudgetExceeded, "word longer than the partition-order limit 16", "word");
  }
  CumulantState state(spec, std::max<std::size_t>(w.size(), 1));
  return state.moment(w);
}

CumulantSpec moments_to_cumulants(const MomentFunctional& table, std::size_t max_order) {
  table.require_order(max_order, "cumulant extraction");
  CumulantSpec spec(table.nvars(), max_order);
  std::vector<Letter> block;
  std::vector<std::size_t> positions;
  for (std::size_t m = 1; m <= max_order; ++m) {
    for (const Word& w : words_of_length(table.nvars(), m)) {
      Complex rest{};
      const std::uint32_t full = (1u << (m - 1)) - 1;
      for (std::uint32_t mask = 0; mask < full; ++mask) {
        positions.assign(1, 0);
        block.assign(1, w[0]);
        for (std::size_t k = 1; k < m; ++k) {
          if (mask & (1u << (k - 1))) {
            positions.push_back(k);
            block.push_back(w[k]);
          }
        }
        Complex term = spec.kappa(Word(block));
        if (term == Complex{}) continue;
        positions.push_back(m);
        for (std::size_t b = 0; b + 1 < positions.size(); ++b) {
          if (positions[b + 1] > positions[b] + 1) term *= table.moment(w.slice(positions[b] + 1, positions[b + 1]));
        }
        rest += term;
      }
      spec.set(w, table.moment(w) - rest);
    }
  }
  return spec;
}

// ---------------------------------------------------------------------------
// Pairings

Complex moment_of_poly(const MomentFunctional& phi, const NcPoly& p) {
  phi.require_order(p.degree(), "moment_of_poly");
  Complex total{};
  for (const auto& [w, c] : p.terms()) total += c.to_complex() * phi.moment(w);
  return total;
}

Complex tensor_moment(const MomentFunctional& phi, const TensorPoly& q) {
  phi.require_order(std::max(max_leg(q, true), max_leg(q, false)), "tensor_moment");
  Complex total{};
  for (const auto& [k, c] : q.terms()) total += c.to_complex() * phi.moment(k.first) * phi.moment(k.second);
  return total;
}

Complex inner_tuple(const MomentFunctional& phi, const PolyTuple& p, const PolyTuple& r) {
  if (p.size() != r.size()) throw Error(ErrorCode::kOther, "tuple sizes differ", "tuple");
  phi.require_order(p.degree() + r.degree(), "inner_tuple");
  Complex total{};
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (const auto& [wp, cp] : p[i].terms()) {
      for (const auto& [wr, cr] : r[i].terms()) {
        total += cp.to_complex() * std::conj(cr.to_complex()) * phi.moment(wp * wr.reversed());
      }
    }
  }
  return total;
}

Complex tensor_inner(const MomentFunctional& phi, const TensorPoly& a, const TensorPoly& b) {
  phi.require_order(std::max(max_leg(a, true) + max_leg(b, true), max_leg(a, false) + max_leg(b, false)),
                    "tensor pairing");
  Complex total{};
  for (const auto& [ka, ca] : a.terms()) {
    for (const auto& [kb, cb] : b.terms()) {
      // (a1 (x) a2) # (b1* (x) b2*) = a1 b1* (x) b2* a2
      total += ca.to_complex() * std::conj(cb.to_complex()) * phi.moment(ka.first * kb.first.reversed()) *
               phi.moment(kb.second.reversed() * ka.second);
    }
  }
  return total;
}

Complex inner_matrix(const MomentFunctional& phi, const KernelMatrix& a, const KernelMatrix& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::kOther, "matrix sizes differ", "matrix");
  Complex total{};
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (std::size_t j = 0; j < a.dim(); ++j) total += tensor_inner(phi, a(i, j), b(i, j));
  }
  return total;
}

Complex inner_matrix_symbolic(const MomentFunctional& phi, const KernelMatrix& a, const KernelMatrix& b) {
  return tensor_moment(phi, trace(sharp(a, matrix_adjoint(b))));
}

// ---------------------------------------------------------------------------
// Validation

StateCheck check_state(const MomentFunctional& phi, double psd_tol, double sym_tol) {
  StateCheck check;
  const std::size_t n = phi.nvars();
  const auto sym_bad = [&](Complex a, Complex b) { return std::abs(a - b) > sym_tol * (1.0 + std::abs(a)); };

  if (std::abs(phi.moment(Word::unit()) - 1.0) > sym_tol) check.violations.push_back("unit: phi(1) != 1");

  try {
    for (const Word& w : words_up_to(n, phi.max_order())) {
      const Complex m = phi.moment(w);
      if (sym_bad(phi.moment(w.reversed()), std::conj(m))) {
        check.violations.push_back("hermitian: phi(reverse w) != conj phi(w) at w = " + word_label(w));
        break;
      }
    }
    if (phi.tracial()) {
      bool done = false;
      for (const Word& w : words_up_to(n, phi.max_order())) {
        for (std::size_t s = 1; s < w.size() && !done; ++s) {
          if (sym_bad(phi.moment(w.rotated(s)), phi.moment(w))) {
            check.violations.push_back("tracial: phi not invariant under rotation at w = " + word_label(w));
            done = true;
          }
        }
        if (done) break;
      }
    }

    // Gram positivity on the largest half-length family of manageable size.
    std::size_t half = phi.max_order() / 2;
    while (half > 0 && words_up_to(n, half).size() > 400) --half;
    const auto family = words_up_to(n, half);
    check.gram_words = family.size();
    Eigen::MatrixXcd gram(family.size(), family.size());
    for (std::size_t a = 0; a < family.size(); ++a) {
      for (std::size_t b = 0; b < family.size(); ++b) gram(a, b) = phi.moment(family[a] * family[b].reversed());
    }
    const Eigen::MatrixXcd herm = 0.5 * (gram + gram.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(herm, Eigen::EigenvaluesOnly);
    check.min_gram_eigenvalue = eig.eigenvalues().minCoeff();
    const double scale = std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
    if (check.min_gram_eigenvalue < -psd_tol * scale) {
      check.violations.push_back("positivity: moment Gram matrix has eigenvalue " +
                                 std::to_string(check.min_gram_eigenvalue));
    }
  } catch (const Error& e) {
    check.violations.push_back(std::string("moments unavailable: ") + e.what());
  }
  return check;
}

void require_valid_state(const MomentFunctional& phi, double psd_tol, double sym_tol) {
  const StateCheck check = check_state(phi, psd_tol, sym_tol);
  if (check.ok()) return;
  std::string msg = "invalid state:";
  for (const auto& v : check.violations) msg += " " + v + ";";
  throw Error(ErrorCode::kInvalidState, msg, "state");
}

NormEstimate operator_norm_estimate(const MomentFunctional& phi, std::size_t i, std::size_t order) {
  if (order == 0 || order % 2 != 0) throw Error(ErrorCode::kOther, "norm order must be even and positive", "order");
  if (i >= phi.nvars()) throw Error(ErrorCode::kOther, "coordinate out of range", "index");
  phi.require_order(order, "operator_norm_estimate");
  const Complex m = phi.moment(Word(std::vector<Letter>(order, static_cast<Letter>(i))));
  if (m.real() < -1e-12) {
    throw Error(ErrorCode::kInvalidState, "negative even moment: the functional is not a state", "moments");
  }
  NormEstimate est;
  est.lower = std::pow(std::max(m.real(), 0.0), 1.0 / static_cast<double>(order));
  if (auto upper = phi.norm_upper_estimates()) est.upper = upper->at(i);
  return est;
}

}  // namespace freestein
