#include "freestein/ncalg.hpp"

#include <stdexcept>

#include "freestein/errors.hpp"

namespace freestein {
namespace {

void require_same(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error(ErrorCode::kOther, "mismatched nvars: " + std::to_string(a) + " vs " + std::to_string(b), "nvars");
  }
}

void require_index(std::size_t i, std::size_t nvars) {
  if (i >= nvars) {
    throw Error(ErrorCode::kOther,
                "generator index " + std::to_string(i + 1) + " out of range 1.." + std::to_string(nvars), "index");
  }
}

template <class Map, class Key>
void accumulate(Map& terms, const Key& key, const Coeff& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = terms.try_emplace(key, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms.erase(it);
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// NcPoly

NcPoly::NcPoly(std::size_t nvars) : nvars_(nvars) {
  if (nvars == 0) throw Error(ErrorCode::kOther, "polynomials need at least one generator", "nvars");
}

NcPoly::NcPoly(std::size_t nvars, const Word& w, Coeff c) : NcPoly(nvars) {
  if (w.min_nvars() > nvars) throw Error(ErrorCode::kOther, "word uses a letter beyond nvars", "word");
  accumulate(terms_, w, c);
}

NcPoly NcPoly::variable(std::size_t nvars, std::size_t i) {
  require_index(i, nvars);
  return NcPoly(nvars, Word::letter(i));
}

NcPoly NcPoly::quadratic_potential(std::size_t nvars) {
  NcPoly v(nvars);
  for (std::size_t i = 0; i < nvars; ++i) {
    v.add_term(Word{static_cast<Letter>(i), static_cast<Letter>(i)}, Coeff::ratio(1, 2));
  }
  return v;
}

std::size_t NcPoly::degree() const { return terms_.empty() ? 0 : terms_.rbegin()->first.size(); }

Coeff NcPoly::coeff(const Word& w) const {
  auto it = terms_.find(w);
  return it == terms_.end() ? Coeff() : it->second;
}

void NcPoly::add_term(const Word& w, const Coeff& c) {
  if (w.min_nvars() > nvars_) throw Error(ErrorCode::kOther, "word uses a letter beyond nvars", "word");
  accumulate(terms_, w, c);
}

NcPoly& NcPoly::operator+=(const NcPoly& o) {
  require_same(nvars_, o.nvars_);
  for (const auto& [w, c] : o.terms_) accumulate(terms_, w, c);
  return *this;
}

NcPoly& NcPoly::operator-=(const NcPoly& o) {
  require_same(nvars_, o.nvars_);
  for (const auto& [w, c] : o.terms_) accumulate(terms_, w, -c);
  return *this;
}

NcPoly& NcPoly::operator*=(const Coeff& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [w, v] : terms_) v *= c;
  return *this;
}

NcPoly operator*(const NcPoly& a, const NcPoly& b) {
  require_same(a.nvars_, b.nvars_);
  NcPoly out(a.nvars_);
  for (const auto& [wa, ca] : a.terms_) {
    for (const auto& [wb, cb] : b.terms_) accumulate(out.terms_, wa * wb, ca * cb);
  }
  return out;
}

std::string NcPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& [w, c] : terms_) {
    if (!out.empty()) out += " + ";
    out += c.to_string();
    if (!w.empty()) out += "*" + w.to_string();
  }
  return out;
}

// ---------------------------------------------------------------------------
// TensorPoly

TensorPoly::TensorPoly(std::size_t nvars) : nvars_(nvars) {
  if (nvars == 0) throw Error(ErrorCode::kOther, "polynomials need at least one generator", "nvars");
}

TensorPoly TensorPoly::simple(const NcPoly& p, const NcPoly& q) {
  require_same(p.nvars(), q.nvars());
  TensorPoly out(p.nvars());
  for (const auto& [wp, cp] : p.terms()) {
    for (const auto& [wq, cq] : q.terms()) accumulate(out.terms_, Key{wp, wq}, cp * cq);
  }
  return out;
}

TensorPoly TensorPoly::unit(std::size_t nvars) {
  TensorPoly out(nvars);
  out.add_term(Word::unit(), Word::unit(), 1);
  return out;
}

Coeff TensorPoly::coeff(const Word& left, const Word& right) const {
  auto it = terms_.find(Key{left, right});
  return it == terms_.end() ? Coeff() : it->second;
}

void TensorPoly::add_term(const Word& left, const Word& right, const Coeff& c) {
  if (left.min_nvars() > nvars_ || right.min_nvars() > nvars_) {
    throw Error(ErrorCode::kOther, "word uses a letter beyond nvars", "word");
  }
  accumulate(terms_, Key{left, right}, c);
}

TensorPoly& TensorPoly::operator+=(const TensorPoly& o) {
  require_same(nvars_, o.nvars_);
  for (const auto& [k, c] : o.terms_) accumulate(terms_, k, c);
  return *this;
}

TensorPoly& TensorPoly::operator-=(const TensorPoly& o) {
  require_same(nvars_, o.nvars_);
  for (const auto& [k, c] : o.terms_) accumulate(terms_, k, -c);
  return *this;
}

TensorPoly& TensorPoly::operator*=(const Coeff& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [k, v] : terms_) v *= c;
  return *this;
}

std::string TensorPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& [k, c] : terms_) {
    if (!out.empty()) out += " + ";
    out += c.to_string() + "*(" + k.first.to_string() + " ⊗ " + k.second.to_string() + ")";
  }
  return out;
}

TensorPoly left_act(const NcPoly& p, const TensorPoly& t) {
  require_same(p.nvars(), t.nvars());
  TensorPoly out(t.nvars());
  for (const auto& [wp, cp] : p.terms()) {
    for (const auto& [k, c] : t.terms()) out.add_term(wp * k.first, k.second, cp * c);
  }
  return out;
}

TensorPoly right_act(const TensorPoly& t, const NcPoly& r) {
  require_same(r.nvars(), t.nvars());
  TensorPoly out(t.nvars());
  for (const auto& [k, c] : t.terms()) {
    for (const auto& [wr, cr] : r.terms()) out.add_term(k.first, k.second * wr, c * cr);
  }
  return out;
}

// ---------------------------------------------------------------------------
// PolyTuple / KernelMatrix

PolyTuple::PolyTuple(std::vector<NcPoly> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw Error(ErrorCode::kOther, "empty polynomial tuple", "entries");
  for (const auto& e : entries_) require_same(e.nvars(), entries_.front().nvars());
  if (entries_.size() != entries_.front().nvars()) {
    throw Error(ErrorCode::kOther, "tuple length must equal nvars", "entries");
  }
}

PolyTuple PolyTuple::zero(std::size_t nvars) { return PolyTuple(std::vector<NcPoly>(nvars, NcPoly(nvars))); }

PolyTuple PolyTuple::coordinates(std::size_t nvars) {
  std::vector<NcPoly> e;
  for (std::size_t i = 0; i < nvars; ++i) e.push_back(NcPoly::variable(nvars, i));
  return PolyTuple(std::move(e));
}

std::size_t PolyTuple::degree() const {
  std::size_t d = 0;
  for (const auto& e : entries_) d = std::max(d, e.degree());
  return d;
}

KernelMatrix::KernelMatrix(std::size_t nvars) : nvars_(nvars), entries_(nvars * nvars, TensorPoly(nvars)) {}

KernelMatrix KernelMatrix::identity(std::size_t nvars) {
  KernelMatrix out(nvars);
  for (std::size_t i = 0; i < nvars; ++i) out(i, i) = TensorPoly::unit(nvars);
  return out;
}

KernelMatrix& KernelMatrix::operator+=(const KernelMatrix& o) {
  require_same(nvars_, o.nvars_);
  for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] += o.entries_[k];
  return *this;
}

KernelMatrix& KernelMatrix::operator-=(const KernelMatrix& o) {
  require_same(nvars_, o.nvars_);
  for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] -= o.entries_[k];
  return *this;
}

KernelMatrix& KernelMatrix::operator*=(const Coeff& c) {
  for (auto& e : entries_) e *= c;
  return *this;
}

// ---------------------------------------------------------------------------
// Operations

NcPoly involution(const NcPoly& p) {
  NcPoly out(p.nvars());
  for (const auto& [w, c] : p.terms()) out.add_term(w.reversed(), c.conj());
  return out;
}

TensorPoly tensor_involution(const TensorPoly& q) {
  TensorPoly out(q.nvars());
  for (const auto& [k, c] : q.terms()) out.add_term(k.first.reversed(), k.second.reversed(), c.conj());
  return out;
}

KernelMatrix matrix_adjoint(const KernelMatrix& a) {
  KernelMatrix out(a.nvars());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (std::size_t j = 0; j < a.dim(); ++j) out(i, j) = tensor_involution(a(j, i));
  }
  return out;
}

TensorPoly sharp(const TensorPoly& a, const TensorPoly& b) {
  require_same(a.nvars(), b.nvars());
  TensorPoly out(a.nvars());
  for (const auto& [ka, ca] : a.terms()) {
    for (const auto& [kb, cb] : b.terms()) out.add_term(ka.first * kb.first, kb.second * ka.second, ca * cb);
  }
  return out;
}

KernelMatrix sharp(const KernelMatrix& a, const KernelMatrix& b) {
  require_same(a.nvars(), b.nvars());
  const std::size_t n = a.dim();
  KernelMatrix out(a.nvars());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) out(i, j) += sharp(a(i, k), b(k, j));
    }
  }
  return out;
}

TensorPoly trace(const KernelMatrix& a) {
  TensorPoly out(a.nvars());
  for (std::size_t i = 0; i < a.dim(); ++i) out += a(i, i);
  return out;
}

NcPoly multiply(const TensorPoly& q) {
  NcPoly out(q.nvars());
  for (const auto& [k, c] : q.terms()) out.add_term(k.first * k.second, c);
  return out;
}

TensorPoly flip(const TensorPoly& q) {
  TensorPoly out(q.nvars());
  for (const auto& [k, c] : q.terms()) out.add_term(k.second, k.first, c);
  return out;
}

TensorPoly partial(std::size_t i, const NcPoly& p) {
  require_index(i, p.nvars());
  TensorPoly out(p.nvars());
  for (const auto& [w, c] : p.terms()) {
    for (std::size_t k = 0; k < w.size(); ++k) {
      if (w[k] == i) out.add_term(w.slice(0, k), w.slice(k + 1, w.size()), c);
    }
  }
  return out;
}

TensorPoly delta(const NcPoly& p) {
  const NcPoly one = NcPoly::constant(p.nvars(), 1);
  return TensorPoly::simple(p, one) - TensorPoly::simple(one, p);
}

NcPoly cyclic_derivative(std::size_t i, const NcPoly& p) { return multiply(flip(partial(i, p))); }

PolyTuple cyclic_gradient(const NcPoly& v) {
  std::vector<NcPoly> e;
  for (std::size_t i = 0; i < v.nvars(); ++i) e.push_back(cyclic_derivative(i, v));
  return PolyTuple(std::move(e));
}

KernelMatrix jacobian(const PolyTuple& p) {
  const std::size_t n = p.nvars();
  KernelMatrix out(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out(i, j) = partial(j, p[i]);
  }
  return out;
}

KernelMatrix explicit_kernel(const NcPoly& v) {
  const std::size_t n = v.nvars();
  KernelMatrix out(n);
  const Coeff half = Coeff::ratio(1, 2);
  for (std::size_t i = 0; i < n; ++i) {
    const TensorPoly left = delta(cyclic_derivative(i, v));
    for (std::size_t j = 0; j < n; ++j) {
      out(i, j) = sharp(left, delta(NcPoly::variable(n, j))) * half;
    }
  }
  return out;
}

}  // namespace freestein
