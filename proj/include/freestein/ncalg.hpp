#pragma once

// Exact algebra of noncommutative polynomials C<t_1..t_n>, the tensor square P (x) P,
// and the derivations between them.

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "freestein/coeff.hpp"
#include "freestein/word.hpp"

namespace freestein {

/// Noncommutative polynomial in `nvars` self-adjoint indeterminates. Zero coefficients are never stored.
class NcPoly {
 public:
  using Terms = std::map<Word, Coeff>;

  /// Throws if nvars == 0.
  explicit NcPoly(std::size_t nvars);
  NcPoly(std::size_t nvars, const Word& w, Coeff c = 1);

  static NcPoly constant(std::size_t nvars, Coeff c) { return NcPoly(nvars, Word::unit(), std::move(c)); }
  static NcPoly variable(std::size_t nvars, std::size_t i);
  /// 1/2 * sum_i t_i^2.
  static NcPoly quadratic_potential(std::size_t nvars);

  std::size_t nvars() const { return nvars_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  /// Degree of the longest word; 0 for constants and for the zero polynomial.
  std::size_t degree() const;
  Coeff coeff(const Word& w) const;

  /// Adds c * w, dropping the entry if it cancels.
  void add_term(const Word& w, const Coeff& c);

  NcPoly& operator+=(const NcPoly& o);
  NcPoly& operator-=(const NcPoly& o);
  NcPoly& operator*=(const Coeff& c);
  friend NcPoly operator+(NcPoly a, const NcPoly& b) { return a += b; }
  friend NcPoly operator-(NcPoly a, const NcPoly& b) { return a -= b; }
  friend NcPoly operator-(NcPoly a) { return a *= Coeff(-1); }
  friend NcPoly operator*(NcPoly a, const Coeff& c) { return a *= c; }
  friend NcPoly operator*(const Coeff& c, NcPoly a) { return a *= c; }
  /// Concatenation product extended bilinearly.
  friend NcPoly operator*(const NcPoly& a, const NcPoly& b);
  friend bool operator==(const NcPoly& a, const NcPoly& b) { return a.nvars_ == b.nvars_ && a.terms_ == b.terms_; }

  std::string to_string() const;

 private:
  std::size_t nvars_;
  Terms terms_;
};

/// Element of the algebraic tensor product P (x) P.
class TensorPoly {
 public:
  using Key = std::pair<Word, Word>;
  using Terms = std::map<Key, Coeff>;

  explicit TensorPoly(std::size_t nvars);
  /// p (x) q.
  static TensorPoly simple(const NcPoly& p, const NcPoly& q);
  /// 1 (x) 1.
  static TensorPoly unit(std::size_t nvars);

  std::size_t nvars() const { return nvars_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  Coeff coeff(const Word& left, const Word& right) const;
  void add_term(const Word& left, const Word& right, const Coeff& c);

  TensorPoly& operator+=(const TensorPoly& o);
  TensorPoly& operator-=(const TensorPoly& o);
  TensorPoly& operator*=(const Coeff& c);
  friend TensorPoly operator+(TensorPoly a, const TensorPoly& b) { return a += b; }
  friend TensorPoly operator-(TensorPoly a, const TensorPoly& b) { return a -= b; }
  friend TensorPoly operator*(TensorPoly a, const Coeff& c) { return a *= c; }
  friend TensorPoly operator*(const Coeff& c, TensorPoly a) { return a *= c; }
  friend bool operator==(const TensorPoly& a, const TensorPoly& b) {
    return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
  }

  std::string to_string() const;

 private:
  std::size_t nvars_;
  Terms terms_;
};

/// Bimodule actions: p . (q1 (x) q2) . r = (p q1) (x) (q2 r).
TensorPoly left_act(const NcPoly& p, const TensorPoly& t);
TensorPoly right_act(const TensorPoly& t, const NcPoly& r);

/// Element of P^n.
class PolyTuple {
 public:
  explicit PolyTuple(std::vector<NcPoly> entries);
  static PolyTuple zero(std::size_t nvars);
  /// (t_1, ..., t_n).
  static PolyTuple coordinates(std::size_t nvars);

  std::size_t nvars() const { return entries_.front().nvars(); }
  std::size_t size() const { return entries_.size(); }
  const NcPoly& operator[](std::size_t i) const { return entries_[i]; }
  NcPoly& operator[](std::size_t i) { return entries_[i]; }
  const std::vector<NcPoly>& entries() const { return entries_; }
  std::size_t degree() const;

  friend bool operator==(const PolyTuple&, const PolyTuple&) = default;

 private:
  std::vector<NcPoly> entries_;
};

/// n x n matrix over P (x) P, i.e. an element of M_n(P (x) P).
class KernelMatrix {
 public:
  explicit KernelMatrix(std::size_t nvars);
  /// (1 (x) 1) I_n.
  static KernelMatrix identity(std::size_t nvars);

  std::size_t nvars() const { return nvars_; }
  std::size_t dim() const { return nvars_; }
  const TensorPoly& operator()(std::size_t i, std::size_t j) const { return entries_[i * nvars_ + j]; }
  TensorPoly& operator()(std::size_t i, std::size_t j) { return entries_[i * nvars_ + j]; }

  KernelMatrix& operator+=(const KernelMatrix& o);
  KernelMatrix& operator-=(const KernelMatrix& o);
  KernelMatrix& operator*=(const Coeff& c);
  friend KernelMatrix operator+(KernelMatrix a, const KernelMatrix& b) { return a += b; }
  friend KernelMatrix operator-(KernelMatrix a, const KernelMatrix& b) { return a -= b; }
  friend KernelMatrix operator*(KernelMatrix a, const Coeff& c) { return a *= c; }
  friend bool operator==(const KernelMatrix&, const KernelMatrix&) = default;

 private:
  std::size_t nvars_;
  std::vector<TensorPoly> entries_;
};

// Involutions.
NcPoly involution(const NcPoly& p);
TensorPoly tensor_involution(const TensorPoly& q);
/// Transpose with tensor_involution applied entrywise.
KernelMatrix matrix_adjoint(const KernelMatrix& a);

/// (p1 (x) p2) # (q1 (x) q2) = (p1 q1) (x) (q2 p2).
TensorPoly sharp(const TensorPoly& a, const TensorPoly& b);
/// Matrix product in M_n(P (x) P) with # as entry product.
KernelMatrix sharp(const KernelMatrix& a, const KernelMatrix& b);
/// sum_i a_ii.
TensorPoly trace(const KernelMatrix& a);

/// m: p (x) q -> p q.
NcPoly multiply(const TensorPoly& q);
/// sigma: p (x) q -> q (x) p.
TensorPoly flip(const TensorPoly& q);

/// Noncommutative derivative d_i, i 0-based.
TensorPoly partial(std::size_t i, const NcPoly& p);
/// delta(p) = p (x) 1 - 1 (x) p.
TensorPoly delta(const NcPoly& p);
/// D_i = m o sigma o d_i.
NcPoly cyclic_derivative(std::size_t i, const NcPoly& p);
PolyTuple cyclic_gradient(const NcPoly& v);
/// (J P)_{ij} = d_j P_i.
KernelMatrix jacobian(const PolyTuple& p);

/// A_{ij} = 1/2 delta(D_i V) # delta(t_j).
KernelMatrix explicit_kernel(const NcPoly& v);

}  // namespace freestein
