#pragma once

// Moment functionals (noncommutative distributions) and the pairings that reduce
// every evaluation to word moments.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "freestein/ncalg.hpp"
#include "freestein/word.hpp"

namespace freestein {

using Complex = std::complex<double>;

/// Largest word length the cumulant engine and nc_partitions accept.
inline constexpr std::size_t kMaxPartitionOrder = 16;

/// A state phi on C<t_1..t_n>, known through its word moments up to `max_order`.
class MomentFunctional {
 public:
  MomentFunctional(std::size_t nvars, std::size_t max_order, bool tracial);
  virtual ~MomentFunctional() = default;
  MomentFunctional(const MomentFunctional&) = delete;
  MomentFunctional& operator=(const MomentFunctional&) = delete;

  std::size_t nvars() const { return nvars_; }
  std::size_t max_order() const { return max_order_; }
  bool tracial() const { return tracial_; }
  virtual std::string backend() const = 0;

  /// phi(w). Throws kBudgetExceeded past max_order.
  Complex moment(const Word& w) const;

  /// Throws kBudgetExceeded unless words of length `order` are available.
  void require_order(std::size_t order, const std::string& what) const;

  /// Upper estimates of ||x_i||, one per coordinate, when the backend can certify them.
  virtual std::optional<std::vector<double>> norm_upper_estimates() const { return std::nullopt; }

 protected:
  virtual Complex lookup(const Word& w) const = 0;

 private:
  std::size_t nvars_;
  std::size_t max_order_;
  bool tracial_;
};

/// Explicit word -> moment table.
class MomentTable final : public MomentFunctional {
 public:
  struct Entry {
    Complex value;
    std::optional<Complex> standard_error;  // re/im parts hold the per-part standard errors
  };

  /// The unit word is preset to 1.
  MomentTable(std::size_t nvars, std::size_t max_order, bool tracial);

  /// Materializes every word of length <= max_order from another functional.
  static std::shared_ptr<MomentTable> from_functional(const MomentFunctional& phi, std::size_t max_order);

  std::string backend() const override { return "table"; }

  void set(const Word& w, Complex value, std::optional<Complex> standard_error = std::nullopt);
  bool contains(const Word& w) const { return entries_.count(w) != 0; }
  const std::unordered_map<Word, Entry, WordHash>& entries() const { return entries_; }
  std::optional<Complex> standard_error(const Word& w) const;

  void set_norm_upper_estimates(std::vector<double> norms) { norm_upper_ = std::move(norms); }
  std::optional<std::vector<double>> norm_upper_estimates() const override { return norm_upper_; }

 protected:
  Complex lookup(const Word& w) const override;

 private:
  std::unordered_map<Word, Entry, WordHash> entries_;
  std::optional<std::vector<double>> norm_upper_;
};

/// Multilinear free cumulants kappa(i_1..i_m), m >= 1. Absent words are zero.
class CumulantSpec {
 public:
  CumulantSpec(std::size_t nvars, std::size_t max_order);

  /// kappa(i,i) = 1, everything else 0: n free standard semicircular variables.
  static CumulantSpec semicircular(std::size_t nvars, std::size_t max_order);
  /// n free copies of the centered free Poisson law: kappa_1 = 0, kappa_m(i..i) = 1 for 2 <= m <= max_order.
  static CumulantSpec centered_free_poisson(std::size_t nvars, std::size_t max_order);

  std::size_t nvars() const { return nvars_; }
  std::size_t max_order() const { return max_order_; }
  Complex kappa(const Word& w) const;
  void set(const Word& w, Complex value);
  const std::unordered_map<Word, Complex, WordHash>& values() const { return kappa_; }
  /// kappa invariant under cyclic rotation of every stored word.
  bool cyclically_invariant(double tol = 1e-12) const;

 private:
  std::size_t nvars_;
  std::size_t max_order_;
  std::unordered_map<Word, Complex, WordHash> kappa_;
};

/// Moment functional induced by free cumulants through the noncrossing moment-cumulant formula.
///
/// Moments are computed with the first-block recursion: the block containing the first
/// position splits the remaining positions into intervals, each contributing the moment of
/// its contiguous subword. Results are memoized per word; concurrent readers are safe.
class CumulantState final : public MomentFunctional {
 public:
  /// `moment_order` defaults to the spec's cumulant order.
  explicit CumulantState(CumulantSpec spec, std::optional<std::size_t> moment_order = std::nullopt);

  std::string backend() const override { return "cumulant"; }
  const CumulantSpec& spec() const { return spec_; }

  /// ||x_i|| <= 4 R_i where R_i = max |kappa(i^m)|^(1/m) over stored single-letter cumulants.
  std::optional<std::vector<double>> norm_upper_estimates() const override;

 protected:
  Complex lookup(const Word& w) const override;

 private:
  Complex compute(const Word& w) const;

  CumulantSpec spec_;
  mutable std::shared_mutex cache_mutex_;
  mutable std::unordered_map<Word, Complex, WordHash> cache_;
};

// ---------------------------------------------------------------------------
// Noncrossing partitions and the moment-cumulant calculus.

/// A set partition of {0..m-1} as block labels in order of first appearance.
using Partition = std::vector<std::uint8_t>;

/// Calls `visit` once per noncrossing partition of {0..m-1}. 1 <= m <= 16.
void for_each_nc_partition(std::size_t m, const std::function<void(const Partition&)>& visit);
/// Materialized list; sized C_m, so keep m moderate.
std::vector<Partition> nc_partitions(std::size_t m);
/// Catalan number C_m.
std::uint64_t catalan(std::size_t m);

/// sum over NC(|w|) of products of block cumulants.
Complex cumulants_to_moment(const CumulantSpec& spec, const Word& w);
/// Inverts the moment-cumulant relation for every word of length 1..max_order.
CumulantSpec moments_to_cumulants(const MomentFunctional& table, std::size_t max_order);

// ---------------------------------------------------------------------------
// Pairings. All are linear in the first argument and conjugate-linear in the second.

Complex moment_of_poly(const MomentFunctional& phi, const NcPoly& p);
/// (phi (x) phi)(q).
Complex tensor_moment(const MomentFunctional& phi, const TensorPoly& q);
/// sum_i phi(p_i r_i^*).
Complex inner_tuple(const MomentFunctional& phi, const PolyTuple& p, const PolyTuple& r);
/// (phi (x) phi^op)(a # b^*), evaluated term by term.
Complex tensor_inner(const MomentFunctional& phi, const TensorPoly& a, const TensorPoly& b);
/// (phi (x) phi^op) o Tr(A B^*), evaluated term by term.
Complex inner_matrix(const MomentFunctional& phi, const KernelMatrix& a, const KernelMatrix& b);
/// Same pairing routed through the symbolic product: tensor_moment(trace(sharp(a, matrix_adjoint(b)))).
Complex inner_matrix_symbolic(const MomentFunctional& phi, const KernelMatrix& a, const KernelMatrix& b);

// ---------------------------------------------------------------------------
// Validation and norms.

struct StateCheck {
  std::vector<std::string> violations;
  double min_gram_eigenvalue = 0.0;
  std::size_t gram_words = 0;
  bool ok() const { return violations.empty(); }
};

/// Unit, Hermitian symmetry, Gram positivity and (if flagged) traciality.
StateCheck check_state(const MomentFunctional& phi, double psd_tol = 1e-8, double sym_tol = 1e-9);
/// Throws kInvalidState listing the violated invariants.
void require_valid_state(const MomentFunctional& phi, double psd_tol = 1e-8, double sym_tol = 1e-9);

struct NormEstimate {
  double lower = 0.0;                  // phi(x_i^order)^(1/order)
  std::optional<double> upper;         // backend-certified, when available
};

/// `order` must be even and positive.
NormEstimate operator_norm_estimate(const MomentFunctional& phi, std::size_t i, std::size_t order);

}  // namespace freestein
