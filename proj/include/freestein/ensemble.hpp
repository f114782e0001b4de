#pragma once

// Monte Carlo moment tables from independent GUE matrices and polynomial images of them.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "freestein/ncalg.hpp"
#include "freestein/states.hpp"

namespace freestein {

struct GeneratorSpec {
  enum class Kind { kGue, kPolyOfGue };
  Kind kind = Kind::kGue;
  /// For kPolyOfGue: a self-adjoint polynomial in `fresh_gues` variables, applied to fresh GUE matrices.
  std::optional<NcPoly> poly;
  std::size_t fresh_gues = 0;

  static GeneratorSpec gue() { return {}; }
  static GeneratorSpec poly_of_gue(NcPoly p);
};

struct MatrixEnsembleConfig {
  std::size_t matrix_size = 100;  // N
  std::size_t samples = 100;      // S
  std::uint64_t seed = 0;
  std::vector<GeneratorSpec> generators;  // one per coordinate
  bool compute_norms = true;              // max sampled spectral norm per coordinate
  std::size_t threads = 0;                // 0: hardware concurrency

  std::size_t nvars() const { return generators.size(); }
  /// Throws on N == 0, S == 0, no generators, or a non-self-adjoint generator polynomial.
  void validate() const;
};

/// Averages normalized traces tr_N of every word up to `max_order` over the samples.
///
/// Each sample draws from its own RNG stream derived from (seed, sample index), so the table
/// is bit-identical for a given config regardless of thread count. Per-sample traces are
/// symmetrized over cyclic rotations and reversal before averaging, which makes the table
/// exactly tracial and Hermitian. Standard errors are stored per word.
std::shared_ptr<MomentTable> mc_moment_table(const MatrixEnsembleConfig& config, std::size_t max_order);

}  // namespace freestein
