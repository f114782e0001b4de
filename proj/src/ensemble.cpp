#include "freestein/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>
#include <unordered_map>

#include <Eigen/Dense>

#include "freestein/errors.hpp"

namespace freestein {
namespace {

using Matrix = Eigen::MatrixXcd;

// Hermitian, strictly-upper entries complex Gaussian with E|z|^2 = 1/N, real diagonal variance 1/N.
Matrix sample_gue(std::mt19937_64& rng, std::size_t n) {
  const double var = 1.0 / static_cast<double>(n);
  std::normal_distribution<double> diag(0.0, std::sqrt(var));
  std::normal_distribution<double> off(0.0, std::sqrt(var / 2.0));
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    out(i, i) = diag(rng);
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::complex<double> z(off(rng), off(rng));
      out(i, j) = z;
      out(j, i) = std::conj(z);
    }
  }
  return out;
}

Matrix evaluate(const NcPoly& p, const std::vector<Matrix>& vars, std::size_t n) {
  Matrix out = Matrix::Zero(n, n);
  for (const auto& [w, c] : p.terms()) {
    Matrix term = Matrix::Identity(n, n);
    for (Letter l : w) term = term * vars[l];
    out += c.to_complex() * term;
  }
  return out;
}

std::mt19937_64 sample_stream(std::uint64_t seed, std::size_t sample) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(sample), static_cast<std::uint32_t>(sample >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

GeneratorSpec GeneratorSpec::poly_of_gue(NcPoly p) {
  GeneratorSpec g;
  g.kind = Kind::kPolyOfGue;
  g.fresh_gues = p.nvars();
  g.poly = std::move(p);
  return g;
}

void MatrixEnsembleConfig::validate() const {
  if (matrix_size == 0) throw Error(ErrorCode::kOther, "matrix size N must be >= 1", "N");
  if (samples == 0) throw Error(ErrorCode::kOther, "sample count must be >= 1", "samples");
  if (generators.empty()) throw Error(ErrorCode::kOther, "at least one generator is required", "generators");
  for (const auto& g : generators) {
    if (g.kind != GeneratorSpec::Kind::kPolyOfGue) continue;
    if (!g.poly) throw Error(ErrorCode::kOther, "poly_of_gue generator without polynomial", "generators.poly");
    if (g.poly->nvars() != g.fresh_gues) {
      throw Error(ErrorCode::kOther, "fresh_gues must equal the polynomial's nvars", "generators.fresh_gues");
    }
    if (!(involution(*g.poly) == *g.poly)) {
      throw Error(ErrorCode::kOther, "generator polynomial is not self-adjoint", "generators.poly");
    }
  }
}

std::shared_ptr<MomentTable> mc_moment_table(const MatrixEnsembleConfig& config, std::size_t max_order) {
  config.validate();
  if (max_order == 0) throw Error(ErrorCode::kOther, "max_order must be >= 1", "max_order");
  const std::size_t n = config.nvars();
  const std::size_t dim = config.matrix_size;
  const std::size_t samples = config.samples;

  const std::vector<Word> words = words_up_to(n, max_order);
  const std::size_t half = (max_order + 1) / 2;
  const std::vector<Word> halves = words_up_to(n, half);
  std::unordered_map<Word, std::size_t, WordHash> word_index;
  for (std::size_t k = 0; k < words.size(); ++k) word_index.emplace(words[k], k);

  // Every word splits as u v with |u| = ceil(|w|/2), |v| = floor(|w|/2); both index into `halves`.
  struct Split {
    std::size_t left, right;
  };
  std::vector<Split> splits(words.size());
  for (std::size_t k = 1; k < words.size(); ++k) {
    const Word& w = words[k];
    const std::size_t a = (w.size() + 1) / 2;
    splits[k] = {word_index.at(w.slice(0, a)), word_index.at(w.slice(a, w.size()))};
  }

  std::vector<std::vector<Complex>> traces(samples, std::vector<Complex>(words.size()));
  std::vector<std::vector<double>> norms(samples, std::vector<double>(n, 0.0));

  auto run_sample = [&](std::size_t s) {
    auto rng = sample_stream(config.seed, s);
    std::vector<Matrix> gens;
    gens.reserve(n);
    for (const auto& g : config.generators) {
      if (g.kind == GeneratorSpec::Kind::kGue) {
        gens.push_back(sample_gue(rng, dim));
      } else {
        std::vector<Matrix> fresh;
        for (std::size_t f = 0; f < g.fresh_gues; ++f) fresh.push_back(sample_gue(rng, dim));
        Matrix x = evaluate(*g.poly, fresh, dim);
        gens.push_back(0.5 * (x + x.adjoint()));
      }
    }
    std::vector<Matrix> prod(halves.size());
    for (std::size_t k = 1; k < halves.size(); ++k) {
      const Word& u = halves[k];
      const Letter last = u[u.size() - 1];
      prod[k] = u.size() == 1 ? gens[last] : Matrix(prod[word_index.at(u.slice(0, u.size() - 1))] * gens[last]);
    }
    auto& out = traces[s];
    out[0] = 1.0;
    for (std::size_t k = 1; k < words.size(); ++k) {
      const auto [l, r] = splits[k];
      const Complex tr = r == 0 ? prod[l].trace() : prod[l].cwiseProduct(prod[r].transpose()).sum();
      out[k] = tr / static_cast<double>(dim);
    }
    if (config.compute_norms) {
      for (std::size_t i = 0; i < n; ++i) {
        Eigen::SelfAdjointEigenSolver<Matrix> eig(gens[i], Eigen::EigenvaluesOnly);
        norms[s][i] = eig.eigenvalues().cwiseAbs().maxCoeff();
      }
    }
  };

  std::size_t threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, samples);
  if (threads <= 1) {
    for (std::size_t s = 0; s < samples; ++s) run_sample(s);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t s = t; s < samples; s += threads) run_sample(s);
      });
    }
  }

  // Words fall into classes under rotation and reversal. Each class is averaged once, at its
  // smallest member, so every member gets bit-identical values (conjugated for the reversed orbit).
  auto rotations = [&](const Word& w) {
    std::vector<std::size_t> out;
    for (std::size_t r = 0; r < w.size(); ++r) out.push_back(word_index.at(w.rotated(r)));
    return out;
  };

  auto table = std::make_shared<MomentTable>(n, max_order, /*tracial=*/true);
  const double count = static_cast<double>(samples);
  const double denom = samples > 1 ? (count - 1.0) * count : 1.0;
  std::vector<bool> done(words.size(), false);
  std::vector<Complex> sym(samples);
  for (std::size_t k = 1; k < words.size(); ++k) {
    if (done[k]) continue;
    const std::vector<std::size_t> forward = rotations(words[k]);
    const std::vector<std::size_t> backward = rotations(words[k].reversed());
    const bool self_reverse = std::find(forward.begin(), forward.end(), backward[0]) != forward.end();
    for (std::size_t s = 0; s < samples; ++s) {
      Complex acc{};
      for (std::size_t r = 0; r < forward.size(); ++r) acc += traces[s][forward[r]] + std::conj(traces[s][backward[r]]);
      sym[s] = acc / (2.0 * static_cast<double>(forward.size()));
      if (self_reverse) sym[s].imag(0.0);
    }
    Complex mean{};
    for (const Complex& v : sym) mean += v;
    mean /= count;
    double var_re = 0.0;
    double var_im = 0.0;
    for (const Complex& v : sym) {
      var_re += (v.real() - mean.real()) * (v.real() - mean.real());
      var_im += (v.imag() - mean.imag()) * (v.imag() - mean.imag());
    }
    const Complex se(std::sqrt(var_re / denom), std::sqrt(var_im / denom));
    for (std::size_t idx : forward) {
      table->set(words[idx], mean, se);
      done[idx] = true;
    }
    if (!self_reverse) {
      for (std::size_t idx : backward) {
        table->set(words[idx], std::conj(mean), se);
        done[idx] = true;
      }
    }
  }
  if (config.compute_norms) {
    std::vector<double> upper(n, 0.0);
    for (const auto& row : norms) {
      for (std::size_t i = 0; i < n; ++i) upper[i] = std::max(upper[i], row[i]);
    }
    table->set_norm_upper_estimates(std::move(upper));
  }
  return table;
}

}  // namespace freestein
