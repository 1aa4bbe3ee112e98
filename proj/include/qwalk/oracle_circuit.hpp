#pragma once

// Oracle formulation of the search walk.
//
// Registers: walker edge |k,l>, two vertex-label registers (blank or a
// vertex), and a four-level ancilla. The oracle adds f(k,l) modulo 4 to the
// ancilla. Preparing the ancilla in
//     |mu> = 1/2 sum_q e^{-i pi q/2} |q>
// turns the modular addition into a phase e^{i pi f/2} (phase kickback), and
// O^dagger CU_f O leaves every auxiliary register where it started. One walk
// step then costs two oracle calls: one before and one after the scattering.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "qwalk/walk_core.hpp"

namespace qwalk {

// f(k,l) = 1 iff both k and l are marked. Diagonal queries follow the same
// rule; walk paths never issue them.
class OracleFunction {
 public:
  OracleFunction(std::size_t n_vertices, const std::vector<std::size_t>& marked)
      : mask_(n_vertices, false) {
    for (auto v : marked) {
      if (v >= n_vertices) {
        throw std::invalid_argument("OracleFunction: marked vertex out of range");
      }
      mask_[v] = true;
    }
  }
  explicit OracleFunction(const WalkConfig& config)
      : OracleFunction(config.n_vertices(), config.marked()) {}

  std::size_t n_vertices() const { return mask_.size(); }
  int operator()(std::size_t k, std::size_t l) const {
    return (mask_[k] && mask_[l]) ? 1 : 0;
  }

 private:
  std::vector<bool> mask_;
};

struct QueryLedger {
  std::uint64_t quantum_calls = 0;
  std::uint64_t classical_calls = 0;
};

inline constexpr std::size_t kAncillaLevels = 4;

// Ancilla |mu> with exactly representable components (1, -i, -1, i) / 2.
inline const std::array<cplx, kAncillaLevels> kAncillaMu{
    cplx{0.5, 0.0}, cplx{0.0, -0.5}, cplx{-0.5, 0.0}, cplx{0.0, 0.5}};

enum class LabelRegisters { blank, copied };

// Walker plus auxiliary registers in factored form. The vertex-label
// registers are either both blank or hold a copy of the walker's endpoints,
// so they need no amplitudes of their own; the ancilla is stored per edge
// branch, which allows edge/ancilla entanglement.
class CompositeState {
 public:
  static CompositeState lift(const StateVector& walker,
                             const std::array<cplx, kAncillaLevels>& ancilla) {
    CompositeState s(walker.n_vertices());
    for (std::size_t e = 0; e < walker.size(); ++e) {
      for (std::size_t q = 0; q < kAncillaLevels; ++q) {
        s.amplitude(e, q) = walker[e] * ancilla[q];
      }
    }
    return s;
  }

  std::size_t n_vertices() const { return n_vertices_; }
  std::size_t edges() const { return edge_count(n_vertices_); }
  LabelRegisters labels() const { return labels_; }
  void set_labels(LabelRegisters labels) { labels_ = labels; }

  cplx& amplitude(std::size_t edge, std::size_t level) {
    return amplitudes_[edge * kAncillaLevels + level];
  }
  const cplx& amplitude(std::size_t edge, std::size_t level) const {
    return amplitudes_[edge * kAncillaLevels + level];
  }

  double squared_norm() const {
    double s = 0.0;
    for (const auto& a : amplitudes_) s += std::norm(a);
    return s;
  }

 private:
  explicit CompositeState(std::size_t n_vertices)
      : n_vertices_(n_vertices),
        amplitudes_(edge_count(n_vertices) * kAncillaLevels) {}

  std::size_t n_vertices_;
  LabelRegisters labels_ = LabelRegisters::blank;
  std::vector<cplx> amplitudes_;
};

// O: |k,l>|blank>|blank> -> |k,l>|k>|l>.
inline void apply_vertex_copy(CompositeState& state) {
  if (state.labels() != LabelRegisters::blank) {
    throw std::logic_error("vertex copy: label registers are not blank");
  }
  state.set_labels(LabelRegisters::copied);
}

// O^dagger: |k,l>|k>|l> -> |k,l>|blank>|blank>.
inline void apply_vertex_copy_adjoint(CompositeState& state) {
  if (state.labels() != LabelRegisters::copied) {
    throw std::logic_error("vertex uncopy: label registers do not hold endpoints");
  }
  state.set_labels(LabelRegisters::blank);
}

// CU_f: |k>|l>|m> -> |k>|l>|m (+)_4 f(k,l)>.
inline CompositeState apply_oracle(CompositeState state, const OracleFunction& f) {
  if (state.labels() != LabelRegisters::copied) {
    throw std::invalid_argument("apply_oracle: vertex registers are blank");
  }
  const auto n = state.n_vertices();
  for (std::size_t e = 0; e < state.edges(); ++e) {
    const auto [k, l] = edge_endpoints(n, e);
    if (f(k, l) == 0) continue;
    const cplx last = state.amplitude(e, kAncillaLevels - 1);
    for (std::size_t q = kAncillaLevels - 1; q > 0; --q) {
      state.amplitude(e, q) = state.amplitude(e, q - 1);
    }
    state.amplitude(e, 0) = last;
  }
  return state;
}

// Inverse of lift for product states: returns the walker amplitudes, failing
// when the auxiliary registers are not back in |blank>|blank>|ancilla>.
inline StateVector factor_ancilla(const CompositeState& state,
                                  const std::array<cplx, kAncillaLevels>& ancilla) {
  if (state.labels() != LabelRegisters::blank) {
    throw std::logic_error("factor_ancilla: label registers not restored");
  }
  StateVector walker(state.n_vertices());
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t e = 0; e < state.edges(); ++e) {
    const cplx amp = state.amplitude(e, 0) / ancilla[0];
    for (std::size_t q = 0; q < kAncillaLevels; ++q) {
      if (std::abs(state.amplitude(e, q) - amp * ancilla[q]) >
          4.0 * eps * std::abs(amp)) {
        throw std::logic_error("factor_ancilla: ancilla entangled with edge " +
                               std::to_string(e));
      }
    }
    walker[e] = amp;
  }
  return walker;
}

// O^dagger CU_f O on a single edge with the ancilla in |mu>; returns the
// kicked-back phase e^{i pi f(k,l)/2}.
inline cplx conjugated_oracle(std::size_t n_vertices, std::size_t edge,
                              const OracleFunction& f) {
  auto state = CompositeState::lift(StateVector(n_vertices), kAncillaMu);
  for (std::size_t q = 0; q < kAncillaLevels; ++q) {
    state.amplitude(edge, q) = kAncillaMu[q];
  }
  apply_vertex_copy(state);
  state = apply_oracle(std::move(state), f);
  apply_vertex_copy_adjoint(state);
  return factor_ancilla(state, kAncillaMu)[edge];
}

// One oracle call on the whole superposition: O^dagger CU_f O with |mu>.
inline StateVector apply_oracle_call(const StateVector& walker,
                                     const OracleFunction& f,
                                     QueryLedger& ledger) {
  auto state = CompositeState::lift(walker, kAncillaMu);
  apply_vertex_copy(state);
  state = apply_oracle(std::move(state), f);
  apply_vertex_copy_adjoint(state);
  ++ledger.quantum_calls;
  return factor_ancilla(state, kAncillaMu);
}

// Oracle call, unmarked scattering, oracle call. Equal to apply_step with
// phase pi/2 on the oracle's marked set.
inline StateVector oracle_step(const StateVector& walker, const OracleFunction& f,
                               QueryLedger& ledger) {
  if (walker.n_vertices() != f.n_vertices()) {
    throw std::invalid_argument("oracle_step: state has N=" +
                                std::to_string(walker.n_vertices()) +
                                ", oracle has N=" + std::to_string(f.n_vertices()));
  }
  const auto before = apply_oracle_call(walker, f, ledger);
  StateVector scattered(walker.n_vertices());
  scatter(before.amplitudes(), scattered.amplitudes(), walker.n_vertices(),
          coefficients(walker.n_vertices()));
  return apply_oracle_call(scattered, f, ledger);
}

// Materialized tensor-product form, used to check the factored representation
// on small graphs. Basis order: ((edge * (N+1) + a) * (N+1) + b) * 4 + m, with
// label value N standing for blank.
namespace tensor {

inline std::size_t dimension(std::size_t n_vertices) {
  return edge_count(n_vertices) * (n_vertices + 1) * (n_vertices + 1) *
         kAncillaLevels;
}

inline std::size_t index(std::size_t n_vertices, std::size_t edge, std::size_t a,
                         std::size_t b, std::size_t m) {
  const std::size_t labels = n_vertices + 1;
  return ((edge * labels + a) * labels + b) * kAncillaLevels + m;
}

// CU_f as a basis permutation; identity where a label register is blank.
inline std::vector<std::size_t> oracle_permutation(const OracleFunction& f) {
  const auto n = f.n_vertices();
  std::vector<std::size_t> perm(dimension(n));
  for (std::size_t e = 0; e < edge_count(n); ++e) {
    for (std::size_t a = 0; a <= n; ++a) {
      for (std::size_t b = 0; b <= n; ++b) {
        const int shift = (a < n && b < n) ? f(a, b) : 0;
        for (std::size_t m = 0; m < kAncillaLevels; ++m) {
          perm[index(n, e, a, b, m)] =
              index(n, e, a, b, (m + shift) % kAncillaLevels);
        }
      }
    }
  }
  return perm;
}

// O as a basis permutation: swaps blank <-> k in the first label register
// and blank <-> l in the second; self-inverse.
inline std::vector<std::size_t> vertex_copy_permutation(std::size_t n_vertices) {
  const auto n = n_vertices;
  std::vector<std::size_t> perm(dimension(n));
  auto swap_label = [n](std::size_t value, std::size_t vertex) {
    if (value == n) return vertex;
    if (value == vertex) return n;
    return value;
  };
  for (std::size_t e = 0; e < edge_count(n); ++e) {
    const auto [k, l] = edge_endpoints(n, e);
    for (std::size_t a = 0; a <= n; ++a) {
      for (std::size_t b = 0; b <= n; ++b) {
        for (std::size_t m = 0; m < kAncillaLevels; ++m) {
          perm[index(n, e, a, b, m)] =
              index(n, e, swap_label(a, k), swap_label(b, l), m);
        }
      }
    }
  }
  return perm;
}

inline Eigen::VectorXcd permute(const Eigen::VectorXcd& v,
                                const std::vector<std::size_t>& perm) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(v.size());
  for (std::size_t i = 0; i < perm.size(); ++i) out(perm[i]) += v(i);
  return out;
}

inline Eigen::VectorXcd materialize(const CompositeState& state) {
  const auto n = state.n_vertices();
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dimension(n));
  for (std::size_t e = 0; e < state.edges(); ++e) {
    const auto [k, l] = edge_endpoints(n, e);
    const bool copied = state.labels() == LabelRegisters::copied;
    for (std::size_t m = 0; m < kAncillaLevels; ++m) {
      v(index(n, e, copied ? k : n, copied ? l : n, m)) = state.amplitude(e, m);
    }
  }
  return v;
}

}  // namespace tensor

inline std::uint64_t pair_count(std::uint64_t n) {
  return n < 2 ? 0 : n * (n - 1) / 2;
}

enum class ClassicalStrategy { random_pairs, deterministic_scan };

struct ClassicalBaseline {
  double expected_queries = 0.0;
  double standard_error = 0.0;              // zero for exact values
  std::optional<std::uint64_t> worst_case;  // deterministic scan only
};

// Uniform query order without replacement over M = C(N,2) pairs with
// S = C(K,2) marked ones: expected position of the first hit is (M+1)/(S+1).
inline double random_pairs_expected_queries(std::size_t n_vertices,
                                            std::size_t k_marked) {
  const double m = static_cast<double>(pair_count(n_vertices));
  const double s = static_cast<double>(pair_count(k_marked));
  return (m + 1.0) / (s + 1.0);
}

namespace detail {

inline double log_binomial(double n, double k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// Lexicographic scan (0,1), (0,2), ..., (1,2), ...: the first marked pair is
// formed by the two smallest marked vertices a < b.
inline double scan_expected_queries(std::size_t n_vertices, std::size_t k_marked) {
  const double n = static_cast<double>(n_vertices);
  const double k = static_cast<double>(k_marked);
  const double log_total = log_binomial(n, k);
  double expected = 0.0;
  for (std::size_t a = 0; a + 1 < n_vertices; ++a) {
    const double ad = static_cast<double>(a);
    const double before = ad * (n - 1.0) - ad * (ad - 1.0) / 2.0;
    for (std::size_t b = a + 1; b < n_vertices; ++b) {
      const double rest = n - 1.0 - static_cast<double>(b);
      if (rest < k - 2.0) break;
      const double p = std::exp(log_binomial(rest, k - 2.0) - log_total);
      expected += p * (before + static_cast<double>(b - a));
    }
  }
  return expected;
}

// Sparse Fisher-Yates: draws pairs uniformly without replacement and queries
// f until it answers 1.
inline std::uint64_t random_pairs_trial(std::size_t n_vertices,
                                        const OracleFunction& f,
                                        std::mt19937_64& rng) {
  const std::uint64_t total = pair_count(n_vertices);
  std::unordered_map<std::uint64_t, std::uint64_t> swapped;
  auto value_at = [&](std::uint64_t i) {
    auto it = swapped.find(i);
    return it == swapped.end() ? i : it->second;
  };
  for (std::uint64_t i = 0; i < total; ++i) {
    std::uniform_int_distribution<std::uint64_t> pick(i, total - 1);
    const std::uint64_t j = pick(rng);
    const std::uint64_t drawn = value_at(j);
    swapped[j] = value_at(i);
    // Decode the pair index into (a, b), a < b, in lexicographic order.
    std::uint64_t a = 0, offset = drawn;
    while (offset >= n_vertices - 1 - a) {
      offset -= n_vertices - 1 - a;
      ++a;
    }
    const std::uint64_t b = a + 1 + offset;
    if (f(a, b) == 1) return i + 1;
  }
  throw std::logic_error("random_pairs_trial: no marked pair");
}

}  // namespace detail

// Classical cost of finding one marked pair.
//  random_pairs: Monte Carlo over `trials` runs (trials == 0 gives the exact
//    expectation (M+1)/(S+1)).
//  deterministic_scan: exact expectation over a uniformly random marked set,
//    plus the worst case C(N,2) - C(K,2) + 1.
inline ClassicalBaseline classical_query_baseline(std::size_t n_vertices,
                                                  std::size_t k_marked,
                                                  ClassicalStrategy strategy,
                                                  std::size_t trials = 0,
                                                  std::uint64_t seed = 0) {
  if (k_marked < 2) {
    throw std::invalid_argument("classical_query_baseline: K=" +
                                std::to_string(k_marked) +
                                " leaves no marked pair");
  }
  if (k_marked > n_vertices) {
    throw std::invalid_argument("classical_query_baseline: K exceeds N");
  }
  ClassicalBaseline out;
  if (strategy == ClassicalStrategy::deterministic_scan) {
    out.expected_queries = detail::scan_expected_queries(n_vertices, k_marked);
    out.worst_case = pair_count(n_vertices) - pair_count(k_marked) + 1;
    return out;
  }
  if (trials == 0) {
    out.expected_queries = random_pairs_expected_queries(n_vertices, k_marked);
    return out;
  }
  std::vector<std::size_t> marked(k_marked);
  for (std::size_t i = 0; i < k_marked; ++i) marked[i] = i;
  const OracleFunction f(n_vertices, marked);
  std::mt19937_64 rng(seed);
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const double q = static_cast<double>(detail::random_pairs_trial(n_vertices, f, rng));
    sum += q;
    sum_sq += q * q;
  }
  const double count = static_cast<double>(trials);
  out.expected_queries = sum / count;
  const double variance =
      trials > 1 ? (sum_sq - sum * sum / count) / (count - 1.0) : 0.0;
  out.standard_error = std::sqrt(std::max(0.0, variance) / count);
  return out;
}

}  // namespace qwalk
