#pragma once

// Full-state scattering walk on the complete graph K_N.
//
// The walker lives on directed edges |m,l> (travelling from m to l). Each
// vertex l scatters every incoming edge |k,l> into
//     -r |l,k> + t * sum_{m != l,k} |l,m>,     t = 2/(N-1), r = 1 - t.
// Edges with both endpoints in the marked set carry phase shifters, which
// are applied as D * U0 * D with D = e^{i phi} on marked edges.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qwalk/phase.hpp"

namespace qwalk {

struct ScatteringCoefficients {
  double transmission = 0.0;  // t
  double reflection = 0.0;    // r
};

inline ScatteringCoefficients coefficients(std::size_t n_vertices) {
  if (n_vertices < 3) {
    throw std::invalid_argument("coefficients: need at least 3 vertices, got " +
                                std::to_string(n_vertices));
  }
  const double t = 2.0 / static_cast<double>(n_vertices - 1);
  return {t, 1.0 - t};
}

// Canonical directed-edge index: m*(N-1) + (l < m ? l : l-1).
inline std::size_t edge_index(std::size_t n_vertices, std::size_t from,
                              std::size_t to) {
  return from * (n_vertices - 1) + (to < from ? to : to - 1);
}

struct Edge {
  std::size_t from = 0;
  std::size_t to = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

inline Edge edge_endpoints(std::size_t n_vertices, std::size_t index) {
  const std::size_t from = index / (n_vertices - 1);
  const std::size_t offset = index % (n_vertices - 1);
  return {from, offset < from ? offset : offset + 1};
}

inline std::size_t edge_count(std::size_t n_vertices) {
  return n_vertices * (n_vertices - 1);
}

class WalkConfig {
 public:
  WalkConfig(std::size_t n_vertices, std::vector<std::size_t> marked,
             Phase phase)
      : n_vertices_(n_vertices), marked_(std::move(marked)), phase_(phase) {
    if (n_vertices_ < 3) {
      throw std::invalid_argument("WalkConfig: N must be >= 3, got " +
                                  std::to_string(n_vertices_));
    }
    std::sort(marked_.begin(), marked_.end());
    if (std::adjacent_find(marked_.begin(), marked_.end()) != marked_.end()) {
      throw std::invalid_argument("WalkConfig: duplicate marked vertex");
    }
    if (!marked_.empty() && marked_.back() >= n_vertices_) {
      throw std::invalid_argument("WalkConfig: marked vertex " +
                                  std::to_string(marked_.back()) +
                                  " out of range for N=" +
                                  std::to_string(n_vertices_));
    }
    mask_.assign(n_vertices_, false);
    for (auto v : marked_) mask_[v] = true;
  }

  // Marked set {0, ..., k-1}.
  static WalkConfig first_k(std::size_t n_vertices, std::size_t k_marked,
                            Phase phase) {
    if (k_marked > n_vertices) {
      throw std::invalid_argument("WalkConfig: K=" + std::to_string(k_marked) +
                                  " exceeds N=" + std::to_string(n_vertices));
    }
    std::vector<std::size_t> marked(k_marked);
    for (std::size_t i = 0; i < k_marked; ++i) marked[i] = i;
    return WalkConfig(n_vertices, std::move(marked), phase);
  }

  std::size_t n_vertices() const { return n_vertices_; }
  std::size_t k_marked() const { return marked_.size(); }
  const std::vector<std::size_t>& marked() const { return marked_; }
  Phase phase() const { return phase_; }
  bool is_marked(std::size_t v) const { return mask_[v]; }
  bool is_marked_edge(std::size_t from, std::size_t to) const {
    return mask_[from] && mask_[to];
  }
  std::size_t dimension() const { return edge_count(n_vertices_); }

 private:
  std::size_t n_vertices_;
  std::vector<std::size_t> marked_;
  std::vector<bool> mask_;
  Phase phase_;
};

class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(std::size_t n_vertices)
      : n_vertices_(n_vertices), amplitudes_(edge_count(n_vertices)) {
    if (n_vertices < 3) {
      throw std::invalid_argument("StateVector: N must be >= 3");
    }
  }
  StateVector(std::size_t n_vertices, std::vector<cplx> amplitudes)
      : n_vertices_(n_vertices), amplitudes_(std::move(amplitudes)) {
    if (n_vertices < 3 || amplitudes_.size() != edge_count(n_vertices)) {
      throw std::invalid_argument("StateVector: expected " +
                                  std::to_string(edge_count(n_vertices)) +
                                  " amplitudes for N=" +
                                  std::to_string(n_vertices));
    }
  }

  static StateVector basis(std::size_t n_vertices, std::size_t from,
                           std::size_t to) {
    StateVector s(n_vertices);
    s[edge_index(n_vertices, from, to)] = 1.0;
    return s;
  }

  std::size_t n_vertices() const { return n_vertices_; }
  std::size_t size() const { return amplitudes_.size(); }

  cplx& operator[](std::size_t i) { return amplitudes_[i]; }
  const cplx& operator[](std::size_t i) const { return amplitudes_[i]; }
  cplx& at(std::size_t from, std::size_t to) {
    return amplitudes_[edge_index(n_vertices_, from, to)];
  }
  const cplx& at(std::size_t from, std::size_t to) const {
    return amplitudes_[edge_index(n_vertices_, from, to)];
  }

  std::span<cplx> amplitudes() { return amplitudes_; }
  std::span<const cplx> amplitudes() const { return amplitudes_; }

  double squared_norm() const {
    double s = 0.0;
    for (const auto& a : amplitudes_) s += std::norm(a);
    return s;
  }
  double norm() const { return std::sqrt(squared_norm()); }

  void normalize() {
    const double n = norm();
    if (n == 0.0) throw std::domain_error("StateVector: cannot normalize zero");
    for (auto& a : amplitudes_) a /= n;
  }

 private:
  std::size_t n_vertices_ = 0;
  std::vector<cplx> amplitudes_;
};

inline StateVector initial_state(std::size_t n_vertices) {
  if (n_vertices < 3) {
    throw std::invalid_argument("initial_state: N must be >= 3");
  }
  const double a = 1.0 / std::sqrt(static_cast<double>(edge_count(n_vertices)));
  return StateVector(n_vertices,
                     std::vector<cplx>(edge_count(n_vertices), cplx{a, 0.0}));
}

namespace detail {

inline void check_compatible(const StateVector& state, const WalkConfig& config) {
  if (state.n_vertices() != config.n_vertices() ||
      state.size() != config.dimension()) {
    throw std::invalid_argument("state has N=" +
                                std::to_string(state.n_vertices()) +
                                " but config has N=" +
                                std::to_string(config.n_vertices()));
  }
}

inline void check_finite(std::span<const cplx> amplitudes) {
  for (const auto& a : amplitudes) {
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
      throw std::domain_error("state contains non-finite amplitudes");
    }
  }
}

}  // namespace detail

// Multiplies every marked directed edge by `factor`.
inline void apply_edge_phases(std::span<cplx> amplitudes,
                              const WalkConfig& config, cplx factor) {
  const auto n = config.n_vertices();
  for (auto j : config.marked()) {
    for (auto k : config.marked()) {
      if (j != k) amplitudes[edge_index(n, j, k)] *= factor;
    }
  }
}

// Unmarked scattering step U0, matrix free:
//     out[l,m] = t * A_l - (t + r) * in[m,l],   A_l = sum_k in[k,l].
// For valid coefficients t + r == 1. Incoming sums are accumulated in a
// fixed order (increasing source vertex), so results are deterministic.
inline void scatter(std::span<const cplx> in, std::span<cplx> out,
                    std::size_t n_vertices,
                    const ScatteringCoefficients& coeffs) {
  const std::size_t n = n_vertices;
  const std::size_t deg = n - 1;
  std::vector<cplx> incoming(n, cplx{});
  for (std::size_t k = 0; k < n; ++k) {
    const cplx* row = in.data() + k * deg;
    for (std::size_t j = 0; j < deg; ++j) {
      incoming[j < k ? j : j + 1] += row[j];
    }
  }
  const double t = coeffs.transmission;
  const double back = coeffs.transmission + coeffs.reflection;
  for (std::size_t l = 0; l < n; ++l) {
    const cplx transmitted = t * incoming[l];
    cplx* row = out.data() + l * deg;
    for (std::size_t j = 0; j < deg; ++j) {
      const std::size_t m = j < l ? j : j + 1;
      row[j] = transmitted - back * in[edge_index(n, m, l)];
    }
  }
}

// One walk step D * U0 * D with explicit coefficients (fault injection and
// verification use non-default coefficients).
inline StateVector apply_step(const StateVector& state, const WalkConfig& config,
                              const ScatteringCoefficients& coeffs) {
  detail::check_compatible(state, config);
  detail::check_finite(state.amplitudes());
  StateVector shifted = state;
  apply_edge_phases(shifted.amplitudes(), config, config.phase().factor());
  StateVector out(config.n_vertices());
  scatter(shifted.amplitudes(), out.amplitudes(), config.n_vertices(), coeffs);
  apply_edge_phases(out.amplitudes(), config, config.phase().factor());
  return out;
}

inline StateVector apply_step(const StateVector& state,
                              const WalkConfig& config) {
  return apply_step(state, config, coefficients(config.n_vertices()));
}

inline StateVector evolve(StateVector state, const WalkConfig& config,
                          std::size_t steps) {
  detail::check_compatible(state, config);
  detail::check_finite(state.amplitudes());
  const auto coeffs = coefficients(config.n_vertices());
  const auto factor = config.phase().factor();
  StateVector scratch(config.n_vertices());
  for (std::size_t s = 0; s < steps; ++s) {
    apply_edge_phases(state.amplitudes(), config, factor);
    scatter(state.amplitudes(), scratch.amplitudes(), config.n_vertices(),
            coeffs);
    apply_edge_phases(scratch.amplitudes(), config, factor);
    std::swap(state, scratch);
  }
  return state;
}

// Probability of finding the walker on a directed edge inside the marked set.
inline double marked_probability(const StateVector& state,
                                 const WalkConfig& config) {
  detail::check_compatible(state, config);
  double p = 0.0;
  for (auto j : config.marked()) {
    for (auto k : config.marked()) {
      if (j != k) p += std::norm(state.at(j, k));
    }
  }
  return p;
}

// Explicit N(N-1) x N(N-1) matrix of apply_step; column c is U|edge c>.
inline Eigen::MatrixXcd dense_operator(const WalkConfig& config,
                                       const ScatteringCoefficients& coeffs) {
  const auto dim = config.dimension();
  if (dim > 4096) {
    throw std::invalid_argument("dense_operator: dimension " +
                                std::to_string(dim) + " too large");
  }
  Eigen::MatrixXcd u(dim, dim);
  StateVector basis(config.n_vertices());
  for (std::size_t c = 0; c < dim; ++c) {
    basis[c] = 1.0;
    const auto column = apply_step(basis, config, coeffs);
    basis[c] = 0.0;
    for (std::size_t r = 0; r < dim; ++r) u(r, c) = column[r];
  }
  return u;
}

inline Eigen::MatrixXcd dense_operator(const WalkConfig& config) {
  return dense_operator(config, coefficients(config.n_vertices()));
}

}  // namespace qwalk
