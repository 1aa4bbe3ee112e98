#pragma once

// Four-dimensional invariant subspace of the search walk.
//
// With the marked set K (|K| = k) the symmetric vectors
//     w1 ~ sum |j,k>  j unmarked, k marked
//     w2 ~ sum |j,k>  j marked,   k unmarked
//     w3 ~ sum |j,k>  both unmarked
//     w4 ~ sum |j,k>  both marked
// span a subspace that contains the uniform initial state and is closed under
// the step operator, so the walk reduces to a 4x4 unitary.
//
// Eigenvectors of the reduced operator and the oracle ancilla state share a
// symbol in the literature; here they are SpectralDecomposition::vectors and
// kAncillaMu (oracle_circuit.hpp) respectively.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "qwalk/phase.hpp"
#include "qwalk/walk_core.hpp"

namespace qwalk {

struct ReducedState {
  Eigen::Vector4cd c = Eigen::Vector4cd::Zero();

  double squared_norm() const { return c.squaredNorm(); }
  double weight(int i) const { return std::norm(c(i)); }
  double marked_weight() const { return std::norm(c(3)); }
};

struct ReducedOperator {
  Eigen::Matrix4cd entries;
  std::size_t n_vertices = 0;
  std::size_t k_marked = 0;
  Phase phase;
};

namespace detail {

inline void check_reduced_range(std::size_t n, std::size_t k,
                                const char* where) {
  if (n < 4 || k < 2 || k + 2 > n) {
    throw std::invalid_argument(std::string(where) +
                                ": need N >= 4 and 2 <= K <= N-2, got N=" +
                                std::to_string(n) + ", K=" + std::to_string(k));
  }
}

// 0..3 for w1..w4.
inline int w_component(const WalkConfig& config, std::size_t from,
                       std::size_t to) {
  const bool a = config.is_marked(from);
  const bool b = config.is_marked(to);
  if (!a && b) return 0;
  if (a && !b) return 1;
  if (!a && !b) return 2;
  return 3;
}

inline std::array<double, 4> w_support_sizes(std::size_t n, std::size_t k) {
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  return {kd * (nd - kd), kd * (nd - kd), (nd - kd) * (nd - kd - 1.0),
          kd * (kd - 1.0)};
}

}  // namespace detail

inline ReducedOperator reduced_operator(std::size_t n_vertices,
                                        std::size_t k_marked, Phase phase) {
  detail::check_reduced_range(n_vertices, k_marked, "reduced_operator");
  const auto [t, r] = coefficients(n_vertices);
  const double n = static_cast<double>(n_vertices);
  const double k = static_cast<double>(k_marked);
  const double cross = std::sqrt((k - 1.0) * (n - k));
  const double outer = std::sqrt(k * (n - k - 1.0));
  const cplx e = phase.factor();

  Eigen::Matrix4cd u = Eigen::Matrix4cd::Zero();
  // U w1
  u(1, 0) = r - (k - 2.0) * t;
  u(3, 0) = t * e * cross;
  // U w2
  u(0, 1) = (k - 1.0) * t - r;
  u(2, 1) = t * outer;
  // U w3
  u(0, 2) = t * outer;
  u(2, 2) = r - t * (k - 1.0);
  // U w4
  u(1, 3) = t * e * cross;
  u(3, 3) = (t * (k - 2.0) - r) * phase.factor_squared();
  return {u, n_vertices, k_marked, phase};
}

inline ReducedState reduced_initial_state(std::size_t n_vertices,
                                          std::size_t k_marked) {
  detail::check_reduced_range(n_vertices, k_marked, "reduced_initial_state");
  const auto sizes = detail::w_support_sizes(n_vertices, k_marked);
  const double total = static_cast<double>(edge_count(n_vertices));
  ReducedState s;
  for (int i = 0; i < 4; ++i) s.c(i) = std::sqrt(sizes[i] / total);
  return s;
}

struct Projection {
  ReducedState reduced;
  double residual = 0.0;  // || state - sum_i c_i w_i ||
};

inline Projection project(const StateVector& state, const WalkConfig& config) {
  detail::check_reduced_range(config.n_vertices(), config.k_marked(), "project");
  detail::check_compatible(state, config);
  const auto n = config.n_vertices();
  const auto sizes = detail::w_support_sizes(n, config.k_marked());

  std::array<cplx, 4> sums{};
  for (std::size_t i = 0; i < state.size(); ++i) {
    const auto e = edge_endpoints(n, i);
    sums[detail::w_component(config, e.from, e.to)] += state[i];
  }
  Projection p;
  std::array<cplx, 4> per_edge{};
  for (int i = 0; i < 4; ++i) {
    p.reduced.c(i) = sums[i] / std::sqrt(sizes[i]);
    per_edge[i] = sums[i] / sizes[i];
  }
  double r2 = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    const auto e = edge_endpoints(n, i);
    r2 += std::norm(state[i] - per_edge[detail::w_component(config, e.from, e.to)]);
  }
  p.residual = std::sqrt(r2);
  return p;
}

inline StateVector embed(const ReducedState& reduced, const WalkConfig& config) {
  detail::check_reduced_range(config.n_vertices(), config.k_marked(), "embed");
  const auto n = config.n_vertices();
  const auto sizes = detail::w_support_sizes(n, config.k_marked());
  std::array<cplx, 4> per_edge{};
  for (int i = 0; i < 4; ++i) per_edge[i] = reduced.c(i) / std::sqrt(sizes[i]);
  StateVector out(n);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto e = edge_endpoints(n, i);
    out[i] = per_edge[detail::w_component(config, e.from, e.to)];
  }
  return out;
}

// The 4 x N(N-1) matrix whose rows are w1..w4.
inline Eigen::MatrixXcd w_basis(const WalkConfig& config) {
  detail::check_reduced_range(config.n_vertices(), config.k_marked(), "w_basis");
  Eigen::MatrixXcd p(4, config.dimension());
  for (int i = 0; i < 4; ++i) {
    ReducedState unit;
    unit.c(i) = 1.0;
    const auto v = embed(unit, config);
    for (std::size_t j = 0; j < v.size(); ++j) p(i, j) = v[j];
  }
  return p;
}

struct SpectralDecomposition {
  Eigen::Vector4cd eigenvalues;
  Eigen::Matrix4cd vectors;  // orthonormal columns
};

// Eigen-decomposition of a unitary 4x4 via the complex Schur form. For a
// normal matrix the triangular factor is diagonal and the Schur vectors are
// orthonormal eigenvectors, including inside degenerate eigenspaces.
inline SpectralDecomposition spectral_decompose(const Eigen::Matrix4cd& op,
                                                double tolerance = 1e-8) {
  Eigen::ComplexSchur<Eigen::Matrix4cd> schur(op);
  if (schur.info() != Eigen::Success) {
    throw std::runtime_error("spectral_decompose: Schur iteration failed");
  }
  const auto& tri = schur.matrixT();
  SpectralDecomposition d;
  for (int i = 0; i < 4; ++i) {
    d.eigenvalues(i) = tri(i, i);
    if (std::abs(std::abs(tri(i, i)) - 1.0) > tolerance) {
      throw std::invalid_argument(
          "spectral_decompose: eigenvalue modulus " +
          std::to_string(std::abs(tri(i, i))) + " is not 1 (non-unitary input)");
    }
    for (int j = i + 1; j < 4; ++j) {
      if (std::abs(tri(i, j)) > tolerance) {
        throw std::invalid_argument(
            "spectral_decompose: input is not normal (non-unitary)");
      }
    }
  }
  d.vectors = schur.matrixU();
  return d;
}

inline SpectralDecomposition spectral_decompose(const ReducedOperator& op) {
  return spectral_decompose(op.entries);
}

// psi_n = sum_mu lambda_mu^n <mu|psi> |mu>; cost independent of `steps`.
inline ReducedState evolve_reduced(const ReducedState& state,
                                   const SpectralDecomposition& spectrum,
                                   std::size_t steps) {
  if (steps == 0) return state;
  const Eigen::Vector4cd overlaps = spectrum.vectors.adjoint() * state.c;
  Eigen::Vector4cd powered;
  const double n = static_cast<double>(steps);
  for (int i = 0; i < 4; ++i) {
    const cplx lambda = spectrum.eigenvalues(i);
    powered(i) = std::polar(std::pow(std::abs(lambda), n), n * std::arg(lambda)) *
                 overlaps(i);
  }
  return {spectrum.vectors * powered};
}

inline ReducedState evolve_reduced(const ReducedState& state,
                                   const ReducedOperator& op,
                                   std::size_t steps) {
  if (steps == 0) return state;
  if (steps == 1) return {op.entries * state.c};
  return evolve_reduced(state, spectral_decompose(op), steps);
}

struct AsymptoticParams {
  double x = 0.0;           // sqrt(K(K-1)) / (N-1)
  std::size_t n_opt = 0;    // round(pi / (4x)), ties to even
};

inline AsymptoticParams asymptotic_params(std::size_t n_vertices,
                                          std::size_t k_marked) {
  detail::check_reduced_range(n_vertices, k_marked, "asymptotic_params");
  const double k = static_cast<double>(k_marked);
  const double x = std::sqrt(k * (k - 1.0)) / static_cast<double>(n_vertices - 1);
  const double steps = std::nearbyint(std::numbers::pi / (4.0 * x));
  return {x, static_cast<std::size_t>(std::max(1.0, steps))};
}

struct AsymptoticAmplitudes {
  ReducedState state;
  // sqrt(x) > 0.2: the neglected O(sqrt(x)) terms are no longer small.
  bool low_accuracy = false;
};

// Large-N form of the phi = pi/2 evolution: (0, 0, cos 2xn, i sin 2xn).
inline AsymptoticAmplitudes asymptotic_amplitudes(std::size_t n_vertices,
                                                  std::size_t k_marked,
                                                  std::size_t steps) {
  const auto params = asymptotic_params(n_vertices, k_marked);
  const double angle = 2.0 * params.x * static_cast<double>(steps);
  AsymptoticAmplitudes a;
  a.state.c(2) = std::cos(angle);
  a.state.c(3) = cplx{0.0, std::sin(angle)};
  a.low_accuracy = std::sqrt(params.x) > 0.2;
  return a;
}

enum class StepMode { formula, scan };

// Formula: round(pi/(4x)). Scan: argmax_n |c4(n)|^2 over 0 <= n <= horizon at
// phi = pi/2 using the exact reduced evolution; default horizon 2*round(pi/(4x)).
inline std::size_t optimal_steps(std::size_t n_vertices, std::size_t k_marked,
                                 StepMode mode = StepMode::formula,
                                 std::size_t scan_horizon = 0) {
  const auto params = asymptotic_params(n_vertices, k_marked);
  if (mode == StepMode::formula) return params.n_opt;

  const std::size_t horizon = scan_horizon == 0 ? 2 * params.n_opt : scan_horizon;
  if (horizon < 2 * params.n_opt) {
    throw std::invalid_argument("optimal_steps: scan horizon " +
                                std::to_string(horizon) + " below 2*n_opt = " +
                                std::to_string(2 * params.n_opt));
  }
  const auto op = reduced_operator(n_vertices, k_marked, Phase::half_pi());
  const auto spectrum = spectral_decompose(op);
  const auto init = reduced_initial_state(n_vertices, k_marked);
  std::size_t best = 0;
  double best_p = -1.0;
  for (std::size_t n = 0; n <= horizon; ++n) {
    const double p = evolve_reduced(init, spectrum, n).marked_weight();
    if (p > best_p) {
      best_p = p;
      best = n;
    }
  }
  return best;
}

}  // namespace qwalk
