#pragma once

// Self-check suites behind `walk verify`.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qwalk/oracle_circuit.hpp"
#include "qwalk/reduced_model.hpp"
#include "qwalk/search_stats.hpp"
#include "qwalk/walk_core.hpp"

namespace qwalk {

enum class ToleranceProfile { standard, strict };

enum class Fault {
  none,
  reflection,  // r + t != 1
};

struct VerifyOptions {
  ToleranceProfile profile = ToleranceProfile::standard;
  Fault fault = Fault::none;
  std::uint64_t seed = 12345;
};

struct SuiteResult {
  std::string name;
  bool passed = true;
  double worst = 0.0;       // largest observed deviation
  double tolerance = 0.0;
  std::string first_failure;  // parameters of the first failing case
};

inline Eigen::VectorXcd random_state_vector(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(dim);
  for (std::size_t i = 0; i < dim; ++i) v(i) = cplx{g(rng), g(rng)};
  return v / v.norm();
}

inline StateVector random_state(std::size_t n_vertices, std::mt19937_64& rng) {
  const auto v = random_state_vector(edge_count(n_vertices), rng);
  return StateVector(n_vertices, std::vector<cplx>(v.data(), v.data() + v.size()));
}

namespace detail {

inline std::string phase_label(const Phase& p) {
  std::ostringstream os;
  os << p.angle();
  return os.str();
}

inline std::string case_label(std::size_t n, std::size_t k, const Phase& p) {
  return "N=" + std::to_string(n) + ", K=" + std::to_string(k) +
         ", phi=" + phase_label(p);
}

class SuiteRecorder {
 public:
  SuiteRecorder(std::string name, double tolerance) {
    result_.name = std::move(name);
    result_.tolerance = tolerance;
  }
  void observe(double deviation, const std::string& where) {
    result_.worst = std::max(result_.worst, deviation);
    if (!(deviation <= result_.tolerance) && result_.passed) {
      result_.passed = false;
      result_.first_failure = where;
    }
  }
  SuiteResult finish() { return std::move(result_); }

 private:
  SuiteResult result_;
};

inline double max_abs(const Eigen::MatrixXcd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace detail

class Verifier {
 public:
  explicit Verifier(VerifyOptions options) : options_(options) {}

  std::vector<SuiteResult> run_all() {
    return {unitarity(),        fixed_point(),      dense_unitarity(),
            matrix_free(),      projection(),       subspace_closure(),
            full_reduced(),     circuit_isomorphism(), kickback(),
            discovery_numbers()};
  }

  ScatteringCoefficients coefficients_for(std::size_t n) const {
    auto c = coefficients(n);
    if (options_.fault == Fault::reflection) c.reflection += 1e-3;
    return c;
  }

  SuiteResult unitarity() {
    detail::SuiteRecorder rec("unitarity", tol(1e-12));
    std::mt19937_64 rng(options_.seed);
    std::vector<std::size_t> sizes{3, 5, 10, 50};
    if (strict()) sizes.push_back(200);
    const std::size_t samples = strict() ? 100 : 20;
    for (auto n : sizes) {
      for (std::size_t k : {0, 2, 3}) {
        for (const auto& phase : phases()) {
          const auto config = WalkConfig::first_k(n, k, phase);
          const auto coeffs = coefficients_for(n);
          for (std::size_t s = 0; s < samples; ++s) {
            const auto out = apply_step(random_state(n, rng), config, coeffs);
            rec.observe(std::abs(out.norm() - 1.0), detail::case_label(n, k, phase));
          }
        }
      }
    }
    return rec.finish();
  }

  SuiteResult fixed_point() {
    detail::SuiteRecorder rec("fixed_point", tol(1e-13));
    for (std::size_t n : {3, 5, 10, 50}) {
      const auto config = WalkConfig::first_k(n, 0, Phase::zero());
      const auto init = initial_state(n);
      const auto out = apply_step(init, config, coefficients_for(n));
      double worst = 0.0;
      for (std::size_t i = 0; i < init.size(); ++i) {
        worst = std::max(worst, std::abs(out[i] - init[i]));
      }
      rec.observe(worst, detail::case_label(n, 0, Phase::zero()));
    }
    return rec.finish();
  }

  // U^dagger U = I on the assembled matrix.
  SuiteResult dense_unitarity() {
    detail::SuiteRecorder rec("dense_unitarity", tol(1e-12));
    for_dense_cases([&](const WalkConfig& config, const Eigen::MatrixXcd& u,
                        const std::string& label) {
      const auto dim = static_cast<Eigen::Index>(config.dimension());
      rec.observe(detail::max_abs(u.adjoint() * u -
                                  Eigen::MatrixXcd::Identity(dim, dim)),
                  label);
    });
    return rec.finish();
  }

  // Matrix-free step against dense multiplication on random states.
  SuiteResult matrix_free() {
    detail::SuiteRecorder rec("matrix_free_vs_dense", tol(1e-13));
    std::mt19937_64 rng(options_.seed + 1);
    for_dense_cases([&](const WalkConfig& config, const Eigen::MatrixXcd& u,
                        const std::string& label) {
      const auto n = config.n_vertices();
      const auto psi = random_state(n, rng);
      const auto out = apply_step(psi, config, coefficients_for(n));
      const auto dim = static_cast<Eigen::Index>(config.dimension());
      Eigen::VectorXcd v(dim);
      for (Eigen::Index i = 0; i < dim; ++i) v(i) = psi[i];
      const Eigen::VectorXcd dense_out = u * v;
      double worst = 0.0;
      for (Eigen::Index i = 0; i < dim; ++i) {
        worst = std::max(worst, std::abs(dense_out(i) - out[i]));
      }
      rec.observe(worst, label);
    });
    return rec.finish();
  }

  // Reduced operator equals W U W^dagger for every admissible K.
  SuiteResult projection() {
    detail::SuiteRecorder rec("projection_consistency", tol(1e-12));
    for (std::size_t n = 4; n <= max_dense_n(); ++n) {
      for (std::size_t k = 2; k + 2 <= n; ++k) {
        for (const auto& phase : phases()) {
          const auto config = WalkConfig::first_k(n, k, phase);
          const auto w = w_basis(config);
          const Eigen::MatrixXcd projected =
              w * dense_operator(config, coefficients_for(n)) * w.adjoint();
          const auto reduced = reduced_operator(n, k, phase);
          rec.observe(detail::max_abs(projected - reduced.entries),
                      detail::case_label(n, k, phase));
        }
      }
    }
    return rec.finish();
  }

  SuiteResult subspace_closure() {
    detail::SuiteRecorder rec("subspace_closure", tol(1e-10));
    const std::size_t n = 30, k = 3;
    const auto config = WalkConfig::first_k(n, k, Phase::half_pi());
    const auto coeffs = coefficients_for(n);
    auto state = initial_state(n);
    for (std::size_t s = 1; s <= 200; ++s) {
      state = apply_step(state, config, coeffs);
      rec.observe(project(state, config).residual,
                  detail::case_label(n, k, Phase::half_pi()) + ", step=" +
                      std::to_string(s));
    }
    return rec.finish();
  }

  SuiteResult full_reduced() {
    detail::SuiteRecorder rec("full_reduced_equivalence", tol(1e-10));
    const std::size_t n = 30, k = 3;
    const auto config = WalkConfig::first_k(n, k, Phase::half_pi());
    const auto coeffs = coefficients_for(n);
    const auto spectrum =
        spectral_decompose(reduced_operator(n, k, Phase::half_pi()));
    const auto init = reduced_initial_state(n, k);
    auto state = initial_state(n);
    for (std::size_t s = 1; s <= 200; ++s) {
      state = apply_step(state, config, coeffs);
      const auto exact = evolve_reduced(init, spectrum, s);
      const auto proj = project(state, config);
      rec.observe((proj.reduced.c - exact.c).cwiseAbs().maxCoeff(),
                  detail::case_label(n, k, Phase::half_pi()) + ", step=" +
                      std::to_string(s));
    }
    return rec.finish();
  }

  // Dense matrices of the oracle circuit step and of the phase-shifted walk.
  SuiteResult circuit_isomorphism() {
    detail::SuiteRecorder rec("circuit_isomorphism", tol(1e-13));
    const std::size_t max_n = strict() ? 10 : 6;
    for (std::size_t n = 3; n <= max_n; ++n) {
      for (std::size_t k : {0, 2, 3}) {
        const auto config = WalkConfig::first_k(n, k, Phase::half_pi());
        const OracleFunction f(config);
        const auto coeffs = coefficients_for(n);
        QueryLedger ledger;
        double worst = 0.0;
        StateVector basis(n);
        for (std::size_t c = 0; c < config.dimension(); ++c) {
          basis[c] = 1.0;
          const auto circuit = oracle_step(basis, f, ledger);
          const auto walk = apply_step(basis, config, coeffs);
          basis[c] = 0.0;
          for (std::size_t i = 0; i < circuit.size(); ++i) {
            worst = std::max(worst, std::abs(circuit[i] - walk[i]));
          }
        }
        const bool ledger_ok = ledger.quantum_calls == 2 * config.dimension();
        rec.observe(ledger_ok ? worst : INFINITY,
                    detail::case_label(n, k, Phase::half_pi()));
      }
    }
    return rec.finish();
  }

  // Phase kickback: conjugated oracle gives e^{i pi f/2} and the ancilla
  // registers come back unchanged, also in the materialized tensor product.
  SuiteResult kickback() {
    detail::SuiteRecorder rec("kickback", 0.0);
    const std::size_t max_n = strict() ? 6 : 4;
    for (std::size_t n = 3; n <= max_n; ++n) {
      const std::size_t k = 2;
      const auto config = WalkConfig::first_k(n, k, Phase::half_pi());
      const OracleFunction f(config);
      const auto copy = tensor::vertex_copy_permutation(n);
      const auto oracle = tensor::oracle_permutation(f);
      for (std::size_t e = 0; e < config.dimension(); ++e) {
        const auto [a, b] = edge_endpoints(n, e);
        const cplx expected = f(a, b) ? cplx{0.0, 1.0} : cplx{1.0, 0.0};
        double dev = std::abs(conjugated_oracle(n, e, f) - expected);

        auto lifted = CompositeState::lift(StateVector::basis(n, a, b), kAncillaMu);
        const Eigen::VectorXcd start = tensor::materialize(lifted);
        const Eigen::VectorXcd end = tensor::permute(
            tensor::permute(tensor::permute(start, copy), oracle), copy);
        dev = std::max(dev, (end - expected * start).cwiseAbs().maxCoeff());
        rec.observe(dev, "N=" + std::to_string(n) + ", edge=(" +
                             std::to_string(a) + "," + std::to_string(b) + ")");
      }
    }
    return rec.finish();
  }

  SuiteResult discovery_numbers() {
    detail::SuiteRecorder rec("discovery_numbers", tol(1e-12));
    struct Case {
      std::size_t k, runs, at_least;
      double expected;
    };
    for (const auto& c : {Case{3, 2, 3, 2.0 / 3.0}, Case{3, 3, 3, 8.0 / 9.0},
                          Case{4, 2, 4, 1.0 / 6.0}, Case{4, 3, 4, 19.0 / 36.0}}) {
      const auto d = coverage_distribution_exact(c.k, c.runs);
      rec.observe(std::abs(d.at_least(c.at_least) - c.expected),
                  "K=" + std::to_string(c.k) + ", runs=" + std::to_string(c.runs));
    }
    rec.observe(std::abs(coverage_distribution_exact(4, 2).at(3) - 2.0 / 3.0),
                "K=4, runs=2, exactly 3");
    rec.observe(std::abs(coverage_distribution_exact(4, 3).at(3) - 4.0 / 9.0),
                "K=4, runs=3, exactly 3");
    rec.observe(std::abs(expected_runs_to_cover(3) - 2.5), "expected runs K=3");
    return rec.finish();
  }

 private:
  bool strict() const { return options_.profile == ToleranceProfile::strict; }
  double tol(double standard) const { return strict() ? standard / 10.0 : standard; }
  std::size_t max_dense_n() const { return strict() ? 12 : 8; }
  template <class Fn>
  void for_dense_cases(Fn&& fn) const {
    for (std::size_t n = 3; n <= max_dense_n(); ++n) {
      for (std::size_t k : {0, 2, 3}) {
        if (k > n) continue;
        for (const auto& phase : phases()) {
          const auto config = WalkConfig::first_k(n, k, phase);
          fn(config, dense_operator(config, coefficients_for(n)),
             detail::case_label(n, k, phase));
        }
      }
    }
  }
  static std::vector<Phase> phases() {
    return {Phase::zero(), Phase::half_pi(), Phase::pi()};
  }

  VerifyOptions options_;
};

inline std::vector<SuiteResult> run_verification(const VerifyOptions& options) {
  return Verifier(options).run_all();
}

}  // namespace qwalk
