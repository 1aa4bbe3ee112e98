#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qwalk/reduced_model.hpp"
#include "qwalk/verify.hpp"
#include "qwalk/walk_core.hpp"
#include "reference.hpp"

using namespace qwalk;

namespace {

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

std::vector<Phase> test_phases() {
  return {Phase::zero(), Phase::quarter_pi(1), Phase::half_pi(), Phase::pi(),
          Phase::radians(1.3)};
}

}  // namespace

TEST(ReducedOperator, N4K2PhaseZeroEntries) {
  const auto op = reduced_operator(4, 2, Phase::zero());
  const double s = 2.0 / 3.0 * std::sqrt(2.0);
  Eigen::Matrix4cd expected = Eigen::Matrix4cd::Zero();
  expected(1, 0) = 1.0 / 3.0;
  expected(3, 0) = s;
  expected(0, 1) = 1.0 / 3.0;
  expected(2, 1) = s;
  expected(0, 2) = s;
  expected(2, 2) = -1.0 / 3.0;
  expected(1, 3) = s;
  expected(3, 3) = -1.0 / 3.0;
  EXPECT_LT(max_abs(op.entries - expected), 1e-15);
  for (int c = 0; c < 4; ++c) EXPECT_NEAR(op.entries.col(c).norm(), 1.0, 1e-15);
}

TEST(ReducedOperator, N4K2HalfPiCorner) {
  const auto op = reduced_operator(4, 2, Phase::half_pi());
  EXPECT_NEAR(std::abs(op.entries(3, 3) - cplx{1.0 / 3.0, 0.0}), 0.0, 1e-15);
}

TEST(ReducedOperator, RejectsDegenerateBases) {
  EXPECT_THROW(reduced_operator(6, 1, Phase::zero()), std::invalid_argument);
  EXPECT_THROW(reduced_operator(6, 5, Phase::zero()), std::invalid_argument);
  EXPECT_THROW(reduced_operator(6, 6, Phase::zero()), std::invalid_argument);
  EXPECT_THROW(reduced_operator(3, 2, Phase::zero()), std::invalid_argument);
  EXPECT_THROW(reduced_initial_state(6, 1), std::invalid_argument);
}

TEST(ReducedOperator, UnitaryOverParameterGrid) {
  for (std::size_t n = 4; n <= 60; ++n) {
    for (std::size_t k = 2; k + 2 <= n; ++k) {
      for (const auto& phase : test_phases()) {
        const auto u = reduced_operator(n, k, phase).entries;
        ASSERT_LT(max_abs(u.adjoint() * u - Eigen::Matrix4cd::Identity()), 1e-12)
            << "N=" << n << " K=" << k;
      }
    }
  }
}

// W U W^dagger with U and W from the independent reference construction.
TEST(ReducedOperator, EqualsProjectionOfFullOperator) {
  for (std::size_t n = 4; n <= 12; ++n) {
    for (std::size_t k = 2; k + 2 <= n; ++k) {
      for (const auto& phase : test_phases()) {
        std::set<std::size_t> marked;
        for (std::size_t v = 0; v < k; ++v) marked.insert(v);
        const auto u = reference::reference_operator(n, marked, phase.angle());
        const auto w = reference::reference_w_basis(n, k);
        const Eigen::MatrixXcd projected = w * u * w.adjoint();
        ASSERT_LT(max_abs(projected - reduced_operator(n, k, phase).entries), 1e-12)
            << "N=" << n << " K=" << k << " phi=" << phase.angle();
      }
    }
  }
}

TEST(ReducedOperator, SubspaceClosure) {
  std::mt19937_64 rng(21);
  for (std::size_t n : {5, 8, 11}) {
    const std::size_t k = 3;
    const auto config = WalkConfig::first_k(n, k, Phase::radians(0.7));
    for (int trial = 0; trial < 5; ++trial) {
      ReducedState s;
      for (int i = 0; i < 4; ++i) {
        s.c(i) = cplx{std::normal_distribution<double>()(rng),
                      std::normal_distribution<double>()(rng)};
      }
      s.c.normalize();
      const auto stepped = apply_step(embed(s, config), config);
      EXPECT_LT(project(stepped, config).residual, 1e-10);
    }
  }
}

TEST(ReducedInitialState, ComponentsAndNormalization) {
  const auto s = reduced_initial_state(4, 2);
  EXPECT_NEAR(s.c(0).real(), 1.0 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(s.c(1).real(), 1.0 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(s.c(2).real(), 1.0 / std::sqrt(6.0), 1e-15);
  EXPECT_NEAR(s.c(3).real(), 1.0 / std::sqrt(6.0), 1e-15);
  for (std::size_t n = 4; n <= 200; n += 7) {
    for (std::size_t k = 2; k + 2 <= n; k += 3) {
      EXPECT_NEAR(reduced_initial_state(n, k).squared_norm(), 1.0, 1e-14);
    }
  }
}

TEST(ReducedInitialState, EmbedsToUniformState) {
  for (std::size_t n : {4, 7, 15}) {
    for (std::size_t k = 2; k + 2 <= n; ++k) {
      const auto config = WalkConfig::first_k(n, k, Phase::zero());
      const auto embedded = embed(reduced_initial_state(n, k), config);
      const auto init = initial_state(n);
      for (std::size_t i = 0; i < init.size(); ++i) {
        ASSERT_LT(std::abs(embedded[i] - init[i]), 1e-13);
      }
    }
  }
}

TEST(Project, InitialStateHasNoResidual) {
  const auto config = WalkConfig::first_k(9, 3, Phase::half_pi());
  const auto p = project(initial_state(9), config);
  EXPECT_LT(p.residual, 1e-13);
  const auto expected = reduced_initial_state(9, 3);
  EXPECT_LT((p.reduced.c - expected.c).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Project, GenericEdgeStateLeavesSubspace) {
  const auto config = WalkConfig::first_k(6, 2, Phase::half_pi());
  const auto p = project(StateVector::basis(6, 3, 4), config);
  EXPECT_GT(p.residual, 0.5);
}

TEST(Project, RejectsOutOfRangeK) {
  const auto config = WalkConfig::first_k(6, 5, Phase::half_pi());
  EXPECT_THROW(project(initial_state(6), config), std::invalid_argument);
  EXPECT_THROW(embed(ReducedState{}, config), std::invalid_argument);
}

TEST(Embed, BasisVectorsAndRoundTrip) {
  const std::size_t n = 7, k = 3;
  const WalkConfig config(n, {1, 4, 6}, Phase::zero());
  ReducedState w4;
  w4.c(3) = 1.0;
  const auto v4 = embed(w4, config);
  ReducedState w1;
  w1.c(0) = 1.0;
  const auto v1 = embed(w1, config);
  for (std::size_t i = 0; i < v4.size(); ++i) {
    const auto e = edge_endpoints(n, i);
    const bool both = config.is_marked_edge(e.from, e.to);
    EXPECT_NEAR(v4[i].real(), both ? 1.0 / std::sqrt(6.0) : 0.0, 1e-15);
    const bool into = !config.is_marked(e.from) && config.is_marked(e.to);
    EXPECT_NEAR(v1[i].real(), into ? 1.0 / std::sqrt(12.0) : 0.0, 1e-15);
  }
  std::mt19937_64 rng(1);
  for (int t = 0; t < 10; ++t) {
    ReducedState s;
    for (int i = 0; i < 4; ++i) {
      s.c(i) = cplx{std::normal_distribution<double>()(rng),
                    std::normal_distribution<double>()(rng)};
    }
    const auto back = project(embed(s, config), config);
    EXPECT_LT((back.reduced.c - s.c).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_LT(back.residual, 1e-13);
  }
  (void)k;
}

TEST(Embed, MarkedProbabilityIsC4Weight) {
  const auto config = WalkConfig::first_k(10, 4, Phase::half_pi());
  ReducedState s;
  s.c << cplx{0.1, 0.2}, cplx{-0.3, 0.0}, cplx{0.5, -0.1}, cplx{0.2, 0.7};
  s.c.normalize();
  EXPECT_NEAR(marked_probability(embed(s, config), config), s.marked_weight(), 1e-12);
}

TEST(SpectralDecompose, Identity) {
  const auto d = spectral_decompose(Eigen::Matrix4cd::Identity());
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(d.eigenvalues(i) - 1.0), 0.0, 1e-14);
  EXPECT_LT(max_abs(d.vectors.adjoint() * d.vectors - Eigen::Matrix4cd::Identity()), 1e-14);
}

TEST(SpectralDecompose, DegenerateEigenvaluesGiveOrthonormalVectors) {
  // diag(1, 1, -1, i) rotated by a random unitary
  std::mt19937_64 rng(4);
  Eigen::Matrix4cd g;
  for (int i = 0; i < 16; ++i) {
    g(i / 4, i % 4) = cplx{std::normal_distribution<double>()(rng),
                           std::normal_distribution<double>()(rng)};
  }
  const Eigen::Matrix4cd q = Eigen::HouseholderQR<Eigen::Matrix4cd>(g).householderQ();
  Eigen::Vector4cd diag(1.0, 1.0, -1.0, cplx{0.0, 1.0});
  const Eigen::Matrix4cd u = q * diag.asDiagonal() * q.adjoint();
  const auto d = spectral_decompose(u);
  EXPECT_LT(max_abs(d.vectors.adjoint() * d.vectors - Eigen::Matrix4cd::Identity()), 1e-12);
  const Eigen::Matrix4cd rebuilt =
      d.vectors * d.eigenvalues.asDiagonal() * d.vectors.adjoint();
  EXPECT_LT(max_abs(rebuilt - u), 1e-12);
}

TEST(SpectralDecompose, TraceAndUnitModulus) {
  const auto op = reduced_operator(4, 2, Phase::half_pi());
  const auto d = spectral_decompose(op);
  EXPECT_NEAR(std::abs(d.eigenvalues.sum() - op.entries.trace()), 0.0, 1e-10);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(d.eigenvalues(i)), 1.0, 1e-10);
  EXPECT_LT(max_abs(d.vectors.adjoint() * d.vectors - Eigen::Matrix4cd::Identity()), 1e-10);
}

TEST(SpectralDecompose, RejectsNonUnitary) {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Identity();
  m(0, 0) = 1.1;
  EXPECT_THROW(spectral_decompose(m), std::invalid_argument);
  Eigen::Matrix4cd shear = Eigen::Matrix4cd::Identity();
  shear(0, 1) = 0.5;
  EXPECT_THROW(spectral_decompose(shear), std::invalid_argument);
}

TEST(EvolveReduced, MatchesPowerIteration) {
  for (std::size_t n : {4, 10, 37}) {
    const auto op = reduced_operator(n, 2, Phase::half_pi());
    const auto init = reduced_initial_state(n, 2);
    Eigen::Vector4cd power = init.c;
    for (std::size_t s = 1; s <= 50; ++s) {
      power = op.entries * power;
      const auto spectral = evolve_reduced(init, op, s);
      ASSERT_LT((spectral.c - power).cwiseAbs().maxCoeff(), 1e-10) << s;
    }
  }
}

TEST(EvolveReduced, ZeroAndOneStep) {
  const auto op = reduced_operator(12, 3, Phase::pi());
  const auto init = reduced_initial_state(12, 3);
  EXPECT_EQ(evolve_reduced(init, op, 0).c, init.c);
  EXPECT_LT((evolve_reduced(init, op, 1).c - op.entries * init.c).cwiseAbs().maxCoeff(),
            1e-15);
}

TEST(EvolveReduced, AgreesWithFullSimulation) {
  const std::size_t n = 30, k = 3;
  const auto config = WalkConfig::first_k(n, k, Phase::half_pi());
  const auto spectrum = spectral_decompose(reduced_operator(n, k, Phase::half_pi()));
  const auto init = reduced_initial_state(n, k);
  auto full = initial_state(n);
  for (std::size_t s = 1; s <= 500; ++s) {
    full = apply_step(full, config);
    if (s % 25 != 0 && s != 200) continue;
    const auto proj = project(full, config);
    const auto exact = evolve_reduced(init, spectrum, s);
    ASSERT_LT((proj.reduced.c - exact.c).cwiseAbs().maxCoeff(), 1e-10) << s;
    ASSERT_LT(proj.residual, 1e-10);
  }
}

TEST(AsymptoticParams, Formula) {
  EXPECT_EQ(optimal_steps(101, 2), 56u);
  EXPECT_EQ(optimal_steps(1000, 2), 555u);
  EXPECT_EQ(optimal_steps(100, 2), 55u);
  EXPECT_EQ(optimal_steps(50, 2), 27u);
  const auto p = asymptotic_params(101, 2);
  EXPECT_NEAR(p.x, std::sqrt(2.0) / 100.0, 1e-16);
}

TEST(AsymptoticAmplitudes, Shape) {
  const auto a0 = asymptotic_amplitudes(1000, 2, 0);
  EXPECT_EQ(a0.state.c(2), cplx(1.0, 0.0));
  EXPECT_EQ(a0.state.c(3), cplx(0.0, 0.0));
  EXPECT_FALSE(a0.low_accuracy);
  const auto peak = asymptotic_amplitudes(1000, 2, optimal_steps(1000, 2));
  EXPECT_NEAR(peak.state.marked_weight(), 1.0, 1e-5);
  EXPECT_GT(peak.state.c(3).imag(), 0.0);
  EXPECT_TRUE(asymptotic_amplitudes(10, 3, 1).low_accuracy);
}

namespace {

double asymptotic_error(std::size_t n) {
  const auto params = asymptotic_params(n, 2);
  const auto spectrum = spectral_decompose(reduced_operator(n, 2, Phase::half_pi()));
  const auto init = reduced_initial_state(n, 2);
  double worst = 0.0;
  for (std::size_t s = 0; s <= 2 * params.n_opt; ++s) {
    const double exact = evolve_reduced(init, spectrum, s).marked_weight();
    const double approx = std::pow(std::sin(2.0 * params.x * static_cast<double>(s)), 2);
    worst = std::max(worst, std::abs(exact - approx));
  }
  return worst;
}

}  // namespace

TEST(AsymptoticAmplitudes, ErrorShrinksWithN) {
  // values from a 40-digit reference computation of the same quantity
  EXPECT_NEAR(asymptotic_error(100), 0.0291411961528, 1e-9);
  EXPECT_NEAR(asymptotic_error(1000), 0.00295225134598, 1e-9);
  EXPECT_LT(asymptotic_error(1000), asymptotic_error(100));
}

TEST(OptimalSteps, ScanAgreesWithFormula) {
  const auto formula = optimal_steps(101, 2, StepMode::formula);
  const auto scan = optimal_steps(101, 2, StepMode::scan);
  EXPECT_EQ(scan, 56u);
  EXPECT_LE(std::max(formula, scan) - std::min(formula, scan), 2u);
  const auto spectrum = spectral_decompose(reduced_operator(101, 2, Phase::half_pi()));
  const auto init = reduced_initial_state(101, 2);
  EXPECT_GE(evolve_reduced(init, spectrum, scan).marked_weight(),
            evolve_reduced(init, spectrum, formula).marked_weight());
  EXPECT_THROW(optimal_steps(101, 2, StepMode::scan, 10), std::invalid_argument);
  EXPECT_THROW(optimal_steps(101, 1), std::invalid_argument);
}
