#pragma once

// Measurement sampling, complete search runs, and multi-run discovery
// statistics for the marked subgraph.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "qwalk/oracle_circuit.hpp"
#include "qwalk/reduced_model.hpp"
#include "qwalk/walk_core.hpp"

namespace qwalk {

// Samples directed edges with probability |<m,l|psi>|^2.
class EdgeSampler {
 public:
  explicit EdgeSampler(const StateVector& state) : n_vertices_(state.n_vertices()) {
    const double total = state.squared_norm();
    if (std::abs(total - 1.0) > 1e-8) {
      throw std::invalid_argument("EdgeSampler: state norm^2 = " +
                                  std::to_string(total) + ", expected 1");
    }
    cumulative_.resize(state.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < state.size(); ++i) {
      acc += std::norm(state[i]);
      cumulative_[i] = acc;
    }
  }

  template <class Rng>
  Edge sample(Rng& rng) const {
    std::uniform_real_distribution<double> u(0.0, cumulative_.back());
    const double x = u(rng);
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), x);
    auto i = static_cast<std::size_t>(it - cumulative_.begin());
    if (i == cumulative_.size()) {
      // x landed on the upper end; back off trailing zero-probability edges
      --i;
      while (i > 0 && cumulative_[i] == cumulative_[i - 1]) --i;
    }
    return edge_endpoints(n_vertices_, i);
  }

 private:
  std::size_t n_vertices_;
  std::vector<double> cumulative_;
};

inline Edge sample_measurement(const StateVector& state, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return EdgeSampler(state).sample(rng);
}

// Samples from embed(reduced) without materializing it: first the w-component
// with probability |c_i|^2, then a uniform edge inside that component.
class ReducedSampler {
 public:
  ReducedSampler(const ReducedState& reduced, const WalkConfig& config)
      : config_(config) {
    detail::check_reduced_range(config.n_vertices(), config.k_marked(),
                                "ReducedSampler");
    double acc = 0.0;
    for (int i = 0; i < 4; ++i) {
      acc += reduced.weight(i);
      cumulative_[i] = acc;
    }
    if (std::abs(acc - 1.0) > 1e-8) {
      throw std::invalid_argument("ReducedSampler: reduced state not normalized");
    }
    for (std::size_t v = 0; v < config.n_vertices(); ++v) {
      (config.is_marked(v) ? marked_ : unmarked_).push_back(v);
    }
  }

  template <class Rng>
  Edge sample(Rng& rng) const {
    std::uniform_real_distribution<double> u(0.0, cumulative_[3]);
    const double x = u(rng);
    int comp = 0;
    while (comp < 3 && (x >= cumulative_[comp] || reduced_weight(comp) == 0.0)) {
      ++comp;
    }
    switch (comp) {
      case 0: return {pick(unmarked_, rng), pick(marked_, rng)};
      case 1: return {pick(marked_, rng), pick(unmarked_, rng)};
      case 2: return distinct_pair(unmarked_, rng);
      default: return distinct_pair(marked_, rng);
    }
  }

 private:
  double reduced_weight(int i) const {
    return i == 0 ? cumulative_[0] : cumulative_[i] - cumulative_[i - 1];
  }

  template <class Rng>
  static std::size_t pick(const std::vector<std::size_t>& from, Rng& rng) {
    std::uniform_int_distribution<std::size_t> d(0, from.size() - 1);
    return from[d(rng)];
  }

  template <class Rng>
  static Edge distinct_pair(const std::vector<std::size_t>& from, Rng& rng) {
    std::uniform_int_distribution<std::size_t> first(0, from.size() - 1);
    std::uniform_int_distribution<std::size_t> second(0, from.size() - 2);
    const auto a = first(rng);
    auto b = second(rng);
    if (b >= a) ++b;
    return {from[a], from[b]};
  }

  WalkConfig config_;
  std::array<double, 4> cumulative_{};
  std::vector<std::size_t> marked_;
  std::vector<std::size_t> unmarked_;
};

struct RunOutcome {
  Edge edge;
  bool success = false;  // both endpoints marked
  std::size_t steps_used = 0;
  std::uint64_t oracle_calls = 0;
};

namespace detail {

inline void check_search_config(const WalkConfig& config, const char* where) {
  if (!config.phase().is_half_pi()) {
    throw std::invalid_argument(std::string(where) + ": search runs need phase pi/2");
  }
  check_reduced_range(config.n_vertices(), config.k_marked(), where);
}

}  // namespace detail

// Prepare the uniform state, take optimal_steps oracle steps, measure once.
inline RunOutcome run_search(const WalkConfig& config, std::uint64_t seed,
                             QueryLedger& ledger) {
  detail::check_search_config(config, "run_search");
  const OracleFunction f(config);
  const auto steps = optimal_steps(config.n_vertices(), config.k_marked());
  const auto calls_before = ledger.quantum_calls;
  auto state = initial_state(config.n_vertices());
  for (std::size_t s = 0; s < steps; ++s) state = oracle_step(state, f, ledger);
  RunOutcome out;
  out.edge = sample_measurement(state, seed);
  out.success = config.is_marked_edge(out.edge.from, out.edge.to);
  out.steps_used = steps;
  out.oracle_calls = ledger.quantum_calls - calls_before;
  return out;
}

enum class SearchEngine { oracle, reduced };

// Repeated search runs on one configuration. The pre-measurement state is the
// same for every run, so it is prepared once; each run is charged the full
// 2*n_opt oracle calls.
class SearchRunner {
 public:
  SearchRunner(const WalkConfig& config, SearchEngine engine)
      : config_(config),
        steps_(optimal_steps(config.n_vertices(), config.k_marked())) {
    detail::check_search_config(config, "SearchRunner");
    if (engine == SearchEngine::oracle) {
      const OracleFunction f(config);
      QueryLedger scratch;
      auto state = initial_state(config.n_vertices());
      for (std::size_t s = 0; s < steps_; ++s) state = oracle_step(state, f, scratch);
      full_.emplace(state);
      success_probability_ = marked_probability(state, config);
    } else {
      const auto op = reduced_operator(config.n_vertices(), config.k_marked(),
                                       config.phase());
      const auto final_state = evolve_reduced(
          reduced_initial_state(config.n_vertices(), config.k_marked()), op, steps_);
      reduced_.emplace(final_state, config);
      success_probability_ = final_state.marked_weight();
    }
  }

  std::size_t steps() const { return steps_; }
  double success_probability() const { return success_probability_; }

  template <class Rng>
  RunOutcome run(Rng& rng, QueryLedger& ledger) const {
    RunOutcome out;
    out.edge = full_ ? full_->sample(rng) : reduced_->sample(rng);
    out.success = config_.is_marked_edge(out.edge.from, out.edge.to);
    out.steps_used = steps_;
    out.oracle_calls = 2 * steps_;
    ledger.quantum_calls += out.oracle_calls;
    return out;
  }

 private:
  WalkConfig config_;
  std::size_t steps_;
  double success_probability_ = 0.0;
  std::optional<EdgeSampler> full_;
  std::optional<ReducedSampler> reduced_;
};

struct Fraction {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  static Fraction reduced(std::uint64_t num, std::uint64_t den) {
    const auto g = std::gcd(num, den);
    return g == 0 ? Fraction{0, 1} : Fraction{num / g, den / g};
  }
  double value() const {
    return static_cast<double>(num) / static_cast<double>(den);
  }
  std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }
  friend bool operator==(const Fraction&, const Fraction&) = default;
};

struct CoverageDistribution {
  std::size_t runs = 0;
  // j (distinct marked vertices found) -> probability
  std::map<std::size_t, double> probabilities;
  // exact mode only
  std::map<std::size_t, Fraction> exact;
  // mc mode only
  std::size_t trials = 0;
  double success_rate = 0.0;
  std::uint64_t oracle_calls = 0;

  double at(std::size_t j) const {
    auto it = probabilities.find(j);
    return it == probabilities.end() ? 0.0 : it->second;
  }
  // P(at least j vertices found)
  double at_least(std::size_t j) const {
    double p = 0.0;
    for (auto it = probabilities.lower_bound(j); it != probabilities.end(); ++it) {
      p += it->second;
    }
    return p;
  }
};

inline constexpr std::uint64_t kDefaultEnumerationBound = 100'000'000;

// Idealized model: every run returns a uniformly random marked directed edge.
// Enumerates all (K(K-1))^runs outcome sequences.
inline CoverageDistribution coverage_distribution_exact(
    std::size_t k_marked, std::size_t runs,
    std::uint64_t max_sequences = kDefaultEnumerationBound) {
  if (k_marked < 2 || k_marked > 64 || runs < 1) {
    throw std::invalid_argument("coverage_distribution: need 2 <= K <= 64, runs >= 1");
  }
  const std::uint64_t branching = k_marked * (k_marked - 1);
  std::uint64_t total = 1;
  for (std::size_t r = 0; r < runs; ++r) {
    if (total > max_sequences / branching) {
      throw std::invalid_argument(
          "coverage_distribution: " + std::to_string(branching) + "^" +
          std::to_string(runs) + " sequences exceed enumeration bound " +
          std::to_string(max_sequences));
    }
    total *= branching;
  }

  std::vector<std::uint64_t> edge_masks;
  for (std::size_t a = 0; a < k_marked; ++a) {
    for (std::size_t b = 0; b < k_marked; ++b) {
      if (a != b) edge_masks.push_back((std::uint64_t{1} << a) | (std::uint64_t{1} << b));
    }
  }
  std::vector<std::uint64_t> counts(k_marked + 1, 0);
  auto walk = [&](auto& self, std::size_t depth, std::uint64_t seen) -> void {
    if (depth == runs) {
      ++counts[static_cast<std::size_t>(std::popcount(seen))];
      return;
    }
    for (auto m : edge_masks) self(self, depth + 1, seen | m);
  };
  walk(walk, 0, 0);

  CoverageDistribution d;
  d.runs = runs;
  for (std::size_t j = 0; j <= k_marked; ++j) {
    if (counts[j] == 0) continue;
    d.exact[j] = Fraction::reduced(counts[j], total);
    d.probabilities[j] = d.exact[j].value();
  }
  return d;
}

// Discovery count distribution by propagating the absorbing chain on the
// number of vertices found; index j of the result is P(j found after runs).
inline std::vector<double> coverage_chain(std::size_t k_marked, std::size_t runs) {
  if (k_marked < 2) throw std::invalid_argument("coverage_chain: K < 2");
  const double pairs = static_cast<double>(pair_count(k_marked));
  std::vector<double> dist(k_marked + 1, 0.0);
  dist[0] = 1.0;
  for (std::size_t r = 0; r < runs; ++r) {
    std::vector<double> next(k_marked + 1, 0.0);
    for (std::size_t j = 0; j <= k_marked; ++j) {
      if (dist[j] == 0.0) continue;
      const std::size_t rest = k_marked - j;
      next[j] += dist[j] * static_cast<double>(pair_count(j)) / pairs;
      if (rest >= 1) next[j + 1] += dist[j] * static_cast<double>(j * rest) / pairs;
      if (rest >= 2) next[j + 2] += dist[j] * static_cast<double>(pair_count(rest)) / pairs;
    }
    dist = std::move(next);
  }
  return dist;
}

// Expected number of idealized runs until every marked vertex is found.
inline double expected_runs_to_cover(std::size_t k_marked) {
  if (k_marked < 2) throw std::invalid_argument("expected_runs_to_cover: K < 2");
  const double pairs = static_cast<double>(pair_count(k_marked));
  std::vector<double> expected(k_marked + 3, 0.0);
  for (std::size_t j = k_marked; j-- > 0;) {
    const std::size_t rest = k_marked - j;
    const double stay = static_cast<double>(pair_count(j)) / pairs;
    const double one = static_cast<double>(j * rest) / pairs;
    const double two = static_cast<double>(pair_count(rest)) / pairs;
    expected[j] = (1.0 + one * expected[j + 1] + two * expected[j + 2]) / (1.0 - stay);
  }
  return expected[0];
}

struct MonteCarloParams {
  std::size_t n_vertices = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  SearchEngine engine = SearchEngine::reduced;
};

// Simulated runs: a failed run (unmarked edge) counts as a run and reveals no
// vertices; orientation is ignored.
inline CoverageDistribution coverage_distribution_mc(std::size_t k_marked,
                                                     std::size_t runs,
                                                     const MonteCarloParams& params) {
  if (runs < 1 || params.trials < 1) {
    throw std::invalid_argument("coverage_distribution: runs and trials must be >= 1");
  }
  if (k_marked > 64) throw std::invalid_argument("coverage_distribution: K > 64");
  const auto config =
      WalkConfig::first_k(params.n_vertices, k_marked, Phase::half_pi());
  const SearchRunner runner(config, params.engine);
  std::mt19937_64 rng(params.seed);
  QueryLedger ledger;
  std::vector<std::uint64_t> counts(k_marked + 1, 0);
  std::uint64_t successes = 0;
  for (std::size_t t = 0; t < params.trials; ++t) {
    std::uint64_t seen = 0;
    for (std::size_t r = 0; r < runs; ++r) {
      const auto outcome = runner.run(rng, ledger);
      if (!outcome.success) continue;
      ++successes;
      seen |= (std::uint64_t{1} << outcome.edge.from) | (std::uint64_t{1} << outcome.edge.to);
    }
    ++counts[static_cast<std::size_t>(std::popcount(seen))];
  }
  CoverageDistribution d;
  d.runs = runs;
  d.trials = params.trials;
  for (std::size_t j = 0; j <= k_marked; ++j) {
    if (counts[j] > 0) {
      d.probabilities[j] =
          static_cast<double>(counts[j]) / static_cast<double>(params.trials);
    }
  }
  d.success_rate = static_cast<double>(successes) /
                   static_cast<double>(params.trials * runs);
  d.oracle_calls = ledger.quantum_calls;
  return d;
}

}  // namespace qwalk
