#pragma once

// Experiment driver behind the `walk` command line: spec validation, the
// run / stats / verify commands, and CSV / JSON export.
//
// Output layout (see docs/output_format.md):
//   csv  : rows at --out, summary at <out>.summary.csv
//   json : {"spec": ..., "rows": [...], "summary": ...} at --out

#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "qwalk/oracle_circuit.hpp"
#include "qwalk/reduced_model.hpp"
#include "qwalk/search_stats.hpp"
#include "qwalk/verify.hpp"
#include "qwalk/walk_core.hpp"

namespace qwalk {

enum ExitCode : int {
  kExitOk = 0,
  kExitVerifyFailed = 1,
  kExitInvalidInput = 2,
  kExitIoFailure = 3,
};

class InvalidSpec : public std::invalid_argument {
 public:
  InvalidSpec(std::string field, const std::string& message)
      : std::invalid_argument("invalid --" + field + ": " + message),
        field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Engine { full, reduced, oracle };
enum class OutputFormat { csv, json };
enum class StatsMode { exact, mc };

inline std::string to_string(Engine e) {
  switch (e) {
    case Engine::full: return "full";
    case Engine::reduced: return "reduced";
    case Engine::oracle: return "oracle";
  }
  return "?";
}

struct NRange {
  std::size_t first = 0;
  std::size_t last = 0;
  std::size_t step = 1;
};

struct ExperimentSpec {
  std::optional<std::size_t> n_vertices;
  std::optional<NRange> n_range;
  std::optional<std::size_t> k_marked;
  std::optional<std::vector<std::size_t>> marked_list;
  std::string phase_token = "pi/2";
  std::optional<std::size_t> steps;  // empty: auto = optimal_steps
  Engine engine = Engine::reduced;
  std::uint64_t seed = 0;
  std::size_t trials = 10000;
  std::size_t runs = 2;
  StatsMode mode = StatsMode::exact;
  std::string out;  // empty: stdout
  OutputFormat format = OutputFormat::csv;
};

// "pi", "pi/2", "-pi/4", "3pi/4", "0", or plain radians ("1.25").
inline Phase parse_phase(const std::string& token) {
  const auto pos = token.find("pi");
  if (pos == std::string::npos) {
    double value = 0.0;
    const auto* end = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(token.data(), end, value);
    if (ec != std::errc{} || ptr != end || token.empty() || !std::isfinite(value)) {
      throw InvalidSpec("phase", "cannot parse '" + token + "'");
    }
    return Phase::radians(value);
  }
  std::string head = token.substr(0, pos);
  const std::string tail = token.substr(pos + 2);
  long numerator = 1;
  if (head == "-") {
    numerator = -1;
  } else if (!head.empty()) {
    auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), numerator);
    if (ec != std::errc{} || ptr != head.data() + head.size()) {
      throw InvalidSpec("phase", "cannot parse '" + token + "'");
    }
  }
  long denominator = 1;
  if (!tail.empty()) {
    if (tail[0] != '/') throw InvalidSpec("phase", "cannot parse '" + token + "'");
    auto [ptr, ec] = std::from_chars(tail.data() + 1, tail.data() + tail.size(), denominator);
    if (ec != std::errc{} || ptr != tail.data() + tail.size() || denominator <= 0) {
      throw InvalidSpec("phase", "cannot parse '" + token + "'");
    }
  }
  if ((4 * numerator) % denominator == 0) {
    return Phase::quarter_pi(static_cast<int>(4 * numerator / denominator));
  }
  return Phase::radians(std::numbers::pi * static_cast<double>(numerator) /
                        static_cast<double>(denominator));
}

namespace detail {

inline std::size_t parse_count(const std::string& text, const std::string& field) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw InvalidSpec(field, "expected a nonnegative integer, got '" + text + "'");
  }
  return v;
}

}  // namespace detail

// "a:b:step" (inclusive); step defaults to 1.
inline NRange parse_range(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() < 2 || parts.size() > 3) {
    throw InvalidSpec("n-range", "expected a:b or a:b:step, got '" + text + "'");
  }
  NRange r{detail::parse_count(parts[0], "n-range"),
           detail::parse_count(parts[1], "n-range"),
           parts.size() == 3 ? detail::parse_count(parts[2], "n-range") : 1};
  if (r.step == 0 || r.first > r.last) {
    throw InvalidSpec("n-range", "need first <= last and step >= 1");
  }
  return r;
}

inline std::vector<std::size_t> parse_marked_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ',');) {
    out.push_back(detail::parse_count(p, "marked-list"));
  }
  return out;
}

// Walk configuration for one N; validates the marked set against N.
inline WalkConfig make_config(const ExperimentSpec& spec, std::size_t n_vertices,
                              const Phase& phase) {
  if (n_vertices < 3) throw InvalidSpec("n", "N must be >= 3");
  std::vector<std::size_t> marked;
  if (spec.marked_list) {
    marked = *spec.marked_list;
    if (spec.k_marked && *spec.k_marked != marked.size()) {
      throw InvalidSpec("marked-list", "has " + std::to_string(marked.size()) +
                                           " vertices but --k is " +
                                           std::to_string(*spec.k_marked));
    }
  } else {
    if (!spec.k_marked) throw InvalidSpec("k", "missing");
    if (*spec.k_marked > n_vertices) {
      throw InvalidSpec("k", "K=" + std::to_string(*spec.k_marked) + " exceeds N=" +
                                 std::to_string(n_vertices));
    }
    for (std::size_t i = 0; i < *spec.k_marked; ++i) marked.push_back(i);
  }
  try {
    return WalkConfig(n_vertices, marked, phase);
  } catch (const std::invalid_argument& e) {
    throw InvalidSpec("marked-list", e.what());
  }
}

struct StepRow {
  std::size_t step = 0;
  double p_marked = 0.0;
  std::array<double, 4> p_w{};  // NaN when the reduced basis does not exist
  double residual = 0.0;
  double norm_error = 0.0;
};

struct RunSummary {
  std::size_t n_vertices = 0;
  std::size_t k_marked = 0;
  double phase = 0.0;
  Engine engine = Engine::reduced;
  std::size_t steps = 0;
  std::optional<std::size_t> n_opt;
  std::size_t peak_step = 0;
  double peak_probability = 0.0;
  std::uint64_t oracle_calls_quantum = 0;
  double classical_queries_expected = std::numeric_limits<double>::quiet_NaN();
};

struct RunResult {
  std::vector<StepRow> rows;
  RunSummary summary;
};

inline bool reduced_basis_exists(const WalkConfig& c) {
  return c.n_vertices() >= 4 && c.k_marked() >= 2 && c.k_marked() + 2 <= c.n_vertices();
}

inline RunResult run_experiment(const WalkConfig& config, Engine engine,
                                std::optional<std::size_t> steps_request) {
  const auto n = config.n_vertices();
  const auto k = config.k_marked();
  const bool has_basis = reduced_basis_exists(config);
  if (engine == Engine::reduced && !has_basis) {
    throw InvalidSpec("k", "reduced engine needs 2 <= K <= N-2 (N=" +
                               std::to_string(n) + ", K=" + std::to_string(k) + ")");
  }
  if (engine == Engine::oracle && !config.phase().is_half_pi()) {
    throw InvalidSpec("phase", "oracle engine implements phase pi/2 only");
  }
  RunResult result;
  auto& summary = result.summary;
  summary.n_vertices = n;
  summary.k_marked = k;
  summary.phase = config.phase().angle();
  summary.engine = engine;
  if (has_basis) summary.n_opt = optimal_steps(n, k);
  if (k >= 2) summary.classical_queries_expected = random_pairs_expected_queries(n, k);

  if (steps_request) {
    summary.steps = *steps_request;
  } else {
    if (!config.phase().is_half_pi()) {
      throw InvalidSpec("steps", "'auto' requires --phase pi/2");
    }
    if (!has_basis) throw InvalidSpec("steps", "'auto' requires 2 <= K <= N-2");
    summary.steps = *summary.n_opt;
  }

  auto record = [&](StepRow row) {
    if (result.rows.empty() || row.p_marked > summary.peak_probability) {
      summary.peak_probability = row.p_marked;
      summary.peak_step = row.step;
    }
    result.rows.push_back(row);
  };

  if (engine == Engine::reduced) {
    const auto op = reduced_operator(n, k, config.phase());
    const auto spectrum = spectral_decompose(op);
    const auto init = reduced_initial_state(n, k);
    for (std::size_t s = 0; s <= summary.steps; ++s) {
      const auto state = evolve_reduced(init, spectrum, s);
      StepRow row;
      row.step = s;
      for (int i = 0; i < 4; ++i) row.p_w[i] = state.weight(i);
      row.p_marked = row.p_w[3];
      row.residual = 0.0;
      row.norm_error = std::abs(std::sqrt(state.squared_norm()) - 1.0);
      record(row);
    }
    summary.oracle_calls_quantum = 2 * summary.steps;
    return result;
  }

  const OracleFunction f(config);
  QueryLedger ledger;
  auto state = initial_state(n);
  for (std::size_t s = 0;; ++s) {
    StepRow row;
    row.step = s;
    row.p_marked = marked_probability(state, config);
    if (has_basis) {
      const auto proj = project(state, config);
      for (int i = 0; i < 4; ++i) row.p_w[i] = proj.reduced.weight(i);
      row.residual = proj.residual;
    } else {
      row.p_w.fill(std::numeric_limits<double>::quiet_NaN());
      row.residual = std::numeric_limits<double>::quiet_NaN();
    }
    row.norm_error = std::abs(state.norm() - 1.0);
    record(row);
    if (s == summary.steps) break;
    state = engine == Engine::oracle ? oracle_step(state, f, ledger)
                                     : apply_step(state, config);
  }
  summary.oracle_calls_quantum =
      engine == Engine::oracle ? ledger.quantum_calls : 2 * summary.steps;
  return result;
}

// ---- formatting ----------------------------------------------------------

// 17 significant digits: round-trips every double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline constexpr const char* kStepHeader =
    "step,p_marked,p_w1,p_w2,p_w3,p_w4,residual,norm_error";
inline constexpr const char* kRunSummaryHeader =
    "n_vertices,k_marked,phase,engine,steps,n_opt,peak_step,peak_probability,"
    "oracle_calls_quantum,classical_queries_expected";

inline void write_step_rows_csv(std::ostream& os, const std::vector<StepRow>& rows) {
  os << kStepHeader << '\n';
  for (const auto& r : rows) {
    os << r.step << ',' << format_double(r.p_marked);
    for (double p : r.p_w) os << ',' << format_double(p);
    os << ',' << format_double(r.residual) << ',' << format_double(r.norm_error) << '\n';
  }
}

inline void write_run_summary_csv(std::ostream& os,
                                  const std::vector<RunSummary>& summaries) {
  os << kRunSummaryHeader << '\n';
  for (const auto& s : summaries) {
    os << s.n_vertices << ',' << s.k_marked << ',' << format_double(s.phase) << ','
       << to_string(s.engine) << ',' << s.steps << ','
       << (s.n_opt ? std::to_string(*s.n_opt) : std::string()) << ','
       << s.peak_step << ',' << format_double(s.peak_probability) << ','
       << s.oracle_calls_quantum << ',' << format_double(s.classical_queries_expected)
       << '\n';
  }
}

inline nlohmann::json json_number(double v) {
  return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v);
}

inline nlohmann::json to_json(const StepRow& r) {
  return {{"step", r.step},
          {"p_marked", json_number(r.p_marked)},
          {"p_w1", json_number(r.p_w[0])},
          {"p_w2", json_number(r.p_w[1])},
          {"p_w3", json_number(r.p_w[2])},
          {"p_w4", json_number(r.p_w[3])},
          {"residual", json_number(r.residual)},
          {"norm_error", json_number(r.norm_error)}};
}

inline nlohmann::json to_json(const RunSummary& s) {
  return {{"n_vertices", s.n_vertices},
          {"k_marked", s.k_marked},
          {"phase", s.phase},
          {"engine", to_string(s.engine)},
          {"steps", s.steps},
          {"n_opt", s.n_opt ? nlohmann::json(*s.n_opt) : nlohmann::json(nullptr)},
          {"peak_step", s.peak_step},
          {"peak_probability", s.peak_probability},
          {"oracle_calls_quantum", s.oracle_calls_quantum},
          {"classical_queries_expected", json_number(s.classical_queries_expected)}};
}

inline nlohmann::json spec_json(const std::string& command, const ExperimentSpec& spec) {
  nlohmann::json j;
  j["command"] = command;
  if (spec.n_vertices) j["n"] = *spec.n_vertices;
  if (spec.n_range) {
    j["n_range"] = {spec.n_range->first, spec.n_range->last, spec.n_range->step};
  }
  if (spec.k_marked) j["k"] = *spec.k_marked;
  if (spec.marked_list) j["marked_list"] = *spec.marked_list;
  j["phase"] = spec.phase_token;
  j["steps"] = spec.steps ? nlohmann::json(*spec.steps) : nlohmann::json("auto");
  j["engine"] = to_string(spec.engine);
  j["seed"] = spec.seed;
  return j;
}

namespace detail {

// Writes `body` to `path`, or to `fallback` when path is empty.
template <class Body>
void emit(const std::string& path, std::ostream& fallback, Body&& body) {
  if (path.empty()) {
    body(fallback);
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw OutputError("cannot open '" + path + "' for writing");
  body(file);
  file.flush();
  if (!file) throw OutputError("write to '" + path + "' failed");
}

inline std::string summary_path(const std::string& out) {
  return out.empty() ? out : out + ".summary.csv";
}

}  // namespace detail

// ---- commands ------------------------------------------------------------

inline int cmd_run(const ExperimentSpec& spec, std::ostream& out, std::ostream& err) {
  try {
    const Phase phase = parse_phase(spec.phase_token);
    if (spec.n_vertices && spec.n_range) {
      throw InvalidSpec("n-range", "give either --n or --n-range, not both");
    }
    if (!spec.n_vertices && !spec.n_range) throw InvalidSpec("n", "missing");

    if (spec.n_vertices) {
      const auto config = make_config(spec, *spec.n_vertices, phase);
      const auto result = run_experiment(config, spec.engine, spec.steps);
      if (spec.format == OutputFormat::csv) {
        detail::emit(spec.out, out,
                     [&](std::ostream& os) { write_step_rows_csv(os, result.rows); });
        detail::emit(detail::summary_path(spec.out), out, [&](std::ostream& os) {
          write_run_summary_csv(os, {result.summary});
        });
      } else {
        nlohmann::json doc;
        doc["spec"] = spec_json("run", spec);
        doc["rows"] = nlohmann::json::array();
        for (const auto& r : result.rows) doc["rows"].push_back(to_json(r));
        doc["summary"] = to_json(result.summary);
        detail::emit(spec.out, out, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
      }
      return kExitOk;
    }

    // Sweep: one summary row per N, in increasing N.
    std::vector<RunSummary> summaries;
    for (std::size_t n = spec.n_range->first; n <= spec.n_range->last;
         n += spec.n_range->step) {
      const auto config = make_config(spec, n, phase);
      summaries.push_back(run_experiment(config, spec.engine, spec.steps).summary);
    }
    if (spec.format == OutputFormat::csv) {
      detail::emit(spec.out, out,
                   [&](std::ostream& os) { write_run_summary_csv(os, summaries); });
    } else {
      nlohmann::json doc;
      doc["spec"] = spec_json("run", spec);
      doc["rows"] = nlohmann::json::array();
      doc["summary"] = nlohmann::json::array();
      for (const auto& s : summaries) doc["summary"].push_back(to_json(s));
      detail::emit(spec.out, out, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
    }
    return kExitOk;
  } catch (const InvalidSpec& e) {
    err << "walk run: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const OutputError& e) {
    err << "walk run: " << e.what() << '\n';
    return kExitIoFailure;
  } catch (const std::invalid_argument& e) {
    err << "walk run: " << e.what() << '\n';
    return kExitInvalidInput;
  }
}

inline constexpr const char* kStatsHeader = "j,probability,exact";
inline constexpr const char* kStatsSummaryHeader =
    "k_marked,runs,mode,expected_runs_to_cover,trials,n_vertices,success_rate,"
    "oracle_calls_quantum";

inline int cmd_stats(const ExperimentSpec& spec, std::ostream& out, std::ostream& err) {
  try {
    if (!spec.k_marked || *spec.k_marked < 2) {
      throw InvalidSpec("k", "stats needs K >= 2");
    }
    if (*spec.k_marked > 64) throw InvalidSpec("k", "K must be <= 64");
    if (spec.runs < 1) throw InvalidSpec("runs", "need at least one run");
    const auto k = *spec.k_marked;

    CoverageDistribution dist;
    if (spec.mode == StatsMode::exact) {
      try {
        dist = coverage_distribution_exact(k, spec.runs);
      } catch (const std::invalid_argument& e) {
        throw InvalidSpec("runs", e.what());
      }
    } else {
      if (!spec.n_vertices) throw InvalidSpec("n", "mc mode needs --n");
      if (*spec.n_vertices < k + 2) throw InvalidSpec("n", "mc mode needs N >= K+2");
      if (spec.trials < 1) throw InvalidSpec("trials", "need at least one trial");
      if (spec.engine == Engine::full) {
        throw InvalidSpec("engine", "mc mode supports oracle or reduced");
      }
      dist = coverage_distribution_mc(
          k, spec.runs,
          {*spec.n_vertices, spec.trials, spec.seed,
           spec.engine == Engine::oracle ? SearchEngine::oracle : SearchEngine::reduced});
    }
    const double expected_runs = expected_runs_to_cover(k);
    const bool mc = spec.mode == StatsMode::mc;

    for (const auto& [j, p] : dist.probabilities) {
      out << "j=" << j << ": " << format_double(p);
      if (auto it = dist.exact.find(j); it != dist.exact.end()) {
        out << " (" << it->second.str() << ")";
      }
      out << '\n';
    }
    out << "expected_runs_to_cover: " << format_double(expected_runs) << " (idealized)\n";
    if (mc) {
      out << "success_rate: " << format_double(dist.success_rate) << '\n'
          << "oracle_calls_quantum: " << dist.oracle_calls << '\n';
    }

    if (spec.out.empty()) return kExitOk;
    if (spec.format == OutputFormat::csv) {
      detail::emit(spec.out, out, [&](std::ostream& os) {
        os << kStatsHeader << '\n';
        for (const auto& [j, p] : dist.probabilities) {
          auto it = dist.exact.find(j);
          os << j << ',' << format_double(p) << ','
             << (it == dist.exact.end() ? std::string() : it->second.str()) << '\n';
        }
      });
      detail::emit(detail::summary_path(spec.out), out, [&](std::ostream& os) {
        os << kStatsSummaryHeader << '\n'
           << k << ',' << spec.runs << ',' << (mc ? "simulated" : "idealized") << ','
           << format_double(expected_runs) << ',' << (mc ? dist.trials : 0) << ','
           << (mc ? std::to_string(*spec.n_vertices) : std::string()) << ','
           << (mc ? format_double(dist.success_rate) : std::string()) << ','
           << (mc ? std::to_string(dist.oracle_calls) : std::string()) << '\n';
      });
    } else {
      nlohmann::json doc;
      doc["spec"] = {{"command", "stats"},
                     {"k", k},
                     {"runs", spec.runs},
                     {"mode", mc ? "mc" : "exact"},
                     {"seed", spec.seed}};
      if (mc) {
        doc["spec"]["n"] = *spec.n_vertices;
        doc["spec"]["trials"] = spec.trials;
        doc["spec"]["engine"] = to_string(spec.engine);
      }
      doc["rows"] = nlohmann::json::array();
      for (const auto& [j, p] : dist.probabilities) {
        nlohmann::json row{{"j", j}, {"probability", p}};
        if (auto it = dist.exact.find(j); it != dist.exact.end()) {
          row["exact"] = it->second.str();
        }
        doc["rows"].push_back(row);
      }
      doc["summary"] = {{"model", mc ? "simulated" : "idealized"},
                        {"expected_runs_to_cover", expected_runs}};
      if (mc) {
        doc["summary"]["success_rate"] = dist.success_rate;
        doc["summary"]["oracle_calls_quantum"] = dist.oracle_calls;
        doc["summary"]["trials"] = dist.trials;
      }
      detail::emit(spec.out, out, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
    }
    return kExitOk;
  } catch (const InvalidSpec& e) {
    err << "walk stats: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const OutputError& e) {
    err << "walk stats: " << e.what() << '\n';
    return kExitIoFailure;
  } catch (const std::invalid_argument& e) {
    err << "walk stats: " << e.what() << '\n';
    return kExitInvalidInput;
  }
}

inline int cmd_verify(const VerifyOptions& options, std::ostream& out) {
  bool all = true;
  for (const auto& r : run_verification(options)) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name
        << "  worst=" << format_double(r.worst)
        << "  tol=" << format_double(r.tolerance);
    if (!r.passed) out << "  first failure: " << r.first_failure;
    out << '\n';
    all = all && r.passed;
  }
  return all ? kExitOk : kExitVerifyFailed;
}

}  // namespace qwalk
