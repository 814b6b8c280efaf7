#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "delaynet/cycles.hpp"
#include "delaynet/network.hpp"
#include "delaynet/simulate.hpp"
#include "delaynet/timeshift.hpp"

namespace delaynet {

struct TimeWindow {
  double begin = 0.0;
  double end = 0.0;
};

/// Componentwise supremum norm over the window:
/// sqrt(sum over nodes of sup_t |x_j(t)|^2), with the supremum taken over the
/// dense grid knots. Invariant under per-node time shifts for windows long
/// relative to the shifts, which is what makes it an attractor fingerprint
/// across equivalent networks.
inline double attractor_norm(const Trajectory& traj, TimeWindow window) {
  if (!(window.begin < window.end)) throw ValidationError("attractor_norm: empty window");
  const double h = traj.step();
  if (window.begin < traj.start() - 1e-9 * h || window.end > traj.t_end() + 1e-9 * h) {
    throw ValidationError("attractor_norm: window outside the recorded range");
  }
  const auto i0 = static_cast<std::size_t>(std::max(0.0, std::ceil(window.begin / h - 1e-9)));
  const auto i1 =
      std::min(traj.step_count(), static_cast<std::size_t>(std::floor(window.end / h + 1e-9)));
  if (i0 > i1) throw ValidationError("attractor_norm: window contains no grid point");
  double sum = 0.0;
  for (int j = 0; j < traj.node_count(); ++j) {
    double sup = 0.0;
    for (std::size_t i = i0; i <= i1; ++i) {
      sup = std::max(sup, std::abs(traj.grid_value(i, j)));
    }
    sum += sup * sup;
  }
  return std::sqrt(sum);
}

/// Largest |xdot_j| over the window's grid knots. Below ~1e-7 the tail is an
/// equilibrium for practical purposes.
inline double max_derivative(const Trajectory& traj, TimeWindow window) {
  if (!(window.begin < window.end)) throw ValidationError("max_derivative: empty window");
  const double h = traj.step();
  const auto i0 = static_cast<std::size_t>(std::max(0.0, std::ceil(window.begin / h - 1e-9)));
  const auto i1 =
      std::min(traj.step_count(), static_cast<std::size_t>(std::floor(window.end / h + 1e-9)));
  double m = 0.0;
  for (int j = 0; j < traj.node_count(); ++j) {
    for (std::size_t i = i0; i <= i1; ++i) {
      m = std::max(m, std::abs(traj.grid_derivative(i, j)));
    }
  }
  return m;
}

/// Dominant period of the windowed signal, from the autocorrelation peak of
/// the most active node with parabolic refinement. Empty when no credible
/// peak exists (flat or aperiodic tails).
inline std::optional<double> estimate_period(const Trajectory& traj, TimeWindow window,
                                             double max_period = 500.0) {
  const double h = traj.step();
  const auto i0 = static_cast<std::size_t>(std::max(0.0, std::ceil(window.begin / h - 1e-9)));
  const auto i1 =
      std::min(traj.step_count(), static_cast<std::size_t>(std::floor(window.end / h + 1e-9)));
  if (i1 <= i0 + 8) return std::nullopt;

  // Subsample to ~0.25 time units; plenty for periods of a few units and up.
  const std::size_t stride = std::max<std::size_t>(1, static_cast<std::size_t>(0.25 / h));
  const double dt = static_cast<double>(stride) * h;

  int best_node = 0;
  double best_range = -1.0;
  for (int j = 0; j < traj.node_count(); ++j) {
    double lo = traj.grid_value(i0, j), hi = lo;
    for (std::size_t i = i0; i <= i1; i += stride) {
      lo = std::min(lo, traj.grid_value(i, j));
      hi = std::max(hi, traj.grid_value(i, j));
    }
    if (hi - lo > best_range) {
      best_range = hi - lo;
      best_node = j;
    }
  }

  std::vector<double> z;
  for (std::size_t i = i0; i <= i1; i += stride) z.push_back(traj.grid_value(i, best_node));
  const std::size_t m = z.size();
  double mean = 0.0;
  for (double x : z) mean += x;
  mean /= static_cast<double>(m);
  for (double& x : z) x -= mean;

  const std::size_t max_lag =
      std::min(m / 2, static_cast<std::size_t>(max_period / dt));
  if (max_lag < 4) return std::nullopt;
  std::vector<double> acf(max_lag + 1, 0.0);
  for (std::size_t lag = 0; lag <= max_lag; ++lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < m; ++i) s += z[i] * z[i + lag];
    acf[lag] = s / static_cast<double>(m - lag);
  }
  if (acf[0] <= 0.0) return std::nullopt;

  std::size_t first_neg = 0;
  for (std::size_t lag = 1; lag <= max_lag; ++lag) {
    if (acf[lag] < 0.0) {
      first_neg = lag;
      break;
    }
  }
  if (first_neg == 0) return std::nullopt;

  // A periodic tail repeats its autocorrelation peak at every multiple of the
  // period; take the earliest local maximum comparable to the global one.
  double best = 0.0;
  for (std::size_t lag = first_neg; lag < max_lag; ++lag) best = std::max(best, acf[lag]);
  std::size_t peak = 0;
  for (std::size_t lag = first_neg; lag + 1 <= max_lag && peak == 0; ++lag) {
    if (acf[lag] >= 0.8 * best && acf[lag] >= acf[lag - 1] && acf[lag] >= acf[lag + 1]) {
      peak = lag;
    }
  }
  if (peak == 0 || peak + 1 > max_lag || acf[peak] < 0.2 * acf[0]) return std::nullopt;

  double shift = 0.0;
  const double denom = acf[peak - 1] - 2.0 * acf[peak] + acf[peak + 1];
  if (denom < 0.0) shift = 0.5 * (acf[peak - 1] - acf[peak + 1]) / denom;
  return (static_cast<double>(peak) + shift) * dt;
}

/// Outcome of the numerical check that y_j(t) = x_j(t + eta_j) maps solutions
/// of the original network onto solutions of the shifted one.
struct EquivalenceReport {
  double max_deviation = 0.0;
  std::vector<double> per_node_deviation;
  double tolerance = 0.0;
  bool pass = false;
  double compare_from = 0.0;  // absolute time where the comparison window starts
  double window = 0.0;
};

struct VerifySettings {
  double step = 0.01;
  double transient = 5000.0;
  double window = 200.0;
  double tolerance = 1e-5;
  std::vector<double> history;  // original system's constant history; empty = all 1.0
  double zero_delay_tol = kDefaultTol;
};

/// Simulate the original network past the transient, hand the transformed
/// network an initial history sampled from the original's dense output at
/// shifted times, simulate it over the comparison window, and report the
/// largest pointwise deviation |y_j(t) - x_j(t + eta_j)|.
inline EquivalenceReport verify_shift_equivalence(const DelayNetwork& net, const TimeShift& shift,
                                                  const NodeDynamics& dynamics,
                                                  const VerifySettings& settings = {}) {
  require_valid(net);
  validate_dynamics(dynamics);
  DelayNetwork transformed = apply_timeshift(net, shift);
  for (const Link& l : transformed.links()) {
    if (l.delay < 0.0) {
      throw ValidationError("shift makes the delay of link " + std::to_string(l.id) +
                            " negative (" + std::to_string(l.delay) + ")");
    }
  }

  const double h = settings.step;
  // Snap the comparison start to the integration grid so that grid-aligned
  // shifts compare knot against knot.
  const double t0 = std::round(settings.transient / h) * h;
  double eta_min = 0.0, eta_max = 0.0;
  for (double e : shift.eta) {
    eta_min = std::min(eta_min, e);
    eta_max = std::max(eta_max, e);
  }
  const double lookback = max_delay(transformed) - eta_min + max_delay(net);
  if (t0 < lookback) {
    throw ValidationError("transient too short: need at least " + std::to_string(lookback) +
                          " time units before the comparison window");
  }

  std::vector<double> history = settings.history;
  if (history.empty()) history.assign(static_cast<std::size_t>(net.node_count()), 1.0);

  SimSpec original_spec{net,
                        dynamics,
                        history,
                        t0 + settings.window + eta_max + h,
                        h,
                        0.0,
                        settings.zero_delay_tol};
  Trajectory x = simulate(original_spec);

  // Knot-exact sampler for x at t0 + local + eta_j.
  auto x_at = [&](int node, double local, double eta) {
    const double g = (t0 + local + eta) / h;
    const double gr = std::round(g);
    if (std::abs(g - gr) < 1e-6 && gr >= 0.0 &&
        gr <= static_cast<double>(x.step_count())) {
      const auto i = static_cast<std::size_t>(gr);
      return std::pair<double, double>{x.grid_value(i, node), x.grid_derivative(i, node)};
    }
    const double t = t0 + local + eta;
    return std::pair<double, double>{x.value(node, t), x.derivative(node, t)};
  };

  auto shifted_history = [&](int node, double local) {
    return x_at(node, local, shift.eta[static_cast<std::size_t>(node)]);
  };
  detail::check_sim_spec(transformed, settings.window, h, 0.0, settings.zero_delay_tol);
  Trajectory y = detail::dispatch_integrate(transformed, dynamics, shifted_history,
                                            settings.window, h, 0.0, settings.zero_delay_tol);

  EquivalenceReport report;
  report.tolerance = settings.tolerance;
  report.compare_from = t0;
  report.window = settings.window;
  report.per_node_deviation.assign(static_cast<std::size_t>(net.node_count()), 0.0);
  for (std::size_t i = 0; i <= y.step_count(); ++i) {
    const double local = y.grid_time(i);
    for (int j = 0; j < net.node_count(); ++j) {
      const double expected = x_at(j, local, shift.eta[static_cast<std::size_t>(j)]).first;
      const double dev = std::abs(y.grid_value(i, j) - expected);
      report.per_node_deviation[static_cast<std::size_t>(j)] =
          std::max(report.per_node_deviation[static_cast<std::size_t>(j)], dev);
    }
  }
  for (double dev : report.per_node_deviation) {
    report.max_deviation = std::max(report.max_deviation, dev);
  }
  report.pass = report.max_deviation <= settings.tolerance;
  return report;
}

struct SweepSettings {
  double step = 0.05;
  double t_end = 20000.0;
  double tail = 2000.0;  // analysis window is the last `tail` time units
  int runs_per_value = 10;
  std::uint64_t seed = 0;
  double equilibrium_threshold = 1e-7;
  double history_low = 0.0;
  double history_high = 1.5;
  double zero_delay_tol = kDefaultTol;
};

struct SweepRecord {
  double value = 0.0;
  int run = 0;
  std::uint64_t seed = 0;
  double norm = 0.0;
  bool is_equilibrium = false;
  std::optional<double> period;
};

/// Scan one essential delay: reduce the base network, set the given chord's
/// delay to each value in turn (which sets that fundamental semicycle's
/// round-trip while the others stay fixed), and integrate runs_per_value
/// random constant histories per value. Records are ordered by (value index,
/// run index) and fully determined by the seed.
inline std::vector<SweepRecord> sweep_roundtrip(const DelayNetwork& base, int chord_id,
                                                const std::vector<double>& values,
                                                const NodeDynamics& dynamics,
                                                const SweepSettings& settings) {
  validate_dynamics(dynamics);
  ReductionResult reduction = reduce(base);
  if (reduction.chord_delays.find(chord_id) == reduction.chord_delays.end()) {
    throw ValidationError("link " + std::to_string(chord_id) +
                          " is not a chord of the reduced network");
  }
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ValidationError("round-trip values must be non-negative and finite");
    }
  }

  std::vector<SweepRecord> records;
  records.reserve(values.size() * static_cast<std::size_t>(std::max(settings.runs_per_value, 0)));
  for (std::size_t vi = 0; vi < values.size(); ++vi) {
    DelayNetwork net = with_delay(reduction.transformed, chord_id, values[vi]);
    const double h = std::min(settings.step, min_positive_delay(net, settings.zero_delay_tol));
    for (int run = 0; run < settings.runs_per_value; ++run) {
      const std::uint64_t run_seed = detail::splitmix64(
          settings.seed ^ detail::splitmix64(vi * 0x10001ULL + static_cast<std::uint64_t>(run)));
      std::mt19937_64 rng(run_seed);
      std::vector<double> history(static_cast<std::size_t>(net.node_count()));
      for (double& v : history) {
        v = detail::uniform_in(rng, settings.history_low, settings.history_high);
      }
      SimSpec spec{net,  dynamics,        history, settings.t_end,
                   h,    settings.t_end - settings.tail, settings.zero_delay_tol};
      Trajectory traj = simulate(spec);
      TimeWindow tail_window{traj.t_end() - settings.tail, traj.t_end()};
      SweepRecord record;
      record.value = values[vi];
      record.run = run;
      record.seed = run_seed;
      record.norm = attractor_norm(traj, tail_window);
      record.is_equilibrium =
          max_derivative(traj, tail_window) < settings.equilibrium_threshold;
      if (!record.is_equilibrium) record.period = estimate_period(traj, tail_window);
      records.push_back(std::move(record));
    }
  }
  return records;
}

}  // namespace delaynet
