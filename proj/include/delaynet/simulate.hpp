#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "delaynet/network.hpp"

namespace delaynet {

enum class DynamicsKind {
  MackeyGlass,         // xdot = -gamma*x + beta*u/(1+u^10), u = c * sum of delayed inputs
  LinearDecayCoupling  // xdot = -gamma*x + c * sum of delayed inputs
};

/// Local node dynamics, identical for every node. The coupling input of node
/// j is the sum of x_source(t - delay) over all in-links of j.
struct NodeDynamics {
  DynamicsKind kind = DynamicsKind::MackeyGlass;
  double gamma = 0.1;
  double beta = 0.2;
  double coupling = 0.525;

  static NodeDynamics mackey_glass(double gamma, double beta, double coupling) {
    return {DynamicsKind::MackeyGlass, gamma, beta, coupling};
  }
  static NodeDynamics linear_decay_coupling(double gamma, double coupling) {
    return {DynamicsKind::LinearDecayCoupling, gamma, 0.0, coupling};
  }
};

inline void validate_dynamics(const NodeDynamics& d) {
  if (!(d.gamma > 0.0) || !std::isfinite(d.gamma)) {
    throw ValidationError("dynamics: gamma must be positive and finite");
  }
  if (!(d.coupling > 0.0) || !std::isfinite(d.coupling)) {
    throw ValidationError("dynamics: coupling scale must be positive and finite");
  }
  if (!std::isfinite(d.beta)) {
    throw ValidationError("dynamics: beta must be finite");
  }
}

/// Largest link delay (0 for a delay-free network).
inline double max_delay(const DelayNetwork& net) {
  double m = 0.0;
  for (const Link& l : net.links()) m = std::max(m, l.delay);
  return m;
}

/// Smallest delay above `tol`; +infinity when every delay is effectively zero.
inline double min_positive_delay(const DelayNetwork& net, double tol = kDefaultTol) {
  double m = std::numeric_limits<double>::infinity();
  for (const Link& l : net.links()) {
    if (l.delay > tol) m = std::min(m, l.delay);
  }
  return m;
}

/// Simulation request. Histories are constant per node on [-max delay, 0],
/// matching the constant-initial-function protocol; the integrator itself
/// also accepts dense histories (used by verify_shift_equivalence).
///
/// The step must not exceed the smallest positive delay, so that delayed
/// lookups always land in completed steps or the initial history. Delays at
/// or below zero_delay_tol couple instantaneously inside stage evaluations;
/// delays strictly between zero_delay_tol and the step are rejected.
struct SimSpec {
  DelayNetwork net;
  NodeDynamics dynamics;
  std::vector<double> history;
  double t_end = 20000.0;
  double step = 0.05;
  double record_from = 0.0;
  double zero_delay_tol = kDefaultTol;
};

namespace detail {

inline double hermite(double v0, double d0, double v1, double d1, double theta, double h) {
  const double t2 = theta * theta;
  const double t3 = t2 * theta;
  return (2.0 * t3 - 3.0 * t2 + 1.0) * v0 + (t3 - 2.0 * t2 + theta) * h * d0 +
         (-2.0 * t3 + 3.0 * t2) * v1 + (t3 - t2) * h * d1;
}

inline double hermite_derivative(double v0, double d0, double v1, double d1, double theta,
                                 double h) {
  const double t2 = theta * theta;
  return ((6.0 * t2 - 6.0 * theta) * v0 + (3.0 * t2 - 4.0 * theta + 1.0) * h * d0 +
          (-6.0 * t2 + 6.0 * theta) * v1 + (3.0 * t2 - 2.0 * theta) * h * d1) /
         h;
}

}  // namespace detail

/// Dense solution record: value and derivative knots on the uniform
/// integration grid, cubic Hermite interpolation between knots, plus the
/// sampled pre-zero history segment. Evaluation is defined on
/// [earliest(), t_end()]; knots are reproduced exactly at grid points.
class Trajectory {
 public:
  Trajectory() = default;

  Trajectory(int node_count, double step, double start, std::vector<double> hist_values,
             std::vector<double> hist_derivs, std::vector<double> values,
             std::vector<double> derivs)
      : n_(node_count),
        step_(step),
        start_(start),
        hist_values_(std::move(hist_values)),
        hist_derivs_(std::move(hist_derivs)),
        values_(std::move(values)),
        derivs_(std::move(derivs)) {
    if (n_ <= 0 || step_ <= 0.0) throw ValidationError("trajectory: bad node count or step");
    const std::size_t nn = static_cast<std::size_t>(n_);
    if (values_.size() != derivs_.size() || values_.size() % nn != 0 || values_.empty() ||
        hist_values_.size() != hist_derivs_.size() || hist_values_.size() % nn != 0) {
      throw ValidationError("trajectory: knot array sizes do not match");
    }
    steps_ = values_.size() / nn - 1;
    hist_knots_ = hist_values_.size() / nn;
  }

  [[nodiscard]] int node_count() const { return n_; }
  [[nodiscard]] double step() const { return step_; }
  /// Start of the recorded analysis range (the simulation's record_from).
  [[nodiscard]] double start() const { return start_; }
  [[nodiscard]] double t_end() const { return static_cast<double>(steps_) * step_; }
  /// Earliest evaluable time: start of the stored history segment.
  [[nodiscard]] double earliest() const {
    return hist_knots_ == 0 ? 0.0 : -static_cast<double>(hist_knots_ - 1) * step_;
  }

  [[nodiscard]] std::size_t step_count() const { return steps_; }
  [[nodiscard]] double grid_time(std::size_t i) const { return static_cast<double>(i) * step_; }
  [[nodiscard]] double grid_value(std::size_t i, int node) const {
    return values_[i * static_cast<std::size_t>(n_) + static_cast<std::size_t>(node)];
  }
  [[nodiscard]] double grid_derivative(std::size_t i, int node) const {
    return derivs_[i * static_cast<std::size_t>(n_) + static_cast<std::size_t>(node)];
  }

  [[nodiscard]] double value(int node, double t) const { return eval(node, t, false); }
  [[nodiscard]] double derivative(int node, double t) const { return eval(node, t, true); }

 private:
  [[nodiscard]] double eval(int node, double t, bool want_derivative) const {
    if (node < 0 || node >= n_) throw ValidationError("trajectory: node out of range");
    const double g = t / step_;
    const double slack = 1e-9;
    if (g > static_cast<double>(steps_) + slack || g < (earliest() / step_) - slack) {
      throw ValidationError("trajectory: time " + std::to_string(t) +
                            " outside evaluable range");
    }
    const std::size_t nn = static_cast<std::size_t>(n_);
    const double* v = values_.data();
    const double* d = derivs_.data();
    double gl = g;
    std::size_t count = steps_ + 1;
    if (g < 0.0) {
      v = hist_values_.data();
      d = hist_derivs_.data();
      gl = g + static_cast<double>(hist_knots_ - 1);
      count = hist_knots_;
    }
    if (count < 2) {  // single-knot segment: only the knot itself is evaluable
      const std::size_t at = static_cast<std::size_t>(node);
      return want_derivative ? d[at] : v[at];
    }
    long i = static_cast<long>(std::floor(gl));
    i = std::clamp(i, 0L, static_cast<long>(count) - 2);
    const double theta = gl - static_cast<double>(i);
    const std::size_t base = static_cast<std::size_t>(i) * nn + static_cast<std::size_t>(node);
    const double v0 = v[base], d0 = d[base];
    const double v1 = v[base + nn], d1 = d[base + nn];
    return want_derivative ? detail::hermite_derivative(v0, d0, v1, d1, theta, step_)
                           : detail::hermite(v0, d0, v1, d1, theta, step_);
  }

  int n_ = 0;
  double step_ = 1.0;
  double start_ = 0.0;
  std::size_t steps_ = 0;
  std::size_t hist_knots_ = 0;
  std::vector<double> hist_values_, hist_derivs_;
  std::vector<double> values_, derivs_;
};

namespace detail {

struct MackeyGlassRhs {
  double gamma, beta, coupling;
  [[nodiscard]] double operator()(double x, double s) const {
    const double u = coupling * s;
    const double u2 = u * u;
    const double u4 = u2 * u2;
    const double u10 = u4 * u4 * u2;
    return -gamma * x + beta * u / (1.0 + u10);
  }
};

struct LinearDecayRhs {
  double gamma, coupling;
  [[nodiscard]] double operator()(double x, double s) const { return -gamma * x + coupling * s; }
};

struct InLink {
  int source;
  double lag_steps;  // delay / h, always >= 1 for delayed links
};

/// Fixed-step classical RK4 by the method of steps. HistFn(node, t) must
/// return {value, derivative} for t <= 0. Because h never exceeds the
/// smallest positive delay, every delayed lookup falls into completed steps
/// or the history segment; exactly-zero delays read the current stage state.
template <class Rhs, class HistFn>
Trajectory integrate(const DelayNetwork& net, const Rhs& rhs, HistFn&& hist, double t_end,
                     double h, double record_from, double zero_tol) {
  const int n = net.node_count();
  const std::size_t nn = static_cast<std::size_t>(n);

  std::vector<std::vector<int>> instant(nn);
  std::vector<std::vector<InLink>> delayed(nn);
  double maxdelay = 0.0;
  for (const Link& l : net.links()) {
    if (l.delay <= zero_tol) {
      instant[static_cast<std::size_t>(l.target)].push_back(l.source);
    } else {
      delayed[static_cast<std::size_t>(l.target)].push_back({l.source, l.delay / h});
      maxdelay = std::max(maxdelay, l.delay);
    }
  }

  const long steps = std::max(1L, static_cast<long>(std::ceil(t_end / h - 1e-9)));
  const long hist_steps = maxdelay > 0.0 ? static_cast<long>(std::ceil(maxdelay / h - 1e-12)) : 0;

  std::vector<double> hist_v(static_cast<std::size_t>(hist_steps + 1) * nn);
  std::vector<double> hist_d(static_cast<std::size_t>(hist_steps + 1) * nn);
  for (long i = 0; i <= hist_steps; ++i) {
    const double t = static_cast<double>(i - hist_steps) * h;
    for (int j = 0; j < n; ++j) {
      auto [value, deriv] = hist(j, t);
      hist_v[static_cast<std::size_t>(i) * nn + static_cast<std::size_t>(j)] = value;
      hist_d[static_cast<std::size_t>(i) * nn + static_cast<std::size_t>(j)] = deriv;
    }
  }

  std::vector<double> values(static_cast<std::size_t>(steps + 1) * nn);
  std::vector<double> derivs(static_cast<std::size_t>(steps + 1) * nn);

  // Dense lookup at floating grid index g; `avail` is the last knot whose
  // value and derivative are both final. g <= 0 is served by the history.
  auto sample = [&](int node, double g, long avail) -> double {
    const double* v = values.data();
    const double* d = derivs.data();
    double gl = g;
    long last = avail;
    if (g <= 0.0 || avail < 1) {  // avail < 1 only with g at 0 up to rounding
      v = hist_v.data();
      d = hist_d.data();
      gl = g + static_cast<double>(hist_steps);
      last = hist_steps;
    }
    long i = static_cast<long>(std::floor(gl));
    i = std::clamp(i, 0L, std::max(last - 1, 0L));
    const double theta = gl - static_cast<double>(i);
    const std::size_t base = static_cast<std::size_t>(i) * nn + static_cast<std::size_t>(node);
    return hermite(v[base], d[base], v[base + nn], d[base + nn], theta, h);
  };

  // k[j] = rhs at stage time index gf with stage state xs.
  auto eval_rhs = [&](double gf, const double* xs, long avail, double* k) {
    for (std::size_t j = 0; j < nn; ++j) {
      double s = 0.0;
      for (int src : instant[j]) s += xs[static_cast<std::size_t>(src)];
      for (const InLink& in : delayed[j]) s += sample(in.source, gf - in.lag_steps, avail);
      k[j] = rhs(xs[j], s);
    }
  };

  for (std::size_t j = 0; j < nn; ++j) {
    values[j] = hist_v[static_cast<std::size_t>(hist_steps) * nn + j];
  }
  eval_rhs(0.0, values.data(), 0, derivs.data());

  std::vector<double> k2(nn), k3(nn), k4(nn), xs(nn);
  for (long m = 0; m < steps; ++m) {
    const std::size_t at = static_cast<std::size_t>(m) * nn;
    const double* x0 = values.data() + at;
    const double* k1 = derivs.data() + at;  // derivative knot doubles as stage 1
    const double gf = static_cast<double>(m);

    for (std::size_t j = 0; j < nn; ++j) xs[j] = x0[j] + 0.5 * h * k1[j];
    eval_rhs(gf + 0.5, xs.data(), m, k2.data());
    for (std::size_t j = 0; j < nn; ++j) xs[j] = x0[j] + 0.5 * h * k2[j];
    eval_rhs(gf + 0.5, xs.data(), m, k3.data());
    for (std::size_t j = 0; j < nn; ++j) xs[j] = x0[j] + h * k3[j];
    eval_rhs(gf + 1.0, xs.data(), m, k4.data());

    double* x1 = values.data() + at + nn;
    bool finite = true;
    for (std::size_t j = 0; j < nn; ++j) {
      x1[j] = x0[j] + (h / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
      finite = finite && std::isfinite(x1[j]);
    }
    if (!finite) {
      throw NumericError("trajectory diverged (non-finite state) at t=" +
                         std::to_string(static_cast<double>(m + 1) * h));
    }
    eval_rhs(gf + 1.0, x1, m, derivs.data() + at + nn);
  }

  return Trajectory(n, h, record_from, std::move(hist_v), std::move(hist_d), std::move(values),
                    std::move(derivs));
}

struct ConstantHistory {
  const std::vector<double>* values;
  std::pair<double, double> operator()(int node, double) const {
    return {(*values)[static_cast<std::size_t>(node)], 0.0};
  }
};

template <class HistFn>
Trajectory dispatch_integrate(const DelayNetwork& net, const NodeDynamics& dyn, HistFn&& hist,
                              double t_end, double h, double record_from, double zero_tol) {
  switch (dyn.kind) {
    case DynamicsKind::MackeyGlass:
      return integrate(net, MackeyGlassRhs{dyn.gamma, dyn.beta, dyn.coupling},
                       std::forward<HistFn>(hist), t_end, h, record_from, zero_tol);
    case DynamicsKind::LinearDecayCoupling:
      return integrate(net, LinearDecayRhs{dyn.gamma, dyn.coupling}, std::forward<HistFn>(hist),
                       t_end, h, record_from, zero_tol);
  }
  throw ValidationError("unknown dynamics kind");
}

inline void check_sim_spec(const DelayNetwork& net, double t_end, double h, double record_from,
                           double zero_tol) {
  require_valid(net);
  if (!(h > 0.0) || !std::isfinite(h)) throw ValidationError("step must be positive");
  if (!(t_end > record_from) || record_from < 0.0) {
    throw ValidationError("need t_end > record_from >= 0");
  }
  const double minpos = min_positive_delay(net, zero_tol);
  if (h > minpos * (1.0 + 1e-12)) {
    throw NumericError("step " + std::to_string(h) + " exceeds the smallest positive delay " +
                       std::to_string(minpos) + "; lower the step");
  }
}

}  // namespace detail

/// Integrate the delay network from constant per-node histories. Classical
/// fixed-step RK4, 4th-order accurate, with delayed terms evaluated from the
/// trajectory's own cubic dense output. Deterministic: identical specs give
/// bit-identical trajectories on the same platform.
inline Trajectory simulate(const SimSpec& spec) {
  detail::check_sim_spec(spec.net, spec.t_end, spec.step, spec.record_from, spec.zero_delay_tol);
  validate_dynamics(spec.dynamics);
  if (static_cast<int>(spec.history.size()) != spec.net.node_count()) {
    throw ValidationError("history has " + std::to_string(spec.history.size()) +
                          " entries for " + std::to_string(spec.net.node_count()) + " nodes");
  }
  for (double v : spec.history) {
    if (!std::isfinite(v)) throw ValidationError("history values must be finite");
  }
  return detail::dispatch_integrate(spec.net, spec.dynamics,
                                    detail::ConstantHistory{&spec.history}, spec.t_end, spec.step,
                                    spec.record_from, spec.zero_delay_tol);
}

}  // namespace delaynet
