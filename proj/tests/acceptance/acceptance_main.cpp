// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Thresholds and protocols are pinned here, not configurable.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "delaynet/delaynet.hpp"
#include "support/generators.hpp"
#include "support/tree_oracle.hpp"

using namespace delaynet;

namespace {

struct Harness {
  int failures = 0;
  int index = 0;

  void run(const std::string& title, double time_budget_s,
           const std::function<bool(std::string&)>& body) {
    ++index;
    std::string detail;
    bool ok = false;
    const auto start = std::chrono::steady_clock::now();
    try {
      ok = body(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
      ok = false;
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (time_budget_s > 0.0 && elapsed > time_budget_s) {
      ok = false;
      detail += (detail.empty() ? "" : "; ") + std::string("exceeded time budget ") +
                std::to_string(time_budget_s) + " s";
    }
    std::printf("[%d] %s  %s (%.3f s)%s%s\n", index, ok ? "PASS" : "FAIL", title.c_str(), elapsed,
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
};

struct Cluster {
  double lo, hi, mean;
  int stationary = 0;
  int oscillatory = 0;
};

// Group sorted norms whenever the relative gap between neighbors exceeds 2%.
std::vector<Cluster> cluster_norms(std::vector<std::pair<double, bool>> norm_flags) {
  std::sort(norm_flags.begin(), norm_flags.end());
  std::vector<Cluster> clusters;
  for (const auto& [norm, is_eq] : norm_flags) {
    if (clusters.empty() || norm > clusters.back().hi * 1.02) {
      clusters.push_back({norm, norm, 0.0, 0, 0});
    }
    Cluster& c = clusters.back();
    c.hi = std::max(c.hi, norm);
    c.lo = std::min(c.lo, norm);
    (is_eq ? c.stationary : c.oscillatory) += 1;
  }
  for (Cluster& c : clusters) c.mean = 0.5 * (c.lo + c.hi);
  return clusters;
}

NodeDynamics fig2b_dynamics() { return NodeDynamics::mackey_glass(0.1, 0.2, 0.525); }

std::vector<double> seeded_history(std::uint64_t seed, int n) {
  std::mt19937_64 rng(seed);
  std::vector<double> h(static_cast<std::size_t>(n));
  for (double& v : h) v = delaynet::detail::uniform_in(rng, 0.0, 1.5);
  return h;
}

struct RunResult {
  double norm;
  bool is_equilibrium;
};

RunResult integrate_and_classify(const DelayNetwork& net, std::uint64_t history_seed) {
  const double h = std::min(0.05, min_positive_delay(net, 1e-9));
  SimSpec spec{net,
               fig2b_dynamics(),
               seeded_history(history_seed, net.node_count()),
               20000.0,
               h,
               18000.0,
               1e-9};
  Trajectory traj = simulate(spec);
  TimeWindow tail{traj.t_end() - 2000.0, traj.t_end()};
  return {attractor_norm(traj, tail), max_derivative(traj, tail) < 1e-7};
}

}  // namespace

int main() {
  Harness harness;
  const std::string fixtures = FIXTURE_DIR;

  harness.run("cycle-space counts: fig2a C=5, fig2b C=3 (L=8, N=6)", 0.0, [&](std::string& d) {
    DelayNetwork fig2a = load_network(fixtures + "/fig2a.json");
    DelayNetwork fig2b = load_network(fixtures + "/fig2b.json");
    const auto t0 = std::chrono::steady_clock::now();
    const int c_a = cycle_space_dimension(fig2a);
    const int c_b = cycle_space_dimension(fig2b);
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    d = "C(fig2a)=" + std::to_string(c_a) + " C(fig2b)=" + std::to_string(c_b) + " in " +
        std::to_string(ms) + " ms";
    return c_a == 5 && c_b == 3 && fig2b.node_count() == 6 &&
           fig2b.link_count() == 8 && ms < 1.0;
  });

  harness.run("motif reductions match the closed-form round-trips (3x1000 random)", 1.0,
              [&](std::string& d) {
                std::mt19937_64 rng(2024);
                double worst = 0.0;
                for (int trial = 0; trial < 1000; ++trial) {
                  const double t1 = testsupport::uniform(rng, 0.0, 10.0);
                  const double t2 = testsupport::uniform(rng, 0.0, 10.0);
                  const double t3 = testsupport::uniform(rng, 0.0, 10.0);
                  const double t4 = testsupport::uniform(rng, 0.0, 10.0);
                  struct Case {
                    DelayNetwork net;
                    double expect;
                  } cases[] = {
                      {DelayNetwork(2, {{0, 0, 1, t1}, {1, 0, 1, t2}}), std::abs(t1 - t2)},
                      {DelayNetwork(3, {{0, 0, 1, t1}, {1, 0, 2, t2}, {2, 1, 2, t3}}),
                       std::abs(t1 - t2 + t3)},
                      {DelayNetwork(4, {{0, 0, 1, t1}, {1, 2, 1, t2}, {2, 3, 2, t3},
                                        {3, 3, 0, t4}}),
                       std::abs(t1 - t2 - t3 + t4)},
                  };
                  for (const Case& c : cases) {
                    ReductionResult r = reduce(c.net);
                    if (r.chord_delays.size() != 1) return false;
                    for (int id : r.tree.link_ids) {
                      if (std::abs(r.transformed.delay_of(id)) > 1e-9) return false;
                    }
                    for (const Link& l : r.transformed.links()) {
                      if (l.delay < -1e-9) return false;
                    }
                    worst = std::max(worst,
                                     std::abs(r.chord_delays.begin()->second - c.expect));
                  }
                }
                char buf[64];
                  std::snprintf(buf, sizeof(buf), "worst chord deviation %.2e", worst);
                  d = buf;
                return worst < 1e-8;
              });

  harness.run("vanishing round-trip eliminates every delay (motif II)", 0.0,
              [&](std::string& d) {
                std::mt19937_64 rng(77);
                double worst = 0.0;
                for (int trial = 0; trial < 100; ++trial) {
                  const double t1 = testsupport::uniform(rng, 0.0, 10.0);
                  const double t3 = testsupport::uniform(rng, 0.0, std::min(10.0, 10.0 - t1));
                  const double t2 = t1 + t3;  // t1 - t2 + t3 = 0
                  ReductionResult r = reduce(
                      DelayNetwork(3, {{0, 0, 1, t1}, {1, 0, 2, t2}, {2, 1, 2, t3}}));
                  for (const Link& l : r.transformed.links()) {
                    worst = std::max(worst, std::abs(l.delay));
                  }
                }
                char buf[64];
                  std::snprintf(buf, sizeof(buf), "largest residual delay %.2e", worst);
                  d = buf;
                return worst <= 1e-9;
              });

  harness.run("spanning-tree oracle agrees on 500 random networks", 30.0, [&](std::string& d) {
    std::mt19937_64 rng(31337);
    int checked = 0;
    while (checked < 500) {
      DelayNetwork net = testsupport::random_connected_network(rng, 5, 7, 0.0, 10.0);
      if (!validate_network(net).ok()) continue;
      ++checked;
      testsupport::OracleResult oracle = testsupport::enumerate_feasible_trees(net);
      if (oracle.feasible.empty()) return false;
      ReductionResult r = reduce(net);
      if (!testsupport::tree_is_feasible(net, r.tree.link_ids)) return false;
    }
    d = "500 instances";
    return true;
  });

  harness.run("round-trip invariance over 1000 random (net, shift, semicycle)", 1.0,
              [&](std::string& d) {
                std::mt19937_64 rng(4096);
                int checked = 0;
                double worst = 0.0;
                while (checked < 1000) {
                  DelayNetwork net = testsupport::random_connected_network(rng, 5, 7, 0.0, 10.0);
                  if (!validate_network(net).ok()) continue;
                  Semicycle c = testsupport::random_semicycle(rng, net);
                  if (c.steps.empty()) continue;
                  ++checked;
                  TimeShift eta = testsupport::random_shift(rng, net.node_count(), 10.0);
                  const double before = roundtrip_time(net, c);
                  const double after = roundtrip_time(apply_timeshift(net, eta), c);
                  worst = std::max(worst, std::abs(after - before));
                  if (std::abs(after - before) >= net.node_count() * 1e-9) return false;
                }
                char buf[64];
                  std::snprintf(buf, sizeof(buf), "worst drift %.2e", worst);
                  d = buf;
                return true;
              });

  harness.run("integrator order 4.0 +/- 0.2 on the linear decay test", 0.0,
              [&](std::string& d) {
                auto err = [](double h) {
                  SimSpec spec{DelayNetwork(1, {}), NodeDynamics::linear_decay_coupling(1.0, 1.0),
                               {1.0}, 5.0, h, 0.0, 1e-9};
                  return std::abs(simulate(spec).value(0, 5.0) - std::exp(-5.0));
                };
                const double e1 = err(0.1), e2 = err(0.05), e3 = err(0.025);
                const double p12 = std::log2(e1 / e2);
                const double p23 = std::log2(e2 / e3);
                d = "orders " + std::to_string(p12) + ", " + std::to_string(p23);
                return std::abs(p12 - 4.0) <= 0.2 && std::abs(p23 - 4.0) <= 0.2;
              });

  harness.run("ring-of-four shift correspondence below 1e-5 at desk scale", 60.0,
              [&](std::string& d) {
                DelayNetwork ring = load_network(fixtures + "/ring4.json");
                VerifySettings settings;
                settings.step = 0.01;
                settings.transient = 5000.0;
                settings.window = 200.0;
                settings.tolerance = 1e-5;
                settings.history = {0.5, 0.9, 1.2, 0.3};
                EquivalenceReport report = verify_shift_equivalence(
                    ring, TimeShift{{-5.8, 0.0, -5.6, -18.4}},
                    NodeDynamics::mackey_glass(0.1, 0.2, 4.0), settings);
                char buf[64];
                std::snprintf(buf, sizeof(buf), "max deviation %.2e", report.max_deviation);
                d = buf;
                return report.pass && report.max_deviation < 1e-5;
              });

  harness.run("fifty random realizations cluster into one stationary and one oscillatory norm",
              600.0, [&](std::string& d) {
                DelayNetwork fig2b = load_network(fixtures + "/fig2b.json");
                std::vector<std::pair<double, bool>> norm_flags;
                for (int i = 0; i < 50; ++i) {
                  DelayNetwork realization = randomize_preserving_roundtrips(
                      fig2b, 1000 + static_cast<std::uint64_t>(i), 0.3, 1000);
                  if (!equivalent(fig2b, realization)) return false;
                  RunResult r = integrate_and_classify(
                      realization, 555000 + static_cast<std::uint64_t>(i));
                  norm_flags.emplace_back(r.norm, r.is_equilibrium);
                }
                auto clusters = cluster_norms(norm_flags);
                char buf[256];
                std::snprintf(buf, sizeof(buf), "%zu clusters:", clusters.size());
                d = buf;
                bool ok = clusters.size() <= 2 && clusters.size() >= 1;
                int stationary_clusters = 0, oscillatory_clusters = 0;
                for (const Cluster& c : clusters) {
                  const double spread = (c.hi - c.lo) / c.mean;
                  std::snprintf(buf, sizeof(buf), " norm~%.4f (eq %d, osc %d, spread %.2e)",
                                c.mean, c.stationary, c.oscillatory, spread);
                  d += buf;
                  ok = ok && spread < 0.01;
                  ok = ok && (c.stationary == 0 || c.oscillatory == 0);
                  (c.stationary > 0 ? stationary_clusters : oscillatory_clusters) += 1;
                }
                ok = ok && stationary_clusters == 1 && oscillatory_clusters == 1;
                return ok;
              });

  harness.run("zero first round-trip leaves only equilibria (at most two norms)", 600.0,
              [&](std::string& d) {
                DelayNetwork fig2b = load_network(fixtures + "/fig2b.json");
                ReductionResult red = reduce(fig2b);
                const int chord1 = red.chord_delays.begin()->first;
                DelayNetwork net = with_delay(red.transformed, chord1, 0.0);
                std::vector<std::pair<double, bool>> norm_flags;
                for (int i = 0; i < 50; ++i) {
                  RunResult r =
                      integrate_and_classify(net, 909000 + static_cast<std::uint64_t>(i));
                  if (!r.is_equilibrium) {
                    d = "run " + std::to_string(i) + " did not reach an equilibrium";
                    return false;
                  }
                  norm_flags.emplace_back(r.norm, r.is_equilibrium);
                }
                auto clusters = cluster_norms(norm_flags);
                char buf[128];
                std::snprintf(buf, sizeof(buf), "%zu equilibrium norms:", clusters.size());
                d = buf;
                for (const Cluster& c : clusters) {
                  std::snprintf(buf, sizeof(buf), " %.4f(x%d)", c.mean,
                                c.stationary + c.oscillatory);
                  d += buf;
                }
                return clusters.size() <= 2;
              });

  std::printf("%d criteria: %d passed, %d failed\n", harness.index,
              harness.index - harness.failures, harness.failures);
  return harness.failures;
}
