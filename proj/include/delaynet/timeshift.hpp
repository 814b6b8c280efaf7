#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "delaynet/cycles.hpp"
#include "delaynet/network.hpp"

namespace delaynet {

/// Per-node time shift eta_j. Defined up to an additive constant: adding the
/// same value to every entry leaves all transformed delays unchanged.
struct TimeShift {
  std::vector<double> eta;

  static TimeShift zeros(int node_count) {
    return TimeShift{std::vector<double>(static_cast<std::size_t>(node_count), 0.0)};
  }
};

/// Transform every link delay to tau + eta(source) - eta(target). Topology is
/// unchanged; self-loop delays are unchanged. The result may carry negative
/// delays; callers that need admissible networks must check (validate_network
/// and the simulator reject negatives).
inline DelayNetwork apply_timeshift(const DelayNetwork& net, const TimeShift& shift) {
  if (static_cast<int>(shift.eta.size()) != net.node_count()) {
    throw ValidationError("time shift has " + std::to_string(shift.eta.size()) +
                          " entries for " + std::to_string(net.node_count()) + " nodes");
  }
  std::vector<Link> links = net.links();
  for (Link& l : links) {
    l.delay += shift.eta[static_cast<std::size_t>(l.source)] -
               shift.eta[static_cast<std::size_t>(l.target)];
  }
  return DelayNetwork(net.node_count(), std::move(links), net.name());
}

/// A shift keeping every transformed delay non-negative, found by
/// single-source shortest paths on the constraint graph (edge source->target
/// weighted by the delay) from a virtual root tied to every node with weight
/// zero. Normalized so min eta = 0. For a valid network (all delays >= 0)
/// such a shift always exists.
inline TimeShift feasible_shift(const DelayNetwork& net) {
  require_valid(net);
  const std::size_t n = static_cast<std::size_t>(net.node_count());
  // Virtual root: every distance starts at 0. Bellman-Ford relaxation.
  std::vector<double> dist(n, 0.0);
  for (std::size_t round = 0; round < n; ++round) {
    bool changed = false;
    for (const Link& l : net.links()) {
      double candidate = dist[static_cast<std::size_t>(l.source)] + l.delay;
      if (candidate < dist[static_cast<std::size_t>(l.target)]) {
        dist[static_cast<std::size_t>(l.target)] = candidate;
        changed = true;
      }
    }
    if (!changed) break;
  }
  double lo = *std::min_element(dist.begin(), dist.end());
  for (double& d : dist) d -= lo;
  return TimeShift{std::move(dist)};
}

/// Result of reducing a network: the shift, the transformed network whose
/// delays vanish on a spanning tree, the tree, and the surviving chord
/// delays. Each chord delay equals the generalized round-trip time of that
/// chord's fundamental semicycle in the original network.
struct ReductionResult {
  TimeShift shift;
  DelayNetwork transformed;
  SpanningTree tree;
  std::map<int, double> chord_delays;
};

/// Concentrate all delay onto at most C = L - (N-1) chords.
///
/// Works by difference-constraint potentials with tight-component merging:
/// start from a feasible shift, take the components of the subgraph of tight
/// links (transformed delay <= tol), and repeatedly shift one whole component
/// by the largest admissible amount so that an additional crossing link
/// becomes tight, until the tight subgraph spans the network. Every
/// intermediate shift keeps all transformed delays non-negative, and the loop
/// merges components at least once per pass, so it ends in at most N-1 steps.
///
/// Deterministic tie-breaking: the component not containing node 0 with the
/// smallest minimum node id is shifted, and the upper bound is preferred when
/// both bounds are finite.
inline ReductionResult reduce(const DelayNetwork& net, double tol = kDefaultTol) {
  require_valid(net);
  const int n = net.node_count();
  std::vector<double> eta = feasible_shift(net).eta;

  std::vector<double> tdelay(net.link_count(), 0.0);
  auto refresh_delays = [&] {
    for (std::size_t i = 0; i < net.links().size(); ++i) {
      const Link& l = net.links()[i];
      tdelay[i] = l.delay + eta[static_cast<std::size_t>(l.source)] -
                  eta[static_cast<std::size_t>(l.target)];
    }
  };

  // Union-find over nodes joined by tight links.
  std::vector<int> root(static_cast<std::size_t>(n));
  auto find = [&](int x) {
    while (root[static_cast<std::size_t>(x)] != x) {
      root[static_cast<std::size_t>(x)] =
          root[static_cast<std::size_t>(root[static_cast<std::size_t>(x)])];
      x = root[static_cast<std::size_t>(x)];
    }
    return x;
  };

  for (int pass = 0; pass <= n; ++pass) {
    refresh_delays();
    std::iota(root.begin(), root.end(), 0);
    for (std::size_t i = 0; i < net.links().size(); ++i) {
      const Link& l = net.links()[i];
      if (l.is_self_loop() || tdelay[i] > tol) continue;
      int a = find(l.source);
      int b = find(l.target);
      if (a != b) root[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    }

    // Smallest node id per component, skipping the component of node 0.
    int pick = -1;
    for (int j = 1; j < n; ++j) {
      if (find(j) == find(0)) continue;
      if (find(j) == j) {  // component representative == its minimum node id
        pick = j;
        break;
      }
    }
    if (pick < 0) break;  // tight subgraph spans everything

    if (pass == n) {
      throw NumericError("reduction failed to converge");  // unreachable for valid input
    }

    // Admissible uniform shift t for the picked component: crossing links
    // into it bound t from above, crossing links out of it from below.
    double hi = std::numeric_limits<double>::infinity();
    double lo = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < net.links().size(); ++i) {
      const Link& l = net.links()[i];
      if (l.is_self_loop()) continue;
      const bool src_in = find(l.source) == pick;
      const bool tgt_in = find(l.target) == pick;
      if (src_in == tgt_in) continue;
      if (tgt_in) {
        hi = std::min(hi, tdelay[i]);
      } else {
        lo = std::max(lo, -tdelay[i]);
      }
    }
    const double t = std::isfinite(hi) ? hi : lo;
    if (!std::isfinite(t)) {
      throw NumericError("reduction found an isolated component");  // unreachable when connected
    }
    for (int j = 0; j < n; ++j) {
      if (find(j) == pick) eta[static_cast<std::size_t>(j)] += t;
    }
  }

  double eta_min = *std::min_element(eta.begin(), eta.end());
  for (double& e : eta) e -= eta_min;

  // Rounding during the merges can leave residues of order eps on the tight
  // links; snap those to exact zero so the result satisfies the >= 0
  // contract and feeds straight into the simulator.
  std::vector<Link> transformed_links = apply_timeshift(net, TimeShift{eta}).links();
  for (Link& l : transformed_links) {
    if (std::abs(l.delay) <= tol) {
      l.delay = 0.0;
    } else if (l.delay < 0.0) {
      throw NumericError("reduction produced a negative delay on link " + std::to_string(l.id));
    }
  }
  ReductionResult result{TimeShift{eta},
                         DelayNetwork(net.node_count(), std::move(transformed_links), net.name()),
                         {},
                         {}};
  std::vector<char> tight(net.link_count(), 0);
  for (std::size_t i = 0; i < net.links().size(); ++i) {
    if (!net.links()[i].is_self_loop() &&
        result.transformed.links()[i].delay <= tol) {
      tight[i] = 1;
    }
  }
  result.tree = spanning_tree(net, tight);
  for (const Link& l : result.transformed.links()) {
    if (!result.tree.contains(l.id)) {
      result.chord_delays.emplace(l.id, l.delay);
    }
  }
  return result;
}

/// Dynamical equivalence test: identical topology (nodes and links by
/// id/source/target) and matching orientation-signed round-trip sums on a
/// fixed fundamental cycle basis of `a`. Signed sums, not absolute values:
/// equal |sum| with opposite signs is not a shift relation.
inline bool equivalent(const DelayNetwork& a, const DelayNetwork& b, double tol = kDefaultTol) {
  require_valid(a);
  require_valid(b);
  if (a.node_count() != b.node_count() || a.link_count() != b.link_count()) return false;
  auto key = [](const DelayNetwork& net) {
    std::vector<std::array<int, 3>> k;
    k.reserve(net.link_count());
    for (const Link& l : net.links()) k.push_back({l.id, l.source, l.target});
    std::sort(k.begin(), k.end());
    return k;
  };
  if (key(a) != key(b)) return false;

  SpanningTree tree = spanning_tree(a);
  for (const Semicycle& c : cycle_basis(a, tree)) {
    if (std::abs(signed_roundtrip(a, c) - signed_roundtrip(b, c)) > tol) return false;
  }
  return true;
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Uniform double in [0, 1) from the generator's raw output. Used instead of
/// std::uniform_real_distribution, whose mapping is implementation-defined;
/// this keeps seeded outputs identical across platforms.
inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_in(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform_unit(rng);
}

}  // namespace detail

/// Draw per-node shifts uniformly from [-amplitude, amplitude] (node 0 pinned
/// to 0) until all transformed delays come out non-negative, then return the
/// shifted network. Exactly round-trip-preserving by construction; the result
/// is always equivalent() to the input. Throws NumericError when max_tries
/// rejections are exhausted, which signals an amplitude too large for the
/// given delays.
inline DelayNetwork randomize_preserving_roundtrips(const DelayNetwork& net, std::uint64_t seed,
                                                    double amplitude, int max_tries = 1000) {
  require_valid(net);
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) {
    throw ValidationError("amplitude must be a non-negative finite number");
  }
  if (max_tries < 1) throw ValidationError("max_tries must be at least 1");

  std::mt19937_64 rng(seed);
  TimeShift shift = TimeShift::zeros(net.node_count());
  for (int attempt = 0; attempt < max_tries; ++attempt) {
    for (int j = 1; j < net.node_count(); ++j) {
      shift.eta[static_cast<std::size_t>(j)] =
          detail::uniform_in(rng, -amplitude, amplitude);
    }
    DelayNetwork candidate = apply_timeshift(net, shift);
    bool admissible = true;
    for (const Link& l : candidate.links()) {
      if (l.delay < 0.0) {
        admissible = false;
        break;
      }
    }
    if (admissible) return candidate;
  }
  throw NumericError("no admissible delay realization in " + std::to_string(max_tries) +
                     " tries; amplitude " + std::to_string(amplitude) +
                     " is too large for the given delays");
}

/// Equalize the delays of a single directed cycle through all nodes to their
/// mean, returning the shift and the homogenized network. The delay sum
/// around the ring is preserved.
inline std::pair<TimeShift, DelayNetwork> homogenize_cycle(const DelayNetwork& net) {
  require_valid(net);
  const int n = net.node_count();
  if (net.link_count() != static_cast<std::size_t>(n)) {
    throw ValidationError("not a single directed cycle: expected exactly one link per node");
  }
  std::vector<const Link*> out_link(static_cast<std::size_t>(n), nullptr);
  std::vector<int> in_degree(static_cast<std::size_t>(n), 0);
  for (const Link& l : net.links()) {
    if (out_link[static_cast<std::size_t>(l.source)] != nullptr) {
      throw ValidationError("not a single directed cycle: node " + std::to_string(l.source) +
                            " has more than one outgoing link");
    }
    out_link[static_cast<std::size_t>(l.source)] = &l;
    ++in_degree[static_cast<std::size_t>(l.target)];
  }
  for (int j = 0; j < n; ++j) {
    if (out_link[static_cast<std::size_t>(j)] == nullptr ||
        in_degree[static_cast<std::size_t>(j)] != 1) {
      throw ValidationError("not a single directed cycle: node " + std::to_string(j) +
                            " lacks the ring in/out structure");
    }
  }

  double mean = 0.0;
  for (const Link& l : net.links()) mean += l.delay;
  mean /= static_cast<double>(n);

  TimeShift shift = TimeShift::zeros(n);
  std::vector<char> visited(static_cast<std::size_t>(n), 0);
  visited[0] = 1;
  int node = 0;
  for (int step = 0; step < n - 1; ++step) {
    const Link& l = *out_link[static_cast<std::size_t>(node)];
    if (!net.contains_node(l.target) || visited[static_cast<std::size_t>(l.target)]) {
      throw ValidationError("not a single directed cycle through all nodes");
    }
    visited[static_cast<std::size_t>(l.target)] = 1;
    shift.eta[static_cast<std::size_t>(l.target)] =
        shift.eta[static_cast<std::size_t>(node)] + (l.delay - mean);
    node = l.target;
  }
  if (out_link[static_cast<std::size_t>(node)]->target != 0) {
    throw ValidationError("not a single directed cycle through all nodes");
  }
  return {shift, apply_timeshift(net, shift)};
}

}  // namespace delaynet
