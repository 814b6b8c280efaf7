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

/// N-1 links spanning the underlying undirected graph. Stored sorted by id.
struct SpanningTree {
  std::vector<int> link_ids;

  [[nodiscard]] bool contains(int link_id) const {
    return std::binary_search(link_ids.begin(), link_ids.end(), link_id);
  }
};

/// One traversal step of a semicycle: the link and the direction it is
/// walked in. sign +1 walks source->target, sign -1 walks target->source.
struct SemicycleStep {
  int link_id;
  int sign;
};

/// Closed walk in the underlying undirected graph with per-link orientation
/// signs. No link id repeats; nodes may.
struct Semicycle {
  std::vector<SemicycleStep> steps;

  [[nodiscard]] std::size_t size() const { return steps.size(); }
};

/// Cycle space dimension C = L - (N - 1). Self-loops count toward L.
/// This is the number of essential delay parameters of the network.
inline int cycle_space_dimension(const DelayNetwork& net) {
  require_valid(net);
  return static_cast<int>(net.link_count()) - (net.node_count() - 1);
}

namespace detail {

/// Deterministic spanning-tree rule shared by spanning_tree() and reduce():
/// grow the visited set from node 0, always absorbing the smallest-id link
/// that crosses from visited to unvisited. Since ids are unique this yields
/// the unique id-minimal spanning tree, independent of link order. Links with
/// `allowed[index] == 0` are ignored; self-loops never qualify.
inline SpanningTree min_id_spanning_tree(const DelayNetwork& net,
                                         const std::vector<char>& allowed) {
  const int n = net.node_count();
  std::vector<char> visited(static_cast<std::size_t>(n), 0);
  visited[0] = 1;
  SpanningTree tree;
  tree.link_ids.reserve(static_cast<std::size_t>(n - 1));
  for (int picked = 0; picked < n - 1; ++picked) {
    int best_id = std::numeric_limits<int>::max();
    std::size_t best_index = 0;
    int best_new_node = -1;
    for (std::size_t i = 0; i < net.links().size(); ++i) {
      if (!allowed[i]) continue;
      const Link& l = net.links()[i];
      if (l.is_self_loop()) continue;
      const bool vs = visited[static_cast<std::size_t>(l.source)];
      const bool vt = visited[static_cast<std::size_t>(l.target)];
      if (vs == vt) continue;
      if (l.id < best_id) {
        best_id = l.id;
        best_index = i;
        best_new_node = vs ? l.target : l.source;
      }
    }
    if (best_new_node < 0) {
      throw ValidationError("link subset does not span the network");
    }
    visited[static_cast<std::size_t>(best_new_node)] = 1;
    tree.link_ids.push_back(net.links()[best_index].id);
  }
  std::sort(tree.link_ids.begin(), tree.link_ids.end());
  return tree;
}

}  // namespace detail

/// Deterministic spanning tree of the underlying undirected graph: grown from
/// node 0, candidate links crossing the visited set resolved by smallest link
/// id. Identical input gives identical output. Self-loops are never included.
inline SpanningTree spanning_tree(const DelayNetwork& net) {
  require_valid(net);
  return detail::min_id_spanning_tree(net,
                                      std::vector<char>(net.link_count(), 1));
}

/// Same rule restricted to a subset of links (mask indexed like net.links()).
/// Throws if the masked subgraph does not span all nodes.
inline SpanningTree spanning_tree(const DelayNetwork& net, const std::vector<char>& link_mask) {
  require_valid(net);
  if (link_mask.size() != net.link_count()) {
    throw ValidationError("link mask size does not match link count");
  }
  return detail::min_id_spanning_tree(net, link_mask);
}

/// The unique semicycle of tree + chord, oriented so the chord is walked
/// along its direction (sign +1): first step is the chord, followed by the
/// tree path from chord.target back to chord.source. A self-loop chord is its
/// own one-step semicycle.
inline Semicycle fundamental_semicycle(const DelayNetwork& net, const SpanningTree& tree,
                                       int chord_id) {
  require_valid(net);
  const Link& chord = net.link(chord_id);
  if (tree.contains(chord_id)) {
    throw ValidationError("link " + std::to_string(chord_id) + " is in the spanning tree");
  }
  Semicycle cycle;
  cycle.steps.push_back({chord_id, +1});
  if (chord.is_self_loop()) return cycle;

  // BFS through tree links from chord.target to chord.source.
  const int n = net.node_count();
  std::vector<int> parent_node(static_cast<std::size_t>(n), -1);
  std::vector<std::size_t> parent_link(static_cast<std::size_t>(n), 0);
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  auto adj = detail::undirected_adjacency(net);
  std::vector<char> in_tree(net.link_count(), 0);
  for (std::size_t i = 0; i < net.links().size(); ++i) {
    if (tree.contains(net.links()[i].id)) in_tree[i] = 1;
  }
  std::vector<int> queue{chord.target};
  seen[static_cast<std::size_t>(chord.target)] = 1;
  for (std::size_t head = 0; head < queue.size() && !seen[static_cast<std::size_t>(chord.source)];
       ++head) {
    int u = queue[head];
    for (const auto& [idx, v] : adj[static_cast<std::size_t>(u)]) {
      if (!in_tree[idx] || seen[static_cast<std::size_t>(v)]) continue;
      seen[static_cast<std::size_t>(v)] = 1;
      parent_node[static_cast<std::size_t>(v)] = u;
      parent_link[static_cast<std::size_t>(v)] = idx;
      queue.push_back(v);
    }
  }
  if (!seen[static_cast<std::size_t>(chord.source)]) {
    throw ValidationError("spanning tree does not connect the chord endpoints");
  }

  // Unwind source -> target, then reverse so steps run target -> source.
  std::vector<SemicycleStep> path;
  for (int u = chord.source; u != chord.target;) {
    const Link& l = net.links()[parent_link[static_cast<std::size_t>(u)]];
    int prev = parent_node[static_cast<std::size_t>(u)];
    // Walking prev -> u along the final semicycle means the stored step is
    // traversed u -> prev here, so flip when unwinding.
    path.push_back({l.id, l.target == u ? +1 : -1});
    u = prev;
  }
  std::reverse(path.begin(), path.end());
  for (const SemicycleStep& s : path) cycle.steps.push_back(s);
  return cycle;
}

/// One fundamental semicycle per non-tree link, ordered by chord id. The list
/// length always equals cycle_space_dimension(net).
inline std::vector<Semicycle> cycle_basis(const DelayNetwork& net, const SpanningTree& tree) {
  require_valid(net);
  std::vector<int> chord_ids;
  for (const Link& l : net.links()) {
    if (!tree.contains(l.id)) chord_ids.push_back(l.id);
  }
  if (chord_ids.size() + tree.link_ids.size() != net.link_count() ||
      tree.link_ids.size() != static_cast<std::size_t>(net.node_count() - 1)) {
    throw ValidationError("spanning tree is not a tree of this network");
  }
  std::sort(chord_ids.begin(), chord_ids.end());
  std::vector<Semicycle> basis;
  basis.reserve(chord_ids.size());
  for (int chord : chord_ids) {
    basis.push_back(fundamental_semicycle(net, tree, chord));
  }
  return basis;
}

namespace detail {

/// Check that the steps chain into a closed walk and that no link repeats.
inline void require_semicycle(const DelayNetwork& net, const Semicycle& c) {
  if (c.steps.empty()) throw ValidationError("empty semicycle");
  std::vector<int> used;
  auto from = [&](const SemicycleStep& s) {
    const Link& l = net.link(s.link_id);
    return s.sign > 0 ? l.source : l.target;
  };
  auto to = [&](const SemicycleStep& s) {
    const Link& l = net.link(s.link_id);
    return s.sign > 0 ? l.target : l.source;
  };
  for (const SemicycleStep& s : c.steps) {
    if (s.sign != 1 && s.sign != -1) {
      throw ValidationError("semicycle step sign must be +1 or -1");
    }
    used.push_back(s.link_id);
  }
  std::sort(used.begin(), used.end());
  if (std::adjacent_find(used.begin(), used.end()) != used.end()) {
    throw ValidationError("semicycle repeats a link");
  }
  for (std::size_t i = 0; i < c.steps.size(); ++i) {
    const SemicycleStep& cur = c.steps[i];
    const SemicycleStep& nxt = c.steps[(i + 1) % c.steps.size()];
    if (to(cur) != from(nxt)) {
      throw ValidationError("semicycle steps do not form a closed walk");
    }
  }
}

}  // namespace detail

/// Orientation-signed delay sum around the semicycle. Accumulated in link-id
/// order, so reversal negates it exactly and rotation cannot change it even
/// in floating point.
inline double signed_roundtrip(const DelayNetwork& net, const Semicycle& c) {
  detail::require_semicycle(net, c);
  std::vector<std::pair<int, double>> terms;
  terms.reserve(c.steps.size());
  for (const SemicycleStep& s : c.steps) {
    terms.emplace_back(s.link_id, static_cast<double>(s.sign) * net.link(s.link_id).delay);
  }
  std::sort(terms.begin(), terms.end());
  double sum = 0.0;
  for (const auto& [id, term] : terms) sum += term;
  return sum;
}

/// Generalized round-trip time: |signed delay sum| around the semicycle.
/// Invariant under every per-node time shift, under orientation reversal and
/// under rotation of the steps. For a self-loop it equals the loop's delay.
inline double roundtrip_time(const DelayNetwork& net, const Semicycle& c) {
  return std::abs(signed_roundtrip(net, c));
}

}  // namespace delaynet
