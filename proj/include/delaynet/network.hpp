#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <queue>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace delaynet {

/// Absolute tolerance used for zero/equality tests on delays throughout the
/// library. Delays only ever enter linear combinations, so error growth is
/// bounded by path length.
inline constexpr double kDefaultTol = 1e-9;

/// Input data failed validation (bad network, malformed semicycle, bad file).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numeric procedure failed (divergent trajectory, exhausted retry budget,
/// step-size constraint).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Directed connection from `source` to `target` carrying the signal
/// propagation delay. Parallel links and self-loops are allowed; the id
/// distinguishes them.
struct Link {
  int id = 0;
  int source = 0;
  int target = 0;
  double delay = 0.0;

  [[nodiscard]] bool is_self_loop() const { return source == target; }
};

/// Directed multigraph with per-link delays. Nodes are the integers
/// 0..node_count()-1. Immutable after construction; all operations on it are
/// pure functions, so values are safe to share across threads.
///
/// Construction accepts arbitrary link data; use validate_network() /
/// require_valid() to check the invariants (endpoints in range, delays
/// finite and non-negative, unique link ids, connected underlying graph).
/// apply_timeshift() may legitimately produce negative delays, which is why
/// the container itself does not reject them.
class DelayNetwork {
 public:
  DelayNetwork() = default;

  DelayNetwork(int node_count, std::vector<Link> links, std::string name = {})
      : node_count_(node_count), links_(std::move(links)), name_(std::move(name)) {
    index_by_id_.reserve(links_.size());
    for (std::size_t i = 0; i < links_.size(); ++i) {
      index_by_id_.emplace(links_[i].id, i);  // first occurrence wins; duplicates are a validation error
    }
  }

  [[nodiscard]] int node_count() const { return node_count_; }
  [[nodiscard]] std::size_t link_count() const { return links_.size(); }
  [[nodiscard]] const std::vector<Link>& links() const { return links_; }
  [[nodiscard]] const std::string& name() const { return name_; }

  [[nodiscard]] const Link* find_link(int link_id) const {
    auto it = index_by_id_.find(link_id);
    return it == index_by_id_.end() ? nullptr : &links_[it->second];
  }

  /// Link lookup that throws ValidationError on an unknown id.
  [[nodiscard]] const Link& link(int link_id) const {
    const Link* l = find_link(link_id);
    if (l == nullptr) {
      throw ValidationError("unknown link id " + std::to_string(link_id));
    }
    return *l;
  }

  [[nodiscard]] double delay_of(int link_id) const { return link(link_id).delay; }

  [[nodiscard]] bool contains_node(int node) const { return node >= 0 && node < node_count_; }

 private:
  int node_count_ = 0;
  std::vector<Link> links_;
  std::string name_;
  std::unordered_map<int, std::size_t> index_by_id_;
};

/// Replace one link's delay, returning a new network.
inline DelayNetwork with_delay(const DelayNetwork& net, int link_id, double delay) {
  (void)net.link(link_id);  // throws on unknown id
  std::vector<Link> links = net.links();
  for (Link& l : links) {
    if (l.id == link_id) l.delay = delay;
  }
  return DelayNetwork(net.node_count(), std::move(links), net.name());
}

enum class ViolationKind {
  EmptyNetwork,
  DanglingEndpoint,
  NegativeDelay,
  NonFiniteDelay,
  DuplicateLinkId,
  Disconnected,
};

struct Violation {
  ViolationKind kind;
  int link_id;  // -1 when the violation is not tied to a link
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  [[nodiscard]] bool ok() const { return violations.empty(); }

  [[nodiscard]] bool has(ViolationKind kind) const {
    for (const Violation& v : violations) {
      if (v.kind == kind) return true;
    }
    return false;
  }

  [[nodiscard]] std::string summary() const {
    std::string out;
    for (const Violation& v : violations) {
      if (!out.empty()) out += "; ";
      out += v.message;
    }
    return out;
  }
};

namespace detail {

/// Undirected adjacency of the multigraph: per node, (link index, neighbor).
/// Self-loops appear once, as (index, same node).
inline std::vector<std::vector<std::pair<std::size_t, int>>> undirected_adjacency(
    const DelayNetwork& net) {
  std::vector<std::vector<std::pair<std::size_t, int>>> adj(
      static_cast<std::size_t>(std::max(net.node_count(), 0)));
  for (std::size_t i = 0; i < net.links().size(); ++i) {
    const Link& l = net.links()[i];
    if (!net.contains_node(l.source) || !net.contains_node(l.target)) continue;
    adj[static_cast<std::size_t>(l.source)].emplace_back(i, l.target);
    if (!l.is_self_loop()) {
      adj[static_cast<std::size_t>(l.target)].emplace_back(i, l.source);
    }
  }
  return adj;
}

}  // namespace detail

/// Check the full set of network invariants and report every violation found.
/// Never throws; an empty report means the network is valid. Operations that
/// require a valid network call require_valid() and reject with the same
/// diagnostics.
inline ValidationReport validate_network(const DelayNetwork& net) {
  ValidationReport report;
  if (net.node_count() <= 0) {
    report.violations.push_back({ViolationKind::EmptyNetwork, -1, "network has no nodes"});
    return report;
  }

  std::unordered_map<int, int> id_seen;
  bool endpoints_ok = true;
  for (const Link& l : net.links()) {
    if (!net.contains_node(l.source) || !net.contains_node(l.target)) {
      endpoints_ok = false;
      report.violations.push_back(
          {ViolationKind::DanglingEndpoint, l.id,
           "link " + std::to_string(l.id) + ": endpoint outside node range [0," +
               std::to_string(net.node_count() - 1) + "]"});
    }
    if (std::isnan(l.delay) || std::isinf(l.delay)) {
      report.violations.push_back({ViolationKind::NonFiniteDelay, l.id,
                                   "link " + std::to_string(l.id) + ": delay is not finite"});
    } else if (l.delay < 0.0) {
      report.violations.push_back({ViolationKind::NegativeDelay, l.id,
                                   "link " + std::to_string(l.id) + ": negative delay " +
                                       std::to_string(l.delay)});
    }
    if (++id_seen[l.id] == 2) {
      report.violations.push_back({ViolationKind::DuplicateLinkId, l.id,
                                   "duplicate link id " + std::to_string(l.id)});
    }
  }

  // Connectivity of the underlying undirected graph; skipped when endpoints
  // are already broken.
  if (endpoints_ok) {
    std::vector<char> seen(static_cast<std::size_t>(net.node_count()), 0);
    auto adj = detail::undirected_adjacency(net);
    std::queue<int> frontier;
    frontier.push(0);
    seen[0] = 1;
    int reached = 1;
    while (!frontier.empty()) {
      int u = frontier.front();
      frontier.pop();
      for (const auto& [idx, v] : adj[static_cast<std::size_t>(u)]) {
        if (!seen[static_cast<std::size_t>(v)]) {
          seen[static_cast<std::size_t>(v)] = 1;
          ++reached;
          frontier.push(v);
        }
      }
    }
    if (reached != net.node_count()) {
      std::string missing;
      for (int j = 0; j < net.node_count(); ++j) {
        if (!seen[static_cast<std::size_t>(j)]) {
          if (!missing.empty()) missing += ",";
          missing += std::to_string(j);
        }
      }
      report.violations.push_back({ViolationKind::Disconnected, -1,
                                   "underlying graph is disconnected (unreachable nodes: " +
                                       missing + ")"});
    }
  }
  return report;
}

/// Throw ValidationError listing every violation unless `net` is valid.
inline void require_valid(const DelayNetwork& net) {
  ValidationReport report = validate_network(net);
  if (!report.ok()) {
    throw ValidationError("invalid network" +
                          (net.name().empty() ? std::string() : " '" + net.name() + "'") + ": " +
                          report.summary());
  }
}

}  // namespace delaynet
