#include <catch2/catch_amalgamated.hpp>

#include "delaynet/cycles.hpp"
#include "delaynet/json_io.hpp"
#include "support/generators.hpp"

using namespace delaynet;

namespace {

DelayNetwork motif1() { return DelayNetwork(2, {{0, 0, 1, 1.0}, {1, 0, 1, 2.5}}); }

DelayNetwork motif2(double t1 = 1.0, double t2 = 2.0, double t3 = 4.0) {
  return DelayNetwork(3, {{0, 0, 1, t1}, {1, 0, 2, t2}, {2, 1, 2, t3}});
}

DelayNetwork motif3(double t1 = 1.0, double t2 = 2.0, double t3 = 4.0, double t4 = 8.0) {
  return DelayNetwork(4, {{0, 0, 1, t1}, {1, 2, 1, t2}, {2, 3, 2, t3}, {3, 3, 0, t4}});
}

DelayNetwork directed_ring(int n, double delay) {
  std::vector<Link> links;
  for (int j = 0; j < n; ++j) links.push_back({j, (j + 1) % n, j, delay});
  return DelayNetwork(n, std::move(links));
}

std::vector<int> signs_by_link_id(const Semicycle& c) {
  std::vector<std::pair<int, int>> byid;
  for (const SemicycleStep& s : c.steps) byid.emplace_back(s.link_id, s.sign);
  std::sort(byid.begin(), byid.end());
  std::vector<int> signs;
  for (auto& [id, sign] : byid) signs.push_back(sign);
  return signs;
}

}  // namespace

TEST_CASE("cycle space dimension on the figure fixtures", "[netgraph]") {
  DelayNetwork fig2a = load_network(FIXTURE_DIR "/fig2a.json");
  DelayNetwork fig2b = load_network(FIXTURE_DIR "/fig2b.json");
  REQUIRE(cycle_space_dimension(fig2a) == 5);
  REQUIRE(cycle_space_dimension(fig2b) == 3);
  REQUIRE(fig2b.node_count() == 6);
  REQUIRE(fig2b.link_count() == 8);
}

TEST_CASE("a directed path has no cycles", "[netgraph]") {
  DelayNetwork path(4, {{0, 0, 1, 1.0}, {1, 1, 2, 1.0}, {2, 2, 3, 1.0}});
  REQUIRE(cycle_space_dimension(path) == 0);
  REQUIRE(cycle_basis(path, spanning_tree(path)).empty());
}

TEST_CASE("cycle space dimension rejects invalid networks", "[netgraph]") {
  REQUIRE_THROWS_AS(cycle_space_dimension(DelayNetwork(3, {{0, 0, 1, 1.0}})), ValidationError);
}

TEST_CASE("spanning tree on a directed ring follows link ids", "[netgraph]") {
  DelayNetwork ring(3, {{0, 0, 1, 1.0}, {1, 1, 2, 2.0}, {2, 2, 0, 3.0}});
  SpanningTree tree = spanning_tree(ring);
  REQUIRE(tree.link_ids == std::vector<int>{0, 1});
}

TEST_CASE("tree-shaped network keeps every link", "[netgraph]") {
  DelayNetwork net(4, {{0, 0, 1, 1.0}, {1, 2, 0, 2.0}, {2, 1, 3, 3.0}});
  SpanningTree tree = spanning_tree(net);
  REQUIRE(tree.link_ids == std::vector<int>{0, 1, 2});
}

TEST_CASE("parallel links resolve to the lower id", "[netgraph]") {
  SpanningTree tree = spanning_tree(motif1());
  REQUIRE(tree.link_ids == std::vector<int>{0});
}

TEST_CASE("spanning tree is deterministic", "[netgraph]") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    DelayNetwork net = testsupport::random_connected_network(rng);
    if (!validate_network(net).ok()) continue;
    REQUIRE(spanning_tree(net).link_ids == spanning_tree(net).link_ids);
  }
}

TEST_CASE("fundamental semicycle of motif II matches the known signs", "[netgraph]") {
  DelayNetwork net = motif2();
  SpanningTree tree{{0, 2}};
  Semicycle c = fundamental_semicycle(net, tree, 1);
  REQUIRE(c.steps.size() == 3);
  REQUIRE(c.steps.front().link_id == 1);
  REQUIRE(c.steps.front().sign == 1);
  // chord + tree walk: [(l2,+1),(l3,-1),(l1,-1)]
  REQUIRE(c.steps[1].link_id == 2);
  REQUIRE(c.steps[1].sign == -1);
  REQUIRE(c.steps[2].link_id == 0);
  REQUIRE(c.steps[2].sign == -1);
}

TEST_CASE("parallel links traverse oppositely", "[netgraph]") {
  Semicycle c = fundamental_semicycle(motif1(), SpanningTree{{0}}, 1);
  REQUIRE(c.steps.size() == 2);
  REQUIRE(c.steps[0].link_id == 1);
  REQUIRE(c.steps[0].sign == 1);
  REQUIRE(c.steps[1].link_id == 0);
  REQUIRE(c.steps[1].sign == -1);
}

TEST_CASE("self-loop chord is its own semicycle", "[netgraph]") {
  DelayNetwork net(2, {{0, 0, 1, 1.0}, {1, 1, 1, 4.5}});
  Semicycle c = fundamental_semicycle(net, SpanningTree{{0}}, 1);
  REQUIRE(c.steps.size() == 1);
  REQUIRE(c.steps[0].sign == 1);
  REQUIRE(roundtrip_time(net, c) == 4.5);
}

TEST_CASE("chord inside the tree is rejected", "[netgraph]") {
  REQUIRE_THROWS_AS(fundamental_semicycle(motif2(), SpanningTree{{0, 2}}, 0), ValidationError);
  REQUIRE_THROWS_AS(fundamental_semicycle(motif2(), SpanningTree{{0, 2}}, 42), ValidationError);
}

TEST_CASE("cycle basis of motif III carries the (+,-,-,+) signature", "[netgraph]") {
  DelayNetwork net = motif3();
  auto basis = cycle_basis(net, spanning_tree(net));
  REQUIRE(basis.size() == 1);
  REQUIRE(signs_by_link_id(basis[0]) == std::vector<int>{1, -1, -1, 1});
}

TEST_CASE("basis size always equals the cycle space dimension", "[netgraph]") {
  std::mt19937_64 rng(11);
  int checked = 0;
  while (checked < 200) {
    DelayNetwork net = testsupport::random_connected_network(rng);
    if (!validate_network(net).ok()) continue;
    ++checked;
    SpanningTree tree = spanning_tree(net);
    auto basis = cycle_basis(net, tree);
    REQUIRE(static_cast<int>(basis.size()) == cycle_space_dimension(net));
    for (const Semicycle& c : basis) {
      // each fundamental semicycle has exactly one non-tree link: its chord
      int chords_in_cycle = 0;
      for (const SemicycleStep& s : c.steps) {
        if (!tree.contains(s.link_id)) ++chords_in_cycle;
      }
      REQUIRE(chords_in_cycle == 1);
      REQUIRE_FALSE(tree.contains(c.steps.front().link_id));
    }
  }
}

TEST_CASE("fig2b basis has three semicycles with the fixed round-trips", "[netgraph]") {
  DelayNetwork fig2b = load_network(FIXTURE_DIR "/fig2b.json");
  auto basis = cycle_basis(fig2b, spanning_tree(fig2b));
  REQUIRE(basis.size() == 3);
  REQUIRE_THAT(roundtrip_time(fig2b, basis[0]), Catch::Matchers::WithinAbs(5.0, 1e-12));
  REQUIRE_THAT(roundtrip_time(fig2b, basis[1]), Catch::Matchers::WithinAbs(10.0, 1e-12));
  REQUIRE_THAT(roundtrip_time(fig2b, basis[2]), Catch::Matchers::WithinAbs(7.0, 1e-12));
}

TEST_CASE("round-trip time evaluates the signed sum", "[netgraph]") {
  DelayNetwork net = motif2(1.0, 2.0, 4.0);
  auto basis = cycle_basis(net, spanning_tree(net));
  REQUIRE(basis.size() == 1);
  REQUIRE_THAT(roundtrip_time(net, basis[0]), Catch::Matchers::WithinAbs(3.0, 1e-12));

  DelayNetwork ring = directed_ring(4, 25.0);
  auto ring_basis = cycle_basis(ring, spanning_tree(ring));
  REQUIRE_THAT(roundtrip_time(ring, ring_basis[0]), Catch::Matchers::WithinAbs(100.0, 1e-12));

  DelayNetwork m3 = motif3(1.0, 1.0, 1.0, 1.0);
  auto m3_basis = cycle_basis(m3, spanning_tree(m3));
  REQUIRE(roundtrip_time(m3, m3_basis[0]) == 0.0);
}

TEST_CASE("round-trip is exactly invariant under reversal and rotation", "[netgraph]") {
  std::mt19937_64 rng(13);
  int checked = 0;
  while (checked < 200) {
    DelayNetwork net = testsupport::random_connected_network(rng);
    if (!validate_network(net).ok()) continue;
    Semicycle c = testsupport::random_semicycle(rng, net);
    if (c.steps.empty()) continue;
    ++checked;
    const double t = roundtrip_time(net, c);

    Semicycle reversed;
    for (auto it = c.steps.rbegin(); it != c.steps.rend(); ++it) {
      reversed.steps.push_back({it->link_id, -it->sign});
    }
    REQUIRE(roundtrip_time(net, reversed) == t);

    Semicycle rotated = c;
    std::rotate(rotated.steps.begin(), rotated.steps.begin() + 1, rotated.steps.end());
    REQUIRE(roundtrip_time(net, rotated) == t);
  }
}

TEST_CASE("malformed semicycles are rejected", "[netgraph]") {
  DelayNetwork net = motif2();
  REQUIRE_THROWS_AS(roundtrip_time(net, Semicycle{}), ValidationError);
  // not a closed walk
  REQUIRE_THROWS_AS(roundtrip_time(net, Semicycle{{{0, 1}, {2, 1}}}), ValidationError);
  // repeated link
  REQUIRE_THROWS_AS(roundtrip_time(net, Semicycle{{{0, 1}, {0, -1}}}), ValidationError);
  // bad sign
  REQUIRE_THROWS_AS(roundtrip_time(net, Semicycle{{{0, 2}}}), ValidationError);
}

TEST_CASE("masked spanning tree requires a spanning subset", "[netgraph]") {
  DelayNetwork net = motif2();
  std::vector<char> mask(net.link_count(), 0);
  mask[0] = 1;
  REQUIRE_THROWS_AS(spanning_tree(net, mask), ValidationError);
  mask[1] = 1;
  REQUIRE(spanning_tree(net, mask).link_ids == std::vector<int>{0, 1});
}
