#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "delaynet/analysis.hpp"
#include "delaynet/network.hpp"
#include "delaynet/simulate.hpp"
#include "delaynet/timeshift.hpp"

namespace delaynet {

/// Parse the network JSON format
///   { "nodes": 6, "links": [ {"id":0, "from":1, "to":0, "delay":2.5}, ... ] }
/// where "from" is the signal source and "to" the target. An optional
/// top-level "name" string is accepted. Unknown fields are rejected.
/// Validation problems are reported all at once, with link ids.
inline DelayNetwork network_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ValidationError("network document must be a JSON object");
  for (const auto& [key, _] : doc.items()) {
    if (key != "nodes" && key != "links" && key != "name") {
      throw ValidationError("unknown field \"" + key + "\" in network document");
    }
  }
  if (!doc.contains("nodes") || !doc["nodes"].is_number_integer()) {
    throw ValidationError("network document needs an integer \"nodes\" field");
  }
  if (!doc.contains("links") || !doc["links"].is_array()) {
    throw ValidationError("network document needs a \"links\" array");
  }
  std::string name;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) throw ValidationError("\"name\" must be a string");
    name = doc["name"].get<std::string>();
  }

  std::vector<Link> links;
  links.reserve(doc["links"].size());
  for (const auto& entry : doc["links"]) {
    if (!entry.is_object()) throw ValidationError("each link must be a JSON object");
    for (const auto& [key, _] : entry.items()) {
      if (key != "id" && key != "from" && key != "to" && key != "delay") {
        throw ValidationError("unknown field \"" + key + "\" in link entry");
      }
    }
    for (const char* key : {"id", "from", "to"}) {
      if (!entry.contains(key) || !entry[key].is_number_integer()) {
        throw ValidationError(std::string("link entry needs an integer \"") + key + "\" field");
      }
    }
    if (!entry.contains("delay") || !entry["delay"].is_number()) {
      throw ValidationError("link entry needs a numeric \"delay\" field");
    }
    links.push_back({entry["id"].get<int>(), entry["from"].get<int>(), entry["to"].get<int>(),
                     entry["delay"].get<double>()});
  }
  DelayNetwork net(doc["nodes"].get<int>(), std::move(links), std::move(name));
  require_valid(net);
  return net;
}

inline nlohmann::ordered_json network_to_json(const DelayNetwork& net) {
  nlohmann::ordered_json doc;
  if (!net.name().empty()) doc["name"] = net.name();
  doc["nodes"] = net.node_count();
  doc["links"] = nlohmann::ordered_json::array();
  for (const Link& l : net.links()) {
    doc["links"].push_back({{"id", l.id}, {"from", l.source}, {"to", l.target},
                            {"delay", l.delay}});
  }
  return doc;
}

inline DelayNetwork load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open network file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("malformed JSON in " + path + ": " + e.what());
  }
  try {
    return network_from_json(doc);
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

inline void save_network(const DelayNetwork& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write network file: " + path);
  out << network_to_json(net).dump(2) << "\n";
}

/// ReductionResult wire format:
///   { "eta": [...], "tree": [link ids], "chords": {"<id>": delay, ...} }
inline nlohmann::ordered_json reduction_to_json(const ReductionResult& result) {
  nlohmann::ordered_json doc;
  doc["eta"] = result.shift.eta;
  doc["tree"] = result.tree.link_ids;
  doc["chords"] = nlohmann::ordered_json::object();
  for (const auto& [id, delay] : result.chord_delays) {
    doc["chords"][std::to_string(id)] = delay;
  }
  return doc;
}

/// Basis report for the `roundtrips` command: the tree plus, per chord, the
/// semicycle steps and the signed and absolute round-trips.
inline nlohmann::ordered_json basis_to_json(const DelayNetwork& net, const SpanningTree& tree,
                                            const std::vector<Semicycle>& basis) {
  nlohmann::ordered_json doc;
  doc["tree"] = tree.link_ids;
  doc["cycles"] = nlohmann::ordered_json::array();
  for (const Semicycle& c : basis) {
    nlohmann::ordered_json cycle;
    cycle["chord"] = c.steps.front().link_id;
    cycle["steps"] = nlohmann::ordered_json::array();
    for (const SemicycleStep& s : c.steps) {
      cycle["steps"].push_back({s.link_id, s.sign});
    }
    cycle["signed_roundtrip"] = signed_roundtrip(net, c);
    cycle["roundtrip"] = roundtrip_time(net, c);
    doc["cycles"].push_back(std::move(cycle));
  }
  return doc;
}

namespace detail {

/// Shortest decimal that parses back to the same double.
inline std::string format_number(double v) {
  char buf[40];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

}  // namespace detail

/// CSV: t,x_0,...,x_{N-1} at grid points, from the trajectory's recorded
/// start onward.
inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "t";
  for (int j = 0; j < traj.node_count(); ++j) out << ",x_" << j;
  out << "\n";
  const auto first =
      static_cast<std::size_t>(std::max(0.0, std::ceil(traj.start() / traj.step() - 1e-9)));
  for (std::size_t i = first; i <= traj.step_count(); ++i) {
    out << detail::format_number(traj.grid_time(i));
    for (int j = 0; j < traj.node_count(); ++j) {
      out << "," << detail::format_number(traj.grid_value(i, j));
    }
    out << "\n";
  }
}

/// CSV: value,run,seed,norm,is_equilibrium,period with an empty period field
/// for equilibria.
inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records) {
  out << "value,run,seed,norm,is_equilibrium,period\n";
  for (const SweepRecord& r : records) {
    out << detail::format_number(r.value) << "," << r.run << "," << r.seed << ","
        << detail::format_number(r.norm) << "," << (r.is_equilibrium ? 1 : 0) << ",";
    if (r.period.has_value()) out << detail::format_number(*r.period);
    out << "\n";
  }
}

}  // namespace delaynet
