#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "delaynet/delaynet.hpp"

namespace delaynet::cli {

// Exit codes: 0 ok, 1 negative result (equivalent/verify), 2 usage,
// 3 data error, 4 numeric error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitNegative = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumeric = 4;

namespace detail {

inline std::vector<double> parse_double_list(const std::string& csv, const char* what) {
  std::vector<double> values;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError(std::string("cannot parse ") + what + " entry \"" + item + "\"");
    }
  }
  if (values.empty()) throw ValidationError(std::string(what) + " list is empty");
  return values;
}

inline void emit_text(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw ValidationError("cannot write output file: " + out_path);
  out << text;
}

struct DynamicsFlags {
  std::string kind = "mackey-glass";
  double gamma = 0.1;
  double beta = 0.2;
  double coupling = 0.525;

  [[nodiscard]] NodeDynamics build() const {
    NodeDynamics d;
    if (kind == "mackey-glass") {
      d = NodeDynamics::mackey_glass(gamma, beta, coupling);
    } else if (kind == "linear") {
      d = NodeDynamics::linear_decay_coupling(gamma, coupling);
    } else {
      throw ValidationError("unknown dynamics \"" + kind + "\" (use mackey-glass or linear)");
    }
    validate_dynamics(d);
    return d;
  }

  void attach(CLI::App* cmd) {
    cmd->add_option("--dynamics", kind, "node dynamics: mackey-glass or linear")
        ->capture_default_str();
    cmd->add_option("--gamma", gamma, "linear decay rate")->capture_default_str();
    cmd->add_option("--beta", beta, "Mackey-Glass feedback strength")->capture_default_str();
    cmd->add_option("--coupling", coupling, "input coupling scale c")->capture_default_str();
  }
};

inline std::vector<double> seeded_histories(int node_count, std::uint64_t seed, double lo,
                                            double hi) {
  std::mt19937_64 rng(seed);
  std::vector<double> h(static_cast<std::size_t>(node_count));
  for (double& v : h) v = delaynet::detail::uniform_in(rng, lo, hi);
  return h;
}

}  // namespace detail

/// Command-line front end; returns the process exit code. Kept header-only so
/// the test suite can drive it in-process.
inline int run(int argc, const char* const* argv) {
  CLI::App app{"delay network reduction and simulation toolkit"};
  app.require_subcommand(1);

  // reduce
  auto* cmd_reduce = app.add_subcommand(
      "reduce", "concentrate all delay onto the chords of a spanning tree");
  std::string reduce_input, reduce_out, reduce_net_out;
  double reduce_tol = kDefaultTol;
  cmd_reduce->add_option("input", reduce_input, "network JSON file")->required();
  cmd_reduce->add_option("--out", reduce_out, "write the reduction JSON here (default stdout)");
  cmd_reduce->add_option("--emit-network", reduce_net_out,
                         "also write the transformed network JSON here");
  cmd_reduce->add_option("--tol", reduce_tol, "zero-delay tolerance")->capture_default_str();

  // roundtrips
  auto* cmd_roundtrips = app.add_subcommand(
      "roundtrips", "list the fundamental semicycles and their round-trip times");
  std::string rt_input, rt_out;
  cmd_roundtrips->add_option("input", rt_input, "network JSON file")->required();
  cmd_roundtrips->add_option("--out", rt_out, "output path (default stdout)");

  // equivalent
  auto* cmd_equivalent = app.add_subcommand(
      "equivalent", "test two networks for dynamical equivalence (exit 0 yes, 1 no)");
  std::string eq_a, eq_b, eq_out;
  double eq_tol = kDefaultTol;
  cmd_equivalent->add_option("first", eq_a, "network JSON file")->required();
  cmd_equivalent->add_option("second", eq_b, "network JSON file")->required();
  cmd_equivalent->add_option("--tol", eq_tol, "round-trip comparison tolerance")
      ->capture_default_str();
  cmd_equivalent->add_option("--out", eq_out, "report path (default stdout)");

  // randomize
  auto* cmd_randomize = app.add_subcommand(
      "randomize", "emit random delay realizations with identical round-trips");
  std::string rand_input, rand_prefix;
  std::uint64_t rand_seed = 0;
  double rand_amplitude = 0.5;
  int rand_count = 1, rand_max_tries = 1000;
  cmd_randomize->add_option("input", rand_input, "network JSON file")->required();
  cmd_randomize->add_option("--out", rand_prefix, "output file prefix")->required();
  cmd_randomize->add_option("--count", rand_count, "number of realizations")
      ->capture_default_str();
  cmd_randomize->add_option("--seed", rand_seed, "base seed")->capture_default_str();
  cmd_randomize->add_option("--amplitude", rand_amplitude, "shift amplitude")
      ->capture_default_str();
  cmd_randomize->add_option("--max-tries", rand_max_tries, "rejection budget per realization")
      ->capture_default_str();

  // simulate
  auto* cmd_simulate = app.add_subcommand("simulate", "integrate the network and emit a CSV");
  std::string sim_input, sim_out, sim_history;
  double sim_step = 0.05, sim_t_end = 20000.0, sim_record_from = 0.0;
  std::uint64_t sim_seed = 0;
  detail::DynamicsFlags sim_dynamics;
  cmd_simulate->add_option("input", sim_input, "network JSON file")->required();
  cmd_simulate->add_option("--step", sim_step, "integration step")->capture_default_str();
  cmd_simulate->add_option("--t-end", sim_t_end, "end time")->capture_default_str();
  cmd_simulate->add_option("--record-from", sim_record_from, "start of the recorded range")
      ->capture_default_str();
  cmd_simulate->add_option("--history", sim_history,
                           "comma-separated constant history, one value per node");
  cmd_simulate->add_option("--seed", sim_seed,
                           "seed for uniform [0,1.5] histories when --history is absent")
      ->capture_default_str();
  cmd_simulate->add_option("--out", sim_out, "CSV path (default stdout)");
  sim_dynamics.attach(cmd_simulate);

  // verify
  auto* cmd_verify = app.add_subcommand(
      "verify", "numerically verify shift equivalence (exit 0 pass, 1 fail)");
  std::string ver_input, ver_eta, ver_out, ver_history;
  double ver_step = 0.01, ver_transient = 5000.0, ver_window = 200.0, ver_tol = 1e-5;
  cmd_verify->add_option("input", ver_input, "network JSON file")->required();
  cmd_verify->add_option("--eta", ver_eta, "comma-separated per-node shifts")->required();
  cmd_verify->add_option("--step", ver_step, "integration step")->capture_default_str();
  cmd_verify->add_option("--transient", ver_transient, "transient to discard")
      ->capture_default_str();
  cmd_verify->add_option("--window", ver_window, "comparison window length")
      ->capture_default_str();
  cmd_verify->add_option("--tol", ver_tol, "deviation tolerance")->capture_default_str();
  cmd_verify->add_option("--history", ver_history,
                         "comma-separated constant history for the original system");
  cmd_verify->add_option("--out", ver_out, "report path (default stdout)");
  detail::DynamicsFlags ver_dynamics;
  ver_dynamics.attach(cmd_verify);
  // Fig-3-style checks run the chaotic-parameter ring; default to it.
  ver_dynamics.coupling = 4.0;

  // sweep
  auto* cmd_sweep = app.add_subcommand(
      "sweep", "scan one essential delay of the reduced network and emit a CSV");
  std::string sw_input, sw_values, sw_out;
  int sw_chord = 0, sw_count = 10;
  double sw_step = 0.05, sw_t_end = 20000.0, sw_tail = 2000.0;
  std::uint64_t sw_seed = 0;
  detail::DynamicsFlags sw_dynamics;
  cmd_sweep->add_option("input", sw_input, "network JSON file")->required();
  cmd_sweep->add_option("--chord", sw_chord, "chord link id to scan")->required();
  cmd_sweep->add_option("--values", sw_values, "comma-separated round-trip values")->required();
  cmd_sweep->add_option("--count", sw_count, "runs per value")->capture_default_str();
  cmd_sweep->add_option("--seed", sw_seed, "base seed")->capture_default_str();
  cmd_sweep->add_option("--step", sw_step, "integration step")->capture_default_str();
  cmd_sweep->add_option("--t-end", sw_t_end, "end time per run")->capture_default_str();
  cmd_sweep->add_option("--window", sw_tail, "tail analysis window length")
      ->capture_default_str();
  cmd_sweep->add_option("--out", sw_out, "CSV path (default stdout)");
  sw_dynamics.attach(cmd_sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (cmd_reduce->parsed()) {
      DelayNetwork net = load_network(reduce_input);
      ReductionResult result = reduce(net, reduce_tol);
      detail::emit_text(reduction_to_json(result).dump(2) + "\n", reduce_out);
      if (!reduce_net_out.empty()) save_network(result.transformed, reduce_net_out);
      return kExitOk;
    }

    if (cmd_roundtrips->parsed()) {
      DelayNetwork net = load_network(rt_input);
      SpanningTree tree = spanning_tree(net);
      std::vector<Semicycle> basis = cycle_basis(net, tree);
      detail::emit_text(basis_to_json(net, tree, basis).dump(2) + "\n", rt_out);
      return kExitOk;
    }

    if (cmd_equivalent->parsed()) {
      DelayNetwork a = load_network(eq_a);
      DelayNetwork b = load_network(eq_b);
      const bool same = equivalent(a, b, eq_tol);
      nlohmann::ordered_json report;
      report["equivalent"] = same;
      report["tolerance"] = eq_tol;
      if (same) {
        SpanningTree tree = spanning_tree(a);
        report["roundtrips"] = nlohmann::ordered_json::array();
        for (const Semicycle& c : cycle_basis(a, tree)) {
          report["roundtrips"].push_back(roundtrip_time(a, c));
        }
      }
      detail::emit_text(report.dump(2) + "\n", eq_out);
      return same ? kExitOk : kExitNegative;
    }

    if (cmd_randomize->parsed()) {
      DelayNetwork net = load_network(rand_input);
      for (int i = 0; i < rand_count; ++i) {
        DelayNetwork realization = randomize_preserving_roundtrips(
            net, rand_seed + static_cast<std::uint64_t>(i), rand_amplitude, rand_max_tries);
        char suffix[16];
        std::snprintf(suffix, sizeof(suffix), "%03d", i);
        const std::string path = rand_prefix + suffix + ".json";
        save_network(realization, path);
        std::cout << path << "\n";
      }
      return kExitOk;
    }

    if (cmd_simulate->parsed()) {
      SimSpec spec;
      spec.net = load_network(sim_input);
      spec.dynamics = sim_dynamics.build();
      spec.t_end = sim_t_end;
      spec.step = sim_step;
      spec.record_from = sim_record_from;
      spec.history =
          sim_history.empty()
              ? detail::seeded_histories(spec.net.node_count(), sim_seed, 0.0, 1.5)
              : detail::parse_double_list(sim_history, "history");
      Trajectory traj = simulate(spec);
      std::ostringstream csv;
      write_trajectory_csv(csv, traj);
      detail::emit_text(csv.str(), sim_out);
      return kExitOk;
    }

    if (cmd_verify->parsed()) {
      DelayNetwork net = load_network(ver_input);
      TimeShift shift{detail::parse_double_list(ver_eta, "eta")};
      VerifySettings settings;
      settings.step = ver_step;
      settings.transient = ver_transient;
      settings.window = ver_window;
      settings.tolerance = ver_tol;
      if (!ver_history.empty()) {
        settings.history = detail::parse_double_list(ver_history, "history");
      }
      EquivalenceReport report =
          verify_shift_equivalence(net, shift, ver_dynamics.build(), settings);
      nlohmann::ordered_json doc;
      doc["max_deviation"] = report.max_deviation;
      doc["per_node_deviation"] = report.per_node_deviation;
      doc["tolerance"] = report.tolerance;
      doc["pass"] = report.pass;
      doc["compare_from"] = report.compare_from;
      doc["window"] = report.window;
      detail::emit_text(doc.dump(2) + "\n", ver_out);
      return report.pass ? kExitOk : kExitNegative;
    }

    if (cmd_sweep->parsed()) {
      DelayNetwork net = load_network(sw_input);
      SweepSettings settings;
      settings.step = sw_step;
      settings.t_end = sw_t_end;
      settings.tail = sw_tail;
      settings.runs_per_value = sw_count;
      settings.seed = sw_seed;
      std::vector<SweepRecord> records = sweep_roundtrip(
          net, sw_chord, detail::parse_double_list(sw_values, "values"), sw_dynamics.build(),
          settings);
      std::ostringstream csv;
      write_sweep_csv(csv, records);
      detail::emit_text(csv.str(), sw_out);
      return kExitOk;
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}

}  // namespace delaynet::cli
