// Command line front end for the switchlab library.
//
// Subcommands:
//   witness    optimize a causal witness for the balanced switch process
//   check      decide causal separability of a process stored as JSON
//   simulate   run the noisy table-top simulation and evaluate a witness
//   bound      compute the miscalibration-corrected separable bound
//
// Exit codes: 0 success (or "separable" verdict), 1 negative physics verdict
// (no witness exists, or the checked process is not separable), 2 bad usage
// or malformed input, 3 internal solver failure.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "switchlab/causal_sdp.hpp"
#include "switchlab/hardware_map.hpp"
#include "switchlab/matstack.hpp"
#include "switchlab/processes.hpp"
#include "switchlab/simulator.hpp"
#include "switchlab/witness.hpp"

namespace {

using nlohmann::json;

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open " + path);
  }
  try {
    json parsed;
    in >> parsed;
    return parsed;
  } catch (const json::exception& err) {
    throw std::invalid_argument(path + ": " + err.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << text;
}

// Output directory handling shared by the subcommands.  When no --out is
// given the artifacts are simply not written; stdout carries the summary.
struct OutputSink {
  std::optional<std::filesystem::path> dir;

  explicit OutputSink(const std::string& out_dir) {
    if (!out_dir.empty()) {
      dir = std::filesystem::path(out_dir);
      std::filesystem::create_directories(*dir);
    }
  }

  void write(const std::string& name, const std::string& text) const {
    if (dir) {
      write_text_file(*dir / name, text);
    }
  }
};

// Settings shared by simulate and bound.  Defaults mirror the library
// defaults so the CLI and the API stay in sync.
struct RunSettings {
  std::vector<std::string> gates = switchlab::standard_gate_names();
  switchlab::NoiseModel noise;
  int bound_samples = 200;
  std::string witness_path;
  std::string config_path;
  std::string out_dir;
  bool json_output = false;
};

// Pointers to the parsed options, used to decide whether a config file value
// should override the built-in default (explicit flags always win).
struct RunOptions {
  CLI::Option* gates = nullptr;
  CLI::Option* visibility = nullptr;
  CLI::Option* jitter = nullptr;
  CLI::Option* shots = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* analytic = nullptr;
  CLI::Option* samples = nullptr;
};

void add_run_options(CLI::App* cmd, RunSettings& s, RunOptions& o) {
  o.gates = cmd->add_option("--gates", s.gates,
                            "gate names to draw measurement settings from");
  o.visibility = cmd->add_option("--visibility", s.noise.visibility,
                                 "interference visibility in [0, 1]")
                     ->check(CLI::Range(0.0, 1.0));
  o.jitter = cmd->add_option("--jitter", s.noise.angle_jitter_deg,
                             "prism angle jitter scale in degrees")
                 ->check(CLI::Range(0.0, 5.0));
  o.shots = cmd->add_option("--shots", s.noise.shots_per_setting,
                            "photon count per measurement setting");
  o.seed = cmd->add_option("--seed", s.noise.rng_seed, "random stream seed");
  o.analytic = cmd->add_flag("--analytic", s.noise.analytic,
                             "skip shot noise and report exact expectations");
  o.samples = cmd->add_option("--samples", s.bound_samples,
                              "Monte Carlo samples for the corrected bound");
  cmd->add_option("--witness", s.witness_path,
                  "read the witness from this JSON file instead of optimizing");
  cmd->add_option("--config", s.config_path,
                  "JSON file with default settings (flags override it)");
  cmd->add_option("--out", s.out_dir, "directory for output artifacts");
  cmd->add_flag("--json", s.json_output, "print a JSON summary to stdout");
}

// Fills in settings from a config file for every option the user did not
// pass explicitly on the command line.
void apply_config(RunSettings& s, const RunOptions& o) {
  if (s.config_path.empty()) {
    return;
  }
  const json cfg = read_json_file(s.config_path);
  if (!cfg.is_object()) {
    throw std::invalid_argument(s.config_path + ": config must be a JSON object");
  }
  try {
    if (cfg.contains("gates") && (o.gates == nullptr || !*o.gates)) {
      s.gates = cfg.at("gates").get<std::vector<std::string>>();
    }
    if (cfg.contains("visibility") && !*o.visibility) {
      s.noise.visibility = cfg.at("visibility").get<double>();
    }
    if (cfg.contains("jitter") && !*o.jitter) {
      s.noise.angle_jitter_deg = cfg.at("jitter").get<double>();
    }
    if (cfg.contains("shots") && !*o.shots) {
      s.noise.shots_per_setting = cfg.at("shots").get<int>();
    }
    if (cfg.contains("seed") && !*o.seed) {
      s.noise.rng_seed = cfg.at("seed").get<std::uint64_t>();
    }
    if (cfg.contains("analytic") && !*o.analytic) {
      s.noise.analytic = cfg.at("analytic").get<bool>();
    }
    if (cfg.contains("samples") && (o.samples == nullptr || !*o.samples)) {
      s.bound_samples = cfg.at("samples").get<int>();
    }
  } catch (const json::exception& err) {
    throw std::invalid_argument(s.config_path + ": " + err.what());
  }
}

// Echo of the settings a run actually used, written next to its outputs so
// results stay reproducible without the original command line.
json effective_config(const std::string& command, const RunSettings& s) {
  json cfg;
  cfg["command"] = command;
  cfg["gates"] = s.gates;
  cfg["visibility"] = s.noise.visibility;
  cfg["jitter"] = s.noise.angle_jitter_deg;
  cfg["shots"] = s.noise.shots_per_setting;
  cfg["seed"] = s.noise.rng_seed;
  cfg["analytic"] = s.noise.analytic;
  cfg["samples"] = s.bound_samples;
  cfg["witness"] = s.witness_path.empty() ? json("optimized") : json(s.witness_path);
  return cfg;
}

// Gate names referenced by a witness, in the standard alphabet order.
std::vector<std::string> witness_gates(const switchlab::CausalWitness& witness) {
  std::set<std::string> used;
  for (const auto& entry : witness.gamma) {
    used.insert(entry.gate_a);
    used.insert(entry.gate_b);
  }
  std::vector<std::string> ordered;
  for (const auto& name : switchlab::standard_gate_names()) {
    if (used.count(name) != 0) {
      ordered.push_back(name);
    }
  }
  return ordered;
}

switchlab::CausalWitness load_or_optimize(const RunSettings& s) {
  if (!s.witness_path.empty()) {
    return switchlab::witness_from_json(read_json_file(s.witness_path));
  }
  const auto result =
      switchlab::optimize_witness(switchlab::balanced_switch_process(), s.gates);
  return result.witness;
}

int cmd_witness(const RunSettings& s) {
  const auto result =
      switchlab::optimize_witness(switchlab::balanced_switch_process(), s.gates);

  OutputSink sink(s.out_dir);
  sink.write("witness.json", switchlab::to_json(result.witness).dump(2) + "\n");
  sink.write("recipes.csv", switchlab::recipe_csv(witness_gates(result.witness)));
  json cfg;
  cfg["command"] = "witness";
  cfg["gates"] = s.gates;
  sink.write("config.json", cfg.dump(2) + "\n");

  if (s.json_output) {
    json out;
    out["pairs_examined"] = result.pairs_examined;
    out["pairs_surviving"] = result.witness.gamma.size();
    out["optimum"] = result.optimum;
    out["full_set_optimum"] = result.full_set_optimum;
    std::printf("%s\n", out.dump(2).c_str());
  } else {
    std::printf("examined %d gate pairs, %zu survive sparsification\n",
                result.pairs_examined, result.witness.gamma.size());
    std::printf("witness value on the switch process: %.6f (full set %.6f)\n",
                result.optimum, result.full_set_optimum);
  }
  return 0;
}

int cmd_check(const std::string& path, bool json_output) {
  const auto process = switchlab::hermitian_from_json(read_json_file(path));
  const auto verdict = switchlab::is_causally_separable(process, true);

  json out;
  out["separable"] = verdict.separable;
  out["solver_residual"] = verdict.diagnostics.primal_residual;
  if (verdict.separable) {
    if (json_output) {
      std::printf("%s\n", out.dump(2).c_str());
    } else {
      std::printf("causally separable (solver residual %.2e)\n",
                  verdict.diagnostics.primal_residual);
    }
    return 0;
  }

  const auto certificate = switchlab::optimal_causal_certificate(process);
  out["certificate_value"] = certificate.value;
  if (json_output) {
    std::printf("%s\n", out.dump(2).c_str());
  } else {
    std::printf("not causally separable: certificate value %.6f "
                "(nonnegative on every separable process)\n",
                certificate.value);
  }
  return 1;
}

int cmd_simulate(RunSettings& s) {
  auto witness = load_or_optimize(s);

  // A fresh witness carries no corrected bound.  Compute one whenever the
  // simulated optics actually misset angles; with perfect alignment the
  // ideal bound of zero is exact.
  if (witness.separable_bound == 0.0 && s.noise.angle_jitter_deg > 0.0) {
    switchlab::BoundOptions bopts;
    bopts.mc_samples = s.bound_samples;
    bopts.seed = s.noise.rng_seed;
    witness.separable_bound = switchlab::corrected_separable_bound(
        witness, s.noise.angle_jitter_deg, bopts);
  }

  // One pass over the full measurement table gives the published artifact;
  // the witness is then evaluated from the same rows so the summary and the
  // table describe a single experiment.
  const auto rows = switchlab::measurement_table(s.noise);
  std::map<std::pair<std::string, std::string>, const switchlab::PairMeasurement*>
      by_pair;
  for (const auto& row : rows) {
    by_pair[{row.gate_a, row.gate_b}] = &row;
  }
  std::vector<switchlab::StokesRecord> records;
  for (const auto& entry : witness.gamma) {
    const auto it = by_pair.find({entry.gate_a, entry.gate_b});
    if (it == by_pair.end()) {
      throw std::invalid_argument("witness pair (" + entry.gate_a + ", " +
                                  entry.gate_b +
                                  ") is outside the measured table");
    }
    records.push_back({entry.gate_a, entry.gate_b, it->second->estimate,
                       it->second->std_dev});
  }
  const auto estimate = switchlab::evaluate_witness(witness, records);

  OutputSink sink(s.out_dir);
  sink.write("measurements.csv", switchlab::measurement_csv(rows));
  sink.write("witness.json", switchlab::to_json(witness).dump(2) + "\n");
  json summary;
  summary["witness_value"] = estimate.value;
  summary["std_error"] = estimate.std_error;
  summary["separable_bound"] = witness.separable_bound;
  summary["sigma_from_bound"] = estimate.sigma_from_bound;
  summary["pairs_measured"] = rows.size();
  sink.write("summary.json", summary.dump(2) + "\n");
  sink.write("config.json", effective_config("simulate", s).dump(2) + "\n");

  if (s.json_output) {
    std::printf("%s\n", summary.dump(2).c_str());
  } else {
    std::printf("witness value %.4f +- %.4f\n", estimate.value,
                estimate.std_error);
    std::printf("separable bound %.4f, violation %.1f sigma\n",
                witness.separable_bound, estimate.sigma_from_bound);
  }
  return 0;
}

int cmd_bound(RunSettings& s) {
  auto witness = load_or_optimize(s);

  switchlab::BoundOptions bopts;
  bopts.mc_samples = s.bound_samples;
  bopts.seed = s.noise.rng_seed;
  witness.separable_bound = switchlab::corrected_separable_bound(
      witness, s.noise.angle_jitter_deg, bopts);

  OutputSink sink(s.out_dir);
  sink.write("witness.json", switchlab::to_json(witness).dump(2) + "\n");
  sink.write("config.json", effective_config("bound", s).dump(2) + "\n");

  if (s.json_output) {
    json out;
    out["jitter_deg"] = s.noise.angle_jitter_deg;
    out["separable_bound"] = witness.separable_bound;
    std::printf("%s\n", out.dump(2).c_str());
  } else {
    std::printf("separable bound at %.2f degree prism uncertainty: %.6f\n",
                s.noise.angle_jitter_deg, witness.separable_bound);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"causal witness toolkit for the photonic quantum switch"};
  app.require_subcommand(1);

  RunSettings witness_settings;
  auto* witness_cmd =
      app.add_subcommand("witness", "optimize a causal witness for the switch");
  witness_cmd->add_option("--gates", witness_settings.gates,
                          "gate names to draw measurement settings from");
  witness_cmd->add_option("--out", witness_settings.out_dir,
                          "directory for output artifacts");
  witness_cmd->add_flag("--json", witness_settings.json_output,
                        "print a JSON summary to stdout");

  std::string check_path;
  bool check_json = false;
  auto* check_cmd =
      app.add_subcommand("check", "decide causal separability of a process");
  check_cmd->add_option("file", check_path, "process matrix as JSON")
      ->required();
  check_cmd->add_flag("--json", check_json, "print a JSON summary to stdout");

  RunSettings simulate_settings;
  RunOptions simulate_options;
  auto* simulate_cmd = app.add_subcommand(
      "simulate", "simulate the noisy experiment and evaluate a witness");
  add_run_options(simulate_cmd, simulate_settings, simulate_options);

  RunSettings bound_settings;
  RunOptions bound_options;
  auto* bound_cmd = app.add_subcommand(
      "bound", "corrected separable bound under prism miscalibration");
  add_run_options(bound_cmd, bound_settings, bound_options);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (witness_cmd->parsed()) {
      return cmd_witness(witness_settings);
    }
    if (check_cmd->parsed()) {
      return cmd_check(check_path, check_json);
    }
    if (simulate_cmd->parsed()) {
      apply_config(simulate_settings, simulate_options);
      return cmd_simulate(simulate_settings);
    }
    if (bound_cmd->parsed()) {
      apply_config(bound_settings, bound_options);
      return cmd_bound(bound_settings);
    }
  } catch (const switchlab::NoWitnessError& err) {
    std::fprintf(stderr, "no witness possible: %s\n", err.what());
    return 1;
  } catch (const std::invalid_argument& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 2;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "solver failure: %s\n", err.what());
    return 3;
  }
  return 2;
}
