#include "switchlab/simulator.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

#include "switchlab/hardware_map.hpp"
#include "switchlab/processes.hpp"
#include "switchlab/rng.hpp"

namespace switchlab {

namespace {

constexpr int kJitterStream = 7;

void validate_noise(const NoiseModel& noise) {
  if (!(noise.visibility >= 0.0 && noise.visibility <= 1.0))
    throw std::invalid_argument("visibility must lie in [0, 1]");
  if (!(noise.angle_jitter_deg >= 0.0 && noise.angle_jitter_deg <= 5.0))
    throw std::invalid_argument("prism jitter must lie in [0, 5] degrees");
  if (!noise.analytic && noise.shots_per_setting < 1)
    throw std::invalid_argument("shot count must be positive");
}

PairMeasurement measure(const std::string& gate_a, const std::string& gate_b,
                        const OpticalRecipe& recipe_a,
                        const OpticalRecipe& recipe_b,
                        const NoiseModel& noise, std::uint64_t index) {
  PairMeasurement out;
  out.gate_a = gate_a;
  out.gate_b = gate_b;
  out.ideal = analytic_stokes(gate_matrix(gate_a), gate_matrix(gate_b));

  SplitMix64 rng(SplitMix64::key(noise.rng_seed, kJitterStream, index));
  const double u = noise.angle_jitter_deg;
  double d[4];
  for (double& v : d) v = rng.uniform(-u, u);
  const ComplexMatrix ua = realized_with_errors(recipe_a, d[0], d[1]);
  const ComplexMatrix ub = realized_with_errors(recipe_b, d[2], d[3]);
  const double expectation = noise.visibility * analytic_stokes(ua, ub);

  if (noise.analytic) {
    out.estimate = expectation;
    return out;
  }

  const int shots = noise.shots_per_setting;
  const double p_plus = 0.5 * (1.0 + expectation);
  int n_plus = 0;
  for (int s = 0; s < shots; ++s)
    if (rng.uniform() < p_plus) ++n_plus;
  out.estimate = (2.0 * n_plus - shots) / shots;
  const double q = static_cast<double>(n_plus) / shots;
  out.std_dev = 2.0 * std::sqrt(q * (1.0 - q) / shots);
  return out;
}

std::map<std::string, OpticalRecipe> compile_gates(
    const std::vector<std::string>& names) {
  std::map<std::string, OpticalRecipe> recipes;
  for (const auto& name : names)
    if (!recipes.count(name)) recipes.emplace(name, compile_unitary(gate_matrix(name)));
  return recipes;
}

}  // namespace

PairMeasurement simulate_pair(const std::string& gate_a,
                              const std::string& gate_b,
                              const NoiseModel& noise,
                              std::uint64_t setting_index) {
  validate_noise(noise);
  const auto recipes = compile_gates({gate_a, gate_b});
  return measure(gate_a, gate_b, recipes.at(gate_a), recipes.at(gate_b), noise,
                 setting_index);
}

std::vector<PairMeasurement> measurement_table(const NoiseModel& noise) {
  validate_noise(noise);
  const auto gates = standard_gate_names();
  const auto recipes = compile_gates(gates);
  std::vector<PairMeasurement> rows;
  std::uint64_t index = 0;
  for (const auto& a : gates)
    for (const auto& b : gates) {
      rows.push_back(measure(a, b, recipes.at(a), recipes.at(b), noise, index));
      ++index;
    }
  return rows;
}

std::string measurement_csv(const std::vector<PairMeasurement>& rows) {
  std::string csv = "pair_index,gate_a,gate_b,ideal,simulated,std\n";
  for (std::size_t k = 0; k < rows.size(); ++k) {
    char row[160];
    std::snprintf(row, sizeof(row), "%zu,%s,%s,%.17g,%.17g,%.17g\n", k,
                  rows[k].gate_a.c_str(), rows[k].gate_b.c_str(),
                  rows[k].ideal, rows[k].estimate, rows[k].std_dev);
    csv += row;
  }
  return csv;
}

ExperimentResult run_experiment(const CausalWitness& witness,
                                const NoiseModel& noise) {
  validate_noise(noise);
  std::vector<std::string> names;
  for (const auto& e : witness.gamma) {
    names.push_back(e.gate_a);
    names.push_back(e.gate_b);
  }
  const auto recipes = compile_gates(names);

  ExperimentResult result;
  for (std::size_t i = 0; i < witness.gamma.size(); ++i) {
    const auto& e = witness.gamma[i];
    const auto m = measure(e.gate_a, e.gate_b, recipes.at(e.gate_a),
                           recipes.at(e.gate_b), noise, i);
    result.stokes.push_back({m.gate_a, m.gate_b, m.estimate, m.std_dev});
  }
  result.estimate = evaluate_witness(witness, result.stokes);
  return result;
}

}  // namespace switchlab
