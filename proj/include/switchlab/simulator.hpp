#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "switchlab/witness.hpp"

namespace switchlab {

//============================================================================
// Measurement simulator for the optical switch.
//
// One measurement setting applies a gate pair and reads the control
// interference contrast. The simulator models the three dominant
// imperfections of the bench: each of the four prisms in a setting sits a
// uniformly drawn misset away from its compiled angle, the interference
// contrast is scaled by the instrument visibility, and the readout counts
// photons, so the estimate carries binomial shot noise. All randomness is
// counter-keyed on (seed, setting index), which makes runs reproducible and
// independent of evaluation order.
//============================================================================

struct NoiseModel {
  double visibility = 0.938;      // interference contrast scale, in [0, 1]
  double angle_jitter_deg = 1.0;  // uniform prism misset half-width, [0, 5]
  int shots_per_setting = 100000;
  std::uint64_t rng_seed = 1;
  bool analytic = false;  // infinite-shot limit: exact expectation, std 0
};

struct PairMeasurement {
  std::string gate_a, gate_b;
  double ideal = 0.0;     // noiseless contrast of the pair
  double estimate = 0.0;  // simulated measurement outcome
  double std_dev = 0.0;   // binomial error bar from the observed counts
};

// Simulate one setting. The index keys the random draws, so distinct
// settings of one run must use distinct indices.
PairMeasurement simulate_pair(const std::string& gate_a,
                              const std::string& gate_b,
                              const NoiseModel& noise,
                              std::uint64_t setting_index = 0);

// Every ordered pair over the standard gate alphabet, row-major in the
// alphabet order; the row number is the setting index.
std::vector<PairMeasurement> measurement_table(const NoiseModel& noise);

// Header pair_index,gate_a,gate_b,ideal,simulated,std; one row per setting.
std::string measurement_csv(const std::vector<PairMeasurement>& rows);

struct ExperimentResult {
  std::vector<StokesRecord> stokes;  // one record per witness pair
  WitnessEstimate estimate;
};

// Measure exactly the settings a witness needs and evaluate it on them.
ExperimentResult run_experiment(const CausalWitness& witness,
                                const NoiseModel& noise);

}  // namespace switchlab
