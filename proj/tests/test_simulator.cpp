#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "switchlab/processes.hpp"
#include "switchlab/simulator.hpp"
#include "switchlab/witness.hpp"

using namespace switchlab;

namespace {

// Contrast of every ordered gate pair at perfect visibility, so table rows
// can be checked without recomputing the circuit overlap.
constexpr double kIdealStokes[6][6] = {
    // I     X     Y     Z     P     Q
    {1.0, 1.0, 1.0, 1.0, 1.0, 1.0},           // I
    {1.0, 1.0, -1.0, -1.0, -1.0, 0.0},        // X
    {1.0, -1.0, 1.0, -1.0, 0.0, -1.0},        // Y
    {1.0, -1.0, -1.0, 1.0, 0.0, 0.0},         // Z
    {1.0, -1.0, 0.0, 0.0, 1.0, -0.5},         // P
    {1.0, 0.0, -1.0, 0.0, -0.5, 1.0},         // Q
};

NoiseModel exact_model(double visibility) {
  NoiseModel noise;
  noise.visibility = visibility;
  noise.angle_jitter_deg = 0.0;
  noise.analytic = true;
  return noise;
}

}  // namespace

TEST_CASE("analytic mode reproduces process expectations") {
  const auto gates = standard_gate_names();
  const auto w = balanced_switch_process();
  for (const double v : {1.0, 0.938, 0.4}) {
    const auto rows = measurement_table(exact_model(v));
    REQUIRE(rows.size() == 36);
    const auto dephased = dephase_control(w, v);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const auto& r = rows[k];
      CHECK(r.gate_a == gates[k / 6]);
      CHECK(r.gate_b == gates[k % 6]);
      const double expected = stokes_expectation(dephased, gate_matrix(r.gate_a),
                                                 gate_matrix(r.gate_b));
      CHECK(std::abs(r.estimate - expected) < 1e-10);
      CHECK(std::abs(r.ideal - kIdealStokes[k / 6][k % 6]) < 1e-12);
      CHECK(r.std_dev == 0.0);
    }
  }
}

TEST_CASE("shot noise follows the binomial law") {
  // Pair (P, Q) at visibility 0.9: expectation -0.45, p_plus = 0.275.
  const int shots = 1000;
  const int seeds = 1000;
  const double expectation = -0.45;
  const double p_plus = 0.5 * (1.0 + expectation);
  const double sigma = 2.0 * std::sqrt(p_plus * (1.0 - p_plus) / shots);

  double sum = 0.0, sum_sq = 0.0;
  for (int s = 0; s < seeds; ++s) {
    NoiseModel noise;
    noise.visibility = 0.9;
    noise.angle_jitter_deg = 0.0;
    noise.shots_per_setting = shots;
    noise.rng_seed = static_cast<std::uint64_t>(s);
    const auto r = simulate_pair("P", "Q", noise);
    sum += r.estimate;
    sum_sq += r.estimate * r.estimate;

    // The quoted error bar comes from the observed counts.
    const double q = 0.5 * (1.0 + r.estimate);
    CHECK(r.std_dev ==
          doctest::Approx(2.0 * std::sqrt(q * (1.0 - q) / shots))
              .epsilon(1e-12));

    // Estimates live on the count lattice (2 n - shots) / shots.
    const double n_plus = 0.5 * (r.estimate * shots + shots);
    CHECK(std::abs(n_plus - std::round(n_plus)) < 1e-9);
    CHECK(n_plus >= 0.0);
    CHECK(n_plus <= shots);
  }
  const double mean = sum / seeds;
  const double var = sum_sq / seeds - mean * mean;
  CHECK(std::abs(mean - expectation) < 4.0 * sigma / std::sqrt(seeds));
  CHECK(std::sqrt(var) == doctest::Approx(sigma).epsilon(0.10));
}

TEST_CASE("estimates are deterministic in the seed") {
  NoiseModel noise;
  noise.visibility = 0.938;
  noise.angle_jitter_deg = 1.0;
  noise.shots_per_setting = 2000;
  noise.rng_seed = 77;

  const auto a = simulate_pair("X", "Y", noise, 3);
  const auto b = simulate_pair("X", "Y", noise, 3);
  CHECK(a.estimate == b.estimate);
  CHECK(a.std_dev == b.std_dev);

  noise.rng_seed = 78;
  const auto c = simulate_pair("X", "Y", noise, 3);
  CHECK(a.estimate != c.estimate);

  // Whole tables serialize bit-identically for identical seeds.
  noise.rng_seed = 77;
  const std::string csv1 = measurement_csv(measurement_table(noise));
  const std::string csv2 = measurement_csv(measurement_table(noise));
  CHECK(csv1 == csv2);
}

TEST_CASE("witness estimate is affine in the visibility") {
  const std::vector<GammaEntry> gamma = {
      {"X", "Y", -1.0}, {"Y", "X", -1.0}, {"P", "Q", 0.3}};
  const CausalWitness witness{gamma, witness_operator(gamma), 0.0};
  // Perfect-visibility value: 1 + (1 + 1 - 0.15) / 4.
  const double slope = 0.4625;
  for (const double v : {0.0, 0.3, 0.7, 1.0}) {
    const auto run = run_experiment(witness, exact_model(v));
    REQUIRE(run.stokes.size() == gamma.size());
    CHECK(run.estimate.value == doctest::Approx(1.0 + slope * v).epsilon(1e-9));
    CHECK(run.estimate.std_error == 0.0);
    CHECK(run.estimate.sigma_from_bound == 0.0);
    for (const auto& record : run.stokes) CHECK(record.std_dev == 0.0);
  }
}

TEST_CASE("prism jitter perturbs the contrast within its scale") {
  NoiseModel noise;
  noise.visibility = 1.0;
  noise.angle_jitter_deg = 1.0;
  noise.analytic = true;
  noise.rng_seed = 5;

  // Four prisms jittered by at most a degree tilt two unitaries by at most
  // ~0.07 in operator norm each; the contrast moves by far less than 0.3.
  const auto r = simulate_pair("X", "X", noise);
  CHECK(r.ideal == doctest::Approx(1.0));
  CHECK(std::abs(r.estimate - r.ideal) < 0.3);
  CHECK(r.estimate <= 1.0 + 1e-12);

  const auto again = simulate_pair("X", "X", noise);
  CHECK(r.estimate == again.estimate);
}

TEST_CASE("measurement table serializes as CSV") {
  NoiseModel noise;
  noise.visibility = 0.938;
  noise.angle_jitter_deg = 0.0;
  noise.analytic = true;

  const auto rows = measurement_table(noise);
  const std::string csv = measurement_csv(rows);
  std::istringstream lines(csv);
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line == "pair_index,gate_a,gate_b,ideal,simulated,std");

  int count = 0;
  while (std::getline(lines, line)) {
    std::istringstream fields(line);
    std::string index, a, b, ideal, simulated, std_dev;
    REQUIRE(std::getline(fields, index, ','));
    REQUIRE(std::getline(fields, a, ','));
    REQUIRE(std::getline(fields, b, ','));
    REQUIRE(std::getline(fields, ideal, ','));
    REQUIRE(std::getline(fields, simulated, ','));
    REQUIRE(std::getline(fields, std_dev));
    CHECK(std::stoi(index) == count);
    CHECK(a == rows[count].gate_a);
    CHECK(b == rows[count].gate_b);
    CHECK(std::stod(ideal) == doctest::Approx(rows[count].ideal));
    CHECK(std::stod(simulated) ==
          doctest::Approx(rows[count].estimate).epsilon(1e-12));
    ++count;
  }
  CHECK(count == 36);

  // At zero jitter the analytic column is exactly visibility times ideal.
  for (const auto& r : rows)
    CHECK(r.estimate == doctest::Approx(0.938 * r.ideal).epsilon(1e-9));
}

TEST_CASE("noise model validation") {
  NoiseModel noise;

  noise.visibility = 1.2;
  CHECK_THROWS_AS(simulate_pair("X", "Y", noise), std::invalid_argument);
  noise.visibility = -0.1;
  CHECK_THROWS_AS(simulate_pair("X", "Y", noise), std::invalid_argument);
  noise.visibility = 0.9;

  noise.angle_jitter_deg = 5.5;
  CHECK_THROWS_AS(simulate_pair("X", "Y", noise), std::invalid_argument);
  noise.angle_jitter_deg = -1.0;
  CHECK_THROWS_AS(simulate_pair("X", "Y", noise), std::invalid_argument);
  noise.angle_jitter_deg = 1.0;

  noise.shots_per_setting = 0;
  CHECK_THROWS_AS(simulate_pair("X", "Y", noise), std::invalid_argument);
  noise.analytic = true;  // shot count is ignored in the exact limit
  CHECK_NOTHROW(simulate_pair("X", "Y", noise));
  noise.analytic = false;
  noise.shots_per_setting = 100;

  CHECK_THROWS_AS(simulate_pair("H", "Y", noise), std::invalid_argument);
  CHECK_THROWS_AS(measurement_table(NoiseModel{.visibility = 2.0}),
                  std::invalid_argument);

  const CausalWitness empty{{}, witness_operator({}), 0.0};
  const auto run = run_experiment(empty, noise);
  CHECK(run.stokes.empty());
  CHECK(run.estimate.value == doctest::Approx(1.0));
}
