#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "switchlab/hardware_map.hpp"
#include "switchlab/matstack.hpp"
#include "switchlab/processes.hpp"
#include "switchlab/rng.hpp"

using namespace switchlab;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Prism settings that realize the gate alphabet, worked out by hand from the
// element algebra. Writing C R(t2) C R(t1) in the Pauli basis gives
//   i sin2t2 sin2t1 I + cos2t2 sin2t1 X + sin2t2 cos2t1 Y + cos2t2 cos2t1 Z,
// and matching components (smallest angles first) pins each gate down.
struct KnownRecipe {
  const char* gate;
  double theta1_deg;
  double theta2_deg;
  double phase_rad;
};

const KnownRecipe kKnownRecipes[] = {
    {"I", 45.0, 45.0, -kPi / 2.0},
    {"X", 45.0, 0.0, 0.0},
    {"Y", 0.0, 45.0, 0.0},
    {"Z", 0.0, 0.0, 0.0},
    {"P", 0.0, 22.5, 0.0},
    {"Q", 22.5, 0.0, 0.0},
};

double largest_singular_value(const ComplexMatrix& m) {
  return std::sqrt(eigh(m.adjoint() * m).eigenvalues.back());
}

}  // namespace

TEST_CASE("prism rotation is a reflection") {
  for (int i = 0; i < 24; ++i) {
    const double theta = 7.5 * i;
    const ComplexMatrix r = prism_rotation(theta);
    CHECK(max_abs_diff(r, r.adjoint()) < 1e-15);
    CHECK(max_abs_diff(r * r, ComplexMatrix::identity(2)) < 1e-15);
    // det R = -1: a reflection, not a rotation.
    const cplx det = r(0, 0) * r(1, 1) - r(0, 1) * r(1, 0);
    CHECK(std::abs(det - cplx(-1.0, 0.0)) < 1e-15);
    // The physical prism angle is only defined modulo a half turn.
    CHECK(max_abs_diff(r, prism_rotation(theta + 180.0)) < 1e-12);
  }
}

TEST_CASE("phase element powers") {
  const ComplexMatrix c = phase_element();
  CHECK(max_abs_diff(c * c, gate_matrix("Z")) < 1e-15);
  const ComplexMatrix c2 = c * c;
  CHECK(max_abs_diff(c2 * c2, ComplexMatrix::identity(2)) < 1e-15);
}

TEST_CASE("gate alphabet compiles to the known prism settings") {
  for (const auto& known : kKnownRecipes) {
    CAPTURE(known.gate);
    const ComplexMatrix u = gate_matrix(known.gate);
    const OpticalRecipe recipe = compile_unitary(u);
    CHECK(std::abs(recipe.theta1_deg - known.theta1_deg) < 1e-6);
    CHECK(std::abs(recipe.theta2_deg - known.theta2_deg) < 1e-6);
    CHECK(std::abs(recipe.phase_rad - known.phase_rad) < 1e-7);
    CHECK(max_abs_diff(recipe.realized, u) < 1e-9);
    // The stored unitary matches the chain at the reported settings.
    CHECK(max_abs_diff(recipe.realized,
                       chain_unitary(recipe.theta1_deg, recipe.theta2_deg,
                                     recipe.phase_rad)) == 0.0);
  }
}

TEST_CASE("compilation is deterministic") {
  const OpticalRecipe a = compile_unitary(gate_matrix("P"));
  const OpticalRecipe b = compile_unitary(gate_matrix("P"));
  CHECK(a.theta1_deg == b.theta1_deg);
  CHECK(a.theta2_deg == b.theta2_deg);
  CHECK(a.phase_rad == b.phase_rad);
}

TEST_CASE("chain members compile back to themselves") {
  SplitMix64 rng(SplitMix64::key(20260816, 0));
  for (int trial = 0; trial < 24; ++trial) {
    const double t1 = rng.uniform(0.0, 180.0);
    const double t2 = rng.uniform(0.0, 180.0);
    const double ph = rng.uniform(-kPi, kPi);
    const ComplexMatrix u = chain_unitary(t1, t2, ph);
    const OpticalRecipe recipe = compile_unitary(u);
    // The settings may differ (the chain has equivalent angle branches); the
    // realized unitary must not.
    CHECK(max_abs_diff(recipe.realized, u) < 1e-9);
  }
}

TEST_CASE("unitaries outside the chain are rejected") {
  // A relative phase between the mode components needs a third prism: the
  // chain only reaches diagonal unitaries that are I or Z up to phase.
  ComplexMatrix zrot(2);
  zrot.at(0, 0) = 1.0;
  zrot.at(1, 1) = std::exp(cplx(0.0, 0.6));
  CHECK_THROWS_AS(compile_unitary(zrot), std::runtime_error);

  ComplexMatrix rect(3);
  CHECK_THROWS_AS(compile_unitary(rect), std::invalid_argument);

  ComplexMatrix shrunk(2);
  shrunk.at(0, 0) = 1.0;
  shrunk.at(1, 1) = 0.5;
  CHECK_THROWS_AS(compile_unitary(shrunk), std::invalid_argument);
}

TEST_CASE("prism errors tilt the realized unitary") {
  const OpticalRecipe x = compile_unitary(gate_matrix("X"));

  // No deviation reproduces the recipe exactly.
  CHECK(max_abs_diff(realized_with_errors(x, 0.0, 0.0), x.realized) == 0.0);

  // A one degree error on the first prism moves X by sin(2 deg) in operator
  // norm: the reflection slews at twice the prism angle.
  const ComplexMatrix tilted = realized_with_errors(x, 1.0, 0.0);
  const double dist = largest_singular_value(tilted - x.realized);
  CHECK(std::abs(dist - std::sin(2.0 * kPi / 180.0)) < 1e-4);

  // Errors never break unitarity, even at the bound.
  for (const double d : {-5.0, -1.0, 0.5, 5.0}) {
    const ComplexMatrix v = realized_with_errors(x, d, -d / 2.0);
    CHECK(max_abs_diff(v.adjoint() * v, ComplexMatrix::identity(2)) < 1e-14);
  }

  CHECK_THROWS_AS(realized_with_errors(x, 5.1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(realized_with_errors(x, 0.0, -6.0), std::invalid_argument);
}

TEST_CASE("realized unitary is Lipschitz in the prism errors") {
  // Frobenius slope per degree is 2 sqrt(2) pi / 180, safely under the
  // 4 pi / 180 bound the downstream error analysis assumes.
  const double bound = 4.0 * kPi / 180.0;
  SplitMix64 rng(SplitMix64::key(20260816, 1));
  for (int trial = 0; trial < 16; ++trial) {
    OpticalRecipe recipe;
    recipe.theta1_deg = rng.uniform(0.0, 180.0);
    recipe.theta2_deg = rng.uniform(0.0, 180.0);
    recipe.phase_rad = rng.uniform(-kPi, kPi);
    recipe.realized = chain_unitary(recipe.theta1_deg, recipe.theta2_deg,
                                    recipe.phase_rad);
    const double d1 = rng.uniform(-5.0, 5.0);
    const double d2 = rng.uniform(-5.0, 5.0);
    const ComplexMatrix moved = realized_with_errors(recipe, d1, d2);
    const double dist = (moved - recipe.realized).frobenius_norm();
    CHECK(dist <= bound * (std::abs(d1) + std::abs(d2)) + 1e-12);
  }
}

TEST_CASE("recipe table serializes as CSV") {
  const std::string csv = recipe_csv(standard_gate_names());
  std::istringstream lines(csv);
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line == "gate,theta1_deg,theta2_deg,phase_rad");
  int rows = 0;
  while (std::getline(lines, line)) {
    std::istringstream fields(line);
    std::string gate, t1, t2, ph;
    REQUIRE(std::getline(fields, gate, ','));
    REQUIRE(std::getline(fields, t1, ','));
    REQUIRE(std::getline(fields, t2, ','));
    REQUIRE(std::getline(fields, ph, ','));
    CHECK(gate == standard_gate_names()[rows]);
    CHECK(std::abs(std::stod(t1) - kKnownRecipes[rows].theta1_deg) < 1e-5);
    CHECK(std::abs(std::stod(t2) - kKnownRecipes[rows].theta2_deg) < 1e-5);
    CHECK(std::abs(std::stod(ph) - kKnownRecipes[rows].phase_rad) < 1e-6);
    ++rows;
  }
  CHECK(rows == 6);
}
