#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "switchlab/matstack.hpp"
#include "switchlab/processes.hpp"

using namespace switchlab;

namespace {

// Ideal control Stokes parameters for every ordered gate pair, target |0>.
// Row is the gate in arm A, column the gate in arm B, both in the order
// I, X, Y, Z, P, Q. Derived by hand from the commutator picture: the value
// is Re<0| a b a b |0> for these (Hermitian) gates.
const double kIdealStokes[6][6] = {
    {1.0, 1.0, 1.0, 1.0, 1.0, 1.0},
    {1.0, 1.0, -1.0, -1.0, -1.0, 0.0},
    {1.0, -1.0, 1.0, -1.0, 0.0, -1.0},
    {1.0, -1.0, -1.0, 1.0, 0.0, 0.0},
    {1.0, -1.0, 0.0, 0.0, 1.0, -0.5},
    {1.0, 0.0, -1.0, 0.0, -0.5, 1.0},
};

ComplexMatrix random_unitary(unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexMatrix h(2);
  h.at(0, 0) = g(gen);
  h.at(1, 1) = g(gen);
  const cplx off(g(gen), g(gen));
  h.at(0, 1) = off;
  h.at(1, 0) = std::conj(off);
  const auto e = eigh(h);
  ComplexMatrix u(2);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c)
      for (int j = 0; j < 2; ++j)
        u.at(r, c) += std::exp(cplx(0.0, e.eigenvalues[j])) *
                      e.eigenvectors.at(r, j) *
                      std::conj(e.eigenvectors.at(c, j));
  return u;
}

double min_eigenvalue(const ComplexMatrix& m) {
  return eigh(m).eigenvalues.front();
}

}  // namespace

TEST_CASE("gate alphabet") {
  REQUIRE(standard_gate_names().size() == 6);
  for (const auto& name : standard_gate_names()) {
    const ComplexMatrix g = gate_matrix(name);
    CHECK(max_abs_diff(g.adjoint() * g, ComplexMatrix::identity(2)) < 1e-15);
    // Every gate in the alphabet is Hermitian, so it squares to identity.
    CHECK(max_abs_diff(g, g.adjoint()) < 1e-15);
  }
  // P and Q are the +/- diagonal reflections in the YZ and XZ planes.
  const ComplexMatrix p = gate_matrix("P");
  CHECK(p.at(0, 0).real() == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(std::abs(p.at(0, 1) - cplx(0.0, -1.0 / std::sqrt(2.0))) < 1e-15);
  const ComplexMatrix q = gate_matrix("Q");
  CHECK(q.at(0, 1).real() == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK_THROWS_AS(gate_matrix("H"), std::invalid_argument);
}

TEST_CASE("choi operator of a unitary") {
  for (unsigned seed : {1u, 2u, 3u}) {
    const ComplexMatrix u = random_unitary(seed);

    // Oracle: transpose of sum_lm |l><m| (x) u |l><m| u^dag.
    ComplexMatrix sum(4);
    for (int l = 0; l < 2; ++l)
      for (int m = 0; m < 2; ++m)
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j)
            sum.at(l * 2 + i, m * 2 + j) = u.at(i, l) * std::conj(u.at(j, m));
    const ComplexMatrix expected = sum.transpose();

    const auto choi = choi_of_unitary(u, "in", "out");
    CHECK(max_abs_diff(choi.matrix(), expected) < 1e-14);
    CHECK(choi.trace() == doctest::Approx(2.0).epsilon(1e-13));
    // Rank one and positive.
    const auto e = eigh(choi.matrix());
    CHECK(e.eigenvalues.front() >= -1e-12);
    CHECK(e.eigenvalues.back() == doctest::Approx(2.0).epsilon(1e-12));
  }
}

TEST_CASE("switch process shape") {
  const auto w = balanced_switch_process();
  CHECK(w.dim() == 32);
  REQUIRE(w.subsystems().size() == 5);
  CHECK(w.subsystems()[0].label == "AI");
  CHECK(w.subsystems()[4].label == "C");
  CHECK(w.trace() == doctest::Approx(4.0).epsilon(1e-13));
  CHECK(min_eigenvalue(w.matrix()) >= -1e-12);

  CHECK_THROWS_AS(switch_process(0.5, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(switch_process(1.0, 0.0, {cplx(2.0, 0.0), 0.0}),
                  std::invalid_argument);
}

TEST_CASE("ideal stokes table") {
  const auto w = balanced_switch_process();
  const auto& names = standard_gate_names();
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) {
      const ComplexMatrix ga = gate_matrix(names[a]);
      const ComplexMatrix gb = gate_matrix(names[b]);
      INFO("pair ", names[a], names[b]);
      CHECK(std::abs(stokes_expectation(w, ga, gb) - kIdealStokes[a][b]) <
            1e-10);
      CHECK(std::abs(analytic_stokes(ga, gb) - kIdealStokes[a][b]) < 1e-12);
    }
}

TEST_CASE("process pairing matches the circuit picture") {
  const auto w = balanced_switch_process();
  for (unsigned seed = 10; seed < 20; ++seed) {
    const ComplexMatrix a = random_unitary(seed);
    const ComplexMatrix b = random_unitary(seed + 100);
    CHECK(std::abs(stokes_expectation(w, a, b) - analytic_stokes(a, b)) <
          1e-10);
  }

  // Unbalanced control amplitudes scale the interference term by 2ab.
  const auto w68 = switch_process(0.6, 0.8);
  const ComplexMatrix gx = gate_matrix("X");
  const ComplexMatrix gy = gate_matrix("Y");
  CHECK(stokes_expectation(w68, gx, gy) ==
        doctest::Approx(2.0 * 0.6 * 0.8 * -1.0).epsilon(1e-10));
}

TEST_CASE("white noise process") {
  const auto omega = white_noise_process();
  CHECK(omega.trace() == doctest::Approx(4.0).epsilon(1e-13));
  for (const auto& a : standard_gate_names())
    for (const auto& b : standard_gate_names())
      CHECK(std::abs(stokes_expectation(omega, gate_matrix(a),
                                        gate_matrix(b))) < 1e-13);
}

TEST_CASE("control dephasing") {
  const auto w = balanced_switch_process();

  const auto same = dephase_control(w, 1.0);
  CHECK(max_abs_diff(same.matrix(), w.matrix()) == 0.0);

  const auto v = dephase_control(w, 0.938);
  CHECK(v.trace() == doctest::Approx(4.0).epsilon(1e-13));
  CHECK(min_eigenvalue(v.matrix()) >= -1e-12);
  const ComplexMatrix gx = gate_matrix("X");
  const ComplexMatrix gy = gate_matrix("Y");
  CHECK(stokes_expectation(v, gx, gy) ==
        doctest::Approx(0.938 * -1.0).epsilon(1e-10));
  CHECK(stokes_expectation(dephase_control(w, 0.0), gx, gy) ==
        doctest::Approx(0.0).epsilon(1e-12));

  CHECK_THROWS_AS(dephase_control(w, 1.5), std::invalid_argument);
}

TEST_CASE("born expectation checks layouts") {
  const auto w = balanced_switch_process();
  const auto wrong =
      HermitianOperator(ComplexMatrix::identity(32),
                        {{"a", 2}, {"b", 2}, {"c", 2}, {"d", 2}, {"e", 2}});
  CHECK_THROWS_AS(born_expectation(w, wrong), std::invalid_argument);
}
