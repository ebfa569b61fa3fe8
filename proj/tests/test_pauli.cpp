#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "switchlab/matstack.hpp"
#include "switchlab/pauli.hpp"

using namespace switchlab;

namespace {

ComplexMatrix single_pauli(int d) {
  ComplexMatrix m(2);
  switch (d) {
    case 0:
      m.at(0, 0) = 1.0;
      m.at(1, 1) = 1.0;
      break;
    case 1:
      m.at(0, 1) = 1.0;
      m.at(1, 0) = 1.0;
      break;
    case 2:
      m.at(0, 1) = cplx(0.0, -1.0);
      m.at(1, 0) = cplx(0.0, 1.0);
      break;
    default:
      m.at(0, 0) = 1.0;
      m.at(1, 1) = -1.0;
  }
  return m;
}

// Oracle: build the Pauli word by explicit tensor products.
ComplexMatrix pauli_word(std::size_t k, int n) {
  ComplexMatrix w = single_pauli(pauli_digit(k, 0, n));
  for (int i = 1; i < n; ++i) {
    const ComplexMatrix p = single_pauli(pauli_digit(k, i, n));
    ComplexMatrix next(w.dim() * 2);
    for (int r = 0; r < w.dim(); ++r)
      for (int c = 0; c < w.dim(); ++c)
        for (int rr = 0; rr < 2; ++rr)
          for (int cc = 0; cc < 2; ++cc)
            next.at(r * 2 + rr, c * 2 + cc) = w.at(r, c) * p.at(rr, cc);
    w = next;
  }
  return w;
}

ComplexMatrix random_hermitian(int n, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexMatrix m(n);
  for (int r = 0; r < n; ++r) {
    m.at(r, r) = g(gen);
    for (int c = r + 1; c < n; ++c) {
      const cplx v(g(gen), g(gen));
      m.at(r, c) = v;
      m.at(c, r) = std::conj(v);
    }
  }
  return m;
}

}  // namespace

TEST_CASE("qubit count") {
  CHECK(qubit_count(1) == 0);
  CHECK(qubit_count(2) == 1);
  CHECK(qubit_count(32) == 5);
  CHECK_THROWS_AS(qubit_count(6), std::invalid_argument);
  CHECK_THROWS_AS(qubit_count(0), std::invalid_argument);
}

TEST_CASE("digit extraction") {
  // k = 0b 01 10 11 = digits (1, 2, 3) on three qubits.
  const std::size_t k = (1 << 4) | (2 << 2) | 3;
  CHECK(pauli_digit(k, 0, 3) == 1);
  CHECK(pauli_digit(k, 1, 3) == 2);
  CHECK(pauli_digit(k, 2, 3) == 3);
}

TEST_CASE("single word coefficients") {
  // Each Pauli word must expand to a unit vector at its own index.
  const int n = 2;
  for (std::size_t k = 0; k < 16; ++k) {
    const auto c = pauli_coefficients(pauli_word(k, n));
    for (std::size_t j = 0; j < 16; ++j)
      CHECK(c[j] == doctest::Approx(j == k ? 1.0 : 0.0).epsilon(1e-14));
  }
}

TEST_CASE("coefficients against trace oracle") {
  const int n = 3;
  const ComplexMatrix m = random_hermitian(1 << n, 77);
  const auto c = pauli_coefficients(m);
  REQUIRE(c.size() == std::size_t(1) << (2 * n));
  for (std::size_t k = 0; k < c.size(); ++k) {
    // c_k = tr(sigma_k M) / 2^n
    const cplx t = (pauli_word(k, n) * m).trace();
    CHECK(t.imag() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(c[k] == doctest::Approx(t.real() / (1 << n)).epsilon(1e-12));
  }
}

TEST_CASE("round trip") {
  for (int n : {1, 2, 5}) {
    const ComplexMatrix m = random_hermitian(1 << n, 200 + n);
    const ComplexMatrix back = matrix_from_pauli(pauli_coefficients(m));
    CHECK(max_abs_diff(back, m) < 1e-13);
  }
  // Coefficients to matrix and back is exact on a sparse vector.
  std::vector<double> c(1024, 0.0);
  c[0] = 0.125;
  c[37] = -0.5;
  c[1023] = 1.0;
  const auto c2 = pauli_coefficients(matrix_from_pauli(c));
  for (std::size_t k = 0; k < c.size(); ++k)
    CHECK(c2[k] == doctest::Approx(c[k]).epsilon(1e-14));
}

TEST_CASE("identity coefficient is the normalized trace") {
  const ComplexMatrix m = random_hermitian(8, 91);
  const auto c = pauli_coefficients(m);
  CHECK(c[0] == doctest::Approx(m.trace().real() / 8.0).epsilon(1e-13));
}

TEST_CASE("dot reproduces trace inner product") {
  const int n = 4;
  const ComplexMatrix a = random_hermitian(1 << n, 301);
  const ComplexMatrix b = random_hermitian(1 << n, 302);
  const double lhs = (a * b).trace().real();
  const double rhs =
      (1 << n) * pauli_dot(pauli_coefficients(a), pauli_coefficients(b));
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));

  CHECK_THROWS_AS(pauli_dot({1.0}, {1.0, 2.0}), std::invalid_argument);
}
