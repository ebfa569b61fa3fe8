#pragma once

#include <cstddef>
#include <vector>

#include "switchlab/matstack.hpp"

namespace switchlab {

//============================================================================
// Pauli word expansion for multi-qubit Hermitian matrices.
//
// A 2^n dimensional matrix M expands as M = sum_k c_k sigma_k where sigma_k
// is the n-fold tensor product of single-qubit Paulis selected by the base-4
// digits of k (0=I, 1=X, 2=Y, 3=Z), digit for qubit 0 most significant.
// The words are orthogonal with tr(sigma_j sigma_k) = 2^n delta_jk, so for
// Hermitian M every c_k is real and tr(A B) = 2^n sum_k a_k b_k.
//============================================================================

// Number of qubits for a 2^n dimensional matrix; throws on non powers of two.
int qubit_count(int dim);

// Base-4 digit of word index k addressing the given qubit.
inline int pauli_digit(std::size_t k, int qubit, int num_qubits) {
  return static_cast<int>(k >> (2 * (num_qubits - 1 - qubit))) & 3;
}

// Expansion coefficients of a Hermitian matrix, length 4^n. Imaginary
// parts (roundoff for Hermitian input) are dropped.
std::vector<double> pauli_coefficients(const ComplexMatrix& m);

// Inverse of pauli_coefficients.
ComplexMatrix matrix_from_pauli(const std::vector<double>& coeffs);

// Plain euclidean dot; scale by 2^n for a trace inner product.
double pauli_dot(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace switchlab
