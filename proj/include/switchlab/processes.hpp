#pragma once

#include <string>
#include <vector>

#include "switchlab/matstack.hpp"

namespace switchlab {

//============================================================================
// Process matrices for a two-operation switch with a control qubit.
//
// Conventions, fixed across the whole library:
//  * Subsystem order is AI, AO, BI, BO, C (each a qubit, 32 dims total).
//    AI/AO are the input/output of party A, likewise BI/BO for B, and C is
//    the control qubit read out at the end.
//  * A unitary instrument element U enters the pairing as the *transposed*
//    Choi operator on (in, out); with that convention expectation values are
//    plain traces,  <M> = tr[(choi_A (x) choi_B (x) M_C) W].
//  * The target qubit leaves the last operation in a fixed direction and is
//    discarded, so W has trace 4 (one dim factor per discarded output).
//============================================================================

inline const std::vector<std::string>& process_labels() {
  static const std::vector<std::string> labels = {"AI", "AO", "BI", "BO", "C"};
  return labels;
}

// The interferometer gate alphabet: I, X, Y, Z and the two diagonal
// combinations P = (Y+Z)/sqrt(2), Q = (X+Z)/sqrt(2).
const std::vector<std::string>& standard_gate_names();
ComplexMatrix gate_matrix(const std::string& name);

// Transposed Choi operator of the unitary channel rho -> u rho u^dag,
// subsystems (in_label, out_label), trace 2.
HermitianOperator choi_of_unitary(const ComplexMatrix& u,
                                  const std::string& in_label,
                                  const std::string& out_label);

// Process matrix of the switch: the control in alpha|0> + beta|1> routes the
// target through A then B (control 0) or B then A (control 1). The target
// enters in state `target` and its final output is discarded. Requires
// alpha^2 + beta^2 = 1 and a normalized target state.
HermitianOperator switch_process(double alpha, double beta,
                                 const std::vector<cplx>& target = {1.0, 0.0});

// Equal-weight switch, the configuration the interferometer realizes.
HermitianOperator balanced_switch_process();

// Maximally mixed process on the standard subsystems (trace 4).
HermitianOperator white_noise_process();

// tr(m w); subsystem labels and dims of both operands must agree.
double born_expectation(const HermitianOperator& process,
                        const HermitianOperator& observable);

// Expectation of sigma_x on the control after applying gates a and b,
// computed through the process matrix pairing.
double stokes_expectation(const HermitianOperator& process,
                          const ComplexMatrix& a, const ComplexMatrix& b);

// The same expectation straight from the circuit picture:
// Re <psi| a^dag b^dag a b |psi> for an equal-weight switch.
double analytic_stokes(const ComplexMatrix& a, const ComplexMatrix& b,
                       const std::vector<cplx>& target = {1.0, 0.0});

// Partially dephase the control qubit: off-diagonal control blocks are
// scaled by visibility v in [0, 1]. Models reduced interferometric
// visibility; every control Stokes parameter scales by v.
HermitianOperator dephase_control(const HermitianOperator& process, double v);

}  // namespace switchlab
