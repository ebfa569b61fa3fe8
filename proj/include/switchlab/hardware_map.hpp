#pragma once

#include <string>
#include <vector>

#include "switchlab/matstack.hpp"

namespace switchlab {

//============================================================================
// Optical realization of the target-qubit gates.
//
// Each gate on the transverse-mode qubit is built from two inverting prisms
// with a fixed phase element after each one. A prism at angle theta acts as
// the reflection
//     R(theta) = [[cos 2theta, sin 2theta], [sin 2theta, -cos 2theta]],
// the phase element as C = diag(1, i), and the chain realizes
//     U(theta1, theta2, phase) = e^{i phase} C R(theta2) C R(theta1)
// with the beam meeting the theta1 prism first. Two prism angles and a
// global phase span a three-parameter slice of U(2); unitaries off that
// slice are rejected rather than approximated.
//============================================================================

// Reflection of the mode qubit produced by one prism (angle in degrees).
ComplexMatrix prism_rotation(double theta_deg);

// The fixed phase element C = diag(1, i).
ComplexMatrix phase_element();

// Unitary realized by the full chain at the given settings.
ComplexMatrix chain_unitary(double theta1_deg, double theta2_deg,
                            double phase_rad);

// Prism settings (degrees), global phase (radians) and the unitary the chain
// realizes at exactly these settings.
struct OpticalRecipe {
  double theta1_deg = 0.0;
  double theta2_deg = 0.0;
  double phase_rad = 0.0;
  ComplexMatrix realized;
};

// The recipe's unitary when each prism is off by the given amount (degrees).
// Prism deviations are physically bounded; |d| > 5 degrees throws
// std::invalid_argument. The result is exactly unitary.
ComplexMatrix realized_with_errors(const OpticalRecipe& recipe, double d1_deg,
                                   double d2_deg);

// Finds settings whose realized unitary matches u to 1e-9 in max norm. A
// coarse scan over both angles locates the candidate basins (ties resolved
// toward smaller angles), Newton steps on the overlap |tr(U^dag u)|^2 polish
// them, and the global phase is read off the polished overlap. Throws
// std::runtime_error when the chain cannot express u and
// std::invalid_argument when u is not a 2x2 unitary.
OpticalRecipe compile_unitary(const ComplexMatrix& u);

// CSV table `gate,theta1_deg,theta2_deg,phase_rad` for the named gates.
std::string recipe_csv(const std::vector<std::string>& gates);

}  // namespace switchlab
