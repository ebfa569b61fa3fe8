#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "switchlab/matstack.hpp"
#include "switchlab/sdp.hpp"

namespace switchlab {

//============================================================================
// Measurable causal witnesses.
//
// The interferometer can only estimate control Stokes parameters: for each
// ordered gate pair (a, b) it measures <X_C> with a applied in one arm and b
// in the other. The witnesses built here are therefore restricted to the
// span of those measurements,
//
//   S(gamma) = 1/4 ( I + sum_ab gamma_ab  A_a (x) B_b (x) X_C ),
//
// where A and B are the transposed Choi operators of the gates. The identity
// share fixes tr(S Omega) = 1, every other term is traceless, and the
// pairing value against a process decomposes into measured numbers:
// tr(S W) = 1 + 1/4 sum gamma_ab <X>_ab.
//
// optimize_witness minimizes tr(S W) over valid witnesses of this family
// (tr(S V) >= 0 for every causally separable V), then sparsifies gamma so
// the experiment has fewer settings to measure.
//============================================================================

// One measured (or simulated) control Stokes parameter for a gate pair.
struct StokesRecord {
  std::string gate_a;
  std::string gate_b;
  double value = 0.0;
  double std_dev = 0.0;
};

// One coefficient of the witness expansion.
struct GammaEntry {
  std::string gate_a;
  std::string gate_b;
  double value = 0.0;
};

// S(gamma) from the table above. Gate names must be in the alphabet.
HermitianOperator witness_operator(const std::vector<GammaEntry>& gamma);

struct CausalWitness {
  std::vector<GammaEntry> gamma;
  HermitianOperator op;
  // Guaranteed minimum of tr(S V) over causally separable V: zero for ideal
  // gates by construction, below zero once gate alignment errors are folded
  // in (corrected_separable_bound).
  double separable_bound = 0.0;
};

// {"gamma": [[gate_a, gate_b, value], ...], "separable_bound": x}; the
// operator is rebuilt from the table on load.
nlohmann::json to_json(const CausalWitness& witness);
CausalWitness witness_from_json(const nlohmann::json& j);

// CSV with header `gate_a,gate_b,stokes,std`, one row per record.
std::string stokes_to_csv(const std::vector<StokesRecord>& records);
std::vector<StokesRecord> stokes_from_csv(const std::string& csv);

// Thrown when the requested gate set admits no negative witness value; the
// message carries the best value found.
struct NoWitnessError : std::runtime_error {
  explicit NoWitnessError(const std::string& what) : std::runtime_error(what) {}
};

struct WitnessOptions {
  SdpOptions sdp;               // feasibility probe settings
  double bisect_tol = 1e-4;     // objective level resolution
  double prune_threshold = 1e-6;
};

struct WitnessResult {
  CausalWitness witness;
  double optimum = 0.0;           // tr(S w) of the returned witness
  double full_set_optimum = 0.0;  // optimum before sparsification
  int pairs_examined = 0;
  SdpDiagnostics diagnostics;
};

// Minimizes tr(S(gamma) w) over valid witnesses on all ordered pairs from
// `gates`, then minimizes sum |gamma| at (essentially) the optimal value,
// prunes coefficients below the threshold and re-optimizes on the surviving
// pairs. Throws NoWitnessError when the optimum is not negative, so callers
// can tell "this gate set cannot witness" from solver failures.
WitnessResult optimize_witness(const HermitianOperator& w,
                               const std::vector<std::string>& gates,
                               const WitnessOptions& opts = {});

struct WitnessEstimate {
  double value = 0.0;      // 1 + 1/4 sum gamma_ab <X>_ab
  double std_error = 0.0;  // linear propagation of the per-pair deviations
  // Standard errors separating the value from the separable bound; zero when
  // the value does not undercut the bound or no uncertainty is available.
  double sigma_from_bound = 0.0;
};

// Reconstructs the witness value from measured Stokes parameters. Every
// gamma pair must have a record; missing pairs throw std::invalid_argument.
WitnessEstimate evaluate_witness(const CausalWitness& witness,
                                 const std::vector<StokesRecord>& stokes);

struct BoundOptions {
  int mc_samples = 200;     // random interior perturbations
  std::uint64_t seed = 1;   // stream for those draws
  SdpOptions sdp;           // inner minimization probe settings
  double bisect_tol = 1e-4;
};

// Conservative replacement for the ideal separable bound of 0 when each
// prism angle of each realized gate may be off by up to the given amount
// (degrees, at most 5). Minimizes the measured combination over causally
// separable processes at the extreme corner misalignments plus Monte-Carlo
// interior draws, independently per pair, and returns the smallest value
// found (clamped to zero from above). Exactly 0 for zero uncertainty.
double corrected_separable_bound(const CausalWitness& witness,
                                 double angle_uncertainty_deg,
                                 const BoundOptions& opts = {});

}  // namespace switchlab
