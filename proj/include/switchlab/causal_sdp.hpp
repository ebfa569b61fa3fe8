#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "switchlab/matstack.hpp"
#include "switchlab/sdp.hpp"

namespace switchlab {

//============================================================================
// Causal structure of processes on (AI, AO, BI, BO, C).
//
// A process compatible with the order A then B is a positive operator whose
// Pauli expansion stays inside a fixed coordinate subspace: tracing the
// control must erase all dependence on BO, and additionally tracing BI, BO
// must erase all dependence on AO. Both requirements delete Pauli words, so
// the subspace is described by a 0/1 mask over the 1024 words. Likewise for
// B then A with the roles swapped.
//
// A process is causally separable when it splits as a sum of one positive
// operator per mask. Separability checks, optimal certificates and noise
// robustness all reduce to feasibility solves over these two masks.
//============================================================================

enum class CausalOrder { kAThenB, kBThenA };

// Mask over Pauli words (1 = allowed) for one-way processes of this order.
const std::vector<unsigned char>& order_mask(CausalOrder order);

// Membership in one order's cone: positive and supported on the mask.
// Scale invariant; trace is not checked here.
bool in_order_cone(const HermitianOperator& w, CausalOrder order,
                   double tol = 1e-9);

struct SeparabilityResult {
  bool separable = false;
  SdpDiagnostics diagnostics;
  // When separable: one-way components summing to the input.
  std::optional<HermitianOperator> component_ab;
  std::optional<HermitianOperator> component_ba;
  // When not separable and a certificate was requested: an operator S with
  // tr(S Omega) = 1, tr(S V) >= 0 for every one-way V, and tr(S w) < 0.
  std::optional<HermitianOperator> certificate;
};

SeparabilityResult is_causally_separable(const HermitianOperator& w,
                                         bool want_certificate = false,
                                         const SdpOptions& opts = {});

struct CertificateResult {
  HermitianOperator witness;  // normalized, tr(S Omega) = 1
  double value = 0.0;         // tr(S w)
  SdpDiagnostics diagnostics;
};

// Most negative tr(S w) over all valid normalized certificate operators,
// found by bisection over objective level sets. The returned witness is
// repaired to be exactly dual feasible (both masked completions positive),
// so its value is a sound bound even at loose solver tolerances. The level
// it certifies is always one a probe confirmed feasible; probes that sit
// almost exactly on the optimum can stay undecided within their iteration
// budget, so the reported value may exceed the true optimum by a few
// bisection tolerances, never the other way around.
CertificateResult optimal_causal_certificate(const HermitianOperator& w,
                                             const SdpOptions& opts = {},
                                             double bisect_tol = 1e-4);

struct RobustnessResult {
  double robustness = 0.0;    // least r with (w + r Omega)/(1 + r) separable
  HermitianOperator witness;  // optimal certificate of w; tr(S w) ~ -r
  SdpDiagnostics diagnostics;
};

// Smallest admixture of the maximally mixed process that makes w causally
// separable, by bisection over separability probes.
RobustnessResult random_robustness(const HermitianOperator& w,
                                   const SdpOptions& opts = {},
                                   double bisect_tol = 1e-4);

// Random causally separable process: a mixture of two one-way processes,
// each realized as a circuit with environment memory (state preparation,
// a channel between the parties, a channel into the control), so cone
// membership holds by construction. Deterministic in the seed; some seeds
// return pure one-way corner cases.
HermitianOperator sample_separable_process(std::uint64_t seed);

}  // namespace switchlab
