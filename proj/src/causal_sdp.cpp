#include "switchlab/causal_sdp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "switchlab/pauli.hpp"
#include "switchlab/processes.hpp"
#include "switchlab/rng.hpp"

namespace switchlab {

namespace {

constexpr int kWords = 1024;
constexpr int kQubits = 5;
constexpr int kAI = 0, kAO = 1, kBI = 2, kBO = 3, kC = 4;

std::vector<unsigned char> build_mask(bool a_first) {
  std::vector<unsigned char> mask(kWords, 0);
  for (int k = 0; k < kWords; ++k) {
    const int ai = pauli_digit(k, kAI, kQubits);
    const int ao = pauli_digit(k, kAO, kQubits);
    const int bi = pauli_digit(k, kBI, kQubits);
    const int bo = pauli_digit(k, kBO, kQubits);
    const int c = pauli_digit(k, kC, kQubits);
    const int first_out = a_first ? ao : bo;
    const int second_in = a_first ? bi : ai;
    const int second_out = a_first ? bo : ao;
    // Tracing the control must erase the second party's output; tracing the
    // whole second party must in addition erase the first party's output.
    const bool ok =
        (c != 0) || (second_out == 0 && (second_in != 0 || first_out == 0));
    mask[k] = ok ? 1 : 0;
  }
  return mask;
}

std::vector<Subsystem> standard_subsystems() {
  std::vector<Subsystem> subs;
  for (const auto& label : process_labels()) subs.push_back({label, 2});
  return subs;
}

void validate_process(const HermitianOperator& w) {
  const auto& subs = w.subsystems();
  const auto& labels = process_labels();
  if (w.dim() != 32 || subs.size() != labels.size())
    throw std::invalid_argument("process must live on five qubits");
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (subs[i].label != labels[i] || subs[i].dim != 2)
      throw std::invalid_argument("process subsystems must be AI AO BI BO C");
  if (std::abs(w.trace() - 4.0) > 1e-6)
    throw std::invalid_argument("process trace must be 4");
}

double off_span_norm(const std::vector<double>& coeffs) {
  const auto& m1 = order_mask(CausalOrder::kAThenB);
  const auto& m2 = order_mask(CausalOrder::kBThenA);
  double s = 0.0;
  for (int k = 0; k < kWords; ++k)
    if (!m1[k] && !m2[k]) s += coeffs[k] * coeffs[k];
  return std::sqrt(s);
}

// Affine set of ordered splittings: y1 masked to one order, y2 to the other,
// y1 + y2 equal to the target on the joint span.
class SplitProjector : public AffineProjector {
 public:
  explicit SplitProjector(std::vector<double> target)
      : target_(std::move(target)),
        m1_(order_mask(CausalOrder::kAThenB)),
        m2_(order_mask(CausalOrder::kBThenA)) {}

  void project(const BlockVector& in, BlockVector* out) const override {
    *out = in;
    auto& y1 = (*out)[0];
    auto& y2 = (*out)[1];
    for (int k = 0; k < kWords; ++k) {
      if (m1_[k] && m2_[k]) {
        const double d = 0.5 * (target_[k] - y1[k] - y2[k]);
        y1[k] += d;
        y2[k] += d;
      } else if (m1_[k]) {
        y1[k] = target_[k];
        y2[k] = 0.0;
      } else if (m2_[k]) {
        y2[k] = target_[k];
        y1[k] = 0.0;
      } else {
        y1[k] = 0.0;
        y2[k] = 0.0;
      }
    }
  }

 private:
  std::vector<double> target_;
  const std::vector<unsigned char>& m1_;
  const std::vector<unsigned char>& m2_;
};

// Affine set for certificate operators at a fixed objective level:
// blocks (s, p1, p2) with p_i agreeing with s on mask i (and free off it,
// so p_i positive certifies nonnegativity against that whole cone),
// s_0 pinned by normalization, and <s, w> pinned to the level.
class CertificateProjector : public AffineProjector {
 public:
  CertificateProjector(const std::vector<double>& w_coeffs, double value)
      : w_(w_coeffs),
        c_(value / 32.0),
        m1_(order_mask(CausalOrder::kAThenB)),
        m2_(order_mask(CausalOrder::kBThenA)) {
    denom_ = 0.0;
    mult_.resize(kWords);
    for (int k = 0; k < kWords; ++k) {
      mult_[k] = 1 + (m1_[k] ? 1 : 0) + (m2_[k] ? 1 : 0);
      if (k > 0) denom_ += w_[k] * w_[k] / mult_[k];
    }
  }

  double denom() const { return denom_; }

  void project(const BlockVector& in, BlockVector* out) const override {
    *out = in;
    auto& s = (*out)[0];
    auto& p1 = (*out)[1];
    auto& p2 = (*out)[2];
    s[0] = p1[0] = p2[0] = 0.25;
    for (int k = 1; k < kWords; ++k) {
      if (m1_[k] && m2_[k]) {
        const double mean = (s[k] + p1[k] + p2[k]) / 3.0;
        s[k] = p1[k] = p2[k] = mean;
      } else if (m1_[k]) {
        const double mean = 0.5 * (s[k] + p1[k]);
        s[k] = p1[k] = mean;
      } else if (m2_[k]) {
        const double mean = 0.5 * (s[k] + p2[k]);
        s[k] = p2[k] = mean;
      }
    }
    if (denom_ <= 0.0) return;
    double dot = 0.25 * w_[0];
    for (int k = 1; k < kWords; ++k) dot += w_[k] * s[k];
    const double lambda = (c_ - dot) / denom_;
    for (int k = 1; k < kWords; ++k) {
      if (w_[k] == 0.0) continue;
      const double d = lambda * w_[k] / mult_[k];
      s[k] += d;
      if (m1_[k]) p1[k] += d;
      if (m2_[k]) p2[k] += d;
    }
  }

 private:
  std::vector<double> w_;
  double c_;
  const std::vector<unsigned char>& m1_;
  const std::vector<unsigned char>& m2_;
  std::vector<int> mult_;
  double denom_;
};

HermitianOperator operator_from_coeffs(const std::vector<double>& coeffs) {
  return HermitianOperator(matrix_from_pauli(coeffs), standard_subsystems());
}

}  // namespace

const std::vector<unsigned char>& order_mask(CausalOrder order) {
  static const std::vector<unsigned char> ab = build_mask(true);
  static const std::vector<unsigned char> ba = build_mask(false);
  return order == CausalOrder::kAThenB ? ab : ba;
}

bool in_order_cone(const HermitianOperator& w, CausalOrder order, double tol) {
  const auto coeffs = pauli_coefficients(w.matrix());
  const auto& mask = order_mask(order);
  double off = 0.0, all = 0.0;
  for (int k = 0; k < kWords; ++k) {
    all += coeffs[k] * coeffs[k];
    if (!mask[k]) off += coeffs[k] * coeffs[k];
  }
  if (std::sqrt(off) > tol * std::max(1.0, std::sqrt(all))) return false;
  const double scale = std::max(1.0, w.matrix().max_abs());
  return eigh(w.matrix()).eigenvalues.front() >= -tol * scale;
}

SeparabilityResult is_causally_separable(const HermitianOperator& w,
                                         bool want_certificate,
                                         const SdpOptions& opts) {
  validate_process(w);
  SeparabilityResult res;

  // A process inside a single order cone needs no solve at all.
  for (const CausalOrder order :
       {CausalOrder::kAThenB, CausalOrder::kBThenA}) {
    if (!in_order_cone(w, order)) continue;
    res.separable = true;
    res.diagnostics.converged = true;
    const auto zero = HermitianOperator(ComplexMatrix(32), standard_subsystems());
    res.component_ab = (order == CausalOrder::kAThenB) ? w : zero;
    res.component_ba = (order == CausalOrder::kAThenB) ? zero : w;
    return res;
  }

  const auto coeffs = pauli_coefficients(w.matrix());

  // Weight outside both order subspaces rules out any splitting, and its
  // negative is already a certificate orthogonal to both cones.
  const double off = off_span_norm(coeffs);
  if (off > 1e-8) {
    res.separable = false;
    res.diagnostics.converged = true;
    res.diagnostics.objective = -1.0;
    if (want_certificate) {
      const auto& m1 = order_mask(CausalOrder::kAThenB);
      const auto& m2 = order_mask(CausalOrder::kBThenA);
      std::vector<double> s(kWords, 0.0);
      const double lambda = 2.0 / (32.0 * off);
      for (int k = 0; k < kWords; ++k)
        if (!m1[k] && !m2[k]) s[k] = -lambda * coeffs[k] / off;
      s[0] = 0.25;
      res.certificate = operator_from_coeffs(s);
    }
    return res;
  }

  ConeProjector cones(
      {{BlockCone::kPsdPauli, kWords}, {BlockCone::kPsdPauli, kWords}});
  const SplitProjector affine(coeffs);
  auto r = solve_feasibility(affine, cones, {}, opts);
  res.diagnostics = r.diagnostics;
  if (r.status == SolveStatus::kConverged) {
    res.separable = true;
    res.component_ab = operator_from_coeffs(r.affine_point[0]);
    res.component_ba = operator_from_coeffs(r.affine_point[1]);
  } else {
    res.separable = false;
    if (want_certificate) {
      auto cert = optimal_causal_certificate(w, opts);
      res.diagnostics.objective = cert.value;
      res.certificate = std::move(cert.witness);
    }
  }
  return res;
}

CertificateResult optimal_causal_certificate(const HermitianOperator& w,
                                             const SdpOptions& opts,
                                             double bisect_tol) {
  validate_process(w);
  const auto wc = pauli_coefficients(w.matrix());

  {
    // Nothing beyond the identity word: every normalized certificate scores
    // the same and the trivial one is already optimal.
    const CertificateProjector probe(wc, 1.0);
    if (probe.denom() < 1e-14) {
      CertificateResult res{white_noise_process(), 1.0, {}};
      std::vector<double> s(kWords, 0.0);
      s[0] = 0.25;
      res.witness = operator_from_coeffs(s);
      res.diagnostics.converged = true;
      res.diagnostics.objective = 1.0;
      return res;
    }
  }

  ConeProjector cones({{BlockCone::kFree, kWords},
                       {BlockCone::kPsdPauli, kWords},
                       {BlockCone::kPsdPauli, kWords}});
  BlockVector warm;
  BlockVector best;
  SdpDiagnostics best_diag;
  double best_t = 1.0;

  // Bisection probes near the boundary converge slowly in either direction,
  // so an undecided probe is scored infeasible; the misclassification band
  // this opens is well inside the bisection tolerance.
  SdpOptions probe_opts = opts;
  probe_opts.max_iterations = std::min(opts.max_iterations, 6000);

  double plateau = 0.0;  // stalled displacement of the last infeasible probe
  const auto feasible = [&](double t) {
    const CertificateProjector affine(wc, t);
    auto r = solve_feasibility(affine, cones, warm, probe_opts);
    plateau = r.status == SolveStatus::kInfeasible
                  ? r.diagnostics.primal_residual
                  : 0.0;
    if (r.status != SolveStatus::kConverged) return false;
    warm = std::move(r.final_z);
    best = std::move(r.affine_point);
    best_diag = r.diagnostics;
    best_t = t;
    return true;
  };

  if (!feasible(1.0))
    throw std::runtime_error("certificate solve failed at the trivial level");
  double lo = -1.0, hi = 1.0;
  while (feasible(lo)) {
    hi = lo;
    lo *= 2.0;
    if (lo < -32.0)
      throw std::runtime_error("certificate bracket exhausted");
  }
  SecantBracket bracket(lo, hi, bisect_tol);
  bracket.mark_infeasible(lo, plateau);
  while (!bracket.done()) {
    const double t = bracket.next_probe();
    if (feasible(t))
      bracket.mark_feasible(t);
    else
      bracket.mark_infeasible(t, plateau);
  }
  const double level = bracket.hi();
  if (best_t != level) feasible(level);  // make `best` match the level

  // Exact dual-feasibility repair: blend with the trivial certificate until
  // both completions are positive, then renormalize. The shift is of the
  // order of the solver tolerance.
  const double l1 = eigh(matrix_from_pauli(best[1])).eigenvalues.front();
  const double l2 = eigh(matrix_from_pauli(best[2])).eigenvalues.front();
  const double c = std::max(0.0, -4.0 * std::min(l1, l2) + 1e-12);
  std::vector<double> s = best[0];
  for (double& x : s) x /= (1.0 + c);
  s[0] = (best[0][0] + c / 4.0) / (1.0 + c);

  CertificateResult res{operator_from_coeffs(s), 0.0, best_diag};
  res.value = 32.0 * pauli_dot(s, wc);
  res.diagnostics.objective = res.value;
  return res;
}

RobustnessResult random_robustness(const HermitianOperator& w,
                                   const SdpOptions& opts, double bisect_tol) {
  validate_process(w);
  const auto base = pauli_coefficients(w.matrix());
  if (off_span_norm(base) > 1e-8)
    throw std::runtime_error(
        "process has weight outside both order subspaces; no amount of "
        "white noise makes it separable");

  ConeProjector cones(
      {{BlockCone::kPsdPauli, kWords}, {BlockCone::kPsdPauli, kWords}});
  BlockVector warm;
  SdpDiagnostics last_good;

  SdpOptions probe_opts = opts;
  probe_opts.max_iterations = std::min(opts.max_iterations, 6000);

  double plateau = 0.0;  // stalled displacement of the last infeasible probe
  const auto separable_at = [&](double r) {
    std::vector<double> mix(kWords);
    for (int k = 0; k < kWords; ++k) mix[k] = base[k] / (1.0 + r);
    mix[0] = (base[0] + r * 0.125) / (1.0 + r);
    const SplitProjector affine(std::move(mix));
    auto res = solve_feasibility(affine, cones, warm, probe_opts);
    plateau = res.status == SolveStatus::kInfeasible
                  ? res.diagnostics.primal_residual
                  : 0.0;
    if (res.status != SolveStatus::kConverged) return false;
    warm = std::move(res.final_z);
    last_good = res.diagnostics;
    return true;
  };

  RobustnessResult out{0.0, white_noise_process(), {}};
  if (separable_at(0.0)) {
    auto cert = optimal_causal_certificate(w, opts, bisect_tol);
    out.witness = std::move(cert.witness);
    out.diagnostics = last_good;
    out.diagnostics.objective = 0.0;
    return out;
  }

  SecantBracket bracket(0.0, 4.0, bisect_tol);
  bracket.mark_infeasible(0.0, plateau);  // the r = 0 probe above failed
  while (!separable_at(bracket.hi())) {
    const double failed = bracket.hi();
    if (failed > 64.0)
      throw std::runtime_error("robustness bracket exhausted");
    bracket.mark_infeasible(failed, plateau);
    bracket.widen_hi(2.0 * failed);
  }
  while (!bracket.done()) {
    const double r = bracket.next_probe();
    if (separable_at(r))
      bracket.mark_feasible(r);
    else
      bracket.mark_infeasible(r, plateau);
  }

  auto cert = optimal_causal_certificate(w, opts, bisect_tol);
  out.robustness = bracket.hi();
  out.witness = std::move(cert.witness);
  out.diagnostics = last_good;
  out.diagnostics.objective = out.robustness;
  return out;
}

namespace {

ComplexMatrix haar_unitary(int dim, SplitMix64& rng) {
  ComplexMatrix h(dim);
  for (int r = 0; r < dim; ++r) {
    h.at(r, r) = rng.normal();
    for (int c = r + 1; c < dim; ++c) {
      const cplx v(rng.normal(), rng.normal());
      h.at(r, c) = v;
      h.at(c, r) = std::conj(v);
    }
  }
  auto e = eigh(h);
  // Eigenvectors of a Gaussian Hermitian matrix are Haar distributed once
  // the solver's column phase convention is randomized away.
  ComplexMatrix u = e.eigenvectors;
  for (int c = 0; c < dim; ++c) {
    const double a = rng.uniform(0.0, 6.283185307179586);
    const cplx phase(std::cos(a), std::sin(a));
    for (int r = 0; r < dim; ++r) u.at(r, c) *= phase;
  }
  return u;
}

// One-way process from an explicit circuit: a joint state on the first
// input and a memory, a channel from the first output into the second
// input, a channel from the second output into the control, final memory
// discarded. Cone membership holds by construction.
HermitianOperator sample_one_way(CausalOrder order, SplitMix64& rng) {
  std::vector<cplx> psi(4);
  double norm = 0.0;
  for (auto& x : psi) {
    x = cplx(rng.normal(), rng.normal());
    norm += std::norm(x);
  }
  norm = std::sqrt(norm);
  for (auto& x : psi) x /= norm;

  const ComplexMatrix v1 = haar_unitary(4, rng);
  const ComplexMatrix v2 = haar_unitary(4, rng);

  std::vector<cplx> amp(64, 0.0);
  for (int ai = 0; ai < 2; ++ai)
    for (int ao = 0; ao < 2; ++ao)
      for (int bi = 0; bi < 2; ++bi)
        for (int bo = 0; bo < 2; ++bo)
          for (int c = 0; c < 2; ++c)
            for (int e3 = 0; e3 < 2; ++e3) {
              const int first_in = (order == CausalOrder::kAThenB) ? ai : bi;
              const int first_out = (order == CausalOrder::kAThenB) ? ao : bo;
              const int second_in = (order == CausalOrder::kAThenB) ? bi : ai;
              const int second_out = (order == CausalOrder::kAThenB) ? bo : ao;
              cplx sum = 0.0;
              for (int e1 = 0; e1 < 2; ++e1)
                for (int e2 = 0; e2 < 2; ++e2)
                  sum += psi[first_in * 2 + e1] *
                         v1.at(second_in * 2 + e2, first_out * 2 + e1) *
                         v2.at(c * 2 + e3, second_out * 2 + e2);
              amp[ai * 32 + ao * 16 + bi * 8 + bo * 4 + c * 2 + e3] = sum;
            }

  ComplexMatrix proj(64);
  for (int r = 0; r < 64; ++r)
    for (int c = 0; c < 64; ++c) proj.at(r, c) = amp[r] * std::conj(amp[c]);
  const HermitianOperator full(proj, {{"AI", 2},
                                      {"AO", 2},
                                      {"BI", 2},
                                      {"BO", 2},
                                      {"C", 2},
                                      {"E3", 2}});
  return partial_trace(full, process_labels());
}

}  // namespace

HermitianOperator sample_separable_process(std::uint64_t seed) {
  SplitMix64 rng(SplitMix64::key(seed, 0x5EB0A11CEULL));
  double q;
  const std::uint64_t pick = rng.next() % 8;
  if (pick == 0)
    q = 0.0;
  else if (pick == 1)
    q = 1.0;
  else
    q = rng.uniform();

  const auto wab = sample_one_way(CausalOrder::kAThenB, rng);
  const auto wba = sample_one_way(CausalOrder::kBThenA, rng);
  ComplexMatrix m(32);
  for (int r = 0; r < 32; ++r)
    for (int c = 0; c < 32; ++c)
      m.at(r, c) = q * wab.matrix().at(r, c) + (1.0 - q) * wba.matrix().at(r, c);
  return HermitianOperator(m, standard_subsystems());
}

}  // namespace switchlab
