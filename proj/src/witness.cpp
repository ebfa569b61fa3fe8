#include "switchlab/witness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include "switchlab/causal_sdp.hpp"
#include "switchlab/hardware_map.hpp"
#include "switchlab/pauli.hpp"
#include "switchlab/processes.hpp"
#include "switchlab/rng.hpp"

namespace switchlab {

namespace {

constexpr int kWords = 1024;

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

// Pauli words of one pair operator A_a (x) B_b (x) X_C. The five-qubit word
// index splits as 64 * (AI,AO digits) + 4 * (BI,BO digits) + C digit, so the
// coefficients are an outer product of the two 4x4 Choi expansions placed in
// the C = X slice.
std::vector<std::pair<int, double>> pair_words(const ComplexMatrix& ua,
                                               const ComplexMatrix& ub) {
  const auto ga =
      pauli_coefficients(choi_of_unitary(ua, "AI", "AO").matrix());
  const auto gb =
      pauli_coefficients(choi_of_unitary(ub, "BI", "BO").matrix());
  std::vector<std::pair<int, double>> words;
  for (int i = 0; i < 16; ++i) {
    if (ga[i] == 0.0) continue;
    for (int j = 0; j < 16; ++j) {
      const double v = ga[i] * gb[j];
      if (v != 0.0) words.push_back({64 * i + 4 * j + 1, v});
    }
  }
  return words;
}

// One ordered gate pair offered to the optimizer.
struct PairBasis {
  std::string gate_a, gate_b;
  std::vector<std::pair<int, double>> support;     // nonzero words of G_ab
  std::vector<std::pair<int, double>> on_mask[2];  // restricted to each order
  double x = 0.0;                                  // tr(G_ab w)
};

std::vector<PairBasis> build_pairs(const std::vector<std::string>& gates,
                                   const std::vector<double>& w_coeffs) {
  const auto& m1 = order_mask(CausalOrder::kAThenB);
  const auto& m2 = order_mask(CausalOrder::kBThenA);
  std::vector<PairBasis> pairs;
  for (const auto& a : gates) {
    const ComplexMatrix ua = gate_matrix(a);
    for (const auto& b : gates) {
      PairBasis p;
      p.gate_a = a;
      p.gate_b = b;
      p.support = pair_words(ua, gate_matrix(b));
      for (const auto& [k, v] : p.support) {
        p.x += v * w_coeffs[k];
        if (m1[k]) p.on_mask[0].push_back({k, v});
        if (m2[k]) p.on_mask[1].push_back({k, v});
      }
      p.x *= 32.0;
      pairs.push_back(std::move(p));
    }
  }
  return pairs;
}

double sparse_masked_dot(const std::vector<std::pair<int, double>>& a,
                         const std::vector<std::pair<int, double>>& b) {
  double s = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first < b[j].first) {
      ++i;
    } else if (a[i].first > b[j].first) {
      ++j;
    } else {
      s += a[i].second * b[j].second;
      ++i;
      ++j;
    }
  }
  return s;
}

// Normal matrix of the affine eliminations shared by both optimization
// stages: H = I + sum_i L_i^T L_i where L_i maps gamma to the masked words
// of s(gamma). H >= I, so the spectral factorization doubles as a solver
// for H and for 2H - I (the antisymmetric part of the two-sided stage).
struct GramData {
  int m = 0;
  std::vector<double> evals;
  ComplexMatrix evecs;
  std::vector<double> q;       // objective coefficients, q_e = x_e / 4
  std::vector<double> hinv_q;  // H^{-1} q
  double q_hinv_q = 0.0;
  std::vector<double> binv_q;  // (2H - I)^{-1} q
  double q_binv_q = 0.0;
};

// Solves (H + shift (H - I)) x = rhs through the precomputed spectrum;
// shift 0 gives H itself, shift 1 gives 2H - I.
std::vector<double> spectral_solve(const GramData& g,
                                   const std::vector<double>& rhs,
                                   double eval_shift) {
  std::vector<double> u(g.m, 0.0), out(g.m, 0.0);
  for (int c = 0; c < g.m; ++c) {
    double acc = 0.0;
    for (int r = 0; r < g.m; ++r) acc += g.evecs(r, c).real() * rhs[r];
    u[c] = acc / (g.evals[c] + eval_shift * (g.evals[c] - 1.0));
  }
  for (int r = 0; r < g.m; ++r) {
    double acc = 0.0;
    for (int c = 0; c < g.m; ++c) acc += g.evecs(r, c).real() * u[c];
    out[r] = acc;
  }
  return out;
}

GramData build_gram(const std::vector<PairBasis>& pairs) {
  GramData g;
  g.m = static_cast<int>(pairs.size());
  ComplexMatrix h(g.m);
  for (int e = 0; e < g.m; ++e) {
    for (int f = e; f < g.m; ++f) {
      double dot = 0.0;
      for (int i = 0; i < 2; ++i)
        dot += sparse_masked_dot(pairs[e].on_mask[i], pairs[f].on_mask[i]);
      dot /= 16.0;
      if (e == f) dot += 1.0;
      h.at(e, f) = dot;
      h.at(f, e) = dot;
    }
  }
  const EighResult eig = eigh(h);
  g.evals = eig.eigenvalues;
  g.evecs = eig.eigenvectors;
  g.q.resize(g.m);
  for (int e = 0; e < g.m; ++e) g.q[e] = 0.25 * pairs[e].x;
  g.hinv_q = spectral_solve(g, g.q, 0.0);
  g.binv_q = spectral_solve(g, g.q, 1.0);  // eigenvalues 2 lambda - 1
  for (int e = 0; e < g.m; ++e) {
    g.q_hinv_q += g.q[e] * g.hinv_q[e];
    g.q_binv_q += g.q[e] * g.binv_q[e];
  }
  return g;
}

// Writes the masked words of s(gamma) = 1/4 (e_0 + sum gamma_e g_e) over the
// pinned coordinates of one completion block; off-mask words keep their
// incoming (free) values.
void scatter_masked(const std::vector<PairBasis>& pairs,
                    const std::vector<double>& gamma, int order,
                    const std::vector<unsigned char>& mask,
                    std::vector<double>* block) {
  auto& p = *block;
  for (int k = 0; k < kWords; ++k)
    if (mask[k]) p[k] = 0.0;
  p[0] = 0.25;
  for (std::size_t e = 0; e < pairs.size(); ++e) {
    const double w = 0.25 * gamma[e];
    if (w == 0.0) continue;
    for (const auto& [k, v] : pairs[e].on_mask[order]) p[k] += w * v;
  }
}

// Affine set of the value optimization at one objective level: blocks
// (gamma, p1, p2) with p_i pinned to s(gamma) on mask i and the pairing
// value pinned to the level. Eliminating the pinned words gives a normal
// system in gamma alone, solved through the precomputed Gram spectrum with
// one Lagrange multiplier for the level.
class WitnessLevelProjector : public AffineProjector {
 public:
  WitnessLevelProjector(const std::vector<PairBasis>& pairs,
                        const GramData& gram, double level)
      : pairs_(pairs),
        gram_(gram),
        r_(level - 1.0),
        m1_(order_mask(CausalOrder::kAThenB)),
        m2_(order_mask(CausalOrder::kBThenA)) {}

  void project(const BlockVector& in, BlockVector* out) const override {
    *out = in;
    const int m = gram_.m;
    std::vector<double> rhs = in[0];
    for (int e = 0; e < m; ++e) {
      double acc = 0.0;
      for (const auto& [k, v] : pairs_[e].on_mask[0]) acc += v * in[1][k];
      for (const auto& [k, v] : pairs_[e].on_mask[1]) acc += v * in[2][k];
      rhs[e] += 0.25 * acc;
    }
    std::vector<double> gamma = spectral_solve(gram_, rhs, 0.0);
    double qg = 0.0;
    for (int e = 0; e < m; ++e) qg += gram_.q[e] * gamma[e];
    const double mu = (qg - r_) / gram_.q_hinv_q;
    for (int e = 0; e < m; ++e) gamma[e] -= mu * gram_.hinv_q[e];

    (*out)[0] = gamma;
    scatter_masked(pairs_, gamma, 0, m1_, &(*out)[1]);
    scatter_masked(pairs_, gamma, 1, m2_, &(*out)[2]);
  }

 private:
  const std::vector<PairBasis>& pairs_;
  const GramData& gram_;
  double r_;
  const std::vector<unsigned char>& m1_;
  const std::vector<unsigned char>& m2_;
};

// Affine set of the sparsification stage: blocks (gamma+, gamma-, p1, p2)
// with gamma = gamma+ - gamma-, the value pinned to the level and the total
// mass sum(gamma+ + gamma-) pinned to the budget. The doubled normal matrix
// diagonalizes into the symmetric part (eigenvalue 1) and the antisymmetric
// part (2H - I), and the two multiplier directions are orthogonal, so the
// projection still only needs the Gram spectrum.
class WitnessBudgetProjector : public AffineProjector {
 public:
  WitnessBudgetProjector(const std::vector<PairBasis>& pairs,
                         const GramData& gram, double level, double budget)
      : pairs_(pairs),
        gram_(gram),
        r_level_(level - 1.0),
        r_budget_(budget),
        m1_(order_mask(CausalOrder::kAThenB)),
        m2_(order_mask(CausalOrder::kBThenA)) {}

  void project(const BlockVector& in, BlockVector* out) const override {
    *out = in;
    const int m = gram_.m;
    std::vector<double> d(m, 0.0);
    for (int e = 0; e < m; ++e) {
      double acc = 0.0;
      for (const auto& [k, v] : pairs_[e].on_mask[0]) acc += v * in[2][k];
      for (const auto& [k, v] : pairs_[e].on_mask[1]) acc += v * in[3][k];
      d[e] = 0.25 * acc;
    }
    // Unconstrained solve, split into symmetric and antisymmetric parts.
    std::vector<double> sym(m), anti(m);
    for (int e = 0; e < m; ++e) {
      const double a = in[0][e] + d[e];
      const double b = in[1][e] - d[e];
      sym[e] = 0.5 * (a + b);
      anti[e] = 0.5 * (a - b);
    }
    std::vector<double> anti_solved = spectral_solve(gram_, anti, 1.0);

    // Multipliers: the level direction lives in the antisymmetric subspace,
    // the budget direction in the symmetric one, and they are orthogonal.
    double qv = 0.0, bv = 0.0;
    for (int e = 0; e < m; ++e) {
      qv += 2.0 * gram_.q[e] * anti_solved[e];
      bv += 2.0 * sym[e];
    }
    const double mu_level = (qv - r_level_) / (2.0 * gram_.q_binv_q);
    const double mu_budget = (bv - r_budget_) / (2.0 * m);

    std::vector<double> gamma(m);
    for (int e = 0; e < m; ++e) {
      const double s = sym[e] - mu_budget;
      const double t = anti_solved[e] - mu_level * gram_.binv_q[e];
      (*out)[0][e] = s + t;
      (*out)[1][e] = s - t;
      gamma[e] = 2.0 * t;
    }
    scatter_masked(pairs_, gamma, 0, m1_, &(*out)[2]);
    scatter_masked(pairs_, gamma, 1, m2_, &(*out)[3]);
  }

 private:
  const std::vector<PairBasis>& pairs_;
  const GramData& gram_;
  double r_level_;
  double r_budget_;
  const std::vector<unsigned char>& m1_;
  const std::vector<unsigned char>& m2_;
};

struct StageOneOutcome {
  std::vector<double> gamma;  // repaired: both completions exactly positive
  std::vector<double> p1, p2;  // the repaired completions themselves
  double level = 0.0;          // certified feasible level before repair
  double value = 0.0;          // exact pairing value of the repaired gamma
  SdpDiagnostics diagnostics;
};

// Minimize the pairing value over valid witnesses on the given pairs, by
// bisection over level feasibility probes.
StageOneOutcome optimize_value(const std::vector<PairBasis>& pairs,
                               const GramData& gram,
                               const WitnessOptions& opts) {
  const int m = gram.m;
  ConeProjector cones({{BlockCone::kFree, m},
                       {BlockCone::kPsdPauli, kWords},
                       {BlockCone::kPsdPauli, kWords}});
  BlockVector warm;
  BlockVector best;
  double best_t = 2.0;
  SdpDiagnostics best_diag;

  SdpOptions probe_opts = opts.sdp;
  probe_opts.max_iterations = std::min(opts.sdp.max_iterations, 6000);

  double plateau = 0.0;
  const auto feasible = [&](double t) {
    const WitnessLevelProjector affine(pairs, gram, t);
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
    throw std::runtime_error("witness solve failed at the trivial level");
  double lo = -1.0;
  while (feasible(lo)) {
    lo *= 2.0;
    if (lo < -32.0) throw std::runtime_error("witness bracket exhausted");
  }
  SecantBracket bracket(lo, best_t, opts.bisect_tol);
  bracket.mark_infeasible(lo, plateau);
  while (!bracket.done()) {
    const double t = bracket.next_probe();
    if (feasible(t))
      bracket.mark_feasible(t);
    else
      bracket.mark_infeasible(t, plateau);
  }
  const double level = bracket.hi();
  if (best_t != level) feasible(level);

  // Exact validity repair, as for unrestricted certificates: blend toward
  // the trivial witness until both completions are positive. The family is
  // closed under that blend (gamma just shrinks).
  const double l1 = eigh(matrix_from_pauli(best[1])).eigenvalues.front();
  const double l2 = eigh(matrix_from_pauli(best[2])).eigenvalues.front();
  const double c = std::max(0.0, -4.0 * std::min(l1, l2) + 1e-12);

  StageOneOutcome out;
  out.gamma = best[0];
  for (double& v : out.gamma) v /= (1.0 + c);
  out.p1 = best[1];
  out.p2 = best[2];
  for (auto* p : {&out.p1, &out.p2}) {
    (*p)[0] += 0.25 * c;
    for (double& v : *p) v /= (1.0 + c);
  }
  out.level = level;
  out.value = 1.0;
  for (int e = 0; e < m; ++e) out.value += 0.25 * out.gamma[e] * pairs[e].x;
  out.diagnostics = best_diag;
  out.diagnostics.objective = out.value;
  return out;
}

// Minimize sum |gamma| over witnesses pinned to the given value level, by
// bisection over mass budgets. Returns the sparse gamma, or the stage-one
// gamma unchanged when no budget probe converges.
//
// Cold starts converge miserably here: the probe must grow the whole sign
// decomposition from zero against two equality constraints, and near the
// minimal mass that crawl is slow enough to trip the stall detector. The
// stage-one solution gives an exactly feasible point for the top of the
// bracket, though: scale it to the relaxed level, split by sign, and pad
// both signs evenly until the mass meets the budget. Seeding the first
// probe with it makes that solve immediate, and every later probe then
// warm-starts from the nearest feasible state instead of from nothing.
std::vector<double> sparsify(const std::vector<PairBasis>& pairs,
                             const GramData& gram, double level,
                             const StageOneOutcome& base,
                             const WitnessOptions& opts) {
  const int m = gram.m;
  ConeProjector cones({{BlockCone::kNonnegative, m},
                       {BlockCone::kNonnegative, m},
                       {BlockCone::kPsdPauli, kWords},
                       {BlockCone::kPsdPauli, kWords}});
  BlockVector best;
  double best_beta = -1.0;

  double mass = 0.0;
  for (const double v : base.gamma) mass += std::abs(v);
  const double scale = (level - 1.0) / (base.value - 1.0);
  const double seed_mass = scale * mass;
  const double hi = std::max(mass, seed_mass);
  const double pad = (hi - seed_mass) / (2.0 * m);

  BlockVector warm(4);
  warm[0].resize(m);
  warm[1].resize(m);
  for (int e = 0; e < m; ++e) {
    const double v = scale * base.gamma[e];
    warm[0][e] = std::max(v, 0.0) + pad;
    warm[1][e] = std::max(-v, 0.0) + pad;
  }
  warm[2] = base.p1;
  warm[3] = base.p2;
  for (auto* p : {&warm[2], &warm[3]}) {
    for (double& v : *p) v *= scale;
    (*p)[0] += 0.25 * (1.0 - scale);  // blend with the trivial witness
  }

  SdpOptions probe_opts = opts.sdp;
  probe_opts.max_iterations = std::min(opts.sdp.max_iterations, 6000);

  double plateau = 0.0;
  const auto feasible = [&](double beta) {
    const WitnessBudgetProjector affine(pairs, gram, level, beta);
    auto r = solve_feasibility(affine, cones, warm, probe_opts);
    plateau = r.status == SolveStatus::kInfeasible
                  ? r.diagnostics.primal_residual
                  : 0.0;
    if (r.status != SolveStatus::kConverged) return false;
    warm = std::move(r.final_z);
    best = std::move(r.affine_point);
    best_beta = beta;
    return true;
  };

  if (!feasible(hi)) return base.gamma;
  SecantBracket bracket(0.0, hi, opts.bisect_tol * std::max(1.0, hi));
  bracket.mark_infeasible(0.0, 0.0);
  while (!bracket.done()) {
    const double beta = bracket.next_probe();
    if (feasible(beta))
      bracket.mark_feasible(beta);
    else
      bracket.mark_infeasible(beta, plateau);
  }
  if (best_beta != bracket.hi() && !feasible(bracket.hi())) {
    if (best_beta < 0.0) return base.gamma;
  }

  std::vector<double> gamma(m);
  for (int e = 0; e < m; ++e) gamma[e] = best[0][e] - best[1][e];

  // A converged budget probe sits near the minimal-mass vertex but not on
  // it: the bisection slack and the seed padding leak out as faint weights
  // on pairs the vertex does not use, orders of magnitude below the genuine
  // ones. A relative cut identifies the support; the re-optimization on the
  // survivors then re-certifies the value, so an over-eager cut costs value
  // visibly instead of silently.
  double peak = 0.0;
  for (const double v : gamma) peak = std::max(peak, std::abs(v));
  for (double& v : gamma)
    if (std::abs(v) < 0.01 * peak) v = 0.0;
  return gamma;
}

HermitianOperator operator_from_coeffs(const std::vector<double>& coeffs) {
  return HermitianOperator(matrix_from_pauli(coeffs), standard_subsystems());
}

// Smallest identity coefficient among positive completions of the masked
// words of s: the inner minimization of the misalignment bound. Bisection
// over the pinned coefficient; the feasible side is above.
double min_completion_coefficient(const std::vector<double>& s,
                                  const std::vector<unsigned char>& mask,
                                  ConeProjector& cones, BlockVector& warm,
                                  const BoundOptions& opts) {
  class PinProjector : public AffineProjector {
   public:
    PinProjector(const std::vector<double>& target,
                 const std::vector<unsigned char>& mask, double c0)
        : target_(target), mask_(mask), c0_(c0) {}
    void project(const BlockVector& in, BlockVector* out) const override {
      *out = in;
      auto& p = (*out)[0];
      for (int k = 1; k < kWords; ++k)
        if (mask_[k]) p[k] = target_[k];
      p[0] = c0_;
    }

   private:
    const std::vector<double>& target_;
    const std::vector<unsigned char>& mask_;
    double c0_;
  };

  SdpOptions probe_opts = opts.sdp;
  probe_opts.max_iterations = std::min(opts.sdp.max_iterations, 6000);

  double plateau = 0.0;
  const auto feasible = [&](double c0) {
    const PinProjector affine(s, mask, c0);
    auto r = solve_feasibility(affine, cones, warm, probe_opts);
    plateau = r.status == SolveStatus::kInfeasible
                  ? r.diagnostics.primal_residual
                  : 0.0;
    if (r.status != SolveStatus::kConverged) return false;
    warm = std::move(r.final_z);
    return true;
  };

  // A positive matrix with identity coefficient zero is zero, and the
  // pinned words are not all zero, so the bracket floor is sound.
  SecantBracket bracket(0.0, 0.5, opts.bisect_tol);
  bracket.mark_infeasible(0.0, 0.0);
  while (!feasible(bracket.hi())) {
    const double failed = bracket.hi();
    if (failed > 64.0)
      throw std::runtime_error("completion bracket exhausted");
    bracket.mark_infeasible(failed, plateau);
    bracket.widen_hi(2.0 * failed);
  }
  while (!bracket.done()) {
    const double c0 = bracket.next_probe();
    if (feasible(c0))
      bracket.mark_feasible(c0);
    else
      bracket.mark_infeasible(c0, plateau);
  }
  return bracket.hi();
}

void require_known_gates(const std::vector<GammaEntry>& gamma) {
  for (const auto& e : gamma) {
    gate_matrix(e.gate_a);  // throws std::invalid_argument for unknown names
    gate_matrix(e.gate_b);
  }
}

}  // namespace

HermitianOperator witness_operator(const std::vector<GammaEntry>& gamma) {
  require_known_gates(gamma);
  std::vector<double> coeffs(kWords, 0.0);
  coeffs[0] = 0.25;
  for (const auto& e : gamma) {
    const auto words = pair_words(gate_matrix(e.gate_a), gate_matrix(e.gate_b));
    for (const auto& [k, v] : words) coeffs[k] += 0.25 * e.value * v;
  }
  return operator_from_coeffs(coeffs);
}

nlohmann::json to_json(const CausalWitness& witness) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : witness.gamma)
    entries.push_back({e.gate_a, e.gate_b, e.value});
  return {{"gamma", std::move(entries)},
          {"separable_bound", witness.separable_bound}};
}

CausalWitness witness_from_json(const nlohmann::json& j) {
  if (!j.contains("gamma") || !j.contains("separable_bound"))
    throw std::invalid_argument(
        "witness JSON needs `gamma` and `separable_bound`");
  std::vector<GammaEntry> gamma;
  for (const auto& row : j.at("gamma")) {
    if (!row.is_array() || row.size() != 3)
      throw std::invalid_argument("gamma rows are [gate_a, gate_b, value]");
    gamma.push_back({row[0].get<std::string>(), row[1].get<std::string>(),
                     row[2].get<double>()});
  }
  return {gamma, witness_operator(gamma), j.at("separable_bound").get<double>()};
}

std::string stokes_to_csv(const std::vector<StokesRecord>& records) {
  std::string csv = "gate_a,gate_b,stokes,std\n";
  for (const auto& r : records) {
    char row[128];
    std::snprintf(row, sizeof(row), "%s,%s,%.17g,%.17g\n", r.gate_a.c_str(),
                  r.gate_b.c_str(), r.value, r.std_dev);
    csv += row;
  }
  return csv;
}

std::vector<StokesRecord> stokes_from_csv(const std::string& csv) {
  std::istringstream lines(csv);
  std::string line;
  if (!std::getline(lines, line) || line != "gate_a,gate_b,stokes,std")
    throw std::invalid_argument("stokes CSV header mismatch");
  std::vector<StokesRecord> records;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    StokesRecord r;
    std::string value, std_dev;
    if (!std::getline(fields, r.gate_a, ',') ||
        !std::getline(fields, r.gate_b, ',') ||
        !std::getline(fields, value, ',') || !std::getline(fields, std_dev))
      throw std::invalid_argument("stokes CSV row needs four fields");
    try {
      r.value = std::stod(value);
      r.std_dev = std::stod(std_dev);
    } catch (const std::exception&) {
      throw std::invalid_argument("stokes CSV has non-numeric fields");
    }
    records.push_back(std::move(r));
  }
  return records;
}

WitnessResult optimize_witness(const HermitianOperator& w,
                               const std::vector<std::string>& gates,
                               const WitnessOptions& opts) {
  validate_process(w);
  if (gates.empty())
    throw std::invalid_argument("witness optimization needs at least one gate");
  if (std::set<std::string>(gates.begin(), gates.end()).size() != gates.size())
    throw std::invalid_argument("gate set has repeated names");

  const auto wc = pauli_coefficients(w.matrix());
  const std::vector<PairBasis> pairs = build_pairs(gates, wc);
  double x_scale = 0.0;
  for (const auto& p : pairs) x_scale = std::max(x_scale, std::abs(p.x));
  if (x_scale < 1e-12)
    throw NoWitnessError(
        "every pair expectation vanishes; this gate set cannot see the "
        "process");

  const GramData gram = build_gram(pairs);
  const StageOneOutcome full = optimize_value(pairs, gram, opts);
  if (full.value >= -10.0 * opts.bisect_tol)
    throw NoWitnessError("no causal witness from this gate set: best value " +
                         std::to_string(full.value));

  // Trim the pair list: minimal total mass at a level one step above the
  // optimum, prune what the mass minimization zeroed, then re-optimize on
  // the survivors so the pruning cannot silently cost value.
  const std::vector<double> sparse =
      sparsify(pairs, gram, full.level + 1e-4, full, opts);
  std::vector<PairBasis> kept;
  for (std::size_t e = 0; e < pairs.size(); ++e)
    if (std::abs(sparse[e]) >= opts.prune_threshold)
      kept.push_back(pairs[e]);
  if (kept.empty())
    throw std::runtime_error("sparsification removed every pair");

  const GramData kept_gram = build_gram(kept);
  const StageOneOutcome refit = optimize_value(kept, kept_gram, opts);

  std::vector<GammaEntry> entries;
  for (std::size_t e = 0; e < kept.size(); ++e)
    entries.push_back({kept[e].gate_a, kept[e].gate_b, refit.gamma[e]});

  WitnessResult result{{entries, witness_operator(entries), 0.0},
                       refit.value,
                       full.value,
                       static_cast<int>(pairs.size()),
                       refit.diagnostics};
  return result;
}

WitnessEstimate evaluate_witness(const CausalWitness& witness,
                                 const std::vector<StokesRecord>& stokes) {
  std::map<std::pair<std::string, std::string>, const StokesRecord*> table;
  for (const auto& r : stokes) table[{r.gate_a, r.gate_b}] = &r;

  WitnessEstimate est;
  est.value = 1.0;
  double variance = 0.0;
  for (const auto& e : witness.gamma) {
    const auto it = table.find({e.gate_a, e.gate_b});
    if (it == table.end())
      throw std::invalid_argument("no measured value for pair (" + e.gate_a +
                                  ", " + e.gate_b + ")");
    est.value += 0.25 * e.value * it->second->value;
    variance += 0.0625 * e.value * e.value * it->second->std_dev *
                it->second->std_dev;
  }
  est.std_error = std::sqrt(variance);
  if (est.value < witness.separable_bound && est.std_error > 0.0)
    est.sigma_from_bound = (witness.separable_bound - est.value) / est.std_error;
  return est;
}

double corrected_separable_bound(const CausalWitness& witness,
                                 double angle_uncertainty_deg,
                                 const BoundOptions& opts) {
  if (angle_uncertainty_deg < 0.0 || angle_uncertainty_deg > 5.0)
    throw std::invalid_argument(
        "angle uncertainty must be between 0 and 5 degrees");
  require_known_gates(witness.gamma);
  if (angle_uncertainty_deg == 0.0 || witness.gamma.empty()) return 0.0;

  std::map<std::string, OpticalRecipe> recipes;
  for (const auto& e : witness.gamma) {
    for (const auto& name : {e.gate_a, e.gate_b})
      if (!recipes.count(name))
        recipes.emplace(name, compile_unitary(gate_matrix(name)));
  }

  const int pairs = static_cast<int>(witness.gamma.size());
  ConeProjector cones1({{BlockCone::kPsdPauli, kWords}});
  ConeProjector cones2({{BlockCone::kPsdPauli, kWords}});
  BlockVector warm1, warm2;

  // Every sample is one full assignment of prism errors: the 16 corner
  // patterns push all four prisms of every pair to the extremes in lockstep,
  // the Monte-Carlo samples draw every pair independently. The draws are
  // unit deviations scaled by the uncertainty, so sample families at
  // different uncertainties nest continuously.
  double bound = 0.0;
  const int total = 16 + opts.mc_samples;
  for (int sample = 0; sample < total; ++sample) {
    std::vector<double> s(kWords, 0.0);
    s[0] = 0.25;
    SplitMix64 rng(SplitMix64::key(opts.seed, 23, sample));
    for (int p = 0; p < pairs; ++p) {
      const auto& e = witness.gamma[p];
      double d[4];
      if (sample < 16) {
        for (int i = 0; i < 4; ++i)
          d[i] = ((sample >> i) & 1) ? angle_uncertainty_deg
                                     : -angle_uncertainty_deg;
      } else {
        for (int i = 0; i < 4; ++i)
          d[i] = angle_uncertainty_deg * rng.uniform(-1.0, 1.0);
      }
      const ComplexMatrix ua =
          realized_with_errors(recipes.at(e.gate_a), d[0], d[1]);
      const ComplexMatrix ub =
          realized_with_errors(recipes.at(e.gate_b), d[2], d[3]);
      for (const auto& [k, v] : pair_words(ua, ub)) s[k] += 0.25 * e.value * v;
    }
    const double m1 = min_completion_coefficient(
        s, order_mask(CausalOrder::kAThenB), cones1, warm1, opts);
    const double m2 = min_completion_coefficient(
        s, order_mask(CausalOrder::kBThenA), cones2, warm2, opts);
    bound = std::min(bound, 1.0 - 4.0 * std::max(m1, m2));
  }
  return std::min(0.0, bound);
}

}  // namespace switchlab
