#include "switchlab/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "switchlab/pauli.hpp"

namespace switchlab {

double block_norm(const BlockVector& v) {
  double s = 0.0;
  for (const auto& blk : v)
    for (double x : blk) s += x * x;
  return std::sqrt(s);
}

double block_dot(const BlockVector& a, const BlockVector& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("block vectors differ in block count");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != b[i].size())
      throw std::invalid_argument("block vectors differ in block shape");
    for (std::size_t j = 0; j < a[i].size(); ++j) s += a[i][j] * b[i][j];
  }
  return s;
}

void block_axpy(double s, const BlockVector& x, BlockVector* y) {
  if (x.size() != y->size())
    throw std::invalid_argument("block vectors differ in block count");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].size() != (*y)[i].size())
      throw std::invalid_argument("block vectors differ in block shape");
    for (std::size_t j = 0; j < x[i].size(); ++j) (*y)[i][j] += s * x[i][j];
  }
}

ConeProjector::ConeProjector(std::vector<BlockCone> blocks)
    : blocks_(std::move(blocks)),
      bases_(blocks_.size()),
      has_basis_(blocks_.size(), false) {
  for (const auto& b : blocks_)
    if (b.size <= 0) throw std::invalid_argument("cone block size must be positive");
}

BlockVector ConeProjector::zero() const {
  BlockVector z(blocks_.size());
  for (std::size_t i = 0; i < blocks_.size(); ++i)
    z[i].assign(blocks_[i].size, 0.0);
  return z;
}

void ConeProjector::project(const BlockVector& in, BlockVector* out) {
  if (in.size() != blocks_.size())
    throw std::invalid_argument("block count does not match the cone layout");
  out->resize(blocks_.size());
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const auto& spec = blocks_[i];
    const auto& src = in[i];
    if (static_cast<int>(src.size()) != spec.size)
      throw std::invalid_argument("block size does not match the cone layout");
    auto& dst = (*out)[i];
    switch (spec.kind) {
      case BlockCone::kFree:
        dst = src;
        break;
      case BlockCone::kNonnegative:
        dst.resize(src.size());
        for (std::size_t j = 0; j < src.size(); ++j)
          dst[j] = std::max(0.0, src[j]);
        break;
      case BlockCone::kPsdPauli: {
        const ComplexMatrix m = matrix_from_pauli(src);
        ComplexMatrix basis;
        const ComplexMatrix proj = psd_project(
            m, has_basis_[i] ? &bases_[i] : nullptr, &basis, nullptr);
        bases_[i] = std::move(basis);
        has_basis_[i] = true;
        dst = pauli_coefficients(proj);
        break;
      }
    }
  }
}

FeasibilityResult solve_feasibility(const AffineProjector& affine,
                                    ConeProjector& cones, BlockVector z0,
                                    const SdpOptions& opts) {
  BlockVector z = z0.empty() ? cones.zero() : std::move(z0);
  {
    const BlockVector shape = cones.zero();
    if (z.size() != shape.size())
      throw std::invalid_argument("warm start does not match the cone layout");
    for (std::size_t i = 0; i < z.size(); ++i)
      if (z[i].size() != shape[i].size())
        throw std::invalid_argument("warm start does not match the cone layout");
  }

  BlockVector xa, refl, xk, verify, back;
  double window_sum = 0.0;
  double mean_back1 = -1.0, mean_back2 = -1.0;
  int flat_windows = 0;

  FeasibilityResult result;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    affine.project(z, &xa);

    refl = z;
    for (std::size_t i = 0; i < refl.size(); ++i)
      for (std::size_t j = 0; j < refl[i].size(); ++j)
        refl[i][j] = 2.0 * xa[i][j] - refl[i][j];
    cones.project(refl, &xk);

    // Displacement of the averaged-reflection step.
    for (std::size_t i = 0; i < refl.size(); ++i)
      for (std::size_t j = 0; j < refl[i].size(); ++j)
        refl[i][j] = xk[i][j] - xa[i][j];
    const double scale = std::max(1.0, block_norm(xa));
    const double step = block_norm(refl) / scale;

    if (step < opts.tolerance) {
      // The fixed point looks reached; verify with direct projections.
      cones.project(xa, &verify);
      BlockVector diff = verify;
      block_axpy(-1.0, xa, &diff);
      const double primal = block_norm(diff) / scale;
      affine.project(verify, &back);
      diff = back;
      block_axpy(-1.0, verify, &diff);
      const double dual = block_norm(diff) / scale;
      if (primal <= 10.0 * opts.tolerance) {
        result.status = SolveStatus::kConverged;
        result.affine_point = std::move(xa);
        result.cone_point = std::move(verify);
        result.final_z = std::move(z);
        result.diagnostics.converged = true;
        result.diagnostics.iterations = it;
        result.diagnostics.primal_residual = primal;
        result.diagnostics.dual_residual = dual;
        return result;
      }
    }

    block_axpy(opts.relaxation, refl, &z);

    // Stalled displacement at a level well above tolerance means the step
    // has converged to the gap vector between two disjoint sets. The mean
    // is compared two windows back: a slowly converging feasible problem
    // still drifts over that span, a true stall does not.
    window_sum += step;
    if (it % opts.stall_window == 0) {
      const double mean = window_sum / opts.stall_window;
      window_sum = 0.0;
      if (mean_back2 >= 0.0 &&
          std::abs(mean - mean_back2) <=
              opts.stall_ratio * std::max(mean, opts.tolerance) &&
          mean > 20.0 * opts.tolerance) {
        if (++flat_windows >= 2) {
          result.status = SolveStatus::kInfeasible;
          result.affine_point = std::move(xa);
          result.cone_point = std::move(xk);
          result.final_z = std::move(z);
          result.diagnostics.converged = false;
          result.diagnostics.iterations = it;
          result.diagnostics.primal_residual = step;
          result.diagnostics.dual_residual = step;
          return result;
        }
      } else {
        flat_windows = 0;
      }
      mean_back2 = mean_back1;
      mean_back1 = mean;
    }

    if (it == opts.max_iterations) {
      result.status = SolveStatus::kMaxIterations;
      result.affine_point = std::move(xa);
      result.cone_point = std::move(xk);
      result.final_z = std::move(z);
      result.diagnostics.converged = false;
      result.diagnostics.iterations = it;
      result.diagnostics.primal_residual = step;
      result.diagnostics.dual_residual = step;
    }
  }
  return result;
}

double bisect_sup(double lo, double hi, double tol,
                  const std::function<bool(double)>& feasible) {
  if (!(lo <= hi) || tol <= 0.0)
    throw std::invalid_argument("bad bisection bracket");
  if (feasible(hi)) return hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

nlohmann::json to_json(const SdpDiagnostics& d) {
  return nlohmann::json{{"converged", d.converged},
                        {"iterations", d.iterations},
                        {"primal_residual", d.primal_residual},
                        {"dual_residual", d.dual_residual},
                        {"objective", d.objective}};
}

}  // namespace switchlab
