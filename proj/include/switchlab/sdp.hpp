#pragma once

#include <functional>
#include <vector>

#include "json.hpp"
#include "switchlab/matstack.hpp"

namespace switchlab {

//============================================================================
// Small feasibility solver for semidefinite intersections.
//
// Problems are posed as: find x in A (an affine set with a closed-form
// projection, supplied by the caller) intersected with K (a product cone of
// PSD blocks, nonnegative blocks and free blocks). Optimization problems are
// reduced to a bisection over feasibility probes of objective level sets.
//
// Iteration is relaxed averaged alternating reflections,
//   z <- z + rho (P_K(2 P_A(z) - z) - P_A(z)),  rho in (0, 2),
// whose fixed points have P_A(z) in both sets. When the intersection is
// empty the per-step displacement settles at the gap between the sets
// instead of shrinking, which is what the stall detector looks for.
//
// PSD blocks are stored as Pauli word coefficient vectors (real, length
// 4^n), so affine projections are coordinate arithmetic and only the cone
// projection touches matrices. Eigenbases are cached per block between
// projections, which keeps the Jacobi sweeps cheap once iterates settle.
//============================================================================

using BlockVector = std::vector<std::vector<double>>;

double block_norm(const BlockVector& v);
double block_dot(const BlockVector& a, const BlockVector& b);
// y <- y + s * x
void block_axpy(double s, const BlockVector& x, BlockVector* y);

struct BlockCone {
  enum Kind {
    kPsdPauli,      // Pauli coefficients of a PSD matrix, size 4^n
    kNonnegative,   // componentwise nonnegative
    kFree,          // unconstrained
  };
  Kind kind;
  int size;
};

// Product cone projector; owns per-block eigenbasis caches, so one instance
// should be reused across related solves.
class ConeProjector {
 public:
  explicit ConeProjector(std::vector<BlockCone> blocks);

  void project(const BlockVector& in, BlockVector* out);
  const std::vector<BlockCone>& blocks() const { return blocks_; }
  BlockVector zero() const;

 private:
  std::vector<BlockCone> blocks_;
  std::vector<ComplexMatrix> bases_;
  std::vector<bool> has_basis_;
};

// Caller-supplied projection onto the affine constraint set. Must be an
// exact projection onto a nonempty set.
class AffineProjector {
 public:
  virtual ~AffineProjector() = default;
  virtual void project(const BlockVector& in, BlockVector* out) const = 0;
};

enum class SolveStatus { kConverged, kInfeasible, kMaxIterations };

struct SdpOptions {
  double tolerance = 1e-7;
  int max_iterations = 50000;
  double relaxation = 1.8;
  int stall_window = 100;     // iterations per plateau measurement
  double stall_ratio = 3e-4;  // relative change that counts as flat
};

struct SdpDiagnostics {
  bool converged = false;
  int iterations = 0;
  double primal_residual = 0.0;  // cone distance of the affine point
  double dual_residual = 0.0;    // affine distance of the cone point
  double objective = 0.0;        // filled in by optimization drivers
};

nlohmann::json to_json(const SdpDiagnostics& d);

struct FeasibilityResult {
  SolveStatus status = SolveStatus::kMaxIterations;
  BlockVector affine_point;  // lies in A exactly
  BlockVector cone_point;    // lies in K exactly
  BlockVector final_z;       // driver state, reusable as a warm start
  SdpDiagnostics diagnostics;
};

// Find a point in the intersection. `z0` may be empty (cold start) or the
// `final_z` of a previous related solve.
FeasibilityResult solve_feasibility(const AffineProjector& affine,
                                    ConeProjector& cones, BlockVector z0,
                                    const SdpOptions& opts = {});

// Largest t in [lo, hi] with feasible(t) true, assuming feasibility is
// monotone (true up to some boundary, false beyond). Requires feasible(lo);
// returns lo - that is, the bracket is trusted - if even lo probes false.
double bisect_sup(double lo, double hi, double tol,
                  const std::function<bool(double)>& feasible);

// Bracket state for bisections whose probes are feasibility solves, with the
// feasible side above the boundary. The stalled displacement of an infeasible
// probe measures the gap between the affine slice and the cone, and that gap
// grows linearly with the distance from the feasibility threshold, so two
// stalled probes extrapolate to the boundary. Probes are aimed just above the
// extrapolated root: they land on the feasible side, where the solver is
// fast, and pull the upper end of the bracket down in a few steps. The lower
// end is then confirmed by a single probe one tolerance below the upper end.
// Probes that sit almost exactly on the boundary can exhaust their iteration
// budget in either direction; scoring them infeasible is safe because the
// aiming keeps every probe at least a tolerance away from the extrapolated
// root while the bracket is wide.
class SecantBracket {
 public:
  SecantBracket(double lo, double hi, double tol)
      : lo_(lo), hi_(hi), tol_(tol) {}

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double width() const { return hi_ - lo_; }
  bool done() const { return width() <= tol_; }

  double next_probe() {
    const double mid = lo_ + 0.5 * width();
    if (walks_ >= 2) {
      // The root estimate keeps landing feasible by a hair; take a plain
      // bisection step to refresh the plateau data.
      walks_ = 0;
      return mid;
    }
    if (r2_ > 0.0 && r1_ - r2_ >= 0.3 * r1_) {
      double probe = t2_ + r2_ * (t2_ - t1_) / (r1_ - r2_) + 0.5 * tol_;
      if (probe >= hi_) {
        probe = hi_ - tol_;  // upper end already tight; confirm the lower
        ++walks_;
      }
      if (probe > lo_) return probe;
    }
    return mid;
  }

  void mark_feasible(double t) { hi_ = t; }

  void widen_hi(double hi) { hi_ = hi; }

  // `plateau` is the stalled displacement, or zero when the probe ended
  // undecided and its residual says nothing about the gap.
  void mark_infeasible(double t, double plateau) {
    lo_ = t;
    walks_ = 0;
    if (plateau > 0.0) {
      t1_ = t2_;
      r1_ = r2_;
      t2_ = t;
      r2_ = plateau;
    }
  }

 private:
  double lo_, hi_, tol_;
  double t1_ = 0.0, r1_ = 0.0;
  double t2_ = 0.0, r2_ = 0.0;
  int walks_ = 0;
};

}  // namespace switchlab
