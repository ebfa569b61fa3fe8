#include "switchlab/hardware_map.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <stdexcept>

#include "switchlab/processes.hpp"

namespace switchlab {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDegToRad = kPi / 180.0;

// Coarse scan pitch. Every gate in the alphabet sits on a multiple of
// 0.25 degrees, and a generic optimum is localized to one cell and then
// polished by Newton, so a finer pitch buys nothing.
constexpr double kScanStepDeg = 0.25;
constexpr int kScanPoints = 720;  // covers [0, 180)

// Grid candidates this close to the best are all polished; the sampling
// wobble of one basin across neighbouring cells stays well inside this.
constexpr double kBasinWindow = 1e-3;

ComplexMatrix conjugated_reflection(double two_theta_rad,
                                    const ComplexMatrix& u) {
  // K = C^dag R C^dag u, written out by hand: C^dag X C^dag = -iX and
  // C^dag Z C^dag = I, so K = (-i sin2t X + cos2t I) u.
  const cplx sx(0.0, -std::sin(two_theta_rad));
  const double cz = std::cos(two_theta_rad);
  ComplexMatrix k(2);
  k.at(0, 0) = sx * u(1, 0) + cz * u(0, 0);
  k.at(0, 1) = sx * u(1, 1) + cz * u(0, 1);
  k.at(1, 0) = sx * u(0, 0) + cz * u(1, 0);
  k.at(1, 1) = sx * u(0, 1) + cz * u(1, 1);
  return k;
}

struct Overlap {
  cplx g;        // tr(U(theta)^dag u) at phase 0
  cplx ga, gb;   // first derivatives in theta1, theta2 (radians)
  cplx gab;      // mixed second derivative; pure seconds are -4 g
};

// Overlap of the chain with u: g = sin2a kx(b) + cos2a kz(b), where kx, kz
// are matrix elements of K(b) above. All derivatives are analytic.
Overlap chain_overlap(double a, double b, const ComplexMatrix& u) {
  const ComplexMatrix k = conjugated_reflection(2.0 * b, u);
  const ComplexMatrix kp = conjugated_reflection(2.0 * b + kPi / 2.0, u);
  const cplx kx = k(0, 1) + k(1, 0);
  const cplx kz = k(0, 0) - k(1, 1);
  // d/db K = 2 K(b + pi/4): the reflection slews at twice the prism angle.
  const cplx kxp = 2.0 * (kp(0, 1) + kp(1, 0));
  const cplx kzp = 2.0 * (kp(0, 0) - kp(1, 1));
  const double s = std::sin(2.0 * a), c = std::cos(2.0 * a);
  Overlap o;
  o.g = s * kx + c * kz;
  o.ga = 2.0 * (c * kx - s * kz);
  o.gb = s * kxp + c * kzp;
  o.gab = 2.0 * (c * kxp - s * kzp);
  return o;
}

struct Candidate {
  double theta1_deg;
  double theta2_deg;
  double f;
};

// Newton ascent on f = |g|^2 from a grid candidate. Returns the polished
// angles (radians) and overlap value through the out parameters.
double polish(const ComplexMatrix& u, double* a, double* b, cplx* g_out) {
  double f = std::norm(chain_overlap(*a, *b, u).g);
  for (int it = 0; it < 60; ++it) {
    const Overlap o = chain_overlap(*a, *b, u);
    const cplx gc = std::conj(o.g);
    const double fa = 2.0 * (gc * o.ga).real();
    const double fb = 2.0 * (gc * o.gb).real();
    if (std::abs(fa) < 1e-13 && std::abs(fb) < 1e-13) break;
    const double faa = 2.0 * (gc * (-4.0 * o.g)).real() + 2.0 * std::norm(o.ga);
    const double fbb = 2.0 * (gc * (-4.0 * o.g)).real() + 2.0 * std::norm(o.gb);
    const double fab =
        2.0 * (gc * o.gab).real() + 2.0 * (std::conj(o.gb) * o.ga).real();
    const double det = faa * fbb - fab * fab;
    double da, db;
    if (std::abs(det) > 1e-9) {
      da = -(fbb * fa - fab * fb) / det;
      db = -(faa * fb - fab * fa) / det;
    } else {
      // Degenerate curvature: fall back to a small gradient step.
      da = 0.25 * fa;
      db = 0.25 * fb;
    }
    const double scale = std::max(std::abs(da), std::abs(db));
    if (scale > 0.02) {
      da *= 0.02 / scale;
      db *= 0.02 / scale;
    }
    double step = 1.0;
    double fn = 0.0;
    for (int half = 0; half < 20; ++half) {
      fn = std::norm(chain_overlap(*a + step * da, *b + step * db, u).g);
      if (fn >= f) break;
      step *= 0.5;
    }
    if (fn <= f) break;
    *a += step * da;
    *b += step * db;
    f = fn;
  }
  const Overlap o = chain_overlap(*a, *b, u);
  *g_out = o.g;
  return std::norm(o.g);
}

double wrap_angle_deg(double theta) {
  theta = std::fmod(theta, 180.0);
  if (theta < 0.0) theta += 180.0;
  if (theta > 180.0 - 1e-9) theta -= 180.0;
  if (std::abs(theta) < 1e-9) theta = 0.0;
  return theta;
}

double clean_for_csv(double v, double eps) {
  return std::abs(v) < eps ? 0.0 : v;
}

}  // namespace

ComplexMatrix prism_rotation(double theta_deg) {
  const double t = 2.0 * theta_deg * kDegToRad;
  ComplexMatrix r(2);
  r.at(0, 0) = std::cos(t);
  r.at(0, 1) = std::sin(t);
  r.at(1, 0) = std::sin(t);
  r.at(1, 1) = -std::cos(t);
  return r;
}

ComplexMatrix phase_element() {
  ComplexMatrix c(2);
  c.at(0, 0) = 1.0;
  c.at(1, 1) = cplx(0.0, 1.0);
  return c;
}

ComplexMatrix chain_unitary(double theta1_deg, double theta2_deg,
                            double phase_rad) {
  const ComplexMatrix c = phase_element();
  ComplexMatrix u = c * prism_rotation(theta2_deg) * c *
                    prism_rotation(theta1_deg);
  u *= std::exp(cplx(0.0, phase_rad));
  return u;
}

ComplexMatrix realized_with_errors(const OpticalRecipe& recipe, double d1_deg,
                                   double d2_deg) {
  if (std::abs(d1_deg) > 5.0 || std::abs(d2_deg) > 5.0)
    throw std::invalid_argument(
        "realized_with_errors: prism deviations are bounded by 5 degrees");
  return chain_unitary(recipe.theta1_deg + d1_deg, recipe.theta2_deg + d2_deg,
                       recipe.phase_rad);
}

OpticalRecipe compile_unitary(const ComplexMatrix& u) {
  if (u.dim() != 2)
    throw std::invalid_argument("compile_unitary: expected a 2x2 matrix");
  if (max_abs_diff(u.adjoint() * u, ComplexMatrix::identity(2)) > 1e-9)
    throw std::invalid_argument("compile_unitary: input is not unitary");

  // Scan f = |tr(U^dag u)|^2 over the angle grid. The inner angle only
  // enters through sin/cos of 2 theta1, so each theta2 row costs one small
  // matrix product plus a dot per column.
  std::vector<double> s2(kScanPoints), c2(kScanPoints);
  for (int i = 0; i < kScanPoints; ++i) {
    const double t = 2.0 * (i * kScanStepDeg) * kDegToRad;
    s2[i] = std::sin(t);
    c2[i] = std::cos(t);
  }

  double best = 0.0;
  std::vector<Candidate> candidates;
  for (int pass = 0; pass < 2; ++pass) {
    for (int i2 = 0; i2 < kScanPoints; ++i2) {
      const ComplexMatrix k =
          conjugated_reflection(2.0 * (i2 * kScanStepDeg) * kDegToRad, u);
      const cplx kx = k(0, 1) + k(1, 0);
      const cplx kz = k(0, 0) - k(1, 1);
      for (int i1 = 0; i1 < kScanPoints; ++i1) {
        const double f = std::norm(s2[i1] * kx + c2[i1] * kz);
        if (pass == 0) {
          best = std::max(best, f);
        } else if (f >= best - kBasinWindow) {
          candidates.push_back({i1 * kScanStepDeg, i2 * kScanStepDeg, f});
        }
      }
    }
  }

  // Polish every candidate basin; when several basins reach the same
  // overlap, smaller angles win so equivalent branches resolve stably.
  if (candidates.size() > 64) {
    std::sort(candidates.begin(), candidates.end(),
              [](const Candidate& x, const Candidate& y) { return x.f > y.f; });
    candidates.resize(64);
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& x, const Candidate& y) {
              if (x.theta1_deg != y.theta1_deg)
                return x.theta1_deg < y.theta1_deg;
              return x.theta2_deg < y.theta2_deg;
            });

  bool have_best = false;
  double best_f = 0.0;
  OpticalRecipe out;
  for (const Candidate& cand : candidates) {
    double a = cand.theta1_deg * kDegToRad;
    double b = cand.theta2_deg * kDegToRad;
    cplx g;
    const double f = polish(u, &a, &b, &g);
    if (have_best && f <= best_f + 1e-9) continue;
    have_best = true;
    best_f = f;
    out.theta1_deg = wrap_angle_deg(a / kDegToRad);
    out.theta2_deg = wrap_angle_deg(b / kDegToRad);
    out.phase_rad = std::arg(g);
  }
  if (!have_best)
    throw std::runtime_error("compile_unitary: empty scan (zero overlap)");

  out.realized = chain_unitary(out.theta1_deg, out.theta2_deg, out.phase_rad);
  const double dist = max_abs_diff(out.realized, u);
  if (dist > 1e-9)
    throw std::runtime_error(
        "compile_unitary: no prism recipe reaches the target (best distance " +
        std::to_string(dist) + ")");
  return out;
}

std::string recipe_csv(const std::vector<std::string>& gates) {
  std::string csv = "gate,theta1_deg,theta2_deg,phase_rad\n";
  for (const auto& name : gates) {
    const OpticalRecipe recipe = compile_unitary(gate_matrix(name));
    char row[128];
    std::snprintf(row, sizeof(row), "%s,%.6f,%.6f,%.9f\n", name.c_str(),
                  clean_for_csv(recipe.theta1_deg, 5e-7),
                  clean_for_csv(recipe.theta2_deg, 5e-7),
                  clean_for_csv(recipe.phase_rad, 5e-10));
    csv += row;
  }
  return csv;
}

}  // namespace switchlab
