#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "switchlab/pauli.hpp"
#include "switchlab/sdp.hpp"

using namespace switchlab;

namespace {

// Affine set that pins listed coordinates to fixed values.
class PinProjector : public AffineProjector {
 public:
  struct Pin {
    std::size_t block;
    std::size_t index;
    double value;
  };
  explicit PinProjector(std::vector<Pin> pins) : pins_(std::move(pins)) {}
  void project(const BlockVector& in, BlockVector* out) const override {
    *out = in;
    for (const auto& p : pins_) (*out)[p.block][p.index] = p.value;
  }

 private:
  std::vector<Pin> pins_;
};

// Affine set {c0 = 1, c_x - s = gap} over a PSD qubit block and a scalar.
class CoupledProjector : public AffineProjector {
 public:
  explicit CoupledProjector(double gap) : gap_(gap) {}
  void project(const BlockVector& in, BlockVector* out) const override {
    *out = in;
    (*out)[0][0] = 1.0;
    const double d = ((*out)[0][1] - (*out)[1][0] - gap_) / 2.0;
    (*out)[0][1] -= d;
    (*out)[1][0] += d;
  }

 private:
  double gap_;
};

double min_eig_of_block(const std::vector<double>& coeffs) {
  return eigh(matrix_from_pauli(coeffs)).eigenvalues.front();
}

}  // namespace

TEST_CASE("block vector helpers") {
  BlockVector a = {{3.0, 4.0}, {0.0}};
  BlockVector b = {{1.0, 0.0}, {2.0}};
  CHECK(block_norm(a) == doctest::Approx(5.0));
  CHECK(block_dot(a, b) == doctest::Approx(3.0));
  block_axpy(2.0, b, &a);
  CHECK(a[0][0] == doctest::Approx(5.0));
  CHECK(a[1][0] == doctest::Approx(4.0));
  CHECK_THROWS_AS(block_dot(a, {{1.0}}), std::invalid_argument);
}

TEST_CASE("feasible psd intersection") {
  ConeProjector cones({{BlockCone::kPsdPauli, 4}});
  PinProjector affine({{0, 0, 1.0}, {0, 1, 0.3}});
  const auto r = solve_feasibility(affine, cones, {});
  REQUIRE(r.status == SolveStatus::kConverged);
  CHECK(r.affine_point[0][0] == 1.0);
  CHECK(r.affine_point[0][1] == 0.3);
  CHECK(min_eig_of_block(r.affine_point[0]) > -1e-6);
  CHECK(r.diagnostics.converged);
  CHECK(r.diagnostics.primal_residual < 1e-6);
}

TEST_CASE("infeasible psd intersection") {
  // Trace 0.2 with an X coefficient of 1 forces a negative eigenvalue no
  // matter what the other coefficients do.
  ConeProjector cones({{BlockCone::kPsdPauli, 4}});
  PinProjector affine({{0, 0, 0.1}, {0, 1, 1.0}});
  const auto r = solve_feasibility(affine, cones, {});
  CHECK(r.status == SolveStatus::kInfeasible);
  CHECK_FALSE(r.diagnostics.converged);
}

TEST_CASE("nonnegative blocks") {
  ConeProjector cones({{BlockCone::kNonnegative, 2}});

  // Projection onto the line x + y = s.
  class LineProjector : public AffineProjector {
   public:
    explicit LineProjector(double s) : s_(s) {}
    void project(const BlockVector& in, BlockVector* out) const override {
      *out = in;
      const double d = ((*out)[0][0] + (*out)[0][1] - s_) / 2.0;
      (*out)[0][0] -= d;
      (*out)[0][1] -= d;
    }

   private:
    double s_;
  };

  const auto good = solve_feasibility(LineProjector(1.0), cones, {});
  REQUIRE(good.status == SolveStatus::kConverged);
  CHECK(good.affine_point[0][0] + good.affine_point[0][1] ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(good.affine_point[0][0] > -1e-6);
  CHECK(good.affine_point[0][1] > -1e-6);

  const auto bad = solve_feasibility(LineProjector(-1.0), cones, {});
  CHECK(bad.status == SolveStatus::kInfeasible);
}

TEST_CASE("coupled psd and scalar blocks") {
  ConeProjector cones(
      {{BlockCone::kPsdPauli, 4}, {BlockCone::kNonnegative, 1}});

  const auto good = solve_feasibility(CoupledProjector(0.8), cones, {});
  REQUIRE(good.status == SolveStatus::kConverged);
  // c_x = s + 0.8 with s >= 0 and the qubit block PSD.
  CHECK(good.affine_point[0][1] - good.affine_point[1][0] ==
        doctest::Approx(0.8).epsilon(1e-9));
  CHECK(min_eig_of_block(good.affine_point[0]) > -1e-6);

  ConeProjector cones2(
      {{BlockCone::kPsdPauli, 4}, {BlockCone::kNonnegative, 1}});
  const auto bad = solve_feasibility(CoupledProjector(1.5), cones2, {});
  CHECK(bad.status == SolveStatus::kInfeasible);
}

TEST_CASE("warm starts reuse driver state") {
  ConeProjector cones({{BlockCone::kPsdPauli, 4}});
  PinProjector first({{0, 0, 1.0}, {0, 1, 0.30}});
  const auto cold = solve_feasibility(first, cones, {});
  REQUIRE(cold.status == SolveStatus::kConverged);

  PinProjector second({{0, 0, 1.0}, {0, 1, 0.31}});
  const auto warm = solve_feasibility(second, cones, cold.final_z);
  REQUIRE(warm.status == SolveStatus::kConverged);
  CHECK(warm.diagnostics.iterations <= cold.diagnostics.iterations + 5);

  // Mismatched warm start shape is rejected.
  CHECK_THROWS_AS(solve_feasibility(second, cones, BlockVector{{1.0, 2.0}}),
                  std::invalid_argument);
}

TEST_CASE("bisection helper") {
  int probes = 0;
  const double t = bisect_sup(0.0, 1.0, 1e-6, [&](double x) {
    ++probes;
    return x <= 0.637;
  });
  CHECK(t == doctest::Approx(0.637).epsilon(2e-6));
  CHECK(t <= 0.637);
  CHECK(probes < 40);

  CHECK(bisect_sup(0.0, 1.0, 1e-6, [](double) { return true; }) == 1.0);
  CHECK_THROWS_AS(bisect_sup(1.0, 0.0, 1e-6, [](double) { return true; }),
                  std::invalid_argument);
}

TEST_CASE("diagnostics serialization") {
  SdpDiagnostics d;
  d.converged = true;
  d.iterations = 123;
  d.primal_residual = 1e-8;
  d.dual_residual = 2e-8;
  d.objective = -0.25;
  const auto j = to_json(d);
  CHECK(j.at("converged") == true);
  CHECK(j.at("iterations") == 123);
  CHECK(j.at("primal_residual") == doctest::Approx(1e-8));
  CHECK(j.at("dual_residual") == doctest::Approx(2e-8));
  CHECK(j.at("objective") == doctest::Approx(-0.25));
}
