#pragma once

#include <complex>
#include <string>
#include <vector>

#include "json.hpp"

namespace switchlab {

using cplx = std::complex<double>;

// Tolerances shared across the numeric stack.
constexpr double kHermitianTol = 1e-12;     // relative max-norm gap allowed at construction
constexpr double kJacobiOffTol = 1e-12;     // relative off-diagonal Frobenius norm at exit
constexpr int kJacobiMaxSweeps = 100;

//============================================================================
// ComplexMatrix: dense square complex matrix, row-major storage.
//============================================================================

class ComplexMatrix {
 public:
  ComplexMatrix() : dim_(0) {}
  explicit ComplexMatrix(int dim);

  static ComplexMatrix identity(int dim);

  int dim() const { return dim_; }

  cplx& at(int r, int c) { return data_[static_cast<size_t>(r) * dim_ + c]; }
  const cplx& at(int r, int c) const {
    return data_[static_cast<size_t>(r) * dim_ + c];
  }
  cplx operator()(int r, int c) const { return at(r, c); }

  cplx* data() { return data_.data(); }
  const cplx* data() const { return data_.data(); }

  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;
  ComplexMatrix conjugate() const;

  cplx trace() const;
  double max_abs() const;
  double frobenius_norm() const;
  // ||M - M^dag||_max, zero for exactly Hermitian storage.
  double hermiticity_gap() const;
  bool all_finite() const;

  ComplexMatrix& operator+=(const ComplexMatrix& o);
  ComplexMatrix& operator-=(const ComplexMatrix& o);
  ComplexMatrix& operator*=(cplx s);

 private:
  int dim_;
  std::vector<cplx> data_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(cplx s, ComplexMatrix m);

// max-norm distance, for test assertions and convergence checks
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

//============================================================================
// HermitianOperator: Hermitian matrix with named tensor factors.
//============================================================================

struct Subsystem {
  std::string label;
  int dim;
};

class HermitianOperator {
 public:
  // Validates ||M - M^dag||_max <= kHermitianTol * ||M||_max, then stores
  // the symmetrized (M + M^dag)/2.  Labels must be unique and dims must
  // multiply to the matrix dimension.
  HermitianOperator(ComplexMatrix m, std::vector<Subsystem> subsystems);

  // Anonymous single subsystem spanning the whole matrix.
  static HermitianOperator from_matrix(ComplexMatrix m);

  int dim() const { return matrix_.dim(); }
  const ComplexMatrix& matrix() const { return matrix_; }
  const std::vector<Subsystem>& subsystems() const { return subsystems_; }

  double trace() const { return matrix_.trace().real(); }
  bool has_subsystem(const std::string& label) const;

 private:
  ComplexMatrix matrix_;
  std::vector<Subsystem> subsystems_;
};

// Tensor product; subsystem lists concatenate.  Anonymous labels (leading
// '#') are renumbered left to right so the result stays collision free.
HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b);

// Trace out every subsystem not named in `keep`; kept subsystems stay in
// their original order.  Unknown labels throw std::invalid_argument.
HermitianOperator partial_trace(const HermitianOperator& op,
                                const std::vector<std::string>& keep);

//============================================================================
// Hermitian eigendecomposition (cyclic Jacobi) and the PSD projection.
//============================================================================

struct EighResult {
  std::vector<double> eigenvalues;  // ascending
  ComplexMatrix eigenvectors;       // columns match eigenvalue order
  int sweeps;
};

// Cyclic Jacobi on a Hermitian matrix.  `basis_hint`, when given, should be
// a unitary that nearly diagonalizes the input; it is used as a starting
// frame so nearly converged calls finish in one or two sweeps.
// Throws std::runtime_error if the sweep cap is hit.
EighResult eigh(const ComplexMatrix& m,
                const ComplexMatrix* basis_hint = nullptr);

// Nearest positive semidefinite matrix in Frobenius norm: clip negative
// eigenvalues at zero and reassemble.
HermitianOperator psd_project(const HermitianOperator& op);
ComplexMatrix psd_project(const ComplexMatrix& m,
                          const ComplexMatrix* basis_hint = nullptr,
                          ComplexMatrix* basis_out = nullptr,
                          double* min_eigenvalue = nullptr);

//============================================================================
// JSON serialization: {"dim", "subsystems", "re", "im"}, row-major.
//============================================================================

nlohmann::json to_json(const HermitianOperator& op);
HermitianOperator hermitian_from_json(const nlohmann::json& j);

}  // namespace switchlab
