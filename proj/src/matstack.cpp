#include "switchlab/matstack.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace switchlab {

//============================================================================
// ComplexMatrix
//============================================================================

ComplexMatrix::ComplexMatrix(int dim) : dim_(dim) {
  if (dim < 0) throw std::invalid_argument("matrix dimension must be >= 0");
  data_.assign(static_cast<size_t>(dim) * dim, cplx(0.0, 0.0));
}

ComplexMatrix ComplexMatrix::identity(int dim) {
  ComplexMatrix m(dim);
  for (int i = 0; i < dim; ++i) m.at(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(dim_);
  for (int r = 0; r < dim_; ++r)
    for (int c = 0; c < dim_; ++c) out.at(c, r) = std::conj(at(r, c));
  return out;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix out(dim_);
  for (int r = 0; r < dim_; ++r)
    for (int c = 0; c < dim_; ++c) out.at(c, r) = at(r, c);
  return out;
}

ComplexMatrix ComplexMatrix::conjugate() const {
  ComplexMatrix out(dim_);
  for (int r = 0; r < dim_; ++r)
    for (int c = 0; c < dim_; ++c) out.at(r, c) = std::conj(at(r, c));
  return out;
}

cplx ComplexMatrix::trace() const {
  cplx t = 0.0;
  for (int i = 0; i < dim_; ++i) t += at(i, i);
  return t;
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (const cplx& v : data_) m = std::max(m, std::abs(v));
  return m;
}

double ComplexMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const cplx& v : data_) s += std::norm(v);
  return std::sqrt(s);
}

double ComplexMatrix::hermiticity_gap() const {
  double g = 0.0;
  for (int r = 0; r < dim_; ++r)
    for (int c = r; c < dim_; ++c)
      g = std::max(g, std::abs(at(r, c) - std::conj(at(c, r))));
  return g;
}

bool ComplexMatrix::all_finite() const {
  for (const cplx& v : data_)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
  if (o.dim_ != dim_) throw std::invalid_argument("dimension mismatch in +=");
  for (size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& o) {
  if (o.dim_ != dim_) throw std::invalid_argument("dimension mismatch in -=");
  for (size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s) {
  for (cplx& v : data_) v *= s;
  return *this;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) {
  a += b;
  return a;
}

ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) {
  a -= b;
  return a;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  const int n = a.dim();
  if (b.dim() != n) throw std::invalid_argument("dimension mismatch in *");
  ComplexMatrix out(n);
  for (int r = 0; r < n; ++r) {
    for (int k = 0; k < n; ++k) {
      const cplx ark = a.at(r, k);
      if (ark == cplx(0.0, 0.0)) continue;
      const cplx* brow = b.data() + static_cast<size_t>(k) * n;
      cplx* orow = out.data() + static_cast<size_t>(r) * n;
      for (int c = 0; c < n; ++c) orow[c] += ark * brow[c];
    }
  }
  return out;
}

ComplexMatrix operator*(cplx s, ComplexMatrix m) {
  m *= s;
  return m;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("dimension mismatch in max_abs_diff");
  double m = 0.0;
  for (int r = 0; r < a.dim(); ++r)
    for (int c = 0; c < a.dim(); ++c)
      m = std::max(m, std::abs(a.at(r, c) - b.at(r, c)));
  return m;
}

//============================================================================
// HermitianOperator
//============================================================================

HermitianOperator::HermitianOperator(ComplexMatrix m,
                                     std::vector<Subsystem> subsystems)
    : matrix_(std::move(m)), subsystems_(std::move(subsystems)) {
  if (!matrix_.all_finite())
    throw std::invalid_argument("matrix entries must be finite");
  const double gap = matrix_.hermiticity_gap();
  const double scale = std::max(matrix_.max_abs(), 1e-300);
  if (gap > kHermitianTol * scale)
    throw std::invalid_argument("matrix is not Hermitian within tolerance");

  // Store the exactly symmetrized matrix.
  const int n = matrix_.dim();
  for (int r = 0; r < n; ++r) {
    matrix_.at(r, r) = cplx(matrix_.at(r, r).real(), 0.0);
    for (int c = r + 1; c < n; ++c) {
      const cplx v = 0.5 * (matrix_.at(r, c) + std::conj(matrix_.at(c, r)));
      matrix_.at(r, c) = v;
      matrix_.at(c, r) = std::conj(v);
    }
  }

  long long prod = 1;
  std::set<std::string> seen;
  for (const Subsystem& s : subsystems_) {
    if (s.dim <= 0) throw std::invalid_argument("subsystem dims must be > 0");
    if (!seen.insert(s.label).second)
      throw std::invalid_argument("duplicate subsystem label: " + s.label);
    prod *= s.dim;
  }
  if (prod != matrix_.dim())
    throw std::invalid_argument("subsystem dims do not factor the matrix dim");
}

HermitianOperator HermitianOperator::from_matrix(ComplexMatrix m) {
  const int d = m.dim();
  return HermitianOperator(std::move(m), {{"#0", d}});
}

bool HermitianOperator::has_subsystem(const std::string& label) const {
  for (const Subsystem& s : subsystems_)
    if (s.label == label) return true;
  return false;
}

HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b) {
  const int da = a.dim(), db = b.dim();
  ComplexMatrix out(da * db);
  for (int ra = 0; ra < da; ++ra)
    for (int ca = 0; ca < da; ++ca) {
      const cplx va = a.matrix().at(ra, ca);
      if (va == cplx(0.0, 0.0)) continue;
      for (int rb = 0; rb < db; ++rb)
        for (int cb = 0; cb < db; ++cb)
          out.at(ra * db + rb, ca * db + cb) = va * b.matrix().at(rb, cb);
    }

  std::vector<Subsystem> subs = a.subsystems();
  subs.insert(subs.end(), b.subsystems().begin(), b.subsystems().end());
  int anon = 0;
  std::set<std::string> named;
  for (Subsystem& s : subs) {
    if (!s.label.empty() && s.label[0] == '#')
      s.label = "#" + std::to_string(anon++);
    else if (!named.insert(s.label).second)
      throw std::invalid_argument("kron would duplicate label: " + s.label);
  }
  return HermitianOperator(std::move(out), std::move(subs));
}

HermitianOperator partial_trace(const HermitianOperator& op,
                                const std::vector<std::string>& keep) {
  const auto& subs = op.subsystems();
  std::vector<int> keep_idx;
  for (const std::string& label : keep) {
    bool found = false;
    for (size_t i = 0; i < subs.size(); ++i)
      if (subs[i].label == label) {
        keep_idx.push_back(static_cast<int>(i));
        found = true;
        break;
      }
    if (!found) throw std::invalid_argument("unknown subsystem: " + label);
  }
  std::sort(keep_idx.begin(), keep_idx.end());
  if (std::adjacent_find(keep_idx.begin(), keep_idx.end()) != keep_idx.end())
    throw std::invalid_argument("repeated subsystem in keep list");

  // Strides of each factor inside the flattened index.
  const int ns = static_cast<int>(subs.size());
  std::vector<long long> stride(ns, 1);
  for (int i = ns - 2; i >= 0; --i) stride[i] = stride[i + 1] * subs[i + 1].dim;

  std::vector<int> trace_idx;
  for (int i = 0; i < ns; ++i)
    if (!std::binary_search(keep_idx.begin(), keep_idx.end(), i))
      trace_idx.push_back(i);

  long long dk = 1, dt = 1;
  for (int i : keep_idx) dk *= subs[i].dim;
  for (int i : trace_idx) dt *= subs[i].dim;

  // Flat offsets of every kept and traced multi-index.
  auto offsets = [&](const std::vector<int>& which) {
    long long count = 1;
    for (int i : which) count *= subs[i].dim;
    std::vector<long long> out(static_cast<size_t>(count), 0);
    for (long long v = 0; v < count; ++v) {
      long long rem = v, off = 0;
      for (int j = static_cast<int>(which.size()) - 1; j >= 0; --j) {
        const int d = subs[which[j]].dim;
        off += (rem % d) * stride[which[j]];
        rem /= d;
      }
      out[static_cast<size_t>(v)] = off;
    }
    return out;
  };
  const std::vector<long long> koff = offsets(keep_idx);
  const std::vector<long long> toff = offsets(trace_idx);

  ComplexMatrix out(static_cast<int>(dk));
  const long long n = op.dim();
  for (long long r = 0; r < dk; ++r)
    for (long long c = 0; c < dk; ++c) {
      cplx sum = 0.0;
      for (long long t = 0; t < dt; ++t)
        sum += op.matrix().at(static_cast<int>(koff[r] + toff[t]),
                              static_cast<int>(koff[c] + toff[t]));
      out.at(static_cast<int>(r), static_cast<int>(c)) = sum;
    }
  (void)n;

  std::vector<Subsystem> out_subs;
  for (int i : keep_idx) out_subs.push_back(subs[i]);
  if (out_subs.empty()) out_subs.push_back({"#0", 1});
  return HermitianOperator(std::move(out), std::move(out_subs));
}

//============================================================================
// Jacobi eigendecomposition
//============================================================================

namespace {

double off_diagonal_norm(const ComplexMatrix& a) {
  double s = 0.0;
  for (int r = 0; r < a.dim(); ++r)
    for (int c = 0; c < a.dim(); ++c)
      if (r != c) s += std::norm(a.at(r, c));
  return std::sqrt(s);
}

// One full cyclic sweep of two-sided Jacobi rotations on A, accumulating the
// transform into V (A <- J^dag A J, V <- V J).
void jacobi_sweep(ComplexMatrix& a, ComplexMatrix& v, double skip_threshold) {
  const int n = a.dim();
  for (int p = 0; p < n - 1; ++p) {
    for (int q = p + 1; q < n; ++q) {
      const cplx apq = a.at(p, q);
      const double r = std::abs(apq);
      if (r <= skip_threshold) continue;

      const double app = a.at(p, p).real();
      const double aqq = a.at(q, q).real();
      const cplx alpha = apq / r;  // unit phase of the pivot

      const double tau = (aqq - app) / (2.0 * r);
      const double t =
          (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
      const double c = 1.0 / std::sqrt(1.0 + t * t);
      const double s = t * c;

      // J is the identity outside rows/cols p,q with
      //   J[p][p] = c, J[p][q] = s, J[q][p] = -s*conj(alpha), J[q][q] = c*conj(alpha).
      const cplx jqp = -s * std::conj(alpha);
      const cplx jqq = c * std::conj(alpha);

      // Row update: (J^dag A).
      for (int k = 0; k < n; ++k) {
        const cplx ap = a.at(p, k), aq = a.at(q, k);
        a.at(p, k) = c * ap - s * alpha * aq;
        a.at(q, k) = s * ap + c * alpha * aq;
      }
      // Column update: (... J).
      for (int k = 0; k < n; ++k) {
        const cplx ap = a.at(k, p), aq = a.at(k, q);
        a.at(k, p) = c * ap + jqp * aq;
        a.at(k, q) = s * ap + jqq * aq;
      }
      for (int k = 0; k < n; ++k) {
        const cplx vp = v.at(k, p), vq = v.at(k, q);
        v.at(k, p) = c * vp + jqp * vq;
        v.at(k, q) = s * vp + jqq * vq;
      }
      a.at(p, q) = 0.0;
      a.at(q, p) = 0.0;
      a.at(p, p) = cplx(a.at(p, p).real(), 0.0);
      a.at(q, q) = cplx(a.at(q, q).real(), 0.0);
    }
  }
}

}  // namespace

EighResult eigh(const ComplexMatrix& m, const ComplexMatrix* basis_hint) {
  const int n = m.dim();
  const double scale = std::max(m.max_abs(), 1e-300);
  if (m.hermiticity_gap() > kHermitianTol * scale * 10.0)
    throw std::invalid_argument("eigh requires a Hermitian matrix");

  ComplexMatrix a = m;
  ComplexMatrix v = ComplexMatrix::identity(n);
  if (basis_hint != nullptr && basis_hint->dim() == n) {
    a = basis_hint->adjoint() * m * (*basis_hint);
    v = *basis_hint;
    // Guard against drift in an accumulated hint.
    for (int r = 0; r < n; ++r) {
      a.at(r, r) = cplx(a.at(r, r).real(), 0.0);
      for (int c = r + 1; c < n; ++c) {
        const cplx val = 0.5 * (a.at(r, c) + std::conj(a.at(c, r)));
        a.at(r, c) = val;
        a.at(c, r) = std::conj(val);
      }
    }
  }

  const double fro = std::max(m.frobenius_norm(), 1e-300);
  int sweeps = 0;
  while (true) {
    const double off = off_diagonal_norm(a);
    if (off <= kJacobiOffTol * fro) break;
    if (sweeps >= kJacobiMaxSweeps)
      throw std::runtime_error("eigh: Jacobi did not converge in sweep cap");
    // Rotations below this size cannot reduce the current off-norm much;
    // the threshold shrinks as the sweep series converges.
    const double skip = 0.01 * off / (static_cast<double>(n) * n);
    jacobi_sweep(a, v, skip);
    ++sweeps;
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
    return a.at(i, i).real() < a.at(j, j).real();
  });

  EighResult out;
  out.sweeps = sweeps;
  out.eigenvalues.resize(n);
  out.eigenvectors = ComplexMatrix(n);
  for (int j = 0; j < n; ++j) {
    out.eigenvalues[j] = a.at(order[j], order[j]).real();
    for (int i = 0; i < n; ++i) out.eigenvectors.at(i, j) = v.at(i, order[j]);
  }
  return out;
}

ComplexMatrix psd_project(const ComplexMatrix& m,
                          const ComplexMatrix* basis_hint,
                          ComplexMatrix* basis_out,
                          double* min_eigenvalue) {
  const EighResult e = eigh(m, basis_hint);
  const int n = m.dim();
  if (min_eigenvalue != nullptr)
    *min_eigenvalue = e.eigenvalues.empty() ? 0.0 : e.eigenvalues.front();
  if (basis_out != nullptr) *basis_out = e.eigenvectors;

  // Reassemble V * max(lambda, 0) * V^dag over the positive part only.
  ComplexMatrix out(n);
  for (int j = 0; j < n; ++j) {
    const double lam = e.eigenvalues[j];
    if (lam <= 0.0) continue;
    for (int r = 0; r < n; ++r) {
      const cplx vr = lam * e.eigenvectors.at(r, j);
      if (vr == cplx(0.0, 0.0)) continue;
      for (int c = 0; c < n; ++c)
        out.at(r, c) += vr * std::conj(e.eigenvectors.at(c, j));
    }
  }
  for (int r = 0; r < n; ++r) {
    out.at(r, r) = cplx(out.at(r, r).real(), 0.0);
    for (int c = r + 1; c < n; ++c) {
      const cplx v = 0.5 * (out.at(r, c) + std::conj(out.at(c, r)));
      out.at(r, c) = v;
      out.at(c, r) = std::conj(v);
    }
  }
  return out;
}

HermitianOperator psd_project(const HermitianOperator& op) {
  return HermitianOperator(psd_project(op.matrix(), nullptr, nullptr, nullptr),
                           op.subsystems());
}

//============================================================================
// JSON
//============================================================================

nlohmann::json to_json(const HermitianOperator& op) {
  nlohmann::json j;
  j["dim"] = op.dim();
  nlohmann::json subs = nlohmann::json::array();
  for (const Subsystem& s : op.subsystems())
    subs.push_back(nlohmann::json::array({s.label, s.dim}));
  j["subsystems"] = subs;
  std::vector<double> re, im;
  const int n = op.dim();
  re.reserve(static_cast<size_t>(n) * n);
  im.reserve(static_cast<size_t>(n) * n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      re.push_back(op.matrix().at(r, c).real());
      im.push_back(op.matrix().at(r, c).imag());
    }
  j["re"] = re;
  j["im"] = im;
  return j;
}

HermitianOperator hermitian_from_json(const nlohmann::json& j) {
  const int n = j.at("dim").get<int>();
  const auto re = j.at("re").get<std::vector<double>>();
  const auto im = j.at("im").get<std::vector<double>>();
  if (re.size() != static_cast<size_t>(n) * n || im.size() != re.size())
    throw std::invalid_argument("matrix JSON has wrong entry count");
  ComplexMatrix m(n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const size_t k = static_cast<size_t>(r) * n + c;
      m.at(r, c) = cplx(re[k], im[k]);
    }
  std::vector<Subsystem> subs;
  for (const auto& s : j.at("subsystems"))
    subs.push_back({s.at(0).get<std::string>(), s.at(1).get<int>()});
  return HermitianOperator(std::move(m), std::move(subs));
}

}  // namespace switchlab
