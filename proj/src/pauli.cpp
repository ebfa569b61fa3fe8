#include "switchlab/pauli.hpp"

#include <stdexcept>
#include <string>

namespace switchlab {

int qubit_count(int dim) {
  if (dim < 1 || (dim & (dim - 1)) != 0)
    throw std::invalid_argument("dimension " + std::to_string(dim) +
                                " is not a power of two");
  int n = 0;
  while ((1 << n) < dim) ++n;
  return n;
}

namespace {

// Planar buffer layout: index = row * 2^n + col, so the bit pair for qubit i
// sits at strides (2^(2n-1-i), 2^(n-1-i)). The digit convention 0=I,1=X,
// 2=Y,3=Z maps digit d to bit pair (d>>1, d&1).
std::size_t planar_index(std::size_t word, int n) {
  std::size_t p = 0;
  for (int i = 0; i < n; ++i) {
    const int d = pauli_digit(word, i, n);
    p |= static_cast<std::size_t>(d >> 1) << (2 * n - 1 - i);
    p |= static_cast<std::size_t>(d & 1) << (n - 1 - i);
  }
  return p;
}

}  // namespace

std::vector<double> pauli_coefficients(const ComplexMatrix& m) {
  const int dim = m.dim();
  const int n = qubit_count(dim);
  const std::size_t total = std::size_t(dim) * dim;

  std::vector<cplx> buf(total);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) buf[std::size_t(r) * dim + c] = m.at(r, c);

  // One butterfly pass per qubit turns the (row,col) bit pair into the
  // coefficient of I/X/Y/Z on that qubit.
  for (int i = 0; i < n; ++i) {
    const std::size_t shi = std::size_t(1) << (2 * n - 1 - i);
    const std::size_t slo = std::size_t(1) << (n - 1 - i);
    for (std::size_t base = 0; base < total; ++base) {
      if (base & (shi | slo)) continue;
      const cplx m00 = buf[base];
      const cplx m01 = buf[base + slo];
      const cplx m10 = buf[base + shi];
      const cplx m11 = buf[base + shi + slo];
      buf[base] = 0.5 * (m00 + m11);
      buf[base + slo] = 0.5 * (m01 + m10);
      buf[base + shi] = cplx(0.0, 0.5) * (m01 - m10);
      buf[base + shi + slo] = 0.5 * (m00 - m11);
    }
  }

  std::vector<double> out(total);
  for (std::size_t k = 0; k < total; ++k) out[k] = buf[planar_index(k, n)].real();
  return out;
}

ComplexMatrix matrix_from_pauli(const std::vector<double>& coeffs) {
  int n = 0;
  while ((std::size_t(1) << (2 * n)) < coeffs.size()) ++n;
  if ((std::size_t(1) << (2 * n)) != coeffs.size())
    throw std::invalid_argument("coefficient vector length is not a power of 4");
  const int dim = 1 << n;
  const std::size_t total = coeffs.size();

  std::vector<cplx> buf(total);
  for (std::size_t k = 0; k < total; ++k) buf[planar_index(k, n)] = coeffs[k];

  for (int i = 0; i < n; ++i) {
    const std::size_t shi = std::size_t(1) << (2 * n - 1 - i);
    const std::size_t slo = std::size_t(1) << (n - 1 - i);
    for (std::size_t base = 0; base < total; ++base) {
      if (base & (shi | slo)) continue;
      const cplx ci = buf[base];
      const cplx cx = buf[base + slo];
      const cplx cy = buf[base + shi];
      const cplx cz = buf[base + shi + slo];
      buf[base] = ci + cz;
      buf[base + slo] = cx - cplx(0.0, 1.0) * cy;
      buf[base + shi] = cx + cplx(0.0, 1.0) * cy;
      buf[base + shi + slo] = ci - cz;
    }
  }

  ComplexMatrix m(dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) m.at(r, c) = buf[std::size_t(r) * dim + c];
  return m;
}

double pauli_dot(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("coefficient vectors differ in length");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

}  // namespace switchlab
