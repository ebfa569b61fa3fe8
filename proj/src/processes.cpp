#include "switchlab/processes.hpp"

#include <cmath>
#include <stdexcept>

namespace switchlab {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

ComplexMatrix pauli(int d) {
  ComplexMatrix m(2);
  switch (d) {
    case 1:
      m.at(0, 1) = 1.0;
      m.at(1, 0) = 1.0;
      break;
    case 2:
      m.at(0, 1) = cplx(0.0, -1.0);
      m.at(1, 0) = cplx(0.0, 1.0);
      break;
    case 3:
      m.at(0, 0) = 1.0;
      m.at(1, 1) = -1.0;
      break;
    default:
      m.at(0, 0) = 1.0;
      m.at(1, 1) = 1.0;
  }
  return m;
}

}  // namespace

const std::vector<std::string>& standard_gate_names() {
  static const std::vector<std::string> names = {"I", "X", "Y", "Z", "P", "Q"};
  return names;
}

ComplexMatrix gate_matrix(const std::string& name) {
  if (name == "I") return pauli(0);
  if (name == "X") return pauli(1);
  if (name == "Y") return pauli(2);
  if (name == "Z") return pauli(3);
  if (name == "P") {
    ComplexMatrix m = pauli(2);
    m += pauli(3);
    m *= kInvSqrt2;
    return m;
  }
  if (name == "Q") {
    ComplexMatrix m = pauli(1);
    m += pauli(3);
    m *= kInvSqrt2;
    return m;
  }
  throw std::invalid_argument("unknown gate name '" + name + "'");
}

HermitianOperator choi_of_unitary(const ComplexMatrix& u,
                                  const std::string& in_label,
                                  const std::string& out_label) {
  const int d = u.dim();
  // Vectorized conjugate of u: amplitude at (in=l, out=m) is conj(u[m][l]).
  std::vector<cplx> vec(std::size_t(d) * d);
  for (int l = 0; l < d; ++l)
    for (int m = 0; m < d; ++m)
      vec[std::size_t(l) * d + m] = std::conj(u.at(m, l));

  ComplexMatrix choi(d * d);
  for (std::size_t r = 0; r < vec.size(); ++r)
    for (std::size_t c = 0; c < vec.size(); ++c)
      choi.at(int(r), int(c)) = vec[r] * std::conj(vec[c]);
  return HermitianOperator(choi, {{in_label, d}, {out_label, d}});
}

HermitianOperator switch_process(double alpha, double beta,
                                 const std::vector<cplx>& target) {
  if (std::abs(alpha * alpha + beta * beta - 1.0) > 1e-12)
    throw std::invalid_argument("control amplitudes must satisfy a^2 + b^2 = 1");
  if (target.size() != 2)
    throw std::invalid_argument("target state must be a qubit");
  const double norm =
      std::norm(target[0]) + std::norm(target[1]);
  if (std::abs(norm - 1.0) > 1e-12)
    throw std::invalid_argument("target state must be normalized");

  // Pure 6-qubit amplitude over (AI, AO, BI, BO, Ct, C). Control 0 wires the
  // target through A then B, control 1 through B then A; either way the last
  // output lands in Ct, which is discarded below.
  std::vector<cplx> w(64, 0.0);
  for (int ai = 0; ai < 2; ++ai)
    for (int ao = 0; ao < 2; ++ao)
      for (int bi = 0; bi < 2; ++bi)
        for (int bo = 0; bo < 2; ++bo)
          for (int ct = 0; ct < 2; ++ct) {
            const int base = ai * 32 + ao * 16 + bi * 8 + bo * 4 + ct * 2;
            if (ao == bi && bo == ct) w[base + 0] += alpha * target[ai];
            if (bo == ai && ao == ct) w[base + 1] += beta * target[bi];
          }

  ComplexMatrix proj(64);
  for (int r = 0; r < 64; ++r)
    for (int c = 0; c < 64; ++c) proj.at(r, c) = w[r] * std::conj(w[c]);

  const HermitianOperator full(proj, {{"AI", 2},
                                      {"AO", 2},
                                      {"BI", 2},
                                      {"BO", 2},
                                      {"Ct", 2},
                                      {"C", 2}});
  return partial_trace(full, process_labels());
}

HermitianOperator balanced_switch_process() {
  return switch_process(kInvSqrt2, kInvSqrt2);
}

HermitianOperator white_noise_process() {
  ComplexMatrix m = ComplexMatrix::identity(32);
  m *= 0.125;
  std::vector<Subsystem> subs;
  for (const auto& label : process_labels()) subs.push_back({label, 2});
  return HermitianOperator(m, subs);
}

double born_expectation(const HermitianOperator& process,
                        const HermitianOperator& observable) {
  const auto& ps = process.subsystems();
  const auto& os = observable.subsystems();
  if (ps.size() != os.size())
    throw std::invalid_argument("subsystem layouts differ");
  for (std::size_t i = 0; i < ps.size(); ++i)
    if (ps[i].label != os[i].label || ps[i].dim != os[i].dim)
      throw std::invalid_argument("subsystem layouts differ");
  return (observable.matrix() * process.matrix()).trace().real();
}

double stokes_expectation(const HermitianOperator& process,
                          const ComplexMatrix& a, const ComplexMatrix& b) {
  const auto choi_a = choi_of_unitary(a, "AI", "AO");
  const auto choi_b = choi_of_unitary(b, "BI", "BO");
  const HermitianOperator xc(pauli(1), {{"C", 2}});
  return born_expectation(process, kron(kron(choi_a, choi_b), xc));
}

double analytic_stokes(const ComplexMatrix& a, const ComplexMatrix& b,
                       const std::vector<cplx>& target) {
  if (target.size() != 2)
    throw std::invalid_argument("target state must be a qubit");
  cplx u0[2] = {0.0, 0.0};  // b after a
  cplx u1[2] = {0.0, 0.0};  // a after b
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        u0[i] += b.at(i, j) * a.at(j, k) * target[k];
        u1[i] += a.at(i, j) * b.at(j, k) * target[k];
      }
  cplx overlap = 0.0;
  for (int i = 0; i < 2; ++i) overlap += std::conj(u1[i]) * u0[i];
  return overlap.real();
}

HermitianOperator dephase_control(const HermitianOperator& process, double v) {
  if (v < 0.0 || v > 1.0)
    throw std::invalid_argument("visibility must lie in [0, 1]");
  const auto& subs = process.subsystems();
  if (subs.empty() || subs.back().dim != 2)
    throw std::invalid_argument("last subsystem must be a qubit control");

  // Entries whose control bits differ pick up the visibility factor.
  ComplexMatrix m = process.matrix();
  const int dim = m.dim();
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c)
      if ((r & 1) != (c & 1)) m.at(r, c) *= v;
  return HermitianOperator(m, subs);
}

}  // namespace switchlab
