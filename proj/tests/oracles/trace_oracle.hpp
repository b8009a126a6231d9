#pragma once

// Element-wise reference computations, written without Eigen products so they
// share no code path with the library.

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cd = std::complex<double>;

/// Re Tr(rho E) = sum_ij rho_ij E_ji.
inline double trace_product(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& e) {
  cd sum = 0.0;
  for (Eigen::Index i = 0; i < rho.rows(); ++i)
    for (Eigen::Index j = 0; j < rho.cols(); ++j) sum += rho(i, j) * e(j, i);
  return sum.real();
}

inline std::vector<double> born(const Eigen::MatrixXcd& rho, const std::vector<Eigen::MatrixXcd>& effects) {
  std::vector<double> p;
  for (const auto& e : effects) p.push_back(trace_product(rho, e));
  return p;
}

/// Reduced state on A of a (da x db) system; basis index a * db + b.
inline Eigen::MatrixXcd trace_out_b(const Eigen::MatrixXcd& rho, int da, int db) {
  Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(da, da);
  for (int a1 = 0; a1 < da; ++a1)
    for (int a2 = 0; a2 < da; ++a2)
      for (int b = 0; b < db; ++b) r(a1, a2) += rho(a1 * db + b, a2 * db + b);
  return r;
}

inline Eigen::MatrixXcd trace_out_a(const Eigen::MatrixXcd& rho, int da, int db) {
  Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(db, db);
  for (int b1 = 0; b1 < db; ++b1)
    for (int b2 = 0; b2 < db; ++b2)
      for (int a = 0; a < da; ++a) r(b1, b2) += rho(a * db + b1, a * db + b2);
  return r;
}

}  // namespace oracle
