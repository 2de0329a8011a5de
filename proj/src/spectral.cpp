#include "scars/spectral.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace scars {

Eigen::MatrixXd sector_matrix(const ConstrainedBasis& basis,
                              const SymmetrySector& sector,
                              const SparseOperator& op) {
  const std::size_t m = sector.dim();
  // index basis states by the sector states touching them
  std::vector<std::vector<std::pair<int, double>>> touching(basis.dim());
  for (std::size_t a = 0; a < m; ++a)
    for (const auto& [idx, amp] : sector.states[a])
      touching[idx].emplace_back(static_cast<int>(a), amp);

  Eigen::MatrixXd hs = Eigen::MatrixXd::Zero(m, m);
  // H applied to one sector state touches only a handful of rows; walk the
  // CSR rows of the state's support instead of forming a dense vector.
  std::vector<double> y(basis.dim(), 0.0);
  std::vector<std::size_t> support;
  const auto& rp = op.row_ptr();
  const auto& cols = op.cols();
  const auto& vals = op.values();
  for (std::size_t b = 0; b < m; ++b) {
    support.clear();
    for (const auto& [idx, amp] : sector.states[b]) {
      for (std::size_t k = rp[idx]; k < rp[idx + 1]; ++k) {
        // symmetric: row idx doubles as column idx
        if (y[cols[k]] == 0.0) support.push_back(cols[k]);
        y[cols[k]] += vals[k] * amp;
      }
    }
    for (std::size_t r : support) {
      for (const auto& [a, amp] : touching[r]) hs(a, b) += amp * y[r];
      y[r] = 0.0;
    }
  }
  return hs;
}

SpectralData diagonalize_sector(const ConstrainedBasis& basis,
                                const SymmetrySector& sector,
                                const SparseOperator& op,
                                std::size_t dense_cap) {
  if (sector.dim() > dense_cap)
    throw std::invalid_argument("diagonalize_sector: sector above dense cap");
  SpectralData out;
  out.k = sector.k;
  out.parity = sector.parity;
  if (sector.dim() == 0) {
    out.eigenvalues.resize(0);
    return out;
  }
  Eigen::MatrixXd hs = sector_matrix(basis, sector, op);
  const lapack_int n = static_cast<lapack_int>(hs.rows());
  out.eigenvalues.resize(n);
  lapack_int info = LAPACKE_dsyev(LAPACK_COL_MAJOR, 'N', 'U', n, hs.data(), n,
                                  out.eigenvalues.data());
  if (info != 0) throw std::runtime_error("diagonalize_sector: dsyev failed");
  if (out.eigenvalues.size() >= 3) out.r = r_statistic(out.eigenvalues);
  return out;
}

double r_statistic(const Eigen::VectorXd& eigenvalues) {
  std::vector<double> e(eigenvalues.data(),
                        eigenvalues.data() + eigenvalues.size());
  std::sort(e.begin(), e.end());
  if (e.size() < 3) throw std::invalid_argument("r_statistic: too few levels");
  const double width = e.back() - e.front();
  const double tol = 1e-10 * std::max(width, 1.0);
  std::vector<double> distinct;
  distinct.push_back(e.front());
  for (double v : e)
    if (v - distinct.back() > tol) distinct.push_back(v);
  if (distinct.size() < 3)
    throw std::invalid_argument("r_statistic: too few distinct levels");
  double sum = 0.0;
  std::size_t cnt = 0;
  for (std::size_t i = 2; i < distinct.size(); ++i) {
    const double s1 = distinct[i - 1] - distinct[i - 2];
    const double s2 = distinct[i] - distinct[i - 1];
    sum += std::min(s1, s2) / std::max(s1, s2);
    ++cnt;
  }
  return sum / cnt;
}

StateVector lift(const SymmetrySector& sector, std::size_t full_dim,
                 const Eigen::VectorXd& coeffs) {
  if (static_cast<std::size_t>(coeffs.size()) != sector.dim())
    throw std::invalid_argument("lift: coefficient length mismatch");
  StateVector psi = StateVector::Zero(full_dim);
  for (std::size_t a = 0; a < sector.dim(); ++a)
    for (const auto& [idx, amp] : sector.states[a]) psi[idx] += coeffs[a] * amp;
  return psi;
}

}  // namespace scars
