#include "scars/ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace scars {

namespace {

// <n'|S^x|n> for |n - n'| = 1, spin s = two_s/2, m = n - s
double sx_element(int two_s, int n_lo) {
  // element between levels n_lo and n_lo + 1
  const double s = 0.5 * two_s;
  const double m = n_lo - s;
  const double mp = n_lo + 1 - s;
  return 0.5 * std::sqrt(s * (s + 1) - m * mp);
}

double sz_value(int two_s, int n) { return n - 0.5 * two_s; }

int mod(int a, int L) { return ((a % L) + L) % L; }

// Enumerate the nonzero action of H on one basis config: calls
// emit(target_rank, value) for each connected config (diagonal included for
// the deformed model only via off-diagonal structure; PXP has no diagonal).
template <typename F>
void for_each_element(const ConstrainedBasis& basis, const ModelParams& p,
                      std::size_t row, F&& emit) {
  const int L = basis.sites();
  const int two_s = basis.two_s();
  const bool periodic = basis.boundary() == Boundary::periodic;
  const std::uint64_t c = basis.config(row);
  for (int i = 0; i < L; ++i) {
    // both neighbors (where present) must be unexcited
    if (periodic || i > 0) {
      if (basis.digit(c, mod(i - 1, L)) != 0) continue;
    }
    if (periodic || i + 1 < L) {
      if (basis.digit(c, mod(i + 1, L)) != 0) continue;
    }
    const int n = basis.digit(c, i);
    for (int dn : {-1, +1}) {
      const int n2 = n + dn;
      if (n2 < 0 || n2 > two_s) continue;
      const std::uint64_t c2 = basis.set_digit(c, i, n2);
      const std::int64_t col = basis.find(c2);
      if (col < 0) continue;  // flip to n2 > 0 blocked by a neighbor
      double v = p.omega * sx_element(two_s, std::min(n, n2));
      if (p.h != 0.0 && periodic) {
        // S^z factors two sites away commute with the flip and are diagonal.
        // Conventions: h > 0 is the direction that stabilizes the |Z2>
        // revivals (the S^z of the blockade-adjacent sites is negative), and
        // h is quoted as the Pauli-matrix ratio, i.e. the spin-operator
        // coefficient is 2h so that H = (Omega/2) sum (P sigma^x P -
        // (h/Omega) (P sigma^x P sigma^z + sigma^z P sigma^x P)).
        const double zr = sz_value(two_s, basis.digit(c, mod(i + 2, L)));
        const double zl = sz_value(two_s, basis.digit(c, mod(i - 2, L)));
        v -= 2.0 * p.h * sx_element(two_s, std::min(n, n2)) * (zr + zl);
      }
      emit(static_cast<std::size_t>(col), v);
    }
  }
}

}  // namespace

SparseOperator::SparseOperator(std::size_t dim) : row_ptr_(dim + 1, 0) {}

SparseOperator SparseOperator::from_triplets(
    std::size_t dim,
    std::vector<std::tuple<std::size_t, std::size_t, double>> triplets) {
  std::sort(triplets.begin(), triplets.end());
  SparseOperator op;
  op.row_ptr_.assign(dim + 1, 0);
  for (std::size_t i = 0; i < triplets.size();) {
    std::size_t j = i;
    double v = 0.0;
    while (j < triplets.size() &&
           std::get<0>(triplets[j]) == std::get<0>(triplets[i]) &&
           std::get<1>(triplets[j]) == std::get<1>(triplets[i])) {
      v += std::get<2>(triplets[j]);
      ++j;
    }
    if (v != 0.0) {
      op.col_.push_back(std::get<1>(triplets[i]));
      op.val_.push_back(v);
      ++op.row_ptr_[std::get<0>(triplets[i]) + 1];
    }
    i = j;
  }
  for (std::size_t r = 0; r < dim; ++r) op.row_ptr_[r + 1] += op.row_ptr_[r];
  return op;
}

void SparseOperator::apply(const StateVector& x, StateVector& y) const {
  const std::size_t n = dim();
  if (static_cast<std::size_t>(x.size()) != n)
    throw std::invalid_argument("SparseOperator::apply: dimension mismatch");
  y.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    cplx acc = 0.0;
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      acc += val_[k] * x[col_[k]];
    y[r] = acc;
  }
}

StateVector SparseOperator::apply(const StateVector& x) const {
  StateVector y;
  apply(x, y);
  return y;
}

Eigen::MatrixXd SparseOperator::dense() const {
  const std::size_t n = dim();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      m(r, col_[k]) += val_[k];
  return m;
}

double SparseOperator::hermiticity_defect() const {
  const std::size_t n = dim();
  double worst = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const std::size_t c = col_[k];
      double vt = 0.0;
      for (std::size_t k2 = row_ptr_[c]; k2 < row_ptr_[c + 1]; ++k2)
        if (col_[k2] == r) vt = val_[k2];
      worst = std::max(worst, std::abs(val_[k] - vt));
    }
  }
  return worst;
}

SparseOperator build_pxp(const ConstrainedBasis& basis, const ModelParams& p) {
  ModelParams p0 = p;
  p0.h = 0.0;
  std::vector<std::tuple<std::size_t, std::size_t, double>> trip;
  for (std::size_t r = 0; r < basis.dim(); ++r)
    for_each_element(basis, p0, r,
                     [&](std::size_t c, double v) { trip.emplace_back(r, c, v); });
  return SparseOperator::from_triplets(basis.dim(), std::move(trip));
}

SparseOperator build_deformed(const ConstrainedBasis& basis,
                              const ModelParams& p) {
  if (basis.two_s() != 1)
    throw std::invalid_argument("build_deformed: s = 1/2 only");
  if (basis.boundary() != Boundary::periodic)
    throw std::invalid_argument("build_deformed: periodic boundary only");
  std::vector<std::tuple<std::size_t, std::size_t, double>> trip;
  for (std::size_t r = 0; r < basis.dim(); ++r)
    for_each_element(basis, p, r,
                     [&](std::size_t c, double v) { trip.emplace_back(r, c, v); });
  return SparseOperator::from_triplets(basis.dim(), std::move(trip));
}

SparseOperator local_sz(const ConstrainedBasis& basis, int site) {
  if (site < 0 || site >= basis.sites())
    throw std::out_of_range("local_sz: site out of range");
  std::vector<std::tuple<std::size_t, std::size_t, double>> trip;
  trip.reserve(basis.dim());
  for (std::size_t r = 0; r < basis.dim(); ++r)
    trip.emplace_back(r, r, sz_value(basis.two_s(), basis.digit(basis.config(r), site)));
  return SparseOperator::from_triplets(basis.dim(), std::move(trip));
}

void apply_hamiltonian(const ConstrainedBasis& basis, const ModelParams& p,
                       const StateVector& x, StateVector& y) {
  if (static_cast<std::size_t>(x.size()) != basis.dim())
    throw std::invalid_argument("apply_hamiltonian: dimension mismatch");
  y = StateVector::Zero(basis.dim());
  for (std::size_t r = 0; r < basis.dim(); ++r) {
    cplx acc = 0.0;
    for_each_element(basis, p, r,
                     [&](std::size_t c, double v) { acc += v * x[c]; });
    y[r] = acc;
  }
}

}  // namespace scars
