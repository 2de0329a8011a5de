#pragma once

#include "scars/basis.hpp"

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace scars {

using cplx = std::complex<double>;
using StateVector = Eigen::VectorXcd;

struct ModelParams {
  double omega = 1.0;  // overall energy scale
  double h = 0.0;      // deformation strength, Pauli-ratio units (s = 1/2)
};

/// Hermitian sparse operator on a ConstrainedBasis, stored row-compressed.
class SparseOperator {
public:
  SparseOperator() = default;
  explicit SparseOperator(std::size_t dim);

  std::size_t dim() const { return row_ptr_.empty() ? 0 : row_ptr_.size() - 1; }
  std::size_t nonzeros() const { return col_.size(); }

  void apply(const StateVector& x, StateVector& y) const;
  StateVector apply(const StateVector& x) const;

  Eigen::MatrixXd dense() const;

  const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
  const std::vector<std::size_t>& cols() const { return col_; }
  const std::vector<double>& values() const { return val_; }

  /// max |A - A^T| over stored entries (structure assumed symmetric).
  double hermiticity_defect() const;

  /// Build from unsorted triplets; duplicate (r,c) values are summed.
  static SparseOperator from_triplets(
      std::size_t dim,
      std::vector<std::tuple<std::size_t, std::size_t, double>> triplets);

private:
  std::vector<std::size_t> row_ptr_;
  std::vector<std::size_t> col_;
  std::vector<double> val_;
};

/// H = Omega * sum_i P_{i-1} S^x_i P_{i+1} on the constrained space.
SparseOperator build_pxp(const ConstrainedBasis& basis, const ModelParams& p);

/// PXP minus 2h * sum_i (P S^x P S^z_{i+2} + S^z_{i-2} P S^x P); s = 1/2,
/// periodic boundary only. h is the deformation-to-PXP ratio in Pauli-matrix
/// normalization, with the sign fixed so that h > 0 enhances the |Z2>
/// revivals; this is the exact counterpart of the deformed flow equations.
SparseOperator build_deformed(const ConstrainedBasis& basis,
                              const ModelParams& p);

/// Diagonal S^z at one site (entries n_i - s).
SparseOperator local_sz(const ConstrainedBasis& basis, int site);

/// Matrix-free application of the (possibly deformed) Hamiltonian; produces
/// the same vector as the sparse operator without storing it.
void apply_hamiltonian(const ConstrainedBasis& basis, const ModelParams& p,
                       const StateVector& x, StateVector& y);

}  // namespace scars
