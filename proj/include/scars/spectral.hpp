#pragma once

#include "scars/basis.hpp"
#include "scars/ops.hpp"

#include <Eigen/Dense>

namespace scars {

struct SpectralData {
  int k = 0;
  int parity = +1;
  Eigen::VectorXd eigenvalues;  // ascending
  double r = 0.0;               // mean gap-ratio statistic
};

/// Dense Hamiltonian in the symmetry-adapted sector basis.
Eigen::MatrixXd sector_matrix(const ConstrainedBasis& basis,
                              const SymmetrySector& sector,
                              const SparseOperator& op);

SpectralData diagonalize_sector(const ConstrainedBasis& basis,
                                const SymmetrySector& sector,
                                const SparseOperator& op,
                                std::size_t dense_cap = 20000);

/// Mean of min(s_n, s_{n-1})/max(s_n, s_{n-1}) after collapsing degeneracies
/// (gap < 1e-10 * spectral width). Requires >= 3 distinct levels.
double r_statistic(const Eigen::VectorXd& eigenvalues);

/// Lift a sector-basis vector back into the full constrained space.
StateVector lift(const SymmetrySector& sector, std::size_t full_dim,
                 const Eigen::VectorXd& coeffs);

}  // namespace scars
