#pragma once

#include "scars/basis.hpp"
#include "scars/ops.hpp"

#include <Eigen/Dense>

#include <array>
#include <complex>

namespace scars {

/// Pre-projection spin-coherent parameters, one (vartheta, varphi) per site.
struct CoherentAngles {
  Eigen::VectorXd vartheta;
  Eigen::VectorXd varphi;
};

/// Per-site angles of the normalized bond-dimension-2 MPS.
struct GaugeAngles {
  Eigen::VectorXd theta;
  Eigen::VectorXd phi;
};

/// Continued-fraction data of the coherent -> MPS gauge transformation.
struct GaugeMap {
  Eigen::VectorXd F;  // |b_i|^2 / |a_i|^2
  Eigen::VectorXd G;  // G_i = 1 + F_i / G_{i+1}, periodic
  Eigen::VectorXd c;  // sqrt(G_i) |a_i|, fixed real positive
};

/// Single-site spin-s coherent state e^{i phi s} e^{i phi S^z} e^{-i theta S^x}|0>,
/// components in the n = 0..2s level basis.
Eigen::VectorXcd coherent_state(double theta, double phi, int two_s);

/// Spin operators in the level basis (n = 0..2s, S^z diag = n - s).
Eigen::MatrixXcd spin_sx(int two_s);
Eigen::MatrixXcd spin_sz(int two_s);

/// P otimes_i |(vartheta_i, varphi_i)>, normalized.
StateVector gutzwiller_state(const ConstrainedBasis& basis,
                             const CoherentAngles& angles);

/// Non-local map (vartheta, varphi) -> (theta, phi); requires cos(vartheta_i/2) != 0.
GaugeAngles gauge_map(const CoherentAngles& angles, GaugeMap* info = nullptr);

/// MPS bond matrices A^n(theta, phi), n = 0..2s (each 2x2).
std::vector<Eigen::Matrix2cd> mps_tensors(double theta, double phi, int two_s);

/// Tr(A_1 ... A_L) amplitudes on the constrained basis (not re-normalized).
StateVector mps_dense(const ConstrainedBasis& basis, const GaugeAngles& angles,
                      int two_s);

/// Exact finite-L squared norm: 1 + prod_j (|x_j|^2 - 1), x_j = <0|(theta_j,phi_j)>.
double mps_norm_squared(const GaugeAngles& angles, int two_s);

struct TransferMatrix {
  Eigen::Matrix4cd T;
  Eigen::Vector4cd eigenvalues;            // sorted by descending magnitude
  Eigen::Matrix4cd right;                  // columns r_i
  Eigen::Matrix4cd left;                   // columns l_i, (l_i|r_j) = delta_ij
};

/// One-site transfer matrix A^dag (x) A with biorthonormal eigendata; does not
/// depend on phi.
TransferMatrix transfer_matrix(double theta, double phi, int two_s);

/// Quadrature of int dtheta dphi mu(theta,phi) A (x) A^dag for s = 1/2;
/// entries are single-site (2x2) operators indexed by the 4-dim bond pair.
using BondOperatorMatrix = std::array<std::array<Eigen::Matrix2cd, 4>, 4>;
BondOperatorMatrix measure_quadrature(int n_theta = 64, int n_phi = 64);

/// Max entrywise deviation of Tr(A_1 ... A_L) (quadrature-averaged projector)
/// from the constrained-space projector on the full 2^L space; s = 1/2.
double identity_resolution_check(int L, int n_theta = 64, int n_phi = 64);

}  // namespace scars
