#pragma once

#include "scars/basis.hpp"
#include "scars/ops.hpp"

#include <string>
#include <vector>

namespace scars {

enum class Pattern { all_zero, z2, z2_prime };

StateVector product_state(const ConstrainedBasis& basis, Pattern p);
StateVector product_state(const ConstrainedBasis& basis,
                          const std::vector<int>& levels);

/// One step of exp(-i H dt) by a Lanczos/Krylov propagator (subspace <= 30,
/// full reorthogonalization, per-step residual target 1e-10; substeps as
/// needed). Units: H carries Omega, t in 1/Omega.
StateVector evolve(const SparseOperator& H, const StateVector& psi, double dt);

/// Dense-expm reference propagator; dim <= 4000.
StateVector evolve_dense(const SparseOperator& H, const StateVector& psi,
                         double dt);

/// von Neumann entropy (bits) of the contiguous region [a0, a0+len) of a
/// (periodic or open) constrained chain state.
double entanglement_entropy(const ConstrainedBasis& basis,
                            const StateVector& psi, int a0, int len);

struct QuenchSeries {
  std::vector<double> t;
  std::vector<std::vector<double>> sz;       // [time][site]
  std::vector<double> fidelity;              // |<psi0|psi(t)>|^2
  std::vector<std::vector<double>> entropy;  // [time][cut]
  std::vector<int> cuts;                     // region lengths, anchored at 0
};

QuenchSeries quench_series(const ConstrainedBasis& basis,
                           const SparseOperator& H, const StateVector& psi0,
                           double t_max, double dt_out,
                           const std::vector<int>& cuts);

void write_csv(const QuenchSeries& qs, const std::string& path);

}  // namespace scars
