#pragma once

#include <Eigen/Dense>

namespace scars {

/// Infinite-temperature references in the constrained space (periodic ring).
namespace thermal {

/// Occupation ratio r = (1 + sqrt(1 + 8s)) / (4s).
double occupation_ratio(int two_s);

/// <S^z> per site: -s(-1 + 4s + sqrt(1+8s)) / (1 + 8s + sqrt(1+8s)).
double thermal_sz(int two_s);

/// rho_1 = (1/Z)(|0><0| + (1/(2s(1+r)))(I - |0><0|)), Z = (2+r)/(1+r):
/// uniform counting shares the excited weight evenly among the 2s levels.
Eigen::MatrixXd rho_one(int two_s);

/// -Tr rho_1 log2 rho_1 (bits).
double entropy_one(int two_s);

/// Three-site reduced density matrix for s = 1/2 (diagonal), built by exact
/// environment counting on a ring of env_sites surrounding sites; converged
/// for env_sites ~ 60.
Eigen::MatrixXd rho_three(int env_sites = 60);

/// Number of admissible environment strings of length n whose ends sit next
/// to pattern digits d_left, d_right (s = 1/2). Exact integer count.
unsigned long long environment_count(int n, int d_left, int d_right);

}  // namespace thermal

}  // namespace scars
