#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace scars {

/// Two-site variational coordinates on the torus [-pi, pi)^2.
struct AnglePoint {
  double theta_e = 0.0;
  double theta_o = 0.0;
  double phi_e = 0.0;
  double phi_o = 0.0;
};

double wrap_angle(double a);  // into [-pi, pi)

struct Velocity {
  double d_theta_e = 0.0;
  double d_theta_o = 0.0;
  bool singular = false;
};

/// TDVP velocities (theta_dot_e, theta_dot_o) at phi = 0. Evaluated in the
/// multiplied-through form; at corners the continuous limit along the
/// coordinate axes is returned.
Velocity eom_rhs(const AnglePoint& p, int two_s, double omega);

/// Deformed-model velocities (s = 1/2); the exact variational flow of
/// build_deformed with the same Pauli-ratio h. h = 0 reduces to eom_rhs.
Velocity eom_rhs_deformed(const AnglePoint& p, double omega, double h);

struct GramDiag {
  double oo = 0.0;  // per-cell <d_theta_o psi | d_theta_o psi>
  double ee = 0.0;
};

/// Per-unit-cell diagonal Gram entries. With x = cos^{2s}(theta/2) and
/// D = |x_o|^2 + |x_e|^2 - |x_o|^2 |x_e|^2:
///   G_oo = (s/2) |x_e|^2 / D,  G_ee = (s/2) |x_o|^2 / D,  G_oe = 0.
/// (The |x|^2 factors are required to match the dense finite-L metric; the
/// symmetric form without them fails the tangent-vector oracle.)
GramDiag gram_diag(const AnglePoint& p, int two_s);

/// Energy per site (closed form; proportional to sin phi).
double energy_density(const AnglePoint& p, int two_s, double omega);

/// <H^2> per site at phi = 0, from the analytic two-site transfer eigensystem.
double h_squared(const AnglePoint& p, int two_s, double omega);

/// Leakage rate gamma = sqrt(max(0, <H^2>/L - theta_dot^T G theta_dot / L)).
double gamma(const AnglePoint& p, int two_s, double omega);

/// A translation-invariant operator density as a sum of finite strings of
/// single-site operators (offsets relative to the anchor site i).
struct OpString {
  std::vector<Eigen::MatrixXcd> ops;  // ops[k] acts at site i + offset0 + k
  int offset0 = 0;
  double coeff = 1.0;
};

struct UmpsDensities {
  double energy = 0.0;        // <h> per site
  double h2_connected = 0.0;  // sum_d <h_0 h_d> - <h_0><h_d>, per site
  GramDiag gram;              // per-unit-cell diagonal Gram entries
  double dyn_o = 0.0;         // per-cell Im <d_theta psi| H - <H> |psi>
  double dyn_e = 0.0;
};

/// Generic numeric uniform-MPS channel evaluator on the two-site unit cell
/// (numeric transfer eigensolve + deflated geometric sums). Independent of
/// the closed forms above.
UmpsDensities umps_density(const AnglePoint& p, int two_s,
                           const std::vector<OpString>& density);

/// Hamiltonian densities as operator strings (anchor = the S^x site).
std::vector<OpString> pxp_density(int two_s, double omega);
std::vector<OpString> deformed_density(double omega, double h);

/// gamma for the deformed model via the numeric channel evaluator.
double gamma_deformed(const AnglePoint& p, double omega, double h);

/// Full-chain Lagrangian (s = 1/2, thermodynamic-limit K_i series) and the
/// two-site closed form.
double lagrangian(const Eigen::VectorXd& theta, const Eigen::VectorXd& phi,
                  const Eigen::VectorXd& phi_dot, double omega);
double k_factor(const Eigen::VectorXd& theta, int i);
double lagrangian_two_site(const AnglePoint& p, double dphi_e, double dphi_o,
                           double omega);
double k_factor_two_site(double theta_self, double theta_other);

struct FixedPoint {
  AnglePoint p;
  Eigen::Vector2cd jacobian_eigs;
  std::string kind;  // "saddle", "center", "node"
};

/// Roots of the phi = 0 flow by damped Newton from a seed grid.
std::vector<FixedPoint> fixed_points(int two_s, double omega, double h = 0.0);

}  // namespace scars
