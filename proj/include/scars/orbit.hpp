#pragma once

#include "scars/flow.hpp"

#include <functional>
#include <vector>

namespace scars {

using FlowRhs = std::function<Velocity(const AnglePoint&)>;

struct TrajectorySample {
  double t = 0.0;
  AnglePoint p;
  Velocity v;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  int steps_accepted = 0;
  int steps_rejected = 0;
  bool aborted = false;  // step-size underflow near a singular line
};

/// Adaptive Dormand-Prince 5(4) on the torus with dense output. With
/// corner_two_s > 0 the integrator carries trajectories across the
/// coordinate-singular lines theta = +-pi on the regular branch
/// v = alpha u^{2s+1} (corner bridging); otherwise it aborts there.
Trajectory integrate(const FlowRhs& rhs, const AnglePoint& start, double t_max,
                     double tol = 1e-10, double sample_dt = 0.0,
                     int corner_two_s = 0);

struct OrbitResult {
  double period = 0.0;
  double eps_c = 0.0;       // closed-path integral of gamma
  double f_c = 0.0;         // closed-path integral of gamma^2
  double closure = 0.0;     // transverse return deviation at u = 0.1 from
                            // the corner (corner amplification removed)
  double delta_c = 1e-5;    // corner-bridging radius used
  std::vector<TrajectorySample> samples;  // one period, corner-bridged
  Eigen::Vector2cd monodromy_eigs;
  bool found = false;
};

/// Periodic orbit through the Z2 corner (pi, 0) (or the diagonal |0>-orbit
/// when from_zero is set, s >= 1). gamma along the orbit uses the closed form
/// for h = 0 and the numeric channel evaluator for h != 0.
OrbitResult find_orbit(int two_s, double omega, double h = 0.0,
                       bool from_zero = false, double tol = 1e-10,
                       double delta_c = 1e-5, double t_max = 50.0);

struct HScanRow {
  double h = 0.0;
  double period = 0.0;
  double eps_c = 0.0;
  double f_c = 0.0;
  bool found = false;
};

std::vector<HScanRow> scan_h(const std::vector<double>& h_grid, double omega);

struct FlowGridNode {
  AnglePoint p;
  Velocity v;
  double gamma = 0.0;
  bool singular = false;
};

std::vector<FlowGridNode> flow_grid(int two_s, double omega, double h, int n);

}  // namespace scars
