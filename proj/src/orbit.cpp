#include "scars/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace scars {

namespace {

constexpr double kPi = std::numbers::pi;

using Vec2 = Eigen::Vector2d;
// returns false when the point sits on a singular line
using Rhs2 = std::function<bool(const Vec2&, Vec2&)>;

// ------------------------------------------------------------ DOPRI5(4)

struct DenseSeg {
  double t0 = 0.0, h = 0.0;
  Vec2 r1 = Vec2::Zero(), r2 = Vec2::Zero(), r3 = Vec2::Zero(),
       r4 = Vec2::Zero(), r5 = Vec2::Zero();
  Vec2 eval(double t) const {
    const double th = (t - t0) / h, th1 = 1.0 - th;
    return r1 + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5)));
  }
};

class Dopri5 {
 public:
  Dopri5(Rhs2 f, double t0, const Vec2& y0, double tol, double h_cap)
      : f_(std::move(f)), t_(t0), y_(y0), tol_(tol), h_cap_(h_cap) {
    if (!f_(y_, k_[0]))
      throw std::runtime_error("Dopri5: start point on a singular line");
    h_ = std::min(h_cap_, 1e-3);
  }

  // One accepted step; false when the step size underflows.
  bool advance() {
    while (true) {
      if (h_ < 1e-13 * (1.0 + std::abs(t_))) return false;
      bool ok = true;
      Vec2 ynew;
      for (int s = 1; s < 7 && ok; ++s) {
        Vec2 ys = y_;
        for (int j = 0; j < s; ++j) ys += (h_ * kA[s][j]) * k_[j];
        if (s == 6) ynew = ys;  // stage 7 sits at the 5th-order solution (FSAL)
        ok = f_(ys, k_[s]);
      }
      if (!ok) {
        h_ *= 0.5;
        ++rejected;
        continue;
      }
      double err = 0.0;
      for (int i = 0; i < 2; ++i) {
        double e = 0.0;
        for (int s = 0; s < 7; ++s) e += kE[s] * k_[s][i];
        const double sc =
            tol_ + tol_ * std::max(std::abs(y_[i]), std::abs(ynew[i]));
        err += (h_ * e / sc) * (h_ * e / sc);
      }
      err = std::sqrt(0.5 * err);
      const double fac =
          std::clamp(0.9 * std::pow(std::max(err, 1e-16), -0.2), 0.2, 5.0);
      if (err > 1.0) {
        h_ *= std::min(fac, 1.0);
        ++rejected;
        continue;
      }
      const Vec2 ydiff = ynew - y_;
      const Vec2 bspl = h_ * k_[0] - ydiff;
      seg_.t0 = t_;
      seg_.h = h_;
      seg_.r1 = y_;
      seg_.r2 = ydiff;
      seg_.r3 = bspl;
      seg_.r4 = ydiff - h_ * k_[6] - bspl;
      seg_.r5 = Vec2::Zero();
      for (int s = 0; s < 7; ++s) seg_.r5 += (h_ * kD[s]) * k_[s];
      k_[0] = k_[6];
      y_ = ynew;
      t_ += h_;
      h_ = std::min(h_ * fac, h_cap_);
      ++accepted;
      return true;
    }
  }

  void reset(double t, const Vec2& y) {
    t_ = t;
    y_ = y;
    if (!f_(y_, k_[0]))
      throw std::runtime_error("Dopri5: reset onto a singular line");
  }

  double t() const { return t_; }
  const Vec2& y() const { return y_; }
  const DenseSeg& seg() const { return seg_; }
  long accepted = 0, rejected = 0;

 private:
  static constexpr double kA[7][6] = {
      {},
      {1.0 / 5},
      {3.0 / 40, 9.0 / 40},
      {44.0 / 45, -56.0 / 15, 32.0 / 9},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176,
       -5103.0 / 18656},
      {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
  static constexpr double kE[7] = {71.0 / 57600,      0.0,
                                   -71.0 / 16695,     71.0 / 1920,
                                   -17253.0 / 339200, 22.0 / 525,
                                   -1.0 / 40};
  static constexpr double kD[7] = {-12715105075.0 / 11282082432.0,
                                   0.0,
                                   87487479700.0 / 32700410799.0,
                                   -10690763975.0 / 1880347072.0,
                                   701980252875.0 / 199316789632.0,
                                   -1453857185.0 / 822651844.0,
                                   69997945.0 / 29380423.0};

  Rhs2 f_;
  double t_, tol_, h_cap_, h_ = 1e-3;
  Vec2 y_;
  Vec2 k_[7];
  DenseSeg seg_;
};

// ------------------------------------------------- corner-bridged driver
//
// The lines theta = +-pi are coordinate singularities of the two-angle flow.
// Near a transversal crossing, with u the (signed) distance of the singular
// angle from the line and v the partner angle, the flow reduces to
//   u' = -a,   v' = beta u^{2s} + c v / u,
// whose unique bounded solution is v = alpha u^{2s+1} with
// alpha = -beta / (a (2s+1) + c). Trajectories are carried across on that
// branch: u: +delta_c -> -delta_c, v -> alpha(-delta_c)^{2s+1},
// t += 2 delta_c / a.

struct CornerModel {
  double a = 0.0, alpha = 0.0;
};

CornerModel corner_model(const Rhs2& f, int two_s, int j, double pc,
                         double sdir, double vbase, double dc) {
  const int o = 1 - j;
  auto vel = [&](double u, double v) {
    Vec2 y, d;
    y[j] = pc - sdir * u;
    y[o] = vbase + v;
    if (!f(y, d)) throw std::runtime_error("corner_model: singular probe");
    return d;
  };
  const Vec2 d1 = vel(dc, 0.0);
  const double a = sdir * d1[j];
  if (!(a > 0.0))
    throw std::runtime_error("corner_model: crossing is not transversal");
  const double beta = d1[o] / std::pow(dc, two_s);
  const double v0 = 1e-2 * dc;
  const Vec2 d2 = vel(dc, v0);
  const double c = (d2[o] - d1[o]) * dc / v0;
  return {a, -beta / (a * (two_s + 1) + c)};
}

struct BridgeRec {
  int j = 0;  // which angle crossed its singular line
  double pc = 0.0, sdir = 0.0, vbase = 0.0;
  double t_entry = 0.0, t_cross = 0.0, t_exit = 0.0;
  double v_dev = 0.0;  // transverse deviation from the regular branch at entry
  Vec2 y_exit = Vec2::Zero();
};

struct Arc {
  double t0 = 0.0, t1 = 0.0;
  std::vector<DenseSeg> segs;
  Vec2 eval(double t) const {
    auto it = std::upper_bound(
        segs.begin(), segs.end(), t,
        [](double tv, const DenseSeg& s) { return tv < s.t0; });
    if (it != segs.begin()) --it;
    return it->eval(t);
  }
};

struct BridgedRun {
  std::vector<Arc> arcs;
  std::vector<BridgeRec> bridges;
  bool aborted = false;
  long accepted = 0, rejected = 0;
  double t_end = 0.0;
};

// Integrates from (t0, y0); with two_s >= 1 singular-line crossings are
// bridged, and with stop_on_j >= 0 the run ends after bridging that angle.
BridgedRun run_bridged(const Rhs2& f, int two_s, double t0, const Vec2& y0,
                       double t_max, double tol, double dc, double h_cap,
                       int stop_on_j) {
  BridgedRun run;
  Dopri5 st(f, t0, y0, tol, h_cap);
  run.arcs.push_back({t0, t0, {}});
  while (st.t() < t_max) {
    const Vec2 ya = st.y();
    const double ta = st.t();
    if (!st.advance()) {
      run.aborted = true;
      break;
    }
    run.arcs.back().segs.push_back(st.seg());
    run.arcs.back().t1 = st.t();
    if (two_s < 1) continue;

    // singular-line crossing events (earliest within the step wins)
    int ev_j = -1;
    double ev_t = st.t(), ev_pc = 0.0, ev_sdir = 0.0;
    const DenseSeg seg = st.seg();
    for (int j = 0; j < 2; ++j) {
      const double dir = st.y()[j] - ya[j];
      if (dir == 0.0) continue;
      const double sdir = dir > 0 ? 1.0 : -1.0;
      const double pc =
          sdir > 0
              ? 2.0 * kPi * std::ceil((ya[j] - kPi) / (2.0 * kPi)) + kPi
              : 2.0 * kPi * std::floor((ya[j] - kPi) / (2.0 * kPi)) + kPi;
      const double target = pc - sdir * dc;
      if (sdir * (st.y()[j] - target) < 0.0) continue;
      // first time the segment reaches the target: coarse scan, then bisect
      double lo = ta, hi = st.t();
      double glo = sdir * (seg.eval(lo)[j] - target);
      if (glo >= 0.0) {
        hi = lo;
      } else {
        const int nscan = 64;
        for (int q = 1; q <= nscan; ++q) {
          const double tq = ta + (st.t() - ta) * q / nscan;
          const double gq = sdir * (seg.eval(tq)[j] - target);
          if (gq >= 0.0) {
            hi = tq;
            break;
          }
          lo = tq;
        }
        for (int it = 0; it < 80; ++it) {
          const double mid = 0.5 * (lo + hi);
          if (sdir * (seg.eval(mid)[j] - target) < 0.0)
            lo = mid;
          else
            hi = mid;
        }
      }
      if (hi < ev_t) {
        ev_t = hi;
        ev_j = j;
        ev_pc = pc;
        ev_sdir = sdir;
      }
    }
    if (ev_j < 0) continue;

    const Vec2 ye = seg.eval(ev_t);
    run.arcs.back().t1 = ev_t;
    const int o = 1 - ev_j;
    const double vbase = 2.0 * kPi * std::round(ye[o] / (2.0 * kPi));
    const CornerModel cm =
        corner_model(f, two_s, ev_j, ev_pc, ev_sdir, vbase, dc);
    BridgeRec br;
    br.j = ev_j;
    br.pc = ev_pc;
    br.sdir = ev_sdir;
    br.vbase = vbase;
    br.t_entry = ev_t;
    br.t_cross = ev_t + dc / cm.a;
    br.t_exit = ev_t + 2.0 * dc / cm.a;
    br.v_dev = (ye[o] - vbase) - cm.alpha * std::pow(dc, two_s + 1);
    br.y_exit[ev_j] = ev_pc + ev_sdir * dc;
    br.y_exit[o] = vbase + cm.alpha * std::pow(-dc, two_s + 1);
    run.bridges.push_back(br);
    if (stop_on_j == ev_j) {
      run.t_end = br.t_exit;
      run.accepted = st.accepted;
      run.rejected = st.rejected;
      return run;
    }
    st.reset(br.t_exit, br.y_exit);
    run.arcs.push_back({br.t_exit, br.t_exit, {}});
  }
  run.t_end = st.t();
  run.accepted = st.accepted;
  run.rejected = st.rejected;
  return run;
}

AnglePoint wrap_point(const Vec2& y) {
  AnglePoint p;
  p.theta_e = wrap_angle(y[0]);
  p.theta_o = wrap_angle(y[1]);
  return p;
}

// ------------------------------------------------------------ Z2 orbit

OrbitResult orbit_core(int two_s, double omega, double h, double tol,
                       double dc, double t_max, bool want_monodromy,
                       bool want_samples) {
  OrbitResult res;
  res.delta_c = dc;
  const bool deformed = (h != 0.0);
  if (deformed && two_s != 1)
    throw std::invalid_argument(
        "find_orbit: the deformed flow is defined for s = 1/2 only");

  Rhs2 f = [=](const Vec2& y, Vec2& dy) {
    const AnglePoint p = wrap_point(y);
    const Velocity v =
        deformed ? eom_rhs_deformed(p, omega, h) : eom_rhs(p, two_s, omega);
    if (v.singular) return false;
    dy[0] = v.d_theta_e;
    dy[1] = v.d_theta_o;
    return true;
  };
  auto gamma_at = [&](const Vec2& y) {
    const AnglePoint p = wrap_point(y);
    try {
      return deformed ? gamma_deformed(p, omega, h) : gamma(p, two_s, omega);
    } catch (const std::exception&) {
      return 0.0;  // degenerate-transfer window; gamma -> 0 there
    }
  };

  // launch on the regular branch leaving the |Z2> corner (pi, 0); t = 0 is
  // the crossing itself, so bridge t_cross values are orbit phases directly
  const CornerModel c0 = corner_model(f, two_s, 0, kPi, 1.0, 0.0, dc);
  Vec2 y0;
  y0[0] = kPi + dc;
  y0[1] = c0.alpha * std::pow(-dc, two_s + 1);
  const double t0 = dc / c0.a;
  const BridgedRun run =
      run_bridged(f, two_s, t0, y0, t_max, tol, dc, 0.5 / omega, 0);
  if (run.aborted || run.bridges.empty() || run.bridges.back().j != 0) {
    res.found = false;
    return res;
  }
  const BridgeRec& ret = run.bridges.back();
  res.period = ret.t_cross;
  // The transverse deviation grows as u^{-2s} on the approach, so the raw
  // mismatch at u = delta_c is the deviation at the reference distance
  // u_ref amplified by (u_ref/delta_c)^{2s}; undo that to get a closure
  // measure that is independent of delta_c.
  const double u_ref = 0.1;
  res.closure = std::abs(ret.v_dev) * std::pow(dc / u_ref, two_s);
  res.found = res.closure < 1e-6;

  // gamma quadrature: composite Simpson per arc (gamma has a conical zero at
  // each corner, so arcs are the smooth pieces), plus the bridge windows and
  // the launch half-window evaluated at the corner points
  const int nq = deformed ? 256 : 512;
  double eps = 0.0, fc = 0.0;
  for (const Arc& arc : run.arcs) {
    const double hh = (arc.t1 - arc.t0) / nq;
    for (int i = 0; i <= nq; ++i) {
      const double w = (i == 0 || i == nq) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      const double g = gamma_at(arc.eval(arc.t0 + i * hh));
      eps += w * g * hh / 3.0;
      fc += w * g * g * hh / 3.0;
    }
  }
  {
    Vec2 yc;
    yc[0] = kPi;
    yc[1] = 0.0;
    const double g = gamma_at(yc);
    eps += g * t0;  // launch half-window [0, delta_c / a]
    fc += g * g * t0;
    for (const BridgeRec& br : run.bridges) {
      Vec2 yb;
      yb[br.j] = br.pc;
      yb[1 - br.j] = br.vbase;
      const double gb = gamma_at(yb);
      // the closing bridge contributes only its entry half [t_entry, t_cross]
      const double dt = (&br == &ret) ? br.t_cross - br.t_entry
                                      : br.t_exit - br.t_entry;
      eps += gb * dt;
      fc += gb * gb * dt;
    }
  }
  res.eps_c = eps;
  res.f_c = fc;

  if (want_samples) {
    const int ns = 1024;
    for (const Arc& arc : run.arcs) {
      const int na = std::max(
          2, static_cast<int>(ns * (arc.t1 - arc.t0) / res.period));
      for (int i = 0; i < na; ++i) {
        const double t = arc.t0 + (arc.t1 - arc.t0) * i / na;
        TrajectorySample s;
        s.t = t;
        const Vec2 y = arc.eval(t);
        s.p = wrap_point(y);
        Vec2 dy;
        if (f(y, dy)) {
          s.v.d_theta_e = dy[0];
          s.v.d_theta_o = dy[1];
        } else {
          s.v.singular = true;
        }
        res.samples.push_back(s);
      }
    }
  }

  if (want_monodromy) {
    // tangent flow along the arcs; across a corner the transverse family
    // v = K u^{-2s} carries K over with sign (-1)^{2s} (matched branches)
    auto jac = [&](const Vec2& y) {
      Eigen::Matrix2d A;
      const double e = 1e-6;
      for (int c = 0; c < 2; ++c) {
        Vec2 yp = y, ym = y, dp, dm;
        yp[c] += e;
        ym[c] -= e;
        if (!f(yp, dp) || !f(ym, dm)) {
          dp.setZero();
          dm.setZero();
        }
        A.col(c) = (dp - dm) / (2.0 * e);
      }
      return A;
    };
    const double cflip = (two_s % 2) ? -1.0 : 1.0;
    // Inside a layer u < u_m around each corner the tangent flow is stiff
    // (c v / u); there the transverse perturbation is carried by the mode
    // K u^{-2s}, whose in/out amplifications cancel across the corner up to
    // the sign (-1)^{2s}. So integrate the tangent flow only between the
    // layer boundaries and apply the sign at the joints.
    const double u_m = 0.02;
    auto layer_time = [&](const Arc& arc, int j, double pc, bool from_start) {
      auto dist = [&](double t) { return std::abs(arc.eval(t)[j] - pc); };
      const int nscan = 256;
      double lo = from_start ? arc.t0 : arc.t1;
      double hi = lo;
      const double step = (from_start ? 1.0 : -1.0) * (arc.t1 - arc.t0) / nscan;
      for (int q = 1; q <= nscan; ++q) {
        hi = lo + step;
        if (dist(hi) >= u_m) break;
        lo = hi;
      }
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (dist(mid) < u_m)
          lo = mid;
        else
          hi = mid;
      }
      return 0.5 * (lo + hi);
    };
    Eigen::Matrix2d M = Eigen::Matrix2d::Identity();
    for (std::size_t i = 0; i < run.arcs.size(); ++i) {
      const Arc& arc = run.arcs[i];
      const int j0 = (i == 0) ? 0 : run.bridges[i - 1].j;
      const double pc0 = (i == 0) ? kPi : run.bridges[i - 1].pc;
      const double ta = layer_time(arc, j0, pc0, true);
      const double tb =
          layer_time(arc, run.bridges[i].j, run.bridges[i].pc, false);
      const int n = 4000;
      const double hh = (tb - ta) / n;
      for (int q = 0; q < n; ++q) {
        const double t = ta + q * hh;
        const Eigen::Matrix2d A1 = jac(arc.eval(t));
        const Eigen::Matrix2d A2 = jac(arc.eval(t + 0.5 * hh));
        const Eigen::Matrix2d A4 = jac(arc.eval(t + hh));
        const Eigen::Matrix2d K1 = A1 * M;
        const Eigen::Matrix2d K2 = A2 * (M + 0.5 * hh * K1);
        const Eigen::Matrix2d K3 = A2 * (M + 0.5 * hh * K2);
        const Eigen::Matrix2d K4 = A4 * (M + hh * K3);
        M += (hh / 6.0) * (K1 + 2.0 * K2 + 2.0 * K3 + K4);
      }
      Eigen::Matrix2d C = Eigen::Matrix2d::Identity();
      C(1 - run.bridges[i].j, 1 - run.bridges[i].j) = cflip;
      M = C * M;
    }
    res.monodromy_eigs = Eigen::EigenSolver<Eigen::Matrix2d>(M).eigenvalues();
  }
  return res;
}

// -------------------------------------------------------- |0>-orbit (s >= 1)

// On the diagonal theta_e = theta_o = theta the flow reduces to the regular
// 1d ODE theta' = g(theta); the orbit is the full circle theta: 0 -> 2 pi.
OrbitResult zero_orbit(int two_s, double omega, bool want_samples) {
  OrbitResult res;
  res.delta_c = 0.0;
  if (two_s < 2) {
    res.found = false;  // s = 1/2: (pi, pi) is a fixed point, no closed orbit
    return res;
  }
  auto gvel = [&](double th) {
    const double c = std::cos(0.5 * th);
    return omega * (1.0 - std::pow(c, 2.0 * two_s - 2.0) +
                    std::pow(c, 3.0 * two_s - 2.0) *
                        (1.0 + two_s * (1.0 - c * c)));
  };
  auto gamma_diag = [&](double th) {
    AnglePoint p;
    p.theta_e = wrap_angle(th);
    p.theta_o = p.theta_e;
    try {
      return gamma(p, two_s, omega);
    } catch (const std::exception&) {
      return 0.0;  // degenerate-transfer window around (pi, pi)
    }
  };

  const int n = 8192;  // even
  const double dth = 2.0 * kPi / n;
  std::vector<double> inv_g(n + 1), gam(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double th = i * dth;
    inv_g[i] = 1.0 / gvel(th);
    gam[i] = gamma_diag(th);
  }
  double T = 0.0, eps = 0.0, fc = 0.0;
  std::vector<double> tcum(n / 2 + 1, 0.0);
  for (int i = 0; i + 2 <= n; i += 2) {
    const double w0 = dth / 3.0;
    T += w0 * (inv_g[i] + 4.0 * inv_g[i + 1] + inv_g[i + 2]);
    eps += w0 * (gam[i] * inv_g[i] + 4.0 * gam[i + 1] * inv_g[i + 1] +
                 gam[i + 2] * inv_g[i + 2]);
    fc += w0 * (gam[i] * gam[i] * inv_g[i] +
                4.0 * gam[i + 1] * gam[i + 1] * inv_g[i + 1] +
                gam[i + 2] * gam[i + 2] * inv_g[i + 2]);
    tcum[i / 2 + 1] = T;
  }
  res.period = T;
  res.eps_c = eps;
  res.f_c = fc;
  res.closure = 0.0;
  res.found = true;
  if (want_samples) {
    for (int q = 0; q <= n / 2; q += 8) {
      TrajectorySample s;
      s.t = tcum[q];
      const double th = 2 * q * dth;
      s.p.theta_e = wrap_angle(th);
      s.p.theta_o = s.p.theta_e;
      s.v.d_theta_e = gvel(th);
      s.v.d_theta_o = s.v.d_theta_e;
      res.samples.push_back(s);
    }
  }
  return res;
}

}  // namespace

Trajectory integrate(const FlowRhs& rhs, const AnglePoint& start, double t_max,
                     double tol, double sample_dt, int corner_two_s) {
  Rhs2 f = [&rhs](const Vec2& y, Vec2& dy) {
    const Velocity v = rhs(wrap_point(y));
    if (v.singular) return false;
    dy[0] = v.d_theta_e;
    dy[1] = v.d_theta_o;
    return true;
  };
  Vec2 y0;
  y0[0] = start.theta_e;
  y0[1] = start.theta_o;
  Trajectory traj;
  BridgedRun run;
  try {
    run = run_bridged(f, corner_two_s, 0.0, y0, t_max, tol, 1e-5, 0.5, -1);
  } catch (const std::exception&) {
    traj.aborted = true;
    return traj;
  }
  traj.aborted = run.aborted;
  traj.steps_accepted = static_cast<int>(run.accepted);
  traj.steps_rejected = static_cast<int>(run.rejected);
  auto push = [&](const Arc& arc, double t) {
    TrajectorySample s;
    s.t = t;
    const Vec2 y = arc.eval(t);
    s.p = wrap_point(y);
    Vec2 dy;
    if (f(y, dy)) {
      s.v.d_theta_e = dy[0];
      s.v.d_theta_o = dy[1];
    } else {
      s.v.singular = true;
    }
    traj.samples.push_back(s);
  };
  // the last accepted step may overshoot t_max; clamp via the dense output
  const double t_last = std::min(run.t_end, t_max);
  if (sample_dt > 0.0) {
    std::size_t a = 0;
    for (double t = 0.0; t <= t_last + 1e-12; t += sample_dt) {
      while (a < run.arcs.size() && run.arcs[a].t1 < t) ++a;
      if (a >= run.arcs.size()) break;
      if (t < run.arcs[a].t0) continue;  // inside a bridge window
      push(run.arcs[a], t);
    }
  } else {
    for (const Arc& arc : run.arcs) {
      if (arc.t0 > t_last) break;
      for (const DenseSeg& seg : arc.segs) {
        if (seg.t0 > t_last) break;
        push(arc, seg.t0);
      }
      if (!arc.segs.empty()) push(arc, std::min(arc.t1, t_last));
    }
  }
  return traj;
}

OrbitResult find_orbit(int two_s, double omega, double h, bool from_zero,
                       double tol, double delta_c, double t_max) {
  if (two_s < 1) throw std::invalid_argument("find_orbit: need 2s >= 1");
  if (omega <= 0.0) throw std::invalid_argument("find_orbit: need omega > 0");
  if (from_zero) {
    if (h != 0.0)
      throw std::invalid_argument("find_orbit: from_zero requires h = 0");
    return zero_orbit(two_s, omega, true);
  }
  return orbit_core(two_s, omega, h, tol, delta_c, t_max, true, true);
}

std::vector<HScanRow> scan_h(const std::vector<double>& h_grid, double omega) {
  std::vector<HScanRow> rows;
  rows.reserve(h_grid.size());
  for (double h : h_grid) {
    HScanRow r;
    r.h = h;
    try {
      const OrbitResult o =
          orbit_core(1, omega, h, 1e-10, 1e-5, 50.0 / omega, false, false);
      r.period = o.period;
      r.eps_c = o.eps_c;
      r.f_c = o.f_c;
      r.found = o.found;
    } catch (const std::exception&) {
      r.found = false;
    }
    rows.push_back(r);
  }
  return rows;
}

std::vector<FlowGridNode> flow_grid(int two_s, double omega, double h, int n) {
  if (n < 2) throw std::invalid_argument("flow_grid: need n >= 2");
  const bool deformed = (h != 0.0);
  if (deformed && two_s != 1)
    throw std::invalid_argument("flow_grid: deformation is s = 1/2 only");
  std::vector<FlowGridNode> nodes;
  nodes.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      FlowGridNode node;
      node.p.theta_e = -kPi + 2.0 * kPi * i / n;
      node.p.theta_o = -kPi + 2.0 * kPi * j / n;
      node.v = deformed ? eom_rhs_deformed(node.p, omega, h)
                        : eom_rhs(node.p, two_s, omega);
      node.singular = node.v.singular;
      if (!node.singular) {
        try {
          node.gamma = deformed ? gamma_deformed(node.p, omega, h)
                                : gamma(node.p, two_s, omega);
        } catch (const std::exception&) {
          node.singular = true;
        }
      }
      nodes.push_back(node);
    }
  }
  return nodes;
}

}  // namespace scars
