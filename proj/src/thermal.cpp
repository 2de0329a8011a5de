#include "scars/thermal.hpp"

#include <cmath>
#include <stdexcept>

namespace scars {
namespace thermal {

double occupation_ratio(int two_s) {
  const double s = 0.5 * two_s;
  return (1.0 + std::sqrt(1.0 + 8.0 * s)) / (4.0 * s);
}

double thermal_sz(int two_s) {
  if (two_s < 1) throw std::invalid_argument("thermal_sz: need 2s >= 1");
  const double s = 0.5 * two_s;
  const double q = std::sqrt(1.0 + 8.0 * s);
  return -s * (-1.0 + 4.0 * s + q) / (1.0 + 8.0 * s + q);
}

Eigen::MatrixXd rho_one(int two_s) {
  const double r = occupation_ratio(two_s);
  const double z = (2.0 + r) / (1.0 + r);
  const int q = two_s + 1;
  // uniform counting weights every admissible configuration equally, so the
  // total excited weight 1/(1+r) is shared evenly among the 2s excited
  // levels; for s = 1/2 this is the familiar diag(1, 1/(1+r)) / Z
  Eigen::MatrixXd rho =
      Eigen::MatrixXd::Identity(q, q) / ((1.0 + r) * two_s);
  rho(0, 0) = 1.0;
  return rho / z;
}

double entropy_one(int two_s) {
  Eigen::MatrixXd rho = rho_one(two_s);
  double s = 0.0;
  for (int i = 0; i < rho.rows(); ++i)
    if (rho(i, i) > 0) s -= rho(i, i) * std::log2(rho(i, i));
  return s;
}

unsigned long long environment_count(int n, int d_left, int d_right) {
  if (n < 1) throw std::invalid_argument("environment_count: need n >= 1");
  // number of admissible length-n strings e with e_0 next to d_left and
  // e_{n-1} next to d_right: blocked end values are forced to 0
  // M[a][b]: a followed by b allowed
  unsigned long long v0[2] = {1ull, d_left == 0 ? 1ull : 0ull};
  for (int step = 1; step < n; ++step) {
    unsigned long long nxt[2] = {v0[0] + v0[1], v0[0]};
    v0[0] = nxt[0];
    v0[1] = nxt[1];
  }
  return v0[0] + (d_right == 0 ? v0[1] : 0ull);
}

Eigen::MatrixXd rho_three(int env_sites) {
  if (env_sites < 3 || env_sites > 85)
    throw std::invalid_argument("rho_three: env_sites out of integer range");
  Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(8, 8);
  double total = 0.0;
  for (int p = 0; p < 8; ++p) {
    const int d0 = (p >> 2) & 1, d1 = (p >> 1) & 1, d2 = p & 1;
    if ((d0 && d1) || (d1 && d2)) continue;
    // ring: environment ends sit next to pattern sites 2 (left end) and 0
    const double w =
        static_cast<double>(environment_count(env_sites, d2, d0));
    rho(p, p) = w;
    total += w;
  }
  return rho / total;
}

}  // namespace thermal
}  // namespace scars
