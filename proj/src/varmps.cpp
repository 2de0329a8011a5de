#include "scars/varmps.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace scars {

namespace {

double binom(int n, int k) {
  double v = 1.0;
  for (int i = 1; i <= k; ++i) v *= static_cast<double>(n - k + i) / i;
  return v;
}

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (t * p1 - p0) / (t * t - 1.0);
      double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    double p0 = 1.0, p1 = t;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = n * (t * p1 - p0) / (t * t - 1.0);
    x[i] = t;
    w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

Eigen::VectorXcd coherent_state(double theta, double phi, int two_s) {
  // e^{i phi s} e^{i phi S^z} e^{-i theta S^x} |0>, level components
  // n -> sqrt(C(2s,n)) cos^{2s-n}(theta/2) (-i e^{i phi} sin(theta/2))^n
  Eigen::VectorXcd v(two_s + 1);
  const cplx f = cplx(0.0, -1.0) * std::exp(cplx(0.0, phi)) *
                 std::sin(0.5 * theta);
  for (int n = 0; n <= two_s; ++n)
    v[n] = std::sqrt(binom(two_s, n)) *
           std::pow(std::cos(0.5 * theta), two_s - n) * std::pow(f, n);
  return v;
}

Eigen::MatrixXcd spin_sx(int two_s) {
  const double s = 0.5 * two_s;
  Eigen::MatrixXcd sx = Eigen::MatrixXcd::Zero(two_s + 1, two_s + 1);
  for (int n = 0; n < two_s; ++n) {
    const double m = n - s;
    const double v = 0.5 * std::sqrt(s * (s + 1) - m * (m + 1));
    sx(n, n + 1) = sx(n + 1, n) = v;
  }
  return sx;
}

Eigen::MatrixXcd spin_sz(int two_s) {
  const double s = 0.5 * two_s;
  Eigen::MatrixXcd sz = Eigen::MatrixXcd::Zero(two_s + 1, two_s + 1);
  for (int n = 0; n <= two_s; ++n) sz(n, n) = n - s;
  return sz;
}

StateVector gutzwiller_state(const ConstrainedBasis& basis,
                             const CoherentAngles& angles) {
  const int L = basis.sites();
  if (angles.vartheta.size() != L || angles.varphi.size() != L)
    throw std::invalid_argument("gutzwiller_state: angle length mismatch");
  std::vector<Eigen::VectorXcd> site(L);
  for (int i = 0; i < L; ++i)
    site[i] = coherent_state(angles.vartheta[i], angles.varphi[i], basis.two_s());
  StateVector psi(basis.dim());
  for (std::size_t r = 0; r < basis.dim(); ++r) {
    cplx amp = 1.0;
    for (int i = 0; i < L; ++i) amp *= site[i][basis.digit(basis.config(r), i)];
    psi[r] = amp;
  }
  const double nrm = psi.norm();
  if (nrm < 1e-14)
    throw std::runtime_error("gutzwiller_state: projected state has zero norm");
  return psi / nrm;
}

GaugeAngles gauge_map(const CoherentAngles& angles, GaugeMap* info) {
  const int L = static_cast<int>(angles.vartheta.size());
  Eigen::VectorXd a(L), F(L);
  Eigen::VectorXcd b(L);
  for (int i = 0; i < L; ++i) {
    a[i] = std::cos(0.5 * angles.vartheta[i]);
    if (std::abs(a[i]) < 1e-12)
      throw std::invalid_argument("gauge_map: cos(vartheta/2) = 0");
    b[i] = cplx(0.0, -1.0) * std::exp(cplx(0.0, angles.varphi[i])) *
           std::sin(0.5 * angles.vartheta[i]);
    F[i] = std::norm(b[i]) / (a[i] * a[i]);
  }
  // periodic continued fraction by cyclic fixed-point iteration
  Eigen::VectorXd G(L);
  for (int i = 0; i < L; ++i) G[i] = 1.0 + F[i];
  double delta = 1.0;
  int sweeps = 0;
  while (delta > 1e-14) {
    delta = 0.0;
    for (int i = L - 1; i >= 0; --i) {
      double g = 1.0 + F[i] / G[(i + 1) % L];
      delta = std::max(delta, std::abs(g - G[i]));
      G[i] = g;
    }
    if (++sweeps > 100000)
      throw std::runtime_error("gauge_map: continued fraction did not converge");
  }
  Eigen::VectorXd c(L);
  for (int i = 0; i < L; ++i) c[i] = std::sqrt(G[i]) * std::abs(a[i]);

  GaugeAngles out;
  out.theta.resize(L);
  out.phi.resize(L);
  for (int i = 0; i < L; ++i) {
    const double cth = a[i] / c[i];
    const cplx z = b[i] * a[(i + 1) % L] / (c[i] * c[(i + 1) % L]);
    const double sth = std::abs(z);
    out.theta[i] = 2.0 * std::atan2(sth, cth);
    // -i e^{i phi} sin(theta/2) = z
    out.phi[i] = (sth > 1e-15) ? std::arg(cplx(0.0, 1.0) * z) : 0.0;
  }
  if (info) {
    info->F = F;
    info->G = G;
    info->c = c;
  }
  return out;
}

std::vector<Eigen::Matrix2cd> mps_tensors(double theta, double phi, int two_s) {
  Eigen::VectorXcd ch = coherent_state(theta, phi, two_s);
  std::vector<Eigen::Matrix2cd> A(two_s + 1, Eigen::Matrix2cd::Zero());
  A[0](0, 0) = ch[0];
  A[0](1, 0) = 1.0;
  for (int n = 1; n <= two_s; ++n) A[n](0, 1) = ch[n];
  return A;
}

StateVector mps_dense(const ConstrainedBasis& basis, const GaugeAngles& angles,
                      int two_s) {
  const int L = basis.sites();
  if (angles.theta.size() != L)
    throw std::invalid_argument("mps_dense: angle length mismatch");
  std::vector<std::vector<Eigen::Matrix2cd>> A(L);
  for (int i = 0; i < L; ++i)
    A[i] = mps_tensors(angles.theta[i], angles.phi[i], two_s);
  StateVector psi(basis.dim());
  for (std::size_t r = 0; r < basis.dim(); ++r) {
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Identity();
    for (int i = 0; i < L; ++i) m = m * A[i][basis.digit(basis.config(r), i)];
    psi[r] = m.trace();
  }
  return psi;
}

double mps_norm_squared(const GaugeAngles& angles, int two_s) {
  double prod = 1.0;
  for (int i = 0; i < angles.theta.size(); ++i) {
    const double x = std::pow(std::cos(0.5 * angles.theta[i]), two_s);
    prod *= x * x - 1.0;
  }
  return 1.0 + prod;
}

TransferMatrix transfer_matrix(double theta, double phi, int two_s) {
  auto A = mps_tensors(theta, phi, two_s);
  TransferMatrix tm;
  tm.T.setZero();
  for (int n = 0; n <= two_s; ++n)
    tm.T += kron(A[n].conjugate(), A[n]);
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(tm.T);
  std::array<int, 4> order = {0, 1, 2, 3};
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    return std::abs(es.eigenvalues()[i]) > std::abs(es.eigenvalues()[j]);
  });
  Eigen::Matrix4cd R;
  for (int i = 0; i < 4; ++i) {
    tm.eigenvalues[i] = es.eigenvalues()[order[i]];
    R.col(i) = es.eigenvectors().col(order[i]);
  }
  if (std::abs(std::abs(tm.eigenvalues[1]) - std::abs(tm.eigenvalues[0])) <
      1e-10)
    throw std::runtime_error(
        "transfer_matrix: dominant eigenvalue degenerate (theta near pi)");
  tm.right = R;
  tm.left = R.inverse().transpose();  // rows of R^-1 are biorthonormal lefts
  return tm;
}

BondOperatorMatrix measure_quadrature(int n_theta, int n_phi) {
  const double sqrt5 = std::sqrt(5.0);
  const double alpha = (2.0 + sqrt5) / ((3.0 + sqrt5) * std::numbers::pi);
  const double beta = 2.0 / ((3.0 + sqrt5) * std::numbers::pi);
  std::vector<double> gx, gw;
  gauss_legendre(n_theta, gx, gw);
  BondOperatorMatrix out;
  for (auto& row : out)
    for (auto& m : row) m.setZero();
  for (int it = 0; it < n_theta; ++it) {
    const double theta = std::numbers::pi * (gx[it] + 1.0);  // [0, 2pi]
    const double wt = std::numbers::pi * gw[it];
    for (int ip = 0; ip < n_phi; ++ip) {
      const double phi = 2.0 * std::numbers::pi * ip / n_phi;
      const double wp = 2.0 * std::numbers::pi / n_phi;
      const double mu =
          (alpha + beta * std::cos(theta)) / (2.0 * std::numbers::pi);
      auto A = mps_tensors(theta, phi, 1);
      // site matrix of kets: K[i][j] = sum_n A^n_{ij} |n>
      for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k)
          for (int j = 0; j < 2; ++j)
            for (int l = 0; l < 2; ++l) {
              Eigen::Matrix2cd op = Eigen::Matrix2cd::Zero();
              for (int n = 0; n <= 1; ++n)
                for (int m = 0; m <= 1; ++m)
                  op(n, m) = A[n](i, j) * std::conj(A[m](k, l));
              out[2 * i + k][2 * j + l] += (wt * wp * mu) * op;
            }
    }
  }
  return out;
}

double identity_resolution_check(int L, int n_theta, int n_phi) {
  if (L < 2 || L > 10)
    throw std::invalid_argument("identity_resolution_check: L in [2, 10]");
  BondOperatorMatrix a = measure_quadrature(n_theta, n_phi);
  // contract the bond-operator chain site by site
  const long dim0 = 1l << L;
  std::array<std::array<Eigen::MatrixXcd, 4>, 4> acc;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) acc[r][c] = a[r][c];
  for (int site = 1; site < L; ++site) {
    std::array<std::array<Eigen::MatrixXcd, 4>, 4> nxt;
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) {
        nxt[r][c] = Eigen::MatrixXcd::Zero(acc[0][0].rows() * 2,
                                           acc[0][0].cols() * 2);
        for (int m = 0; m < 4; ++m) nxt[r][c] += kron(acc[r][m], a[m][c]);
      }
    acc = nxt;
  }
  Eigen::MatrixXcd op = Eigen::MatrixXcd::Zero(dim0, dim0);
  for (int r = 0; r < 4; ++r) op += acc[r][r];
  // reference: diagonal projector onto admissible periodic bitstrings
  double worst = 0.0;
  for (long i = 0; i < dim0; ++i)
    for (long j = 0; j < dim0; ++j) {
      double ref = 0.0;
      if (i == j) {
        bool ok = true;
        for (int site = 0; site < L; ++site) {
          const int b1 = (i >> (L - 1 - site)) & 1;
          const int b2 = (i >> (L - 1 - (site + 1) % L)) & 1;
          if (b1 && b2) ok = false;
        }
        ref = ok ? 1.0 : 0.0;
      }
      worst = std::max(worst, std::abs(op(i, j) - ref));
    }
  return worst;
}

}  // namespace scars
