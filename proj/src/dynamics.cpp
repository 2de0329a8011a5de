#include "scars/dynamics.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <complex>
#include <fstream>
#include <stdexcept>

namespace scars {

namespace {

constexpr int kKrylovMax = 30;
constexpr double kStepTol = 1e-10;

// One Lanczos step of exp(-iH dt); returns false if the residual estimate
// exceeds the target (caller then splits the step).
bool lanczos_step(const SparseOperator& H, const StateVector& psi, double dt,
                  StateVector& out) {
  const double beta0 = psi.norm();
  std::vector<StateVector> v;
  v.push_back(psi / beta0);
  std::vector<double> alpha, beta;
  int m = 0;
  StateVector w;
  for (; m < kKrylovMax; ++m) {
    H.apply(v[m], w);
    double a = std::real(v[m].dot(w));
    alpha.push_back(a);
    w -= a * v[m];
    if (m > 0) w -= beta[m - 1] * v[m - 1];
    // full reorthogonalization
    for (const auto& q : v) w -= q.dot(w) * q;
    double b = w.norm();
    if (b < 1e-14) {  // invariant subspace: propagation is exact
      ++m;
      break;
    }
    beta.push_back(b);
    v.push_back(w / b);
  }
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    T(i, i) = alpha[i];
    if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
  Eigen::VectorXcd ph(m);
  for (int i = 0; i < m; ++i)
    ph[i] = std::exp(std::complex<double>(0.0, -dt * es.eigenvalues()[i]));
  Eigen::VectorXcd e1 = Eigen::VectorXcd::Zero(m);
  e1[0] = 1.0;
  Eigen::MatrixXcd U = es.eigenvectors().cast<cplx>();
  Eigen::VectorXcd y = U * (ph.asDiagonal() * (U.adjoint() * e1));
  // residual estimate: weight leaking into the last Krylov direction
  if (m == kKrylovMax && static_cast<int>(beta.size()) >= m) {
    double resid = std::abs(beta[m - 1] * y[m - 1]) * std::abs(dt);
    if (resid > kStepTol) return false;
  }
  out = StateVector::Zero(psi.size());
  for (int i = 0; i < m; ++i) out += (beta0 * y[i]) * v[i];
  return true;
}

}  // namespace

StateVector product_state(const ConstrainedBasis& basis, Pattern p) {
  std::vector<int> levels(basis.sites(), 0);
  if (p != Pattern::all_zero) {
    const int offset = (p == Pattern::z2) ? 0 : 1;  // z2 excites even sites
    if (basis.sites() % 2 != 0 && basis.boundary() == Boundary::periodic)
      throw std::invalid_argument("product_state: Neel pattern needs even L");
    for (int i = offset; i < basis.sites(); i += 2) levels[i] = basis.two_s();
  }
  return product_state(basis, levels);
}

StateVector product_state(const ConstrainedBasis& basis,
                          const std::vector<int>& levels) {
  if (static_cast<int>(levels.size()) != basis.sites())
    throw std::invalid_argument("product_state: wrong pattern length");
  if (!basis.admissible(levels))
    throw std::invalid_argument("product_state: inadmissible pattern");
  StateVector psi = StateVector::Zero(basis.dim());
  psi[basis.rank(basis.pack(levels))] = 1.0;
  return psi;
}

StateVector evolve(const SparseOperator& H, const StateVector& psi, double dt) {
  if (dt < 0) throw std::invalid_argument("evolve: dt must be >= 0");
  StateVector cur = psi;
  double remaining = dt;
  double step = dt;
  int guard = 0;
  while (remaining > 1e-15 * dt) {
    StateVector next;
    if (lanczos_step(H, cur, std::min(step, remaining), next)) {
      remaining -= std::min(step, remaining);
      cur = std::move(next);
    } else {
      step *= 0.5;
      if (++guard > 60)
        throw std::runtime_error("evolve: Krylov step size underflow");
    }
  }
  cur /= cur.norm();
  return cur;
}

StateVector evolve_dense(const SparseOperator& H, const StateVector& psi,
                         double dt) {
  if (H.dim() > 4000)
    throw std::invalid_argument("evolve_dense: dimension above dense cap");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H.dense());
  Eigen::VectorXcd ph(H.dim());
  for (std::size_t i = 0; i < H.dim(); ++i)
    ph[i] = std::exp(std::complex<double>(0.0, -dt * es.eigenvalues()[i]));
  Eigen::MatrixXcd U = es.eigenvectors().cast<cplx>();
  return U * (ph.asDiagonal() * (U.adjoint() * psi));
}

double entanglement_entropy(const ConstrainedBasis& basis,
                            const StateVector& psi, int a0, int len) {
  const int L = basis.sites();
  if (len <= 0 || len >= L)
    throw std::invalid_argument("entanglement_entropy: region must be proper");
  // Embed into (admissible left-segment) x (admissible right-segment); the
  // ring's junction constraints only zero out entries, so the Schmidt
  // decomposition of the embedded matrix is that of the state.
  ConstrainedBasis left(len, basis.two_s(), Boundary::open);
  ConstrainedBasis right(L - len, basis.two_s(), Boundary::open);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(left.dim(), right.dim());
  std::vector<int> d(L), dl(len), dr(L - len);
  for (std::size_t i = 0; i < basis.dim(); ++i) {
    d = basis.unpack(basis.config(i));
    for (int k = 0; k < len; ++k) dl[k] = d[(a0 + k) % L];
    for (int k = 0; k < L - len; ++k) dr[k] = d[(a0 + len + k) % L];
    m(left.rank(left.pack(dl)), right.rank(right.pack(dr))) = psi[i];
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  double s = 0.0;
  for (int i = 0; i < svd.singularValues().size(); ++i) {
    double p = svd.singularValues()[i] * svd.singularValues()[i];
    if (p > 1e-15) s -= p * std::log2(p);
  }
  return s;
}

QuenchSeries quench_series(const ConstrainedBasis& basis,
                           const SparseOperator& H, const StateVector& psi0,
                           double t_max, double dt_out,
                           const std::vector<int>& cuts) {
  if (dt_out <= 0) throw std::invalid_argument("quench_series: dt_out > 0");
  const int L = basis.sites();
  // S^z is diagonal: precompute per-site level values once
  std::vector<std::vector<double>> szdiag(L, std::vector<double>(basis.dim()));
  for (int i = 0; i < L; ++i)
    for (std::size_t r = 0; r < basis.dim(); ++r)
      szdiag[i][r] = basis.digit(basis.config(r), i) - 0.5 * basis.two_s();

  QuenchSeries qs;
  qs.cuts = cuts;
  StateVector psi = psi0;
  const int n_steps = static_cast<int>(std::round(t_max / dt_out));
  for (int step = 0; step <= n_steps; ++step) {
    const double t = step * dt_out;
    if (step > 0) psi = evolve(H, psi, dt_out);
    qs.t.push_back(t);
    std::vector<double> sz(L);
    for (int i = 0; i < L; ++i) {
      double v = 0.0;
      for (std::size_t r = 0; r < basis.dim(); ++r)
        v += szdiag[i][r] * std::norm(psi[r]);
      sz[i] = v;
    }
    qs.sz.push_back(std::move(sz));
    qs.fidelity.push_back(std::norm(psi0.dot(psi)));
    std::vector<double> ent;
    for (int cut : cuts)
      ent.push_back(entanglement_entropy(basis, psi, 0, cut));
    qs.entropy.push_back(std::move(ent));
  }
  return qs;
}

void write_csv(const QuenchSeries& qs, const std::string& path) {
  std::ofstream f(path);
  f.precision(17);
  f << "t";
  for (std::size_t i = 0; i < qs.sz.front().size(); ++i) f << ",sz_site_" << i;
  f << ",fidelity";
  for (int c : qs.cuts) f << ",ee_" << c;
  f << "\n";
  for (std::size_t row = 0; row < qs.t.size(); ++row) {
    f << qs.t[row];
    for (double v : qs.sz[row]) f << "," << v;
    f << "," << qs.fidelity[row];
    for (double v : qs.entropy[row]) f << "," << v;
    f << "\n";
  }
}

}  // namespace scars
