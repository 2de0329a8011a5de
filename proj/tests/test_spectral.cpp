#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "scars/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>

using namespace scars;

TEST_CASE("sector spectrum is particle-hole symmetric at L = 4") {
  ConstrainedBasis b(4, 1, Boundary::periodic);
  const SparseOperator H = build_pxp(b, ModelParams{1.0, 0.0});
  SpectralData sd = diagonalize_sector(b, build_sector(b, 0, +1), H);
  const auto& ev = sd.eigenvalues;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    CHECK(std::abs(ev[i] + ev[ev.size() - 1 - i]) < 1e-12);
}

TEST_CASE("union of sector spectra equals the full spectrum at L = 6") {
  ConstrainedBasis b(6, 1, Boundary::periodic);
  const SparseOperator H = build_pxp(b, ModelParams{1.0, 0.0});
  std::vector<double> pooled;
  for (int k = 0; k <= 3; ++k) {  // k and 6 - k are the same real sector
    for (int parity : {+1, -1}) {
      SymmetrySector sec = build_sector(b, k, parity);
      if (sec.dim() == 0) continue;
      SpectralData sd = diagonalize_sector(b, sec, H);
      for (Eigen::Index i = 0; i < sd.eigenvalues.size(); ++i)
        pooled.push_back(sd.eigenvalues[i]);
    }
  }
  std::sort(pooled.begin(), pooled.end());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H.dense());
  REQUIRE(pooled.size() == b.dim());
  for (std::size_t i = 0; i < pooled.size(); ++i)
    CHECK(std::abs(pooled[i] - es.eigenvalues()[i]) < 1e-10);
}

TEST_CASE("lifted sector eigenvectors are full-space eigenvectors") {
  ConstrainedBasis b(8, 1, Boundary::periodic);
  const SparseOperator H = build_pxp(b, ModelParams{1.0, 0.0});
  SymmetrySector sec = build_sector(b, 0, +1);
  const Eigen::MatrixXd hs = sector_matrix(b, sec, H);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hs);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const StateVector v = lift(sec, b.dim(), es.eigenvectors().col(i));
    CHECK((H.apply(v) - es.eigenvalues()[i] * v).norm() < 1e-10);
  }
}

TEST_CASE("one-dimensional sector returns its diagonal element") {
  // at L = 2 the k=1 sector of the 3-dim space is one-dimensional
  ConstrainedBasis b(2, 1, Boundary::periodic);
  const SparseOperator H = build_pxp(b, ModelParams{1.0, 0.0});
  SymmetrySector sec = build_sector(b, 1, -1);
  REQUIRE(sec.dim() == 1);
  SpectralData sd = diagonalize_sector(b, sec, H);
  const Eigen::MatrixXd hs = sector_matrix(b, sec, H);
  CHECK(sd.eigenvalues[0] == doctest::Approx(hs(0, 0)).epsilon(1e-14));
}

TEST_CASE("r statistic reference values") {
  // equally spaced spectrum: every gap ratio is 1
  Eigen::VectorXd lin(20);
  for (int i = 0; i < 20; ++i) lin[i] = 0.3 * i - 2.0;
  CHECK(r_statistic(lin) == doctest::Approx(1.0).epsilon(1e-14));
  // affine invariance
  std::mt19937 rng(17);
  std::exponential_distribution<double> ex(1.0);
  Eigen::VectorXd ev(2000);
  double acc = 0.0;
  for (int i = 0; i < 2000; ++i) {
    acc += ex(rng);
    ev[i] = acc;
  }
  const double r0 = r_statistic(ev);
  const Eigen::VectorXd affine = ((3.7 * ev).array() - 11.0).matrix();
  CHECK(r_statistic(affine) == doctest::Approx(r0).epsilon(1e-13));
  // Poisson limit 2 ln 2 - 1 with a large sample
  Eigen::VectorXd big(100000);
  acc = 0.0;
  for (int i = 0; i < big.size(); ++i) {
    acc += ex(rng);
    big[i] = acc;
  }
  CHECK(std::abs(r_statistic(big) - (2.0 * std::log(2.0) - 1.0)) < 0.01);
  // too few levels
  Eigen::VectorXd two(2);
  two << 0.0, 1.0;
  CHECK_THROWS(r_statistic(two));
}

TEST_CASE("degeneracy collapse is idempotent") {
  Eigen::VectorXd ev(7);
  ev << 0.0, 0.0, 1.0, 2.0, 2.0 + 1e-14, 4.0, 7.0;
  // degenerate pairs must not contribute zero gaps: r over the distinct
  // levels {0, 1, 2, 4, 7} = mean(1/1? ...) computed directly
  const double r_direct =
      (std::min(1.0, 1.0) / std::max(1.0, 1.0) +
       std::min(1.0, 2.0) / std::max(1.0, 2.0) +
       std::min(2.0, 3.0) / std::max(2.0, 3.0)) /
      3.0;
  CHECK(r_statistic(ev) == doctest::Approx(r_direct).epsilon(1e-12));
}

TEST_CASE("mid-size sector r lies between Poisson and GOE") {
  ConstrainedBasis b(18, 1, Boundary::periodic);
  const SparseOperator H = build_pxp(b, ModelParams{1.0, 0.0});
  SpectralData sd = diagonalize_sector(b, build_sector(b, 0, +1), H);
  CHECK(sd.r > 0.35);
  CHECK(sd.r < 0.56);
}
