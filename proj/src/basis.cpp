#include "scars/basis.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace scars {

namespace {

int max_sites_for_base(int q) {
  // largest L with q^L representable in uint64
  int n = 0;
  std::uint64_t v = 1;
  while (v <= UINT64_MAX / static_cast<std::uint64_t>(q)) {
    v *= static_cast<std::uint64_t>(q);
    ++n;
  }
  return n;
}

}  // namespace

ConstrainedBasis::ConstrainedBasis(int L, int two_s, Boundary boundary,
                                   std::size_t capacity)
    : L_(L), two_s_(two_s), boundary_(boundary) {
  // a single open site is a valid (unconstrained) segment, used by
  // entanglement cuts; a ring needs at least two sites
  const int min_sites = (boundary == Boundary::periodic) ? 2 : 1;
  if (L < min_sites)
    throw std::invalid_argument("ConstrainedBasis: too few sites");
  if (two_s < 1) throw std::invalid_argument("ConstrainedBasis: need 2s >= 1");
  const int q = two_s + 1;
  if (L > max_sites_for_base(q))
    throw std::invalid_argument("ConstrainedBasis: config does not fit in 64 bits");

  const std::uint64_t expected = count_dimension(L, two_s, boundary);
  if (expected > capacity)
    throw std::runtime_error(
        "ConstrainedBasis: dimension " + std::to_string(expected) +
        " exceeds capacity " + std::to_string(capacity));

  place_.resize(L);
  place_[L - 1] = 1;
  for (int i = L - 2; i >= 0; --i) place_[i] = place_[i + 1] * q;

  // depth-first enumeration in lexicographic order
  std::vector<int> d(L, -1);
  configs_.reserve(expected);
  int pos = 0;
  while (pos >= 0) {
    if (pos == L) {
      bool ok = true;
      if (boundary == Boundary::periodic && d[L - 1] > 0 && d[0] > 0) ok = false;
      if (ok) configs_.push_back(pack(d));
      --pos;
      continue;
    }
    // advance digit at pos; a -1 marker means "enter fresh"
    int start = (d[pos] < 0) ? 0 : d[pos] + 1;
    bool moved = false;
    for (int v = start; v <= two_s; ++v) {
      if (pos > 0 && d[pos - 1] > 0 && v > 0) break;  // blockade
      d[pos] = v;
      moved = true;
      break;
    }
    if (!moved) {
      d[pos] = -1;
      --pos;
      if (pos >= 0) continue;
      break;
    }
    ++pos;
    if (pos < L) d[pos] = -1;
  }
  if (configs_.size() != expected)
    throw std::logic_error("ConstrainedBasis: enumeration/count mismatch");
}

std::uint64_t ConstrainedBasis::count_dimension(int L, int two_s,
                                                Boundary boundary) {
  const int q = two_s + 1;
  using Mat = Eigen::Matrix<std::uint64_t, Eigen::Dynamic, Eigen::Dynamic>;
  Mat M = Mat::Zero(q, q);
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b)
      if (a == 0 || b == 0) M(a, b) = 1;
  if (boundary == Boundary::periodic) {
    Mat P = M;
    for (int i = 1; i < L; ++i) P = (P * M).eval();
    std::uint64_t tr = 0;
    for (int a = 0; a < q; ++a) tr += P(a, a);
    return tr;
  }
  Mat P = Mat::Identity(q, q);
  for (int i = 1; i < L; ++i) P = (P * M).eval();
  std::uint64_t total = 0;
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b) total += P(a, b);
  return total;
}

std::int64_t ConstrainedBasis::find(std::uint64_t c) const {
  auto it = std::lower_bound(configs_.begin(), configs_.end(), c);
  if (it == configs_.end() || *it != c) return -1;
  return it - configs_.begin();
}

std::size_t ConstrainedBasis::rank(std::uint64_t c) const {
  std::int64_t i = find(c);
  if (i < 0)
    throw std::out_of_range("ConstrainedBasis::rank: config not in basis");
  return static_cast<std::size_t>(i);
}

std::uint64_t ConstrainedBasis::unrank(std::size_t i) const {
  if (i >= configs_.size())
    throw std::out_of_range("ConstrainedBasis::unrank: index out of range");
  return configs_[i];
}

int ConstrainedBasis::digit(std::uint64_t c, int site) const {
  return static_cast<int>((c / place_[site]) % (two_s_ + 1));
}

std::uint64_t ConstrainedBasis::set_digit(std::uint64_t c, int site,
                                          int value) const {
  return c + (static_cast<std::uint64_t>(value) - digit(c, site)) * place_[site];
}

bool ConstrainedBasis::admissible(std::uint64_t c) const {
  for (int i = 0; i + 1 < L_; ++i)
    if (digit(c, i) > 0 && digit(c, i + 1) > 0) return false;
  if (boundary_ == Boundary::periodic && digit(c, L_ - 1) > 0 && digit(c, 0) > 0)
    return false;
  return true;
}

bool ConstrainedBasis::admissible(const std::vector<int>& levels) const {
  const int L = static_cast<int>(levels.size());
  for (int i = 0; i < L; ++i)
    if (levels[i] < 0 || levels[i] > two_s_) return false;
  for (int i = 0; i + 1 < L; ++i)
    if (levels[i] > 0 && levels[i + 1] > 0) return false;
  if (boundary_ == Boundary::periodic && levels[L - 1] > 0 && levels[0] > 0)
    return false;
  return true;
}

std::uint64_t ConstrainedBasis::pack(const std::vector<int>& levels) const {
  std::uint64_t c = 0;
  for (int i = 0; i < L_; ++i) c += static_cast<std::uint64_t>(levels[i]) * place_[i];
  return c;
}

std::vector<int> ConstrainedBasis::unpack(std::uint64_t c) const {
  std::vector<int> d(L_);
  for (int i = 0; i < L_; ++i) d[i] = digit(c, i);
  return d;
}

std::string ConstrainedBasis::to_string(std::uint64_t c) const {
  std::string s;
  s.reserve(L_);
  for (int i = 0; i < L_; ++i) s.push_back(static_cast<char>('0' + digit(c, i)));
  return s;
}

std::uint64_t ConstrainedBasis::translate(std::uint64_t c) const {
  // site i of result = site i+1 of input (site L-1 wraps to front)
  const int q = two_s_ + 1;
  std::uint64_t head = c / place_[0];                  // digit 0
  std::uint64_t rest = c % place_[0];
  return rest * static_cast<std::uint64_t>(q) + head;
}

std::uint64_t ConstrainedBasis::invert(std::uint64_t c) const {
  std::uint64_t out = 0;
  for (int i = 0; i < L_; ++i)
    out += static_cast<std::uint64_t>(digit(c, i)) * place_[L_ - 1 - i];
  return out;
}

SymmetrySector build_sector(const ConstrainedBasis& basis, int k, int parity) {
  if (basis.boundary() != Boundary::periodic)
    throw std::invalid_argument("build_sector: periodic boundary required");
  if (parity != 1 && parity != -1)
    throw std::invalid_argument("build_sector: parity must be +1 or -1");
  const int L = basis.sites();
  k = ((k % L) + L) % L;
  // Sectors are labeled by k in [0, L/2]; k and L-k carry the same real
  // representation and are built identically.
  if (2 * k > L) k = L - k;

  const double alpha = 2.0 * M_PI * k / L;
  const bool is_1d = (k == 0) || (2 * k == L);
  const double weight = is_1d ? 1.0 : 2.0;

  SymmetrySector sector;
  sector.k = k;
  sector.parity = parity;

  std::vector<char> visited(basis.dim(), 0);
  std::vector<std::uint64_t> orbit;
  std::vector<std::size_t> orbit_idx;
  std::unordered_map<std::uint64_t, int> pos;

  for (std::size_t seed = 0; seed < basis.dim(); ++seed) {
    if (visited[seed]) continue;
    // orbit of the translation-inversion group
    orbit.clear();
    orbit_idx.clear();
    pos.clear();
    auto visit = [&](std::uint64_t c) {
      if (pos.count(c)) return;
      pos.emplace(c, static_cast<int>(orbit.size()));
      orbit.push_back(c);
      std::size_t idx = basis.rank(c);
      orbit_idx.push_back(idx);
      visited[idx] = 1;
    };
    std::uint64_t c = basis.config(seed);
    for (int rep = 0; rep < 2; ++rep) {
      std::uint64_t t = (rep == 0) ? c : basis.invert(c);
      for (int n = 0; n < L; ++n) {
        visit(t);
        t = basis.translate(t);
      }
    }
    const int m = static_cast<int>(orbit.size());

    // character projector onto the (k, parity) isotypic row
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(m, m);
    for (int n = 0; n < L; ++n) {
      const double chi = weight * std::cos(alpha * n) / (2.0 * L);
      for (int j = 0; j < m; ++j) {
        std::uint64_t t = orbit[j];
        for (int step = 0; step < n; ++step) t = basis.translate(t);
        P(pos.at(t), j) += chi;
        P(pos.at(basis.invert(t)), j) += parity * chi;
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P);
    for (int v = 0; v < m; ++v) {
      if (es.eigenvalues()(v) < 0.5) continue;
      std::vector<std::pair<std::size_t, double>> state;
      for (int j = 0; j < m; ++j) {
        double a = es.eigenvectors()(j, v);
        if (std::abs(a) > 1e-14) state.emplace_back(orbit_idx[j], a);
      }
      sector.states.push_back(std::move(state));
    }
  }
  return sector;
}

}  // namespace scars
