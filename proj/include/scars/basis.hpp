#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace scars {

enum class Boundary { periodic, open };

/// Ordered enumeration of the blockade-constrained configurations of an
/// L-site spin-s chain: no two adjacent sites may both be excited (level > 0).
/// Configurations are packed in base (2s+1) with site 0 as the most
/// significant digit, so integer order coincides with lexicographic order
/// of the digit strings.
class ConstrainedBasis {
public:
  static constexpr std::size_t kDefaultCap = 50'000'000;

  ConstrainedBasis(int L, int two_s, Boundary boundary,
                   std::size_t capacity = kDefaultCap);

  int sites() const { return L_; }
  int two_s() const { return two_s_; }
  int local_dim() const { return two_s_ + 1; }
  Boundary boundary() const { return boundary_; }
  std::size_t dim() const { return configs_.size(); }

  const std::vector<std::uint64_t>& configs() const { return configs_; }
  std::uint64_t config(std::size_t i) const { return configs_[i]; }

  /// Index of a packed config, or -1 if it is not in the basis.
  std::int64_t find(std::uint64_t c) const;
  /// Index of an admissible config; throws std::out_of_range otherwise.
  std::size_t rank(std::uint64_t c) const;
  std::uint64_t unrank(std::size_t i) const;

  int digit(std::uint64_t c, int site) const;
  std::uint64_t set_digit(std::uint64_t c, int site, int value) const;
  bool admissible(std::uint64_t c) const;
  bool admissible(const std::vector<int>& levels) const;

  std::uint64_t pack(const std::vector<int>& levels) const;
  std::vector<int> unpack(std::uint64_t c) const;
  std::string to_string(std::uint64_t c) const;

  /// Translation by one site: site i of the result is site i+1 of the input.
  std::uint64_t translate(std::uint64_t c) const;
  /// Inversion about the chain center: site i -> L-1-i.
  std::uint64_t invert(std::uint64_t c) const;

  /// Independent count from the adjacency-matrix trace/path formula.
  static std::uint64_t count_dimension(int L, int two_s, Boundary boundary);

private:
  int L_;
  int two_s_;
  Boundary boundary_;
  std::vector<std::uint64_t> place_;  // place_[i] = (2s+1)^(L-1-i)
  std::vector<std::uint64_t> configs_;
};

/// Symmetry-adapted (momentum k, inversion quantum number parity) basis of a
/// periodic ConstrainedBasis. Each basis state is a real unit vector in the
/// full constrained space, supported on a single orbit of the
/// translation-inversion group.
struct SymmetrySector {
  int k = 0;
  int parity = +1;
  /// states[a] lists (basis index, amplitude) pairs of an orthonormal vector.
  std::vector<std::vector<std::pair<std::size_t, double>>> states;
  std::size_t dim() const { return states.size(); }
};

SymmetrySector build_sector(const ConstrainedBasis& basis, int k, int parity);

}  // namespace scars
