// Brute-force reference implementations used by the unit and acceptance
// suites. Everything here recomputes quantities from first principles,
// independent of the library's computation paths.
#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <vector>

#include "depspec/bitlattice.hpp"
#include "depspec/decomposition.hpp"
#include "depspec/rng.hpp"
#include "depspec/slcs.hpp"

namespace oracles {

// Random truth table with each output an independent fair bit.
inline depspec::BooleanFunction random_function(int n, std::uint64_t seed) {
  depspec::RandomStream rs(seed);
  depspec::BooleanFunction e{n, std::vector<std::uint8_t>(1u << n, 0)};
  for (auto& b : e.table) b = rs.bernoulli(0.5) ? 1 : 0;
  return e;
}

// P(e(X) != f(Y)) by direct enumeration of (x, y) pairs: the joint mass of
// (x, y) is prob(x) * prod_j P(flip_j = x_j ^ y_j).
inline double disagreement_by_xy_enumeration(const depspec::BooleanFunction& e,
                                             const depspec::BooleanFunction& f,
                                             const depspec::CorrelatedPairSource& src) {
  const std::uint32_t size = 1u << src.n;
  double acc = 0.0;
  for (std::uint32_t x = 0; x < size; ++x) {
    double px = 1.0;
    for (int b = 0; b < src.n; ++b) px *= (x >> b & 1u) ? src.p : 1.0 - src.p;
    for (std::uint32_t y = 0; y < size; ++y) {
      if (e.table[x] == f.table[y]) continue;
      double pf = 1.0;
      for (int b = 0; b < src.n; ++b)
        pf *= ((x ^ y) >> b & 1u) ? src.eps : 1.0 - src.eps;
      acc += px * pf;
    }
  }
  return acc;
}

// P(parity(X^n) != parity(Y^n)) = P(odd number of flips) in closed form.
inline double parity_disagreement(int n, double eps) {
  double r = 1.0;
  for (int j = 0; j < n; ++j) r *= 1.0 - 2.0 * eps;
  return (1.0 - r) / 2.0;
}

// P(E_i(X^m) = v | X^m = x) for encoding uniform over the full conditional
// typical set, by scanning every m-bit word.
inline std::optional<double> marginal_by_enumeration(const depspec::SlcsConfig& c, int m,
                                                     std::uint32_t x, int coordinate, int v) {
  std::int64_t total = 0, hits = 0;
  for (std::uint32_t u = 0; u < (1u << m); ++u) {
    if (!depspec::jointly_typical(depspec::joint_type(u, x, m), c)) continue;
    ++total;
    if (static_cast<int>((u >> (m - coordinate)) & 1u) == v) ++hits;
  }
  if (total == 0) return std::nullopt;
  return static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace oracles
