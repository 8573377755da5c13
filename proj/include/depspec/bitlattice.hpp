#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "depspec/errors.hpp"

namespace depspec {

// Dimension caps for the exhaustive computation paths. Full decompositions
// store 4^n values, spectra 2^n, Monte-Carlo paths only per-word state.
inline constexpr int kMaxDecompositionDim = 10;
inline constexpr int kMaxSpectrumDim = 16;
inline constexpr int kMaxDim = 24;

// A subset of coordinates {1, ..., n}, stored as an n-bit value.
// Coordinate k occupies bit (n - k), so coordinate 1 is the most significant
// bit and the n-digit binary string of `bits` reads coordinate 1 first.
struct SubsetMask {
  std::uint32_t bits = 0;
  int n = 0;
};

inline SubsetMask all_ones(int n) { return {(n == 32 ? ~0u : (1u << n) - 1u), n}; }
inline SubsetMask zero_mask(int n) { return {0u, n}; }

// Mask selecting coordinate k alone (1-based).
inline SubsetMask standard_basis(int k, int n) { return {1u << (n - k), n}; }

int weight(SubsetMask i);

// Subset partial order: i <= j iff every coordinate of i is in j.
bool leq(SubsetMask i, SubsetMask j);

SubsetMask complement(SubsetMask i);

// All strict submasks of i in increasing bits order.
std::vector<SubsetMask> strict_submasks(SubsetMask i);

// n-digit binary string, coordinate 1 first.
std::string mask_string(SubsetMask i);

// Packs the bits of x selected by mask into a dense index, preserving
// coordinate order (coordinate with the smallest k ends up most significant).
std::uint32_t extract_bits(std::uint32_t x, std::uint32_t mask);

// Inverse of extract_bits: spreads the low weight(mask) bits of v onto mask.
std::uint32_t deposit_bits(std::uint32_t v, std::uint32_t mask);

// i.i.d. Bernoulli(p) coordinates on {0,1}^n.
struct ProductSource {
  int n = 0;
  double p = 0.5;
};

// P(X^n = x) under the product measure.
double prob(const ProductSource& src, std::uint32_t x);

// All 2^n point masses, indexed by word.
Eigen::ArrayXd probability_vector(const ProductSource& src);

// Point masses of the restriction to the coordinates in `on`, indexed by
// the packed assignment (2^{weight(on)} entries).
Eigen::ArrayXd restricted_probability_vector(const ProductSource& src, SubsetMask on);

// Probability of a packed assignment on the coordinates in i.
// `assignment` must fit in weight(i) bits.
double marginal_prob(const ProductSource& src, SubsetMask i, std::uint32_t assignment);

// Pair (X, Y): X is ProductSource(n, p) and Y flips each coordinate of X
// independently with probability eps = P(X_j != Y_j).
struct CorrelatedPairSource {
  int n = 0;
  double p = 0.5;
  double eps = 0.0;
};

// Distribution of the flip pattern X xor Y: product Bernoulli(eps).
Eigen::ArrayXd flip_probability_vector(const CorrelatedPairSource& src);

// Applies a coordinate permutation to a word: coordinate k of the result is
// coordinate perm[k-1]+1 of w (perm is 0-based over coordinates).
std::uint32_t permute_word(std::uint32_t w, const std::vector<int>& perm, int n);

}  // namespace depspec
