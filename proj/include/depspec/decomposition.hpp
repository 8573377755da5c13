#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "depspec/bitlattice.hpp"

namespace depspec {

// Truth table e: {0,1}^n -> {0,1}. table[x] indexed by the word x
// (coordinate 1 most significant), so lexicographic input order is index order.
struct BooleanFunction {
  int n = 0;
  std::vector<std::uint8_t> table;
};

// Centered real form of a Boolean function under a fixed product source:
// value is 1-q where the function is 1 and -q elsewhere, q = P(e(X^n) = 1).
// Mean 0 and variance q(1-q) by construction.
struct RealCenteredFunction {
  int n = 0;
  double q = 0.0;
  Eigen::ArrayXd values;
};

RealCenteredFunction center(const BooleanFunction& e, const ProductSource& src);

/// Conditional expectation of an arbitrary table given the coordinates in
/// `on`: entry a is the source-weighted average over the hidden coordinates,
/// indexed by the packed assignment of the visible ones. Exact summation.
Eigen::ArrayXd conditional_expectation(const Eigen::Ref<const Eigen::ArrayXd>& values,
                                       SubsetMask on, const ProductSource& src);

Eigen::ArrayXd conditional_expectation(const RealCenteredFunction& f, SubsetMask on,
                                       const ProductSource& src);

// Additive decomposition: components[i], one full 2^n table per mask, with
// component i constant on fibers of the coordinates in i and
// sum_i components[i] == centered values pointwise.
struct Decomposition {
  int n = 0;
  std::vector<Eigen::ArrayXd> components;  // indexed by mask bits
};

/// Builds every component by the recursion
///   component[i] = E[f | X_i] - sum over strict submasks j of component[j],
/// in increasing mask order. Requires n <= kMaxDecompositionDim.
Decomposition decompose(const RealCenteredFunction& f, const ProductSource& src);

// Per-mask component variances. variances[0] == 0; total == q(1-q) up to
// rounding (variance conservation).
struct DependencySpectrum {
  int n = 0;
  Eigen::ArrayXd variances;  // indexed by mask bits
  double total = 0.0;
};

/// Computes the spectrum by the recursive formula
///   P_i = E[ (E[f | X_i])^2 ] - sum over strict submasks j of P_j
/// without materializing components. The conditional second moments are
/// produced by marginalizing one coordinate at a time, level by level from
/// weight n down to 0 (3^n total work); the submask sums are then swept in
/// (weight, value) order so every lower term is already final.
/// Requires n <= kMaxSpectrumDim.
DependencySpectrum spectrum(const RealCenteredFunction& f, const ProductSource& src);

/// Independent route: P_i = E[components[i]^2] straight from a materialized
/// decomposition. Serves as the oracle for spectrum().
DependencySpectrum spectrum_from_components(const Decomposition& d, const ProductSource& src);

/// Sum of variances over masks of weight <= max_weight, skipping `exclude`.
double level_mass(const DependencySpectrum& s, int max_weight, SubsetMask exclude);

/// CSV with columns mask,weight,variance; rows ordered by (weight, mask).
void write_spectrum_csv(std::ostream& os, const DependencySpectrum& s);

// Named test functions. Coordinate 1 is the most significant input bit.
BooleanFunction make_dictator(int n);
BooleanFunction make_parity(int n);
BooleanFunction make_and(int n);
BooleanFunction make_majority(int n);
BooleanFunction make_threshold(int n, int k);

}  // namespace depspec
