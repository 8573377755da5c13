#include "depspec/bitlattice.hpp"

#include <bit>

namespace depspec {

namespace {

void check_valid(SubsetMask i) {
  if (i.n < 0 || i.n > 32 || (i.n < 32 && i.bits >= (1ull << i.n)))
    throw std::invalid_argument("mask bits out of range for dimension n=" + std::to_string(i.n));
}

}  // namespace

int weight(SubsetMask i) {
  check_valid(i);
  return std::popcount(i.bits);
}

bool leq(SubsetMask i, SubsetMask j) {
  check_valid(i);
  check_valid(j);
  if (i.n != j.n) throw dimension_mismatch_error("leq: masks of different dimension");
  return (i.bits & j.bits) == i.bits;
}

SubsetMask complement(SubsetMask i) {
  check_valid(i);
  return {all_ones(i.n).bits & ~i.bits, i.n};
}

std::vector<SubsetMask> strict_submasks(SubsetMask i) {
  check_valid(i);
  std::vector<SubsetMask> out;
  out.reserve((1u << std::popcount(i.bits)) - 1);
  // (j - 1) & bits walks submasks in decreasing order; collect and reverse.
  for (std::uint32_t j = (i.bits - 1) & i.bits;; j = (j - 1) & i.bits) {
    out.push_back({j, i.n});
    if (j == 0) break;
  }
  std::reverse(out.begin(), out.end());
  if (i.bits == 0) out.clear();
  return out;
}

std::string mask_string(SubsetMask i) {
  check_valid(i);
  std::string s(static_cast<std::size_t>(i.n), '0');
  for (int b = 0; b < i.n; ++b)
    if (i.bits & (1u << b)) s[static_cast<std::size_t>(i.n - 1 - b)] = '1';
  return s;
}

std::uint32_t extract_bits(std::uint32_t x, std::uint32_t mask) {
  std::uint32_t out = 0;
  int pos = 0;
  for (std::uint32_t m = mask; m != 0; m &= m - 1) {
    const std::uint32_t low = m & ~(m - 1);
    if (x & low) out |= (1u << pos);
    ++pos;
  }
  return out;
}

std::uint32_t deposit_bits(std::uint32_t v, std::uint32_t mask) {
  std::uint32_t out = 0;
  int pos = 0;
  for (std::uint32_t m = mask; m != 0; m &= m - 1) {
    const std::uint32_t low = m & ~(m - 1);
    if (v & (1u << pos)) out |= low;
    ++pos;
  }
  return out;
}

namespace {

void check_source(const ProductSource& src) {
  if (src.n < 1 || src.n > kMaxDim)
    throw dimension_cap_error("source dimension must be in [1, " + std::to_string(kMaxDim) + "]");
  if (!(src.p >= 0.0 && src.p <= 1.0)) throw std::invalid_argument("p must be in [0, 1]");
}

}  // namespace

double prob(const ProductSource& src, std::uint32_t x) {
  check_source(src);
  double out = 1.0;
  for (int b = 0; b < src.n; ++b) out *= (x & (1u << b)) ? src.p : (1.0 - src.p);
  return out;
}

Eigen::ArrayXd probability_vector(const ProductSource& src) {
  check_source(src);
  const std::uint32_t size = 1u << src.n;
  // pw[k] = p^k (1-p)^(n-k), built multiplicatively to avoid pow() corner cases.
  std::vector<double> pw(static_cast<std::size_t>(src.n) + 1);
  for (int k = 0; k <= src.n; ++k) {
    double v = 1.0;
    for (int j = 0; j < k; ++j) v *= src.p;
    for (int j = k; j < src.n; ++j) v *= 1.0 - src.p;
    pw[static_cast<std::size_t>(k)] = v;
  }
  Eigen::ArrayXd w(size);
  for (std::uint32_t x = 0; x < size; ++x) w[x] = pw[static_cast<std::size_t>(std::popcount(x))];
  return w;
}

Eigen::ArrayXd restricted_probability_vector(const ProductSource& src, SubsetMask on) {
  check_source(src);
  if (on.n != src.n) throw dimension_mismatch_error("restricted_probability_vector: dimension");
  const int nw = weight(on);
  Eigen::ArrayXd w(1u << nw);
  for (std::uint32_t a = 0; a < (1u << nw); ++a) {
    double v = 1.0;
    for (int b = 0; b < nw; ++b) v *= (a & (1u << b)) ? src.p : (1.0 - src.p);
    w[a] = v;
  }
  return w;
}

double marginal_prob(const ProductSource& src, SubsetMask i, std::uint32_t assignment) {
  check_source(src);
  if (i.n != src.n) throw dimension_mismatch_error("marginal_prob: dimension");
  const int nw = weight(i);
  if (nw < 32 && assignment >= (1u << nw))
    throw std::invalid_argument("marginal_prob: assignment does not match mask weight");
  double out = 1.0;
  for (int b = 0; b < nw; ++b) out *= (assignment & (1u << b)) ? src.p : (1.0 - src.p);
  return out;
}

Eigen::ArrayXd flip_probability_vector(const CorrelatedPairSource& src) {
  if (!(src.eps >= 0.0 && src.eps <= 0.5))
    throw std::invalid_argument("eps must be in [0, 1/2]");
  return probability_vector(ProductSource{src.n, src.eps});
}

std::uint32_t permute_word(std::uint32_t w, const std::vector<int>& perm, int n) {
  if (static_cast<int>(perm.size()) != n)
    throw dimension_mismatch_error("permute_word: permutation size");
  std::uint32_t out = 0;
  for (int k = 0; k < n; ++k) {
    // coordinate (k+1) of the result reads coordinate (perm[k]+1) of w
    const int src_bit = n - 1 - perm[static_cast<std::size_t>(k)];
    if (w & (1u << src_bit)) out |= (1u << (n - 1 - k));
  }
  return out;
}

}  // namespace depspec
