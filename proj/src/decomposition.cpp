#include "depspec/decomposition.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <numeric>
#include <ostream>

namespace depspec {

namespace {

constexpr double kNegativeVarianceTol = 1e-10;

void check_dims(int fn, const ProductSource& src) {
  if (fn != src.n) throw dimension_mismatch_error("function/source dimension mismatch");
}

// Masks of dimension n ordered by (weight, numeric value).
std::vector<std::uint32_t> masks_by_level(int n) {
  std::vector<std::uint32_t> order(1u << n);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [](std::uint32_t a, std::uint32_t b) {
    const int wa = std::popcount(a), wb = std::popcount(b);
    return wa != wb ? wa < wb : a < b;
  });
  return order;
}

}  // namespace

RealCenteredFunction center(const BooleanFunction& e, const ProductSource& src) {
  check_dims(e.n, src);
  const std::uint32_t size = 1u << e.n;
  if (e.table.size() != size) throw std::invalid_argument("truth table has wrong length");
  const Eigen::ArrayXd w = probability_vector(src);
  double q = 0.0;
  for (std::uint32_t x = 0; x < size; ++x)
    if (e.table[x]) q += w[x];
  RealCenteredFunction f;
  f.n = e.n;
  f.q = q;
  f.values.resize(size);
  for (std::uint32_t x = 0; x < size; ++x) f.values[x] = e.table[x] ? 1.0 - q : -q;
  return f;
}

Eigen::ArrayXd conditional_expectation(const Eigen::Ref<const Eigen::ArrayXd>& values,
                                       SubsetMask on, const ProductSource& src) {
  if (on.n != src.n) throw dimension_mismatch_error("conditional_expectation: dimension");
  if (values.size() != (1 << src.n))
    throw std::invalid_argument("conditional_expectation: table length");
  const SubsetMask hidden = complement(on);
  const int nv = weight(on);
  const int nh = src.n - nv;
  const Eigen::ArrayXd wh = restricted_probability_vector(src, hidden);
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(1u << nv);
  for (std::uint32_t a = 0; a < (1u << nv); ++a) {
    const std::uint32_t base = deposit_bits(a, on.bits);
    double acc = 0.0;
    for (std::uint32_t b = 0; b < (1u << nh); ++b)
      acc += wh[b] * values[base | deposit_bits(b, hidden.bits)];
    out[a] = acc;
  }
  return out;
}

Eigen::ArrayXd conditional_expectation(const RealCenteredFunction& f, SubsetMask on,
                                       const ProductSource& src) {
  check_dims(f.n, src);
  return conditional_expectation(f.values, on, src);
}

Decomposition decompose(const RealCenteredFunction& f, const ProductSource& src) {
  check_dims(f.n, src);
  if (f.n > kMaxDecompositionDim)
    throw dimension_cap_error("decompose is capped at n <= " +
                              std::to_string(kMaxDecompositionDim));
  const std::uint32_t size = 1u << f.n;
  Decomposition d;
  d.n = f.n;
  d.components.resize(size);
  // Increasing numeric order: every strict submask of i is below i numerically,
  // so its component is already final when i is processed.
  d.components[0] = Eigen::ArrayXd::Zero(size);  // E[f] = 0 for a centered function
  for (std::uint32_t i = 1; i < size; ++i) {
    const SubsetMask mask{i, f.n};
    const Eigen::ArrayXd cond = conditional_expectation(f, mask, src);
    Eigen::ArrayXd comp(size);
    for (std::uint32_t x = 0; x < size; ++x) comp[x] = cond[extract_bits(x, i)];
    for (std::uint32_t j = (i - 1) & i;; j = (j - 1) & i) {
      comp -= d.components[j];
      if (j == 0) break;
    }
    d.components[i] = std::move(comp);
  }
  return d;
}

DependencySpectrum spectrum(const RealCenteredFunction& f, const ProductSource& src) {
  check_dims(f.n, src);
  const int n = f.n;
  if (n > kMaxSpectrumDim)
    throw dimension_cap_error("spectrum is capped at n <= " + std::to_string(kMaxSpectrumDim));
  const std::uint32_t size = 1u << n;
  const std::uint32_t full = size - 1;

  // second_moment[i] = E_{X_i}[ (E[f | X_i])^2 ]
  Eigen::ArrayXd second_moment(size);
  std::vector<Eigen::ArrayXd> tables(size);
  tables[full] = f.values;
  {
    const Eigen::ArrayXd w = probability_vector(src);
    second_moment[full] = (w * f.values.square()).sum();
  }
  // Walk levels from weight n-1 down to 0. Each table is obtained from a
  // parent one level up by averaging out that parent's extra coordinate.
  for (int level = n - 1; level >= 0; --level) {
    // pw[k] = p^k (1-p)^(level-k): restriction weights by assignment popcount
    std::vector<double> pw(static_cast<std::size_t>(level) + 1);
    for (int k = 0; k <= level; ++k) {
      double v = 1.0;
      for (int j = 0; j < k; ++j) v *= src.p;
      for (int j = k; j < level; ++j) v *= 1.0 - src.p;
      pw[static_cast<std::size_t>(k)] = v;
    }
    std::uint32_t mask = (1u << level) - 1;  // lowest mask of this weight
    while (true) {
      const std::uint32_t missing = ~mask & full;
      const std::uint32_t low_missing = missing & ~(missing - 1);
      const std::uint32_t parent = mask | low_missing;
      const int pos = std::popcount(parent & (low_missing - 1));
      const Eigen::ArrayXd& pt = tables[parent];
      const std::uint32_t half = 1u << level;
      Eigen::ArrayXd t(half);
      const std::uint32_t low_bits = (1u << pos) - 1;
      for (std::uint32_t a = 0; a < half; ++a) {
        const std::uint32_t lo = a & low_bits;
        const std::uint32_t hi = (a >> pos) << (pos + 1);
        t[a] = (1.0 - src.p) * pt[hi | lo] + src.p * pt[hi | (1u << pos) | lo];
      }
      double m2 = 0.0;
      for (std::uint32_t a = 0; a < half; ++a)
        m2 += pw[static_cast<std::size_t>(std::popcount(a))] * t[a] * t[a];
      second_moment[mask] = m2;
      tables[mask] = std::move(t);
      if (level == 0 || mask == (full >> (n - level)) << (n - level)) break;
      // Gosper's hack: next mask of the same weight.
      const std::uint32_t c = mask & -mask;
      const std::uint32_t r = mask + c;
      mask = (((mask ^ r) >> 2) / c) | r;
    }
    // Parents of this level are no longer needed.
    if (level + 1 < n) {
      std::uint32_t pm = (1u << (level + 1)) - 1;
      while (true) {
        tables[pm].resize(0);
        if (pm == (full >> (n - level - 1)) << (n - level - 1)) break;
        const std::uint32_t c = pm & -pm;
        const std::uint32_t r = pm + c;
        pm = (((pm ^ r) >> 2) / c) | r;
      }
    }
  }

  DependencySpectrum s;
  s.n = n;
  s.variances = Eigen::ArrayXd::Zero(size);
  for (std::uint32_t i : masks_by_level(n)) {
    if (i == 0) continue;  // P_0 := 0
    double v = second_moment[i];
    for (std::uint32_t j = (i - 1) & i;; j = (j - 1) & i) {
      v -= s.variances[j];
      if (j == 0) break;
    }
    if (v < 0.0) {
      if (v < -kNegativeVarianceTol)
        throw std::runtime_error("spectrum: component variance " + std::to_string(v) +
                                 " below cancellation tolerance at mask " +
                                 mask_string({i, n}));
      v = 0.0;
    }
    s.variances[i] = v;
  }
  s.total = s.variances.sum();
  return s;
}

DependencySpectrum spectrum_from_components(const Decomposition& d, const ProductSource& src) {
  if (d.n != src.n) throw dimension_mismatch_error("spectrum_from_components: dimension");
  const std::uint32_t size = 1u << d.n;
  const Eigen::ArrayXd w = probability_vector(src);
  DependencySpectrum s;
  s.n = d.n;
  s.variances.resize(size);
  for (std::uint32_t i = 0; i < size; ++i)
    s.variances[i] = (w * d.components[i].square()).sum();
  s.variances[0] = 0.0;
  s.total = s.variances.sum();
  return s;
}

double level_mass(const DependencySpectrum& s, int max_weight, SubsetMask exclude) {
  if (exclude.n != s.n) throw dimension_mismatch_error("level_mass: dimension");
  double acc = 0.0;
  for (std::uint32_t i = 0; i < (1u << s.n); ++i)
    if (std::popcount(i) <= max_weight && i != exclude.bits) acc += s.variances[i];
  return acc;
}

void write_spectrum_csv(std::ostream& os, const DependencySpectrum& s) {
  os << "mask,weight,variance\n";
  char buf[64];
  for (std::uint32_t i : masks_by_level(s.n)) {
    std::snprintf(buf, sizeof buf, "%.12g", s.variances[i]);
    os << mask_string({i, s.n}) << ',' << std::popcount(i) << ',' << buf << '\n';
  }
}

BooleanFunction make_dictator(int n) {
  BooleanFunction e{n, std::vector<std::uint8_t>(1u << n, 0)};
  for (std::uint32_t x = 0; x < (1u << n); ++x) e.table[x] = (x >> (n - 1)) & 1u;
  return e;
}

BooleanFunction make_parity(int n) {
  BooleanFunction e{n, std::vector<std::uint8_t>(1u << n, 0)};
  for (std::uint32_t x = 0; x < (1u << n); ++x)
    e.table[x] = static_cast<std::uint8_t>(std::popcount(x) & 1);
  return e;
}

BooleanFunction make_and(int n) {
  BooleanFunction e{n, std::vector<std::uint8_t>(1u << n, 0)};
  e.table[(1u << n) - 1] = 1;
  return e;
}

BooleanFunction make_majority(int n) { return make_threshold(n, n / 2 + 1); }

BooleanFunction make_threshold(int n, int k) {
  BooleanFunction e{n, std::vector<std::uint8_t>(1u << n, 0)};
  for (std::uint32_t x = 0; x < (1u << n); ++x)
    e.table[x] = std::popcount(x) >= k ? 1 : 0;
  return e;
}

}  // namespace depspec
