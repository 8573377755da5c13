#include "depspec/slcs.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <ostream>

#include <nlohmann/json.hpp>

#include "depspec/rng.hpp"

namespace depspec {

namespace {

constexpr std::uint64_t kCodebookTag = 0xC0DEB00Cull;
constexpr std::uint64_t kEncodeTag = 0xE4C0DE11ull;
constexpr int kMaxEncoderDim = 12;
constexpr int kMaxCountingBlocklength = 20;
constexpr std::uint64_t kMaxCodebook = 1ull << 20;

constexpr int kBinomMax = 32;

std::uint64_t binom(int a, int b) {
  static const auto table = [] {
    std::array<std::array<std::uint64_t, kBinomMax + 1>, kBinomMax + 1> t{};
    for (int i = 0; i <= kBinomMax; ++i) {
      t[static_cast<std::size_t>(i)][0] = 1;
      for (int j = 1; j <= i; ++j)
        t[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            t[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)] +
            (j <= i - 1 ? t[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j)] : 0);
    }
    return t;
  }();
  if (b < 0 || b > a || a < 0 || a > kBinomMax) return 0;
  return table[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
}

std::uint64_t input_seed(const SlcsConfig& c, std::uint32_t x) {
  return derive_seed(c.seed, kEncodeTag, x);
}

}  // namespace

SlcsConfig default_slcs_config(int n) {
  SlcsConfig c;
  c.n = n;
  c.rate = 0.5;
  c.p_u_given_x << 0.8, 0.2,  // x = 0
      0.2, 0.8;               // x = 1
  c.p_x = 0.5;
  c.eps_typ = 0.3;
  c.mode = CodebookMode::kUniformTypical;
  c.seed = 1;
  return c;
}

double p_u_one(const SlcsConfig& c) {
  return (1.0 - c.p_x) * c.p_u_given_x(0, 1) + c.p_x * c.p_u_given_x(1, 1);
}

double joint_prob(const SlcsConfig& c, int u, int x) {
  const double px = x ? c.p_x : 1.0 - c.p_x;
  return px * c.p_u_given_x(x, u);
}

std::uint64_t codebook_size(const SlcsConfig& c) {
  const double raw = std::exp2(static_cast<double>(c.n) * c.rate);
  const double rounded = std::round(raw);
  const double v = std::abs(raw - rounded) < 1e-9 ? rounded : std::ceil(raw);
  return static_cast<std::uint64_t>(v);
}

void validate(const SlcsConfig& c) {
  if (c.n < 1 || c.n > kMaxDim)
    throw dimension_cap_error("blocklength must be in [1, " + std::to_string(kMaxDim) + "]");
  if (!(c.rate >= 0.0)) throw std::invalid_argument("rate must be >= 0");
  if (!(c.p_x >= 0.0 && c.p_x <= 1.0)) throw std::invalid_argument("p_x must be in [0, 1]");
  if (!(c.eps_typ > 0.0)) throw std::invalid_argument("eps_typ must be > 0");
  for (int x = 0; x < 2; ++x) {
    const double row = c.p_u_given_x(x, 0) + c.p_u_given_x(x, 1);
    if (std::abs(row - 1.0) > 1e-12)
      throw std::invalid_argument("p_u_given_x rows must sum to 1");
    if (c.p_u_given_x(x, 0) < 0.0 || c.p_u_given_x(x, 1) < 0.0)
      throw std::invalid_argument("p_u_given_x entries must be nonnegative");
  }
  if (codebook_size(c) > kMaxCodebook)
    throw dimension_cap_error("codebook size exceeds " + std::to_string(kMaxCodebook));
}

bool is_typical(std::uint32_t u, const SlcsConfig& c) {
  const double frac = static_cast<double>(std::popcount(u)) / static_cast<double>(c.n);
  return std::abs(frac - p_u_one(c)) < c.eps_typ;
}

TypicalSet build_typical_set(const SlcsConfig& c) {
  validate(c);
  TypicalSet t;
  t.n = c.n;
  for (std::uint64_t u = 0; u < (1ull << c.n); ++u)
    if (is_typical(static_cast<std::uint32_t>(u), c))
      t.members.push_back(static_cast<std::uint32_t>(u));
  return t;
}

JointTypeClass joint_type(std::uint32_t u, std::uint32_t x, int m) {
  const std::uint32_t full = m == 32 ? ~0u : (1u << m) - 1u;
  JointTypeClass t;
  t.m = m;
  t.l11 = std::popcount(u & x & full);
  t.l10 = std::popcount(u & ~x & full);
  t.l01 = std::popcount(~u & x & full);
  t.l00 = m - t.l11 - t.l10 - t.l01;
  return t;
}

bool jointly_typical(const JointTypeClass& t, const SlcsConfig& c) {
  const double m = static_cast<double>(t.m);
  return std::abs(t.l00 / m - joint_prob(c, 0, 0)) < c.eps_typ &&
         std::abs(t.l01 / m - joint_prob(c, 0, 1)) < c.eps_typ &&
         std::abs(t.l10 / m - joint_prob(c, 1, 0)) < c.eps_typ &&
         std::abs(t.l11 / m - joint_prob(c, 1, 1)) < c.eps_typ;
}

std::vector<std::uint32_t> generate_codebook(const SlcsConfig& c) {
  validate(c);
  const std::uint64_t m = codebook_size(c);
  RandomStream rs(derive_seed(c.seed, kCodebookTag));
  std::vector<std::uint32_t> cb;
  cb.reserve(m);
  if (c.mode == CodebookMode::kUniformTypical) {
    const TypicalSet t = build_typical_set(c);
    if (t.members.empty())
      throw std::domain_error("typical set is empty; cannot draw a uniform codebook");
    for (std::uint64_t j = 0; j < m; ++j)
      cb.push_back(t.members[rs.uniform_below(t.members.size())]);
  } else {
    const double pu = p_u_one(c);
    for (std::uint64_t j = 0; j < m; ++j) cb.push_back(rs.bernoulli_word(c.n, pu));
  }
  return cb;
}

EncodeResult typicality_encode(const std::vector<std::uint32_t>& codebook, std::uint32_t x,
                               const SlcsConfig& c, std::uint64_t seed) {
  if (codebook.empty()) throw std::invalid_argument("typicality_encode: empty codebook");
  std::vector<std::uint32_t> candidates;
  candidates.reserve(codebook.size());
  for (std::uint32_t idx = 0; idx < codebook.size(); ++idx)
    if (jointly_typical(joint_type(codebook[idx], x, c.n), c)) candidates.push_back(idx);
  RandomStream rs(seed);
  if (!candidates.empty())
    return {codebook[candidates[rs.uniform_below(candidates.size())]], false};
  return {codebook[rs.uniform_below(codebook.size())], true};
}

VectorEncoder build_encoder(const SlcsConfig& c) { return build_encoder(c, generate_codebook(c)); }

VectorEncoder build_encoder(const SlcsConfig& c, const std::vector<std::uint32_t>& codebook) {
  validate(c);
  if (c.n > kMaxEncoderDim)
    throw dimension_cap_error("encoder truth tables are capped at n <= " +
                              std::to_string(kMaxEncoderDim));
  const std::uint32_t size = 1u << c.n;
  VectorEncoder enc;
  enc.n = c.n;
  enc.table.resize(size);
  enc.failure_flags.resize(size);
  for (std::uint32_t x = 0; x < size; ++x) {
    const EncodeResult r = typicality_encode(codebook, x, c, input_seed(c, x));
    enc.table[x] = r.word;
    enc.failure_flags[x] = r.failure ? 1 : 0;
  }
  return enc;
}

BooleanFunction coordinate_function(const VectorEncoder& enc, int k) {
  if (k < 1 || k > enc.n) throw std::invalid_argument("coordinate out of range");
  BooleanFunction e{enc.n, std::vector<std::uint8_t>(enc.table.size(), 0)};
  const int shift = enc.n - k;
  for (std::size_t x = 0; x < enc.table.size(); ++x)
    e.table[x] = static_cast<std::uint8_t>((enc.table[x] >> shift) & 1u);
  return e;
}

double failure_rate(const VectorEncoder& enc) {
  double acc = 0.0;
  for (const std::uint8_t f : enc.failure_flags) acc += f;
  return acc / static_cast<double>(enc.failure_flags.size());
}

namespace {

// Counting-path marginal; returns false if the conditional typical set is
// empty (zero denominator).
bool counting_marginal(const SlcsConfig& c, int m, std::uint32_t x, int coordinate, int v,
                       double* out) {
  const int l1 = std::popcount(x & ((m == 32 ? ~0u : (1u << m) - 1u)));
  const int l0 = m - l1;
  const int xi = static_cast<int>((x >> (m - coordinate)) & 1u);
  std::uint64_t numer = 0, denom = 0;
  for (int l11 = 0; l11 <= l1; ++l11) {
    for (int l10 = 0; l10 <= l0; ++l10) {
      const JointTypeClass t{m, l0 - l10, l1 - l11, l10, l11};
      if (!jointly_typical(t, c)) continue;
      const std::uint64_t ways = binom(l1, l11) * binom(l0, l10);
      denom += ways;
      // pin u at the coordinate: one slot among the positions sharing x's bit
      std::uint64_t pinned;
      if (xi == 1) {
        const int lv1 = v == 1 ? l11 : t.l01;  // u = v among x = 1 positions
        pinned = binom(l1 - 1, lv1 - 1) * binom(l0, l10);
      } else {
        const int lv0 = v == 1 ? l10 : t.l00;
        pinned = binom(l0 - 1, lv0 - 1) * binom(l1, l11);
      }
      numer += pinned;
    }
  }
  if (denom == 0) return false;
  *out = static_cast<double>(numer) / static_cast<double>(denom);
  return true;
}

}  // namespace

double single_letter_marginal(const SlcsConfig& c, int m, std::uint32_t x, int coordinate,
                              int v) {
  validate(c);
  if (m < 1 || m > kMaxCountingBlocklength)
    throw dimension_cap_error("counting formula is capped at m <= " +
                              std::to_string(kMaxCountingBlocklength));
  if (coordinate < 1 || coordinate > m) throw std::invalid_argument("coordinate out of range");
  if (v != 0 && v != 1) throw std::invalid_argument("v must be a bit");
  double out = 0.0;
  if (!counting_marginal(c, m, x, coordinate, v, &out))
    throw std::domain_error("conditional typical set is empty for this input");
  return out;
}

PairCorrelation pair_output_correlation(const SlcsConfig& c, std::uint32_t x, std::uint32_t y,
                                        int draws, std::uint64_t seed) {
  validate(c);
  PairCorrelation r;
  const int n = c.n;
  std::vector<double> sx(static_cast<std::size_t>(n), 0.0), sy(sx), sxy(sx);
  int used = 0, fallbacks = 0;
  for (int d = 0; d < draws; ++d) {
    SlcsConfig cd = c;
    cd.seed = derive_seed(seed, static_cast<std::uint64_t>(d));
    const auto cb = generate_codebook(cd);
    const EncodeResult ex = typicality_encode(cb, x, cd, input_seed(cd, x));
    const EncodeResult ey = typicality_encode(cb, y, cd, input_seed(cd, y));
    if (ex.failure || ey.failure) {
      ++fallbacks;
      continue;
    }
    ++used;
    for (int k = 0; k < n; ++k) {
      const double bx = static_cast<double>((ex.word >> k) & 1u);
      const double by = static_cast<double>((ey.word >> k) & 1u);
      sx[static_cast<std::size_t>(k)] += bx;
      sy[static_cast<std::size_t>(k)] += by;
      sxy[static_cast<std::size_t>(k)] += bx * by;
    }
  }
  r.draws_used = used;
  r.fallback_fraction = draws > 0 ? static_cast<double>(fallbacks) / draws : 0.0;
  if (used < 2) {
    r.degenerate = true;
    return r;
  }
  bool any = false;
  for (int k = 0; k < n; ++k) {
    const double mx = sx[static_cast<std::size_t>(k)] / used;
    const double my = sy[static_cast<std::size_t>(k)] / used;
    const double cov = sxy[static_cast<std::size_t>(k)] / used - mx * my;
    const double vv = mx * (1.0 - mx) * my * (1.0 - my);
    if (vv < 1e-12) continue;  // constant bit: correlation undefined
    any = true;
    r.max_abs_correlation = std::max(r.max_abs_correlation, std::abs(cov / std::sqrt(vv)));
  }
  r.degenerate = !any;
  return r;
}

PairwiseIndependenceReport check_pairwise_independence(const SlcsConfig& c, int draws,
                                                       std::uint64_t seed) {
  validate(c);
  if (c.n > kMaxEncoderDim - 2)
    throw dimension_cap_error("pairwise independence check is capped at n <= 10");
  PairwiseIndependenceReport rep;
  rep.pairs_requested = 8;

  // Candidate set of an input: every word in the codebook support that is
  // jointly typical with it.
  const std::uint32_t size = 1u << c.n;
  std::vector<std::uint32_t> support;
  if (c.mode == CodebookMode::kUniformTypical) {
    support = build_typical_set(c).members;
  } else {
    support.resize(size);
    for (std::uint32_t u = 0; u < size; ++u) support[u] = u;
  }
  const auto candidate_set = [&](std::uint32_t x) {
    std::vector<std::uint32_t> a;
    for (const std::uint32_t u : support)
      if (jointly_typical(joint_type(u, x, c.n), c)) a.push_back(u);
    return a;
  };
  const auto disjoint = [](const std::vector<std::uint32_t>& a,
                           const std::vector<std::uint32_t>& b) {
    // both sorted (support is increasing)
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
      if (a[i] == b[j]) return false;
      a[i] < b[j] ? ++i : ++j;
    }
    return true;
  };

  RandomStream rs(derive_seed(seed, 0xD15701));
  int min_used = 0;
  for (int attempt = 0; attempt < 500 && rep.pairs_tested < rep.pairs_requested; ++attempt) {
    const std::uint32_t x = rs.bernoulli_word(c.n, c.p_x);
    const std::uint32_t y = rs.bernoulli_word(c.n, c.p_x);
    if (x == y) continue;
    const auto ax = candidate_set(x);
    const auto ay = candidate_set(y);
    if (ax.empty() || ay.empty() || !disjoint(ax, ay)) continue;
    const PairCorrelation pc = pair_output_correlation(
        c, x, y, draws, derive_seed(seed, static_cast<std::uint64_t>(rep.pairs_tested)));
    ++rep.pairs_tested;
    if (pc.degenerate) continue;
    rep.max_abs_correlation = std::max(rep.max_abs_correlation, pc.max_abs_correlation);
    min_used = min_used == 0 ? pc.draws_used : std::min(min_used, pc.draws_used);
  }
  rep.degenerate = rep.pairs_tested == 0 || min_used == 0;
  rep.stderr_scale = min_used > 0 ? 1.0 / std::sqrt(static_cast<double>(min_used)) : 0.0;
  return rep;
}

PermutationInvarianceReport check_permutation_invariance(const SlcsConfig& c,
                                                         const std::vector<int>& perm,
                                                         int draws, std::uint64_t seed) {
  validate(c);
  if (static_cast<int>(perm.size()) != c.n)
    throw dimension_mismatch_error("permutation size must equal n");
  PermutationInvarianceReport rep;
  constexpr int kProbes = 4;
  for (int probe = 0; probe < kProbes; ++probe) {
    RandomStream rs(derive_seed(seed, 0xA110C, static_cast<std::uint64_t>(probe)));
    const std::uint32_t x = rs.bernoulli_word(c.n, c.p_x);
    // probe target: a realized output for x, so P(enc(x) = u) is not negligible
    SlcsConfig pilot = c;
    pilot.seed = derive_seed(seed, 0xB007, static_cast<std::uint64_t>(probe));
    const auto pilot_cb = generate_codebook(pilot);
    const std::uint32_t u =
        typicality_encode(pilot_cb, x, pilot, input_seed(pilot, x)).word;
    const std::uint32_t px = permute_word(x, perm, c.n);
    const std::uint32_t pu = permute_word(u, perm, c.n);

    std::int64_t c1 = 0, c2 = 0;
    for (int d = 0; d < draws; ++d) {
      SlcsConfig cd = c;
      cd.seed = derive_seed(seed, static_cast<std::uint64_t>(probe + 1),
                            static_cast<std::uint64_t>(d));
      const auto cb = generate_codebook(cd);
      if (typicality_encode(cb, x, cd, input_seed(cd, x)).word == u) ++c1;
      if (typicality_encode(cb, px, cd, input_seed(cd, px)).word == pu) ++c2;
    }
    const double p1 = static_cast<double>(c1) / draws;
    const double p2 = static_cast<double>(c2) / draws;
    const double diff = std::abs(p1 - p2);
    if (diff >= rep.max_abs_difference) {
      rep.max_abs_difference = diff;
      rep.max_stderr = std::sqrt((p1 * (1.0 - p1) + p2 * (1.0 - p2)) / draws);
    }
    ++rep.probes;
  }
  return rep;
}

std::vector<SingleLetterDeviationRow> single_letter_deviation_trend(const SlcsConfig& c,
                                                                    const std::vector<int>& ms) {
  validate(c);
  std::vector<SingleLetterDeviationRow> rows;
  for (const int m : ms) {
    if (m < 1 || m > kMaxCountingBlocklength)
      throw dimension_cap_error("trend blocklength out of range");
    const Eigen::ArrayXd w = probability_vector(ProductSource{m, c.p_x});
    const std::uint32_t size = 1u << m;
    std::vector<double> marg(size, -1.0);
    double excluded = 0.0;
    double num[2] = {0.0, 0.0}, mass[2] = {0.0, 0.0};
    for (std::uint32_t x = 0; x < size; ++x) {
      double p = 0.0;
      if (!counting_marginal(c, m, x, 1, 1, &p)) {
        excluded += w[x];
        continue;
      }
      marg[x] = p;
      const int b = static_cast<int>((x >> (m - 1)) & 1u);
      num[b] += w[x] * p;
      mass[b] += w[x];
    }
    SingleLetterDeviationRow row;
    row.m = m;
    row.excluded_mass = excluded;
    for (std::uint32_t x = 0; x < size; ++x) {
      if (marg[x] < 0.0) continue;
      const int b = static_cast<int>((x >> (m - 1)) & 1u);
      if (mass[b] <= 0.0) continue;
      const double dev = std::abs(marg[x] - num[b] / mass[b]);
      row.max_abs_deviation = std::max(row.max_abs_deviation, dev);
      row.weighted_deviation += w[x] * dev;
    }
    rows.push_back(row);
  }
  return rows;
}

std::string config_json_line(const SlcsConfig& c) {
  nlohmann::json j;
  j["n"] = c.n;
  j["rate"] = c.rate;
  j["p_u_given_x"] = {{c.p_u_given_x(0, 0), c.p_u_given_x(0, 1)},
                      {c.p_u_given_x(1, 0), c.p_u_given_x(1, 1)}};
  j["p_x"] = c.p_x;
  j["eps_typ"] = c.eps_typ;
  j["mode"] = c.mode == CodebookMode::kUniformTypical ? "uniform-typical" : "iid-product";
  j["seed"] = c.seed;
  return j.dump();
}

void dump_encoder(std::ostream& os, const VectorEncoder& enc, const SlcsConfig& c) {
  os << config_json_line(c) << '\n';
  for (std::uint32_t x = 0; x < enc.table.size(); ++x)
    os << mask_string({x, enc.n}) << ' ' << mask_string({enc.table[x], enc.n}) << ' '
       << static_cast<int>(enc.failure_flags[x]) << '\n';
}

}  // namespace depspec
