#include "depspec/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <thread>

namespace depspec {

namespace {

constexpr std::int64_t kMcTrials = 200000;
constexpr int kErasureSamplesPerDraw = 200;

void run_cells(int count, int jobs, const std::function<void(int)>& fn) {
  jobs = std::max(1, jobs);
  if (jobs == 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  const int workers = std::min(jobs, count);
  pool.reserve(static_cast<std::size_t>(workers));
  for (int t = 0; t < workers; ++t)
    pool.emplace_back([&] {
      for (int i; (i = next.fetch_add(1)) < count;) fn(i);
    });
  for (auto& th : pool) th.join();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double mean(const std::vector<double>& v) {
  double acc = 0.0;
  for (const double x : v) acc += x;
  return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
}

double stderr_of_mean(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (const double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / (static_cast<double>(v.size()) - 1.0) /
                   static_cast<double>(v.size()));
}

}  // namespace

std::string scheme_label(EncoderScheme s) {
  switch (s) {
    case EncoderScheme::kSlcs: return "slcs";
    case EncoderScheme::kUncoded: return "uncoded";
    case EncoderScheme::kConstant: return "constant";
  }
  return "?";
}

VectorEncoder realize_encoder(EncoderScheme scheme, const SlcsConfig& c, std::uint64_t seed) {
  if (scheme == EncoderScheme::kSlcs) {
    SlcsConfig cd = c;
    cd.seed = seed;
    return build_encoder(cd);
  }
  const std::uint32_t size = 1u << c.n;
  VectorEncoder enc;
  enc.n = c.n;
  enc.table.resize(size);
  enc.failure_flags.assign(size, 0);
  for (std::uint32_t x = 0; x < size; ++x)
    enc.table[x] = scheme == EncoderScheme::kUncoded ? x : 0u;
  return enc;
}

std::vector<ConcentrationRow> run_concentration(const SlcsConfig& base,
                                                const ConcentrationGrid& grid,
                                                EncoderScheme scheme,
                                                std::uint64_t master_seed) {
  const int num_n = static_cast<int>(grid.ns.size());
  const std::size_t rows_per_n = grid.ms.size() * grid.gammas.size();
  std::vector<ConcentrationRow> rows(static_cast<std::size_t>(num_n) * rows_per_n);

  run_cells(num_n, grid.jobs, [&](int ni) {
    const int n = grid.ns[static_cast<std::size_t>(ni)];
    SlcsConfig cfg = base;
    cfg.n = n;
    const std::uint64_t cell_seed = derive_seed(master_seed, static_cast<std::uint64_t>(n));
    const ProductSource src{n, cfg.p_x};
    const SubsetMask excluded = standard_basis(grid.k, n);
    // per-draw level masses, one column per weight cutoff
    std::vector<std::vector<double>> masses(grid.ms.size(),
                                            std::vector<double>(grid.draws));
    for (int d = 0; d < grid.draws; ++d) {
      const VectorEncoder enc = realize_encoder(
          scheme, cfg, derive_seed(cell_seed, static_cast<std::uint64_t>(d)));
      const DependencySpectrum s =
          spectrum(center(coordinate_function(enc, grid.k), src), src);
      for (std::size_t mi = 0; mi < grid.ms.size(); ++mi)
        masses[mi][static_cast<std::size_t>(d)] = level_mass(s, grid.ms[mi], excluded);
    }
    for (std::size_t mi = 0; mi < grid.ms.size(); ++mi) {
      for (std::size_t gi = 0; gi < grid.gammas.size(); ++gi) {
        ConcentrationRow row;
        row.n = n;
        row.m = grid.ms[mi];
        row.gamma = grid.gammas[gi];
        row.k = grid.k;
        row.draws = grid.draws;
        row.seed = cell_seed;
        int exceed = 0;
        for (const double v : masses[mi])
          if (v >= row.gamma) ++exceed;
        row.empirical_prob = static_cast<double>(exceed) / grid.draws;
        row.markov_bound = mean(masses[mi]) / row.gamma;
        rows[static_cast<std::size_t>(ni) * rows_per_n + mi * grid.gammas.size() + gi] =
            row;
      }
    }
  });
  return rows;
}

std::vector<CollapseRow> run_collapse(const SlcsConfig& base, const CollapseGrid& grid,
                                      std::uint64_t master_seed) {
  const int cells = static_cast<int>(grid.ns.size() * grid.eps_grid.size());
  std::vector<CollapseRow> rows(static_cast<std::size_t>(cells));

  run_cells(cells, grid.jobs, [&](int cell) {
    const std::size_t ni = static_cast<std::size_t>(cell) / grid.eps_grid.size();
    const std::size_t ei = static_cast<std::size_t>(cell) % grid.eps_grid.size();
    const int n = grid.ns[ni];
    const double eps = grid.eps_grid[ei];
    SlcsConfig cfg = base;
    cfg.n = n;
    const std::uint64_t cell_seed = derive_seed(
        master_seed, static_cast<std::uint64_t>(n), std::bit_cast<std::uint64_t>(eps));
    const CorrelatedPairSource pair{n, cfg.p_x, eps};
    const ProductSource src{n, cfg.p_x};

    CollapseRow row;
    row.n = n;
    row.eps = eps;
    row.delta = grid.delta;
    row.shared_encoder = grid.shared;
    row.draws = grid.draws;
    row.seed = cell_seed;

    std::vector<double> dis(static_cast<std::size_t>(grid.draws));
    std::vector<double> thr(static_cast<std::size_t>(grid.draws));
    int exceed = 0;
    for (int d = 0; d < grid.draws; ++d) {
      const std::uint64_t ds = derive_seed(cell_seed, static_cast<std::uint64_t>(d));
      const VectorEncoder enc_e = realize_encoder(EncoderScheme::kSlcs, cfg,
                                                  derive_seed(ds, 1));
      const VectorEncoder enc_f =
          grid.shared ? enc_e : realize_encoder(EncoderScheme::kSlcs, cfg, derive_seed(ds, 2));
      const BooleanFunction e1 = coordinate_function(enc_e, 1);
      const BooleanFunction f1 = coordinate_function(enc_f, 1);
      const DependencySpectrum P = spectrum(center(e1, src), src);
      const DependencySpectrum Q = spectrum(center(f1, src), src);
      double d_est;
      if (n <= kMaxDecompositionDim) {
        d_est = exact_disagreement(e1, f1, pair);
      } else {
        d_est = mc_disagreement(e1, f1, pair, kMcTrials, derive_seed(ds, 3)).estimate;
      }
      const double t_est = theorem3_threshold(P, Q, eps, grid.delta);
      dis[static_cast<std::size_t>(d)] = d_est;
      thr[static_cast<std::size_t>(d)] = t_est;
      if (d_est > t_est) ++exceed;
    }
    row.disagreement_estimate = mean(dis);
    row.threshold_estimate = mean(thr);
    row.fraction_above_threshold = static_cast<double>(exceed) / grid.draws;
    rows[static_cast<std::size_t>(cell)] = row;
  });
  return rows;
}

void validate(const IccsParams& p) {
  if (!(p.delta >= 0.0 && p.delta <= 0.5))
    throw std::invalid_argument("channel crossover delta must be in [0, 1/2]");
  if (p.q_ary < 2) throw std::invalid_argument("q_ary must be >= 2");
  if (!(p.eps >= 0.0 && p.eps <= 0.5)) throw std::invalid_argument("eps must be in [0, 1/2]");
  if (!(p.alpha_x >= 0.0 && p.alpha_x <= 1.0))
    throw std::invalid_argument("alpha_x must be in [0, 1]");
  // Y is X with per-coordinate flips, which pins Y's marginal.
  const double ay = p.alpha_x * (1.0 - p.eps) + (1.0 - p.alpha_x) * p.eps;
  if (std::abs(ay - p.alpha_y) > 1e-9)
    throw std::invalid_argument("alpha_y inconsistent with alpha_x and eps (expected " +
                                std::to_string(ay) + ")");
  if (p.n < 1 || p.n > 12)
    throw dimension_cap_error("interference-channel blocklength is capped at n <= 12");
}

ChannelOutput channel_step(int x1, int x21, int x22, const IccsParams& p, RandomStream& rng) {
  if ((x1 & ~1) || (x22 & ~1)) throw std::invalid_argument("x1 and x22 must be bits");
  if (x21 < 0 || x21 >= p.q_ary) throw std::invalid_argument("x21 out of alphabet");
  ChannelOutput out;
  out.y1 = x1 ^ (rng.bernoulli(p.delta) ? 1 : 0);
  if (x22 == x1) {
    out.y2 = x21;
    out.erased = false;
  } else {
    out.y2 = 0;
    out.erased = true;
  }
  return out;
}

double agreement_rate(const VectorEncoder& enc1, const VectorEncoder& enc22,
                      const CorrelatedPairSource& src) {
  if (enc1.n != enc22.n || enc1.n != src.n)
    throw dimension_mismatch_error("agreement_rate: dimension");
  const int n = src.n;
  if (n <= kMaxDecompositionDim) {
    const Eigen::ArrayXd wx = probability_vector(ProductSource{n, src.p});
    const Eigen::ArrayXd wf = flip_probability_vector(src);
    const std::uint32_t size = 1u << n;
    double expected_distance = 0.0;
    for (std::uint32_t x = 0; x < size; ++x) {
      double inner = 0.0;
      for (std::uint32_t f = 0; f < size; ++f)
        inner += wf[f] * std::popcount(enc1.table[x] ^ enc22.table[x ^ f]);
      expected_distance += wx[x] * inner;
    }
    return 1.0 - expected_distance / n;
  }
  constexpr std::uint64_t kAgreementMcSeed = 0xA93EE;
  std::int64_t agree = 0;
  for (std::int64_t t = 0; t < kMcTrials; ++t) {
    RandomStream rs(derive_seed(kAgreementMcSeed, static_cast<std::uint64_t>(t)));
    const std::uint32_t x = rs.bernoulli_word(n, src.p);
    const std::uint32_t y = x ^ rs.bernoulli_word(n, src.eps);
    agree += n - std::popcount(enc1.table[x] ^ enc22.table[y]);
  }
  return static_cast<double>(agree) / (static_cast<double>(kMcTrials) * n);
}

double hz_bound(double agreement, int q_ary) {
  if (!(agreement >= 0.0 && agreement <= 1.0))
    throw std::invalid_argument("agreement must be in [0, 1]");
  if (q_ary < 2) throw std::invalid_argument("q_ary must be >= 2");
  return 1.0 + agreement * std::log2(static_cast<double>(q_ary));
}

std::vector<IccsReport> run_iccs_comparison(const IccsParams& params, const SlcsConfig& slcs_base,
                                            const std::vector<EncoderScheme>& schemes, int draws,
                                            std::uint64_t seed) {
  validate(params);
  SlcsConfig cfg = slcs_base;
  cfg.n = params.n;
  cfg.p_x = params.alpha_x;
  const CorrelatedPairSource pair{params.n, params.alpha_x, params.eps};
  std::vector<IccsReport> reports;
  for (std::size_t si = 0; si < schemes.size(); ++si) {
    const EncoderScheme scheme = schemes[si];
    IccsReport rep;
    rep.scheme = scheme_label(scheme);
    rep.n = params.n;
    rep.draws = draws;
    rep.seed = seed;
    std::vector<double> agreements(static_cast<std::size_t>(draws));
    std::int64_t erased = 0, symbols = 0;
    for (int d = 0; d < draws; ++d) {
      const std::uint64_t ds = derive_seed(seed, si, static_cast<std::uint64_t>(d));
      const VectorEncoder enc1 = realize_encoder(scheme, cfg, derive_seed(ds, 1));
      VectorEncoder enc22;
      if (scheme == EncoderScheme::kSlcs) {
        // z^n indexes the second encoder's draw: same z, same encoder
        RandomStream rz(derive_seed(ds, 2));
        std::uint64_t z_hash = 0x5A;
        for (int j = 0; j < params.n; ++j)
          z_hash = derive_seed(z_hash, rz.uniform_below(
                                           static_cast<std::uint64_t>(params.q_ary)));
        enc22 = realize_encoder(scheme, cfg, derive_seed(seed, 0x22, z_hash));
      } else {
        enc22 = realize_encoder(scheme, cfg, 0);
      }
      agreements[static_cast<std::size_t>(d)] = agreement_rate(enc1, enc22, pair);

      RandomStream rs(derive_seed(ds, 4));
      for (int s = 0; s < kErasureSamplesPerDraw; ++s) {
        const std::uint32_t x = rs.bernoulli_word(params.n, params.alpha_x);
        const std::uint32_t y = x ^ rs.bernoulli_word(params.n, params.eps);
        const std::uint32_t u1 = enc1.table[x];
        const std::uint32_t u22 = enc22.table[y];
        for (int i = 1; i <= params.n; ++i) {
          const int b1 = static_cast<int>((u1 >> (params.n - i)) & 1u);
          const int b22 = static_cast<int>((u22 >> (params.n - i)) & 1u);
          const int x21 = static_cast<int>(
              rs.uniform_below(static_cast<std::uint64_t>(params.q_ary)));
          if (channel_step(b1, x21, b22, params, rs).erased) ++erased;
          ++symbols;
        }
      }
    }
    rep.agreement_rate = mean(agreements);
    rep.agreement_stderr = stderr_of_mean(agreements);
    rep.hz_bound_bits = hz_bound(rep.agreement_rate, params.q_ary);
    rep.empirical_erasure_rate =
        symbols > 0 ? static_cast<double>(erased) / static_cast<double>(symbols) : 0.0;
    reports.push_back(rep);
  }
  return reports;
}

std::string concentration_csv(const std::vector<ConcentrationRow>& rows) {
  std::string out = "n,m,gamma,k,empirical_prob,markov_bound,draws,seed\n";
  for (const auto& r : rows) {
    out += std::to_string(r.n) + ',' + std::to_string(r.m) + ',' + fmt(r.gamma) + ',' +
           std::to_string(r.k) + ',' + fmt(r.empirical_prob) + ',' + fmt(r.markov_bound) +
           ',' + std::to_string(r.draws) + ',' + std::to_string(r.seed) + '\n';
  }
  return out;
}

std::string collapse_csv(const std::vector<CollapseRow>& rows) {
  std::string out =
      "n,eps,disagreement,theorem3_threshold,fraction_above_threshold,delta,shared,draws,"
      "seed\n";
  for (const auto& r : rows) {
    out += std::to_string(r.n) + ',' + fmt(r.eps) + ',' + fmt(r.disagreement_estimate) + ',' +
           fmt(r.threshold_estimate) + ',' + fmt(r.fraction_above_threshold) + ',' +
           fmt(r.delta) + ',' + std::to_string(r.shared_encoder ? 1 : 0) + ',' +
           std::to_string(r.draws) + ',' + std::to_string(r.seed) + '\n';
  }
  return out;
}

std::string iccs_csv(const std::vector<IccsReport>& rows) {
  std::string out =
      "scheme,n,agreement_rate,agreement_stderr,hz_bound_bits,empirical_erasure_rate,draws,"
      "seed\n";
  for (const auto& r : rows) {
    out += r.scheme + ',' + std::to_string(r.n) + ',' + fmt(r.agreement_rate) + ',' +
           fmt(r.agreement_stderr) + ',' + fmt(r.hz_bound_bits) + ',' +
           fmt(r.empirical_erasure_rate) + ',' + std::to_string(r.draws) + ',' +
           std::to_string(r.seed) + '\n';
  }
  return out;
}

namespace {

double pooled_freq_stderr(double p1, double p2, int draws) {
  return std::sqrt((p1 * (1.0 - p1) + p2 * (1.0 - p2)) /
                   std::max(1, draws));
}

}  // namespace

std::vector<std::string> concentration_trend_violations(
    const std::vector<ConcentrationRow>& rows) {
  std::vector<std::string> out;
  std::map<std::tuple<int, double, int>, std::vector<const ConcentrationRow*>> groups;
  for (const auto& r : rows) {
    if (r.markov_bound < r.empirical_prob - 1e-12)
      out.push_back("markov bound below empirical probability at n=" + std::to_string(r.n) +
                    " m=" + std::to_string(r.m) + " gamma=" + fmt(r.gamma));
    groups[{r.m, r.gamma, r.k}].push_back(&r);
  }
  for (auto& [key, group] : groups) {
    std::sort(group.begin(), group.end(),
              [](const auto* a, const auto* b) { return a->n < b->n; });
    for (std::size_t i = 1; i < group.size(); ++i) {
      const double prev = group[i - 1]->empirical_prob;
      const double cur = group[i]->empirical_prob;
      const double slack = 4.0 * pooled_freq_stderr(prev, cur, group[i]->draws);
      if (cur > prev + slack)
        out.push_back("exceedance probability increased from n=" +
                      std::to_string(group[i - 1]->n) + " to n=" + std::to_string(group[i]->n) +
                      " at m=" + std::to_string(group[i]->m) +
                      " gamma=" + fmt(group[i]->gamma));
    }
  }
  return out;
}

std::vector<std::string> collapse_trend_violations(const std::vector<CollapseRow>& rows) {
  std::vector<std::string> out;
  std::map<double, std::vector<const CollapseRow*>> by_eps;
  for (const auto& r : rows) {
    if (r.shared_encoder && r.eps == 0.0 && r.disagreement_estimate != 0.0)
      out.push_back("shared encoders at eps=0 must agree exactly, got disagreement " +
                    fmt(r.disagreement_estimate));
    if (r.eps > 0.0) by_eps[r.eps].push_back(&r);
  }
  for (auto& [eps, group] : by_eps) {
    std::sort(group.begin(), group.end(),
              [](const auto* a, const auto* b) { return a->n < b->n; });
    for (std::size_t i = 1; i < group.size(); ++i) {
      const double prev = group[i - 1]->fraction_above_threshold;
      const double cur = group[i]->fraction_above_threshold;
      const double slack = 4.0 * pooled_freq_stderr(prev, cur, group[i]->draws);
      if (cur < prev - slack)
        out.push_back("threshold-exceedance fraction dropped from n=" +
                      std::to_string(group[i - 1]->n) + " to n=" +
                      std::to_string(group[i]->n) + " at eps=" + fmt(eps));
    }
  }
  return out;
}

std::vector<std::string> iccs_trend_violations(const std::vector<IccsReport>& rows) {
  std::vector<std::string> out;
  std::map<int, const IccsReport*> uncoded;
  for (const auto& r : rows)
    if (r.scheme == "uncoded") uncoded[r.n] = &r;
  for (const auto& r : rows) {
    if (r.scheme == "slcs") {
      const auto it = uncoded.find(r.n);
      if (it != uncoded.end()) {
        const double margin = 4.0 * std::max(r.agreement_stderr, 1e-9);
        if (!(r.agreement_rate < it->second->agreement_rate - margin))
          out.push_back("slcs agreement not below uncoded at n=" + std::to_string(r.n));
        if (!(r.hz_bound_bits < it->second->hz_bound_bits))
          out.push_back("slcs H(Z) cap not below uncoded at n=" + std::to_string(r.n));
      }
    }
    if (r.scheme == "constant") {
      // erasures must mirror disagreement for the shared constant encoder
      if (std::abs(r.empirical_erasure_rate - (1.0 - r.agreement_rate)) > 1e-9)
        out.push_back("constant-scheme erasure rate inconsistent with agreement");
    }
  }
  return out;
}

}  // namespace depspec
