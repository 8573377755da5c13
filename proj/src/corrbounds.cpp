#include "depspec/corrbounds.hpp"

#include <bit>
#include <cmath>

#include <nlohmann/json.hpp>

#include "depspec/rng.hpp"

namespace depspec {

namespace {

void check_eps(double eps) {
  if (!(eps >= 0.0 && eps <= 0.5))
    throw std::invalid_argument("eps must be in [0, 1/2], got " + std::to_string(eps));
}

}  // namespace

std::pair<double, double> theorem1_bounds(const DependencySpectrum& P,
                                          const DependencySpectrum& Q, double eps) {
  if (P.n != Q.n) throw dimension_mismatch_error("theorem1_bounds: spectra dimension");
  check_eps(eps);
  const double rho = 1.0 - 2.0 * eps;
  double cross = 0.0;
  for (std::uint32_t i = 1; i < (1u << P.n); ++i) {
    const double pq = P.variances[i] * Q.variances[i];
    if (pq > 0.0)
      cross += std::pow(rho, std::popcount(i)) * std::sqrt(pq);
  }
  const double head = 2.0 * std::sqrt(P.total) * std::sqrt(Q.total);
  return {head - 2.0 * cross, 1.0 - head + 2.0 * cross};
}

double exact_disagreement(const BooleanFunction& e, const BooleanFunction& f,
                          const CorrelatedPairSource& src) {
  if (e.n != f.n || e.n != src.n)
    throw dimension_mismatch_error("exact_disagreement: dimension");
  if (src.n > kMaxDecompositionDim)
    throw dimension_cap_error("exact_disagreement is capped at n <= " +
                              std::to_string(kMaxDecompositionDim));
  check_eps(src.eps);
  const std::uint32_t size = 1u << src.n;
  const Eigen::ArrayXd wx = probability_vector(ProductSource{src.n, src.p});
  const Eigen::ArrayXd wf = flip_probability_vector(src);
  // Enumerate (x, flip) rather than (x, y): the pair factorizes exactly.
  double acc = 0.0;
  for (std::uint32_t x = 0; x < size; ++x) {
    double inner = 0.0;
    for (std::uint32_t flip = 0; flip < size; ++flip)
      if (e.table[x] != f.table[x ^ flip]) inner += wf[flip];
    acc += wx[x] * inner;
  }
  return acc;
}

McEstimate mc_disagreement(const BooleanFunction& e, const BooleanFunction& f,
                           const CorrelatedPairSource& src, std::int64_t trials,
                           std::uint64_t seed) {
  if (e.n != f.n || e.n != src.n) throw dimension_mismatch_error("mc_disagreement: dimension");
  if (trials < 1) throw std::invalid_argument("mc_disagreement: trials must be >= 1");
  check_eps(src.eps);
  std::int64_t hits = 0;
  for (std::int64_t t = 0; t < trials; ++t) {
    RandomStream rs(derive_seed(seed, static_cast<std::uint64_t>(t)));
    const std::uint32_t x = rs.bernoulli_word(src.n, src.p);
    const std::uint32_t flip = rs.bernoulli_word(src.n, src.eps);
    if (e.table[x] != f.table[x ^ flip]) ++hits;
  }
  const double est = static_cast<double>(hits) / static_cast<double>(trials);
  return {est, std::sqrt(est * (1.0 - est) / static_cast<double>(trials))};
}

double theorem3_threshold(const DependencySpectrum& P, const DependencySpectrum& Q,
                          double eps, double delta) {
  if (P.n != Q.n) throw dimension_mismatch_error("theorem3_threshold: spectra dimension");
  check_eps(eps);
  const std::uint32_t i1 = standard_basis(1, P.n).bits;
  return 2.0 * std::sqrt(P.total) * std::sqrt(Q.total) -
         2.0 * (1.0 - 2.0 * eps) * std::sqrt(P.variances[i1] * Q.variances[i1]) - delta;
}

CorrelationReport make_report(const DependencySpectrum& P, const DependencySpectrum& Q,
                              double eps, double disagreement) {
  CorrelationReport r;
  r.n = P.n;
  r.eps = eps;
  std::tie(r.lower_bound, r.upper_bound) = theorem1_bounds(P, Q, eps);
  r.lower_clamped = std::max(r.lower_bound, 0.0);
  r.upper_clamped = std::min(r.upper_bound, 1.0);
  r.disagreement = disagreement;
  return r;
}

std::string report_json(const CorrelationReport& r) {
  nlohmann::json j;
  j["n"] = r.n;
  j["eps"] = r.eps;
  j["lower"] = r.lower_bound;
  j["upper"] = r.upper_bound;
  j["lower_clamped"] = r.lower_clamped;
  j["upper_clamped"] = r.upper_clamped;
  j["disagreement"] = r.disagreement;
  j["method"] = r.method;
  if (r.estimate_stderr) j["stderr"] = *r.estimate_stderr;
  if (r.seed) j["seed"] = *r.seed;
  if (r.trials) j["trials"] = *r.trials;
  return j.dump(2);
}

}  // namespace depspec
