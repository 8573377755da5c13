#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "depspec/decomposition.hpp"

namespace depspec {

/// Two-sided bound on P(e(X^n) != f(Y^n)) from the dependency spectra of e
/// and f when each coordinate of Y flips independently with probability eps:
///   lower = 2 sqrt(sum P) sqrt(sum Q) - 2 sum_i C_i sqrt(P_i Q_i)
///   upper = 1 - lower term-for-term, with C_i = (1 - 2 eps)^weight(i).
/// The raw lower bound can be negative (vacuous); callers clamp for display.
std::pair<double, double> theorem1_bounds(const DependencySpectrum& P,
                                          const DependencySpectrum& Q, double eps);

/// Exhaustive P(e(X^n) != f(Y^n)) over all (input, flip-pattern) pairs.
/// Requires n <= kMaxDecompositionDim.
double exact_disagreement(const BooleanFunction& e, const BooleanFunction& f,
                          const CorrelatedPairSource& src);

struct McEstimate {
  double estimate = 0.0;
  double stderr_ = 0.0;
};

/// Monte-Carlo estimate of the disagreement probability with binomial
/// standard error. Trials are seeded per-index, so the result depends only
/// on (seed, trials), not on evaluation order.
McEstimate mc_disagreement(const BooleanFunction& e, const BooleanFunction& f,
                           const CorrelatedPairSource& src, std::int64_t trials,
                           std::uint64_t seed);

/// Collapse threshold:
///   2 sqrt(sum P) sqrt(sum Q) - 2 (1 - 2 eps) sqrt(P_i1 Q_i1) - delta,
/// where i1 selects coordinate 1 alone.
double theorem3_threshold(const DependencySpectrum& P, const DependencySpectrum& Q,
                          double eps, double delta);

struct CorrelationReport {
  int n = 0;
  double eps = 0.0;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  double lower_clamped = 0.0;  // max(lower, 0)
  double upper_clamped = 0.0;  // min(upper, 1)
  double disagreement = 0.0;   // exact or Monte-Carlo
  std::optional<double> estimate_stderr;  // present for the Monte-Carlo path
  std::string method;                     // "exact" | "mc"
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> trials;
};

CorrelationReport make_report(const DependencySpectrum& P, const DependencySpectrum& Q,
                              double eps, double disagreement);

/// Serializes the report as a JSON object (keys sorted, deterministic).
std::string report_json(const CorrelationReport& r);

}  // namespace depspec
