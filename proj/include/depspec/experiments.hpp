#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "depspec/corrbounds.hpp"
#include "depspec/rng.hpp"
#include "depspec/slcs.hpp"

namespace depspec {

// Encoder families the experiment drivers can realize.
enum class EncoderScheme { kSlcs, kUncoded, kConstant };

std::string scheme_label(EncoderScheme s);

/// Realizes one encoder draw for a scheme. Uncoded is the identity map,
/// constant maps everything to the all-zeros word; both ignore the seed.
VectorEncoder realize_encoder(EncoderScheme scheme, const SlcsConfig& c, std::uint64_t seed);

// --- Low-weight concentration ------------------------------------------

struct ConcentrationRow {
  int n = 0;
  int m = 0;          // weight cutoff
  double gamma = 0.0;
  int k = 1;          // output coordinate whose spectrum is measured
  double empirical_prob = 0.0;  // fraction of draws with level mass >= gamma
  double markov_bound = 0.0;    // mean level mass / gamma
  int draws = 0;
  std::uint64_t seed = 0;
};

struct ConcentrationGrid {
  std::vector<int> ns{4, 6, 8, 10};
  std::vector<int> ms{1, 2, 3};
  std::vector<double> gammas{0.02, 0.05, 0.1};
  int k = 1;
  int draws = 200;
  int jobs = 1;
};

/// For every encoder draw, builds coordinate function k, computes its
/// spectrum, and sums the variances over masks of weight <= m (coordinate
/// k's own mask excluded). Rows aggregate the exceedance frequency against
/// gamma and the Markov estimate from the same draws.
std::vector<ConcentrationRow> run_concentration(const SlcsConfig& base,
                                                const ConcentrationGrid& grid,
                                                EncoderScheme scheme,
                                                std::uint64_t master_seed);

// --- Correlation collapse ------------------------------------------------

struct CollapseRow {
  int n = 0;
  double eps = 0.0;
  double disagreement_estimate = 0.0;  // mean over draws
  double threshold_estimate = 0.0;     // mean realized collapse threshold
  double fraction_above_threshold = 0.0;
  double delta = 0.0;
  bool shared_encoder = false;
  int draws = 0;
  std::uint64_t seed = 0;
};

struct CollapseGrid {
  std::vector<double> eps_grid{0.0, 0.05, 0.1, 0.2};
  std::vector<int> ns{4, 6, 8, 10};
  double delta = 0.05;
  int draws = 200;
  bool shared = false;  // both terminals reuse one encoder draw
  int jobs = 1;
};

/// Draws encoder pairs (independent draws, or one shared draw), measures the
/// first-coordinate disagreement P(E_1(X^n) != F_1(Y^n)) exactly for
/// n <= 10 (Monte-Carlo above), and compares it per draw against the
/// collapse threshold computed from the realized spectra.
std::vector<CollapseRow> run_collapse(const SlcsConfig& base, const CollapseGrid& grid,
                                      std::uint64_t master_seed);

// --- Interference channel ------------------------------------------------

struct IccsParams {
  double delta = 0.1;   // crossover of the binary channel to receiver 1
  int q_ary = 4;        // alphabet of the second channel input
  double eps = 0.1;     // per-coordinate P(X != Y)
  double alpha_x = 0.5; // P(X = 1)
  double alpha_y = 0.5; // P(Y = 1); determined by alpha_x and eps
  int n = 8;
};

void validate(const IccsParams& p);

struct ChannelOutput {
  int y1 = 0;      // x1 through the binary symmetric channel
  int y2 = 0;      // q-ary symbol, valid only when !erased
  bool erased = false;
};

/// One channel use: receiver 2 sees x21 cleanly iff x22 equals x1,
/// otherwise an erasure.
ChannelOutput channel_step(int x1, int x21, int x22, const IccsParams& p, RandomStream& rng);

/// Per-coordinate agreement (1/n) sum_i P(bit_i(enc1(X)) == bit_i(enc22(Y)))
/// under the correlated pair source. Exact for n <= 10, Monte-Carlo above.
double agreement_rate(const VectorEncoder& enc1, const VectorEncoder& enc22,
                      const CorrelatedPairSource& src);

/// Per-symbol cap on H(Z) implied by the agreement rate:
/// 1 + agreement * log2(q).
double hz_bound(double agreement, int q_ary);

struct IccsReport {
  std::string scheme;
  int n = 0;
  double agreement_rate = 0.0;
  double agreement_stderr = 0.0;  // across encoder draws
  double hz_bound_bits = 0.0;
  double empirical_erasure_rate = 0.0;
  int draws = 0;
  std::uint64_t seed = 0;
};

/// Realizes each scheme's encoders (enc22's dependence on Z^n is modeled by
/// drawing z^n per draw and seeding the second encoder from it), measures
/// agreement and the H(Z) cap, and simulates channel erasures.
std::vector<IccsReport> run_iccs_comparison(const IccsParams& params, const SlcsConfig& slcs_base,
                                            const std::vector<EncoderScheme>& schemes, int draws,
                                            std::uint64_t seed);

// --- CSV serialization (deterministic, timestamp-free) -------------------

std::string concentration_csv(const std::vector<ConcentrationRow>& rows);
std::string collapse_csv(const std::vector<CollapseRow>& rows);
std::string iccs_csv(const std::vector<IccsReport>& rows);

// --- Trend assertions -----------------------------------------------------

// Empty when all trend properties hold; otherwise one message per violation.
// Tolerances are one-sided: equality allowed, significant movement against
// the trend rejected (4 pooled binomial standard errors).
std::vector<std::string> concentration_trend_violations(
    const std::vector<ConcentrationRow>& rows);
std::vector<std::string> collapse_trend_violations(const std::vector<CollapseRow>& rows);
std::vector<std::string> iccs_trend_violations(const std::vector<IccsReport>& rows);

}  // namespace depspec
