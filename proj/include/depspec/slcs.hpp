#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "depspec/decomposition.hpp"

namespace depspec {

enum class CodebookMode {
  kUniformTypical,  // codewords drawn uniformly from the typical set
  kIidProduct,      // each codeword i.i.d. product P_U
};

// Parameters of the typicality-encoding scheme. The codebook holds
// ceil(2^(n*rate)) words; joint typicality is the strict max-norm test on
// the four normalized joint-type counts against P_{U,X}.
struct SlcsConfig {
  int n = 8;
  double rate = 0.5;               // bits per symbol, >= 0
  Eigen::Matrix2d p_u_given_x{};   // (x, u) entry = P(U=u | X=x); rows sum to 1
  double p_x = 0.5;                // P(X = 1)
  double eps_typ = 0.3;            // typicality slack
  CodebookMode mode = CodebookMode::kUniformTypical;
  std::uint64_t seed = 1;
};

SlcsConfig default_slcs_config(int n);

// Derived single-letter quantities.
double p_u_one(const SlcsConfig& c);
double joint_prob(const SlcsConfig& c, int u, int x);  // P_{U,X}(u, x)
std::uint64_t codebook_size(const SlcsConfig& c);

void validate(const SlcsConfig& c);

// Words u with |w_H(u)/n - P_U(1)| < eps_typ, in increasing order.
struct TypicalSet {
  int n = 0;
  std::vector<std::uint32_t> members;
};

bool is_typical(std::uint32_t u, const SlcsConfig& c);
TypicalSet build_typical_set(const SlcsConfig& c);

// Joint type of a pair of m-bit words: l_ut counts positions with the given
// (u-bit, x-bit) values; the four counts sum to m.
struct JointTypeClass {
  int m = 0;
  int l00 = 0, l01 = 0, l10 = 0, l11 = 0;
};

JointTypeClass joint_type(std::uint32_t u, std::uint32_t x, int m);
bool jointly_typical(const JointTypeClass& t, const SlcsConfig& c);

/// Draws the codebook for the configured mode; deterministic in c.seed.
std::vector<std::uint32_t> generate_codebook(const SlcsConfig& c);

struct EncodeResult {
  std::uint32_t word = 0;
  bool failure = false;  // no jointly typical codeword; fell back to uniform
};

/// Uniform draw over the codebook entries jointly typical with x. On an
/// empty intersection, returns a uniform draw over the whole codebook with
/// the failure flag set.
EncodeResult typicality_encode(const std::vector<std::uint32_t>& codebook, std::uint32_t x,
                               const SlcsConfig& c, std::uint64_t input_seed);

// Full encoder realized as a truth table, one output word per input word.
struct VectorEncoder {
  int n = 0;
  std::vector<std::uint32_t> table;
  std::vector<std::uint8_t> failure_flags;
};

/// Realizes the encoder over every input. Each input draws with its own seed
/// derived from (c.seed, x), so inputs are conditionally independent given
/// the codebook and the table reproduces exactly. Requires n <= 12.
VectorEncoder build_encoder(const SlcsConfig& c);
VectorEncoder build_encoder(const SlcsConfig& c, const std::vector<std::uint32_t>& codebook);

/// Boolean function of output coordinate k (1-based).
BooleanFunction coordinate_function(const VectorEncoder& enc, int k);

double failure_rate(const VectorEncoder& enc);

/// P(E_i(X^m) = v | X^m = x) for encoding uniform over the full conditional
/// typical set, evaluated by the joint-type counting ratio
///   sum over typical types of C(l_t*-1, l_{v,t*}-1) C(l_other, l_{v,other})
///   over the same sum without the coordinate pinned,
/// with exact integer binomials. Requires m <= 20. Throws if the conditional
/// typical set is empty.
double single_letter_marginal(const SlcsConfig& c, int m, std::uint32_t x, int coordinate,
                              int v);

// Correlation between the outputs at two fixed inputs across encoder draws.
struct PairCorrelation {
  int draws_used = 0;        // draws where neither input fell back
  double fallback_fraction = 0.0;
  double max_abs_correlation = 0.0;
  bool degenerate = false;   // every bit had zero variance (or no usable draws)
};

/// Estimates per-output-bit correlation between enc(x) and enc(y) over
/// `draws` independent encoder draws, using only draws where neither input
/// required the fallback path.
PairCorrelation pair_output_correlation(const SlcsConfig& c, std::uint32_t x, std::uint32_t y,
                                        int draws, std::uint64_t seed);

struct PairwiseIndependenceReport {
  int pairs_tested = 0;
  int pairs_requested = 0;
  double max_abs_correlation = 0.0;
  double stderr_scale = 0.0;  // ~1/sqrt(draws used) for a near-zero correlation
  bool degenerate = false;
};

/// Samples input pairs whose jointly-typical candidate sets are disjoint and
/// checks that the encoder outputs are uncorrelated across draws.
PairwiseIndependenceReport check_pairwise_independence(const SlcsConfig& c, int draws,
                                                       std::uint64_t seed);

struct PermutationInvarianceReport {
  int probes = 0;
  double max_abs_difference = 0.0;
  double max_stderr = 0.0;  // stderr of the difference at the maximizing probe
};

/// Compares P(enc(x) = u) with P(enc(perm(x)) = perm(u)) across encoder
/// draws for sampled probe pairs (x, u).
PermutationInvarianceReport check_permutation_invariance(const SlcsConfig& c,
                                                         const std::vector<int>& perm,
                                                         int draws, std::uint64_t seed);

// Deviation of the conditional output-bit law from its single-letter
// projection at blocklength m, over inputs with a nonempty conditional
// typical set. The source-weighted deviation is the variational distance
// between the joint input/output-bit law and its single-letter product; the
// max is reported alongside it but is window-limited and need not shrink.
struct SingleLetterDeviationRow {
  int m = 0;
  double weighted_deviation = 0.0;  // sum_x P(x) |P(E_1=1|x) - P(E_1=1|x_1)|
  double max_abs_deviation = 0.0;
  double excluded_mass = 0.0;  // source mass of inputs with empty typical set
};

std::vector<SingleLetterDeviationRow> single_letter_deviation_trend(const SlcsConfig& c,
                                                                    const std::vector<int>& ms);

/// One line per input, `x_bits u_bits failure_flag`, preceded by a single
/// JSON header line with the full configuration.
void dump_encoder(std::ostream& os, const VectorEncoder& enc, const SlcsConfig& c);

/// Configuration as JSON (used by the dump header and run manifests).
std::string config_json_line(const SlcsConfig& c);

}  // namespace depspec
