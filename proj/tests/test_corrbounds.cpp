#include <doctest.h>

#include <cmath>

#include "depspec/corrbounds.hpp"
#include "oracles.hpp"

using namespace depspec;

namespace {

DependencySpectrum spectrum_of(const BooleanFunction& e, double p) {
  const ProductSource src{e.n, p};
  return spectrum(center(e, src), src);
}

}  // namespace

TEST_CASE("dictator pair: lower = eps, upper = 1 - eps") {
  const auto sp = spectrum_of(make_dictator(4), 0.5);
  for (const double eps : {0.0, 0.05, 0.1, 0.25, 0.4, 0.5}) {
    const auto [lo, hi] = theorem1_bounds(sp, sp, eps);
    CHECK(lo == doctest::Approx(eps).epsilon(1e-12));
    CHECK(hi == doctest::Approx(1.0 - eps).epsilon(1e-12));
  }
}

TEST_CASE("parity pair: lower = (1 - (1-2eps)^n) / 2") {
  for (const int n : {2, 3, 5, 8}) {
    const auto sp = spectrum_of(make_parity(n), 0.5);
    for (const double eps : {0.0, 0.1, 0.3}) {
      const auto [lo, hi] = theorem1_bounds(sp, sp, eps);
      CHECK(lo == doctest::Approx(oracles::parity_disagreement(n, eps)).epsilon(1e-12));
    }
  }
}

TEST_CASE("independent outputs: eps = 1/2 drops every cross term") {
  const auto sp = spectrum_of(oracles::random_function(5, 3), 0.5);
  const auto sq = spectrum_of(oracles::random_function(5, 4), 0.5);
  const auto [lo, hi] = theorem1_bounds(sp, sq, 0.5);
  CHECK(lo == doctest::Approx(2.0 * std::sqrt(sp.total) * std::sqrt(sq.total)).epsilon(1e-12));
  CHECK(hi == doctest::Approx(1.0 - lo).epsilon(1e-12));
}

TEST_CASE("bounds validate eps and dimensions") {
  const auto sp = spectrum_of(make_parity(3), 0.5);
  const auto sq = spectrum_of(make_parity(4), 0.5);
  CHECK_THROWS_AS(theorem1_bounds(sp, sp, 0.7), std::invalid_argument);
  CHECK_THROWS_AS(theorem1_bounds(sp, sp, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(theorem1_bounds(sp, sq, 0.1), dimension_mismatch_error);
}

TEST_CASE("exact disagreement: dictator, identical functions, parity") {
  const auto dict = make_dictator(3);
  CHECK(exact_disagreement(dict, dict, {3, 0.5, 0.1}) == doctest::Approx(0.1).epsilon(1e-12));

  const auto f = oracles::random_function(5, 12);
  CHECK(exact_disagreement(f, f, {5, 0.5, 0.0}) == doctest::Approx(0.0));

  const auto par3 = make_parity(3);
  CHECK(exact_disagreement(par3, par3, {3, 0.5, 0.1}) ==
        doctest::Approx(oracles::parity_disagreement(3, 0.1)).epsilon(1e-12));
  CHECK(oracles::parity_disagreement(3, 0.1) == doctest::Approx(0.244));
}

TEST_CASE("exact disagreement matches (x, y) enumeration") {
  for (const double p : {0.3, 0.5}) {
    for (const double eps : {0.0, 0.17, 0.5}) {
      const CorrelatedPairSource src{4, p, eps};
      for (int s = 0; s < 10; ++s) {
        const auto e = oracles::random_function(4, 40u + s);
        const auto f = oracles::random_function(4, 80u + s);
        CHECK(exact_disagreement(e, f, src) ==
              doctest::Approx(oracles::disagreement_by_xy_enumeration(e, f, src))
                  .epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("theorem 1 sandwich on random pairs") {
  for (const int n : {2, 4, 6}) {
    for (const double eps : {0.0, 0.05, 0.1, 0.25, 0.5}) {
      for (int s = 0; s < 40; ++s) {
        const auto e = oracles::random_function(n, 1000u * n + s);
        const auto f = oracles::random_function(n, 2000u * n + s);
        const auto [lo, hi] = theorem1_bounds(spectrum_of(e, 0.5), spectrum_of(f, 0.5), eps);
        const double d = exact_disagreement(e, f, {n, 0.5, eps});
        CHECK(lo - 1e-9 <= d);
        CHECK(d <= hi + 1e-9);
      }
    }
  }
}

TEST_CASE("lower bound is monotone in eps for fixed spectra") {
  const auto sp = spectrum_of(oracles::random_function(6, 77), 0.5);
  const auto sq = spectrum_of(oracles::random_function(6, 78), 0.5);
  double prev = -1.0;
  for (const double eps : {0.0, 0.1, 0.2, 0.3, 0.4, 0.5}) {
    const double lo = theorem1_bounds(sp, sq, eps).first;
    CHECK(lo >= prev - 1e-12);
    prev = lo;
  }
}

TEST_CASE("monte carlo tracks the exact value and reproduces") {
  const auto dict = make_dictator(6);
  const CorrelatedPairSource src{6, 0.5, 0.1};
  const auto mc = mc_disagreement(dict, dict, src, 100000, 99);
  CHECK(std::abs(mc.estimate - 0.1) < 4.0 * mc.stderr_);

  const auto mc2 = mc_disagreement(dict, dict, src, 100000, 99);
  CHECK(mc.estimate == mc2.estimate);

  // eps = 0 with identical functions never disagrees
  const auto zero = mc_disagreement(dict, dict, {6, 0.5, 0.0}, 1000, 5);
  CHECK(zero.estimate == 0.0);

  // closed form at a blocklength beyond the exhaustive cap
  const auto par12 = make_parity(12);
  const auto big = mc_disagreement(par12, par12, {12, 0.5, 0.05}, 200000, 7);
  CHECK(std::abs(big.estimate - oracles::parity_disagreement(12, 0.05)) < 4.0 * big.stderr_);
}

TEST_CASE("monte carlo stays within four standard errors of exact") {
  const CorrelatedPairSource src{6, 0.5, 0.12};
  const auto e = oracles::random_function(6, 21);
  const auto f = oracles::random_function(6, 22);
  const double exact = exact_disagreement(e, f, src);
  int within = 0;
  const int runs = 100;
  for (int s = 0; s < runs; ++s) {
    const auto mc = mc_disagreement(e, f, src, 20000, 9000u + s);
    if (std::abs(mc.estimate - exact) < 4.0 * mc.stderr_) ++within;
  }
  CHECK(within >= 99);
}

TEST_CASE("collapse threshold closed forms") {
  // all mass on one high-weight mask: 2 sqrt(PQ) with no single-letter term
  const auto sp_par = spectrum_of(make_parity(4), 0.5);
  CHECK(theorem3_threshold(sp_par, sp_par, 0.1, 0.0) == doctest::Approx(0.5).epsilon(1e-12));

  // dictator: reduces to eps at delta = 0
  const auto sp_dict = spectrum_of(make_dictator(4), 0.5);
  for (const double eps : {0.0, 0.1, 0.3})
    CHECK(theorem3_threshold(sp_dict, sp_dict, eps, 0.0) ==
          doctest::Approx(eps).epsilon(1e-12));

  // delta absorbs the whole expression
  const double full = theorem3_threshold(sp_par, sp_par, 0.1, 0.0);
  CHECK(theorem3_threshold(sp_par, sp_par, 0.1, full) == doctest::Approx(0.0));
}

TEST_CASE("report carries clamped values and serializes deterministically") {
  // low-weight spectra at small eps make the raw lower bound negative
  const auto sp = spectrum_of(make_dictator(3), 0.5);
  CorrelationReport r = make_report(sp, sp, 0.0, 0.0);
  r.method = "exact";
  CHECK(r.lower_clamped >= 0.0);
  CHECK(r.upper_clamped <= 1.0);
  CHECK(r.lower_clamped == doctest::Approx(std::max(r.lower_bound, 0.0)));
  const std::string j1 = report_json(r);
  const std::string j2 = report_json(r);
  CHECK(j1 == j2);
  CHECK(j1.find("\"method\": \"exact\"") != std::string::npos);
  CHECK(j1.find("stderr") == std::string::npos);
}
