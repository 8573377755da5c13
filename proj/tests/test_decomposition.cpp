#include <doctest.h>

#include <cmath>
#include <sstream>

#include "depspec/decomposition.hpp"
#include "oracles.hpp"

using namespace depspec;

namespace {

const ProductSource kUniform2{2, 0.5};

BooleanFunction constant_zero(int n) {
  return {n, std::vector<std::uint8_t>(1u << n, 0)};
}

}  // namespace

TEST_CASE("center: constant, dictator, and") {
  const RealCenteredFunction c0 = center(constant_zero(3), ProductSource{3, 0.5});
  CHECK(c0.q == doctest::Approx(0.0));
  CHECK((c0.values == 0.0).all());

  const RealCenteredFunction dict = center(make_dictator(2), kUniform2);
  CHECK(dict.q == doctest::Approx(0.5));
  for (std::uint32_t x = 0; x < 4; ++x)
    CHECK(std::abs(dict.values[x]) == doctest::Approx(0.5));

  // q = 1/4; the single 1-input carries 1-q, the rest -q
  const RealCenteredFunction a = center(make_and(2), kUniform2);
  CHECK(a.q == doctest::Approx(0.25));
  CHECK(a.values[0b11] == doctest::Approx(0.75));
  CHECK(a.values[0b00] == doctest::Approx(-0.25));
  CHECK(a.values[0b01] == doctest::Approx(-0.25));
  CHECK(a.values[0b10] == doctest::Approx(-0.25));
}

TEST_CASE("center invariants: zero mean, variance q(1-q)") {
  for (const double p : {0.3, 0.5}) {
    for (int n = 1; n <= 8; ++n) {
      const ProductSource src{n, p};
      const Eigen::ArrayXd w = probability_vector(src);
      for (int s = 0; s < 10; ++s) {
        const auto f = center(oracles::random_function(n, 100u * n + s), src);
        CHECK(std::abs((w * f.values).sum()) < 1e-12);
        CHECK(std::abs((w * f.values.square()).sum() - f.q * (1.0 - f.q)) < 1e-12);
      }
    }
  }
}

TEST_CASE("conditional expectation: parity, full mask, empty mask") {
  const auto parity = center(make_parity(2), kUniform2);
  const Eigen::ArrayXd on_first = conditional_expectation(parity, {0b10, 2}, kUniform2);
  REQUIRE(on_first.size() == 2);
  CHECK(std::abs(on_first[0]) < 1e-15);
  CHECK(std::abs(on_first[1]) < 1e-15);

  const auto any = center(oracles::random_function(4, 5), ProductSource{4, 0.5});
  const Eigen::ArrayXd full = conditional_expectation(any, all_ones(4), ProductSource{4, 0.5});
  CHECK(((full - any.values).abs() < 1e-15).all());

  const Eigen::ArrayXd none = conditional_expectation(any, zero_mask(4), ProductSource{4, 0.5});
  REQUIRE(none.size() == 1);
  CHECK(std::abs(none[0]) < 1e-12);
}

TEST_CASE("decompose: parity and dictator concentrate on one mask") {
  const auto d_parity = decompose(center(make_parity(2), kUniform2), kUniform2);
  CHECK((d_parity.components[0b01].abs() < 1e-12).all());
  CHECK((d_parity.components[0b10].abs() < 1e-12).all());
  const auto parity = center(make_parity(2), kUniform2);
  CHECK(((d_parity.components[0b11] - parity.values).abs() < 1e-12).all());

  const auto d_dict = decompose(center(make_dictator(2), kUniform2), kUniform2);
  const auto dict = center(make_dictator(2), kUniform2);
  CHECK(((d_dict.components[0b10] - dict.values).abs() < 1e-12).all());
  CHECK((d_dict.components[0b01].abs() < 1e-12).all());
  CHECK((d_dict.components[0b11].abs() < 1e-12).all());
}

TEST_CASE("decompose AND: signs (+,-,-,+) on the top component") {
  const auto d = decompose(center(make_and(2), kUniform2), kUniform2);
  // single-coordinate components take +/- 1/4 by that coordinate's value
  CHECK(d.components[0b10][0b11] == doctest::Approx(0.25));
  CHECK(d.components[0b10][0b00] == doctest::Approx(-0.25));
  CHECK(d.components[0b01][0b11] == doctest::Approx(0.25));
  CHECK(d.components[0b01][0b10] == doctest::Approx(-0.25));
  const auto& top = d.components[0b11];
  CHECK(top[0b11] == doctest::Approx(0.25));
  CHECK(top[0b10] == doctest::Approx(-0.25));
  CHECK(top[0b01] == doctest::Approx(-0.25));
  CHECK(top[0b00] == doctest::Approx(0.25));
}

TEST_CASE("decomposition properties on random functions") {
  for (const double p : {0.3, 0.5}) {
    for (const int n : {2, 3, 4, 5, 6}) {
      const ProductSource src{n, p};
      const Eigen::ArrayXd w = probability_vector(src);
      const std::uint32_t size = 1u << n;
      for (int s = 0; s < 20; ++s) {
        const auto f = center(oracles::random_function(n, 7'000u + 31u * n + s), src);
        const auto d = decompose(f, src);

        // reconstruction
        Eigen::ArrayXd sum = Eigen::ArrayXd::Zero(size);
        for (const auto& comp : d.components) sum += comp;
        CHECK(((sum - f.values).abs() < 1e-10).all());

        // components constant on fibers of their mask
        for (std::uint32_t i = 0; i < size; ++i)
          for (std::uint32_t x = 0; x < size; ++x)
            CHECK(d.components[i][x] == doctest::Approx(d.components[i][x & i]).epsilon(1e-12));

        // orthogonality of distinct components (Gram matrix off-diagonals)
        Eigen::MatrixXd comps(size, size);
        for (std::uint32_t i = 0; i < size; ++i) comps.row(i) = d.components[i].matrix();
        const Eigen::MatrixXd gram =
            comps * w.matrix().asDiagonal() * comps.transpose();
        for (std::uint32_t i = 0; i < size; ++i)
          for (std::uint32_t k = 0; k < size; ++k)
            if (i != k) CHECK(std::abs(gram(i, k)) < 1e-10);
      }
    }
  }
}

TEST_CASE("projection and vanishing conditionals") {
  const int n = 5;
  const ProductSource src{n, 0.3};
  const auto f = center(oracles::random_function(n, 99), src);
  const auto d = decompose(f, src);
  for (std::uint32_t i = 0; i < (1u << n); ++i) {
    for (std::uint32_t k = 0; k < (1u << n); ++k) {
      if ((i & k) != i) continue;  // need i <= k
      const Eigen::ArrayXd cond = conditional_expectation(d.components[i], {k, n}, src);
      if (i == k && i != (1u << n) - 1) {
        // projecting onto the component's own coordinates leaves it unchanged
        for (std::uint32_t x = 0; x < (1u << n); ++x)
          CHECK(cond[extract_bits(x, k)] == doctest::Approx(d.components[i][x]).epsilon(1e-12));
      }
      if (i != k) continue;
    }
    // conditioning strictly below the mask kills the component
    for (const auto& sub : strict_submasks({i, n})) {
      const Eigen::ArrayXd cond = conditional_expectation(d.components[i], sub, src);
      CHECK((cond.abs() < 1e-10).all());
    }
  }
}

TEST_CASE("spectrum: parity, dictator, and") {
  const auto sp_parity = spectrum(center(make_parity(2), kUniform2), kUniform2);
  CHECK(sp_parity.variances[0b11] == doctest::Approx(0.25));
  CHECK(sp_parity.variances[0b10] == doctest::Approx(0.0));
  CHECK(sp_parity.variances[0b01] == doctest::Approx(0.0));
  CHECK(sp_parity.total == doctest::Approx(0.25));

  const auto sp_dict = spectrum(center(make_dictator(4), ProductSource{4, 0.5}),
                                ProductSource{4, 0.5});
  CHECK(sp_dict.variances[standard_basis(1, 4).bits] == doctest::Approx(0.25));
  CHECK(sp_dict.total == doctest::Approx(0.25));

  const auto sp_and = spectrum(center(make_and(2), kUniform2), kUniform2);
  CHECK(sp_and.variances[0b10] == doctest::Approx(1.0 / 16));
  CHECK(sp_and.variances[0b01] == doctest::Approx(1.0 / 16));
  CHECK(sp_and.variances[0b11] == doctest::Approx(1.0 / 16));
  CHECK(sp_and.total == doctest::Approx(3.0 / 16));
}

TEST_CASE("spectrum equals the materialized-component oracle") {
  for (const double p : {0.3, 0.5}) {
    for (const int n : {2, 4, 6, 8}) {
      const ProductSource src{n, p};
      for (int s = 0; s < (n <= 6 ? 25 : 10); ++s) {
        const auto f = center(oracles::random_function(n, 500u * n + s), src);
        const auto direct = spectrum(f, src);
        const auto via_components = spectrum_from_components(decompose(f, src), src);
        CHECK(((direct.variances - via_components.variances).abs() < 1e-9).all());
        CHECK(std::abs(direct.total - f.q * (1.0 - f.q)) < 1e-9);
      }
    }
  }
}

TEST_CASE("spectrum routes agree at the decomposition cap") {
  const int n = 10;
  const ProductSource src{n, 0.3};
  const auto f = center(oracles::random_function(n, 4242), src);
  const auto direct = spectrum(f, src);
  const auto via_components = spectrum_from_components(decompose(f, src), src);
  CHECK(((direct.variances - via_components.variances).abs() < 1e-9).all());
}

TEST_CASE("spectrum is permutation-equivariant") {
  const int n = 6;
  const ProductSource src{n, 0.5};
  const std::vector<int> perm{2, 0, 4, 5, 1, 3};
  for (int s = 0; s < 10; ++s) {
    const auto e = oracles::random_function(n, 800u + s);
    BooleanFunction e_perm{n, std::vector<std::uint8_t>(1u << n, 0)};
    for (std::uint32_t x = 0; x < (1u << n); ++x)
      e_perm.table[x] = e.table[permute_word(x, perm, n)];
    const auto sp = spectrum(center(e, src), src);
    const auto sp_perm = spectrum(center(e_perm, src), src);
    for (std::uint32_t i = 0; i < (1u << n); ++i)
      CHECK(sp_perm.variances[i] ==
            doctest::Approx(sp.variances[permute_word(i, perm, n)]).epsilon(1e-10));
  }
}

TEST_CASE("level mass") {
  const auto sp_dict = spectrum(center(make_dictator(3), ProductSource{3, 0.5}),
                                ProductSource{3, 0.5});
  CHECK(level_mass(sp_dict, 1, standard_basis(1, 3)) == doctest::Approx(0.0));

  const auto sp_parity = spectrum(center(make_parity(4), ProductSource{4, 0.5}),
                                  ProductSource{4, 0.5});
  CHECK(level_mass(sp_parity, 3, standard_basis(1, 4)) == doctest::Approx(0.0));

  const auto sp_and = spectrum(center(make_and(2), kUniform2), kUniform2);
  CHECK(level_mass(sp_and, 1, standard_basis(1, 2)) == doctest::Approx(1.0 / 16));
}

TEST_CASE("dimension caps") {
  const ProductSource src11{11, 0.5};
  const auto f11 = center(constant_zero(11), src11);
  CHECK_THROWS_AS(decompose(f11, src11), dimension_cap_error);
  const ProductSource src17{17, 0.5};
  const auto f17 = center(constant_zero(17), src17);
  CHECK_THROWS_AS(spectrum(f17, src17), dimension_cap_error);
  CHECK_THROWS_AS(probability_vector(ProductSource{30, 0.5}), dimension_cap_error);
  CHECK_THROWS_AS(center(constant_zero(4), ProductSource{5, 0.5}), dimension_mismatch_error);
}

TEST_CASE("spectrum csv format") {
  const auto sp = spectrum(center(make_parity(3), ProductSource{3, 0.5}),
                           ProductSource{3, 0.5});
  std::ostringstream os;
  write_spectrum_csv(os, sp);
  CHECK(os.str() ==
        "mask,weight,variance\n"
        "000,0,0\n"
        "001,1,0\n"
        "010,1,0\n"
        "100,1,0\n"
        "011,2,0\n"
        "101,2,0\n"
        "110,2,0\n"
        "111,3,0.25\n");
}
