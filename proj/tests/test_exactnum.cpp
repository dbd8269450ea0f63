#include <catch2/catch_amalgamated.hpp>

#include <orbitrace/model.hpp>
#include <orbitrace/scalar_k.hpp>
#include <orbitrace/testgen.hpp>

using namespace orb;

TEST_CASE("cyclotomic arithmetic in the power basis") {
  CycloScalar z3 = CycloScalar::zeta(3, 1);
  CycloScalar one3(Rat(1), 3);

  SECTION("norm of 1 - zeta3") {
    CycloScalar a = one3 - z3;
    CycloScalar b = one3 - z3.conjugated();
    REQUIRE(a * b == CycloScalar(Rat(3), 3));
  }
  SECTION("explicit inverse") {
    // 1/(1 - zeta3) = (2 + zeta3)/3, checked against the norm above
    CycloScalar inv = one3 / (one3 - z3);
    REQUIRE(inv == (CycloScalar(Rat(2), 3) + z3) * CycloScalar(Rat(1, 3), 3));
  }
  SECTION("power-basis reduction") {
    CycloScalar z4 = CycloScalar::zeta(4, 1);
    REQUIRE(z4 * z4 == CycloScalar(Rat(-1), 4));
    CycloScalar z6 = CycloScalar::zeta(6, 1);
    REQUIRE(z6 * z6 - z6 + CycloScalar(Rat(1), 6) == CycloScalar(Rat(0), 6));
  }
  SECTION("conjugation is the inverse root") {
    for (int N : {2, 3, 4, 5, 6, 8, 12}) {
      CycloScalar z = CycloScalar::zeta(N, 1);
      REQUIRE(z * z.conjugated() == CycloScalar(Rat(1), N));
    }
  }
  SECTION("random nonzero elements invert") {
    Gen gen(11);
    for (int N : {2, 3, 4, 5, 6, 8, 12}) {
      Model m(1, 0, 1, N, {1});
      for (int t = 0; t < 10; ++t) {
        CycloScalar c = gen.root_coef(m);
        if (c == CycloScalar(Rat(0), N)) continue;
        REQUIRE(c * c.inverse() == CycloScalar(Rat(1), N));
      }
    }
  }
  SECTION("division by zero reported") {
    REQUIRE_THROWS_AS(CycloScalar(Rat(0), 3).inverse(), error);
  }
}

TEST_CASE("hbar series ring laws") {
  Model m(1, 0, 1, 3, {1});
  Gen gen(23);
  for (int t = 0; t < 12; ++t) {
    HbarSeries a = gen.series(m, 3), b = gen.series(m, 3),
               c = gen.series(m, 3);
    REQUIRE((a * b) * c == a * (b * c));
    REQUIRE((a + b) * c == a * c + b * c);
    REQUIRE(a * b == b * a);
  }
}

TEST_CASE("truncation is a validity claim") {
  // exact * exact stays exact; a finite claim caps the product's claim
  HbarSeries x = HbarSeries::term(CycloScalar(Rat(1), 2), 1);
  REQUIRE(x.trunc() == kExact);
  REQUIRE((x * x).trunc() == kExact);
  HbarSeries capped(2, 3);
  capped.set(1, CycloScalar(Rat(5), 2));
  REQUIRE((x * capped).trunc() == 4);  // shifts by the exact factor's order
  SECTION("equality only compares shared known orders") {
    HbarSeries a(2, 2), b(2, 2);
    a.set(1, CycloScalar(Rat(1), 2));
    b.set(1, CycloScalar(Rat(1), 2));
    b.set(5, CycloScalar(Rat(7), 2));  // beyond the claim, must be ignored
    REQUIRE(a == b);
  }
}

TEST_CASE("scalar coefficients in u and hbar") {
  ScalarK s = ScalarK::from_hbar(HbarSeries::term(CycloScalar(Rat(3), 2), 1), 2);
  SECTION("shift moves both exponents") {
    ScalarK t = s.shifted(-2, 1);
    REQUIRE(t.coeffs().count(0) == 1);
    REQUIRE(t.coeffs().at(0).at(2) == CycloScalar(Rat(3), 2));
  }
  SECTION("scaling acts on the coefficient") {
    ScalarK t = s.scaled(Rat(1, 3));
    REQUIRE(t.coeffs().at(2).at(1) == CycloScalar(Rat(1), 2));
  }
  SECTION("ring laws on random scalars") {
    Gen gen(37);
    Model m(1, 0, 1, 4, {1});
    auto draw = [&]() {
      ScalarK out(4);
      out.set_u(-1, gen.series(m, 2));
      out.set_u(2, gen.series(m, 2));
      return out;
    };
    for (int t = 0; t < 8; ++t) {
      ScalarK a = draw(), b = draw(), c = draw();
      REQUIRE((a * b) * c == a * (b * c));
      REQUIRE((a + b) * c == a * c + b * c);
    }
  }
}
