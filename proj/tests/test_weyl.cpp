#include <catch2/catch_amalgamated.hpp>

#include <orbitrace/testgen.hpp>
#include <orbitrace/weyl.hpp>

using namespace orb;

namespace {

WeylElement hbar(const Model& m, int exp = 1) {
  return WeylElement::scalar(m, HbarSeries::term(CycloScalar(Rat(1), m.N), exp));
}

}  // namespace

TEST_CASE("moyal product anchors") {
  Model m(1, 0, 1, 2, {1});
  WeylElement z1 = WeylElement::coord(m, 0);
  WeylElement z2 = WeylElement::coord(m, 1);

  WeylElement prod = mul_plain(z1, z2);
  REQUIRE(moyal(m, z1, z2) == prod + hbar(m).scaled(Rat(1, 2)));
  REQUIRE(moyal(m, z2, z1) == prod - hbar(m).scaled(Rat(1, 2)));
  REQUIRE(moyal(m, z1, z2) - moyal(m, z2, z1) == hbar(m));

  SECTION("same kernel on the fixed block") {
    Model my(1, 1, 1, 1, {});
    WeylElement y1 = WeylElement::coord(my, 0);
    WeylElement y2 = WeylElement::coord(my, 1);
    REQUIRE(moyal(my, y1, y2) - moyal(my, y2, y1) == hbar(my));
  }

  SECTION("units and scalars are central") {
    WeylElement a = mul_plain(z1, z1) + z2.scaled(Rat(3, 2));
    REQUIRE(moyal(m, WeylElement::one(m), a) == a);
    REQUIRE(moyal(m, a, WeylElement::one(m)) == a);
    REQUIRE(moyal(m, hbar(m), a) == moyal(m, a, hbar(m)));
  }
}

TEST_CASE("z-sector star products transpose into each other") {
  Model m(2, 1, 1, 2, {1});
  WeylElement z3 = WeylElement::coord(m, 2);
  WeylElement z4 = WeylElement::coord(m, 3);

  REQUIRE(hat_star(m, z3, z4) == mul_plain(z3, z4) - hbar(m).scaled(Rat(1, 2)));
  REQUIRE(perp_star(m, z3, z4) == mul_plain(z3, z4) + hbar(m).scaled(Rat(1, 2)));

  Gen gen(11);
  for (int t = 0; t < 6; ++t) {
    WeylElement a = gen.weyl(m, 2, 1, 2);
    WeylElement b = gen.weyl(m, 2, 1, 2);
    REQUIRE(hat_star(m, a, b) == perp_star(m, b, a));
    // the fixed block never contributes to either kernel
    WeylElement y = gen.weyl(Model(2, 2, 1, 1, {}), 2, 1, 1);
  }
}

TEST_CASE("star product associates and the point action is an automorphism") {
  for (const auto& m : reference_models(4, 6)) {
    if (m.r != 1) continue;
    Gen gen(101 + m.n + m.N);
    for (int t = 0; t < 8; ++t) {
      WeylElement a = gen.weyl(m, 2, 1, 2);
      WeylElement b = gen.weyl(m, 2, 1, 2);
      WeylElement c = gen.weyl(m, 2, 1, 2);
      REQUIRE(moyal(m, moyal(m, a, b), c) == moyal(m, a, moyal(m, b, c)));
      REQUIRE(g_act_plain(m, moyal(m, a, b)) ==
              moyal(m, g_act_plain(m, a), g_act_plain(m, b)));
    }
  }
}

TEST_CASE("point action on coordinates") {
  Model m(2, 1, 1, 3, {1});
  WeylElement y1 = WeylElement::coord(m, 0);
  WeylElement z3 = WeylElement::coord(m, 2);
  WeylElement z4 = WeylElement::coord(m, 3);

  REQUIRE(g_act_plain(m, y1) == y1);
  REQUIRE(g_act_plain(m, z3) == z3.scaled(m.zeta(1)));
  REQUIRE(g_act_plain(m, z4) == z4.scaled(m.zeta(-1)));
  REQUIRE(g_act_plain(m, z3, -1) == z3.scaled(m.zeta(-1)));
  REQUIRE(g_act_plain(m, mul_plain(z3, z4)) == mul_plain(z3, z4));
}

TEST_CASE("matrix point action conjugates by the coefficient twist") {
  CycloScalar zero(Rat(0), 3), one(Rat(1), 3);
  Model m(1, 0, 2, 3, {1}, {{one, zero}, {zero, CycloScalar::zeta(3, 1)}});

  MatrixWeyl e01(m, m.r);
  e01.at(0, 1) = WeylElement::one(m);
  // E e01 E^-1 picks up eigenvalue 1 * zeta^-1 on the off-diagonal slot
  MatrixWeyl expect(m, m.r);
  expect.at(0, 1) = WeylElement::one(m).scaled(m.zeta(-1));
  REQUIRE(g_act(m, e01) == expect);

  Gen gen(7);
  MatrixWeyl a = gen.matrix(m, 2, 1, 2);
  SECTION("inverse and composition") {
    REQUIRE(g_act(m, g_act(m, a, 1), -1) == a);
    REQUIRE(g_act(m, g_act(m, a, 1), 1) == g_act(m, a, 2));
    REQUIRE(g_act(m, a, m.N) == a);
  }
  SECTION("automorphism of the matrix star product") {
    MatrixWeyl b = gen.matrix(m, 2, 1, 2);
    REQUIRE(g_act(m, mat_moyal(m, a, b)) ==
            mat_moyal(m, g_act(m, a), g_act(m, b)));
  }
  SECTION("projection lands in the invariants") {
    MatrixWeyl p = invariant_project(m, a);
    REQUIRE(is_invariant(m, p));
    REQUIRE(g_act(m, p) == p);
    REQUIRE(invariant_project(m, p) == p);
  }
}

TEST_CASE("matrix products and the coefficient-matrix action") {
  CycloScalar zero(Rat(0), 3), one(Rat(1), 3);
  Model m(1, 0, 2, 3, {1}, {{one, zero}, {zero, CycloScalar::zeta(3, 1)}});

  MatrixWeyl e01(m, m.r);
  e01.at(0, 1) = WeylElement::one(m);
  REQUIRE(cmat_apply(m.e_twist, e01, true) == e01);
  MatrixWeyl right(m, m.r);
  right.at(0, 1) = WeylElement::one(m).scaled(m.zeta(1));
  REQUIRE(cmat_apply(m.e_twist, e01, false) == right);

  SECTION("identity and trace") {
    MatrixWeyl id = MatrixWeyl::identity(m);
    Gen gen(5);
    MatrixWeyl a = gen.matrix(m, 2, 1, 2);
    REQUIRE(mat_moyal(m, id, a) == a);
    REQUIRE(mat_moyal(m, a, id) == a);
    REQUIRE(MatrixWeyl::scalar_mat(m, WeylElement::one(m)) == id);
    REQUIRE(id.trace() == WeylElement::one(m) + WeylElement::one(m));
    // trace is symmetric for the plain product of constant matrices
    MatrixWeyl b = gen.matrix(m, 0, 1, 1);
    MatrixWeyl c = gen.matrix(m, 0, 1, 1);
    REQUIRE(mat_mul_plain(b, c).trace() == mat_mul_plain(c, b).trace());
  }
}

TEST_CASE("grading operators") {
  Model m(1, 1, 1, 1, {});
  WeylElement y1 = WeylElement::coord(m, 0);
  WeylElement y2 = WeylElement::coord(m, 1);

  SECTION("spot values") {
    REQUIRE(gm_nabla(hbar(m)) == hbar(m));
    REQUIRE(gm_nabla(y1) == y1.scaled(Rat(1, 2)));
    WeylElement w = mul_plain(y1, y2).hbar_shifted(2);
    REQUIRE(gm_nabla(w) == w.scaled(Rat(3)));
    REQUIRE(euler_lie(w) == w.scaled(Rat(1)));
    REQUIRE(euler_lie(hbar(m)) == WeylElement::zero(m));
  }

  SECTION("derivation over the star product") {
    for (const auto& mm : reference_models(4, 6)) {
      if (mm.r != 1) continue;
      Gen gen(23 + mm.N);
      for (int t = 0; t < 6; ++t) {
        WeylElement a = gen.weyl(mm, 2, 1, 2);
        WeylElement b = gen.weyl(mm, 2, 1, 2);
        REQUIRE(gm_nabla(moyal(mm, a, b)) ==
                moyal(mm, gm_nabla(a), b) + moyal(mm, a, gm_nabla(b)));
      }
    }
  }
}

TEST_CASE("block restrictions") {
  Model m(2, 1, 1, 2, {1});
  WeylElement y1 = WeylElement::coord(m, 0);
  WeylElement z3 = WeylElement::coord(m, 2);
  WeylElement mixed = y1 + z3 + mul_plain(y1, z3);

  // sigma_z sets the rotated block to zero, sigma_y the fixed block
  REQUIRE(sigma_z(m, mixed) == y1);
  REQUIRE(sigma_y(m, mixed) == z3);
  REQUIRE(pure_y(m, y1));
  REQUIRE(pure_z(m, z3));
  REQUIRE_FALSE(pure_y(m, mixed));
  REQUIRE_FALSE(pure_z(m, mixed));
  // constants belong to both blocks
  REQUIRE(pure_y(m, WeylElement::one(m)));
  REQUIRE(pure_z(m, WeylElement::one(m)));
}

TEST_CASE("weight truncation clips coefficient claims") {
  Model m(1, 0, 1, 2, {1}, {}, 6, 2);
  WeylElement z1 = WeylElement::coord(m, 0);
  Mono deg1(m.nvars(), 0);
  deg1[0] = 1;
  // a literal within budget keeps its exact claim
  REQUIRE(z1.coeff(deg1).trunc() == kExact);

  // an over-budget coefficient narrows the claim to what the weight allows
  WeylElement hot = WeylElement::zero(m);
  hot.add_term(deg1, HbarSeries::term(CycloScalar(Rat(1), 2), 1));
  REQUIRE(hot.coeff(deg1).is_zero());
  REQUIRE(hot.coeff(deg1).trunc() == 0);

  WeylElement cube = mul_plain(z1, mul_plain(z1, z1));
  Mono deg3(m.nvars(), 0);
  deg3[0] = 3;
  // a degree-3 monomial is over budget: nothing known, claim below zero
  REQUIRE(cube.coeff(deg3).is_zero());
  REQUIRE(cube.coeff(deg3).trunc() < 0);

  WeylElement z2 = WeylElement::coord(m, 1);
  WeylElement st = moyal(m, z1, z2);
  // the hbar/2 correction has weight 2 and survives the budget
  REQUIRE(st.coeff(Mono(m.nvars(), 0)).at(1) == CycloScalar(Rat(1, 2), 2));
}
