#include <catch2/catch_amalgamated.hpp>

#include <orbitrace/chains.hpp>
#include <orbitrace/testgen.hpp>

using namespace orb;

namespace {

ScalarK u_var(const Model& m) {
  return ScalarK::from_hbar(HbarSeries::term(CycloScalar(Rat(1), m.N), 0), 1);
}

// Mixed-arity element of the cyclic complex and its total differential.
using Tower = std::map<int, Chain>;

Tower total_diff(const Model& m, const Tower& x) {
  Tower out;
  auto add = [&](int a, const Chain& c) {
    if (c.terms.empty()) return;
    Chain& dst = out[a];
    for (const auto& t : c.terms) dst.push(t.coef, t.slots);
  };
  for (const auto& [a, c] : x) {
    add(a - 1, b_twisted(m, c));
    add(a + 1, B_twisted(m, c).scaled(u_var(m)));
  }
  return out;
}

std::vector<Model> cyclicity_models() {
  std::vector<Model> out = reference_models(4, 6);
  CycloScalar z2(Rat(0), 2), o2(Rat(1), 2);
  out.push_back(Model(1, 0, 3, 2, {1},
                      {{o2, z2, z2},
                       {z2, CycloScalar::zeta(2, 1), z2},
                       {z2, z2, CycloScalar::zeta(2, 1)}},
                      4, 6));
  CycloScalar z3(Rat(0), 3), o3(Rat(1), 3);
  out.push_back(Model(2, 1, 3, 3, {1},
                      {{o3, z3, z3},
                       {z3, CycloScalar::zeta(3, 1), z3},
                       {z3, z3, CycloScalar::zeta(3, 2)}},
                      4, 6));
  return out;
}

}  // namespace

TEST_CASE("chain plumbing") {
  Model m(1, 0, 1, 2, {1});
  auto wrap = [&](const WeylElement& w) { return MatrixWeyl::scalar_mat(m, w); };
  WeylElement z1 = WeylElement::coord(m, 0), z2 = WeylElement::coord(m, 1);

  SECTION("terms of one chain share an arity") {
    Chain c = chain_single(m, {wrap(z1), wrap(z2)});
    REQUIRE_THROWS_WITH(c.push(ScalarK::constant(Rat(1), m.N), {wrap(z1)}),
                        "mixed slot counts in one chain");
  }

  SECTION("identity summands in later slots are quotiented away") {
    WeylElement shifted = z2 + WeylElement::one(m).scaled(Rat(3));
    REQUIRE(chain_equal(m, chain_single(m, {wrap(z1), wrap(shifted)}),
                        chain_single(m, {wrap(z1), wrap(z2)})));
    // slot 0 keeps its identity component
    REQUIRE_FALSE(chain_equal(m, chain_single(m, {wrap(shifted), wrap(z1)}),
                              chain_single(m, {wrap(z2), wrap(z1)})));
  }

  SECTION("difference of equal representatives is zero") {
    Chain c = chain_single(m, {wrap(z1), wrap(z2)});
    REQUIRE(chain_is_zero(m, c - c));
    REQUIRE_FALSE(chain_is_zero(m, c));
    REQUIRE(chain_is_zero(m, c + c.scaled(ScalarK::constant(Rat(-1), m.N))));
  }

  SECTION("point action on chains") {
    Chain c = chain_single(m, {wrap(z1)});
    REQUIRE(chain_equal(m, chain_g_act(m, c),
                        c.scaled(ScalarK::constant(Rat(-1), m.N))));
    REQUIRE(chain_equal(m, chain_g_act(m, c, m.N), c));
    REQUIRE_FALSE(chain_invariant(m, c));
    REQUIRE(chain_invariant(m, chain_single(m, {wrap(mul_plain(z1, z2))})));
  }
}

TEST_CASE("twisted hochschild boundary") {
  Model m(1, 0, 1, 2, {1});
  auto wrap = [&](const WeylElement& w) { return MatrixWeyl::scalar_mat(m, w); };
  WeylElement z1 = WeylElement::coord(m, 0), z2 = WeylElement::coord(m, 1);

  SECTION("two-slot anchor") {
    // first face twists slot 1: z1 * g(z2) = -(z1 * z2); the wrap face
    // subtracts z2 * z1, so the stars' symmetric parts add up
    Chain c = chain_single(m, {wrap(z1), wrap(z2)});
    Chain expect = chain_single(m, {wrap(mul_plain(z1, z2).scaled(Rat(-2)))});
    REQUIRE(chain_equal(m, b_twisted(m, c), expect));
  }

  SECTION("single-slot chains are cycles") {
    REQUIRE(b_twisted(m, chain_single(m, {wrap(z1)})).terms.empty());
  }
}

TEST_CASE("twisted cyclic coboundary") {
  Model m(1, 0, 1, 2, {1});
  auto wrap = [&](const WeylElement& w) { return MatrixWeyl::scalar_mat(m, w); };
  WeylElement z1 = WeylElement::coord(m, 0), z2 = WeylElement::coord(m, 1);
  WeylElement q = mul_plain(z1, z2);

  SECTION("single-slot anchor") {
    Chain expect = chain_single(m, {MatrixWeyl::identity(m), wrap(q)});
    REQUIRE(chain_equal(m, B_twisted(m, chain_single(m, {wrap(q)})), expect));
  }

  SECTION("non-invariant input is rejected") {
    REQUIRE_THROWS_WITH(B_twisted(m, chain_single(m, {wrap(z1)})),
                        "cyclic coboundary needs an invariant chain");
  }
}

TEST_CASE("differential identities on seeded invariant chains") {
  for (const auto& m : reference_models(4, 6)) {
    Gen gen(71 + m.n + m.N + m.r);
    for (int arity : {2, 3}) {
      Chain c = gen.invariant_chain(m, arity, 2, 1);
      Chain bc = b_twisted(m, c);
      Chain Bc = B_twisted(m, c);
      REQUIRE(chain_is_zero(m, b_twisted(m, bc)));
      REQUIRE(chain_is_zero(m, B_twisted(m, Bc)));
      REQUIRE(chain_is_zero(m, b_twisted(m, Bc) + B_twisted(m, bc)));
    }
  }
}

TEST_CASE("total differential squares to zero") {
  Model m = reference_models(4, 6)[7];  // twisted rank-2 model at N = 3
  REQUIRE(m.r == 2);
  REQUIRE(m.N == 3);
  Gen gen(83);
  Tower x{{2, gen.invariant_chain(m, 2, 2, 1)}};
  Tower dd = total_diff(m, total_diff(m, x));
  for (const auto& [a, c] : dd) REQUIRE(chain_is_zero(m, c));
}

TEST_CASE("twisted trace is cyclic up to holonomy conjugation") {
  for (const auto& m : cyclicity_models()) {
    Gen gen(29 + m.n + m.N + m.r);
    for (int arity : {2, 3, 4}) {
      for (int t = 0; t < 3; ++t) {
        std::vector<MatrixWeyl> slots;
        for (int s = 0; s < arity; ++s) slots.push_back(gen.matrix(m, 2, 1, 2));
        std::vector<MatrixWeyl> rot;
        rot.push_back(cmat_apply(m.e_twist,
                                 cmat_apply(m.e_twist_inv, slots[1], false),
                                 true));
        for (int i = 2; i < arity; ++i) rot.push_back(slots[i]);
        rot.push_back(slots[0]);
        REQUIRE(tr_twisted(m, slots) == tr_twisted(m, rot));
      }
    }
  }
}

TEST_CASE("grading connection on chains") {
  Model m(1, 0, 1, 2, {1});
  auto wrap = [&](const WeylElement& w) { return MatrixWeyl::scalar_mat(m, w); };
  WeylElement q = mul_plain(WeylElement::coord(m, 0), WeylElement::coord(m, 1));

  SECTION("prefactor and slot weights add") {
    Chain c;
    c.push(ScalarK::from_hbar(HbarSeries::term(CycloScalar(Rat(1), m.N), 2)),
           {wrap(q)});
    // two from the prefactor hbars plus one from the quadratic slot
    REQUIRE(chain_equal(m, gm_nabla(c), c.scaled(ScalarK::constant(Rat(3), m.N))));
  }

  SECTION("commutes with both differentials") {
    for (const auto& mm : reference_models(4, 6)) {
      Gen gen(91 + mm.n + mm.N + mm.r);
      Chain c = gen.invariant_chain(mm, 2, 2, 1);
      REQUIRE(chain_equal(mm, gm_nabla(b_twisted(mm, c)),
                          b_twisted(mm, gm_nabla(c))));
      REQUIRE(chain_equal(mm, gm_nabla(B_twisted(mm, c)),
                          B_twisted(mm, gm_nabla(c))));
    }
  }
}

TEST_CASE("shuffles interleave preserving relative order") {
  Model m(1, 0, 1, 2, {1});
  auto wrap = [&](const WeylElement& w) { return MatrixWeyl::scalar_mat(m, w); };
  std::vector<MatrixWeyl> xs = {wrap(WeylElement::coord(m, 0)),
                                wrap(WeylElement::coord(m, 1))};
  std::vector<MatrixWeyl> ys = {wrap(WeylElement::one(m).scaled(Rat(2)))};

  auto sh = shuffles(xs, ys);
  REQUIRE(sh.size() == 3);
  for (const auto& w : sh) {
    REQUIRE(w.size() == 3);
    // xs entries keep their order
    std::vector<int> pos;
    for (size_t i = 0; i < w.size(); ++i) {
      if (w[i] == xs[0]) pos.push_back(0);
      if (w[i] == xs[1]) pos.push_back(1);
    }
    REQUIRE(pos == std::vector<int>{0, 1});
  }
  REQUIRE(shuffles(xs, xs).size() == 6);
  REQUIRE(shuffles(xs, {}).size() == 1);
}
