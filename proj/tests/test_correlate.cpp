#include <catch2/catch_amalgamated.hpp>

#include <orbitrace/correlate.hpp>
#include <orbitrace/testgen.hpp>

using namespace orb;

namespace {

MatrixWeyl wrap(const Model& m, const WeylElement& w) {
  return MatrixWeyl::scalar_mat(m, w);
}

Chain unit_chain(const Model& m) {
  return chain_single(m, {MatrixWeyl::identity(m)});
}

}  // namespace

TEST_CASE("free correlation of the unit chain") {
  for (const Model& m : reference_models(6, 8)) {
    Chain unit = unit_chain(m);
    CycloScalar trg(Rat(0), m.N);
    for (int i = 0; i < m.r; ++i) trg = trg + m.e_twist[i][i];
    ScalarK expect = ScalarK::from_hbar(HbarSeries::term(m.vacuum() * trg, 0));
    REQUIRE(free_correlation(m, unit) == FormElement::from_scalar(m, expect));
  }
}

TEST_CASE("free correlation on the fixed block") {
  Model m(1, 1, 1, 1, {});
  WeylElement y1 = WeylElement::coord(m, 0);
  WeylElement y2 = WeylElement::coord(m, 1);
  Chain c = chain_single(m, {wrap(m, y1), wrap(m, y2)});

  // one unpaired coordinate per slot: the basepoint stays a function and
  // the tail slot contributes its one-form
  FormElement expect = wedge(FormElement::from_weyl(y1),
                             d_fixed(m, FormElement::from_weyl(y2)));
  REQUIRE(free_correlation(m, c) == expect);

  SECTION("fixed-block functional agrees and guards its domain") {
    REQUIRE(tau0(m, c) == expect);
    Model mz(2, 1, 1, 2, {1});
    Chain bad = chain_single(mz, {wrap(mz, WeylElement::coord(mz, 2))});
    REQUIRE_THROWS_WITH(tau0(mz, bad), "tau0 takes fixed-block chains only");
  }
}

TEST_CASE("rotated-sector functional") {
  SECTION("closed forms in the twist eigenvalue") {
    for (int N : {2, 3, 4}) {
      Model m(1, 0, 1, N, {1});
      WeylElement z1 = WeylElement::coord(m, 0);
      WeylElement z2 = WeylElement::coord(m, 1);
      CycloScalar lam = CycloScalar::zeta(N, 1);
      CycloScalar one(Rat(1), N);
      CycloScalar det = (one - lam) * (one - lam.conjugated());
      auto val = [&](const HbarSeries& h) {
        return h.scaled(det).shifted(-1).at(0);
      };

      REQUIRE(val(tau1_direct(m, {z1, z2})) == one / (lam - one));
      REQUIRE(val(tau1_direct(m, {z2, z1})) ==
              one / (one - lam.conjugated()));
      REQUIRE(val(tau1_direct(m, {mul_plain(z1, z2)})) ==
              (lam + one) / ((lam - one) * CycloScalar(Rat(2), N)));
      REQUIRE(val(tau1_direct(m, {WeylElement::one(m), z1, z2})) ==
              lam / (lam - one));
    }
  }

  SECTION("explicit values at order two") {
    Model m(1, 0, 1, 2, {1});
    WeylElement z1 = WeylElement::coord(m, 0);
    WeylElement z2 = WeylElement::coord(m, 1);
    REQUIRE(tau1_direct(m, {z1, z2}) ==
            HbarSeries::term(CycloScalar(Rat(-1, 8), 2), 1));
    REQUIRE(tau1_direct(m, {mul_plain(z1, z2), z1, z2}) ==
            HbarSeries::term(CycloScalar(Rat(-1, 16), 2), 2));
    REQUIRE(tau1_direct(m, {mul_plain(z1, z1), mul_plain(z2, z2)}) ==
            HbarSeries::term(CycloScalar(Rat(1, 8), 2), 2));
  }

  SECTION("twisted cyclicity") {
    Model m(1, 0, 1, 2, {1});
    WeylElement z1 = WeylElement::coord(m, 0);
    WeylElement z2 = WeylElement::coord(m, 1);
    REQUIRE(tau1_direct(m, {g_act_plain(m, z2), z1}) ==
            tau1_direct(m, {z1, z2}));
    WeylElement q = mul_plain(z1, z2);
    REQUIRE(tau1_direct(m, {g_act_plain(m, z2), q, z1}) ==
            tau1_direct(m, {z1, z2, q}));
  }

  SECTION("three routes agree") {
    for (int N : {2, 3, 4}) {
      Model m(1, 0, 1, N, {1});
      WeylElement z1 = WeylElement::coord(m, 0);
      WeylElement z2 = WeylElement::coord(m, 1);
      std::vector<std::vector<WeylElement>> words = {
          {z1, z2},
          {z2, z1},
          {mul_plain(z1, z2)},
          {WeylElement::one(m), z1, z2},
          {mul_plain(z1, z1), mul_plain(z2, z2)}};
      for (const auto& word : words) {
        HbarSeries a = tau1_direct(m, word);
        REQUIRE(a == tau1_word_hat(m, word));
        REQUIRE(a == tau1_word_perp(m, word));
      }
    }
  }

  SECTION("input validation") {
    Model m(2, 1, 1, 2, {1});
    REQUIRE_THROWS_WITH(tau1_direct(m, {}), "empty tensor word");
    REQUIRE_THROWS_WITH(tau1_direct(m, {WeylElement::coord(m, 0)}),
                        "rotated-sector functional takes z-content only");
  }
}

TEST_CASE("universal trace normalization") {
  SECTION("unit argument") {
    Model m111(1, 1, 1, 1, {});
    REQUIRE(universal_trace(m111, unit_chain(m111), {}) ==
            ScalarK::from_hbar(HbarSeries::term(CycloScalar(Rat(1), 1), 0), 1));

    Model m213(2, 1, 1, 3, {1});
    REQUIRE(universal_trace(m213, unit_chain(m213), {}) ==
            ScalarK::from_hbar(HbarSeries::term(m213.vacuum(), 0), 1));

    Model m102(1, 0, 1, 2, {1});
    REQUIRE(universal_trace(m102, unit_chain(m102), {}) ==
            ScalarK::from_hbar(HbarSeries::term(CycloScalar(Rat(1, 4), 2), 0), 0));
  }

  SECTION("two fixed-block insertions cost one hbar and one u") {
    Model m(2, 1, 1, 3, {1});
    WeylElement y1 = WeylElement::coord(m, 0);
    WeylElement y2 = WeylElement::coord(m, 1);
    ScalarK tr = universal_trace(m, unit_chain(m), {wrap(m, y1), wrap(m, y2)});
    REQUIRE(tr == ScalarK::from_hbar(HbarSeries::term(m.vacuum(), -1), 0));
  }

  SECTION("mixed insertion couples both sectors") {
    Model m(2, 1, 1, 3, {1});
    WeylElement y1 = WeylElement::coord(m, 0);
    WeylElement arg2 = mul_plain(
        WeylElement::coord(m, 1),
        mul_plain(WeylElement::coord(m, 2), WeylElement::coord(m, 3)));
    ScalarK lhs = universal_trace(m, unit_chain(m), {wrap(m, y1), wrap(m, arg2)});
    CycloScalar lam = CycloScalar::zeta(3, 1);
    CycloScalar one(Rat(1), 3);
    CycloScalar s = (one + lam) / ((lam - one) * CycloScalar(Rat(2), 3));
    REQUIRE(lhs == ScalarK::from_hbar(HbarSeries::term(m.vacuum() * s, 0), 0));
  }
}

TEST_CASE("trace kills the kernel subalgebra") {
  for (const Model& m : reference_models(4, 6)) {
    Chain unit = unit_chain(m);
    auto dies = [&](const WeylElement& w, const CMatrix* cm = nullptr) {
      MatrixWeyl arg(m, m.r);
      for (int i = 0; i < m.r; ++i)
        for (int j = 0; j < m.r; ++j) {
          CycloScalar c = cm ? (*cm)[i][j]
                             : (i == j ? CycloScalar(Rat(1), m.N)
                                       : CycloScalar(Rat(0), m.N));
          arg.at(i, j) = w.scaled(c);
        }
      return universal_trace(m, unit, {arg}) == ScalarK(m.N);
    };
    auto quad = [&](int i, int j) {
      return mul_plain(WeylElement::coord(m, i), WeylElement::coord(m, j));
    };

    // fixed-block quadratics
    for (int i = 0; i < 2 * m.k; ++i)
      for (int j = i; j < 2 * m.k; ++j) REQUIRE(dies(quad(i, j)));
    // invariant rotated quadratics
    for (int i = 2 * m.k; i < m.nvars(); ++i)
      for (int j = i; j < m.nvars(); ++j)
        if ((m.g_exp(i) + m.g_exp(j)) % m.N == 0) REQUIRE(dies(quad(i, j)));
    // hbar times twist-commuting constant matrices (diagonal units here)
    for (int a = 0; a < m.r; ++a) {
      CMatrix unit_a(m.r, std::vector<CycloScalar>(m.r, CycloScalar(Rat(0), m.N)));
      unit_a[a][a] = CycloScalar(Rat(1), m.N);
      REQUIRE(dies(WeylElement::one(m).hbar_shifted(1), &unit_a));
    }
    // constants
    REQUIRE(dies(WeylElement::one(m).scaled(Rat(5, 3))));
  }
}

TEST_CASE("interacting correlation mechanics") {
  Model m(2, 1, 1, 3, {1});
  Chain unit = unit_chain(m);
  WeylElement y1 = WeylElement::coord(m, 0);
  WeylElement y2 = WeylElement::coord(m, 1);

  SECTION("no arguments reduces to the free correlation") {
    REQUIRE(interactive_correlation(m, unit, {}) == free_correlation(m, unit));
  }

  SECTION("identity insertion map is the default") {
    std::vector<MatrixWeyl> args = {wrap(m, y1), wrap(m, y2)};
    auto ident = [](const MatrixWeyl& x) { return x; };
    REQUIRE(interactive_correlation(m, unit, args) ==
            interactive_correlation(m, unit, args, ident));
  }

  SECTION("swapping two insertions flips the sign") {
    std::vector<MatrixWeyl> ab = {wrap(m, y1), wrap(m, y2)};
    std::vector<MatrixWeyl> ba = {wrap(m, y2), wrap(m, y1)};
    REQUIRE(universal_trace(m, unit, ab) ==
            universal_trace(m, unit, ba).scaled(Rat(-1)));
  }
}
