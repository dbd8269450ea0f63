#include <catch2/catch_amalgamated.hpp>

#include <orbitrace/parse.hpp>
#include <orbitrace/testgen.hpp>

using namespace orb;
using Catch::Matchers::ContainsSubstring;

TEST_CASE("model constructor validates its data") {
  CycloScalar zero(Rat(0), 2), one(Rat(1), 2);

  REQUIRE_THROWS_WITH(Model(0, 0, 1, 2, {}), "need 0 <= k <= n, n >= 1");
  REQUIRE_THROWS_WITH(Model(1, 2, 1, 1, {}), "need 0 <= k <= n, n >= 1");
  REQUIRE_THROWS_WITH(Model(1, 0, 0, 2, {1}), "bundle rank must be positive");
  REQUIRE_THROWS_WITH(Model(1, 0, 1, 0, {1}), "twist order must be positive");
  REQUIRE_THROWS_WITH(Model(1, 0, 1, 2, {}),
                      ContainsSubstring("eigenvalue exponents"));
  REQUIRE_THROWS_WITH(Model(1, 0, 1, 2, {2}),
                      "rotated directions must have nontrivial eigenvalue");
  REQUIRE_THROWS_WITH(Model(1, 0, 1, 2, {1}, {{one, zero}, {zero, one}}),
                      "coefficient twist must be 1x1");
  REQUIRE_THROWS_WITH(Model(1, 0, 2, 2, {1}, {{one, zero}, {one}}),
                      "coefficient twist is not square");
  REQUIRE_THROWS_WITH(Model(1, 0, 1, 2, {1}, {{CycloScalar(Rat(2), 2)}}),
                      "coefficient twist does not have order dividing 2");
}

TEST_CASE("model accessors") {
  Model m(2, 1, 1, 3, {1});

  SECTION("coordinate names split into fixed and rotated blocks") {
    REQUIRE(m.nvars() == 4);
    REQUIRE(m.ny() == 2);
    REQUIRE(m.nz() == 2);
    REQUIRE(m.var_name(0) == "y1");
    REQUIRE(m.var_name(1) == "y2");
    REQUIRE(m.var_name(2) == "z3");
    REQUIRE(m.var_name(3) == "z4");
    REQUIRE(m.is_y(1));
    REQUIRE_FALSE(m.is_y(2));
  }

  SECTION("twist exponents cancel across conjugate pairs") {
    REQUIRE(m.g_exp(0) == 0);
    REQUIRE(m.g_exp(1) == 0);
    REQUIRE(m.g_exp(2) == 1);
    REQUIRE(m.g_exp(3) == -1);
  }

  SECTION("roots of unity") {
    REQUIRE(m.zeta(3) == CycloScalar(Rat(1), 3));
    REQUIRE(m.zeta(1) + m.zeta(2) == CycloScalar(Rat(-1), 3));
  }

  SECTION("poisson tensor pairs i with i + half within each block") {
    REQUIRE(m.pi1(0, 1) == Rat(1, 2));
    REQUIRE(m.pi1(1, 0) == Rat(-1, 2));
    REQUIRE(m.pi1(0, 2) == Rat(0));
    REQUIRE(m.pi2(2, 3) == Rat(1, 2));
    REQUIRE(m.pi2(3, 2) == Rat(-1, 2));
    REQUIRE(m.pi2(0, 1) == Rat(0));
    REQUIRE(m.omega(0, 1) == Rat(1));
    REQUIRE(m.omega(2, 3) == Rat(1));
  }
}

TEST_CASE("vacuum normalization") {
  CycloScalar quarter(Rat(1, 4), 2);
  REQUIRE(Model(1, 0, 1, 2, {1}).vacuum() == quarter);
  REQUIRE(Model(1, 1, 1, 1, {}).vacuum() == CycloScalar(Rat(1), 1));
  REQUIRE(Model(1, 0, 1, 3, {1}).vacuum() == CycloScalar(Rat(1, 3), 3));
  REQUIRE(Model(2, 1, 1, 3, {1}).vacuum() == CycloScalar(Rat(1, 3), 3));
}

TEST_CASE("stored propagator kernels") {
  Model m(1, 0, 1, 2, {1});
  // lambda = -1 on the single rotated direction
  REQUIRE(m.p12(0, 1) == CycloScalar(Rat(-1, 4), 2));
  REQUIRE(m.p3(0, 1) == CycloScalar(Rat(1, 4), 2));
  REQUIRE(m.p2(0, 1) == CycloScalar(Rat(0), 2));
  REQUIRE(m.p2(0, 1) - m.p3(0, 1) == -CycloScalar(m.pi2_local(0, 1) / 2, 2));
  REQUIRE(m.p12(1, 1) == CycloScalar(Rat(0), 2));
}

TEST_CASE("reference model list") {
  auto models = reference_models(4, 6);
  REQUIRE(models.size() == 8);
  for (const auto& m : models) {
    REQUIRE(m.hbar_trunc == 4);
    REQUIRE(m.weight_trunc == 6);
    REQUIRE((m.r == 1 || m.r == 2));
    if (m.r == 2 && m.N > 1)
      REQUIRE(m.e_twist[1][1] == CycloScalar::zeta(m.N, 1));
  }
}

TEST_CASE("model json loader") {
  SECTION("round trip with a coefficient twist") {
    json j;
    j["n"] = 2;
    j["k"] = 1;
    j["r"] = 2;
    j["N"] = 3;
    j["perp_eigs"] = json::array({1});
    j["e_twist"] = json::array(
        {json::array({"1", "0"}), json::array({"0", "zeta3"})});
    j["hbar_trunc"] = 4;
    j["weight_trunc"] = 6;
    Model m = model_from_json(j);
    REQUIRE(m.n == 2);
    REQUIRE(m.k == 1);
    REQUIRE(m.r == 2);
    REQUIRE(m.N == 3);
    REQUIRE(m.perp_eigs == std::vector<int>{1});
    REQUIRE(m.hbar_trunc == 4);
    REQUIRE(m.weight_trunc == 6);
    REQUIRE(m.e_twist[1][1] == CycloScalar::zeta(3, 1));
    REQUIRE(m.e_twist_inv[1][1] == CycloScalar::zeta(3, 2));
  }

  SECTION("truncations default when absent") {
    Model m = model_from_json(
        json{{"n", 1}, {"k", 1}, {"r", 1}, {"N", 1}});
    REQUIRE(m.hbar_trunc == 6);
    REQUIRE(m.weight_trunc == 8);
  }

  SECTION("malformed files are rejected") {
    REQUIRE_THROWS_WITH(model_from_json(json::array()),
                        "model file must hold a JSON object");
    REQUIRE_THROWS_WITH(
        model_from_json(json{{"k", 0}, {"r", 1}, {"N", 2}}),
        "model field 'n' must be an integer");
    REQUIRE_THROWS_WITH(
        model_from_json(json{{"n", 1}, {"k", 0}, {"r", 1}, {"N", 2},
                             {"perp_eigs", "1"}}),
        "model field 'perp_eigs' must be an array of integers");
    REQUIRE_THROWS_WITH(
        model_from_json(json{{"n", 1}, {"k", 1}, {"r", 1}, {"N", 1},
                             {"e_twist", "1"}}),
        "model field 'e_twist' must be a matrix");
  }
}
