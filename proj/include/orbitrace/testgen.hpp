#pragma once

#include <random>
#include <vector>

#include "orbitrace/chains.hpp"
#include "orbitrace/model.hpp"
#include "orbitrace/weyl.hpp"

// Seeded random element generators for property tests, plus the fixed
// list of small reference models the verification suites run over.

namespace orb {

inline std::vector<Model> reference_models(int hbar_trunc = 6,
                                           int weight_trunc = 8) {
  struct Spec {
    int n, k, N;
    std::vector<int> eigs;
  };
  const std::vector<Spec> specs = {
      {1, 0, 2, {1}},
      {1, 1, 1, {}},
      {2, 1, 2, {1}},
      {2, 1, 3, {1}},
  };
  std::vector<Model> out;
  for (const auto& sp : specs)
    for (int r : {1, 2}) {
      CMatrix twist;
      if (r == 2 && sp.N > 1) {
        // a genuinely nontrivial coefficient twist of order N
        CycloScalar zero(Rat(0), sp.N), one(Rat(1), sp.N);
        twist = {{one, zero}, {zero, CycloScalar::zeta(sp.N, 1)}};
      }
      out.push_back(
          Model(sp.n, sp.k, r, sp.N, sp.eigs, twist, hbar_trunc, weight_trunc));
    }
  return out;
}

struct Gen {
  std::mt19937_64 rng;

  explicit Gen(std::uint64_t seed) : rng(seed) {}

  int uniform(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  }

  Rat rat() {
    int num = uniform(-3, 3);
    if (num == 0) num = 1;
    return Rat(num, uniform(1, 3));
  }

  CycloScalar root_coef(const Model& m) {
    CycloScalar c(rat(), m.N);
    int p = uniform(0, m.N - 1);
    if (p > 0) c = c * CycloScalar::zeta(m.N, p);
    return c;
  }

  HbarSeries series(const Model& m, int max_h) {
    return HbarSeries::term(root_coef(m), uniform(0, max_h));
  }

  Mono mono(const Model& m, int max_deg) {
    Mono mo(m.nvars(), 0);
    int deg = uniform(0, max_deg);
    for (int i = 0; i < deg; ++i) ++mo[uniform(0, m.nvars() - 1)];
    return mo;
  }

  WeylElement weyl(const Model& m, int max_deg, int max_h, int nterms) {
    WeylElement out = WeylElement::zero(m);
    for (int t = 0; t < nterms; ++t)
      out.add_term(mono(m, max_deg), series(m, max_h));
    return out;
  }

  MatrixWeyl matrix(const Model& m, int max_deg, int max_h, int nterms) {
    MatrixWeyl out(m, m.r);
    for (int i = 0; i < m.r; ++i)
      for (int j = 0; j < m.r; ++j)
        out.at(i, j) = weyl(m, max_deg, max_h, nterms);
    return out;
  }

  // Group-average a random chain; retry until the projection is nonzero.
  Chain invariant_chain(const Model& m, int arity, int max_deg, int max_h,
                        int nterms = 1) {
    for (int attempt = 0; attempt < 64; ++attempt) {
      std::vector<MatrixWeyl> slots;
      for (int s = 0; s < arity; ++s)
        slots.push_back(matrix(m, max_deg, max_h, nterms));
      Chain c = chain_single(m, slots);
      Chain proj;
      for (int j = 0; j < m.N; ++j) {
        Chain g = chain_g_act(m, c, j);
        for (auto& t : g.terms) {
          t.coef = t.coef.scaled(Rat(1, m.N));
          proj.push(t.coef, t.slots);
        }
      }
      proj = canonicalize(m, proj);
      if (!chain_is_zero(m, proj)) return proj;
    }
    throw error("could not draw a nonzero invariant chain");
  }
};

}  // namespace orb
