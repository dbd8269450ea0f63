#pragma once

#include "forms.hpp"
#include "weyl.hpp"

namespace orb {

// One tensor word: a K-scalar prefactor and slot values M_0 (x) ... (x) M_m.
struct ChainTerm {
  ScalarK coef;
  std::vector<MatrixWeyl> slots;
};

// Homogeneous linear combination of tensor words; slots beyond the first
// live in the quotient by scalar multiples of the identity.
struct Chain {
  std::vector<ChainTerm> terms;

  int arity() const { return terms.empty() ? -1 : int(terms[0].slots.size()); }

  void push(ScalarK c, std::vector<MatrixWeyl> slots) {
    if (!terms.empty() && slots.size() != terms[0].slots.size())
      throw error("mixed slot counts in one chain");
    terms.push_back({std::move(c), std::move(slots)});
  }

  friend Chain operator+(const Chain& a, const Chain& b) {
    Chain out = a;
    for (const auto& t : b.terms) out.push(t.coef, t.slots);
    return out;
  }
  friend Chain operator-(const Chain& a, const Chain& b) {
    Chain out = a;
    for (const auto& t : b.terms) out.push(-t.coef, t.slots);
    return out;
  }
  Chain scaled(const ScalarK& s) const {
    Chain out = *this;
    for (auto& t : out.terms) t.coef = t.coef * s;
    return out;
  }
};

inline Chain chain_single(const Model& m, std::vector<MatrixWeyl> slots) {
  Chain c;
  c.push(ScalarK::from_hbar(HbarSeries::term(CycloScalar(Rat(1), m.N), 0)),
         std::move(slots));
  return c;
}

// Full scalar part of a matrix: the identity component whose removal
// normalizes representatives of the quotient slots.
inline HbarSeries identity_component(const MatrixWeyl& M) {
  if (M.e.empty()) return HbarSeries(1);
  int nv = M.e[0].nvars();
  Mono unit(nv, 0);
  HbarSeries acc = M.at(0, 0).coeff(unit);
  for (int i = 1; i < M.r; ++i) acc = acc + M.at(i, i).coeff(unit);
  return acc.scaled(Rat(1, M.r));
}

// Canonical representative: strip identity summands from the quotient
// slots and drop dead words.
inline Chain canonicalize(const Model& m, const Chain& c) {
  Chain out;
  for (const auto& t : c.terms) {
    if (t.coef.is_zero()) continue;
    ChainTerm nt = t;
    bool dead = nt.slots[0].is_zero();
    for (size_t i = 1; i < nt.slots.size() && !dead; ++i) {
      HbarSeries id = identity_component(nt.slots[i]);
      if (!id.is_zero()) {
        MatrixWeyl sub = MatrixWeyl::identity(m).scaled(id);
        nt.slots[i] = nt.slots[i] - sub;
      }
      dead = nt.slots[i].is_zero();
    }
    if (!dead) out.terms.push_back(std::move(nt));
  }
  return out;
}

// Multilinear expansion over the coefficient field: elementary tensors of
// entry/monomial basis elements, with all hbar and u powers pulled out
// front.  Assumes nonnegative hbar exponents in the slots, which holds for
// every chain the boundary operators see.
inline std::map<std::string, CycloScalar> chain_normal_form(const Model& m,
                                                            const Chain& c,
                                                            int* min_trunc) {
  int mt = kExact;
  std::map<std::string, CycloScalar> nf;
  Chain cc = canonicalize(m, c);
  for (const auto& t : cc.terms) {
    for (const auto& s : t.slots)
      for (const auto& w : s.e)
        for (const auto& [mono, h] : w.terms()) mt = std::min(mt, h.trunc());
    for (const auto& [u, h] : t.coef.coeffs()) mt = std::min(mt, h.trunc());
  }
  for (const auto& t : cc.terms) {
    struct Piece {
      std::string key;
      int hexp;
      CycloScalar val;
    };
    std::vector<std::vector<Piece>> factors;
    for (const auto& s : t.slots) {
      std::vector<Piece> ps;
      for (int i = 0; i < s.r; ++i)
        for (int j = 0; j < s.r; ++j)
          for (const auto& [mono, h] : s.at(i, j).terms())
            for (const auto& [e, cv] : h.coeffs()) {
              std::string k = std::to_string(i) + "," + std::to_string(j) + ":";
              for (auto x : mono) k += std::to_string(int(x)) + ".";
              ps.push_back({k, e, cv});
            }
      factors.push_back(std::move(ps));
    }
    for (const auto& [u, h] : t.coef.coeffs())
      for (const auto& [e0, c0] : h.coeffs()) {
        std::vector<size_t> idx(factors.size(), 0);
        bool any_empty = false;
        for (const auto& f : factors) any_empty = any_empty || f.empty();
        if (any_empty) continue;
        while (true) {
          int J = e0;
          CycloScalar val = c0;
          std::string key = "u" + std::to_string(u) + "|";
          for (size_t s = 0; s < factors.size(); ++s) {
            const Piece& p = factors[s][idx[s]];
            J += p.hexp;
            val = val * p.val;
            key += p.key + "|";
          }
          key = "h" + std::to_string(J) + "|" + key;
          if (mt == kExact || J <= mt) {
            auto [it, fresh] = nf.emplace(key, val);
            if (!fresh) {
              it->second = it->second + val;
              if (it->second.is_zero()) nf.erase(it);
            }
          }
          size_t s = 0;
          while (s < idx.size() && ++idx[s] == factors[s].size()) {
            idx[s] = 0;
            ++s;
          }
          if (s == idx.size()) break;
        }
      }
  }
  if (min_trunc) *min_trunc = mt;
  return nf;
}

inline bool chain_is_zero(const Model& m, const Chain& c) {
  return chain_normal_form(m, c, nullptr).empty();
}
inline bool chain_equal(const Model& m, const Chain& a, const Chain& b) {
  if (!a.terms.empty() && !b.terms.empty() && a.arity() != b.arity())
    return false;
  Chain d = a.terms.empty() ? b : (b.terms.empty() ? a : a - b);
  if (a.terms.empty() && b.terms.empty()) return true;
  return chain_is_zero(m, d);
}

inline Chain chain_g_act(const Model& m, const Chain& c, long power = 1) {
  Chain out = c;
  for (auto& t : out.terms)
    for (auto& s : t.slots) s = g_act(m, s, power);
  return out;
}

inline bool chain_invariant(const Model& m, const Chain& c) {
  return chain_equal(m, c, chain_g_act(m, c));
}

// Twisted Hochschild boundary.  The holonomy sits in the gap between slot 0
// and slot 1, so the first face pulls M_1 across it: (M_0 * g(M_1)).  The
// remaining faces, including the wrap-around one, merge slots plainly.
inline Chain b_twisted(const Model& m, const Chain& c) {
  Chain out;
  for (const auto& t : c.terms) {
    int mm = int(t.slots.size()) - 1;
    if (mm < 1) continue;
    {
      // (M_0 * g M_1) (x) M_2 ... M_m
      std::vector<MatrixWeyl> s;
      s.push_back(mat_moyal(m, t.slots[0], g_act(m, t.slots[1])));
      for (int j = 2; j <= mm; ++j) s.push_back(t.slots[j]);
      out.push(t.coef, std::move(s));
    }
    for (int i = 1; i < mm; ++i) {
      // (-1)^i  M_0 ... (M_i * M_{i+1}) ... M_m
      std::vector<MatrixWeyl> s;
      for (int j = 0; j < i; ++j) s.push_back(t.slots[j]);
      s.push_back(mat_moyal(m, t.slots[i], t.slots[i + 1]));
      for (int j = i + 2; j <= mm; ++j) s.push_back(t.slots[j]);
      out.push(i % 2 ? -t.coef : t.coef, std::move(s));
    }
    {
      // (-1)^m  (M_m * M_0) (x) M_1 ... M_{m-1}
      std::vector<MatrixWeyl> s;
      s.push_back(mat_moyal(m, t.slots[mm], t.slots[0]));
      for (int i = 1; i < mm; ++i) s.push_back(t.slots[i]);
      out.push(mm % 2 ? -t.coef : t.coef, std::move(s));
    }
  }
  return canonicalize(m, out);
}

// Twisted Connes operator; defined on invariant chains only.  Rotating a
// slot backwards across the gap between slot 0 and slot 1 undoes the
// holonomy, so every slot that crosses it, slot 0 included, picks up the
// inverse action.  This is the unique companion of the boundary above:
// with the crossing slots dressed by g instead, the mixed anticommutator
// with b picks up a nonzero residue on invariant chains.
inline Chain B_twisted(const Model& m, const Chain& c) {
  if (!chain_invariant(m, c))
    throw error("cyclic coboundary needs an invariant chain");
  Chain out;
  for (const auto& t : c.terms) {
    int mm = int(t.slots.size()) - 1;
    for (int i = 0; i <= mm; ++i) {
      // (-1)^{mi}  1 (x) g^-1(M_{m-i+1}) ... g^-1(M_m) (x) g^-1(M_0)
      //              (x) M_1 ... M_{m-i}
      std::vector<MatrixWeyl> s;
      s.push_back(MatrixWeyl::identity(m));
      for (int j = mm - i + 1; j <= mm; ++j)
        s.push_back(g_act(m, t.slots[j], -1));
      s.push_back(g_act(m, t.slots[0], -1));
      for (int j = 1; j <= mm - i; ++j) s.push_back(t.slots[j]);
      bool neg = (mm * i) % 2 != 0;
      out.push(neg ? -t.coef : t.coef, std::move(s));
    }
  }
  return canonicalize(m, out);
}

// All (p,q)-interleavings keeping relative order; every slot value is
// even, so no signs arise.
inline std::vector<std::vector<MatrixWeyl>> shuffles(
    const std::vector<MatrixWeyl>& xs, const std::vector<MatrixWeyl>& ys) {
  std::vector<std::vector<MatrixWeyl>> out;
  size_t p = xs.size(), q = ys.size();
  std::vector<bool> pick(p + q, false);  // true = take from xs
  std::fill(pick.begin(), pick.begin() + p, true);
  std::sort(pick.begin(), pick.end());
  do {
    std::vector<MatrixWeyl> w;
    size_t ix = 0, iy = 0;
    for (bool fromx : pick) w.push_back(fromx ? xs[ix++] : ys[iy++]);
    out.push_back(std::move(w));
  } while (std::next_permutation(pick.begin(), pick.end()));
  return out;
}

// Trace of the plain matrix product with the coefficient twist inserted
// between slot 0 and slot 1: tr(M_0 E M_1 ... M_m).
inline WeylElement tr_twisted(const Model& m,
                              const std::vector<MatrixWeyl>& slots) {
  MatrixWeyl acc = cmat_apply(m.e_twist, slots[0], false);
  for (size_t i = 1; i < slots.size(); ++i)
    acc = mat_mul_plain(acc, slots[i]);
  return acc.trace();
}

// Grading connection extended to chains as a derivation over the slots,
// with hbar d/dhbar also hitting the prefactor.
inline Chain gm_nabla(const Chain& c) {
  Chain out;
  for (const auto& t : c.terms) {
    for (size_t i = 0; i < t.slots.size(); ++i) {
      ChainTerm nt = t;
      nt.slots[i] = gm_nabla(nt.slots[i]);
      out.push(nt.coef, nt.slots);
    }
    ScalarK dc(t.coef.order());
    for (const auto& [u, h] : t.coef.coeffs()) {
      HbarSeries hh(h.order(), h.trunc());
      for (const auto& [j, cc] : h.coeffs())
        hh.set(j, cc * CycloScalar(Rat(j), h.order()));
      dc.set_u(u, hh);
    }
    if (!dc.is_zero()) out.push(dc, t.slots);
  }
  return out;
}

}  // namespace orb
