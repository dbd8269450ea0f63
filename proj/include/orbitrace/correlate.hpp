#pragma once

#include "chains.hpp"
#include "simplex.hpp"

namespace orb {

// Restriction of a form to the fixed block: rotated coordinates and their
// generators are set to zero.
inline FormElement sigma_z_form(const Model& m, const FormElement& f) {
  FormElement out(f.nvars(), f.wtrunc());
  for (const auto& [key, c] : f.terms()) {
    bool pure = true;
    for (int v = 2 * m.k; v < m.nvars() && pure; ++v)
      pure = key.mono[v] == 0 && !(key.mask & (GMask(1) << v));
    if (pure) out.add_term(key, c);
  }
  return out;
}

namespace detail {

// One partially-contracted tensor word: accumulated kernel scalar, hbar
// power, slot forms, and the multiset of fixed-block lines whose clock
// weight is integrated at the end.
struct CorrWord {
  CycloScalar val;
  int hpow = 0;
  std::vector<FormMatrix> slots;
  std::vector<std::pair<int, int>> yedges;
};

class FreeCorrelator {
 public:
  explicit FreeCorrelator(const Model& m) : m_(m) {}

  FormElement eval(const Chain& c) {
    FormElement total = FormElement::zero(m_);
    for (const auto& t : c.terms) {
      FormElement v = eval_word(t.slots);
      total = total + v.scaled(t.coef);
    }
    return total;
  }

  FormElement eval_word(const std::vector<MatrixWeyl>& slots) {
    acc_ = FormElement::zero(m_);
    CorrWord w;
    w.val = CycloScalar(Rat(1), m_.N);
    w.slots.push_back(FormMatrix::from_weyl(slots[0]));
    for (size_t i = 1; i < slots.size(); ++i) {
      FormMatrix f = FormMatrix::from_weyl(slots[i]);
      for (auto& e : f.e) e = d_fixed(m_, e);
      bool dead = true;
      for (auto& e : f.e) dead = dead && e.is_zero();
      if (dead) return acc_;  // a slot in the quotient died under d
      w.slots.push_back(std::move(f));
    }
    pairs_.clear();
    int mm = int(slots.size()) - 1;
    for (int a = 0; a <= mm; ++a)
      for (int b = a + 1; b <= mm; ++b) pairs_.emplace_back(a, b);
    pair_phase(0, w);
    return acc_.scaled(m_.vacuum());
  }

 private:
  void pair_phase(size_t idx, const CorrWord& w) {
    if (idx == pairs_.size()) {
      loop_phase(0, w);
      return;
    }
    z_phase(idx, w, 0);
  }

  void z_phase(size_t idx, const CorrWord& w, int done) {
    y_phase(idx, w, 0);
    auto [a, b] = pairs_[idx];
    for (CorrWord& w2 : apply_z_line(w, a, b)) {
      w2.val = w2.val * CycloScalar(Rat(1, done + 1), m_.N);
      z_phase(idx, w2, done + 1);
    }
  }

  void y_phase(size_t idx, const CorrWord& w, int done) {
    pair_phase(idx + 1, w);
    auto [a, b] = pairs_[idx];
    for (CorrWord& w2 : apply_y_line(w, a, b)) {
      w2.val = w2.val * CycloScalar(Rat(1, done + 1), m_.N);
      y_phase(idx, w2, done + 1);
    }
  }

  void loop_phase(int slot, const CorrWord& w) {
    if (slot == int(w.slots.size())) {
      finalize(w);
      return;
    }
    loop_steps(slot, w, 0);
  }

  void loop_steps(int slot, const CorrWord& w, int done) {
    loop_phase(slot + 1, w);
    for (CorrWord& w2 : apply_loop(w, slot)) {
      w2.val = w2.val * CycloScalar(Rat(1, done + 1), m_.N);
      loop_steps(slot, w2, done + 1);
    }
  }

  // One rotated-block line between slots a < b; the kernel is doubled and
  // twist-dependent when the line crosses the basepoint gap.
  std::vector<CorrWord> apply_z_line(const CorrWord& w, int a, int b) {
    std::vector<CorrWord> out;
    int K2 = m_.nz();
    for (int p = 0; p < K2; ++p)
      for (int q = 0; q < K2; ++q) {
        CycloScalar ker = (a == 0) ? m_.p12(p, q) : m_.p3(p, q);
        if (ker.is_zero()) continue;
        ker = ker * CycloScalar(Rat(2), m_.N);
        FormMatrix da = deriv(w.slots[a], 2 * m_.k + p);
        if (mat_zero(da)) continue;
        FormMatrix db = deriv(w.slots[b], 2 * m_.k + q);
        if (mat_zero(db)) continue;
        CorrWord w2 = w;
        w2.slots[a] = std::move(da);
        w2.slots[b] = std::move(db);
        w2.val = w2.val * ker;
        w2.hpow += 1;
        out.push_back(std::move(w2));
      }
    return out;
  }

  // One fixed-block line; its numeric part is applied now and its clock
  // weight is deferred to the whole-pattern simplex integral.
  std::vector<CorrWord> apply_y_line(const CorrWord& w, int a, int b) {
    std::vector<CorrWord> out;
    for (int i = 0; i < 2 * m_.k; ++i)
      for (int j = 0; j < 2 * m_.k; ++j) {
        Rat ker = m_.pi1(i, j);
        if (ker == 0) continue;
        FormMatrix da = deriv(w.slots[a], i);
        if (mat_zero(da)) continue;
        FormMatrix db = deriv(w.slots[b], j);
        if (mat_zero(db)) continue;
        CorrWord w2 = w;
        w2.slots[a] = std::move(da);
        w2.slots[b] = std::move(db);
        w2.val = w2.val * CycloScalar(ker, m_.N);
        w2.hpow += 1;
        w2.yedges.emplace_back(a, b);
        out.push_back(std::move(w2));
      }
    return out;
  }

  std::vector<CorrWord> apply_loop(const CorrWord& w, int slot) {
    std::vector<CorrWord> out;
    int K2 = m_.nz();
    for (int p = 0; p < K2; ++p)
      for (int q = 0; q < K2; ++q) {
        CycloScalar ker = m_.p2(p, q);
        if (ker.is_zero()) continue;
        FormMatrix d2 = deriv(deriv(w.slots[slot], 2 * m_.k + p), 2 * m_.k + q);
        if (mat_zero(d2)) continue;
        CorrWord w2 = w;
        w2.slots[slot] = std::move(d2);
        w2.val = w2.val * ker;
        w2.hpow += 1;
        out.push_back(std::move(w2));
      }
    return out;
  }

  static FormMatrix deriv(const FormMatrix& f, int v) {
    FormMatrix out = f;
    for (auto& e : out.e) e = e.derivative(v);
    return out;
  }
  static bool mat_zero(const FormMatrix& f) {
    for (const auto& e : f.e)
      if (!e.is_zero()) return false;
    return true;
  }

  void finalize(const CorrWord& w) {
    Rat weight = pairing_weight(int(w.slots.size()), w.yedges);
    if (weight == 0) return;
    FormMatrix p = cmat_apply_form(m_.e_twist, w.slots[0], false);
    for (size_t i = 1; i < w.slots.size(); ++i)
      p = wedge_mul(p, w.slots[i]);
    FormElement tr = sigma_z_form(m_, p.trace());
    if (tr.is_zero()) return;
    ScalarK scale = ScalarK::from_hbar(
        HbarSeries::term(w.val * CycloScalar(weight, m_.N), w.hpow));
    acc_ = acc_ + tr.scaled(scale);
  }

  Model m_;
  FormElement acc_;
  std::vector<std::pair<int, int>> pairs_;
};

}  // namespace detail

inline FormElement free_correlation(const Model& m, const Chain& c) {
  detail::FreeCorrelator fc(m);
  return fc.eval(c);
}

// Fixed-block functional: the free correlation restricted to chains with
// no rotated-coordinate content.
inline FormElement tau0(const Model& m, const Chain& c) {
  for (const auto& t : c.terms)
    for (const auto& s : t.slots)
      for (const auto& w : s.e)
        if (!pure_y(m, w)) throw error("tau0 takes fixed-block chains only");
  return free_correlation(m, c);
}

inline int permutation_sign(const std::vector<int>& p) {
  int inv = 0;
  for (size_t i = 0; i < p.size(); ++i)
    for (size_t j = i + 1; j < p.size(); ++j)
      if (p[i] > p[j]) ++inv;
  return inv % 2 ? -1 : 1;
}

inline Rat cochain_sign(int j) {
  // (-1)^{j(j-1)/2}
  return ((long(j) * (j - 1) / 2) % 2) ? Rat(-1) : Rat(1);
}

// Interacting correlation: insert scaled arguments into the slots after
// the basepoint in all orders and interleavings, with alternating signs
// and no factorial normalization.
inline FormElement interactive_correlation(
    const Model& m, const Chain& c, const std::vector<MatrixWeyl>& args,
    const std::function<MatrixWeyl(const MatrixWeyl&)>& insert_map = {}) {
  int j = int(args.size());
  std::vector<MatrixWeyl> ins;
  for (const auto& a : args) {
    MatrixWeyl v = insert_map ? insert_map(a) : a;
    ins.push_back(v.hbar_shifted(-1));
  }

  FormElement total = FormElement::zero(m);
  std::vector<int> perm(j);
  for (int i = 0; i < j; ++i) perm[i] = i;
  do {
    int sgn = permutation_sign(perm);
    for (const auto& t : c.terms) {
      int mt = int(t.slots.size()) - 1;
      // choose the positions of the insertions among mt + j tail slots
      std::vector<bool> pick(size_t(mt + j), false);
      std::fill(pick.begin(), pick.begin() + j, true);
      std::sort(pick.begin(), pick.end());
      do {
        Chain one;
        std::vector<MatrixWeyl> slots;
        slots.push_back(t.slots[0]);
        size_t ia = 0, ic = 1;
        for (bool isarg : pick)
          slots.push_back(isarg ? ins[perm[ia++]] : t.slots[ic++]);
        one.push(t.coef.scaled(Rat(sgn) * cochain_sign(j)), std::move(slots));
        total = total + free_correlation(m, one);
      } while (std::next_permutation(pick.begin(), pick.end()));
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

inline ScalarK universal_trace(
    const Model& m, const Chain& c, const std::vector<MatrixWeyl>& args,
    const std::function<MatrixWeyl(const MatrixWeyl&)>& insert_map = {}) {
  return berezin(m, interactive_correlation(m, c, args, insert_map));
}

// ---- rotated-sector functional, three independent routes ----

inline void tau1_check_input(const Model& m,
                             const std::vector<WeylElement>& word) {
  if (word.empty()) throw error("empty tensor word");
  for (const auto& w : word)
    if (!pure_z(m, w))
      throw error("rotated-sector functional takes z-content only");
}

// Route one: direct contraction with the directed step kernels, unit
// pattern weight, no clock integral.
inline HbarSeries tau1_direct(const Model& m,
                              const std::vector<WeylElement>& word) {
  tau1_check_input(m, word);
  int mm = int(word.size()) - 1;
  struct ZWord {
    CycloScalar val;
    int hpow;
    std::vector<WeylElement> slots;
  };
  HbarSeries total(m.N);
  std::vector<std::pair<int, int>> pairs;
  for (int a = 0; a <= mm; ++a)
    for (int b = a + 1; b <= mm; ++b) pairs.emplace_back(a, b);

  // phase 0..pairs: lines; then loops per slot; then read off constants
  std::function<void(size_t, const ZWord&, int)> line_phase;
  std::function<void(int, const ZWord&, int)> loop_steps;
  auto finalize = [&](const ZWord& w) {
    WeylElement prod = w.slots[0];
    for (int i = 1; i <= mm; ++i) prod = mul_plain(prod, w.slots[i]);
    HbarSeries c = prod.coeff(Mono(m.nvars(), 0));
    if (c.is_zero() && c.trunc() == kExact) return;
    total = total + c.scaled(w.val).shifted(w.hpow);
  };
  std::function<void(int, const ZWord&)> loop_phase = [&](int slot,
                                                          const ZWord& w) {
    if (slot > mm) {
      finalize(w);
      return;
    }
    loop_steps(slot, w, 0);
  };
  loop_steps = [&](int slot, const ZWord& w, int done) {
    loop_phase(slot + 1, w);
    int K2 = m.nz();
    for (int p = 0; p < K2; ++p)
      for (int q = 0; q < K2; ++q) {
        CycloScalar ker = m.p2(p, q);
        if (ker.is_zero()) continue;
        WeylElement d2 =
            w.slots[slot].derivative(2 * m.k + p).derivative(2 * m.k + q);
        if (d2.is_zero()) continue;
        ZWord w2 = w;
        w2.slots[slot] = std::move(d2);
        w2.val = w2.val * ker * CycloScalar(Rat(1, done + 1), m.N);
        w2.hpow += 1;
        loop_steps(slot, w2, done + 1);
      }
  };
  line_phase = [&](size_t idx, const ZWord& w, int done) {
    if (idx == pairs.size()) {
      loop_phase(0, w);
      return;
    }
    line_phase(idx + 1, w, 0);
    auto [a, b] = pairs[idx];
    int K2 = m.nz();
    for (int p = 0; p < K2; ++p)
      for (int q = 0; q < K2; ++q) {
        CycloScalar ker = (a == 0) ? m.p12(p, q) : m.p3(p, q);
        if (ker.is_zero()) continue;
        ker = ker * CycloScalar(Rat(2), m.N);
        WeylElement da = w.slots[a].derivative(2 * m.k + p);
        if (da.is_zero()) continue;
        WeylElement db = w.slots[b].derivative(2 * m.k + q);
        if (db.is_zero()) continue;
        ZWord w2 = w;
        w2.slots[a] = std::move(da);
        w2.slots[b] = std::move(db);
        w2.val = w2.val * ker * CycloScalar(Rat(1, done + 1), m.N);
        w2.hpow += 1;
        line_phase(idx, w2, done + 1);
      }
  };

  ZWord start{CycloScalar(Rat(1), m.N), 0, word};
  line_phase(0, start, 0);
  return total.scaled(m.vacuum());
}

// Shared tail for the word routes: the normal-ordering exponential, the
// constant-term projection, and the vacuum normalization.
inline HbarSeries tau1_word_tail(const Model& m, WeylElement w) {
  WeylElement acc = w;
  HbarSeries total(m.N);
  Rat inv_fact(1);
  for (int s = 0;; ++s) {
    if (s > 0) {
      WeylElement nxt(acc.nvars(), acc.wtrunc());
      int K2 = m.nz();
      for (int p = 0; p < K2; ++p)
        for (int q = 0; q < K2; ++q) {
          CycloScalar ker = m.p3(p, q);
          if (ker.is_zero()) continue;
          WeylElement d2 = acc.derivative(2 * m.k + p).derivative(2 * m.k + q);
          if (d2.is_zero()) continue;
          nxt = nxt + d2.scaled(ker);
        }
      acc = nxt.hbar_shifted(1);
      inv_fact /= Rat(s);
      if (acc.is_zero()) break;
    }
    total = total + acc.coeff(Mono(acc.nvars(), 0)).scaled(inv_fact);
  }
  return total.scaled(m.vacuum());
}

// Route two: multiply basepoint slot against the reversed tail with the
// flipped-kernel product.
inline HbarSeries tau1_word_hat(const Model& m,
                                const std::vector<WeylElement>& word) {
  tau1_check_input(m, word);
  WeylElement prod = word[0];
  for (size_t i = word.size() - 1; i >= 1; --i) {
    prod = hat_star(m, prod, word[i]);
    if (i == 1) break;
  }
  return tau1_word_tail(m, prod);
}

// Route three: the same value through the opposite product in forward
// order, using the mirror identity between the two z-sector products.
inline HbarSeries tau1_word_perp(const Model& m,
                                 const std::vector<WeylElement>& word) {
  tau1_check_input(m, word);
  WeylElement prod;
  bool first = true;
  for (size_t i = 1; i < word.size(); ++i) {
    prod = first ? word[i] : perp_star(m, prod, word[i]);
    first = false;
  }
  prod = first ? word[0] : perp_star(m, prod, word[0]);
  return tau1_word_tail(m, prod);
}

}  // namespace orb
