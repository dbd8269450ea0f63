#pragma once

#include "scalar_k.hpp"
#include "weyl.hpp"

namespace orb {

using GMask = uint32_t;

inline int mask_popcount(GMask m) { return __builtin_popcount(m); }

// Sign from wedging two ascending generator blocks; 0 when they overlap.
inline int wedge_sign(GMask a, GMask b) {
  if (a & b) return 0;
  int inv = 0;
  for (GMask bb = b; bb; bb &= bb - 1) {
    int bit = __builtin_ctz(bb);
    GMask higher = a >> (bit + 1);
    inv += mask_popcount(higher << (bit + 1));
  }
  return (inv % 2 == 0) ? 1 : -1;
}

inline int insert_sign(int v, GMask m) {
  GMask below = m & ((GMask(1) << v) - 1);
  return (mask_popcount(below) % 2 == 0) ? 1 : -1;
}

struct FKey {
  Mono mono;
  GMask mask = 0;
  bool operator<(const FKey& o) const {
    if (mask != o.mask) return mask < o.mask;
    return mono < o.mono;
  }
  bool operator==(const FKey& o) const {
    return mask == o.mask && mono == o.mono;
  }
};

// Polynomial differential form with K-scalar coefficients; generators are
// ordered dy1 < ... < dy_2k < dz_{2k+1} < ... < dz_2n via the bitmask.
class FormElement {
 public:
  FormElement() : nvars_(0), wtrunc_(kExact) {}
  FormElement(int nvars, int wtrunc) : nvars_(nvars), wtrunc_(wtrunc) {}

  static FormElement zero(const Model& m) {
    return FormElement(m.nvars(), m.weight_trunc);
  }
  static FormElement from_weyl(const WeylElement& w) {
    FormElement out(w.nvars(), w.wtrunc());
    for (const auto& [mono, h] : w.terms())
      out.add_term({mono, 0}, ScalarK::from_hbar(h));
    return out;
  }
  static FormElement from_scalar(const Model& m, const ScalarK& s) {
    FormElement out = zero(m);
    out.add_term({Mono(m.nvars(), 0), 0}, s);
    return out;
  }

  int nvars() const { return nvars_; }
  int wtrunc() const { return wtrunc_; }
  const std::map<FKey, ScalarK>& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }

  ScalarK coeff(const FKey& k) const {
    auto it = t_.find(k);
    if (it != t_.end()) return it->second;
    return ScalarK(1);
  }

  void add_term(const FKey& k, const ScalarK& s) {
    if (int(k.mono.size()) != nvars_) throw error("form arity mismatch");
    ScalarK clipped = clip(k.mono, s);
    if (clipped.is_zero() && exact_zero(clipped)) return;
    auto it = t_.find(k);
    if (it == t_.end()) {
      t_[k] = clipped;
    } else {
      it->second = it->second + clipped;
      if (it->second.is_zero() && exact_zero(it->second)) t_.erase(it);
    }
  }

  friend FormElement operator+(const FormElement& a, const FormElement& b) {
    FormElement out(a.join(b));
    for (const auto& [k, s] : a.t_) out.add_term(k, s);
    for (const auto& [k, s] : b.t_) out.add_term(k, s);
    return out;
  }
  friend FormElement operator-(const FormElement& a, const FormElement& b) {
    return a + b.scaled(Rat(-1));
  }

  FormElement scaled(const ScalarK& s) const {
    FormElement out(nvars_, wtrunc_);
    for (const auto& [k, c] : t_) out.add_term(k, c * s);
    return out;
  }
  FormElement scaled(const CycloScalar& c) const {
    return scaled(ScalarK::from_hbar(HbarSeries::term(c, 0)));
  }
  FormElement scaled(const Rat& q) const { return scaled(CycloScalar(q)); }
  FormElement shifted(int du, int dh = 0) const {
    FormElement out(nvars_, wtrunc_);
    for (const auto& [k, c] : t_) out.add_term(k, c.shifted(du, dh));
    return out;
  }

  FormElement derivative(int v) const {
    FormElement out(nvars_, wtrunc_);
    for (const auto& [k, c] : t_) {
      if (k.mono[v] == 0) continue;
      FKey d = k;
      d.mono[v] -= 1;
      out.add_term(d, c.scaled(Rat(int(k.mono[v]))));
    }
    return out;
  }

  friend FormElement wedge(const FormElement& a, const FormElement& b) {
    FormElement out(a.join(b));
    for (const auto& [ka, ca] : a.t_)
      for (const auto& [kb, cb] : b.t_) {
        int sg = wedge_sign(ka.mask, kb.mask);
        if (sg == 0) continue;
        FKey k;
        k.mono = ka.mono;
        for (int v = 0; v < out.nvars_; ++v) k.mono[v] += kb.mono[v];
        k.mask = ka.mask | kb.mask;
        ScalarK c = ca * cb;
        if (sg < 0) c = -c;
        out.add_term(k, c);
      }
    return out;
  }

  friend bool operator==(const FormElement& a, const FormElement& b) {
    for (const auto& [k, c] : a.t_)
      if (c != b.coeff(k)) return false;
    for (const auto& [k, c] : b.t_)
      if (c != a.coeff(k)) return false;
    return true;
  }
  friend bool operator!=(const FormElement& a, const FormElement& b) {
    return !(a == b);
  }

 private:
  static bool exact_zero(const ScalarK& s) {
    for (const auto& [u, h] : s.coeffs())
      if (h.trunc() != kExact) return false;
    return true;
  }

  FormElement join(const FormElement& o) const {
    if (nvars_ != o.nvars_ && !t_.empty() && !o.t_.empty())
      throw error("mixed coordinate arities");
    return FormElement(t_.empty() ? o.nvars_ : nvars_,
                       std::min(wtrunc_, o.wtrunc_));
  }

  ScalarK clip(const Mono& m, const ScalarK& s) const {
    if (wtrunc_ == kExact) return s;
    return s.weight_clipped(floor_div2(wtrunc_ - mono_deg(m)));
  }

  int nvars_;
  int wtrunc_;
  std::map<FKey, ScalarK> t_;
};

// Fixed-block de Rham differential dy^i d/dy^i.
inline FormElement d_fixed(const Model& m, const FormElement& f) {
  FormElement out(f.nvars(), f.wtrunc());
  for (int v = 0; v < 2 * m.k; ++v) {
    FormElement dv = f.derivative(v);
    for (const auto& [k, c] : dv.terms()) {
      if (k.mask & (GMask(1) << v)) continue;
      FKey nk = k;
      nk.mask |= GMask(1) << v;
      int sg = insert_sign(v, k.mask);
      out.add_term(nk, sg < 0 ? -c : c);
    }
  }
  return out;
}

// Interior product with a single generator (graded derivation).
inline FormElement iota(int v, const FormElement& f) {
  FormElement out(f.nvars(), f.wtrunc());
  for (const auto& [k, c] : f.terms()) {
    if (!(k.mask & (GMask(1) << v))) continue;
    FKey nk = k;
    nk.mask &= ~(GMask(1) << v);
    int sg = insert_sign(v, nk.mask);
    out.add_term(nk, sg < 0 ? -c : c);
  }
  return out;
}

// Contraction with the fixed-block Poisson bivector, inner generator
// applied first.
inline FormElement iota_pair(const Model& m, const FormElement& f) {
  FormElement out(f.nvars(), f.wtrunc());
  for (int i = 0; i < 2 * m.k; ++i)
    for (int j = 0; j < 2 * m.k; ++j) {
      Rat w = m.omega(i, j);
      if (w == 0) continue;
      FormElement g = iota(i, iota(j, f));
      out = out + g.scaled(w / 2);
    }
  return out;
}

// Batalin-Vilkovisky-type odd Laplacian [d, iota].
inline FormElement bv_delta(const Model& m, const FormElement& f) {
  return d_fixed(m, iota_pair(m, f)) - iota_pair(m, d_fixed(m, f));
}

inline bool form_pure_y(const Model& m, const FormElement& f) {
  for (const auto& [k, c] : f.terms()) {
    for (int v = 2 * m.k; v < m.nvars(); ++v)
      if (k.mono[v] != 0 || (k.mask & (GMask(1) << v))) return false;
  }
  return true;
}

// Fermionic integration over the fixed block: u^k sigma(e^{hbar iota/u}).
inline ScalarK berezin(const Model& m, const FormElement& f) {
  if (!form_pure_y(m, f))
    throw error("fermionic integration requires a fixed-block form");
  FormElement acc = f;
  ScalarK total(m.N);
  Rat inv_fact(1);
  FKey unit{Mono(m.nvars(), 0), 0};
  for (int p = 0; p <= m.k; ++p) {
    if (p > 0) {
      acc = iota_pair(m, acc);
      inv_fact /= Rat(p);
      if (acc.is_zero()) break;
    }
    // sigma keeps the constant coefficient; each contraction carries hbar/u
    total = total + acc.coeff(unit).scaled(inv_fact).shifted(-p, p);
  }
  return total.shifted(m.k, 0);
}

// Shared kernel for the grading operators on forms: hbar-exponent * hscale
// plus half the (polynomial + form) degree * escale; dy/dz count degree 1.
inline FormElement graded_scale_form(const FormElement& f, int hscale,
                                     int escale) {
  FormElement out(f.nvars(), f.wtrunc());
  for (const auto& [k, c] : f.terms()) {
    int d = mono_deg(k.mono) + mask_popcount(k.mask);
    ScalarK acc(c.order());
    for (const auto& [u, h] : c.coeffs()) {
      HbarSeries hh(h.order(), h.trunc());
      for (const auto& [j, cc] : h.coeffs())
        hh.set(j, cc * CycloScalar(Rat(j * hscale) + Rat(d * escale, 2),
                                   h.order()));
      acc.set_u(u, hh);
    }
    out.add_term(k, acc);
  }
  return out;
}

inline FormElement euler_lie(const FormElement& f) {
  return graded_scale_form(f, 0, 1);
}

inline FormElement gm_nabla(const FormElement& f) {
  return graded_scale_form(f, 1, 1);
}

// On bare scalars nothing carries coordinate degree, so the connection is
// hbar d/dhbar alone; the u-variable is flat.
inline ScalarK gm_nabla(const ScalarK& s) {
  ScalarK out(s.order());
  for (const auto& [u, h] : s.coeffs()) {
    HbarSeries hh(h.order(), h.trunc());
    for (const auto& [j, cc] : h.coeffs())
      hh.set(j, cc * CycloScalar(Rat(j), h.order()));
    out.set_u(u, hh);
  }
  return out;
}

// r x r matrix of forms, for slot assembly in the correlation engine.
struct FormMatrix {
  int r = 1;
  std::vector<FormElement> e;

  FormMatrix() = default;
  FormMatrix(const Model& m, int rank)
      : r(rank), e(size_t(rank) * rank, FormElement::zero(m)) {}

  static FormMatrix from_weyl(const MatrixWeyl& w) {
    FormMatrix out;
    out.r = w.r;
    out.e.reserve(w.e.size());
    for (const auto& x : w.e) out.e.push_back(FormElement::from_weyl(x));
    return out;
  }

  FormElement& at(int i, int j) { return e[size_t(i) * r + j]; }
  const FormElement& at(int i, int j) const { return e[size_t(i) * r + j]; }

  FormElement trace() const {
    FormElement acc = at(0, 0);
    for (int i = 1; i < r; ++i) acc = acc + at(i, i);
    return acc;
  }

  friend FormMatrix wedge_mul(const FormMatrix& a, const FormMatrix& b) {
    if (a.r != b.r) throw error("matrix rank mismatch");
    FormMatrix out;
    out.r = a.r;
    out.e.assign(a.e.size(), FormElement());
    for (int i = 0; i < a.r; ++i)
      for (int j = 0; j < a.r; ++j) {
        FormElement acc = wedge(a.at(i, 0), b.at(0, j));
        for (int l = 1; l < a.r; ++l)
          acc = acc + wedge(a.at(i, l), b.at(l, j));
        out.at(i, j) = acc;
      }
    return out;
  }
};

inline FormMatrix cmat_apply_form(const CMatrix& c, const FormMatrix& m,
                                  bool left) {
  FormMatrix out = m;
  int r = m.r;
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      FormElement acc;
      for (int l = 0; l < r; ++l) {
        const CycloScalar& cc = left ? c[i][l] : c[l][j];
        const FormElement& ff = left ? m.at(l, j) : m.at(i, l);
        acc = acc + ff.scaled(cc);
      }
      out.at(i, j) = acc;
    }
  return out;
}

}  // namespace orb
