#pragma once

#include <cstdint>
#include <functional>

#include "hbar.hpp"
#include "model.hpp"

namespace orb {

using Mono = std::vector<uint8_t>;

inline int mono_deg(const Mono& m) {
  int d = 0;
  for (auto e : m) d += e;
  return d;
}

inline int floor_div2(int x) { return x >= 0 ? x / 2 : -((-x + 1) / 2); }

// Polynomial-coefficient element of the quantized algebra: a finite sum of
// coordinate monomials with hbar-series coefficients, truncated by total
// weight (monomial degree plus twice the hbar exponent).
class WeylElement {
 public:
  WeylElement() : nvars_(0), wtrunc_(kExact) {}
  WeylElement(int nvars, int wtrunc) : nvars_(nvars), wtrunc_(wtrunc) {}

  static WeylElement zero(const Model& m) {
    return WeylElement(m.nvars(), m.weight_trunc);
  }
  static WeylElement scalar(const Model& m, const HbarSeries& h) {
    WeylElement w = zero(m);
    w.add_term(Mono(m.nvars(), 0), h);
    return w;
  }
  // Literal elements are exact; hbar truncation only enters where a
  // computation or the caller explicitly asks for it.
  static WeylElement one(const Model& m) {
    return scalar(m, HbarSeries::term(CycloScalar(Rat(1), m.N), 0));
  }
  static WeylElement coord(const Model& m, int v) {
    WeylElement w = zero(m);
    Mono mono(m.nvars(), 0);
    mono[v] = 1;
    w.add_term(mono, HbarSeries::term(CycloScalar(Rat(1), m.N), 0));
    return w;
  }

  int nvars() const { return nvars_; }
  int wtrunc() const { return wtrunc_; }
  const std::map<Mono, HbarSeries>& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }

  HbarSeries coeff(const Mono& m) const {
    auto it = t_.find(m);
    if (it != t_.end()) return it->second;
    return HbarSeries(1);
  }

  void add_term(const Mono& m, const HbarSeries& h) {
    if (int(m.size()) != nvars_) throw error("monomial arity mismatch");
    HbarSeries clipped = clip(m, h);
    if (clipped.is_zero() && clipped.trunc() == kExact) return;
    auto it = t_.find(m);
    if (it == t_.end()) {
      t_[m] = clipped;
    } else {
      it->second = it->second + clipped;
      if (it->second.is_zero() && it->second.trunc() == kExact) t_.erase(it);
    }
  }

  friend WeylElement operator+(const WeylElement& a, const WeylElement& b) {
    WeylElement out(a.join(b));
    for (const auto& [m, h] : a.t_) out.add_term(m, h);
    for (const auto& [m, h] : b.t_) out.add_term(m, h);
    return out;
  }
  friend WeylElement operator-(const WeylElement& a, const WeylElement& b) {
    return a + (-b);
  }
  WeylElement operator-() const {
    WeylElement out(nvars_, wtrunc_);
    for (const auto& [m, h] : t_) out.t_[m] = -h;
    return out;
  }

  WeylElement scaled(const HbarSeries& s) const {
    WeylElement out(nvars_, wtrunc_);
    for (const auto& [m, h] : t_) out.add_term(m, h * s);
    return out;
  }
  WeylElement scaled(const CycloScalar& c) const {
    return scaled(HbarSeries::term(c, 0));
  }
  WeylElement scaled(const Rat& q) const { return scaled(CycloScalar(q)); }
  WeylElement hbar_shifted(int d) const {
    WeylElement out(nvars_, wtrunc_);
    for (const auto& [m, h] : t_) out.add_term(m, h.shifted(d));
    return out;
  }

  WeylElement derivative(int v) const {
    WeylElement out(nvars_, wtrunc_);
    for (const auto& [m, h] : t_) {
      if (m[v] == 0) continue;
      Mono d = m;
      d[v] -= 1;
      out.add_term(d, h.scaled(Rat(int(m[v]))));
    }
    return out;
  }

  // Commutative product of the underlying polynomials.
  friend WeylElement mul_plain(const WeylElement& a, const WeylElement& b) {
    WeylElement out(a.join(b));
    for (const auto& [ma, ha] : a.t_)
      for (const auto& [mb, hb] : b.t_) {
        Mono m = ma;
        for (int v = 0; v < out.nvars_; ++v) m[v] += mb[v];
        out.add_term(m, ha * hb);
      }
    return out;
  }

  // Total polynomial degree of the highest term, -1 when zero.
  int max_degree() const {
    int d = -1;
    for (const auto& [m, h] : t_) d = std::max(d, mono_deg(m));
    return d;
  }

  friend bool operator==(const WeylElement& a, const WeylElement& b) {
    for (const auto& [m, h] : a.t_)
      if (h != b.coeff(m)) return false;
    for (const auto& [m, h] : b.t_)
      if (h != a.coeff(m)) return false;
    return true;
  }
  friend bool operator!=(const WeylElement& a, const WeylElement& b) {
    return !(a == b);
  }

 private:
  WeylElement join(const WeylElement& o) const {
    if (nvars_ != o.nvars_ && !t_.empty() && !o.t_.empty())
      throw error("mixed coordinate arities");
    return WeylElement(t_.empty() ? o.nvars_ : nvars_,
                       std::min(wtrunc_, o.wtrunc_));
  }

  HbarSeries clip(const Mono& m, const HbarSeries& h) const {
    if (wtrunc_ == kExact) return h;
    return h.weight_clipped(floor_div2(wtrunc_ - mono_deg(m)));
  }

  int nvars_;
  int wtrunc_;
  std::map<Mono, HbarSeries> t_;
};

// Deformed product from a constant bivector kernel: the ordered
// exponential of hbar * kernel(i,j) d_i (x) d_j applied before
// multiplying.  kernel returns the (i,j) component as a rational.
inline WeylElement star_with_kernel(
    const WeylElement& a, const WeylElement& b,
    const std::function<Rat(int, int)>& kernel, int nvars) {
  struct Pair {
    WeylElement f, g;
  };
  std::vector<Pair> cur{{a, b}};
  WeylElement out = mul_plain(a, b);
  Rat inv_fact(1);
  for (int j = 1;; ++j) {
    std::vector<Pair> next;
    for (const auto& pr : cur) {
      for (int i = 0; i < nvars; ++i) {
        WeylElement df = pr.f.derivative(i);
        if (df.is_zero()) continue;
        for (int l = 0; l < nvars; ++l) {
          Rat w = kernel(i, l);
          if (w == 0) continue;
          WeylElement dg = pr.g.derivative(l);
          if (dg.is_zero()) continue;
          next.push_back({df.scaled(w), dg});
        }
      }
    }
    if (next.empty()) break;
    inv_fact /= Rat(j);
    for (const auto& pr : next)
      out = out + mul_plain(pr.f, pr.g).hbar_shifted(j).scaled(inv_fact);
    cur = std::move(next);
  }
  return out;
}

inline WeylElement moyal(const Model& m, const WeylElement& a,
                         const WeylElement& b) {
  return star_with_kernel(
      a, b, [&m](int i, int j) { return m.pi_total(i, j); }, m.nvars());
}

// z-sector product with the flipped kernel; satisfies
// hat_star(x, y) == perp_star(y, x).
inline WeylElement hat_star(const Model& m, const WeylElement& a,
                            const WeylElement& b) {
  return star_with_kernel(
      a, b, [&m](int i, int j) { return -m.pi2(i, j); }, m.nvars());
}

inline WeylElement perp_star(const Model& m, const WeylElement& a,
                             const WeylElement& b) {
  return star_with_kernel(
      a, b, [&m](int i, int j) { return m.pi2(i, j); }, m.nvars());
}

// Point-action on coordinates: each monomial picks up the product of its
// coordinate eigenvalues, iterated `power` times.
inline WeylElement g_act_plain(const Model& m, const WeylElement& w,
                               long power = 1) {
  WeylElement out(w.nvars(), w.wtrunc());
  for (const auto& [mono, h] : w.terms()) {
    long e = 0;
    for (int v = 0; v < m.nvars(); ++v) e += long(mono[v]) * m.g_exp(v);
    out.add_term(mono, h.scaled(m.zeta(e * power)));
  }
  return out;
}

// Restriction maps: keep only monomials supported on one block.
inline WeylElement sigma_z(const Model& m, const WeylElement& w) {
  WeylElement out(w.nvars(), w.wtrunc());
  for (const auto& [mono, h] : w.terms()) {
    bool pure = true;
    for (int v = 2 * m.k; v < m.nvars(); ++v)
      if (mono[v] != 0) pure = false;
    if (pure) out.add_term(mono, h);
  }
  return out;
}
inline WeylElement sigma_y(const Model& m, const WeylElement& w) {
  WeylElement out(w.nvars(), w.wtrunc());
  for (const auto& [mono, h] : w.terms()) {
    bool pure = true;
    for (int v = 0; v < 2 * m.k; ++v)
      if (mono[v] != 0) pure = false;
    if (pure) out.add_term(mono, h);
  }
  return out;
}

inline bool pure_y(const Model& m, const WeylElement& w) {
  for (const auto& [mono, h] : w.terms())
    for (int v = 2 * m.k; v < m.nvars(); ++v)
      if (mono[v] != 0) return false;
  return true;
}
inline bool pure_z(const Model& m, const WeylElement& w) {
  for (const auto& [mono, h] : w.terms())
    for (int v = 0; v < 2 * m.k; ++v)
      if (mono[v] != 0) return false;
  return true;
}

// Square matrix over the quantized algebra.
struct MatrixWeyl {
  int r = 1;
  std::vector<WeylElement> e;  // row-major

  MatrixWeyl() = default;
  MatrixWeyl(const Model& m, int rank)
      : r(rank), e(size_t(rank) * rank, WeylElement::zero(m)) {}

  static MatrixWeyl identity(const Model& m) {
    MatrixWeyl out(m, m.r);
    for (int i = 0; i < m.r; ++i) out.at(i, i) = WeylElement::one(m);
    return out;
  }
  static MatrixWeyl scalar_mat(const Model& m, const WeylElement& w) {
    MatrixWeyl out(m, m.r);
    for (int i = 0; i < m.r; ++i) out.at(i, i) = w;
    return out;
  }

  WeylElement& at(int i, int j) { return e[size_t(i) * r + j]; }
  const WeylElement& at(int i, int j) const { return e[size_t(i) * r + j]; }

  bool is_zero() const {
    for (const auto& w : e)
      if (!w.is_zero()) return false;
    return true;
  }

  friend MatrixWeyl operator+(const MatrixWeyl& a, const MatrixWeyl& b) {
    if (a.r != b.r) throw error("matrix rank mismatch");
    MatrixWeyl out = a;
    for (size_t i = 0; i < out.e.size(); ++i) out.e[i] = out.e[i] + b.e[i];
    return out;
  }
  friend MatrixWeyl operator-(const MatrixWeyl& a, const MatrixWeyl& b) {
    if (a.r != b.r) throw error("matrix rank mismatch");
    MatrixWeyl out = a;
    for (size_t i = 0; i < out.e.size(); ++i) out.e[i] = out.e[i] - b.e[i];
    return out;
  }
  MatrixWeyl scaled(const HbarSeries& s) const {
    MatrixWeyl out = *this;
    for (auto& w : out.e) w = w.scaled(s);
    return out;
  }
  MatrixWeyl scaled(const Rat& q) const {
    MatrixWeyl out = *this;
    for (auto& w : out.e) w = w.scaled(q);
    return out;
  }
  MatrixWeyl hbar_shifted(int d) const {
    MatrixWeyl out = *this;
    for (auto& w : out.e) w = w.hbar_shifted(d);
    return out;
  }

  WeylElement trace() const {
    WeylElement acc = at(0, 0);
    for (int i = 1; i < r; ++i) acc = acc + at(i, i);
    return acc;
  }

  friend bool operator==(const MatrixWeyl& a, const MatrixWeyl& b) {
    if (a.r != b.r) return false;
    for (size_t i = 0; i < a.e.size(); ++i)
      if (a.e[i] != b.e[i]) return false;
    return true;
  }
  friend bool operator!=(const MatrixWeyl& a, const MatrixWeyl& b) {
    return !(a == b);
  }
};

inline MatrixWeyl mat_mul_with(
    const MatrixWeyl& a, const MatrixWeyl& b,
    const std::function<WeylElement(const WeylElement&, const WeylElement&)>&
        prod) {
  if (a.r != b.r) throw error("matrix rank mismatch");
  MatrixWeyl out;
  out.r = a.r;
  out.e.assign(a.e.size(), WeylElement());
  for (int i = 0; i < a.r; ++i)
    for (int j = 0; j < a.r; ++j) {
      WeylElement acc = prod(a.at(i, 0), b.at(0, j));
      for (int l = 1; l < a.r; ++l)
        acc = acc + prod(a.at(i, l), b.at(l, j));
      out.at(i, j) = acc;
    }
  return out;
}

inline MatrixWeyl mat_moyal(const Model& m, const MatrixWeyl& a,
                            const MatrixWeyl& b) {
  return mat_mul_with(a, b, [&m](const WeylElement& x, const WeylElement& y) {
    return moyal(m, x, y);
  });
}
inline MatrixWeyl mat_mul_plain(const MatrixWeyl& a, const MatrixWeyl& b) {
  return mat_mul_with(a, b, [](const WeylElement& x, const WeylElement& y) {
    return mul_plain(x, y);
  });
}

// Multiply by a constant matrix on one side.
inline MatrixWeyl cmat_apply(const CMatrix& c, const MatrixWeyl& m,
                             bool left) {
  MatrixWeyl out = m;
  int r = m.r;
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      WeylElement acc(m.e[0].nvars(), m.e[0].wtrunc());
      for (int l = 0; l < r; ++l) {
        const CycloScalar& cc = left ? c[i][l] : c[l][j];
        const WeylElement& ww = left ? m.at(l, j) : m.at(i, l);
        acc = acc + ww.scaled(cc);
      }
      out.at(i, j) = acc;
    }
  return out;
}

// Full twisted action: coordinate rotation plus conjugation by the
// coefficient twist.
inline MatrixWeyl g_act(const Model& m, const MatrixWeyl& a, long power = 1) {
  MatrixWeyl out = a;
  for (auto& w : out.e) w = g_act_plain(m, w, power);
  // conjugation direction is fixed by the twisted trace: pulling a matrix
  // leftwards across the holonomy insertion turns M into E M E^-1
  long p = ((power % m.N) + m.N) % m.N;
  for (long i = 0; i < p; ++i)
    out = cmat_apply(m.e_twist_inv, cmat_apply(m.e_twist, out, true), false);
  return out;
}

inline bool is_invariant(const Model& m, const MatrixWeyl& a) {
  return g_act(m, a) == a;
}

inline MatrixWeyl invariant_project(const Model& m, const MatrixWeyl& a) {
  MatrixWeyl acc = a;
  for (int j = 1; j < m.N; ++j) acc = acc + g_act(m, a, j);
  return acc.scaled(Rat(1, m.N));
}

// Scale every term by hbar-exponent * hscale + coordinate-degree/2 * escale;
// the two grading operators and their sum share this kernel.
inline WeylElement graded_scale(const WeylElement& w, int hscale, int escale) {
  WeylElement out(w.nvars(), w.wtrunc());
  for (const auto& [mono, h] : w.terms()) {
    int d = mono_deg(mono);
    HbarSeries acc(h.order(), h.trunc());
    for (const auto& [j, c] : h.coeffs())
      acc.set(j, c * CycloScalar(Rat(j * hscale) + Rat(d * escale, 2),
                                 h.order()));
    out.add_term(mono, acc);
  }
  return out;
}

// Euler vector field, half the coordinate degree.
inline WeylElement euler_lie(const WeylElement& w) {
  return graded_scale(w, 0, 1);
}

// Grading connection hbar d/dhbar + Euler.
inline WeylElement gm_nabla(const WeylElement& w) {
  return graded_scale(w, 1, 1);
}

inline MatrixWeyl euler_lie(const MatrixWeyl& a) {
  MatrixWeyl out = a;
  for (auto& w : out.e) w = euler_lie(w);
  return out;
}

inline MatrixWeyl gm_nabla(const MatrixWeyl& a) {
  MatrixWeyl out = a;
  for (auto& w : out.e) w = gm_nabla(w);
  return out;
}

}  // namespace orb
