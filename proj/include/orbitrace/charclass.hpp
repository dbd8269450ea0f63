#pragma once

#include "correlate.hpp"

namespace orb {

inline WeylElement scalar_part(const Model& m, const MatrixWeyl& M) {
  return M.trace().scaled(Rat(1, m.r));
}

// Argument validation for symmetry data: invariant, no hbar poles.
inline void check_lie(const Model& m, const MatrixWeyl& M) {
  for (const auto& w : M.e)
    for (const auto& [mono, h] : w.terms())
      if (h.low() != kExact && h.low() < 0)
        throw error("symmetry arguments cannot have hbar poles");
  if (!is_invariant(m, M))
    throw error("symmetry arguments must be invariant");
}

// Components of the projection onto the reference subalgebra: fixed-block
// and rotated-block quadratics, the linear-in-hbar constant matrix, and
// the central series with no linear hbar term.
struct PrParts {
  WeylElement y_quad;
  WeylElement z_quad;
  MatrixWeyl h_mat;
  HbarSeries central;
};

inline PrParts pr_decompose(const Model& m, const MatrixWeyl& M) {
  PrParts out;
  WeylElement f = scalar_part(m, M);
  out.y_quad = WeylElement::zero(m);
  out.z_quad = WeylElement::zero(m);
  for (const auto& [mono, h] : f.terms()) {
    CycloScalar c0 = h.at(0);
    if (c0.is_zero()) continue;
    if (mono_deg(mono) != 2) continue;
    bool py = true, pz = true;
    for (int v = 0; v < m.nvars(); ++v) {
      if (mono[v] && !m.is_y(v)) py = false;
      if (mono[v] && m.is_y(v)) pz = false;
    }
    HbarSeries c = HbarSeries::term(c0, 0, h.trunc());
    if (py) out.y_quad.add_term(mono, c);
    if (pz) out.z_quad.add_term(mono, c);
  }
  out.h_mat = MatrixWeyl(m, m.r);
  Mono unit(m.nvars(), 0);
  for (int i = 0; i < m.r; ++i)
    for (int j = 0; j < m.r; ++j) {
      CycloScalar c1 = M.at(i, j).coeff(unit).at(1);
      if (!c1.is_zero())
        out.h_mat.at(i, j) = WeylElement::scalar(m, HbarSeries::term(c1, 1));
    }
  HbarSeries f0 = f.coeff(unit);
  out.central = HbarSeries(m.N, f0.trunc());
  for (const auto& [e, c] : f0.coeffs())
    if (e != 1) out.central.set(e, c);
  return out;
}

inline MatrixWeyl pr_assemble(const Model& m, const PrParts& p) {
  WeylElement sc = p.y_quad + p.z_quad + WeylElement::scalar(m, p.central);
  return MatrixWeyl::scalar_mat(m, sc) + p.h_mat;
}

inline bool in_h(const Model& m, const MatrixWeyl& M) {
  return (M - pr_assemble(m, pr_decompose(m, M))).is_zero();
}

// Complement projection used for interaction insertions.
inline MatrixWeyl gamma_hat(const Model& m, const MatrixWeyl& M) {
  return M - pr_assemble(m, pr_decompose(m, M));
}

inline MatrixWeyl lie_bracket(const Model& m, const MatrixWeyl& a,
                              const MatrixWeyl& b) {
  return (mat_moyal(m, a, b) - mat_moyal(m, b, a)).hbar_shifted(-1);
}

namespace detail {

inline HbarSeries lin_at0(const WeylElement& w, int v) {
  return w.derivative(v).coeff(Mono(w.nvars(), 0));
}
inline HbarSeries third_at0(const WeylElement& w, int a, int b, int c) {
  return w.derivative(a).derivative(b).derivative(c).coeff(
      Mono(w.nvars(), 0));
}

// Matrix-valued coefficient of hbar^1, kept as an hbar-free function.
inline MatrixWeyl mat_h1(const Model& m, const MatrixWeyl& M) {
  MatrixWeyl out(m, m.r);
  for (int i = 0; i < m.r; ++i)
    for (int j = 0; j < m.r; ++j) {
      WeylElement w(m.nvars(), M.at(i, j).wtrunc());
      for (const auto& [mono, h] : M.at(i, j).terms()) {
        CycloScalar c = h.at(1);
        if (!c.is_zero()) w.add_term(mono, HbarSeries::term(c, 0, h.trunc()));
      }
      out.at(i, j) = w;
    }
  return out;
}

}  // namespace detail

// Fixed-block quadratic curvature component.
inline WeylElement curv_r1(const Model& m, const MatrixWeyl& xi,
                           const MatrixWeyl& eta) {
  WeylElement f = scalar_part(m, xi), g = scalar_part(m, eta);
  WeylElement out = WeylElement::zero(m);
  for (int p = 0; p < 2 * m.k; ++p)
    for (int q = 0; q < 2 * m.k; ++q) {
      HbarSeries c(m.N);
      for (int i = 0; i < 2 * m.k; ++i)
        for (int j = 0; j < 2 * m.k; ++j) {
          Rat w = m.omega(i, j);
          if (w == 0) continue;
          HbarSeries t = detail::lin_at0(f, i) * detail::third_at0(g, j, p, q) +
                         detail::lin_at0(g, i) * detail::third_at0(f, j, p, q);
          c = c + t.scaled(-w / 2);
        }
      if (c.is_zero() && c.trunc() == kExact) continue;
      Mono mono(m.nvars(), 0);
      mono[p] += 1;
      mono[q] += 1;
      out.add_term(mono, c);
    }
  return out;
}

// Rotated-block quadratic curvature component.
inline WeylElement curv_r2(const Model& m, const MatrixWeyl& xi,
                           const MatrixWeyl& eta) {
  WeylElement f = scalar_part(m, xi), g = scalar_part(m, eta);
  WeylElement out = WeylElement::zero(m);
  for (int p = 2 * m.k; p < m.nvars(); ++p)
    for (int q = 2 * m.k; q < m.nvars(); ++q) {
      HbarSeries c(m.N);
      for (int i = 0; i < 2 * m.k; ++i)
        for (int j = 0; j < 2 * m.k; ++j) {
          Rat w = m.omega(i, j);
          if (w == 0) continue;
          HbarSeries t = detail::lin_at0(f, i) * detail::third_at0(g, j, p, q) +
                         detail::lin_at0(g, i) * detail::third_at0(f, j, p, q);
          c = c + t.scaled(-w / 2);
        }
      if (c.is_zero() && c.trunc() == kExact) continue;
      Mono mono(m.nvars(), 0);
      mono[p] += 1;
      mono[q] += 1;
      out.add_term(mono, c);
    }
  return out;
}

// Coefficient-matrix curvature component, valued in hbar times constant
// matrices.
inline MatrixWeyl curv_r3(const Model& m, const MatrixWeyl& xi,
                          const MatrixWeyl& eta) {
  WeylElement f = scalar_part(m, xi), g = scalar_part(m, eta);
  MatrixWeyl A = detail::mat_h1(m, xi), B = detail::mat_h1(m, eta);
  MatrixWeyl out(m, m.r);
  for (int i = 0; i < 2 * m.k; ++i)
    for (int j = 0; j < 2 * m.k; ++j) {
      Rat w = m.omega(i, j);
      if (w == 0) continue;
      HbarSeries fi = detail::lin_at0(f, i);
      HbarSeries gj = detail::lin_at0(g, j);
      for (int a = 0; a < m.r; ++a)
        for (int b = 0; b < m.r; ++b) {
          HbarSeries t = fi * detail::lin_at0(B.at(a, b), j) -
                         detail::lin_at0(A.at(a, b), i) * gj;
          if (t.is_zero() && t.trunc() == kExact) continue;
          out.at(a, b) =
              out.at(a, b) +
              WeylElement::scalar(m, t.scaled(Rat(-1) * w).shifted(1));
        }
    }
  return out;
}

// Central curvature component: minus the central projection of the
// bracket.
inline HbarSeries curv_r4(const Model& m, const MatrixWeyl& xi,
                          const MatrixWeyl& eta) {
  PrParts p = pr_decompose(m, lie_bracket(m, xi, eta));
  return -p.central;
}

inline CycloScalar omega0(const Model& m, const MatrixWeyl& xi,
                          const MatrixWeyl& eta) {
  return -curv_r4(m, xi, eta).at(0);
}

inline CycloScalar tr_e_twist(const Model& m) {
  CycloScalar acc(Rat(0), m.N);
  for (int i = 0; i < m.r; ++i) acc = acc + m.e_twist[i][i];
  return acc;
}

// ---- one-loop comparison, degree 0 and 2 components ----

inline ScalarK oneloop_rhs0(const Model& m) {
  CycloScalar c = m.vacuum() * tr_e_twist(m);
  return ScalarK::from_hbar(HbarSeries::term(c, 0), m.k);
}

inline ScalarK oneloop_rhs2(const Model& m, const MatrixWeyl& xi,
                            const MatrixWeyl& eta) {
  check_lie(m, xi);
  check_lie(m, eta);
  CycloScalar trg = tr_e_twist(m);
  CycloScalar vac = m.vacuum();

  // symplectic-volume factor times the central curvature
  HbarSeries r4 = curv_r4(m, xi, eta);
  ScalarK t1 = ScalarK::from_hbar((-r4).shifted(-1).scaled(vac * trg), -1);

  // rotated-sector character: tau1 against the quadratic curvature
  WeylElement r2 = curv_r2(m, xi, eta);
  HbarSeries ch = tau1_direct(
      m, {WeylElement::one(m), (-r2).hbar_shifted(-1)});
  ScalarK t2 = ScalarK::from_hbar(ch.scaled(trg), -1);

  // coefficient-bundle character against the matrix curvature
  MatrixWeyl r3 = curv_r3(m, xi, eta);
  MatrixWeyl gm =
      cmat_apply(m.e_twist, r3.scaled(Rat(-1)).hbar_shifted(-1), true);
  HbarSeries t3s = gm.trace().coeff(Mono(m.nvars(), 0)).scaled(vac);
  ScalarK t3 = ScalarK::from_hbar(t3s, -1);

  return (t1 + t2 + t3).shifted(m.k, 0);
}

inline ScalarK oneloop_lhs(const Model& m,
                           const std::vector<MatrixWeyl>& args) {
  for (const auto& a : args) check_lie(m, a);
  Chain one = chain_single(m, {MatrixWeyl::identity(m)});
  return universal_trace(m, one, args, [&m](const MatrixWeyl& x) {
    return gamma_hat(m, x);
  });
}

struct OneloopReport {
  ScalarK lhs, rhs;
  bool match = false;
};

inline OneloopReport oneloop_compare(const Model& m,
                                     const std::vector<MatrixWeyl>& args) {
  OneloopReport rep;
  rep.lhs = oneloop_lhs(m, args);
  if (args.empty())
    rep.rhs = oneloop_rhs0(m);
  else if (args.size() == 2)
    rep.rhs = oneloop_rhs2(m, args[0], args[1]);
  else
    throw error("one-loop comparison implemented for degree 0 and 2");
  rep.match = (rep.lhs == rep.rhs);
  return rep;
}

// ---- cycle-sum evaluator on the fixed block ----

// Hessian of the quadratic component with the symplectic index raised.
inline CMatrix raised_hessian(const Model& m, const MatrixWeyl& xi,
                              const MatrixWeyl& eta) {
  WeylElement r1 = curv_r1(m, xi, eta);
  int d = 2 * m.k;
  CMatrix H(d, std::vector<CycloScalar>(d, CycloScalar(Rat(0), m.N)));
  for (int p = 0; p < d; ++p)
    for (int q = 0; q < d; ++q)
      H[p][q] = r1.derivative(p).derivative(q).coeff(Mono(m.nvars(), 0)).at(0);
  CMatrix X(d, std::vector<CycloScalar>(d, CycloScalar(Rat(0), m.N)));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      CycloScalar acc(Rat(0), m.N);
      for (int p = 0; p < d; ++p) {
        Rat w = m.omega(i, p);
        if (w == 0) continue;
        acc = acc + H[p][j] * CycloScalar(w, m.N);
      }
      X[i][j] = acc;
    }
  return X;
}

inline CycloScalar cmat_trace(const CMatrix& a) {
  CycloScalar acc = a[0][0];
  for (size_t i = 1; i < a.size(); ++i) acc = acc + a[i][i];
  return acc;
}

// Polarized trace of a k-fold product, averaged over orderings.
inline CycloScalar polarized_trace(const std::vector<CMatrix>& xs, int order) {
  std::vector<int> idx(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) idx[i] = int(i);
  CycloScalar acc(Rat(0), order);
  Rat count(0);
  do {
    CMatrix p = xs[idx[0]];
    for (size_t i = 1; i < idx.size(); ++i) p = cmat_mul(p, xs[idx[i]]);
    acc = acc + cmat_trace(p);
    count += 1;
  } while (std::next_permutation(idx.begin(), idx.end()));
  return acc * CycloScalar(Rat(1) / count, order);
}

// Degree-2k cycle-sum term: pair 2k arguments into raised Hessians in all
// in-pair-ordered ways with signs, feed the polarized trace, and weight by
// the cycle coefficient.
inline CycloScalar cycle_term(const Model& m, int klen,
                              const std::vector<MatrixWeyl>& args) {
  if (int(args.size()) != 2 * klen)
    throw error("cycle term of length " + std::to_string(klen) + " needs " +
                std::to_string(2 * klen) + " arguments");
  std::vector<int> idx(args.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = int(i);
  CycloScalar acc(Rat(0), m.N);
  do {
    bool ordered = true;
    for (int i = 0; i < klen && ordered; ++i)
      ordered = idx[2 * i] < idx[2 * i + 1];
    if (!ordered) continue;
    std::vector<CMatrix> xs;
    for (int i = 0; i < klen; ++i)
      xs.push_back(raised_hessian(m, args[idx[2 * i]], args[idx[2 * i + 1]]));
    CycloScalar term = polarized_trace(xs, m.N);
    if (permutation_sign(idx) < 0) term = -term;
    acc = acc + term;
  } while (std::next_permutation(idx.begin(), idx.end()));
  Rat kfact(1);
  for (int i = 2; i <= klen; ++i) kfact *= i;
  return acc * CycloScalar(wheel_coefficient(klen) / kfact, m.N);
}

}  // namespace orb
