#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "orbitrace/chains.hpp"
#include "orbitrace/forms.hpp"
#include "orbitrace/model.hpp"
#include "orbitrace/scalar_k.hpp"
#include "orbitrace/weyl.hpp"

// Canonical text rendering.  Scalars print as sums of
//   (q)*z{N}^j*h^m*u^p
// with u ascending, then h ascending, then the root power ascending; the
// z{N} factor uses the scalar-context spelling for the primitive root of
// unity.  Observables use the zeta{N} spelling instead so that z{i} stays
// free for coordinates.  A trailing "+ O(h^T)" marks series whose
// coefficients are only known below T.

namespace orb {

inline std::string render_exp(const std::string& base, int e) {
  if (e == 1) return base;
  return base + "^" + std::to_string(e);
}

namespace detail {

// One additive term of a canonical rendering: rational, root power,
// h-exponent, u-exponent, then any variable/generator factors.
struct RTerm {
  Rat q;
  int zpow = 0;   // power of the primitive N-th root, 0 = rational
  int hexp = 0;
  int uexp = 0;
  std::vector<std::string> factors;
};

inline std::string rterm_str(const RTerm& t, int order, bool scalar_ctx) {
  std::ostringstream os;
  os << "(" << rat_str(t.q) << ")";
  if (t.zpow != 0) {
    std::string root =
        (scalar_ctx ? "z" : "zeta") + std::to_string(order);
    // the root power is always written out, even when it is 1
    os << "*" << root << "^" << t.zpow;
  }
  if (t.hexp != 0) os << "*" << render_exp("h", t.hexp);
  if (t.uexp != 0) os << "*" << render_exp("u", t.uexp);
  for (const auto& f : t.factors) os << "*" << f;
  return os.str();
}

inline std::string rterms_str(const std::vector<RTerm>& terms, int order,
                              bool scalar_ctx, int htrunc) {
  std::ostringstream os;
  bool first = true;
  for (const auto& t : terms) {
    if (!first) os << " + ";
    os << rterm_str(t, order, scalar_ctx);
    first = false;
  }
  if (htrunc != kExact) {
    if (!first) os << " + ";
    os << "O(" << render_exp("h", htrunc + 1) << ")";
    first = false;
  }
  if (first) os << "0";
  return os.str();
}

inline void push_series(std::vector<RTerm>& out, const HbarSeries& h,
                        int uexp, const std::vector<std::string>& factors,
                        int* min_trunc) {
  if (min_trunc) *min_trunc = std::min(*min_trunc, h.trunc());
  for (const auto& [e, c] : h.coeffs()) {
    if (c.is_zero()) continue;
    for (const auto& [p, q] : c.terms()) {
      RTerm t;
      t.q = q;
      t.zpow = p;
      t.hexp = e;
      t.uexp = uexp;
      t.factors = factors;
      out.push_back(t);
    }
  }
}

inline std::vector<std::string> mono_factors(const Model& m, const Mono& mo,
                                             GMask mask = 0) {
  std::vector<std::string> fs;
  for (size_t v = 0; v < mo.size(); ++v)
    if (mo[v] > 0) fs.push_back(render_exp(m.var_name((int)v), mo[v]));
  for (int v = 0; v < m.nvars(); ++v)
    if (mask & (GMask(1) << v)) fs.push_back("d" + m.var_name(v));
  return fs;
}

}  // namespace detail

inline std::string render_scalar(const ScalarK& s) {
  std::vector<detail::RTerm> terms;
  int mt = kExact;
  for (const auto& [u, h] : s.coeffs())
    detail::push_series(terms, h, u, {}, &mt);
  return detail::rterms_str(terms, s.order(), true, mt);
}

inline std::string render_hbar(const HbarSeries& h) {
  return render_scalar(ScalarK::from_hbar(h));
}

inline std::string render_weyl(const Model& m, const WeylElement& w) {
  std::vector<detail::RTerm> terms;
  int mt = kExact;
  for (const auto& [mo, h] : w.terms())
    detail::push_series(terms, h, 0, detail::mono_factors(m, mo), &mt);
  return detail::rterms_str(terms, m.N, false, mt);
}

inline std::string render_form(const Model& m, const FormElement& f) {
  std::vector<detail::RTerm> terms;
  int mt = kExact;
  for (const auto& [key, s] : f.terms())
    for (const auto& [u, h] : s.coeffs())
      detail::push_series(terms, h, u,
                          detail::mono_factors(m, key.mono, key.mask), &mt);
  return detail::rterms_str(terms, m.N, false, mt);
}

inline std::string render_weyl_matrix(const Model& m, const MatrixWeyl& a) {
  if (a.r == 1) return render_weyl(m, a.at(0, 0));
  std::ostringstream os;
  os << "[";
  for (int i = 0; i < a.r; ++i) {
    if (i) os << ", ";
    os << "[";
    for (int j = 0; j < a.r; ++j) {
      if (j) os << ", ";
      os << render_weyl(m, a.at(i, j));
    }
    os << "]";
  }
  os << "]";
  return os.str();
}

inline std::string render_form_matrix(const Model& m, const FormMatrix& a) {
  if (a.r == 1) return render_form(m, a.at(0, 0));
  std::ostringstream os;
  os << "[";
  for (int i = 0; i < a.r; ++i) {
    if (i) os << ", ";
    os << "[";
    for (int j = 0; j < a.r; ++j) {
      if (j) os << ", ";
      os << render_form(m, a.at(i, j));
    }
    os << "]";
  }
  os << "]";
  return os.str();
}

inline std::string render_chain(const Model& m, const Chain& c) {
  if (c.terms.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& t : c.terms) {
    if (!first) os << " + ";
    os << "(" << render_scalar(t.coef) << ")";
    for (const auto& s : t.slots) os << " (x) " << render_weyl_matrix(m, s);
    first = false;
  }
  return os.str();
}

}  // namespace orb
