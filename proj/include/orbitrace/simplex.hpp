#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "cyclo.hpp"

namespace orb {

// Polynomial in t_1..t_m with rational coefficients; exponent vectors have
// length m (index i-1 holds the t_i exponent).
using TPoly = std::map<std::vector<int>, Rat>;

namespace detail {

inline void tp_add(TPoly& p, const std::vector<int>& mono, const Rat& c) {
  if (c == 0) return;
  auto [it, fresh] = p.emplace(mono, c);
  if (!fresh) {
    it->second += c;
    if (it->second == 0) p.erase(it);
  }
}

inline TPoly tp_mul(const TPoly& a, const TPoly& b) {
  TPoly out;
  for (const auto& [ma, ca] : a)
    for (const auto& [mb, cb] : b) {
      std::vector<int> m = ma;
      for (size_t i = 0; i < m.size(); ++i) m[i] += mb[i];
      tp_add(out, m, ca * cb);
    }
  return out;
}

// Integrate var t_i over [lower, 1] where lower is t_{i-1} (or 0 for i=1);
// the result no longer involves t_i.
inline TPoly tp_integrate_step(const TPoly& p, int i, int m) {
  TPoly out;
  for (const auto& [mono, c] : p) {
    int e = mono[i - 1];
    Rat ac = c / Rat(e + 1);
    // upper limit t_i = 1
    std::vector<int> up = mono;
    up[i - 1] = 0;
    tp_add(out, up, ac);
    // lower limit t_i = t_{i-1}; for i=1 that is 0 and the term drops
    if (i > 1) {
      std::vector<int> lo = mono;
      lo[i - 1] = 0;
      lo[i - 2] += e + 1;
      tp_add(out, lo, -ac);
    }
  }
  (void)m;
  return out;
}

}  // namespace detail

// Ordered contraction lines between marked points 0..m on the circle,
// point 0 pinned at the basepoint.
struct EdgeSet {
  int positions = 1;  // m+1
  std::vector<std::pair<int, int>> edges;
};

// Exact integral over 0 = t_0 <= t_1 <= ... <= t_m <= 1 of the product of
// propagator factors (oriented distance minus 1/2) over the edges.
inline Rat pairing_weight(const EdgeSet& es) {
  const int P = es.positions;
  if (P < 1) throw error("edge set needs at least one position");
  const int m = P - 1;
  for (auto [a, b] : es.edges) {
    if (a < 0 || b < 0 || a >= P || b >= P)
      throw error("edge endpoint out of range");
    if (a == b) throw error("self-edges have no propagator factor");
  }

  static std::map<std::pair<int, std::vector<std::pair<int, int>>>, Rat> memo;
  auto key = std::make_pair(P, es.edges);
  std::sort(key.second.begin(), key.second.end());
  if (auto it = memo.find(key); it != memo.end()) return it->second;

  TPoly poly;
  detail::tp_add(poly, std::vector<int>(m, 0), Rat(1));
  for (auto [a, b] : es.edges) {
    // oriented distance from a to b, minus 1/2; t_0 = 0 contributes nothing
    TPoly f;
    Rat c0 = (b > a) ? Rat(-1, 2) : Rat(1, 2);
    detail::tp_add(f, std::vector<int>(m, 0), c0);
    if (b > 0) {
      std::vector<int> mb(m, 0);
      mb[b - 1] = 1;
      detail::tp_add(f, mb, Rat(1));
    }
    if (a > 0) {
      std::vector<int> ma(m, 0);
      ma[a - 1] = 1;
      detail::tp_add(f, ma, Rat(-1));
    }
    poly = detail::tp_mul(poly, f);
  }

  for (int i = m; i >= 1; --i) poly = detail::tp_integrate_step(poly, i, m);

  Rat r(0);
  if (!poly.empty()) r = poly.begin()->second;
  memo.emplace(std::move(key), r);
  return r;
}

inline Rat pairing_weight(int positions,
                          std::vector<std::pair<int, int>> edges) {
  return pairing_weight(EdgeSet{positions, std::move(edges)});
}

// Coefficient of the length-k cycle.  The cycle's vertices range over the
// whole circle, so with one vertex pinned the integral is the sum over all
// time orderings of the remaining k-1; each ordering is one simplex sector
// evaluated by pairing_weight.  The leading 1/k is the cyclic symmetry of
// the pattern.
inline Rat wheel_coefficient(int k) {
  if (k < 1) throw error("cycle length must be positive");
  // a length-1 cycle hits the kernel diagonal, whose regularized value is 0
  if (k == 1) return Rat(0);
  std::vector<int> pos(k);
  for (int i = 1; i < k; ++i) pos[i] = i;
  Rat total(0);
  do {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < k; ++i) edges.emplace_back(pos[i], pos[(i + 1) % k]);
    total += pairing_weight(k, std::move(edges));
  } while (std::next_permutation(pos.begin() + 1, pos.end()));
  return total / Rat(k);
}

// Bernoulli numbers (B_1 = -1/2 convention).
inline Rat bernoulli(int n) {
  static std::vector<Rat> cache{Rat(1)};
  while (int(cache.size()) <= n) {
    int mdeg = int(cache.size());
    // sum_{j=0}^{m} C(m+1, j) B_j = 0
    Rat acc(0), binom(1);
    for (int j = 0; j < mdeg; ++j) {
      // binom = C(m+1, j)
      acc += binom * cache[j];
      binom = binom * Rat(mdeg + 1 - j) / Rat(j + 1);
    }
    cache.push_back(-acc / Rat(mdeg + 1));
  }
  return cache[n];
}

}  // namespace orb
