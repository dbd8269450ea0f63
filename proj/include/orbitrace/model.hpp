#pragma once

#include "cyclo.hpp"

namespace orb {

using CMatrix = std::vector<std::vector<CycloScalar>>;

inline CMatrix cmat_identity(int r, int order) {
  CMatrix m(r, std::vector<CycloScalar>(r, CycloScalar(Rat(0), order)));
  for (int i = 0; i < r; ++i) m[i][i] = CycloScalar(Rat(1), order);
  return m;
}

inline CMatrix cmat_mul(const CMatrix& a, const CMatrix& b) {
  int r = int(a.size());
  CMatrix out(r, std::vector<CycloScalar>(r));
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      CycloScalar acc = a[i][0] * b[0][j];
      for (int l = 1; l < r; ++l) acc = acc + a[i][l] * b[l][j];
      out[i][j] = acc;
    }
  return out;
}

inline bool cmat_eq(const CMatrix& a, const CMatrix& b) {
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < a.size(); ++j)
      if (a[i][j] != b[i][j]) return false;
  return true;
}

// Linear symplectic orbifold data: C^n = C^k (fixed) + C^{n-k} (rotated),
// a cyclic twist of order N acting with eigenvalue exponents perp_eigs on
// the rotated coordinates, and an optional matrix twist on the rank-r
// coefficient bundle.
struct Model {
  int n = 1, k = 0, r = 1, N = 2;
  std::vector<int> perp_eigs;  // one exponent per rotated complex direction
  CMatrix e_twist;             // r x r, finite order dividing N
  CMatrix e_twist_inv;
  int hbar_trunc = 6;
  int weight_trunc = 8;

  Model() = default;
  Model(int n_, int k_, int r_, int N_, std::vector<int> eigs,
        CMatrix twist = {}, int htr = 6, int wtr = 8)
      : n(n_), k(k_), r(r_), N(N_), perp_eigs(std::move(eigs)),
        e_twist(std::move(twist)), hbar_trunc(htr), weight_trunc(wtr) {
    if (n < 1 || k < 0 || k > n) throw error("need 0 <= k <= n, n >= 1");
    if (r < 1) throw error("bundle rank must be positive");
    if (N < 1) throw error("twist order must be positive");
    if (int(perp_eigs.size()) != n - k)
      throw error("expected " + std::to_string(n - k) +
                  " eigenvalue exponents, got " +
                  std::to_string(perp_eigs.size()));
    for (int l : perp_eigs) {
      int m = ((l % N) + N) % N;
      if (m == 0)
        throw error("rotated directions must have nontrivial eigenvalue");
    }
    if (e_twist.empty()) e_twist = cmat_identity(r, N);
    if (int(e_twist.size()) != r)
      throw error("coefficient twist must be " + std::to_string(r) + "x" +
                  std::to_string(r));
    for (auto& row : e_twist) {
      if (int(row.size()) != r) throw error("coefficient twist is not square");
      for (auto& c : row) c = c.promoted(N);
    }
    // finite order: the twist must close up with the point action
    CMatrix pw = cmat_identity(r, N);
    for (int i = 0; i < N; ++i) pw = cmat_mul(pw, e_twist);
    if (!cmat_eq(pw, cmat_identity(r, N)))
      throw error("coefficient twist does not have order dividing " +
                  std::to_string(N));
    e_twist_inv = cmat_identity(r, N);
    for (int i = 0; i < N - 1; ++i) e_twist_inv = cmat_mul(e_twist_inv, e_twist);
    // symplectic check for the diagonal point action
    for (int i = 0; i < 2 * n; ++i)
      for (int j = 0; j < 2 * n; ++j) {
        CycloScalar lhs = zeta(g_exp(i) + g_exp(j));
        lhs = lhs * CycloScalar(omega(i, j), N);
        if (lhs != CycloScalar(omega(i, j), N))
          throw error("point action is not symplectic");
      }
  }

  int nvars() const { return 2 * n; }
  int ny() const { return 2 * k; }
  int nz() const { return 2 * (n - k); }
  bool is_y(int v) const { return v < 2 * k; }

  std::string var_name(int v) const {
    return (is_y(v) ? "y" : "z") + std::to_string(v + 1);
  }

  CycloScalar zeta(long p) const { return CycloScalar::zeta(N, p); }

  // Twist eigenvalue exponent of coordinate v (zero on the fixed block).
  int g_exp(int v) const {
    if (is_y(v)) return 0;
    int a = v - 2 * k;           // local index into the rotated block
    int K = n - k;
    return a < K ? perp_eigs[a] : -perp_eigs[a - K];
  }

  // Poisson tensor components: paired coordinates (i, i+half) carry +1/2.
  Rat pi1(int i, int j) const {
    if (!is_y(i) || !is_y(j)) return Rat(0);
    if (j == i + k && i < k) return Rat(1, 2);
    if (i == j + k && j < k) return Rat(-1, 2);
    return Rat(0);
  }
  Rat pi2_local(int a, int b) const {
    int K = n - k;
    if (b == a + K && a < K) return Rat(1, 2);
    if (a == b + K && b < K) return Rat(-1, 2);
    return Rat(0);
  }
  Rat pi2(int i, int j) const {
    if (is_y(i) || is_y(j)) return Rat(0);
    return pi2_local(i - 2 * k, j - 2 * k);
  }
  Rat pi_total(int i, int j) const { return pi1(i, j) + pi2(i, j); }
  Rat omega(int i, int j) const { return Rat(2) * pi_total(i, j); }

  CycloScalar lambda_local(int a, long power = 1) const {
    return zeta(long(g_exp(2 * k + a)) * power);
  }

  // Stored z-kernels, indexed by local rotated coordinates; the second
  // index carries the inverse eigenvalue of the twisted function slot.
  CycloScalar p12(int a, int b) const {
    Rat w = pi2_local(a, b);
    if (w == 0) return CycloScalar(Rat(0), N);
    CycloScalar one(Rat(1), N);
    return -(CycloScalar(w, N) / (one - lambda_local(b, -1)));
  }
  CycloScalar p3(int a, int b) const {
    Rat w = pi2_local(a, b);
    if (w == 0) return CycloScalar(Rat(0), N);
    CycloScalar linv = lambda_local(b, -1);
    return -(CycloScalar(w, N) * linv / (CycloScalar(Rat(1), N) - linv));
  }
  CycloScalar p2(int a, int b) const {
    Rat w = pi2_local(a, b);
    if (w == 0) return CycloScalar(Rat(0), N);
    return p3(a, b) - CycloScalar(w / 2, N);
  }

  // det^{-1}(1 - g_perp)^{-1}-type normalization shared by every
  // correlation value.
  CycloScalar vacuum() const {
    CycloScalar v(Rat(1), N);
    CycloScalar one(Rat(1), N);
    for (int l : perp_eigs) {
      v = v / (one - zeta(-l));
      v = v / (one - zeta(l));
    }
    return v;
  }
};

}  // namespace orb
