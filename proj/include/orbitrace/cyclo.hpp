#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace orb {

using Rat = boost::multiprecision::cpp_rational;

struct error : std::runtime_error {
  explicit error(const std::string& m) : std::runtime_error(m) {}
};

inline std::string rat_str(const Rat& q) {
  std::ostringstream os;
  os << q;
  return os.str();
}

// Dense polynomial over Q, coefficient of x^i at index i.
using QPoly = std::vector<Rat>;

inline void qp_trim(QPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

inline QPoly qp_mul(const QPoly& a, const QPoly& b) {
  if (a.empty() || b.empty()) return {};
  QPoly c(a.size() + b.size() - 1, Rat(0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  qp_trim(c);
  return c;
}

// Division with remainder; divisor must be nonzero.
inline std::pair<QPoly, QPoly> qp_divmod(QPoly a, const QPoly& b) {
  if (b.empty()) throw error("polynomial division by zero");
  qp_trim(a);
  if (a.size() < b.size()) return {{}, a};
  QPoly q(a.size() - b.size() + 1, Rat(0));
  while (!a.empty() && a.size() >= b.size()) {
    Rat c = a.back() / b.back();
    size_t shift = a.size() - b.size();
    q[shift] += c;
    for (size_t i = 0; i < b.size(); ++i) a[shift + i] -= c * b[i];
    qp_trim(a);
  }
  qp_trim(q);
  return {q, a};
}

inline int euler_phi(int n) {
  int result = n;
  for (int p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      while (n % p == 0) n /= p;
      result -= result / p;
    }
  }
  if (n > 1) result -= result / n;
  return result;
}

// Per-order tables: the N-th cyclotomic polynomial and the power-basis
// reduction of x^t for t up to 2*phi-2.
struct CycloTable {
  int N = 0;
  int phi = 0;
  QPoly cyclo;                      // monic, degree phi
  std::vector<QPoly> power_rewrite; // x^t in basis 1..x^{phi-1}, t < 2*phi-1
};

inline const CycloTable& cyclo_table(int N) {
  static std::map<int, CycloTable> cache;
  auto it = cache.find(N);
  if (it != cache.end()) return it->second;
  if (N < 1) throw error("cyclotomic order must be positive");

  // Phi_N = (x^N - 1) / prod_{d | N, d < N} Phi_d.
  QPoly num(N + 1, Rat(0));
  num[0] = -1;
  num[N] = 1;
  for (int d = 1; d < N; ++d) {
    if (N % d != 0) continue;
    auto [q, r] = qp_divmod(num, cyclo_table(d).cyclo);
    if (!r.empty()) throw error("cyclotomic polynomial division left a remainder");
    num = q;
  }

  CycloTable t;
  t.N = N;
  t.cyclo = num;
  t.phi = int(num.size()) - 1;
  t.power_rewrite.resize(std::max(2 * t.phi - 1, 1));
  for (int p = 0; p < int(t.power_rewrite.size()); ++p) {
    QPoly xp(p + 1, Rat(0));
    xp[p] = 1;
    auto [q, r] = qp_divmod(xp, t.cyclo);
    (void)q;
    r.resize(t.phi, Rat(0));
    t.power_rewrite[p] = r;
  }
  return cache.emplace(N, std::move(t)).first->second;
}

// Element of Q(zeta_N) in the power basis modulo the N-th cyclotomic
// polynomial; coeffs has length phi(N) and index j holds the zeta^j part.
class CycloScalar {
 public:
  CycloScalar() : order_(1), coeffs_(1, Rat(0)) {}

  explicit CycloScalar(const Rat& q, int order = 1)
      : order_(order), coeffs_(cyclo_table(order).phi, Rat(0)) {
    coeffs_[0] = q;
  }

  static CycloScalar zeta(int order, long power = 1) {
    const auto& t = cyclo_table(order);
    power %= order;
    if (power < 0) power += order;
    CycloScalar z(Rat(0), order);
    QPoly xp(size_t(power) + 1, Rat(0));
    xp[size_t(power)] = 1;
    auto [q, r] = qp_divmod(xp, t.cyclo);
    (void)q;
    r.resize(t.phi, Rat(0));
    z.coeffs_.assign(r.begin(), r.end());
    return z;
  }

  int order() const { return order_; }
  const std::vector<Rat>& coeffs() const { return coeffs_; }

  bool is_zero() const {
    for (const auto& c : coeffs_)
      if (c != 0) return false;
    return true;
  }

  bool is_rational() const {
    for (size_t j = 1; j < coeffs_.size(); ++j)
      if (coeffs_[j] != 0) return false;
    return true;
  }

  Rat rational_part() const { return coeffs_[0]; }

  // Rationals pass freely between orders; anything else must match.
  static int join_order(const CycloScalar& a, const CycloScalar& b) {
    if (a.order_ == b.order_) return a.order_;
    if (a.is_rational()) return b.order_;
    if (b.is_rational()) return a.order_;
    throw error("mismatched cyclotomic orders " + std::to_string(a.order_) +
                " and " + std::to_string(b.order_));
  }

  CycloScalar promoted(int order) const {
    if (order_ == order) return *this;
    if (!is_rational())
      throw error("cannot promote non-rational cyclotomic value across orders");
    return CycloScalar(coeffs_[0], order);
  }

  friend CycloScalar operator+(const CycloScalar& a, const CycloScalar& b) {
    int N = join_order(a, b);
    CycloScalar x = a.promoted(N), y = b.promoted(N);
    for (size_t j = 0; j < x.coeffs_.size(); ++j) x.coeffs_[j] += y.coeffs_[j];
    return x;
  }

  friend CycloScalar operator-(const CycloScalar& a, const CycloScalar& b) {
    int N = join_order(a, b);
    CycloScalar x = a.promoted(N), y = b.promoted(N);
    for (size_t j = 0; j < x.coeffs_.size(); ++j) x.coeffs_[j] -= y.coeffs_[j];
    return x;
  }

  CycloScalar operator-() const {
    CycloScalar x = *this;
    for (auto& c : x.coeffs_) c = -c;
    return x;
  }

  friend CycloScalar operator*(const CycloScalar& a, const CycloScalar& b) {
    int N = join_order(a, b);
    CycloScalar x = a.promoted(N), y = b.promoted(N);
    const auto& t = cyclo_table(N);
    CycloScalar out(Rat(0), N);
    for (int i = 0; i < t.phi; ++i) {
      if (x.coeffs_[i] == 0) continue;
      for (int j = 0; j < t.phi; ++j) {
        if (y.coeffs_[j] == 0) continue;
        Rat c = x.coeffs_[i] * y.coeffs_[j];
        const QPoly& rw = t.power_rewrite[i + j];
        for (int p = 0; p < t.phi; ++p)
          if (rw[p] != 0) out.coeffs_[p] += c * rw[p];
      }
    }
    return out;
  }

  CycloScalar inverse() const {
    if (is_zero()) throw error("division by zero in Q(zeta)");
    if (is_rational()) {
      CycloScalar out = *this;
      out.coeffs_[0] = Rat(1) / coeffs_[0];
      return out;
    }
    // Extended Euclid in Q[x]: s*a + t*Phi_N = 1, inverse is s mod Phi_N.
    const auto& tab = cyclo_table(order_);
    QPoly r0 = tab.cyclo;
    QPoly r1(coeffs_.begin(), coeffs_.end());
    qp_trim(r1);
    QPoly s0 = {}, s1 = {Rat(1)};
    while (!r1.empty() && r1.size() > 1) {
      auto [q, r2] = qp_divmod(r0, r1);
      QPoly s2 = s0;
      QPoly qs1 = qp_mul(q, s1);
      s2.resize(std::max(s2.size(), qs1.size()), Rat(0));
      for (size_t i = 0; i < qs1.size(); ++i) s2[i] -= qs1[i];
      qp_trim(s2);
      r0 = std::move(r1);
      r1 = std::move(r2);
      s0 = std::move(s1);
      s1 = std::move(s2);
    }
    if (r1.empty()) throw error("cyclotomic inverse: unexpected common factor");
    // r1 is a nonzero constant c: inverse = s1 / c.
    Rat c = r1[0];
    CycloScalar out(Rat(0), order_);
    s1.resize(tab.phi, Rat(0));
    for (int j = 0; j < tab.phi; ++j) out.coeffs_[j] = s1[j] / c;
    return out;
  }

  friend CycloScalar operator/(const CycloScalar& a, const CycloScalar& b) {
    return a * b.inverse();
  }

  friend bool operator==(const CycloScalar& a, const CycloScalar& b) {
    if (a.order_ != b.order_) {
      if (a.is_rational() && b.is_rational())
        return a.coeffs_[0] == b.coeffs_[0];
      if (a.is_rational() || b.is_rational()) return false;
      return false;
    }
    return a.coeffs_ == b.coeffs_;
  }
  friend bool operator!=(const CycloScalar& a, const CycloScalar& b) {
    return !(a == b);
  }

  // Galois conjugation zeta -> zeta^-1.
  CycloScalar conjugated() const {
    CycloScalar out(Rat(0), order_);
    for (size_t j = 0; j < coeffs_.size(); ++j) {
      if (coeffs_[j] == 0) continue;
      CycloScalar term = zeta(order_, -long(j));
      for (auto& c : term.coeffs_) c *= coeffs_[j];
      out = out + term;
    }
    return out;
  }

  // Terms as (zeta power, rational), zeros skipped.
  std::vector<std::pair<int, Rat>> terms() const {
    std::vector<std::pair<int, Rat>> out;
    for (size_t j = 0; j < coeffs_.size(); ++j)
      if (coeffs_[j] != 0) out.emplace_back(int(j), coeffs_[j]);
    return out;
  }

 private:
  int order_;
  std::vector<Rat> coeffs_;
};

}  // namespace orb
