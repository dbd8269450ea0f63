#pragma once

#include <limits>
#include <map>

#include "cyclo.hpp"

namespace orb {

// Sentinel truncation order for exactly-known series (all omitted
// coefficients are genuinely zero).
inline constexpr int kExact = std::numeric_limits<int>::max();

inline int trunc_add(int t, int d) {
  if (t == kExact) return kExact;
  return t + d;
}

// Finite Laurent series in hbar over Q(zeta_N), valid through exponent
// trunc(): coefficients above it are unknown, not zero.
class HbarSeries {
 public:
  HbarSeries() : order_(1), trunc_(kExact) {}
  explicit HbarSeries(int order, int trunc = kExact)
      : order_(order), trunc_(trunc) {}

  static HbarSeries term(const CycloScalar& c, int exp, int trunc = kExact) {
    HbarSeries s(c.order(), trunc);
    if (!c.is_zero() && exp <= trunc) s.c_[exp] = c;
    return s;
  }
  static HbarSeries constant(const Rat& q, int order = 1) {
    return term(CycloScalar(q, order), 0);
  }

  int order() const { return order_; }
  int trunc() const { return trunc_; }
  const std::map<int, CycloScalar>& coeffs() const { return c_; }

  bool is_zero() const { return c_.empty(); }

  // Lowest stored exponent; kExact when there are no terms.
  int low() const { return c_.empty() ? kExact : c_.begin()->first; }

  CycloScalar at(int exp) const {
    auto it = c_.find(exp);
    if (it != c_.end()) return it->second;
    return CycloScalar(Rat(0), order_);
  }

  HbarSeries truncated(int t) const {
    HbarSeries out(order_, std::min(trunc_, t));
    for (const auto& [e, c] : c_)
      if (e <= out.trunc_) out.c_[e] = c;
    return out;
  }

  // Drop coefficients above the bound, keeping the validity claim intact
  // when nothing is actually dropped.
  HbarSeries weight_clipped(int allowed) const {
    for (const auto& [e, c] : c_)
      if (e > allowed) return truncated(allowed);
    return *this;
  }

  void set(int exp, const CycloScalar& c) {
    if (exp > trunc_) return;
    if (c.is_zero())
      c_.erase(exp);
    else
      c_[exp] = c.promoted(order_);
  }

  static int join_order(const HbarSeries& a, const HbarSeries& b) {
    if (a.order_ == b.order_) return a.order_;
    if (a.rational_only()) return b.order_;
    if (b.rational_only()) return a.order_;
    throw error("mismatched cyclotomic orders in hbar series");
  }

  bool rational_only() const {
    for (const auto& [e, c] : c_)
      if (!c.is_rational()) return false;
    return true;
  }

  HbarSeries promoted(int order) const {
    if (order_ == order) return *this;
    HbarSeries out(order, trunc_);
    for (const auto& [e, c] : c_) out.c_[e] = c.promoted(order);
    return out;
  }

  friend HbarSeries operator+(const HbarSeries& a, const HbarSeries& b) {
    int N = join_order(a, b);
    HbarSeries out(N, std::min(a.trunc_, b.trunc_));
    for (const auto& [e, c] : a.c_)
      if (e <= out.trunc_) out.set(e, out.at(e) + c);
    for (const auto& [e, c] : b.c_)
      if (e <= out.trunc_) out.set(e, out.at(e) + c);
    return out;
  }

  friend HbarSeries operator-(const HbarSeries& a, const HbarSeries& b) {
    return a + (-b);
  }

  HbarSeries operator-() const {
    HbarSeries out(order_, trunc_);
    for (const auto& [e, c] : c_) out.c_[e] = -c;
    return out;
  }

  friend HbarSeries operator*(const HbarSeries& a, const HbarSeries& b) {
    int N = join_order(a, b);
    // A product term at exponent e mixes a-coefficients down to e - low(b),
    // so validity extends to min(trunc(a)+low(b), trunc(b)+low(a)).
    int t;
    if (a.c_.empty() || b.c_.empty())
      t = kExact;  // exact zero
    else
      t = std::min(trunc_add(a.trunc_, b.low()), trunc_add(b.trunc_, a.low()));
    HbarSeries out(N, t);
    for (const auto& [ea, ca] : a.c_)
      for (const auto& [eb, cb] : b.c_) {
        if (ea + eb > out.trunc_) continue;
        out.set(ea + eb, out.at(ea + eb) + ca * cb);
      }
    return out;
  }

  HbarSeries scaled(const CycloScalar& c) const {
    return (*this) * HbarSeries::term(c, 0);
  }
  HbarSeries scaled(const Rat& q) const {
    return scaled(CycloScalar(q, order_));
  }

  // Multiply by hbar^d.
  HbarSeries shifted(int d) const {
    HbarSeries out(order_, trunc_add(trunc_, d));
    for (const auto& [e, c] : c_) out.c_[e + d] = c;
    return out;
  }

  // Equality of all coefficients through the smaller truncation order.
  friend bool operator==(const HbarSeries& a, const HbarSeries& b) {
    int t = std::min(a.trunc_, b.trunc_);
    int lo = std::min(a.low(), b.low());
    if (lo == kExact) return true;
    for (int e = lo; e <= t && e != kExact; ++e) {
      if (!(a.at(e) == b.at(e))) return false;
      if (e == t) break;
      if (a.c_.upper_bound(e) == a.c_.end() && b.c_.upper_bound(e) == b.c_.end())
        break;
    }
    return true;
  }
  friend bool operator!=(const HbarSeries& a, const HbarSeries& b) {
    return !(a == b);
  }

 private:
  int order_;
  int trunc_;
  std::map<int, CycloScalar> c_;
};

}  // namespace orb
