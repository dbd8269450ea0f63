#pragma once

#include <algorithm>

#include "hbar.hpp"

namespace orb {

// Scalar of the coefficient ring: a Laurent polynomial in u whose
// coefficients are hbar series over Q(zeta_N).
class ScalarK {
 public:
  ScalarK() : order_(1) {}
  explicit ScalarK(int order) : order_(order) {}

  static ScalarK from_hbar(const HbarSeries& h, int u_exp = 0) {
    ScalarK s(h.order());
    if (!h.is_zero()) s.c_[u_exp] = h;
    return s;
  }
  static ScalarK constant(const Rat& q, int order = 1) {
    return from_hbar(HbarSeries::constant(q, order));
  }

  int order() const { return order_; }
  const std::map<int, HbarSeries>& coeffs() const { return c_; }
  bool is_zero() const {
    for (const auto& [u, h] : c_)
      if (!h.is_zero()) return false;
    return true;
  }

  HbarSeries at_u(int u_exp) const {
    auto it = c_.find(u_exp);
    if (it != c_.end()) return it->second;
    return HbarSeries(order_);
  }

  void set_u(int u_exp, const HbarSeries& h) {
    if (h.is_zero() && h.trunc() == kExact)
      c_.erase(u_exp);
    else
      c_[u_exp] = h;
  }

  static int join_order(const ScalarK& a, const ScalarK& b) {
    if (a.order_ == b.order_) return a.order_;
    bool ar = true, br = true;
    for (const auto& [u, h] : a.c_) ar = ar && h.rational_only();
    for (const auto& [u, h] : b.c_) br = br && h.rational_only();
    if (ar) return b.order_;
    if (br) return a.order_;
    throw error("mismatched cyclotomic orders in K-scalars");
  }

  ScalarK promoted(int order) const {
    if (order_ == order) return *this;
    ScalarK out(order);
    for (const auto& [u, h] : c_) out.c_[u] = h.promoted(order);
    return out;
  }

  friend ScalarK operator+(const ScalarK& a, const ScalarK& b) {
    int N = join_order(a, b);
    ScalarK out = a.promoted(N);
    for (const auto& [u, h] : b.c_) {
      auto it = out.c_.find(u);
      if (it == out.c_.end())
        out.c_[u] = h.promoted(N);
      else
        it->second = it->second + h;
    }
    out.prune();
    return out;
  }
  friend ScalarK operator-(const ScalarK& a, const ScalarK& b) {
    return a + (-b);
  }
  ScalarK operator-() const {
    ScalarK out(order_);
    for (const auto& [u, h] : c_) out.c_[u] = -h;
    return out;
  }

  friend ScalarK operator*(const ScalarK& a, const ScalarK& b) {
    int N = join_order(a, b);
    ScalarK out(N);
    for (const auto& [ua, ha] : a.c_)
      for (const auto& [ub, hb] : b.c_) {
        HbarSeries p = ha.promoted(N) * hb.promoted(N);
        auto it = out.c_.find(ua + ub);
        if (it == out.c_.end())
          out.c_[ua + ub] = p;
        else
          it->second = it->second + p;
      }
    out.prune();
    return out;
  }

  ScalarK scaled(const CycloScalar& c) const {
    return (*this) * from_hbar(HbarSeries::term(c, 0));
  }
  ScalarK scaled(const Rat& q) const { return scaled(CycloScalar(q, order_)); }

  // Multiply by u^du * hbar^dh.
  ScalarK shifted(int du, int dh = 0) const {
    ScalarK out(order_);
    for (const auto& [u, h] : c_) out.c_[u + du] = h.shifted(dh);
    return out;
  }

  ScalarK truncated_hbar(int t) const {
    ScalarK out(order_);
    for (const auto& [u, h] : c_) out.c_[u] = h.truncated(t);
    out.prune();
    return out;
  }

  ScalarK weight_clipped(int allowed) const {
    ScalarK out(order_);
    for (const auto& [u, h] : c_) out.c_[u] = h.weight_clipped(allowed);
    out.prune();
    return out;
  }

  friend bool operator==(const ScalarK& a, const ScalarK& b) {
    std::vector<int> us;
    for (const auto& [u, h] : a.c_) us.push_back(u);
    for (const auto& [u, h] : b.c_) us.push_back(u);
    std::sort(us.begin(), us.end());
    us.erase(std::unique(us.begin(), us.end()), us.end());
    for (int u : us)
      if (a.at_u(u) != b.at_u(u)) return false;
    return true;
  }
  friend bool operator!=(const ScalarK& a, const ScalarK& b) {
    return !(a == b);
  }

 private:
  void prune() {
    for (auto it = c_.begin(); it != c_.end();) {
      if (it->second.is_zero() && it->second.trunc() == kExact)
        it = c_.erase(it);
      else
        ++it;
    }
  }

  int order_;
  std::map<int, HbarSeries> c_;
};

}  // namespace orb
