#ifndef CONIGAP_RINGPOLY_HPP
#define CONIGAP_RINGPOLY_HPP

#include <map>
#include <string>
#include <utility>

#include "ratseries.hpp"

namespace conigap {

// Element of Q[X^{+-1}][F]; key (m, n) is the monomial F^m X^n.
class RingPoly {
public:
  using Key = std::pair<int, int>;
  using Terms = std::map<Key, Rational>;

  RingPoly() = default;
  RingPoly(std::initializer_list<std::pair<const Key, Rational>> init) {
    for (const auto& [k, v] : init) add(k, v);
  }

  static RingPoly F() { return {{{1, 0}, 1}}; }
  static RingPoly X() { return {{{0, 1}, 1}}; }
  static RingPoly constant(const Rational& c) { return {{{0, 0}, c}}; }

  const Terms& terms() const { return t_; }
  bool empty() const { return t_.empty(); }
  Rational coeff(int m, int n) const {
    auto it = t_.find({m, n});
    return it == t_.end() ? Rational(0) : it->second;
  }

  void add(const Key& k, const Rational& v) {
    if (sgn(v) == 0) return;
    auto [it, fresh] = t_.emplace(k, v);
    if (!fresh) {
      it->second += v;
      if (sgn(it->second) == 0) t_.erase(it);
    }
  }

  RingPoly& operator+=(const RingPoly& o) {
    for (const auto& [k, v] : o.t_) add(k, v);
    return *this;
  }
  RingPoly& operator-=(const RingPoly& o) {
    for (const auto& [k, v] : o.t_) add(k, -v);
    return *this;
  }
  RingPoly& operator*=(const Rational& c) {
    if (sgn(c) == 0) { t_.clear(); return *this; }
    for (auto& kv : t_) kv.second *= c;
    return *this;
  }
  friend RingPoly operator+(RingPoly a, const RingPoly& b) { return a += b; }
  friend RingPoly operator-(RingPoly a, const RingPoly& b) { return a -= b; }
  friend RingPoly operator*(RingPoly a, const Rational& c) { return a *= c; }
  friend RingPoly operator*(const Rational& c, RingPoly a) { return a *= c; }
  friend RingPoly operator*(const RingPoly& a, const RingPoly& b) {
    RingPoly r;
    for (const auto& [ka, va] : a.t_)
      for (const auto& [kb, vb] : b.t_) r.add({ka.first + kb.first, ka.second + kb.second}, va * vb);
    return r;
  }
  friend bool operator==(const RingPoly& a, const RingPoly& b) { return a.t_ == b.t_; }

  // Multiply by X^k.
  RingPoly shifted_X(int k) const {
    RingPoly r;
    for (const auto& [key, v] : t_) r.t_.emplace(Key{key.first, key.second + k}, v);
    return r;
  }

  // Derivation determined by its values on F and X.
  RingPoly derive(const RingPoly& dF, const RingPoly& dX) const {
    RingPoly r;
    for (const auto& [key, v] : t_) {
      auto [m, n] = key;
      if (m) r += RingPoly{{{m - 1, n}, v * m}} * dF;
      if (n) r += RingPoly{{{m, n - 1}, v * n}} * dX;
    }
    return r;
  }

  // Substitute series for F and X (same variable).
  Series evaluate(const Series& Fs, const Series& Xs) const {
    std::map<int, Series> Fp, Xp;
    auto fpow = [&](int m) -> const Series& {
      auto it = Fp.find(m);
      if (it == Fp.end()) it = Fp.emplace(m, pow(Fs, m)).first;
      return it->second;
    };
    auto xpow = [&](int n) -> const Series& {
      auto it = Xp.find(n);
      if (it == Xp.end()) it = Xp.emplace(n, pow(Xs, n)).first;
      return it->second;
    };
    int ord = std::min(Fs.order(), Xs.order());
    Series acc = Series::zero(Fs.variable(), ord);
    bool first = true;
    for (const auto& [key, v] : t_) {
      auto [m, n] = key;
      Series term = m ? (n ? fpow(m) * xpow(n) : fpow(m)) : (n ? xpow(n) : Series::constant(Fs.variable(), 1, ord));
      term *= v;
      acc = first ? term : acc + term;
      first = false;
    }
    return acc;
  }

  std::string str() const {
    std::string s;
    for (const auto& [key, v] : t_) {
      if (!s.empty()) s += " + ";
      s += "(" + rational_to_string(v) + ")";
      if (key.first) s += "*F^" + std::to_string(key.first);
      if (key.second) s += "*X^" + std::to_string(key.second);
    }
    return s.empty() ? "0" : s;
  }

private:
  Terms t_;
};

} // namespace conigap

#endif
