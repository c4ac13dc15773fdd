#ifndef CONIGAP_RATSERIES_HPP
#define CONIGAP_RATSERIES_HPP

#include <algorithm>
#include <climits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>
#include <json.hpp>

#include "errors.hpp"

namespace conigap {

using Rational = mpq_class;

// Canonical a/b.
inline Rational frac(long a, long b) {
  Rational r(a, b);
  r.canonicalize();
  return r;
}

// "num/den", always with an explicit denominator.
inline std::string rational_to_string(const Rational& r) {
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

inline Rational parse_rational(const std::string& s) {
  Rational r;
  if (r.set_str(s, 10) != 0 || r.get_den() == 0) throw ParseError("bad rational '" + s + "'");
  r.canonicalize();
  return r;
}

// Truncated Laurent series sum_{offset <= e < order} c_e x^e + O(x^order).
class Series {
public:
  Series() : var_("x") {}

  Series(std::string var, int offset, std::vector<Rational> coeffs, int order)
      : var_(std::move(var)), off_(std::min(offset, order)), ord_(order), c_(std::move(coeffs)) {
    c_.resize(static_cast<std::size_t>(ord_ - off_));
    for (auto& a : c_) a.canonicalize();
  }

  // Power series c_0 + c_1 x + ... + O(x^{c.size()}).
  static Series power(std::string var, std::vector<Rational> c) {
    int n = static_cast<int>(c.size());
    return Series(std::move(var), 0, std::move(c), n);
  }
  static Series monomial(std::string var, int e, const Rational& c, int order) {
    Series s(std::move(var), e, {}, order);
    if (e < order) s.c_[0] = c;
    return s;
  }
  static Series constant(std::string var, const Rational& c, int order) {
    return monomial(std::move(var), 0, c, order);
  }
  static Series zero(std::string var, int order) { return Series(std::move(var), order, {}, order); }

  const std::string& variable() const { return var_; }
  int offset() const { return off_; }
  int order() const { return ord_; }
  const std::vector<Rational>& coeffs() const { return c_; }

  Rational operator[](int e) const {
    if (e >= ord_)
      throw TruncationExceeded("coefficient of " + var_ + "^" + std::to_string(e) +
                               " requested, known below " + std::to_string(ord_));
    if (e < off_) return 0;
    return c_[static_cast<std::size_t>(e - off_)];
  }

  // First exponent with nonzero coefficient; order() when none is known.
  int valuation() const {
    for (std::size_t i = 0; i < c_.size(); ++i)
      if (sgn(c_[i]) != 0) return off_ + static_cast<int>(i);
    return ord_;
  }
  bool is_zero() const { return valuation() == ord_; }

  Series normalized() const {
    int v = valuation();
    return Series(var_, v, std::vector<Rational>(c_.begin() + (v - off_), c_.end()), ord_);
  }
  Series truncated(int order) const {
    order = std::min(order, ord_);
    int off = std::min(off_, order);
    std::vector<Rational> c;
    for (int e = off; e < order; ++e) c.push_back((*this)[e]);
    return Series(var_, off, std::move(c), order);
  }
  // Re-expand with a lower offset, padding with zeros.
  Series with_offset(int offset) const {
    if (offset >= off_) return *this;
    std::vector<Rational> c(static_cast<std::size_t>(off_ - offset));
    c.insert(c.end(), c_.begin(), c_.end());
    return Series(var_, offset, std::move(c), ord_);
  }
  Series renamed(std::string var) const { return Series(std::move(var), off_, c_, ord_); }

  Series operator-() const {
    Series r = *this;
    for (auto& x : r.c_) x = -x;
    return r;
  }
  Series& operator*=(const Rational& k) {
    for (auto& x : c_) x *= k;
    return *this;
  }
  Series& operator/=(const Rational& k) {
    if (sgn(k) == 0) throw DivisionByZeroSeries("division by zero scalar");
    for (auto& x : c_) x /= k;
    return *this;
  }

  // Strict equality: same variable, order and coefficients.
  friend bool operator==(const Series& a, const Series& b) {
    if (a.var_ != b.var_ || a.ord_ != b.ord_) return false;
    int lo = std::min(a.off_, b.off_);
    for (int e = lo; e < a.ord_; ++e)
      if (a[e] != b[e]) return false;
    return true;
  }
  // Equal wherever both are known.
  bool agrees_with(const Series& b) const {
    if (var_ != b.var_) return false;
    int hi = std::min(ord_, b.ord_);
    for (int e = std::min(off_, b.off_); e < hi; ++e)
      if ((*this)[e] != b[e]) return false;
    return true;
  }

  template <class T> T evaluate(const T& x) const {
    T acc(0);
    for (int i = static_cast<int>(c_.size()) - 1; i >= 0; --i) acc = acc * x + T(c_[static_cast<std::size_t>(i)].get_d());
    T p(1);
    int k = off_ >= 0 ? off_ : -off_;
    for (int i = 0; i < k; ++i) p *= x;
    return off_ >= 0 ? acc * p : acc / p;
  }

  std::string str() const {
    std::ostringstream os;
    bool first = true;
    for (int e = off_; e < ord_; ++e) {
      const Rational& c = c_[static_cast<std::size_t>(e - off_)];
      if (sgn(c) == 0) continue;
      os << (first ? (sgn(c) < 0 ? "-" : "") : (sgn(c) < 0 ? " - " : " + "));
      Rational a = abs(c);
      bool unit = a == 1 && e != 0;
      if (!unit) os << a.get_str();
      if (e != 0) os << (unit ? "" : "*") << var_ << (e != 1 ? "^" + std::to_string(e) : "");
      first = false;
    }
    os << (first ? "" : " + ") << "O(" << var_ << "^" << ord_ << ")";
    return os.str();
  }

private:
  std::string var_;
  int off_ = 0;
  int ord_ = 0;
  std::vector<Rational> c_;
};

namespace detail {
inline void same_var(const Series& a, const Series& b) {
  if (a.variable() != b.variable())
    throw VariableMismatch("'" + a.variable() + "' vs '" + b.variable() + "'");
}
} // namespace detail

inline Series operator+(const Series& a, const Series& b) {
  detail::same_var(a, b);
  int ord = std::min(a.order(), b.order());
  int off = std::min(a.offset(), b.offset());
  std::vector<Rational> c;
  c.reserve(static_cast<std::size_t>(std::max(0, ord - off)));
  for (int e = off; e < ord; ++e) c.push_back(a[e] + b[e]);
  return Series(a.variable(), off, std::move(c), ord);
}
inline Series operator-(const Series& a, const Series& b) { return a + (-b); }

inline Series operator*(const Series& a, const Series& b) {
  detail::same_var(a, b);
  int va = a.valuation(), vb = b.valuation();
  int ord = std::min(va + b.order(), vb + a.order());
  int off = std::min(a.offset() + b.offset(), ord);
  std::vector<Rational> c(static_cast<std::size_t>(ord - off));
  mpq_class t;
  for (int i = va; i < a.order(); ++i) {
    const Rational& ai = a.coeffs()[static_cast<std::size_t>(i - a.offset())];
    if (sgn(ai) == 0) continue;
    for (int j = vb; j < b.order() && i + j < ord; ++j) {
      const Rational& bj = b.coeffs()[static_cast<std::size_t>(j - b.offset())];
      if (sgn(bj) == 0) continue;
      mpq_mul(t.get_mpq_t(), ai.get_mpq_t(), bj.get_mpq_t());
      auto& dst = c[static_cast<std::size_t>(i + j - off)];
      mpq_add(dst.get_mpq_t(), dst.get_mpq_t(), t.get_mpq_t());
    }
  }
  return Series(a.variable(), off, std::move(c), ord);
}

inline Series operator*(const Series& a, const Rational& k) { Series r = a; r *= k; return r; }
inline Series operator*(const Rational& k, const Series& a) { return a * k; }
inline Series operator/(const Series& a, const Rational& k) { Series r = a; r /= k; return r; }
inline Series operator+(const Series& a, const Rational& k) {
  return a + Series::constant(a.variable(), k, a.order());
}
inline Series operator-(const Series& a, const Rational& k) { return a + Rational(-k); }
inline Series operator+(const Rational& k, const Series& a) { return a + k; }
inline Series operator-(const Rational& k, const Series& a) { return (-a) + k; }

inline Series inverse(const Series& b) {
  int v = b.valuation();
  if (v == b.order()) throw DivisionByZeroSeries("divisor vanishes within truncation O(" + b.variable() + "^" + std::to_string(b.order()) + ")");
  int n = b.order() - v;
  const auto& bc = b.coeffs();
  auto at = [&](int k) -> const Rational& { return bc[static_cast<std::size_t>(v + k - b.offset())]; };
  std::vector<Rational> r(static_cast<std::size_t>(n));
  Rational b0inv = 1 / at(0);
  r[0] = b0inv;
  mpq_class acc, t;
  for (int k = 1; k < n; ++k) {
    acc = 0;
    for (int j = 1; j <= k; ++j) {
      if (sgn(at(j)) == 0) continue;
      mpq_mul(t.get_mpq_t(), at(j).get_mpq_t(), r[static_cast<std::size_t>(k - j)].get_mpq_t());
      acc += t;
    }
    r[static_cast<std::size_t>(k)] = -acc * b0inv;
  }
  return Series(b.variable(), -v, std::move(r), n - v);
}

inline Series operator/(const Series& a, const Series& b) {
  detail::same_var(a, b);
  return a * inverse(b);
}

enum class ArithKind { add, mul, div };

inline Series arith(const Series& a, const Series& b, ArithKind kind) {
  switch (kind) {
  case ArithKind::add: return a + b;
  case ArithKind::mul: return a * b;
  case ArithKind::div: return a / b;
  }
  return a;
}

// Exact polynomial p_0 + p_1 x + ... times s.
inline Series times_polynomial(const Series& s, const std::vector<Rational>& p) {
  int vp = 0;
  while (vp < static_cast<int>(p.size()) && sgn(p[static_cast<std::size_t>(vp)]) == 0) ++vp;
  if (vp == static_cast<int>(p.size())) return Series::zero(s.variable(), s.order());
  int ord = s.order() + vp;
  int off = std::min(s.offset(), ord);
  std::vector<Rational> c(static_cast<std::size_t>(ord - off));
  for (std::size_t i = 0; i < s.coeffs().size(); ++i)
    for (std::size_t j = static_cast<std::size_t>(vp); j < p.size(); ++j) {
      int e = s.offset() + static_cast<int>(i + j);
      if (e < ord && sgn(p[j]) != 0) c[static_cast<std::size_t>(e - off)] += s.coeffs()[i] * p[j];
    }
  return Series(s.variable(), off, std::move(c), ord);
}

inline Series pow(const Series& s, int n) {
  if (n < 0) return pow(inverse(s), -n);
  if (n == 0) return Series::constant(s.variable(), 1, s.order() - s.valuation());
  Series b = s;
  bool have = false;
  Series r;
  while (n) {
    if (n & 1) { r = have ? r * b : b; have = true; }
    n >>= 1;
    if (n) b = b * b;
  }
  return r;
}

inline Series theta_derivative(const Series& s) {
  std::vector<Rational> c = s.coeffs();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= s.offset() + static_cast<int>(i);
  return Series(s.variable(), s.offset(), std::move(c), s.order());
}

// Inverse of theta; the x^0 coefficient of the result is set to zero.
inline Series integrate_theta(const Series& s) {
  if (0 >= s.offset() && 0 < s.order() && sgn(s[0]) != 0)
    throw ThetaIntegrationConstant("nonzero " + s.variable() + "^0 coefficient " + rational_to_string(s[0]));
  std::vector<Rational> c = s.coeffs();
  for (std::size_t i = 0; i < c.size(); ++i) {
    int e = s.offset() + static_cast<int>(i);
    if (e != 0) c[i] /= e;
  }
  return Series(s.variable(), s.offset(), std::move(c), s.order());
}

inline Series derivative(const Series& s) {
  std::vector<Rational> c = s.coeffs();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= s.offset() + static_cast<int>(i);
  return Series(s.variable(), s.offset() - 1, std::move(c), s.order() - 1);
}

// Antiderivative with zero constant term.
inline Series integrate(const Series& s) {
  if (-1 >= s.offset() && -1 < s.order() && sgn(s[-1]) != 0)
    throw ThetaIntegrationConstant("nonzero residue term in d" + s.variable() + " integration");
  std::vector<Rational> c = s.coeffs();
  for (std::size_t i = 0; i < c.size(); ++i) {
    int e = s.offset() + static_cast<int>(i);
    if (e != -1) c[i] /= e + 1;
  }
  return Series(s.variable(), s.offset() + 1, std::move(c), s.order() + 1);
}

inline Series compose(const Series& outer, const Series& inner) {
  int v = inner.valuation();
  for (int e = std::min(inner.offset(), 0); e <= 0 && e < inner.order(); ++e)
    if (sgn(inner[e]) != 0)
      throw CompositionDomain("inner series has nonzero " + inner.variable() + "^" + std::to_string(e) + " term");
  if (v < 1) throw CompositionDomain("inner series must vanish at 0");
  const std::string& var = inner.variable();
  int e0 = outer.valuation();
  int ni = inner.order() - v; // relative precision of inner / x^v
  long ord = static_cast<long>(outer.order()) * v;
  for (int e = e0; e < outer.order(); ++e)
    if (e != 0 && sgn(outer[e]) != 0) ord = std::min(ord, static_cast<long>(e) * v + ni);
  if (e0 < 0 && inner.is_zero()) throw CompositionDomain("negative powers of a series vanishing within truncation");
  int ordi = static_cast<int>(ord);
  if (e0 >= outer.order()) return Series::zero(var, ordi);
  // Horner on sum_k c_{e0+k} inner^k, then multiply by inner^{e0}.
  Series acc = Series::zero(var, ordi - std::min(e0, 0) * v);
  Series in = inner.truncated(ordi - std::min(e0, 0) * v + v);
  for (int e = outer.order() - 1; e >= e0; --e) {
    acc = acc * in;
    Rational ce = outer[e];
    if (sgn(ce) != 0) acc = acc + Series::constant(var, ce, acc.order());
  }
  if (e0 > 0) acc = acc * pow(in, e0);
  if (e0 < 0) acc = acc * pow(inverse(in), -e0);
  return acc.truncated(ordi);
}

inline Series revert(const Series& s) {
  for (int e = std::min(s.offset(), 0); e <= 0 && e < s.order(); ++e)
    if (sgn(s[e]) != 0) throw NotReversible("constant or polar term present");
  if (s.order() < 2 || sgn(s[1]) == 0) throw NotReversible("linear coefficient vanishes");
  int n = s.order();
  // Lagrange inversion: [x^k] g = (1/k) [z^{k-1}] (z/s(z))^k.
  std::vector<Rational> sz;
  for (int e = 1; e < n; ++e) sz.push_back(s[e]);
  Series phi = inverse(Series::power("z", sz));
  std::vector<Rational> g(static_cast<std::size_t>(n - 1));
  Series p = Series::constant("z", 1, n - 1);
  for (int k = 1; k < n; ++k) {
    p = (p * phi).truncated(n - 1);
    g[static_cast<std::size_t>(k - 1)] = p[k - 1] / k;
  }
  return Series(s.variable(), 1, std::move(g), n);
}

inline Series exp(const Series& s) {
  for (int e = std::min(s.offset(), 0); e <= 0 && e < s.order(); ++e)
    if (sgn(s[e]) != 0) throw ExpLogDomain("exp needs a series without constant or polar terms");
  int n = s.order();
  if (n <= 0) return Series::zero(s.variable(), n);
  std::vector<Rational> ta(static_cast<std::size_t>(n)), E(static_cast<std::size_t>(n));
  for (int k = 1; k < n; ++k) ta[static_cast<std::size_t>(k)] = s[k] * k;
  E[0] = 1;
  mpq_class acc, t;
  for (int k = 1; k < n; ++k) {
    acc = 0;
    for (int j = 1; j <= k; ++j) {
      if (sgn(ta[static_cast<std::size_t>(j)]) == 0) continue;
      mpq_mul(t.get_mpq_t(), ta[static_cast<std::size_t>(j)].get_mpq_t(), E[static_cast<std::size_t>(k - j)].get_mpq_t());
      acc += t;
    }
    E[static_cast<std::size_t>(k)] = acc / k;
  }
  return Series(s.variable(), 0, std::move(E), n);
}

inline Series log(const Series& s) {
  for (int e = std::min(s.offset(), 0); e < 0 && e < s.order(); ++e)
    if (sgn(s[e]) != 0) throw ExpLogDomain("log of a series with polar terms");
  if (s.order() <= 0 || s[0] != 1) throw ExpLogDomain("log needs constant term 1");
  Series r = integrate_theta(theta_derivative(s) / s);
  return r.truncated(s.order());
}

enum class ExpLogKind { exp, log };

inline Series explog(const Series& s, ExpLogKind kind) {
  return kind == ExpLogKind::exp ? exp(s) : log(s);
}

inline nlohmann::json to_json(const Series& s) {
  nlohmann::json c = nlohmann::json::array();
  for (const auto& x : s.coeffs()) c.push_back(rational_to_string(x));
  return {{"variable", s.variable()}, {"offset", s.offset()}, {"order", s.order()}, {"coeffs", c}};
}

inline Series series_from_json(const nlohmann::json& j) {
  try {
    std::vector<Rational> c;
    for (const auto& x : j.at("coeffs")) c.push_back(parse_rational(x.get<std::string>()));
    int off = j.at("offset").get<int>(), ord = j.at("order").get<int>();
    if (static_cast<int>(c.size()) != ord - off) throw ParseError("coeffs length must equal order - offset");
    return Series(j.at("variable").get<std::string>(), off, std::move(c), ord);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(e.what());
  }
}

} // namespace conigap

#endif
