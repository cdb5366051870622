#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <cstdlib>
#include <map>
#include <string>
#include <string_view>
#include <utility>

#include "klr/error.hpp"

namespace klr {

using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Integer-coefficient Laurent polynomial in one variable v.  The coefficient
// map is kept canonical: no zero coefficient is ever stored, so structural
// equality of the maps is equality of values.  Instances are immutable once
// built through the arithmetic operators and safe to share across threads.
class LaurentPoly {
 public:
  using Terms = std::map<int, Int>;  // exponent -> nonzero coefficient

  LaurentPoly() = default;

  static LaurentPoly zero() { return LaurentPoly(); }

  static LaurentPoly constant(Int c) { return term(std::move(c), 0); }

  static LaurentPoly one() { return constant(1); }

  // c * v^k
  static LaurentPoly term(Int c, int k) {
    LaurentPoly p;
    if (c != 0) p.terms_[k] = std::move(c);
    return p;
  }

  // v^k
  static LaurentPoly v(int k = 1) { return term(1, k); }

  bool is_zero() const { return terms_.empty(); }

  const Terms& terms() const { return terms_; }

  Int coeff(int k) const {
    auto it = terms_.find(k);
    return it == terms_.end() ? Int(0) : it->second;
  }

  int min_exp() const { return terms_.empty() ? 0 : terms_.begin()->first; }
  int max_exp() const { return terms_.empty() ? 0 : terms_.rbegin()->first; }

  friend bool operator==(const LaurentPoly& a, const LaurentPoly& b) {
    return a.terms_ == b.terms_;
  }
  friend bool operator!=(const LaurentPoly& a, const LaurentPoly& b) {
    return !(a == b);
  }
  // Lexicographic on the canonical term maps; used only to get deterministic
  // orderings in containers.
  friend bool operator<(const LaurentPoly& a, const LaurentPoly& b) {
    return a.terms_ < b.terms_;
  }

  LaurentPoly& operator+=(const LaurentPoly& o) {
    for (const auto& [k, c] : o.terms_) add_term(k, c);
    return *this;
  }
  LaurentPoly& operator-=(const LaurentPoly& o) {
    for (const auto& [k, c] : o.terms_) add_term(k, -c);
    return *this;
  }

  friend LaurentPoly operator+(LaurentPoly a, const LaurentPoly& b) {
    a += b;
    return a;
  }
  friend LaurentPoly operator-(LaurentPoly a, const LaurentPoly& b) {
    a -= b;
    return a;
  }
  friend LaurentPoly operator-(const LaurentPoly& a) {
    LaurentPoly r;
    for (const auto& [k, c] : a.terms_) r.terms_[k] = -c;
    return r;
  }

  friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
    LaurentPoly r;
    for (const auto& [ka, ca] : a.terms_)
      for (const auto& [kb, cb] : b.terms_) r.add_term(ka + kb, ca * cb);
    return r;
  }
  LaurentPoly& operator*=(const LaurentPoly& o) { return *this = *this * o; }

  LaurentPoly& scale(const Int& c) {
    if (c == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [k, x] : terms_) x *= c;
    return *this;
  }

  // Multiply by v^k.
  LaurentPoly shifted(int k) const {
    LaurentPoly r;
    for (const auto& [e, c] : terms_) r.terms_[e + k] = c;
    return r;
  }

  // The bar involution v -> v^{-1}: negates every exponent.
  LaurentPoly bar() const {
    LaurentPoly r;
    for (const auto& [k, c] : terms_) r.terms_[-k] = c;
    return r;
  }

  // Exact evaluation at a nonzero rational point.
  Rational eval(const Rational& t) const {
    if (t == 0) throw validation_error("eval: division by zero at t = 0");
    Rational acc = 0;
    for (const auto& [k, c] : terms_) acc += Rational(c) * rational_pow(t, k);
    return acc;
  }

  // Sum of coefficients; equals eval(1) but stays in the integers.
  Int eval_one() const {
    Int acc = 0;
    for (const auto& [k, c] : terms_) acc += c;
    return acc;
  }

  bool all_coeffs_nonneg() const {
    for (const auto& [k, c] : terms_)
      if (c < 0) return false;
    return true;
  }

  // True when every exponent is congruent to `parity` mod 2.
  bool supported_in_parity(int parity) const {
    const int p = ((parity % 2) + 2) % 2;
    for (const auto& [k, c] : terms_)
      if (((k % 2) + 2) % 2 != p) return false;
    return true;
  }

  // Terms ascending by exponent: "v^-1 + v", "1 + 2*v^2", "0".
  std::string str(std::string_view var = "v") const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [k, c] : terms_) {
      const bool neg = c < 0;
      Int mag = neg ? Int(-c) : c;
      if (first) {
        if (neg) out += "-";
        first = false;
      } else {
        out += neg ? " - " : " + ";
      }
      if (k == 0) {
        out += mag.str();
      } else {
        if (mag != 1) {
          out += mag.str();
          out += "*";
        }
        out += var;
        if (k != 1) {
          out += "^";
          out += std::to_string(k);
        }
      }
    }
    return out;
  }

  // Parses the same grammar str() emits (whitespace tolerant).
  static LaurentPoly parse(std::string_view text, std::string_view var = "v") {
    LaurentPoly acc;
    size_t i = 0;
    auto skip_ws = [&] {
      while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    skip_ws();
    if (i == text.size()) throw validation_error("polynomial parse: empty input");
    bool first = true;
    while (i < text.size()) {
      int sign = 1;
      skip_ws();
      if (!first) {
        if (text[i] == '+') {
          ++i;
        } else if (text[i] == '-') {
          sign = -1;
          ++i;
        } else {
          throw validation_error("polynomial parse: expected '+' or '-' near '" +
                                 std::string(text.substr(i)) + "'");
        }
        skip_ws();
      } else {
        if (text[i] == '-') {
          sign = -1;
          ++i;
          skip_ws();
        } else if (text[i] == '+') {
          ++i;
          skip_ws();
        }
      }
      first = false;

      Int coeff = 1;
      bool saw_coeff = false;
      if (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
        size_t j = i;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
        coeff = Int(std::string(text.substr(i, j - i)));
        i = j;
        saw_coeff = true;
        skip_ws();
        if (i < text.size() && text[i] == '*') {
          ++i;
          skip_ws();
        }
      }

      int exp = 0;
      if (i + var.size() <= text.size() && text.substr(i, var.size()) == var) {
        i += var.size();
        exp = 1;
        if (i < text.size() && text[i] == '^') {
          ++i;
          bool eneg = false;
          if (i < text.size() && (text[i] == '-' || text[i] == '+')) {
            eneg = text[i] == '-';
            ++i;
          }
          if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i])))
            throw validation_error("polynomial parse: bad exponent");
          size_t j = i;
          while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
          exp = std::atoi(std::string(text.substr(i, j - i)).c_str());
          if (eneg) exp = -exp;
          i = j;
        }
      } else if (!saw_coeff) {
        throw validation_error("polynomial parse: expected term near '" +
                               std::string(text.substr(i)) + "'");
      }
      acc.add_term(exp, sign * coeff);
      skip_ws();
    }
    return acc;
  }

 private:
  void add_term(int k, const Int& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(k, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  static Rational rational_pow(const Rational& t, int k) {
    if (k == 0) return Rational(1);
    const unsigned mag = static_cast<unsigned>(k < 0 ? -static_cast<long long>(k) : k);
    Int num = boost::multiprecision::pow(boost::multiprecision::numerator(t), mag);
    Int den = boost::multiprecision::pow(boost::multiprecision::denominator(t), mag);
    return k > 0 ? Rational(num, den) : Rational(den, num);
  }

  Terms terms_;
};

// Undoes the renormalisation r = v^d * R(v^{-2}): returns the polynomial R in
// the variable q, with all exponents nonnegative.  Throws when r is not of
// that shape (wrong exponent parity, or exponents above d).
inline LaurentPoly to_R(const LaurentPoly& r, int d) {
  LaurentPoly out;
  for (const auto& [k, c] : r.terms()) {
    const int num = d - k;
    if (num % 2 != 0)
      throw validation_error("to_R: exponent parity mismatch (term v^" +
                             std::to_string(k) + " with d = " + std::to_string(d) + ")");
    if (num < 0)
      throw validation_error("to_R: exponent v^" + std::to_string(k) +
                             " exceeds v^" + std::to_string(d));
    out += LaurentPoly::term(c, num / 2);
  }
  return out;
}

// Exact value of a polynomial in q at an integer point.
inline Int eval_int_poly(const LaurentPoly& p, const Int& q) {
  Int acc = 0;
  for (const auto& [k, c] : p.terms()) {
    if (k < 0) throw validation_error("eval_int_poly: negative exponent");
    acc += c * boost::multiprecision::pow(q, static_cast<unsigned>(k));
  }
  return acc;
}

}  // namespace klr
