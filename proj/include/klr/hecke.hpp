#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "klr/coxeter.hpp"
#include "klr/error.hpp"
#include "klr/laurent.hpp"

namespace klr {

namespace detail {

using RawHecke = std::map<int, LaurentPoly>;  // element index -> coefficient

inline void raw_add_scaled(RawHecke& h, int y, const LaurentPoly& p) {
  if (p.is_zero()) return;
  auto [it, inserted] = h.try_emplace(y, p);
  if (!inserted) {
    it->second += p;
    if (it->second.is_zero()) h.erase(it);
  }
}

// Right multiplication by delta_s in the delta basis:
// delta_x delta_s = delta_{xs}                        when |xs| > |x|
// delta_x delta_s = delta_{xs} + (v^{-1} - v) delta_x when |xs| < |x|.
inline RawHecke raw_delta_mult(const SystemData& sd, const RawHecke& h, int s0) {
  static const LaurentPoly quad = LaurentPoly::v(-1) - LaurentPoly::v(1);
  RawHecke out;
  for (const auto& [y, a] : h) {
    const int ys = sd.right_mul[y][s0];
    raw_add_scaled(out, ys, a);
    if (sd.lengths[ys] < sd.lengths[y]) raw_add_scaled(out, y, a * quad);
  }
  return out;
}

// bar(delta_x) as the ordered product of delta_{s_i}^{-1} = delta_{s_i} +
// (v - v^{-1}) along the canonical reduced word of x.
inline const RawHecke& ensure_bar_delta_locked(const SystemData& sd, int x) {
  if (!sd.bar_delta_done[x]) {
    static const LaurentPoly inv_corr = LaurentPoly::v(1) - LaurentPoly::v(-1);
    RawHecke h{{0, LaurentPoly::one()}};
    for (uint8_t s : sd.reps[x].word) {
      RawHecke hs = raw_delta_mult(sd, h, s);
      for (const auto& [y, a] : h) raw_add_scaled(hs, y, a * inv_corr);
      h = std::move(hs);
    }
    sd.bar_delta_cache[x] = std::move(h);
    sd.bar_delta_done[x] = 1;
  }
  return sd.bar_delta_cache[x];
}

// r_{y,x} extracted from bar(delta_x) with sign (-1)^{|x|-|y|}.
inline LaurentPoly raw_r_poly_locked(const SystemData& sd, int y, int x) {
  const RawHecke& bd = ensure_bar_delta_locked(sd, x);
  auto it = bd.find(y);
  if (it == bd.end()) return LaurentPoly::zero();
  LaurentPoly r = it->second;
  if ((sd.lengths[x] - sd.lengths[y]) % 2 != 0) r = -r;
  return r;
}

// Canonical basis b_x = sum_y h_{y,x} delta_y by the inductive algorithm
// b_{x's} = b_{x'} b_s - sum mu(y,x') b_y over y with ys < y.  Computed in
// canonical index order so every dependency is already in the cache.
inline void ensure_kl_locked(const SystemData& sd, int upto) {
  static const LaurentPoly v1 = LaurentPoly::v(1);
  for (int i = sd.kl_done_upto; i <= upto; ++i) {
    if (i == 0) {
      sd.kl_cache[0] = RawHecke{{0, LaurentPoly::one()}};
      continue;
    }
    const int s = sd.reps[i].word.back();
    const int xp = sd.right_mul[i][s];
    const RawHecke& bxp = sd.kl_cache[xp];
    RawHecke p = raw_delta_mult(sd, bxp, s);
    for (const auto& [y, a] : bxp) raw_add_scaled(p, y, a * v1);
    for (const auto& [y, a] : bxp) {
      if (sd.lengths[sd.right_mul[y][s]] >= sd.lengths[y]) continue;
      const Int mu = a.coeff(1);
      if (mu == 0) continue;
      for (const auto& [w, c] : sd.kl_cache[y]) {
        LaurentPoly corr = c;
        corr.scale(mu);
        raw_add_scaled(p, w, -corr);
      }
    }
    sd.kl_cache[i] = std::move(p);
  }
  if (upto + 1 > sd.kl_done_upto) sd.kl_done_upto = upto + 1;
}

inline Element element_at(const std::shared_ptr<const SystemData>& sd, int idx) {
  const ElemRep& r = sd->reps[idx];
  return ElementAccess::make(sd, r.m, r.mi, r.word);
}

}  // namespace detail

// A finitely supported map Element -> LaurentPoly in the standard delta
// basis.  Zero coefficients are never stored; all keys belong to one system.
class HeckeElement {
 public:
  using Terms = std::map<Element, LaurentPoly>;

  explicit HeckeElement(const CoxeterSystem& sys) : sys_(sys.data()) {}

  static HeckeElement zero_on(std::shared_ptr<const detail::SystemData> sd) {
    return HeckeElement(std::move(sd));
  }

  static HeckeElement delta(const Element& x) {
    HeckeElement h(ElementAccess::sys(x));
    h.terms_.emplace(x, LaurentPoly::one());
    return h;
  }

  static HeckeElement unit(const CoxeterSystem& sys) { return delta(sys.identity()); }

  CartanType type() const { return sys_->cartan; }
  bool is_zero() const { return terms_.empty(); }
  const Terms& terms() const { return terms_; }

  LaurentPoly coeff(const Element& x) const {
    auto it = terms_.find(x);
    return it == terms_.end() ? LaurentPoly::zero() : it->second;
  }

  HeckeElement& add(const Element& x, const LaurentPoly& c) {
    if (ElementAccess::sys(x)->cartan != sys_->cartan)
      throw mixed_system_error("Hecke term of type " + ElementAccess::sys(x)->cartan.str() +
                               " added to element over " + sys_->cartan.str());
    if (c.is_zero()) return *this;
    auto [it, inserted] = terms_.try_emplace(x, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
    return *this;
  }

  HeckeElement& operator+=(const HeckeElement& o) {
    check_type(o);
    for (const auto& [x, c] : o.terms_) add(x, c);
    return *this;
  }
  HeckeElement& operator-=(const HeckeElement& o) {
    check_type(o);
    for (const auto& [x, c] : o.terms_) add(x, -c);
    return *this;
  }
  friend HeckeElement operator+(HeckeElement a, const HeckeElement& b) { return a += b; }
  friend HeckeElement operator-(HeckeElement a, const HeckeElement& b) { return a -= b; }

  HeckeElement& scale(const LaurentPoly& p) {
    if (p.is_zero()) {
      terms_.clear();
      return *this;
    }
    for (auto& [x, c] : terms_) c *= p;
    return *this;
  }

  friend bool operator==(const HeckeElement& a, const HeckeElement& b) {
    return a.sys_->cartan == b.sys_->cartan && a.terms_ == b.terms_;
  }
  friend bool operator!=(const HeckeElement& a, const HeckeElement& b) { return !(a == b); }

  // Lines "word : polynomial" sorted by (length, ShortLex); "e" for the
  // identity.
  std::string str() const {
    std::string out;
    for (const auto& [x, c] : terms_) {
      out += x.is_identity() ? "e" : x.word_str();
      out += " : ";
      out += c.str();
      out += '\n';
    }
    return out;
  }

  std::shared_ptr<const detail::SystemData> sys() const { return sys_; }

 private:
  explicit HeckeElement(std::shared_ptr<const detail::SystemData> sd) : sys_(std::move(sd)) {}

  void check_type(const HeckeElement& o) const {
    if (o.sys_->cartan != sys_->cartan)
      throw mixed_system_error("Hecke elements over different systems (" + sys_->cartan.str() +
                               " vs " + o.sys_->cartan.str() + ")");
  }

  std::shared_ptr<const detail::SystemData> sys_;
  Terms terms_;
};

// Right multiplication h * delta_s for a simple reflection (1-based index).
inline HeckeElement delta_mult(const HeckeElement& h, int s) {
  const auto& sd = *h.sys();
  if (s < 1 || s > sd.rank)
    throw validation_error("delta_mult: generator index " + std::to_string(s) +
                           " out of range 1.." + std::to_string(sd.rank));
  static const LaurentPoly quad = LaurentPoly::v(-1) - LaurentPoly::v(1);
  const Element gen = ElementAccess::make(h.sys(), sd.refl[s - 1], sd.refl[s - 1],
                                          {static_cast<uint8_t>(s - 1)});
  HeckeElement out = HeckeElement::zero_on(h.sys());
  for (const auto& [x, a] : h.terms()) {
    const Element xs = x * gen;
    out.add(xs, a);
    if (xs.length() < x.length()) out.add(x, a * quad);
  }
  return out;
}

// Right multiplication h * delta_x, folding over a reduced word of x.
inline HeckeElement mult_delta(HeckeElement h, const Element& x) {
  for (int s : x.word()) h = delta_mult(h, s);
  return h;
}

// bar(delta_x) = delta_{x^{-1}}^{-1}, computed word-wise.
inline HeckeElement bar_delta(const Element& x) {
  static const LaurentPoly inv_corr = LaurentPoly::v(1) - LaurentPoly::v(-1);
  HeckeElement h = HeckeElement::delta(ElementAccess::make(
      ElementAccess::sys(x), detail::mat_identity(ElementAccess::sys(x)->rank),
      detail::mat_identity(ElementAccess::sys(x)->rank), {}));
  for (int s : x.word()) {
    HeckeElement hs = delta_mult(h, s);
    HeckeElement corr = h;
    corr.scale(inv_corr);
    hs += corr;
    h = hs;
  }
  return h;
}

// The bar involution of the Hecke algebra: v -> v^{-1}, delta_x -> bar(delta_x).
inline HeckeElement hecke_bar(const HeckeElement& h) {
  HeckeElement out = HeckeElement::zero_on(h.sys());
  for (const auto& [x, a] : h.terms()) {
    HeckeElement bd = bar_delta(x);
    bd.scale(a.bar());
    out += bd;
  }
  return out;
}

// r_{y,x}: coefficient of delta_y in bar(delta_x) up to the sign
// (-1)^{|x|-|y|}.  Zero unless y <= x; r_{x,x} = 1.  Cached per system.
inline LaurentPoly r_poly(const Element& y, const Element& x) {
  const auto sd = ElementAccess::sys(x);
  if (ElementAccess::sys(y)->cartan != sd->cartan)
    throw mixed_system_error("r_poly: arguments from different systems");
  std::lock_guard<std::mutex> lk(sd->mu);
  sd->ensure_enumerated_locked();
  const int iy = sd->index_of_locked(ElementAccess::matrix(y));
  const int ix = sd->index_of_locked(ElementAccess::matrix(x));
  return detail::raw_r_poly_locked(*sd, iy, ix);
}

// h_{y,x} in the normalization b_x = sum_y h_{y,x} delta_y with h_{x,x} = 1
// and h_{y,x} in v Z[v] for y < x; ell = 0 (ordinary) polynomials.
inline LaurentPoly kl_poly(const Element& y, const Element& x) {
  const auto sd = ElementAccess::sys(x);
  if (ElementAccess::sys(y)->cartan != sd->cartan)
    throw mixed_system_error("kl_poly: arguments from different systems");
  std::lock_guard<std::mutex> lk(sd->mu);
  sd->ensure_enumerated_locked();
  const int iy = sd->index_of_locked(ElementAccess::matrix(y));
  const int ix = sd->index_of_locked(ElementAccess::matrix(x));
  detail::ensure_kl_locked(*sd, ix);
  const auto& row = sd->kl_cache[ix];
  auto it = row.find(iy);
  return it == row.end() ? LaurentPoly::zero() : it->second;
}

// The canonical basis element b_x.
inline HeckeElement kl_basis(const Element& x) {
  const auto sd = ElementAccess::sys(x);
  detail::RawHecke row;
  {
    std::lock_guard<std::mutex> lk(sd->mu);
    sd->ensure_enumerated_locked();
    const int ix = sd->index_of_locked(ElementAccess::matrix(x));
    detail::ensure_kl_locked(*sd, ix);
    row = sd->kl_cache[ix];
  }
  HeckeElement out = HeckeElement::zero_on(sd);
  for (const auto& [y, c] : row) out.add(detail::element_at(sd, y), c);
  return out;
}

struct BarCheckResult {
  bool ok = false;
  std::optional<Element> witness;  // first failing x in canonical order
};

// Certificate of the identity bar(a_x) = sum_w a_w r_{x,w}, which holds
// exactly when h is bar-invariant.
inline BarCheckResult bar_invariance_check(const HeckeElement& h) {
  const auto sd = h.sys();
  std::lock_guard<std::mutex> lk(sd->mu);
  sd->ensure_enumerated_locked();
  std::vector<std::pair<int, LaurentPoly>> supp;
  for (const auto& [x, a] : h.terms())
    supp.emplace_back(sd->index_of_locked(ElementAccess::matrix(x)), a);
  // Support closure: every y below some support element.
  const int N = static_cast<int>(sd->reps.size());
  std::vector<int> closure;
  for (int y = 0; y < N; ++y)
    for (const auto& [w, a] : supp)
      if (sd->bruhat_leq_locked(y, w)) {
        closure.push_back(y);
        break;
      }
  std::map<int, LaurentPoly> coeff;
  for (const auto& [w, a] : supp) coeff[w] = a;
  for (int y : closure) {
    LaurentPoly lhs;
    if (auto it = coeff.find(y); it != coeff.end()) lhs = it->second.bar();
    LaurentPoly rhs;
    for (const auto& [w, a] : supp) rhs += a * detail::raw_r_poly_locked(*sd, y, w);
    if (lhs != rhs) return BarCheckResult{false, detail::element_at(sd, y)};
  }
  return BarCheckResult{true, std::nullopt};
}

}  // namespace klr
