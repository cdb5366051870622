#pragma once

#include <fstream>
#include <limits>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "klr/coxeter.hpp"
#include "klr/error.hpp"
#include "klr/hecke.hpp"
#include "klr/laurent.hpp"

namespace klr {

// A validated table of ell-Kazhdan-Lusztig polynomials h_{y,x}, keyed by the
// canonical reduced words of y and x.  ell = 0 means the ordinary KL table
// (computable internally); ell > 0 tables are ingested from files.
struct KLTable {
  CartanType cartan;
  int ell = 0;
  std::map<std::pair<std::string, std::string>, LaurentPoly> polys;
  std::string provenance;

  LaurentPoly get(const std::string& y_word, const std::string& x_word) const {
    auto it = polys.find({y_word, x_word});
    return it == polys.end() ? LaurentPoly::zero() : it->second;
  }
};

// Ordinary (ell = 0) table for the whole group.
inline KLTable default_table(const CoxeterSystem& sys) {
  KLTable t;
  t.cartan = sys.type();
  t.ell = 0;
  t.provenance = "computed: ordinary Kazhdan-Lusztig polynomials (ell=0)";
  for (const Element& x : sys.enumerate()) {
    const HeckeElement bx = kl_basis(x);
    const std::string xw = x.word_str();
    for (const auto& [y, h] : bx.terms()) t.polys[{y.word_str(), xw}] = h;
  }
  return t;
}

// Checks the four table invariants; returns one message per violation
// (empty means valid).  Violation messages name the failing pair and rule.
inline std::vector<std::string> validate_table(const KLTable& t) {
  std::vector<std::string> bad;
  CoxeterSystem sys(t.cartan);
  auto show = [](const std::string& w) { return w.empty() ? std::string("e") : w; };

  // Keys must be canonical reduced words of elements of the right system.
  std::map<std::pair<std::string, std::string>, std::pair<Element, Element>> parsed;
  for (const auto& [key, p] : t.polys) {
    const auto& [yw, xw] = key;
    try {
      Element y = sys.parse_word(yw);
      Element x = sys.parse_word(xw);
      if (y.word_str() != yw)
        bad.push_back("key (" + show(yw) + ", " + show(xw) + "): y-word is not canonical (expected " +
                      show(y.word_str()) + ")");
      else if (x.word_str() != xw)
        bad.push_back("key (" + show(yw) + ", " + show(xw) + "): x-word is not canonical (expected " +
                      show(x.word_str()) + ")");
      else
        parsed.emplace(key, std::make_pair(y, x));
    } catch (const error& e) {
      bad.push_back("key (" + show(yw) + ", " + show(xw) + "): " + e.what());
    }
  }

  // Diagonal h_{x,x} = 1 for every group element.
  const std::vector<Element> all = sys.enumerate();
  for (const Element& x : all) {
    const std::string w = x.word_str();
    if (t.get(w, w) != LaurentPoly::one())
      bad.push_back("(" + show(w) + ", " + show(w) + "): diagonal != 1");
  }

  // Support, positivity.
  for (const auto& [key, yx] : parsed) {
    const auto& [yw, xw] = key;
    const auto& [y, x] = yx;
    const LaurentPoly& p = t.polys.at(key);
    if (!sys.bruhat_leq(y, x))
      bad.push_back("(" + show(yw) + ", " + show(xw) + "): nonzero entry but y is not <= x");
    if (!p.all_coeffs_nonneg())
      bad.push_back("(" + show(yw) + ", " + show(xw) + "): negative coefficient");
  }

  // Each b_x = sum_y h_{y,x} delta_y must be bar-invariant.
  std::map<std::string, HeckeElement> columns;
  for (const auto& [key, yx] : parsed) {
    const auto& [yw, xw] = key;
    auto it = columns.find(xw);
    if (it == columns.end())
      it = columns.emplace(xw, HeckeElement::zero_on(sys.data())).first;
    it->second.add(yx.first, t.polys.at(key));
  }
  for (const Element& x : all) {
    auto it = columns.find(x.word_str());
    if (it == columns.end()) continue;  // missing diagonal already reported
    const BarCheckResult r = bar_invariance_check(it->second);
    if (!r.ok)
      bad.push_back("(" + show(x.word_str()) + "): b_x fails bar-invariance, witness y = " +
                    (r.witness ? show(r.witness->word_str()) : std::string("?")));
  }
  return bad;
}

namespace detail {

inline Int json_coeff(const nlohmann::json& j) {
  if (j.is_number_integer()) return Int(j.get<long long>());
  if (j.is_string()) {
    try {
      return Int(j.get<std::string>());
    } catch (...) {
      throw validation_error("schema: bad integer string '" + j.get<std::string>() + "'");
    }
  }
  throw validation_error("schema: coefficient must be an integer or integer string");
}

}  // namespace detail

// Schema-level parse of the table JSON; invariant checks live in
// validate_table.
inline KLTable table_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw validation_error("schema: top level must be an object");
  for (const auto& [k, v] : j.items())
    if (k != "cartan" && k != "ell" && k != "polys" && k != "provenance")
      throw validation_error("schema: unknown key '" + k + "'");
  if (!j.contains("cartan") || !j["cartan"].is_string())
    throw validation_error("schema: missing string field 'cartan'");
  if (!j.contains("ell") || !j["ell"].is_number_integer() || j["ell"].get<long long>() < 0)
    throw validation_error("schema: missing nonnegative integer field 'ell'");
  if (!j.contains("polys") || !j["polys"].is_object())
    throw validation_error("schema: missing object field 'polys'");

  KLTable t;
  t.cartan = CartanType::parse(j["cartan"].get<std::string>());
  t.ell = static_cast<int>(j["ell"].get<long long>());
  if (j.contains("provenance")) {
    if (!j["provenance"].is_string())
      throw validation_error("schema: 'provenance' must be a string");
    t.provenance = j["provenance"].get<std::string>();
  }
  for (const auto& [key, val] : j["polys"].items()) {
    const size_t bar = key.find('|');
    if (bar == std::string::npos)
      throw validation_error("schema: poly key '" + key + "' lacks the 'y|x' separator");
    const std::string yw = key.substr(0, bar);
    const std::string xw = key.substr(bar + 1);
    if (!val.is_array() || val.empty())
      throw validation_error("schema: poly '" + key + "' must be a nonempty [exp, coeff] array");
    LaurentPoly p;
    bool have_prev = false;
    int prev_exp = 0;
    for (const auto& pair : val) {
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer())
        throw validation_error("schema: poly '" + key + "' has a malformed [exp, coeff] pair");
      const int exp = static_cast<int>(pair[0].get<long long>());
      const Int coeff = detail::json_coeff(pair[1]);
      if (coeff == 0)
        throw validation_error("schema: poly '" + key + "' stores a zero coefficient");
      if (have_prev && exp == prev_exp)
        throw validation_error("schema: poly '" + key + "' has duplicate exponent " +
                               std::to_string(exp));
      if (have_prev && exp < prev_exp)
        throw validation_error("schema: poly '" + key + "' exponents not sorted ascending");
      p += LaurentPoly::term(coeff, exp);
      prev_exp = exp;
      have_prev = true;
    }
    if (!t.polys.emplace(std::make_pair(yw, xw), std::move(p)).second)
      throw validation_error("schema: duplicate poly key '" + key + "'");
  }
  return t;
}

inline nlohmann::ordered_json table_to_json(const KLTable& t) {
  nlohmann::ordered_json j;
  j["cartan"] = t.cartan.str();
  j["ell"] = t.ell;
  if (!t.provenance.empty()) j["provenance"] = t.provenance;
  // Deterministic key order: by x, then y, in canonical element order.
  CoxeterSystem sys(t.cartan);
  std::map<std::pair<Element, Element>, const LaurentPoly*> ordered;
  for (const auto& [key, p] : t.polys)
    ordered.emplace(std::make_pair(sys.parse_word(key.second), sys.parse_word(key.first)), &p);
  nlohmann::ordered_json polys = nlohmann::ordered_json::object();
  for (const auto& [xy, p] : ordered) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& [exp, c] : p->terms()) {
      nlohmann::ordered_json pair = nlohmann::ordered_json::array();
      pair.push_back(exp);
      if (c >= std::numeric_limits<long long>::min() && c <= std::numeric_limits<long long>::max())
        pair.push_back(static_cast<long long>(c));
      else
        pair.push_back(c.str());
      arr.push_back(std::move(pair));
    }
    polys[xy.second.word_str() + "|" + xy.first.word_str()] = std::move(arr);
  }
  j["polys"] = std::move(polys);
  return j;
}

// Loads, schema-checks, and fully validates a table file; throws
// validation_error carrying every violated invariant.
inline KLTable load_table(const std::string& path, CartanType expected) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open table file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw validation_error("schema: " + std::string(e.what()));
  }
  KLTable t = table_from_json(j);
  if (t.cartan != expected)
    throw validation_error("table file is for " + t.cartan.str() + ", expected " +
                           expected.str());
  const std::vector<std::string> bad = validate_table(t);
  if (!bad.empty()) {
    std::string msg = "table '" + path + "' violates " + std::to_string(bad.size()) +
                      " invariant(s):";
    for (const auto& b : bad) msg += "\n  " + b;
    throw validation_error(msg);
  }
  if (t.provenance.empty()) t.provenance = "loaded: " + path;
  return t;
}

inline void save_table(const KLTable& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw validation_error("cannot write table file '" + path + "'");
  out << table_to_json(t).dump(1) << '\n';
}

// Langlands-dual table: the Cartan family is relabelled (A<->A, B<->C, C<->B,
// D<->D, E<->E, F4<->F4, G2<->G2) with generators identified by index.  For
// ell = 0 the polynomials carry over unchanged; for ell > 0 on a
// non-self-dual type the dual data must have been loaded separately.
inline KLTable dual_table(const KLTable& t) {
  if (t.ell > 0 && !t.cartan.self_dual())
    throw missing_data_error("no ell=" + std::to_string(t.ell) + " table loaded for the dual type " +
                             t.cartan.dual().str() + " of " + t.cartan.str());
  KLTable out = t;
  out.cartan = t.cartan.dual();
  if (out.cartan != t.cartan) out.provenance = "dual of (" + t.provenance + ")";
  return out;
}

inline KLTable dual_table(const KLTable& t, std::span<const KLTable> available) {
  if (t.ell == 0 || t.cartan.self_dual()) return dual_table(t);
  for (const KLTable& c : available)
    if (c.cartan == t.cartan.dual() && c.ell == t.ell) return c;
  return dual_table(t);  // throws missing_data_error
}

}  // namespace klr
