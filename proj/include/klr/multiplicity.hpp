#pragma once

#include <atomic>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "klr/coxeter.hpp"
#include "klr/error.hpp"
#include "klr/hecke.hpp"
#include "klr/kltable.hpp"
#include "klr/laurent.hpp"

namespace klr {

// Graded Jordan-Hoelder multiplicity: the coefficient of v^i in poly is the
// multiplicity of the shifted simple object L_z<i> in the tilting object T_x.
struct GradedMultiplicity {
  Element z, x;
  LaurentPoly poly;
};

enum class Suite { duality, reciprocity, parity, agreement, positivity };

inline const char* suite_name(Suite s) {
  switch (s) {
    case Suite::duality: return "duality";
    case Suite::reciprocity: return "reciprocity";
    case Suite::parity: return "parity";
    case Suite::agreement: return "agreement";
    case Suite::positivity: return "positivity";
  }
  return "?";
}

inline std::optional<Suite> suite_from_name(std::string_view s) {
  if (s == "duality") return Suite::duality;
  if (s == "reciprocity") return Suite::reciprocity;
  if (s == "parity") return Suite::parity;
  if (s == "agreement") return Suite::agreement;
  if (s == "positivity") return Suite::positivity;
  return std::nullopt;
}

inline std::vector<Suite> all_suites() {
  return {Suite::duality, Suite::reciprocity, Suite::parity, Suite::agreement,
          Suite::positivity};
}

struct SuiteRow {
  std::string z, x;        // serialized words ("" = identity)
  std::string polynomial;  // value, or "lhs=...; rhs=..." for a counterexample
  std::string status;      // "ok" or "FAIL..."
  bool ok = true;
};

struct SuiteResult {
  Suite suite = Suite::duality;
  CartanType type;
  size_t pairs = 0;  // strict comparable pairs z < x
  bool pass = true;
  std::vector<SuiteRow> rows;  // canonical (z, x) order
};

// Evaluates the multiplicity formulas against one fixed table pair
// (the table for the group itself and the one for its Langlands dual).
// All per-pair tables are precomputed densely at construction, so the
// compute methods are pure reads and safe to call concurrently.
class MultiplicityEngine {
 public:
  MultiplicityEngine(const CoxeterSystem& sys, const KLTable& table,
                     const std::optional<KLTable>& dual)
      : sys_(sys) {
    if (table.cartan != sys.type())
      throw validation_error("table is for " + table.cartan.str() + ", engine system is " +
                             sys.type().str());
    if (dual) {
      if (dual->cartan != sys.type().dual())
        throw validation_error("dual table is for " + dual->cartan.str() + ", expected " +
                               sys.type().dual().str());
      if (dual->ell != table.ell)
        throw validation_error("table ell mismatch: " + std::to_string(table.ell) +
                               " vs dual " + std::to_string(dual->ell));
    }
    ell_ = table.ell;
    elems_ = sys.enumerate();
    N_ = static_cast<int>(elems_.size());
    for (int i = 0; i < N_; ++i) {
      index_by_word_.emplace(elems_[i].word_str(), i);
      len_.push_back(elems_[i].length());
    }
    leq_.assign(static_cast<size_t>(N_) * N_, 0);
    for (int y = 0; y < N_; ++y)
      for (int x = 0; x < N_; ++x)
        if (sys.bruhat_leq(elems_[y], elems_[x])) leq_[static_cast<size_t>(y) * N_ + x] = 1;
    const Element w0 = sys.longest_element();
    w0mul_.resize(N_);
    for (int y = 0; y < N_; ++y) w0mul_[y] = index_by_word_.at((w0 * elems_[y]).word_str());
    auto dense = [&](const KLTable& t) {
      std::vector<std::vector<LaurentPoly>> d(N_, std::vector<LaurentPoly>(N_));
      for (const auto& [key, p] : t.polys) {
        auto iy = index_by_word_.find(key.first);
        auto ix = index_by_word_.find(key.second);
        if (iy == index_by_word_.end() || ix == index_by_word_.end())
          throw validation_error("table key (" + key.first + ", " + key.second +
                                 ") does not name elements of " + sys.type().str());
        d[iy->second][ix->second] = p;
      }
      return d;
    };
    h_ = dense(table);
    if (dual) {
      has_dual_ = true;
      hdual_ = dense(*dual);
      hdual_bar_.assign(N_, std::vector<LaurentPoly>(N_));
      for (int y = 0; y < N_; ++y)
        for (int x = 0; x < N_; ++x) hdual_bar_[y][x] = hdual_[y][x].bar();
    }
    r_.assign(N_, std::vector<LaurentPoly>(N_));
    for (int x = 0; x < N_; ++x)
      for (int y = 0; y < N_; ++y)
        if (leq(y, x)) r_[y][x] = r_poly(elems_[y], elems_[x]);
  }

  static MultiplicityEngine with_default(const CoxeterSystem& sys) {
    const KLTable t = default_table(sys);
    return MultiplicityEngine(sys, t, dual_table(t));
  }

  const CoxeterSystem& system() const { return sys_; }
  int ell() const { return ell_; }
  const std::vector<Element>& elements() const { return elems_; }

  // Prop-formula sum over z <= y <= x of hdual_{w0 y, w0 z}(v) *
  // hdual_{y, x}(v^{-1}); zero when z and x are incomparable.
  GradedMultiplicity jh_poly(const Element& z, const Element& x) const {
    const auto [iz, ix] = index_pair(z, x);
    return GradedMultiplicity{z, x, jh_by_index(iz, ix)};
  }

  // The r-polynomial form: the double sum over z <= y <= y' <= x of
  // hdual_{w0 y, w0 z}(v) r_{y,y'}(v) hdual_{y',x}(v).
  GradedMultiplicity jh_poly_r(const Element& z, const Element& x) const {
    const auto [iz, ix] = index_pair(z, x);
    return GradedMultiplicity{z, x, jhr_by_index(iz, ix)};
  }

  // Poincare polynomial of the geometric extension on the Richardson
  // variety X^z_x: v^{|x|-|z|} times the double sum with the group's own
  // table on both factors.  Requires z <= x.
  LaurentPoly richardson_poincare(const Element& z, const Element& x) const {
    const auto [iz, ix] = index_pair(z, x);
    if (!leq(iz, ix))
      throw validation_error("empty Richardson variety: z = " + pretty(z.word_str()) +
                             " is not <= x = " + pretty(x.word_str()));
    LaurentPoly acc;
    for (int yp = 0; yp < N_; ++yp) {
      if (!leq(iz, yp) || !leq(yp, ix)) continue;
      LaurentPoly inner;
      for (int y = 0; y < N_; ++y)
        if (leq(iz, y) && leq(y, yp)) inner += h_[w0mul_[y]][w0mul_[iz]] * r_[y][yp];
      acc += inner * h_[yp][ix];
    }
    return acc.shifted(len_[ix] - len_[iz]);
  }

  // Ungraded multiplicity: the graded polynomial evaluated at v = 1.
  Int ungraded_mult(const Element& z, const Element& x) const {
    return jh_poly(z, x).poly.eval_one();
  }

  SuiteResult run_suite(Suite suite, int jobs = 1) const {
    SuiteResult res;
    res.suite = suite;
    res.type = sys_.type();
    // Strict comparable pairs z < x, grouped by z in canonical order.
    std::vector<std::pair<int, int>> pairs;
    std::vector<size_t> group_begin;  // index into pairs, one group per z
    std::vector<int> group_z;
    for (int z = 0; z < N_; ++z) {
      bool any = false;
      for (int x = 0; x < N_; ++x) {
        if (x == z || !leq(z, x)) continue;
        if (!any) {
          group_begin.push_back(pairs.size());
          group_z.push_back(z);
          any = true;
        }
        pairs.emplace_back(z, x);
      }
    }
    res.pairs = pairs.size();
    res.rows.resize(pairs.size());
    group_begin.push_back(pairs.size());

    const size_t groups = group_z.size();
    std::atomic<size_t> next{0};
    auto worker = [&] {
      while (true) {
        const size_t g = next.fetch_add(1);
        if (g >= groups) break;
        const int z = group_z[g];
        for (size_t k = group_begin[g]; k < group_begin[g + 1]; ++k)
          res.rows[k] = check_pair(suite, z, pairs[k].second);
      }
    };
    int n_threads = jobs < 1 ? 1 : jobs;
    if (static_cast<size_t>(n_threads) > groups) n_threads = static_cast<int>(groups ? groups : 1);
    if (n_threads <= 1) {
      worker();
    } else {
      std::vector<std::thread> ts;
      for (int i = 0; i < n_threads; ++i) ts.emplace_back(worker);
      for (auto& t : ts) t.join();
    }
    for (const auto& row : res.rows)
      if (!row.ok) res.pass = false;
    return res;
  }

  std::vector<SuiteResult> run_suites(std::span<const Suite> suites, int jobs = 1) const {
    std::vector<SuiteResult> out;
    for (Suite s : suites) out.push_back(run_suite(s, jobs));
    return out;
  }

  static std::string pretty(const std::string& word) {
    return word.empty() ? std::string("e") : word;
  }

 private:
  bool leq(int y, int x) const { return leq_[static_cast<size_t>(y) * N_ + x] != 0; }

  std::pair<int, int> index_pair(const Element& z, const Element& x) const {
    if (z.type() != sys_.type() || x.type() != sys_.type())
      throw mixed_system_error("multiplicity arguments must belong to " + sys_.type().str());
    return {index_by_word_.at(z.word_str()), index_by_word_.at(x.word_str())};
  }

  void require_dual() const {
    if (!has_dual_)
      throw missing_data_error("no table for the dual type " + sys_.type().dual().str() +
                               " is available (ell=" + std::to_string(ell_) +
                               "); supply one with --dual-table");
  }

  LaurentPoly jh_by_index(int iz, int ix) const {
    require_dual();
    LaurentPoly acc;
    if (!leq(iz, ix)) return acc;
    for (int y = 0; y < N_; ++y)
      if (leq(iz, y) && leq(y, ix))
        acc += hdual_[w0mul_[y]][w0mul_[iz]] * hdual_bar_[y][ix];
    return acc;
  }

  LaurentPoly jhr_by_index(int iz, int ix) const {
    require_dual();
    LaurentPoly acc;
    if (!leq(iz, ix)) return acc;
    for (int yp = 0; yp < N_; ++yp) {
      if (!leq(iz, yp) || !leq(yp, ix)) continue;
      LaurentPoly inner;
      for (int y = 0; y < N_; ++y)
        if (leq(iz, y) && leq(y, yp)) inner += hdual_[w0mul_[y]][w0mul_[iz]] * r_[y][yp];
      acc += inner * hdual_[yp][ix];
    }
    return acc;
  }

  SuiteRow check_pair(Suite suite, int iz, int ix) const {
    SuiteRow row;
    row.z = elems_[iz].word_str();
    row.x = elems_[ix].word_str();
    const LaurentPoly jh = jh_by_index(iz, ix);
    row.polynomial = jh.str();
    row.status = "ok";
    auto fail_with = [&](const LaurentPoly& rhs, const std::string& why) {
      row.ok = false;
      row.status = "FAIL: " + why;
      row.polynomial = "lhs=" + jh.str() + "; rhs=" + rhs.str();
    };
    switch (suite) {
      case Suite::duality: {
        const LaurentPoly rhs = jh.bar();
        if (jh != rhs) fail_with(rhs, "not bar-symmetric");
        break;
      }
      case Suite::reciprocity: {
        // [T_x : L_z<i>] = [T_{w0 z} : L_{w0 x}<-i>].
        const LaurentPoly rhs = jh_by_index(w0mul_[ix], w0mul_[iz]).bar();
        if (jh != rhs) fail_with(rhs, "reciprocity mismatch");
        break;
      }
      case Suite::parity:
        if (!jh.supported_in_parity(len_[ix] - len_[iz])) {
          row.ok = false;
          row.status = "FAIL: support not in parity " +
                       std::to_string((len_[ix] - len_[iz]) % 2 == 0 ? 0 : 1);
        }
        break;
      case Suite::agreement: {
        const LaurentPoly rhs = jhr_by_index(iz, ix);
        if (jh != rhs) fail_with(rhs, "single-sum and r-polynomial forms differ");
        break;
      }
      case Suite::positivity:
        if (!jh.all_coeffs_nonneg()) {
          row.ok = false;
          row.status = "FAIL: negative coefficient";
        }
        break;
    }
    return row;
  }

  CoxeterSystem sys_;
  int ell_ = 0;
  int N_ = 0;
  bool has_dual_ = false;
  std::vector<Element> elems_;
  std::map<std::string, int> index_by_word_;
  std::vector<int> len_;
  std::vector<uint8_t> leq_;
  std::vector<int> w0mul_;
  std::vector<std::vector<LaurentPoly>> h_, hdual_, hdual_bar_, r_;
};

// Resolves the table pair used by the engine: no table means the internal
// ell = 0 computation; a loaded table resolves its dual through the supplied
// candidates (needed for ell > 0 on B/C types).  A missing dual only
// disables the jh/ungraded/suite operations, not richardson_poincare.
inline MultiplicityEngine make_engine(const CoxeterSystem& sys,
                                      const std::optional<KLTable>& table,
                                      const std::optional<KLTable>& dual_candidate) {
  KLTable t = table ? *table : default_table(sys);
  std::vector<KLTable> avail;
  if (dual_candidate) avail.push_back(*dual_candidate);
  std::optional<KLTable> d;
  try {
    d = dual_table(t, avail);
  } catch (const missing_data_error&) {
    d = std::nullopt;
  }
  return MultiplicityEngine(sys, t, d);
}

// --- report rendering -------------------------------------------------------

inline std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    out += c;
  }
  out += '"';
  return out;
}

inline std::string render_suites_text(std::span<const SuiteResult> results) {
  std::string out;
  for (const auto& r : results) {
    out += "suite=" + std::string(suite_name(r.suite)) + " type=" + r.type.str() +
           " pairs=" + std::to_string(r.pairs) + " status=" + (r.pass ? "PASS" : "FAIL") + "\n";
    for (const auto& row : r.rows)
      if (!row.ok)
        out += "FAIL suite=" + std::string(suite_name(r.suite)) +
               " z=" + MultiplicityEngine::pretty(row.z) +
               " x=" + MultiplicityEngine::pretty(row.x) + " " + row.status +
               " value=" + row.polynomial + "\n";
  }
  return out;
}

inline std::string render_suites_csv(std::span<const SuiteResult> results) {
  std::string out = "z,x,polynomial,suite,status\n";
  for (const auto& r : results)
    for (const auto& row : r.rows)
      out += csv_quote(row.z) + "," + csv_quote(row.x) + "," + csv_quote(row.polynomial) + "," +
             suite_name(r.suite) + "," + csv_quote(row.status) + "\n";
  return out;
}

inline nlohmann::ordered_json suites_to_json(std::span<const SuiteResult> results) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    nlohmann::ordered_json jr;
    jr["suite"] = suite_name(r.suite);
    jr["type"] = r.type.str();
    jr["pairs"] = r.pairs;
    jr["status"] = r.pass ? "PASS" : "FAIL";
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : r.rows) {
      nlohmann::ordered_json jrow;
      jrow["z"] = row.z;
      jrow["x"] = row.x;
      jrow["polynomial"] = row.polynomial;
      jrow["status"] = row.status;
      rows.push_back(std::move(jrow));
    }
    jr["rows"] = std::move(rows);
    arr.push_back(std::move(jr));
  }
  return arr;
}

}  // namespace klr
