#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "klr/cartan.hpp"
#include "klr/error.hpp"
#include "klr/laurent.hpp"

namespace klr {

class Element;
class CoxeterSystem;

namespace detail {

using Mat = std::vector<int32_t>;  // row-major rank x rank

inline Mat mat_identity(int n) {
  Mat m(static_cast<size_t>(n) * n, 0);
  for (int i = 0; i < n; ++i) m[static_cast<size_t>(i) * n + i] = 1;
  return m;
}

inline Mat mat_mul(int n, const Mat& a, const Mat& b) {
  Mat c(static_cast<size_t>(n) * n, 0);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const int32_t aik = a[static_cast<size_t>(i) * n + k];
      if (aik == 0) continue;
      for (int j = 0; j < n; ++j)
        c[static_cast<size_t>(i) * n + j] += aik * b[static_cast<size_t>(k) * n + j];
    }
  return c;
}

inline std::vector<int32_t> mat_apply(int n, const Mat& m, const std::vector<int32_t>& v) {
  std::vector<int32_t> r(n, 0);
  for (int i = 0; i < n; ++i) {
    int32_t acc = 0;
    for (int j = 0; j < n; ++j) acc += m[static_cast<size_t>(i) * n + j] * v[j];
    r[i] = acc;
  }
  return r;
}

// Roots have all coordinates of one sign in the simple basis.
inline bool root_negative(const std::vector<int32_t>& v) {
  for (int32_t x : v)
    if (x != 0) return x < 0;
  return false;
}

inline bool col_negative(int n, const Mat& m, int j) {
  for (int i = 0; i < n; ++i) {
    const int32_t x = m[static_cast<size_t>(i) * n + j];
    if (x != 0) return x < 0;
  }
  return false;
}

struct ElemRep {
  Mat m;                      // action on the root lattice, simple basis
  Mat mi;                     // inverse action
  std::vector<uint8_t> word;  // canonical (ShortLex-minimal) reduced word, 0-based
};

struct SystemData {
  CartanType cartan;
  int rank = 0;
  std::vector<std::vector<int>> cartan_mat;
  std::vector<Mat> refl;                        // generator matrices
  std::vector<std::vector<int32_t>> pos_roots;  // sorted

  // Lazy caches below; guarded by mu.  Callees with the `_locked` suffix
  // assume the mutex is held.
  mutable std::mutex mu;

  mutable bool enumerated = false;
  mutable std::vector<ElemRep> reps;  // canonical (length, ShortLex) order
  mutable std::map<Mat, int> index_by_matrix;
  mutable std::vector<std::vector<int>> left_mul, right_mul;  // [idx][gen]
  mutable std::vector<int> lengths;
  mutable std::vector<int8_t> bruhat_memo;  // N*N tri-state: -1 unknown

  // Hecke-algebra caches (coefficients in the delta basis, keyed by the
  // interned index of the canonical word).
  mutable std::vector<std::map<int, LaurentPoly>> bar_delta_cache;
  mutable std::vector<char> bar_delta_done;
  mutable std::vector<std::map<int, LaurentPoly>> kl_cache;
  mutable int kl_done_upto = 0;  // kl_cache valid for indices < kl_done_upto

  // Extracts the ShortLex-minimal reduced word by greedily taking the
  // smallest left descent.
  std::vector<uint8_t> canonical_word(Mat m, Mat mi) const {
    std::vector<uint8_t> w;
    const int n = rank;
    while (true) {
      int s = -1;
      for (int j = 0; j < n; ++j)
        if (col_negative(n, mi, j)) {
          s = j;
          break;
        }
      if (s < 0) break;
      m = mat_mul(n, refl[s], m);
      mi = mat_mul(n, mi, refl[s]);
      w.push_back(static_cast<uint8_t>(s));
    }
    return w;
  }

  void ensure_enumerated_locked() const {
    if (enumerated) return;
    const int n = rank;
    std::vector<ElemRep> level;
    level.push_back(ElemRep{mat_identity(n), mat_identity(n), {}});
    std::map<Mat, int> seen;
    seen.emplace(level[0].m, 0);
    std::vector<ElemRep> all;
    while (!level.empty()) {
      std::sort(level.begin(), level.end(),
                [](const ElemRep& a, const ElemRep& b) { return a.word < b.word; });
      const int base = static_cast<int>(all.size());
      for (size_t i = 0; i < level.size(); ++i)
        seen[level[i].m] = base + static_cast<int>(i);
      for (auto& r : level) all.push_back(std::move(r));
      std::vector<ElemRep> next;
      for (int i = base; i < static_cast<int>(all.size()); ++i) {
        for (int s = 0; s < n; ++s) {
          if (col_negative(n, all[i].m, s)) continue;  // xs < x
          Mat m2 = mat_mul(n, all[i].m, refl[s]);
          if (seen.count(m2)) continue;
          Mat mi2 = mat_mul(n, refl[s], all[i].mi);
          std::vector<uint8_t> w2 = canonical_word(m2, mi2);
          seen.emplace(m2, -1);  // placeholder; fixed when the level lands
          next.push_back(ElemRep{std::move(m2), std::move(mi2), std::move(w2)});
        }
      }
      level = std::move(next);
    }
    const int N = static_cast<int>(all.size());
    reps = std::move(all);
    index_by_matrix.clear();
    for (int i = 0; i < N; ++i) index_by_matrix[reps[i].m] = i;
    lengths.resize(N);
    for (int i = 0; i < N; ++i) lengths[i] = static_cast<int>(reps[i].word.size());
    left_mul.assign(N, std::vector<int>(n));
    right_mul.assign(N, std::vector<int>(n));
    for (int i = 0; i < N; ++i)
      for (int s = 0; s < n; ++s) {
        left_mul[i][s] = index_by_matrix.at(mat_mul(n, refl[s], reps[i].m));
        right_mul[i][s] = index_by_matrix.at(mat_mul(n, reps[i].m, refl[s]));
      }
    bruhat_memo.assign(static_cast<size_t>(N) * N, -1);
    bar_delta_cache.assign(N, {});
    bar_delta_done.assign(N, 0);
    kl_cache.assign(N, {});
    kl_done_upto = 0;
    enumerated = true;
  }

  int index_of_locked(const Mat& m) const {
    ensure_enumerated_locked();
    auto it = index_by_matrix.find(m);
    if (it == index_by_matrix.end())
      throw error("internal: element not found in enumeration");
    return it->second;
  }

  bool left_descent_locked(int idx, int s) const {
    return col_negative(rank, reps[idx].mi, s);
  }

  // Bruhat order by the lifting-property recursion.
  bool bruhat_leq_locked(int y, int x) const {
    if (y == 0) return true;  // identity is the minimum
    if (lengths[y] > lengths[x]) return false;
    if (y == x) return true;
    const size_t N = reps.size();
    int8_t& memo = bruhat_memo[static_cast<size_t>(y) * N + x];
    if (memo >= 0) return memo != 0;
    int s = -1;
    for (int j = 0; j < rank; ++j)
      if (left_descent_locked(x, j)) {
        s = j;
        break;
      }
    const int sx = left_mul[x][s];
    bool r;
    if (left_descent_locked(y, s))
      r = bruhat_leq_locked(left_mul[y][s], sx);
    else
      r = bruhat_leq_locked(y, sx);
    memo = r ? 1 : 0;
    return r;
  }
};

}  // namespace detail

// An element of a finite Weyl group: an integer matrix acting on the root
// lattice together with its cached canonical reduced word.  Immutable.
class Element {
 public:
  int length() const { return static_cast<int>(word_.size()); }

  CartanType type() const { return sys_->cartan; }

  // 1-based generator indices of the canonical ShortLex-minimal reduced word.
  std::vector<int> word() const {
    std::vector<int> w;
    w.reserve(word_.size());
    for (uint8_t s : word_) w.push_back(s + 1);
    return w;
  }

  // Serialization: comma-separated 1-based indices, "" for the identity.
  std::string word_str() const {
    std::string out;
    for (size_t i = 0; i < word_.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(word_[i] + 1);
    }
    return out;
  }

  bool is_identity() const { return word_.empty(); }

  std::vector<int> left_descents() const { return descents_of(mi_); }
  std::vector<int> right_descents() const { return descents_of(m_); }

  Element inverse() const { return Element(sys_, mi_, m_); }

  friend Element operator*(const Element& a, const Element& b) {
    if (a.sys_->cartan != b.sys_->cartan)
      throw mixed_system_error("product of elements from different Coxeter systems (" +
                               a.sys_->cartan.str() + " vs " + b.sys_->cartan.str() + ")");
    const int n = a.sys_->rank;
    return Element(a.sys_, detail::mat_mul(n, a.m_, b.m_), detail::mat_mul(n, b.mi_, a.mi_));
  }

  friend bool operator==(const Element& a, const Element& b) {
    return a.sys_->cartan == b.sys_->cartan && a.m_ == b.m_;
  }
  friend bool operator!=(const Element& a, const Element& b) { return !(a == b); }

  // ShortLex: by length, then lexicographically by canonical word.
  friend bool operator<(const Element& a, const Element& b) {
    if (a.word_.size() != b.word_.size()) return a.word_.size() < b.word_.size();
    if (a.word_ != b.word_) return a.word_ < b.word_;
    return a.sys_->cartan.str() < b.sys_->cartan.str();
  }

 private:
  friend class CoxeterSystem;
  friend int length_by_root_action(const Element&);
  friend class HeckeElement;
  friend struct ElementAccess;

  using SysPtr = std::shared_ptr<const detail::SystemData>;

  Element(SysPtr sys, detail::Mat m, detail::Mat mi)
      : sys_(std::move(sys)), m_(std::move(m)), mi_(std::move(mi)) {
    word_ = sys_->canonical_word(m_, mi_);
  }
  Element(SysPtr sys, detail::Mat m, detail::Mat mi, std::vector<uint8_t> word)
      : sys_(std::move(sys)), m_(std::move(m)), mi_(std::move(mi)), word_(std::move(word)) {}

  std::vector<int> descents_of(const detail::Mat& action) const {
    std::vector<int> out;
    for (int s = 0; s < sys_->rank; ++s)
      if (detail::col_negative(sys_->rank, action, s)) out.push_back(s + 1);
    return out;
  }

  SysPtr sys_;
  detail::Mat m_, mi_;
  std::vector<uint8_t> word_;
};

// Grants the other modules access to the interned representation.
struct ElementAccess {
  static const std::shared_ptr<const detail::SystemData>& sys(const Element& e) {
    return e.sys_;
  }
  static const detail::Mat& matrix(const Element& e) { return e.m_; }
  static const std::vector<uint8_t>& raw_word(const Element& e) { return e.word_; }
  static Element make(std::shared_ptr<const detail::SystemData> sys, detail::Mat m,
                      detail::Mat mi, std::vector<uint8_t> word) {
    return Element(std::move(sys), std::move(m), std::move(mi), std::move(word));
  }
};

// Number of positive roots sent negative; the definition of length.
inline int length_by_root_action(const Element& e) {
  const auto& sd = *e.sys_;
  int count = 0;
  for (const auto& beta : sd.pos_roots)
    if (detail::root_negative(detail::mat_apply(sd.rank, e.m_, beta))) ++count;
  return count;
}

// A finite Weyl group with a fixed Cartan datum.  Cheap to copy (shared,
// immutable core; internal caches are mutex-guarded).
class CoxeterSystem {
 public:
  explicit CoxeterSystem(CartanType t) : data_(build(t)) {}

  static CoxeterSystem from_type(CartanType t) { return CoxeterSystem(t); }

  CartanType type() const { return data_->cartan; }
  int rank() const { return data_->rank; }
  const std::vector<std::vector<int>>& cartan_matrix() const { return data_->cartan_mat; }
  const std::vector<std::vector<int32_t>>& positive_roots() const { return data_->pos_roots; }

  boost::multiprecision::cpp_int order() const { return weyl_order(data_->cartan); }

  Element identity() const {
    const int n = data_->rank;
    return Element(data_, detail::mat_identity(n), detail::mat_identity(n), {});
  }

  // 1-based.
  Element generator(int i) const {
    if (i < 1 || i > data_->rank)
      throw validation_error("generator index " + std::to_string(i) + " out of range 1.." +
                             std::to_string(data_->rank));
    return Element(data_, data_->refl[i - 1], data_->refl[i - 1],
                   {static_cast<uint8_t>(i - 1)});
  }

  // Word need not be reduced; the result carries the canonical word.
  Element from_word(std::span<const int> letters) const {
    const int n = data_->rank;
    detail::Mat m = detail::mat_identity(n), mi = detail::mat_identity(n);
    for (int i : letters) {
      if (i < 1 || i > n)
        throw validation_error("generator index " + std::to_string(i) + " out of range 1.." +
                               std::to_string(n));
      m = detail::mat_mul(n, m, data_->refl[i - 1]);
      mi = detail::mat_mul(n, data_->refl[i - 1], mi);
    }
    return Element(data_, std::move(m), std::move(mi));
  }

  // "2,1,3,2"; "" or "e" denote the identity.
  Element parse_word(std::string_view text) const {
    std::vector<int> letters;
    size_t i = 0;
    auto skip_ws = [&] {
      while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
    };
    skip_ws();
    if (i < text.size() && text[i] == 'e') {
      ++i;
      skip_ws();
      if (i != text.size()) throw validation_error("word parse: trailing input after 'e'");
      return identity();
    }
    while (i < text.size()) {
      skip_ws();
      size_t j = i;
      while (j < text.size() && text[j] >= '0' && text[j] <= '9') ++j;
      if (j == i)
        throw validation_error("word parse: expected generator index in '" +
                               std::string(text) + "'");
      letters.push_back(std::atoi(std::string(text.substr(i, j - i)).c_str()));
      i = j;
      skip_ws();
      if (i < text.size()) {
        if (text[i] != ',')
          throw validation_error("word parse: expected ',' in '" + std::string(text) + "'");
        ++i;
      }
    }
    return from_word(letters);
  }

  // The unique element with full descent set, found by greedy ascent.
  Element longest_element() const {
    const int n = data_->rank;
    detail::Mat m = detail::mat_identity(n), mi = detail::mat_identity(n);
    while (true) {
      int s = -1;
      for (int j = 0; j < n; ++j)
        if (!detail::col_negative(n, m, j)) {
          s = j;
          break;
        }
      if (s < 0) break;
      m = detail::mat_mul(n, m, data_->refl[s]);
      mi = detail::mat_mul(n, data_->refl[s], mi);
    }
    return Element(data_, std::move(m), std::move(mi));
  }

  // All group elements, breadth-first by length, ShortLex within a length.
  std::vector<Element> enumerate() const {
    std::lock_guard<std::mutex> lk(data_->mu);
    data_->ensure_enumerated_locked();
    std::vector<Element> out;
    out.reserve(data_->reps.size());
    for (const auto& r : data_->reps) out.push_back(Element(data_, r.m, r.mi, r.word));
    return out;
  }

  bool bruhat_leq(const Element& y, const Element& x) const {
    check_same(y);
    check_same(x);
    std::lock_guard<std::mutex> lk(data_->mu);
    const int iy = data_->index_of_locked(ElementAccess::matrix(y));
    const int ix = data_->index_of_locked(ElementAccess::matrix(x));
    return data_->bruhat_leq_locked(iy, ix);
  }

  // All y with z <= y <= x, sorted by (length, ShortLex); empty when z and x
  // are incomparable.
  std::vector<Element> interval(const Element& z, const Element& x) const {
    check_same(z);
    check_same(x);
    std::vector<int> idx;
    {
      std::lock_guard<std::mutex> lk(data_->mu);
      const int iz = data_->index_of_locked(ElementAccess::matrix(z));
      const int ix = data_->index_of_locked(ElementAccess::matrix(x));
      if (!data_->bruhat_leq_locked(iz, ix)) return {};
      for (int y = 0; y < static_cast<int>(data_->reps.size()); ++y)
        if (data_->bruhat_leq_locked(iz, y) && data_->bruhat_leq_locked(y, ix))
          idx.push_back(y);
    }
    std::vector<Element> out;
    out.reserve(idx.size());
    for (int y : idx)
      out.push_back(Element(data_, data_->reps[y].m, data_->reps[y].mi, data_->reps[y].word));
    return out;
  }

  std::shared_ptr<const detail::SystemData> data() const { return data_; }

 private:
  void check_same(const Element& e) const {
    if (ElementAccess::sys(e)->cartan != data_->cartan)
      throw mixed_system_error("element of type " + ElementAccess::sys(e)->cartan.str() +
                               " used with system " + data_->cartan.str());
  }

  static std::shared_ptr<detail::SystemData> build(CartanType t) {
    auto sd = std::make_shared<detail::SystemData>();
    sd->cartan = t;
    sd->rank = t.rank;
    sd->cartan_mat = klr::cartan_matrix(t);
    const int n = t.rank;
    // s_j(alpha_i) = alpha_i - C[i][j] alpha_j: identity with row j replaced.
    for (int j = 0; j < n; ++j) {
      detail::Mat m = detail::mat_identity(n);
      for (int i = 0; i < n; ++i)
        m[static_cast<size_t>(j) * n + i] = (i == j ? -1 : -sd->cartan_mat[i][j]);
      sd->refl.push_back(std::move(m));
    }
    // Root system as the closure of the simple roots under the reflections.
    std::set<std::vector<int32_t>> roots;
    std::vector<std::vector<int32_t>> frontier;
    for (int i = 0; i < n; ++i) {
      std::vector<int32_t> e(n, 0);
      e[i] = 1;
      roots.insert(e);
      frontier.push_back(std::move(e));
    }
    while (!frontier.empty()) {
      std::vector<std::vector<int32_t>> next;
      for (const auto& r : frontier)
        for (int s = 0; s < n; ++s) {
          auto r2 = detail::mat_apply(n, sd->refl[s], r);
          if (roots.insert(r2).second) next.push_back(std::move(r2));
        }
      if (roots.size() > 2000) throw error("root closure exceeded sanity bound");
      frontier = std::move(next);
    }
    for (const auto& r : roots)
      if (!detail::root_negative(r)) sd->pos_roots.push_back(r);
    return sd;
  }

  std::shared_ptr<const detail::SystemData> data_;
};

}  // namespace klr
