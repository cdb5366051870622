#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "klr/coxeter.hpp"
#include "klr/error.hpp"
#include "klr/hecke.hpp"
#include "klr/laurent.hpp"

namespace klr {

// Arithmetic in GF(q) for a small prime power q; elements are 0..q-1.  For
// q = p^k the encoding is base-p digits against a brute-forced irreducible
// monic polynomial, with full multiplication and inverse tables.
class GaloisField {
 public:
  explicit GaloisField(int q) : q_(q) {
    if (q < 2) throw validation_error("GF(q): q must be >= 2");
    int m = q;
    for (int d = 2; d * d <= m; ++d)
      if (m % d == 0) {
        p_ = d;
        break;
      }
    if (p_ == 0) p_ = m;
    k_ = 0;
    while (m > 1) {
      if (m % p_ != 0) throw validation_error(std::to_string(q) + " is not a prime power");
      m /= p_;
      ++k_;
    }
    if (k_ == 1) {
      mul_.resize(static_cast<size_t>(q) * q);
      for (int a = 0; a < q; ++a)
        for (int b = 0; b < q; ++b) mul_[static_cast<size_t>(a) * q + b] = (a * b) % q;
    } else {
      build_extension_tables();
    }
    inv_.assign(q, 0);
    for (int a = 1; a < q; ++a)
      for (int b = 1; b < q; ++b)
        if (mul(a, b) == 1) {
          inv_[a] = b;
          break;
        }
  }

  int q() const { return q_; }
  int characteristic() const { return p_; }

  int add(int a, int b) const {
    if (k_ == 1) return (a + b) % q_;
    int r = 0, pw = 1;
    for (int i = 0; i < k_; ++i) {
      r += ((a % p_ + b % p_) % p_) * pw;
      a /= p_;
      b /= p_;
      pw *= p_;
    }
    return r;
  }
  int neg(int a) const {
    if (k_ == 1) return (q_ - a) % q_;
    int r = 0, pw = 1;
    for (int i = 0; i < k_; ++i) {
      r += ((p_ - a % p_) % p_) * pw;
      a /= p_;
      pw *= p_;
    }
    return r;
  }
  int sub(int a, int b) const { return add(a, neg(b)); }
  int mul(int a, int b) const { return mul_[static_cast<size_t>(a) * q_ + b]; }
  int inv(int a) const {
    if (a == 0) throw validation_error("GF(q): inverse of zero");
    return inv_[a];
  }

 private:
  void build_extension_tables() {
    auto decode = [&](int v) {
      std::vector<int> digs(k_);
      for (int i = 0; i < k_; ++i) {
        digs[i] = v % p_;
        v /= p_;
      }
      return digs;
    };
    auto encode = [&](const std::vector<int>& digs) {
      int v = 0;
      for (int i = k_ - 1; i >= 0; --i) v = v * p_ + digs[i];
      return v;
    };
    // First irreducible monic x^k + sum low[i] x^i in lexicographic order;
    // irreducible iff no monic divisor of degree 1..k/2.
    auto divides = [&](const std::vector<int>& low, const std::vector<int>& div, int deg) {
      std::vector<int> rem(low);
      rem.resize(k_ + 1, 0);
      rem[k_] = 1;
      for (int d = k_; d >= deg; --d) {
        const int c = rem[d];
        if (c == 0) continue;
        for (int i = 0; i <= deg; ++i)
          rem[d - deg + i] = ((rem[d - deg + i] - c * div[i]) % p_ + p_ * p_) % p_;
      }
      for (int i = 0; i < deg; ++i)
        if (rem[i] != 0) return false;
      return true;
    };
    std::vector<int> irr;
    for (int cand = 0; cand < q_ && irr.empty(); ++cand) {
      std::vector<int> low = decode(cand);
      bool reducible = false;
      for (int deg = 1; deg <= k_ / 2 && !reducible; ++deg) {
        int dcount = 1;
        for (int i = 0; i < deg; ++i) dcount *= p_;
        for (int dc = 0; dc < dcount && !reducible; ++dc) {
          std::vector<int> div(deg + 1, 0);
          int t = dc;
          for (int i = 0; i < deg; ++i) {
            div[i] = t % p_;
            t /= p_;
          }
          div[deg] = 1;
          if (divides(low, div, deg)) reducible = true;
        }
      }
      if (!reducible) irr = low;
    }
    if (irr.empty()) throw error("GF(q): no irreducible polynomial found");
    auto poly_mod_mul = [&](const std::vector<int>& a, const std::vector<int>& b) {
      std::vector<int> prod(2 * static_cast<size_t>(k_) - 1, 0);
      for (int i = 0; i < k_; ++i)
        for (int j = 0; j < k_; ++j) prod[i + j] = (prod[i + j] + a[i] * b[j]) % p_;
      for (int d = static_cast<int>(prod.size()) - 1; d >= k_; --d) {
        const int c = prod[d];
        if (c == 0) continue;
        prod[d] = 0;
        for (int i = 0; i < k_; ++i)
          prod[d - k_ + i] = ((prod[d - k_ + i] - c * irr[i]) % p_ + p_ * p_) % p_;
      }
      prod.resize(k_);
      return prod;
    };
    mul_.resize(static_cast<size_t>(q_) * q_);
    for (int a = 0; a < q_; ++a)
      for (int b = 0; b < q_; ++b)
        mul_[static_cast<size_t>(a) * q_ + b] = encode(poly_mod_mul(decode(a), decode(b)));
  }

  int q_ = 0, p_ = 0, k_ = 0;
  std::vector<int> mul_;
  std::vector<int> inv_;
};

inline bool guards_off() {
  const char* e = std::getenv("KLR_GUARD_OFF");
  return e != nullptr && std::string_view(e) == "1";
}

inline void check_flag_guard(int n, int q, bool override_guard) {
  if (override_guard) return;
  if (n > 4 || !(q == 2 || q == 3 || q == 4 || q == 5))
    throw guard_error("flag enumeration guard: need n <= 4 and q in {2,3,4,5} (got n=" +
                      std::to_string(n) + ", q=" + std::to_string(q) +
                      "); set KLR_GUARD_OFF=1 to override");
}

namespace detail_flags {
struct Access;
}

// A complete flag in F_q^n: the first i rows span the i-th subspace.  Rows
// are kept in the canonical per-prefix reduced form (leading coefficient 1
// at the new pivot, zeros at all earlier pivots), which is unique per flag.
class FlagPoint {
 public:
  // Canonicalizes arbitrary adapted-basis rows (row-major n x n); throws
  // when the rows are linearly dependent.
  static FlagPoint from_rows(const GaloisField& gf, int n, const std::vector<int>& rows) {
    FlagPoint f(n, gf.q());
    std::vector<int> pivots;
    for (int i = 0; i < n; ++i) {
      std::vector<int> u(rows.begin() + static_cast<long>(i) * n,
                         rows.begin() + static_cast<long>(i + 1) * n);
      for (size_t j = 0; j < pivots.size(); ++j) {
        const int c = u[pivots[j]];
        if (c == 0) continue;
        for (int col = 0; col < n; ++col)
          u[col] = gf.sub(u[col], gf.mul(c, f.at(static_cast<int>(j), col)));
      }
      int piv = -1;
      for (int col = 0; col < n; ++col)
        if (u[col] != 0) {
          piv = col;
          break;
        }
      if (piv < 0) throw validation_error("FlagPoint: rows are linearly dependent");
      const int scale = gf.inv(u[piv]);
      for (int col = 0; col < n; ++col)
        f.mat_[static_cast<size_t>(i) * n + col] = static_cast<uint8_t>(gf.mul(scale, u[col]));
      pivots.push_back(piv);
    }
    return f;
  }

  // Spans of the leading coordinate vectors.
  static FlagPoint standard(const GaloisField& gf, int n) {
    FlagPoint f(n, gf.q());
    for (int i = 0; i < n; ++i) f.mat_[static_cast<size_t>(i) * n + i] = 1;
    return f;
  }

  // Spans of the trailing coordinate vectors.
  static FlagPoint opposite(const GaloisField& gf, int n) {
    FlagPoint f(n, gf.q());
    for (int i = 0; i < n; ++i) f.mat_[static_cast<size_t>(i) * n + (n - 1 - i)] = 1;
    return f;
  }

  int n() const { return n_; }
  int q() const { return q_; }
  int at(int row, int col) const { return mat_[static_cast<size_t>(row) * n_ + col]; }
  const std::vector<uint8_t>& rows() const { return mat_; }

  friend bool operator==(const FlagPoint& a, const FlagPoint& b) {
    return a.n_ == b.n_ && a.q_ == b.q_ && a.mat_ == b.mat_;
  }
  friend bool operator!=(const FlagPoint& a, const FlagPoint& b) { return !(a == b); }
  friend bool operator<(const FlagPoint& a, const FlagPoint& b) { return a.mat_ < b.mat_; }

 private:
  friend struct detail_flags::Access;
  FlagPoint(int n, int q) : n_(n), q_(q), mat_(static_cast<size_t>(n) * n, 0) {}

  int n_, q_;
  std::vector<uint8_t> mat_;
};

namespace detail_flags {

struct Access {
  static FlagPoint blank(int n, int q) { return FlagPoint(n, q); }
  static std::vector<uint8_t>& mat(FlagPoint& f) { return f.mat_; }
};

// Emits every canonical next row given the pivots already used: pivot p
// (ascending) outside `used`, entry 1 there, zeros left of p and at used
// pivots, free values at the remaining columns right of p.
template <typename Fn>
void emit_rows(int q, int n, const std::vector<bool>& used, Fn&& fn) {
  std::vector<int> row(n, 0);
  for (int p = 0; p < n; ++p) {
    if (used[p]) continue;
    std::vector<int> free_cols;
    for (int c = p + 1; c < n; ++c)
      if (!used[c]) free_cols.push_back(c);
    std::fill(row.begin(), row.end(), 0);
    row[p] = 1;
    long total = 1;
    for (size_t i = 0; i < free_cols.size(); ++i) total *= q;
    for (long code = 0; code < total; ++code) {
      long t = code;
      for (int c : free_cols) {
        row[c] = static_cast<int>(t % q);
        t /= q;
      }
      fn(p, row);
    }
  }
}

template <typename Fn>
void complete_flag(int q, int n, FlagPoint& f, std::vector<bool>& used, int depth, Fn&& fn) {
  if (depth == n) {
    fn(static_cast<const FlagPoint&>(f));
    return;
  }
  emit_rows(q, n, used, [&](int pivot, const std::vector<int>& row) {
    auto& mat = Access::mat(f);
    for (int c = 0; c < n; ++c) mat[static_cast<size_t>(depth) * n + c] = static_cast<uint8_t>(row[c]);
    used[pivot] = true;
    complete_flag(q, n, f, used, depth + 1, fn);
    used[pivot] = false;
  });
}

}  // namespace detail_flags

// Streams every complete flag exactly once, in a fixed deterministic order.
template <typename Fn>
void for_each_flag(const GaloisField& gf, int n, Fn&& fn) {
  FlagPoint f = detail_flags::Access::blank(n, gf.q());
  std::vector<bool> used(n, false);
  detail_flags::complete_flag(gf.q(), n, f, used, 0, fn);
}

// Sharded walk: the first-row choices are distributed over `jobs` workers
// and fn receives (worker_id, flag).  Visit order interleaves across
// workers, so use this only for order-independent tallies.
template <typename Fn>
void for_each_flag_sharded(const GaloisField& gf, int n, int jobs, Fn&& fn) {
  std::vector<std::pair<int, std::vector<int>>> first;
  detail_flags::emit_rows(gf.q(), n, std::vector<bool>(n, false),
                          [&](int pivot, const std::vector<int>& row) {
                            first.emplace_back(pivot, row);
                          });
  std::atomic<size_t> next{0};
  auto worker = [&](int wid) {
    while (true) {
      const size_t i = next.fetch_add(1);
      if (i >= first.size()) break;
      FlagPoint f = detail_flags::Access::blank(n, gf.q());
      std::vector<bool> used(n, false);
      auto& mat = detail_flags::Access::mat(f);
      for (int c = 0; c < n; ++c) mat[c] = static_cast<uint8_t>(first[i].second[c]);
      used[first[i].first] = true;
      detail_flags::complete_flag(gf.q(), n, f, used, 1,
                                  [&](const FlagPoint& g) { fn(wid, g); });
    }
  };
  const int nt = std::max(1, std::min<int>(jobs, static_cast<int>(first.size())));
  if (nt == 1) {
    worker(0);
    return;
  }
  std::vector<std::thread> ts;
  for (int i = 0; i < nt; ++i) ts.emplace_back(worker, i);
  for (auto& t : ts) t.join();
}

// Desk-scale entry point: collects the stream (guarded).
inline std::vector<FlagPoint> enumerate_flags(int n, int q, bool override_guard = false) {
  check_flag_guard(n, q, override_guard || guards_off());
  GaloisField gf(q);
  std::vector<FlagPoint> out;
  for_each_flag(gf, n, [&](const FlagPoint& f) { out.push_back(f); });
  return out;
}

namespace detail_flags {

inline int gf_rank(const GaloisField& gf, std::vector<int> m, int rows, int n) {
  int r = 0;
  for (int col = 0; col < n && r < rows; ++col) {
    int pr = -1;
    for (int row = r; row < rows; ++row)
      if (m[static_cast<size_t>(row) * n + col] != 0) {
        pr = row;
        break;
      }
    if (pr < 0) continue;
    for (int c = 0; c < n; ++c)
      std::swap(m[static_cast<size_t>(r) * n + c], m[static_cast<size_t>(pr) * n + c]);
    const int piv_inv = gf.inv(m[static_cast<size_t>(r) * n + col]);
    for (int row = r + 1; row < rows; ++row) {
      const int factor = gf.mul(m[static_cast<size_t>(row) * n + col], piv_inv);
      if (factor == 0) continue;
      for (int c = 0; c < n; ++c)
        m[static_cast<size_t>(row) * n + c] = gf.sub(
            m[static_cast<size_t>(row) * n + c], gf.mul(factor, m[static_cast<size_t>(r) * n + c]));
    }
    ++r;
  }
  return r;
}

}  // namespace detail_flags

// Permutation bridge for type A: the Weyl group of A_{n-1} acts as S_n with
// s_k the adjacent transposition (k, k+1); one-line notation is 1-based.
inline std::vector<int> element_to_permutation(const Element& e, int n) {
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i + 1;
  const std::vector<int> w = e.word();
  for (auto it = w.rbegin(); it != w.rend(); ++it) {
    const int k = *it;  // compose tau_k on the left: swap the values k, k+1
    for (int i = 0; i < n; ++i) {
      if (perm[i] == k)
        perm[i] = k + 1;
      else if (perm[i] == k + 1)
        perm[i] = k;
    }
  }
  return perm;
}

inline Element permutation_to_element(const CoxeterSystem& sys, std::vector<int> perm) {
  const int n = static_cast<int>(perm.size());
  std::vector<int> word;
  while (true) {
    int k = -1;
    for (int i = 0; i + 1 < n; ++i)
      if (perm[i] > perm[i + 1]) {
        k = i;
        break;
      }
    if (k < 0) break;
    std::swap(perm[k], perm[k + 1]);
    word.push_back(k + 1);
  }
  std::reverse(word.begin(), word.end());
  return sys.from_word(word);
}

// The permutation w with w(i) = j exactly when the dimension increment
// d_{ij} - d_{i-1,j} - d_{i,j-1} + d_{i-1,j-1} equals 1, for
// d_{ij} = dim(E_i cap F_j); returned as an element of A_{n-1}.
inline Element relative_position(const FlagPoint& E, const FlagPoint& F,
                                 const CoxeterSystem& sys) {
  if (E.n() != F.n() || E.q() != F.q())
    throw validation_error("relative_position: flags of different shape");
  const int n = E.n();
  if (sys.type().family != Family::A || sys.type().rank != n - 1)
    throw validation_error("relative_position: system must be A" + std::to_string(n - 1));
  GaloisField gf(E.q());
  // d[i][j] = dim(E_i cap F_j) = i + j - rank of the stacked bases.
  std::vector<std::vector<int>> d(n + 1, std::vector<int>(n + 1, 0));
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) {
      std::vector<int> stacked;
      stacked.reserve(static_cast<size_t>(i + j) * n);
      for (int r = 0; r < i; ++r)
        for (int c = 0; c < n; ++c) stacked.push_back(E.at(r, c));
      for (int r = 0; r < j; ++r)
        for (int c = 0; c < n; ++c) stacked.push_back(F.at(r, c));
      d[i][j] = i + j - detail_flags::gf_rank(gf, std::move(stacked), i + j, n);
    }
  std::vector<int> perm(n, 0);
  for (int i = 1; i <= n; ++i) {
    int hit = 0;
    for (int j = 1; j <= n; ++j)
      if (d[i][j] - d[i - 1][j] - d[i][j - 1] + d[i - 1][j - 1] == 1) {
        perm[i - 1] = j;
        ++hit;
      }
    if (hit != 1) throw error("relative_position: increment matrix is not a permutation");
  }
  return permutation_to_element(sys, std::move(perm));
}

struct RichardsonCount {
  Element y, y_prime;
  int q = 0;
  unsigned long long count = 0;
  Int r_value;  // R_{y,y'}(q)
  bool match = false;
};

// R_{y,y'}(q) through the Hecke-algebra route.
inline Int r_value_at(const Element& y, const Element& y_prime, int q) {
  const LaurentPoly r = r_poly(y, y_prime);
  if (r.is_zero()) return 0;
  return eval_int_poly(to_R(r, y_prime.length() - y.length()), q);
}

// |{flags F : F lies in the Schubert cell of y' and in the opposite cell of
// y}| by full enumeration, plus the verdict against R_{y,y'}(q).  A flag is
// in the Schubert cell of y' when its position to the standard flag is
// y'^{-1}, and in the opposite cell of y when its position to the opposite
// flag is y^{-1} w0.
inline RichardsonCount count_open_richardson(const Element& y, const Element& y_prime, int q,
                                             bool override_guard = false) {
  if (ElementAccess::sys(y)->cartan != ElementAccess::sys(y_prime)->cartan)
    throw mixed_system_error("count_open_richardson: arguments from different systems");
  const CartanType t = y.type();
  if (t.family != Family::A)
    throw validation_error("count_open_richardson: type A only (got " + t.str() + ")");
  const int n = t.rank + 1;
  check_flag_guard(n, q, override_guard || guards_off());
  CoxeterSystem sys(t);
  const Element w0 = sys.longest_element();
  const Element want_std = y_prime.inverse();
  const Element want_opp = y.inverse() * w0;
  GaloisField gf(q);
  const FlagPoint std_flag = FlagPoint::standard(gf, n);
  const FlagPoint opp_flag = FlagPoint::opposite(gf, n);
  unsigned long long count = 0;
  for_each_flag(gf, n, [&](const FlagPoint& f) {
    if (relative_position(std_flag, f, sys) == want_std &&
        relative_position(opp_flag, f, sys) == want_opp)
      ++count;
  });
  RichardsonCount rc{y, y_prime, q, count, r_value_at(y, y_prime, q), false};
  rc.match = (Int(rc.count) == rc.r_value);
  return rc;
}

struct OracleRow {
  std::string y, y_prime;
  int q = 0;
  unsigned long long count = 0;
  Int r_value;
  bool match = false;
};

// One enumeration pass tallying every (y, y') cell pair; rows cover the full
// grid in canonical order.  Sharded counters merge by summation, so the
// result is independent of `jobs`.
inline std::vector<OracleRow> oracle_table(int n, int q, bool compare, int jobs = 1,
                                           bool override_guard = false) {
  if (n < 2) throw validation_error("oracle: n must be >= 2");
  check_flag_guard(n, q, override_guard || guards_off());
  CoxeterSystem sys(CartanType::make(Family::A, n - 1));
  const std::vector<Element> elems = sys.enumerate();
  const int N = static_cast<int>(elems.size());
  std::map<std::string, int> idx;
  for (int i = 0; i < N; ++i) idx.emplace(elems[i].word_str(), i);
  const Element w0 = sys.longest_element();
  GaloisField gf(q);
  const FlagPoint std_flag = FlagPoint::standard(gf, n);
  const FlagPoint opp_flag = FlagPoint::opposite(gf, n);

  const int shards = std::max(1, jobs);
  std::vector<std::vector<unsigned long long>> tally(
      static_cast<size_t>(shards), std::vector<unsigned long long>(static_cast<size_t>(N) * N, 0));
  auto record = [&](int wid, const FlagPoint& f) {
    const Element a = relative_position(std_flag, f, sys);
    const Element b = relative_position(opp_flag, f, sys);
    const int iy = idx.at((w0 * b.inverse()).word_str());
    const int iyp = idx.at(a.inverse().word_str());
    ++tally[static_cast<size_t>(wid)][static_cast<size_t>(iy) * N + iyp];
  };
  if (shards == 1)
    for_each_flag(gf, n, [&](const FlagPoint& f) { record(0, f); });
  else
    for_each_flag_sharded(gf, n, shards, record);

  std::vector<unsigned long long> total(static_cast<size_t>(N) * N, 0);
  for (const auto& t : tally)
    for (size_t i = 0; i < total.size(); ++i) total[i] += t[i];

  std::vector<OracleRow> rows;
  rows.reserve(static_cast<size_t>(N) * N);
  for (int iy = 0; iy < N; ++iy)
    for (int iyp = 0; iyp < N; ++iyp) {
      OracleRow row;
      row.y = elems[iy].word_str();
      row.y_prime = elems[iyp].word_str();
      row.q = q;
      row.count = total[static_cast<size_t>(iy) * N + iyp];
      if (compare) {
        row.r_value = r_value_at(elems[iy], elems[iyp], q);
        row.match = (Int(row.count) == row.r_value);
      }
      rows.push_back(std::move(row));
    }
  return rows;
}

}  // namespace klr
