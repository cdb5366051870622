#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>
#include <vector>

#include "klr/error.hpp"

namespace klr {

// Crystallographic (Weyl) families only; general Coxeter types are rejected.
enum class Family : char { A = 'A', B = 'B', C = 'C', D = 'D', E = 'E', F = 'F', G = 'G' };

struct CartanType {
  Family family = Family::A;
  int rank = 1;

  // Throws validation_error outside the legal ranges:
  // A n>=1, B/C n>=2, D n>=4, E n in {6,7,8}, F n=4, G n=2.
  static CartanType make(Family f, int n) {
    auto bad = [&](const std::string& msg) {
      throw validation_error("illegal Cartan type " + std::string(1, static_cast<char>(f)) +
                             std::to_string(n) + ": " + msg);
    };
    switch (f) {
      case Family::A:
        if (n < 1) bad("rank must be >= 1");
        break;
      case Family::B:
      case Family::C:
        if (n < 2) bad("rank must be >= 2");
        break;
      case Family::D:
        if (n < 4) bad(n == 3 ? "rank must be >= 4 (use A3)" : "rank must be >= 4");
        break;
      case Family::E:
        if (n < 6 || n > 8) bad("rank must be 6, 7 or 8");
        break;
      case Family::F:
        if (n != 4) bad("rank must be 4");
        break;
      case Family::G:
        if (n != 2) bad("rank must be 2");
        break;
    }
    return CartanType{f, n};
  }

  // "A3", "B2", ...
  static CartanType parse(std::string_view s) {
    if (s.size() < 2) throw validation_error("Cartan type parse: '" + std::string(s) + "'");
    const char fc = s[0];
    if (fc < 'A' || fc > 'G')
      throw validation_error("Cartan type parse: unknown family '" + std::string(1, fc) + "'");
    int n = 0;
    for (size_t i = 1; i < s.size(); ++i) {
      if (s[i] < '0' || s[i] > '9')
        throw validation_error("Cartan type parse: bad rank in '" + std::string(s) + "'");
      n = n * 10 + (s[i] - '0');
    }
    return make(static_cast<Family>(fc), n);
  }

  std::string str() const {
    return std::string(1, static_cast<char>(family)) + std::to_string(rank);
  }

  // Langlands dual at the combinatorial level: B <-> C, everything else fixed.
  CartanType dual() const {
    Family f = family;
    if (family == Family::B) f = Family::C;
    if (family == Family::C) f = Family::B;
    return CartanType{f, rank};
  }

  bool self_dual() const { return family != Family::B && family != Family::C; }

  friend bool operator==(const CartanType& a, const CartanType& b) {
    return a.family == b.family && a.rank == b.rank;
  }
  friend bool operator!=(const CartanType& a, const CartanType& b) { return !(a == b); }
};

// Cartan matrix, row-major, with C[i][j] = <alpha_i, alpha_j^vee>.  The
// simple reflection s_j then acts on the root lattice by
// s_j(alpha_i) = alpha_i - C[i][j] alpha_j.
inline std::vector<std::vector<int>> cartan_matrix(const CartanType& t) {
  const int n = t.rank;
  std::vector<std::vector<int>> c(n, std::vector<int>(n, 0));
  for (int i = 0; i < n; ++i) c[i][i] = 2;
  auto link = [&](int i, int j, int cij, int cji) {
    c[i][j] = cij;
    c[j][i] = cji;
  };
  auto chain = [&](int from, int to) {
    for (int i = from; i < to; ++i) link(i, i + 1, -1, -1);
  };
  switch (t.family) {
    case Family::A:
      chain(0, n - 1);
      break;
    case Family::B:
      // alpha_n short: <alpha_{n-1}, alpha_n^vee> = -2.
      chain(0, n - 2);
      link(n - 2, n - 1, -2, -1);
      break;
    case Family::C:
      chain(0, n - 2);
      link(n - 2, n - 1, -1, -2);
      break;
    case Family::D:
      chain(0, n - 3);
      link(n - 3, n - 2, -1, -1);
      link(n - 3, n - 1, -1, -1);
      break;
    case Family::E:
      // Bourbaki numbering: chain 1-3-4-5-...-n, node 2 attached to node 4.
      link(0, 2, -1, -1);
      for (int i = 2; i < n - 1; ++i) link(i, i + 1, -1, -1);
      link(1, 3, -1, -1);
      break;
    case Family::F:
      link(0, 1, -1, -1);
      link(1, 2, -2, -1);  // alpha_3, alpha_4 short
      link(2, 3, -1, -1);
      break;
    case Family::G:
      link(0, 1, -1, -3);  // alpha_1 short
      break;
  }
  return c;
}

// Exact order of the Weyl group.
inline boost::multiprecision::cpp_int weyl_order(const CartanType& t) {
  using boost::multiprecision::cpp_int;
  const int n = t.rank;
  auto factorial = [](int m) {
    cpp_int f = 1;
    for (int i = 2; i <= m; ++i) f *= i;
    return f;
  };
  auto pow2 = [](int m) {
    cpp_int p = 1;
    for (int i = 0; i < m; ++i) p *= 2;
    return p;
  };
  switch (t.family) {
    case Family::A:
      return factorial(n + 1);
    case Family::B:
    case Family::C:
      return pow2(n) * factorial(n);
    case Family::D:
      return pow2(n - 1) * factorial(n);
    case Family::E:
      if (n == 6) return 51840;
      if (n == 7) return 2903040;
      return cpp_int(696729600);
    case Family::F:
      return 1152;
    case Family::G:
      return 12;
  }
  throw validation_error("weyl_order: unreachable");
}

}  // namespace klr
