#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "schemeq/common.hpp"

namespace schemeq {

using Permutation = std::vector<Index>;

/// Finite group given by its Cayley table. Elements are 0..order-1 and
/// mul[a][b] is the index of a*b.
struct GroupTable {
  Index order = 0;
  std::vector<std::vector<Index>> mul;
  std::vector<Index> inverse;
  Index identity = 0;

  Index operator()(Index a, Index b) const { return mul[a][b]; }
};

/// Checks closure, identity, inverses and associativity, and fills in
/// `identity` and `inverse`. Throws Error("invalid-group-table") naming the
/// first law that fails.
inline GroupTable make_group_table(std::vector<std::vector<Index>> mul) {
  const Index n = static_cast<Index>(mul.size());
  auto fail = [](const std::string& law, std::vector<double> w) -> void {
    throw Error("invalid-group-table", "group table violates " + law, std::move(w));
  };
  if (n == 0) fail("non-emptiness", {});
  for (Index a = 0; a < n; ++a) {
    if (static_cast<Index>(mul[a].size()) != n) fail("squareness", {double(a)});
    for (Index b = 0; b < n; ++b)
      if (mul[a][b] < 0 || mul[a][b] >= n) fail("closure", {double(a), double(b)});
  }

  Index e = -1;
  for (Index c = 0; c < n && e < 0; ++c) {
    bool ok = true;
    for (Index x = 0; x < n && ok; ++x) ok = mul[c][x] == x && mul[x][c] == x;
    if (ok) e = c;
  }
  if (e < 0) fail("identity", {});

  std::vector<Index> inv(n, -1);
  for (Index a = 0; a < n; ++a) {
    for (Index b = 0; b < n; ++b)
      if (mul[a][b] == e && mul[b][a] == e) {
        inv[a] = b;
        break;
      }
    if (inv[a] < 0) fail("inverse", {double(a)});
  }

  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b)
      for (Index c = 0; c < n; ++c)
        if (mul[mul[a][b]][c] != mul[a][mul[b][c]]) fail("associativity", {double(a), double(b), double(c)});

  GroupTable g;
  g.order = n;
  g.mul = std::move(mul);
  g.inverse = std::move(inv);
  g.identity = e;
  return g;
}

/// Z_n with element k standing for k mod n.
inline GroupTable cyclic_group(Index n) {
  if (n <= 0) throw Error("parameter", "cyclic group order must be positive");
  std::vector<std::vector<Index>> mul(n, std::vector<Index>(n));
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b) mul[a][b] = (a + b) % n;
  return make_group_table(std::move(mul));
}

/// Elements of S_n in lexicographic order of their one-line notation; this is
/// the element order used by symmetric_group(n).
inline std::vector<Permutation> symmetric_group_elements(Index n) {
  if (n <= 0 || n > 5) throw Error("parameter", "built-in symmetric groups cover 1 <= n <= 5");
  std::vector<Permutation> out;
  Permutation p(n);
  std::iota(p.begin(), p.end(), Index{0});
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

/// S_n, product (s*t)(x) = s(t(x)).
inline GroupTable symmetric_group(Index n) {
  const auto elems = symmetric_group_elements(n);
  const Index order = static_cast<Index>(elems.size());
  std::vector<std::vector<Index>> mul(order, std::vector<Index>(order));
  for (Index a = 0; a < order; ++a)
    for (Index b = 0; b < order; ++b) {
      Permutation c(n);
      for (Index x = 0; x < n; ++x) c[x] = elems[a][elems[b][x]];
      mul[a][b] = std::lower_bound(elems.begin(), elems.end(), c) - elems.begin();
    }
  return make_group_table(std::move(mul));
}

/// Q_8 with elements ordered 1, -1, i, -i, j, -j, k, -k.
inline GroupTable quaternion_group() {
  // unit u in {1,i,j,k} -> 0..3; element index = 2*u + (negative ? 1 : 0)
  static constexpr int unit_mul[4][4] = {{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
  static constexpr int unit_sign[4][4] = {{1, 1, 1, 1}, {1, -1, 1, -1}, {1, -1, -1, 1}, {1, 1, -1, -1}};
  std::vector<std::vector<Index>> mul(8, std::vector<Index>(8));
  for (Index a = 0; a < 8; ++a)
    for (Index b = 0; b < 8; ++b) {
      const int ua = int(a / 2), ub = int(b / 2);
      int sign = unit_sign[ua][ub] * ((a % 2) ? -1 : 1) * ((b % 2) ? -1 : 1);
      mul[a][b] = 2 * unit_mul[ua][ub] + (sign < 0 ? 1 : 0);
    }
  return make_group_table(std::move(mul));
}

/// Inner automorphisms x -> g x g^-1, one permutation per g.
inline std::vector<Permutation> inner_automorphisms(const GroupTable& g) {
  std::vector<Permutation> out;
  out.reserve(g.order);
  for (Index a = 0; a < g.order; ++a) {
    Permutation p(g.order);
    for (Index x = 0; x < g.order; ++x) p[x] = g(g(a, x), g.inverse[a]);
    out.push_back(std::move(p));
  }
  return out;
}

inline bool is_abelian(const GroupTable& g) {
  for (Index a = 0; a < g.order; ++a)
    for (Index b = a + 1; b < g.order; ++b)
      if (g(a, b) != g(b, a)) return false;
  return true;
}

}  // namespace schemeq
