#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "schemeq/common.hpp"
#include "schemeq/group_table.hpp"
#include "schemeq/subspaces.hpp"

namespace schemeq {

/// A family of d+1 exact 0/1 class matrices on n vertices. Class 0 is the
/// identity relation and A_j^T = A_{transpose_map[j]}.
struct AssociationScheme {
  Index n = 0;
  std::vector<IntMatrix> classes;
  std::vector<Index> transpose_map;
  std::vector<std::string> labels;
  bool commutative = false;

  Index d() const { return static_cast<Index>(classes.size()) - 1; }
  Index rank() const { return static_cast<Index>(classes.size()); }

  friend bool operator==(const AssociationScheme& a, const AssociationScheme& b) {
    return a.n == b.n && a.classes == b.classes && a.transpose_map == b.transpose_map && a.labels == b.labels &&
           a.commutative == b.commutative;
  }
};

/// Structure constants of the matrix product, A_i A_j = sum_k p(k,i,j) A_k.
struct IntersectionTensor {
  Index rank = 0;  // d + 1
  std::vector<std::int64_t> p;
  std::vector<std::int64_t> valency;

  std::int64_t operator()(Index k, Index i, Index j) const { return p[(k * rank + i) * rank + j]; }
  std::int64_t& operator()(Index k, Index i, Index j) { return p[(k * rank + i) * rank + j]; }
};

namespace detail {

inline bool products_commute(const std::vector<IntMatrix>& cls) {
  for (size_t i = 0; i < cls.size(); ++i)
    for (size_t j = i + 1; j < cls.size(); ++j)
      if ((cls[i] * cls[j]) != (cls[j] * cls[i])) return false;
  return true;
}

/// Builds classes from an n x n matrix of relation indices in [0, rank).
inline AssociationScheme scheme_from_relation(const IntMatrix& rel, Index rank, std::vector<std::string> labels) {
  const Index n = rel.rows();
  AssociationScheme s;
  s.n = n;
  s.classes.assign(rank, IntMatrix::Zero(n, n));
  for (Index x = 0; x < n; ++x)
    for (Index y = 0; y < n; ++y) s.classes[rel(x, y)](x, y) = 1;
  // any (x,y) in class k determines the transpose class through (y,x)
  s.transpose_map.assign(rank, -1);
  for (Index x = 0; x < n; ++x)
    for (Index y = 0; y < n; ++y)
      if (s.transpose_map[rel(x, y)] < 0) s.transpose_map[rel(x, y)] = rel(y, x);
  s.labels = std::move(labels);
  s.commutative = products_commute(s.classes);
  return s;
}

inline void check_permutation(const Permutation& p, Index size, Index which) {
  if (static_cast<Index>(p.size()) != size)
    throw Error("parameter", "permutation " + std::to_string(which) + " has wrong length", {double(which)});
  std::vector<char> seen(size, 0);
  for (Index v : p) {
    if (v < 0 || v >= size || seen[v])
      throw Error("parameter", "entry list " + std::to_string(which) + " is not a permutation", {double(which)});
    seen[v] = 1;
  }
}

}  // namespace detail

/// Left-regular scheme of a group: (A_x)_{y,z} = 1 iff y = x z. Class order is
/// the identity first, then the remaining elements by index.
inline AssociationScheme build_group_scheme(const GroupTable& g) {
  require_vertex_cap(g.order, "group scheme");
  std::vector<Index> class_of(g.order);
  std::vector<std::string> labels;
  class_of[g.identity] = 0;
  labels.push_back("g" + std::to_string(g.identity));
  Index next = 1;
  for (Index x = 0; x < g.order; ++x)
    if (x != g.identity) {
      class_of[x] = next++;
      labels.push_back("g" + std::to_string(x));
    }
  IntMatrix rel(g.order, g.order);
  for (Index y = 0; y < g.order; ++y)
    for (Index z = 0; z < g.order; ++z) rel(y, z) = class_of[g(y, g.inverse[z])];
  return detail::scheme_from_relation(rel, g.order, std::move(labels));
}

/// Orbits of the group generated by `perms` on X x X. The orbit containing the
/// smallest pair (row-major) comes first, so the diagonal is class 0.
inline AssociationScheme build_orbit_scheme(const std::vector<Permutation>& perms, Index x_size) {
  if (x_size <= 0) throw Error("parameter", "orbit scheme needs a non-empty point set");
  require_vertex_cap(x_size, "orbit scheme");
  for (size_t i = 0; i < perms.size(); ++i) detail::check_permutation(perms[i], x_size, static_cast<Index>(i));

  std::vector<char> reached(x_size, 0);
  std::vector<Index> stack{0};
  reached[0] = 1;
  while (!stack.empty()) {
    Index x = stack.back();
    stack.pop_back();
    for (const auto& p : perms)
      if (!reached[p[x]]) {
        reached[p[x]] = 1;
        stack.push_back(p[x]);
      }
  }
  for (Index x = 0; x < x_size; ++x)
    if (!reached[x])
      throw Error("non-transitive", "group action is not transitive: point " + std::to_string(x) +
                                        " is not in the orbit of 0",
                  {double(x)});

  IntMatrix rel = IntMatrix::Constant(x_size, x_size, -1);
  Index next = 0;
  std::vector<std::string> labels;
  for (Index x = 0; x < x_size; ++x)
    for (Index y = 0; y < x_size; ++y) {
      if (rel(x, y) >= 0) continue;
      const Index k = next++;
      labels.push_back("R" + std::to_string(k));
      std::vector<std::pair<Index, Index>> todo{{x, y}};
      rel(x, y) = k;
      while (!todo.empty()) {
        auto [a, b] = todo.back();
        todo.pop_back();
        for (const auto& p : perms)
          if (rel(p[a], p[b]) < 0) {
            rel(p[a], p[b]) = k;
            todo.emplace_back(p[a], p[b]);
          }
      }
    }
  return detail::scheme_from_relation(rel, next, std::move(labels));
}

/// Fuses the group scheme along the orbits of a group of automorphisms:
/// B_j = sum of A_x over the orbit C_j. Orbit {e} first, then orbits ordered by
/// their smallest element.
inline AssociationScheme build_subscheme(const GroupTable& g, const std::vector<Permutation>& autos) {
  require_vertex_cap(g.order, "subscheme");
  for (size_t s = 0; s < autos.size(); ++s) {
    detail::check_permutation(autos[s], g.order, static_cast<Index>(s));
    const auto& f = autos[s];
    for (Index a = 0; a < g.order; ++a)
      for (Index b = 0; b < g.order; ++b)
        if (f[g(a, b)] != g(f[a], f[b]))
          throw Error("not-automorphism",
                      "permutation " + std::to_string(s) + " breaks the product " + std::to_string(a) + "*" +
                          std::to_string(b),
                      {double(s), double(a), double(b)});
  }

  std::vector<Index> orbit(g.order, -1);
  std::vector<std::string> labels;
  Index next = 0;
  auto flood = [&](Index start) {
    const Index k = next++;
    std::vector<Index> todo{start};
    orbit[start] = k;
    std::string label = "C{";
    std::vector<Index> members;
    while (!todo.empty()) {
      Index x = todo.back();
      todo.pop_back();
      members.push_back(x);
      for (const auto& f : autos)
        if (orbit[f[x]] < 0) {
          orbit[f[x]] = k;
          todo.push_back(f[x]);
        }
    }
    std::sort(members.begin(), members.end());
    for (size_t i = 0; i < members.size(); ++i) label += (i ? "," : "") + std::to_string(members[i]);
    labels.push_back(label + "}");
  };
  flood(g.identity);
  for (Index x = 0; x < g.order; ++x)
    if (orbit[x] < 0) flood(x);

  IntMatrix rel(g.order, g.order);
  for (Index y = 0; y < g.order; ++y)
    for (Index z = 0; z < g.order; ++z) rel(y, z) = orbit[g(y, g.inverse[z])];
  return detail::scheme_from_relation(rel, next, std::move(labels));
}

/// Conjugacy-class scheme; always commutative.
inline AssociationScheme build_conjugacy_scheme(const GroupTable& g) {
  return build_subscheme(g, inner_automorphisms(g));
}

/// Johnson scheme J(v,k): k-subsets of {0..v-1} in lexicographic order,
/// class i iff |a ∩ b| = k - i.
inline AssociationScheme build_johnson(int v, int k) {
  if (k <= 0 || 2 * k > v)
    throw Error("parameter", "Johnson scheme requires 0 < k <= v/2", {double(v), double(k)});
  if (v > 62) throw Error("parameter", "Johnson scheme supports v <= 62", {double(v)});
  double count = 1;
  for (int i = 0; i < k; ++i) count = count * (v - i) / (i + 1);
  if (count > double(vertex_cap())) require_vertex_cap(static_cast<Index>(std::llround(std::min(count, 9e18))), "Johnson scheme");
  std::vector<std::uint64_t> sets;
  // lexicographic k-subsets via index vectors
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    std::uint64_t m = 0;
    for (int i : idx) m |= std::uint64_t{1} << i;
    sets.push_back(m);
    int i = k - 1;
    while (i >= 0 && idx[i] == v - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  const Index n = static_cast<Index>(sets.size());
  IntMatrix rel(n, n);
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b) rel(a, b) = k - std::popcount(sets[a] & sets[b]);
  std::vector<std::string> labels;
  for (int i = 0; i <= k; ++i) labels.push_back("meet" + std::to_string(k - i));
  return detail::scheme_from_relation(rel, k + 1, std::move(labels));
}

/// Grassmann scheme J_q(v,d): d-subspaces of GF(q)^v, class i iff
/// dim(a ∩ b) = d - i (so class 0 is the identity).
inline AssociationScheme build_grassmann(std::int64_t q, int v, int d) {
  if (!gf::is_prime(q) || q > 251)
    throw Error("unsupported-field", "GF(q) is only supported for prime q <= 251", {double(q)});
  if (d <= 0 || 2 * d > v) throw Error("parameter", "Grassmann scheme requires 0 < d <= v/2", {double(v), double(d)});
  const std::int64_t count = gf::gaussian_binomial(v, d, q, vertex_cap());
  if (count > vertex_cap())
    throw ResourceError("cap-exceeded", "Grassmann scheme has more than " + std::to_string(vertex_cap()) + " vertices",
                        {double(count)});
  const auto subs = gf::enumerate_subspaces(v, d, q);
  const Index n = static_cast<Index>(subs.size());
  IntMatrix rel(n, n);
  for (Index a = 0; a < n; ++a) {
    rel(a, a) = 0;
    for (Index b = a + 1; b < n; ++b) rel(a, b) = rel(b, a) = d - gf::intersection_dim(subs[a], subs[b], v, d, q);
  }
  std::vector<std::string> labels;
  for (int i = 0; i <= d; ++i) labels.push_back("meetdim" + std::to_string(d - i));
  return detail::scheme_from_relation(rel, d + 1, std::move(labels));
}

/// Merges classes along a partition of {0..d}; the part containing 0 must be
/// {0}. Parts keep their given order. Axioms are not re-checked here.
inline AssociationScheme fuse_classes(const AssociationScheme& s, const std::vector<std::vector<Index>>& parts) {
  std::vector<Index> part_of(s.rank(), -1);
  for (size_t p = 0; p < parts.size(); ++p)
    for (Index j : parts[p]) {
      if (j < 0 || j >= s.rank() || part_of[j] >= 0)
        throw Error("parameter", "class partition is not a partition of 0..d", {double(j)});
      part_of[j] = static_cast<Index>(p);
    }
  for (Index j = 0; j < s.rank(); ++j)
    if (part_of[j] < 0) throw Error("parameter", "class partition misses class " + std::to_string(j), {double(j)});
  if (parts.empty() || parts[0] != std::vector<Index>{0})
    throw Error("parameter", "the first part of a class partition must be {0}");
  IntMatrix rel(s.n, s.n);
  for (Index j = 0; j < s.rank(); ++j)
    for (Index x = 0; x < s.n; ++x)
      for (Index y = 0; y < s.n; ++y)
        if (s.classes[j](x, y)) rel(x, y) = part_of[j];
  std::vector<std::string> labels;
  for (size_t p = 0; p < parts.size(); ++p) labels.push_back("B" + std::to_string(p));
  return detail::scheme_from_relation(rel, static_cast<Index>(parts.size()), std::move(labels));
}

/// Partition of group-scheme classes (build_group_scheme order) into
/// conjugacy classes, ordered as in build_conjugacy_scheme.
inline std::vector<std::vector<Index>> conjugacy_partition(const GroupTable& g) {
  const AssociationScheme conj = build_conjugacy_scheme(g);
  const AssociationScheme grp = build_group_scheme(g);
  std::vector<std::vector<Index>> parts(conj.rank());
  // class of element x in the group scheme is read at (x, e)
  for (Index j = 0; j < grp.rank(); ++j) {
    Index x = 0;
    while (grp.classes[j](x, g.identity) == 0) ++x;
    for (Index c = 0; c < conj.rank(); ++c)
      if (conj.classes[c](x, g.identity)) parts[c].push_back(j);
  }
  return parts;
}

// ---------------------------------------------------------------------------
// Axiom verification

struct AxiomResult {
  bool passed = true;
  std::string detail;
  std::vector<std::int64_t> witness;
};

/// Outcome of the five scheme axioms, axioms[0] being axiom (1).
struct AxiomReport {
  std::array<AxiomResult, 5> axioms;

  bool scheme() const { return axioms[0].passed && axioms[1].passed && axioms[2].passed && axioms[3].passed; }
  bool commutative() const { return scheme() && axioms[4].passed; }
  /// 1-based number of the first failing axiom among (1)-(4), or 0.
  int first_failure() const {
    for (int a = 0; a < 4; ++a)
      if (!axioms[a].passed) return a + 1;
    return 0;
  }
};

inline AxiomReport verify_axioms(const AssociationScheme& s) {
  AxiomReport rep;
  const Index n = s.n, r = s.rank();
  auto fail = [&](int axiom, std::string detail, std::vector<std::int64_t> w) {
    auto& a = rep.axioms[axiom];
    if (!a.passed) return;
    a.passed = false;
    a.detail = std::move(detail);
    a.witness = std::move(w);
  };

  bool shapes_ok = r >= 1;
  for (const auto& c : s.classes) shapes_ok = shapes_ok && c.rows() == n && c.cols() == n;
  if (!shapes_ok) {
    for (int a = 0; a < 5; ++a) fail(a, "class matrices are missing or not n x n", {});
    return rep;
  }

  // (1)
  for (Index x = 0; x < n && rep.axioms[0].passed; ++x)
    for (Index y = 0; y < n; ++y)
      if (s.classes[0](x, y) != (x == y ? 1 : 0)) {
        fail(0, "A_0 differs from the identity", {0, x, y, s.classes[0](x, y)});
        break;
      }

  // (2): 0/1 entries whose supports partition X x X
  IntMatrix rel = IntMatrix::Constant(n, n, -1);
  for (Index x = 0; x < n && rep.axioms[1].passed; ++x)
    for (Index y = 0; y < n; ++y) {
      std::int64_t sum = 0;
      for (Index j = 0; j < r; ++j) {
        const auto v = s.classes[j](x, y);
        if (v != 0 && v != 1) {
          fail(1, "entry is not 0 or 1", {x, y, v});
          break;
        }
        sum += v;
        if (v == 1) rel(x, y) = j;
      }
      if (rep.axioms[1].passed && sum != 1) {
        fail(1, "classes do not sum to J", {x, y, sum});
        break;
      }
    }

  // (3)
  if (static_cast<Index>(s.transpose_map.size()) != r) fail(2, "transpose_map has wrong length", {});
  for (Index j = 0; j < r && rep.axioms[2].passed; ++j) {
    const Index t = s.transpose_map[j];
    if (t < 0 || t >= r || s.transpose_map[t] != j) {
      fail(2, "transpose_map is not an involution", {j, t});
      break;
    }
    const IntMatrix tr = s.classes[j].transpose();
    if (tr != s.classes[t]) {
      for (Index x = 0; x < n; ++x)
        for (Index y = 0; y < n; ++y)
          if (tr(x, y) != s.classes[t](x, y)) {
            fail(2, "A_j^T differs from A_transpose_map(j)", {j, x, y, tr(x, y)});
            x = n;
            break;
          }
    }
  }

  // (4): every product constant on each class support (zero off all supports)
  std::vector<IntMatrix> prods(static_cast<size_t>(r * r));
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < r; ++j) prods[i * r + j] = s.classes[i] * s.classes[j];
  for (Index i = 0; i < r && rep.axioms[3].passed; ++i)
    for (Index j = 0; j < r && rep.axioms[3].passed; ++j) {
      const IntMatrix& P = prods[i * r + j];
      std::vector<std::int64_t> coef(r, -1);
      for (Index x = 0; x < n && rep.axioms[3].passed; ++x)
        for (Index y = 0; y < n; ++y) {
          const Index k = rel(x, y);
          if (k < 0) {
            if (P(x, y) != 0) {
              fail(3, "A_i A_j is nonzero outside every class", {i, j, x, y});
              break;
            }
            continue;
          }
          if (coef[k] < 0) coef[k] = P(x, y);
          else if (coef[k] != P(x, y)) {
            fail(3, "A_i A_j is not constant on a class", {i, j, x, y});
            break;
          }
        }
    }

  // (5)
  for (Index i = 0; i < r && rep.axioms[4].passed; ++i)
    for (Index j = i + 1; j < r; ++j)
      if (prods[i * r + j] != prods[j * r + i]) {
        const IntMatrix diff = prods[i * r + j] - prods[j * r + i];
        Index x = 0, y = 0;
        diff.cwiseAbs().maxCoeff(&x, &y);
        fail(4, "A_i A_j != A_j A_i", {i, j, x, y});
        break;
      }
  return rep;
}

/// Reads p(k,i,j) off one representative entry of each class and checks the
/// full reconstruction A_i A_j = sum_k p(k,i,j) A_k entrywise.
inline IntersectionTensor intersection_numbers(const AssociationScheme& s) {
  const Index r = s.rank(), n = s.n;
  std::vector<std::pair<Index, Index>> rep(r, {-1, -1});
  for (Index k = 0; k < r; ++k) {
    for (Index x = 0; x < n && rep[k].first < 0; ++x)
      for (Index y = 0; y < n; ++y)
        if (s.classes[k](x, y) == 1) {
          rep[k] = {x, y};
          break;
        }
    if (rep[k].first < 0) throw Error("axiom-2", "class " + std::to_string(k) + " is empty", {double(k)});
  }
  IntersectionTensor t;
  t.rank = r;
  t.p.assign(static_cast<size_t>(r * r * r), 0);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < r; ++j) {
      const IntMatrix P = s.classes[i] * s.classes[j];
      IntMatrix recon = IntMatrix::Zero(n, n);
      for (Index k = 0; k < r; ++k) {
        t(k, i, j) = P(rep[k].first, rep[k].second);
        recon += t(k, i, j) * s.classes[k];
      }
      if (recon != P) {
        Index x = 0, y = 0;
        (recon - P).cwiseAbs().maxCoeff(&x, &y);
        throw Error("axiom-4", "A_i A_j is not in the span of the classes",
                    {double(i), double(j), double(x), double(y)});
      }
    }
  t.valency.resize(r);
  for (Index i = 0; i < r; ++i) t.valency[i] = t(0, i, s.transpose_map[i]);
  return t;
}

}  // namespace schemeq
