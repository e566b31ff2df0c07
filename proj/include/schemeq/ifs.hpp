#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>
#include <utility>
#include <vector>

#include "schemeq/scheme.hpp"

namespace schemeq {

// ---------------------------------------------------------------------------
// One-mode interacting Fock spaces

/// omega_1..omega_L and alpha_1..alpha_{L+1}.
struct JacobiData {
  std::vector<double> omega;
  std::vector<double> alpha;
  bool closed = false;  // omega_{L+1} = 0: nothing beyond Phi_L

  Index L() const { return static_cast<Index>(omega.size()); }
  /// True once some omega_m is zero: the Fock space is finite.
  bool terminated() const {
    return closed || std::any_of(omega.begin(), omega.end(), [](double w) { return w == 0.0; });
  }
};

struct LadderTriple {
  RealMatrix Bplus, Bminus, Bzero;
};

struct OneModeIFS {
  LadderTriple ladder;
  RealMatrix T;
  JacobiData jacobi;
};

/// Validates the Jacobi condition; an empty alpha means all zeros.
inline JacobiData make_jacobi_data(std::vector<double> omega, std::vector<double> alpha = {}) {
  bool zero_seen = false;
  for (size_t n = 0; n < omega.size(); ++n) {
    if (!(omega[n] >= 0.0)) throw Error("parameter", "omega must be nonnegative", {double(n + 1), omega[n]});
    if (zero_seen && omega[n] != 0.0)
      throw Error("jacobi-condition", "omega is nonzero after a zero", {double(n + 1), omega[n]});
    zero_seen = zero_seen || omega[n] == 0.0;
  }
  if (alpha.empty()) alpha.assign(omega.size() + 1, 0.0);
  if (alpha.size() != omega.size() + 1)
    throw Error("parameter", "alpha needs one more entry than omega", {double(alpha.size()), double(omega.size())});
  return {std::move(omega), std::move(alpha), false};
}

/// Tridiagonal T = B+ + B- + B0 on Phi_0..Phi_{D-1}, where D stops at the
/// first zero omega.
inline OneModeIFS ifs_from_jacobi(const JacobiData& jd) {
  Index D = jd.L() + 1;
  for (Index n = 0; n < jd.L(); ++n)
    if (jd.omega[n] == 0.0) {
      D = n + 1;
      break;
    }
  OneModeIFS out;
  out.jacobi = jd;
  auto& B = out.ladder;
  B.Bplus = RealMatrix::Zero(D, D);
  B.Bzero = RealMatrix::Zero(D, D);
  for (Index n = 0; n < D; ++n) B.Bzero(n, n) = jd.alpha[n];
  for (Index n = 0; n + 1 < D; ++n) B.Bplus(n + 1, n) = std::sqrt(jd.omega[n]);
  B.Bminus = B.Bplus.transpose();
  out.T = B.Bplus + B.Bminus + B.Bzero;
  return out;
}

/// <Phi_0, T^m Phi_0> for m = 0..m_max. Evaluated on the similar matrix with
/// unit superdiagonal and omega on the subdiagonal, so integer Jacobi data
/// give integer moments without square roots.
inline std::vector<double> vacuum_moments(const OneModeIFS& ifs, Index m_max) {
  const JacobiData& jd = ifs.jacobi;
  const Index need = (m_max + 1) / 2;
  if (!jd.terminated() && jd.L() < need)
    throw Error("truncation", "moments up to " + std::to_string(m_max) + " need L >= " + std::to_string(need),
                {double(need), double(jd.L())});
  const Index D = ifs.T.rows();
  std::vector<double> out;
  RealVector v = RealVector::Zero(D);
  v(0) = 1.0;
  for (Index m = 0; m <= m_max; ++m) {
    out.push_back(v(0));
    RealVector w = RealVector::Zero(D);
    for (Index k = 0; k < D; ++k) {
      w(k) += jd.alpha[k] * v(k);
      if (k + 1 < D) {
        w(k) += v(k + 1);
        w(k + 1) += jd.omega[k] * v(k);
      }
    }
    v = std::move(w);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Graphs

struct Graph {
  Index n = 0;
  IntMatrix adj;
};

inline Graph graph_from_adjacency(IntMatrix adj) {
  if (adj.rows() != adj.cols()) throw Error("input", "adjacency matrix is not square");
  require_vertex_cap(adj.rows(), "graph");
  for (Index x = 0; x < adj.rows(); ++x)
    for (Index y = 0; y < adj.cols(); ++y) {
      if (adj(x, y) != 0 && adj(x, y) != 1) throw Error("input", "adjacency entries must be 0 or 1", {double(x), double(y)});
      if (adj(x, y) != adj(y, x)) throw Error("input", "adjacency matrix is not symmetric", {double(x), double(y)});
      if (x == y && adj(x, y)) throw Error("input", "self-loop", {double(x)});
    }
  return {adj.rows(), std::move(adj)};
}

inline Graph graph_from_edges(Index n, const std::vector<std::pair<Index, Index>>& edges) {
  if (n < 1) throw Error("input", "a graph needs at least one vertex", {double(n)});
  require_vertex_cap(n, "graph");
  IntMatrix adj = IntMatrix::Zero(n, n);
  for (auto [x, y] : edges) {
    if (x < 0 || y < 0 || x >= n || y >= n) throw Error("input", "edge endpoint out of range", {double(x), double(y)});
    if (x == y) throw Error("input", "self-loop", {double(x)});
    adj(x, y) = adj(y, x) = 1;
  }
  return {n, std::move(adj)};
}

inline Graph path_graph(Index n) {
  std::vector<std::pair<Index, Index>> e;
  for (Index x = 0; x + 1 < n; ++x) e.emplace_back(x, x + 1);
  return graph_from_edges(n, e);
}

/// Graph of one class of a symmetric relation, e.g. class 1 of J(4,2) is the
/// octahedron.
inline Graph graph_from_scheme_class(const AssociationScheme& s, Index i) {
  if (i <= 0 || i >= s.rank()) throw Error("parameter", "class index out of range", {double(i)});
  IntMatrix adj = s.classes[i] + s.classes[s.transpose_map[i]];
  adj = adj.cwiseMin(1);
  return graph_from_adjacency(std::move(adj));
}

inline Graph octahedron_graph() { return graph_from_scheme_class(build_johnson(4, 2), 1); }

/// Spidernet S(a,b,c) cut after `depth` strata: the root has a neighbours,
/// every vertex of V_n (n >= 1) has one neighbour in V_{n-1}, c in V_{n+1} and
/// b-1-c inside V_n (a circulant), so |V_n| = a c^{n-1}.
inline Graph spidernet_graph(Index a, Index b, Index c, Index depth) {
  if (a < 1 || c < 1 || depth < 1 || b < c + 1) throw Error("parameter", "spidernet needs a, c >= 1 and b >= c + 1");
  const Index r = b - 1 - c;
  std::vector<Index> first{0, 1};
  Index size = a, total = 1 + a;
  for (Index n = 2; n <= depth; ++n) {
    first.push_back(total);
    size *= c;
    total += size;
    require_vertex_cap(total, "spidernet");
  }
  first.push_back(total);
  std::vector<std::pair<Index, Index>> e;
  for (Index k = 0; k < a; ++k) e.emplace_back(0, 1 + k);
  for (Index n = 1; n <= depth; ++n) {
    const Index lo = first[n], m = first[n + 1] - lo;
    if (r >= m || (r % 2 == 1 && m % 2 == 1))
      throw Error("parameter", "stratum " + std::to_string(n) + " cannot be " + std::to_string(r) + "-regular",
                  {double(n), double(m), double(r)});
    for (Index k = 0; k < m; ++k) {
      for (Index s = 1; s <= r / 2; ++s) e.emplace_back(lo + k, lo + (k + s) % m);
      if (r % 2 == 1 && k < m / 2) e.emplace_back(lo + k, lo + k + m / 2);
      if (n < depth)
        for (Index ch = 0; ch < c; ++ch) e.emplace_back(lo + k, first[n + 1] + k * c + ch);
    }
  }
  return graph_from_edges(total, e);
}

// ---------------------------------------------------------------------------
// Stratification and quantum decomposition

struct StratifiedGraph {
  Graph graph;
  Index root = 0;
  std::vector<Index> distance;  // -1 when unreachable
  std::vector<std::vector<Index>> strata;
  std::vector<Index> unreachable;

  /// Phi_n = |V_n|^{-1/2} sum over V_n.
  RealVector radial_vector(Index k) const {
    RealVector v = RealVector::Zero(graph.n);
    for (Index x : strata.at(k)) v(x) = 1.0 / std::sqrt(double(strata[k].size()));
    return v;
  }
};

inline StratifiedGraph stratify(const Graph& g, Index root) {
  if (root < 0 || root >= g.n) throw Error("parameter", "root out of range", {double(root)});
  graph_from_adjacency(g.adj);  // re-validates shape and symmetry
  StratifiedGraph sg;
  sg.graph = g;
  sg.root = root;
  sg.distance.assign(g.n, -1);
  sg.distance[root] = 0;
  std::deque<Index> queue{root};
  while (!queue.empty()) {
    const Index x = queue.front();
    queue.pop_front();
    for (Index y = 0; y < g.n; ++y)
      if (g.adj(x, y) && sg.distance[y] < 0) {
        sg.distance[y] = sg.distance[x] + 1;
        queue.push_back(y);
      }
  }
  for (Index x = 0; x < g.n; ++x) {
    if (sg.distance[x] < 0) {
      sg.unreachable.push_back(x);
      continue;
    }
    if (static_cast<Index>(sg.strata.size()) <= sg.distance[x]) sg.strata.resize(sg.distance[x] + 1);
    sg.strata[sg.distance[x]].push_back(x);
  }
  return sg;
}

struct QuantumDecomposition {
  IntMatrix Aplus, Aminus, Azero;
};

/// Aplus(x,y) = 1 for edges with x one stratum further out than y. Edges among
/// unreachable vertices go to Azero so that the three parts sum to A.
inline QuantumDecomposition quantum_decomposition(const StratifiedGraph& sg) {
  const Index n = sg.graph.n;
  QuantumDecomposition q{IntMatrix::Zero(n, n), IntMatrix::Zero(n, n), IntMatrix::Zero(n, n)};
  for (Index x = 0; x < n; ++x)
    for (Index y = 0; y < n; ++y) {
      if (!sg.graph.adj(x, y)) continue;
      const Index dx = sg.distance[x], dy = sg.distance[y];
      if (dx >= 0 && dx == dy + 1) q.Aplus(x, y) = 1;
      else if (dy >= 0 && dy == dx + 1) q.Aminus(x, y) = 1;
      else q.Azero(x, y) = 1;
    }
  return q;
}

struct RadialJacobi {
  JacobiData jacobi;
  std::vector<RealVector> vectors;  // orthonormal Lanczos vectors
  bool drg_consistent = false;
};

/// Three-term orthogonalization of delta_root, A delta_root, ...; each new
/// vector is orthogonalized against the previous two only.
inline RadialJacobi radial_jacobi(const StratifiedGraph& sg, const Tolerances& tol = {}) {
  const RealMatrix A = sg.graph.adj.cast<double>();
  RadialJacobi out;
  RealVector prev = RealVector::Zero(sg.graph.n), cur = RealVector::Unit(sg.graph.n, sg.root);
  double beta = 0;
  for (Index k = 0; k < sg.graph.n; ++k) {
    out.vectors.push_back(cur);
    const RealVector Av = A * cur;
    const double alpha = cur.dot(Av);
    out.jacobi.alpha.push_back(alpha);
    RealVector w = Av - alpha * cur - beta * prev;
    const double norm = w.norm();
    if (norm < tol.zero * std::max(1.0, Av.norm())) {
      out.jacobi.closed = true;
      break;
    }
    out.jacobi.omega.push_back(norm * norm);
    beta = norm;
    prev = std::move(cur);
    cur = w / norm;
  }
  out.drg_consistent = out.vectors.size() == sg.strata.size();
  for (size_t k = 0; out.drg_consistent && k < out.vectors.size(); ++k)
    out.drg_consistent = max_abs(out.vectors[k] - sg.radial_vector(static_cast<Index>(k))) <= tol.num;
  return out;
}

/// <delta_root, A^m delta_root> for m = 0..m_max in exact integers.
inline std::vector<std::int64_t> graph_moments(const Graph& g, Index root, Index m_max) {
  if (root < 0 || root >= g.n) throw Error("parameter", "root out of range", {double(root)});
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1> v = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>::Zero(g.n);
  v(root) = 1;
  std::vector<std::int64_t> out;
  for (Index m = 0; m <= m_max; ++m) {
    out.push_back(v(root));
    v = g.adj * v;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Multi-mode IFS on the adjacency algebra

/// Coordinates are taken in the orthonormal basis u_i = A_i / sqrt(n v_i) of
/// the algebra under <M,N> = tr(M* N).
struct MultiModeIFS {
  Index rank = 0;
  std::vector<Index> modes;
  std::vector<std::int64_t> valency;
  std::vector<RealMatrix> X;  // multiplication by B_j, one per mode
  RealMatrix basis;           // orthonormal columns, graded
  std::vector<Index> level;   // degree of each basis column
  Index levels = 0;
  std::vector<RealMatrix> P;  // projections onto each degree
  std::vector<RealMatrix> aplus, azero, aminus;
  bool transpose_closed = false;
  double off_tridiagonal = 0;

  RealMatrix columns_at(Index n) const {
    std::vector<Index> cols;
    for (Index c = 0; c < static_cast<Index>(level.size()); ++c)
      if (level[c] == n) cols.push_back(c);
    RealMatrix out(basis.rows(), cols.size());
    for (size_t k = 0; k < cols.size(); ++k) out.col(k) = basis.col(cols[k]);
    return out;
  }
};

/// Operator of left multiplication by A_j in u-coordinates:
/// X[k][i] = sqrt(v_k / v_i) p(k, j, i).
inline RealMatrix mode_operator(const IntersectionTensor& p, Index j) {
  const Index r = p.rank;
  RealMatrix X(r, r);
  for (Index k = 0; k < r; ++k)
    for (Index i = 0; i < r; ++i)
      X(k, i) = std::sqrt(double(p.valency[k]) / double(p.valency[i])) * double(p(k, j, i));
  return X;
}

/// max |<P_m basis, X_j P_n basis>| over |m - n| >= 2.
inline double three_term_check(const MultiModeIFS& mm) {
  double worst = 0;
  for (size_t j = 0; j < mm.X.size(); ++j)
    for (Index m = 0; m < mm.levels; ++m)
      for (Index n = 0; n < mm.levels; ++n)
        if (std::abs(m - n) >= 2) {
          const RealMatrix blk = mm.columns_at(m).transpose() * mm.X[j] * mm.columns_at(n);
          worst = std::max(worst, max_abs(blk));
        }
  return worst;
}

/// Grades the cyclic subspace of A_0 under the chosen modes by degree and
/// splits each mode operator into its creation, preservation and
/// annihilation blocks.
inline MultiModeIFS multimode_ifs(const AssociationScheme& s, std::vector<Index> modes = {},
                                  const Tolerances& tol = {}) {
  if (!s.commutative) throw Error("commutativity-required", "multi-mode IFS needs a commutative scheme");
  const IntersectionTensor p = intersection_numbers(s);
  const Index r = s.rank();
  if (modes.empty())
    for (Index j = 1; j < r; ++j) modes.push_back(j);
  for (Index j : modes)
    if (j <= 0 || j >= r) throw Error("parameter", "mode index out of range", {double(j)});
  MultiModeIFS mm;
  mm.rank = r;
  mm.modes = modes;
  mm.valency = p.valency;
  for (Index j : modes) mm.X.push_back(mode_operator(p, j));
  mm.transpose_closed = std::all_of(modes.begin(), modes.end(), [&](Index j) {
    return std::find(modes.begin(), modes.end(), s.transpose_map[j]) != modes.end();
  });

  std::vector<RealVector> basis{RealVector::Unit(r, 0)};
  std::vector<Index> level{0};
  std::vector<RealVector> frontier = basis;
  for (Index deg = 1; !frontier.empty(); ++deg) {
    std::vector<RealVector> cand;
    for (const auto& X : mm.X)
      for (const auto& f : frontier) cand.push_back(X * f);
    double largest = 0;
    for (const auto& c : cand) largest = std::max(largest, c.norm());
    std::vector<RealVector> fresh;
    for (auto c : cand) {
      // two passes of Gram-Schmidt against everything accepted so far
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& b : basis) c -= b.dot(c) * b;
        for (const auto& b : fresh) c -= b.dot(c) * b;
      }
      const double nc = c.norm();
      if (nc > tol.gs * std::max(largest, 1e-300)) fresh.push_back(c / nc);
    }
    for (const auto& f : fresh) {
      basis.push_back(f);
      level.push_back(deg);
    }
    frontier = std::move(fresh);
  }
  mm.basis = RealMatrix(r, basis.size());
  for (size_t c = 0; c < basis.size(); ++c) mm.basis.col(c) = basis[c];
  mm.level = level;
  mm.levels = level.back() + 1;
  for (Index n = 0; n < mm.levels; ++n) {
    const RealMatrix Q = mm.columns_at(n);
    mm.P.push_back(Q * Q.transpose());
  }
  for (const auto& X : mm.X) {
    RealMatrix ap = RealMatrix::Zero(r, r), a0 = ap, am = ap;
    for (Index n = 0; n < mm.levels; ++n) {
      a0 += mm.P[n] * X * mm.P[n];
      if (n + 1 < mm.levels) ap += mm.P[n + 1] * X * mm.P[n];
      if (n > 0) am += mm.P[n - 1] * X * mm.P[n];
    }
    mm.aplus.push_back(ap);
    mm.azero.push_back(a0);
    mm.aminus.push_back(am);
  }
  mm.off_tridiagonal = three_term_check(mm);
  if (mm.transpose_closed && mm.off_tridiagonal > tol.zero)
    throw Error("three-term-violation", "mode operators reach beyond adjacent degrees", {mm.off_tridiagonal});
  return mm;
}

// ---------------------------------------------------------------------------
// Grassmann comparison report

struct FormulaRow {
  std::string quantity;  // e.g. "p^{n-1}_{1,n}"
  std::string formula;   // e.g. "(2 - n)(v - n)"
  Index n = 0;
  double paper_formula = 0;
  double computed = 0;
  bool match = false;
};

struct ModeLadder {
  Index mode = 0;
  std::vector<double> creation;      // <Phi_{n+1}, B_j Phi_n>
  std::vector<double> preservation;  // <Phi_n, B_j Phi_n>
  std::vector<double> annihilation;  // <Phi_{n-1}, B_j Phi_n>, from n = 1
};

struct GrassmannReport {
  std::int64_t q = 0;
  int v = 0, d = 0;
  std::vector<std::vector<std::int64_t>> p_k_1_n;  // [k][n] = p(k, 1, n)
  std::vector<std::vector<std::int64_t>> p_k_0_n;
  std::vector<ModeLadder> modes;
  std::vector<FormulaRow> rows;
  bool all_match = true;
};

/// Compares the scheme's intersection numbers (class k = d - dim of the
/// intersection) with a fixed list of closed forms.
inline GrassmannReport grassmann_mode_parameters(std::int64_t q, int v, int d, const Tolerances& tol = {}) {
  const AssociationScheme s = build_grassmann(q, v, d);
  const IntersectionTensor p = intersection_numbers(s);
  const Index r = s.rank();
  GrassmannReport rep;
  rep.q = q;
  rep.v = v;
  rep.d = d;
  rep.p_k_1_n.assign(r, std::vector<std::int64_t>(r));
  rep.p_k_0_n.assign(r, std::vector<std::int64_t>(r));
  for (Index k = 0; k < r; ++k)
    for (Index n = 0; n < r; ++n) {
      rep.p_k_1_n[k][n] = r > 1 ? p(k, 1, n) : 0;
      rep.p_k_0_n[k][n] = p(k, 0, n);
    }
  for (Index j = 1; j < r; ++j) {
    const MultiModeIFS mm = multimode_ifs(s, {j}, tol);
    ModeLadder ml;
    ml.mode = j;
    for (Index n = 0; n < mm.levels; ++n) {
      const RealVector phi = mm.columns_at(n).col(0);
      const RealVector img = mm.X[0] * phi;
      ml.preservation.push_back(phi.dot(img));
      if (n + 1 < mm.levels) ml.creation.push_back(mm.columns_at(n + 1).col(0).dot(img));
      if (n > 0) ml.annihilation.push_back(mm.columns_at(n - 1).col(0).dot(img));
    }
    rep.modes.push_back(std::move(ml));
  }
  auto add = [&](std::string quantity, std::string formula, Index n, double closed_form, double computed) {
    FormulaRow row{std::move(quantity), std::move(formula), n, closed_form, computed, std::abs(closed_form - computed) < 0.5};
    rep.all_match = rep.all_match && row.match;
    rep.rows.push_back(std::move(row));
  };
  const Index top = std::min<Index>(d, v - d);
  for (Index n = 1; n <= top && n < r; ++n) {
    add("p^{n-1}_{1,n}", "(2 - n)(v - n)", n, double((2 - n) * (v - n)), double(p(n - 1, 1, n)));
    add("p^{n}_{1,n}", "n(v - 2)", n, double(n * (v - 2)), double(p(n, 1, n)));
    add("p^{n}_{1,n}", "n(v - 2n)", n, double(n * (v - 2 * n)), double(p(n, 1, n)));
  }
  if (r > 1) add("p^{0}_{1,1}", "d(v - d)", 1, double(d * (v - d)), double(p(0, 1, 1)));
  return rep;
}

}  // namespace schemeq
