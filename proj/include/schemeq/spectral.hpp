#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

#include "schemeq/characters.hpp"
#include "schemeq/common.hpp"
#include "schemeq/scheme.hpp"

namespace schemeq {

/// Primitive idempotents of a commutative scheme.
struct SpectralData {
  Index n = 0;
  std::vector<ComplexMatrix> E;
  std::vector<Index> m;
  std::vector<ComplexMatrix> e;  // E_j / m_j
  /// eigenmatrix(j, i): eigenvalue of A_i on the range of E_j
  ComplexMatrix eigenmatrix;
  /// conjugate[j] = j* with E_{j*} = conj(E_j)
  std::vector<Index> conjugate;

  Index rank() const { return static_cast<Index>(E.size()); }
};

/// Schur-product structure constants, E_i o E_j = (1/n) sum_k q(k,i,j) E_k.
struct KreinTensor {
  Index rank = 0;
  std::vector<double> q;
  double operator()(Index k, Index i, Index j) const { return q[(k * rank + i) * rank + j]; }
  double& operator()(Index k, Index i, Index j) { return q[(k * rank + i) * rank + j]; }
};

/// Convolution weights h(i,j,k) = (e_i * e_j)(k) of the dual hypergroup.
struct HypergroupTensor {
  Index rank = 0;
  std::vector<double> h;
  double operator()(Index i, Index j, Index k) const { return h[(i * rank + j) * rank + k]; }
  double& operator()(Index i, Index j, Index k) { return h[(i * rank + j) * rank + k]; }
};

namespace detail {

/// Orthogonal projection of M onto span{A_i}: the classes have disjoint
/// supports, so the coefficient of A_i is the mean of M over class i.
inline ComplexMatrix project_to_algebra(const AssociationScheme& s, const ComplexMatrix& M) {
  ComplexMatrix out = ComplexMatrix::Zero(s.n, s.n);
  for (const auto& A : s.classes) {
    cplx sum = 0;
    std::int64_t count = 0;
    for (Index x = 0; x < s.n; ++x)
      for (Index y = 0; y < s.n; ++y)
        if (A(x, y)) {
          sum += M(x, y);
          ++count;
        }
    out += (sum / double(count)) * A.cast<cplx>();
  }
  return out;
}

/// tr(A B) without forming the product.
inline cplx trace_product(const ComplexMatrix& A, const ComplexMatrix& B) {
  return A.cwiseProduct(B.transpose()).sum();
}

inline ComplexMatrix eigenmatrix_of(const AssociationScheme& s, const std::vector<ComplexMatrix>& E,
                                    const std::vector<Index>& m) {
  ComplexMatrix P(E.size(), s.rank());
  for (size_t j = 0; j < E.size(); ++j)
    for (Index i = 0; i < s.rank(); ++i)
      P(static_cast<Index>(j), i) = trace_product(s.classes[i].cast<cplx>(), E[j]) / double(m[j]);
  return P;
}

inline std::vector<Index> conjugate_pairing(const std::vector<ComplexMatrix>& E) {
  std::vector<Index> conj(E.size(), -1);
  for (size_t j = 0; j < E.size(); ++j) {
    double best = 1e300;
    for (size_t k = 0; k < E.size(); ++k) {
      const double diff = max_abs(E[k] - E[j].conjugate());
      if (diff < best) {
        best = diff;
        conj[j] = static_cast<Index>(k);
      }
    }
  }
  return conj;
}

/// Puts the idempotent whose eigenvalues are the valencies first; the rest by
/// increasing multiplicity, then by decreasing eigenvalue on A_1, A_2, ...
/// (real part before imaginary part).
inline std::vector<size_t> canonical_order(const ComplexMatrix& P, const std::vector<Index>& m,
                                           const std::vector<std::int64_t>& valency) {
  const Index r = P.rows();
  auto is_trivial = [&](Index j) {
    for (Index i = 0; i < P.cols(); ++i)
      if (std::abs(P(j, i) - double(valency[i])) > 1e-6 * (1.0 + double(valency[i]))) return false;
    return true;
  };
  std::vector<size_t> order(r);
  std::iota(order.begin(), order.end(), size_t{0});
  constexpr double tie = 1e-7;
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    const bool ta = is_trivial(Index(a)), tb = is_trivial(Index(b));
    if (ta != tb) return ta;
    if (m[a] != m[b]) return m[a] < m[b];
    for (Index i = 1; i < P.cols(); ++i) {
      const cplx x = P(Index(a), i), y = P(Index(b), i);
      if (std::abs(x.real() - y.real()) > tie) return x.real() > y.real();
      if (std::abs(x.imag() - y.imag()) > tie) return x.imag() > y.imag();
    }
    return false;
  });
  return order;
}

inline std::vector<std::int64_t> class_valencies(const AssociationScheme& s) {
  std::vector<std::int64_t> v;
  for (const auto& A : s.classes) v.push_back(A.row(0).sum());
  return v;
}

struct ClusterAttempt {
  std::vector<ComplexMatrix> E;
  std::vector<Index> m;
  double min_gap = 0;
  bool ok = false;
};

inline ClusterAttempt cluster_attempt(const AssociationScheme& s, std::uint64_t seed, double eps_eig) {
  const Index n = s.n;
  const auto val = class_valencies(s);
  std::mt19937_64 rng(seed);
  ComplexMatrix H = ComplexMatrix::Zero(n, n);
  const cplx I(0, 1);
  for (Index i = 1; i < s.rank(); ++i) {
    const ComplexMatrix A = s.classes[i].cast<cplx>();
    const double c = (1.0 + uniform01(rng)) / double(val[i]);
    const double c2 = (1.0 + uniform01(rng)) / double(val[i]);
    H += 0.5 * c * (A + A.transpose()) + 0.5 * c2 * I * (A - A.transpose());
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(H);
  const RealVector& w = es.eigenvalues();
  const ComplexMatrix& U = es.eigenvectors();

  ClusterAttempt out;
  out.min_gap = 1e300;
  std::vector<std::pair<Index, Index>> ranges;
  Index start = 0;
  for (Index t = 1; t <= n; ++t) {
    if (t == n || w(t) - w(t - 1) > eps_eig) {
      ranges.emplace_back(start, t);
      if (t < n) out.min_gap = std::min(out.min_gap, w(t) - w(t - 1));
      start = t;
    }
  }
  if (static_cast<Index>(ranges.size()) != s.rank()) return out;
  for (auto [a, b] : ranges) {
    const ComplexMatrix Ub = U.middleCols(a, b - a);
    out.E.push_back(project_to_algebra(s, Ub * Ub.adjoint()));
    out.m.push_back(b - a);
  }
  out.ok = true;
  return out;
}

inline SpectralData assemble(const AssociationScheme& s, std::vector<ComplexMatrix> E, std::vector<Index> m,
                             bool reorder) {
  ComplexMatrix P = eigenmatrix_of(s, E, m);
  if (reorder) {
    const auto order = canonical_order(P, m, class_valencies(s));
    std::vector<ComplexMatrix> E2;
    std::vector<Index> m2;
    for (size_t j : order) {
      E2.push_back(std::move(E[j]));
      m2.push_back(m[j]);
    }
    E = std::move(E2);
    m = std::move(m2);
    P = eigenmatrix_of(s, E, m);
  }
  SpectralData sd;
  sd.n = s.n;
  sd.E = std::move(E);
  sd.m = std::move(m);
  for (size_t j = 0; j < sd.E.size(); ++j) sd.e.push_back(sd.E[j] / double(sd.m[j]));
  sd.eigenmatrix = std::move(P);
  sd.conjugate = conjugate_pairing(sd.E);
  return sd;
}

}  // namespace detail

/// Primitive idempotents by simultaneous diagonalization. A fixed-seed random
/// Hermitian element of the algebra separates the common eigenspaces; its
/// eigenvalues are clustered at tol.eig * n and every cluster projector is
/// projected back onto the algebra. A second seed is tried before giving up.
inline SpectralData primitive_idempotents(const AssociationScheme& s, const Tolerances& tol = {},
                                          std::uint64_t seed = kDefaultSeed) {
  if (!s.commutative)
    throw Error("commutativity-required", "primitive idempotents need a commutative scheme");
  const double eps_eig = tol.eig * double(s.n);
  auto att = detail::cluster_attempt(s, seed, eps_eig);
  if (!att.ok) att = detail::cluster_attempt(s, seed ^ 0x9e3779b97f4a7c15ULL, eps_eig);
  if (!att.ok)
    throw Error("degeneracy", "could not separate the common eigenspaces; smallest cluster gap " +
                                  std::to_string(att.min_gap),
                {att.min_gap});
  for (size_t j = 0; j < att.E.size(); ++j) {
    const double tr = att.E[j].trace().real();
    if (std::abs(tr - double(att.m[j])) > 1e-6)
      throw Error("degeneracy", "idempotent rank disagrees with its cluster size", {double(j), tr});
  }
  return detail::assemble(s, std::move(att.E), std::move(att.m), true);
}

/// E_j = dim(chi_j)/|G| sum_x chi_j(x) A_x on the conjugacy scheme of g, kept
/// in character order (trivial character moved to the front).
inline SpectralData idempotents_from_characters(const GroupTable& g, const CharacterTable& ct,
                                                const Tolerances& tol = {}) {
  const AssociationScheme cs = build_conjugacy_scheme(g);
  if (ct.rank() != cs.rank() || static_cast<Index>(ct.chars.size()) != cs.rank())
    throw Error("invalid-character-table", "character table size does not match the class count");
  for (Index i = 0; i < cs.rank(); ++i) {
    if (static_cast<Index>(ct.chars[i].size()) != cs.rank())
      throw Error("invalid-character-table", "character row has wrong length", {double(i)});
    if (ct.class_sizes[i] != cs.classes[i].row(0).sum())
      throw Error("invalid-character-table", "class size mismatch", {double(i)});
  }
  const double defect = row_orthogonality_defect(ct);
  if (defect > tol.num * double(g.order))
    throw Error("invalid-character-table", "row orthogonality fails", {defect});

  std::vector<Index> order;
  for (Index j = 0; j < ct.rank(); ++j) {
    bool trivial = true;
    for (const auto& c : ct.chars[j]) trivial = trivial && std::abs(c - 1.0) < 1e-9;
    if (trivial) order.insert(order.begin(), j);
    else order.push_back(j);
  }
  std::vector<ComplexMatrix> E;
  std::vector<Index> m;
  for (Index j : order) {
    const double dim = ct.dim(j);
    ComplexMatrix Ej = ComplexMatrix::Zero(cs.n, cs.n);
    for (Index i = 0; i < cs.rank(); ++i) Ej += ct.chars[j][i] * cs.classes[i].cast<cplx>();
    E.push_back(Ej * (dim / double(g.order)));
    m.push_back(static_cast<Index>(std::llround(dim * dim)));
  }
  return detail::assemble(cs, std::move(E), std::move(m), false);
}

/// Permutation perm with b.E[perm[j]] closest to a.E[j]; `max_diff` receives
/// the largest entrywise deviation after matching.
inline std::vector<Index> match_idempotents(const SpectralData& a, const SpectralData& b, double* max_diff = nullptr) {
  std::vector<Index> perm(a.rank(), -1);
  double worst = 0;
  for (Index j = 0; j < a.rank(); ++j) {
    double best = 1e300;
    for (Index k = 0; k < b.rank(); ++k) {
      const double diff = max_abs(a.E[j] - b.E[k]);
      if (diff < best) {
        best = diff;
        perm[j] = k;
      }
    }
    worst = std::max(worst, best);
  }
  if (max_diff) *max_diff = worst;
  return perm;
}

/// Reads q(k,i,j) = n tr(E_k (E_i o E_j)) / m_k and checks the reconstruction.
inline KreinTensor krein_parameters(const AssociationScheme& s, const SpectralData& sd, const Tolerances& tol = {}) {
  const Index r = sd.rank();
  const double n = double(s.n);
  KreinTensor kt;
  kt.rank = r;
  kt.q.assign(static_cast<size_t>(r * r * r), 0.0);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < r; ++j) {
      const ComplexMatrix S = sd.E[i].cwiseProduct(sd.E[j]);
      ComplexMatrix recon = ComplexMatrix::Zero(s.n, s.n);
      for (Index k = 0; k < r; ++k) {
        const cplx c = n * detail::trace_product(sd.E[k], S) / double(sd.m[k]);
        kt(k, i, j) = c.real();
        recon += (c / n) * sd.E[k];
      }
      const double res = max_abs(recon - S);
      if (res > tol.num)
        throw Error("basis-inconsistency", "Schur product of idempotents leaves the idempotent span",
                    {double(i), double(j), res});
    }
  return kt;
}

/// h(i,j,k) = m_k q(k,i,j) / (m_i m_j): n times the coefficient of e_k in
/// e_i o e_j, a probability vector in k.
inline HypergroupTensor hypergroup(const AssociationScheme& s, const SpectralData& sd, const Tolerances& tol = {}) {
  const KreinTensor kt = krein_parameters(s, sd, tol);
  const Index r = sd.rank();
  HypergroupTensor ht;
  ht.rank = r;
  ht.h.assign(static_cast<size_t>(r * r * r), 0.0);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < r; ++j)
      for (Index k = 0; k < r; ++k) {
        const double w = double(sd.m[k]) * kt(k, i, j) / (double(sd.m[i]) * double(sd.m[j]));
        if (w < -tol.zero)
          throw Error("krein-violation", "negative hypergroup weight", {double(i), double(j), double(k), w});
        ht(i, j, k) = w;
      }
  return ht;
}

}  // namespace schemeq
