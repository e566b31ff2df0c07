#pragma once

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "schemeq/spectral.hpp"

namespace schemeq {

/// M -> S o M with S a convex combination of normalized idempotents.
struct TransitionOperator {
  std::vector<double> weights;
  ComplexMatrix S;

  Index n() const { return S.rows(); }
  ComplexMatrix apply(const ComplexMatrix& M) const { return S.cwiseProduct(M); }
};

/// Row-stochastic chain on the hypergroup states e_0..e_d.
struct ClassicalChain {
  RealMatrix t;
  RealVector p0;

  Index states() const { return t.rows(); }
};

namespace detail {

inline void require_distribution(const std::vector<double>& w, Index size, const Tolerances& tol, const char* what) {
  if (static_cast<Index>(w.size()) != size)
    throw Error("parameter", std::string(what) + " has " + std::to_string(w.size()) + " entries, expected " +
                                 std::to_string(size));
  double sum = 0;
  for (size_t i = 0; i < w.size(); ++i) {
    if (!(w[i] >= -tol.zero)) throw Error("parameter", std::string(what) + " has a negative entry", {double(i), w[i]});
    sum += w[i];
  }
  if (std::abs(sum - 1.0) > tol.zero) throw Error("parameter", std::string(what) + " does not sum to 1", {sum});
}

}  // namespace detail

inline TransitionOperator make_transition_operator(const SpectralData& sd, std::vector<double> weights,
                                                   const Tolerances& tol = {}) {
  detail::require_distribution(weights, sd.rank(), tol, "weights");
  TransitionOperator T;
  T.S = ComplexMatrix::Zero(sd.n, sd.n);
  for (Index i = 0; i < sd.rank(); ++i)
    if (weights[i] != 0.0) T.S += weights[i] * sd.e[i];
  T.weights = std::move(weights);
  return T;
}

inline TransitionOperator make_transition_operator(const SpectralData& sd, Index i) {
  std::vector<double> w(sd.rank(), 0.0);
  w.at(i) = 1.0;
  return make_transition_operator(sd, std::move(w));
}

struct ChoiReport {
  double min_eigenvalue = 0;
  std::string mode;  // "choi" or "direct"
  bool completely_positive = false;
  double hermitian_defect = 0;
  Index dimension = 0;
};

inline constexpr Index kChoiCap = 4096;

/// Choi matrix sum_{a,b} E_ab (x) T(E_ab) = sum S_ab E_ab (x) E_ab. Its only
/// nonzero rows and columns are a*n+a, so the spectrum is that of S padded
/// with n^2 - n zeros. Above the cap only S is eigensolved.
inline ChoiReport choi_psd_check(const TransitionOperator& T, const Tolerances& tol = {}, Index cap = kChoiCap) {
  const Index n = T.n();
  ChoiReport rep;
  rep.dimension = n * n;
  ComplexMatrix core;
  if (n * n <= cap) {
    rep.mode = "choi";
    struct Entry {
      Index row, col;
      cplx value;
    };
    std::vector<Entry> entries;
    ComplexMatrix Eab = ComplexMatrix::Zero(n, n);
    for (Index a = 0; a < n; ++a)
      for (Index b = 0; b < n; ++b) {
        Eab(a, b) = 1.0;
        const ComplexMatrix image = T.apply(Eab);
        Eab(a, b) = 0.0;
        for (Index c = 0; c < n; ++c)
          for (Index d = 0; d < n; ++d)
            if (image(c, d) != cplx(0)) entries.push_back({a * n + c, b * n + d, image(c, d)});
      }
    // rows and columns that are identically zero contribute eigenvalue 0
    std::vector<char> used(n * n, 0);
    for (const auto& e : entries) used[e.row] = used[e.col] = 1;
    std::vector<Index> pos(n * n, -1);
    Index m = 0;
    for (Index r = 0; r < n * n; ++r)
      if (used[r]) pos[r] = m++;
    core = ComplexMatrix::Zero(m, m);
    for (const auto& e : entries) core(pos[e.row], pos[e.col]) += e.value;
    rep.min_eigenvalue = m < n * n ? 0.0 : std::numeric_limits<double>::infinity();
  } else {
    rep.mode = "direct";
    core = T.S;
    rep.min_eigenvalue = n > 1 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  rep.hermitian_defect = max_abs(core - core.adjoint());
  if (core.size() > 0) {
    const ComplexMatrix H = (core + core.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(H, Eigen::EigenvaluesOnly);
    rep.min_eigenvalue = std::min(rep.min_eigenvalue, es.eigenvalues().minCoeff());
  }
  rep.completely_positive = rep.min_eigenvalue >= -tol.zero && rep.hermitian_defect <= tol.zero;
  return rep;
}

/// Matrix of T on the e-basis rescaled by n: t(j,k) = n tr(E_k (S o e_j)).
inline ClassicalChain restrict_to_subalgebra(const TransitionOperator& T, const SpectralData& sd,
                                             const Tolerances& tol = {}) {
  const Index r = sd.rank();
  const double n = double(sd.n);
  ClassicalChain c;
  c.t = RealMatrix::Zero(r, r);
  for (Index j = 0; j < r; ++j) {
    const ComplexMatrix X = T.apply(sd.e[j]);
    ComplexMatrix recon = ComplexMatrix::Zero(sd.n, sd.n);
    for (Index k = 0; k < r; ++k) {
      const cplx coef = detail::trace_product(sd.E[k], X);
      recon += coef * sd.e[k];
      if (std::abs(coef.imag()) * n > tol.num)
        throw Error("invariance-violation", "complex coefficient in the e-basis expansion",
                    {double(j), double(k), coef.imag()});
      c.t(j, k) = std::abs(n * coef.real()) < tol.zero ? 0.0 : n * coef.real();
    }
    const double res = max_abs(recon - X);
    if (res > tol.num)
      throw Error("invariance-violation", "T(e_j) leaves the span of the idempotents", {double(j), res});
  }
  c.p0 = RealVector::Zero(r);
  c.p0(0) = 1.0;
  return c;
}

inline ClassicalChain make_chain(RealMatrix t, RealVector p0, const Tolerances& tol = {}) {
  if (t.rows() != t.cols() || t.rows() != p0.size()) throw Error("parameter", "chain dimensions disagree");
  std::vector<double> p(p0.data(), p0.data() + p0.size());
  detail::require_distribution(p, t.rows(), tol, "p0");
  for (Index j = 0; j < t.rows(); ++j) {
    std::vector<double> row(t.cols());
    for (Index k = 0; k < t.cols(); ++k) row[k] = t(j, k);
    detail::require_distribution(row, t.cols(), tol, "transition row");
  }
  return {std::move(t), std::move(p0)};
}

/// p0, p0 t, ..., p0 t^steps.
inline std::vector<RealVector> walk(const ClassicalChain& c, Index steps) {
  if (steps < 0) throw Error("parameter", "negative step count", {double(steps)});
  std::vector<RealVector> traj{c.p0};
  traj.reserve(steps + 1);
  for (Index s = 0; s < steps; ++s) traj.push_back((traj.back().transpose() * c.t).transpose());
  return traj;
}

/// Left eigenvector of t for the eigenvalue nearest 1, normalized to sum 1.
inline RealVector stationary_distribution(const ClassicalChain& c) {
  Eigen::EigenSolver<RealMatrix> es(c.t.transpose());
  Index best = 0;
  for (Index k = 1; k < es.eigenvalues().size(); ++k)
    if (std::abs(es.eigenvalues()(k) - 1.0) < std::abs(es.eigenvalues()(best) - 1.0)) best = k;
  const ComplexVector v = es.eigenvectors().col(best);
  RealVector p = v.real();
  const double sum = p.sum();
  if (std::abs(sum) < 1e-300) throw Error("degeneracy", "stationary vector has zero mass");
  return p / sum;
}

/// Coarsens a scheme along a class partition and re-checks the axioms; the
/// result must be commutative.
inline AssociationScheme commutative_reduction(const AssociationScheme& s,
                                               const std::vector<std::vector<Index>>& parts) {
  AssociationScheme f = fuse_classes(s, parts);
  const AxiomReport rep = verify_axioms(f);
  if (!rep.scheme()) {
    std::vector<double> w(rep.axioms[rep.first_failure() - 1].witness.begin(),
                          rep.axioms[rep.first_failure() - 1].witness.end());
    throw Error("axiom-" + std::to_string(rep.first_failure()), "fused classes do not form a scheme: " +
                                                                      rep.axioms[rep.first_failure() - 1].detail,
                w);
  }
  if (!rep.commutative())
    throw Error("commutativity-required", "fused scheme is not commutative",
                std::vector<double>(rep.axioms[4].witness.begin(), rep.axioms[4].witness.end()));
  return f;
}

}  // namespace schemeq
