#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "schemeq/common.hpp"

namespace schemeq {

inline constexpr Index kMaxAmplitudes = 65536;
inline constexpr Index kMaxLevel = 12;

/// Initial distribution p0 and transition matrix t on S states.
struct EntangledChainSpec {
  Index S = 0;
  RealVector p0;
  RealMatrix t;
  Index max_level = 0;
};

/// Psi_n as a dense vector over S^{n+1}; site 0 is the most significant digit.
struct TruncatedState {
  Index level = 0;
  ComplexVector amplitudes;
};

/// A_Lambda on sites 0..sites-1.
struct LocalObservable {
  Index sites = 0;
  ComplexMatrix A;
};

/// P(A) = R A R^T with R = sqrt(t) entrywise.
struct MarkovOperator {
  RealMatrix R;

  ComplexMatrix apply(const ComplexMatrix& A) const { return R.cast<cplx>() * A * R.transpose().cast<cplx>(); }
  /// P(I)_ij = sum_k sqrt(t_ik t_jk), summed directly.
  RealMatrix of_identity() const {
    RealMatrix out(R.rows(), R.rows());
    for (Index i = 0; i < R.rows(); ++i)
      for (Index j = 0; j < R.rows(); ++j) {
        double s = 0;
        for (Index k = 0; k < R.cols(); ++k) s += R(i, k) * R(j, k);
        out(i, j) = s;
      }
    return out;
  }
};

struct EntanglementReport {
  bool entangled = false;
  Index i = -1, j = -1;
  double value = 0;
  RealMatrix p_of_identity;
};

namespace detail {

inline Index ipow(Index b, Index e) {
  Index r = 1;
  for (Index k = 0; k < e; ++k) r *= b;
  return r;
}

inline void require_stochastic(const RealMatrix& t, const Tolerances& tol) {
  if (t.rows() == 0 || t.rows() != t.cols())
    throw Error("parameter", "transition matrix must be square and nonempty", {double(t.rows()), double(t.cols())});
  for (Index i = 0; i < t.rows(); ++i) {
    double sum = 0;
    for (Index j = 0; j < t.cols(); ++j) {
      if (!(t(i, j) >= -tol.zero))
        throw Error("parameter", "transition matrix has a negative entry", {double(i), double(j), t(i, j)});
      sum += t(i, j);
    }
    if (std::abs(sum - 1.0) > tol.zero)
      throw Error("parameter", "transition row " + std::to_string(i) + " does not sum to 1", {double(i), sum});
  }
}

inline double safe_sqrt(double x) { return x > 0 ? std::sqrt(x) : 0.0; }

}  // namespace detail

/// Largest n <= 12 with S^{n+1} <= 65536.
inline Index default_max_level(Index S) {
  Index n = 0;
  while (n < kMaxLevel && detail::ipow(S, n + 2) <= kMaxAmplitudes) ++n;
  return n;
}

inline EntangledChainSpec make_chain_spec(RealVector p0, RealMatrix t, const Tolerances& tol = {}) {
  detail::require_stochastic(t, tol);
  if (p0.size() != t.rows()) throw Error("parameter", "p0 and t disagree in size", {double(p0.size()), double(t.rows())});
  double sum = 0;
  for (Index j = 0; j < p0.size(); ++j) {
    if (!(p0(j) >= -tol.zero)) throw Error("parameter", "p0 has a negative entry", {double(j), p0(j)});
    sum += p0(j);
  }
  if (std::abs(sum - 1.0) > tol.zero) throw Error("parameter", "p0 does not sum to 1", {sum});
  EntangledChainSpec spec;
  spec.S = t.rows();
  spec.p0 = std::move(p0);
  spec.t = std::move(t);
  spec.max_level = default_max_level(spec.S);
  return spec;
}

inline void require_level(const EntangledChainSpec& spec, Index n) {
  if (n < 0) throw Error("parameter", "negative level", {double(n)});
  if (n > spec.max_level)
    throw ResourceError("cap-exceeded", "level " + std::to_string(n) + " exceeds cap " + std::to_string(spec.max_level),
                        {double(n), double(spec.max_level)});
}

/// Psi_n(j_0..j_n) = sqrt(p_{j_0}) prod sqrt(t_{j_a j_{a+1}}), written out
/// string by string.
inline TruncatedState build_state(const EntangledChainSpec& spec, Index n) {
  require_level(spec, n);
  const Index S = spec.S, total = detail::ipow(S, n + 1);
  TruncatedState st;
  st.level = n;
  st.amplitudes = ComplexVector::Zero(total);
  std::vector<Index> digits(n + 1);
  for (Index idx = 0; idx < total; ++idx) {
    Index rest = idx;
    for (Index s = n; s >= 0; --s) {
      digits[s] = rest % S;
      rest /= S;
    }
    double a = detail::safe_sqrt(spec.p0(digits[0]));
    for (Index s = 0; s < n && a != 0.0; ++s) a *= detail::safe_sqrt(spec.t(digits[s], digits[s + 1]));
    st.amplitudes(idx) = a;
  }
  return st;
}

/// V_n: a vector on sites 0..n goes to sites 0..n+1 with
/// |..., j_n> -> sum_j sqrt(t_{j_n j}) |..., j_n, j>.
inline ComplexVector apply_isometry(const EntangledChainSpec& spec, Index site, const ComplexVector& v) {
  const Index S = spec.S;
  if (v.size() != detail::ipow(S, site + 1))
    throw Error("shape", "vector does not live on sites 0.." + std::to_string(site), {double(v.size())});
  ComplexVector out = ComplexVector::Zero(v.size() * S);
  for (Index idx = 0; idx < v.size(); ++idx)
    for (Index j = 0; j < S; ++j) out(idx * S + j) = v(idx) * detail::safe_sqrt(spec.t(idx % S, j));
  return out;
}

inline ComplexVector apply_isometry_adjoint(const EntangledChainSpec& spec, Index site, const ComplexVector& w) {
  const Index S = spec.S;
  if (w.size() != detail::ipow(S, site + 2))
    throw Error("shape", "vector does not live on sites 0.." + std::to_string(site + 1), {double(w.size())});
  ComplexVector out = ComplexVector::Zero(w.size() / S);
  for (Index idx = 0; idx < out.size(); ++idx)
    for (Index j = 0; j < S; ++j) out(idx) += detail::safe_sqrt(spec.t(idx % S, j)) * w(idx * S + j);
  return out;
}

/// V_{n-1} ... V_0 applied to sum_j sqrt(p_j) e_j.
inline TruncatedState build_state_by_isometries(const EntangledChainSpec& spec, Index n) {
  require_level(spec, n);
  ComplexVector v(spec.S);
  for (Index j = 0; j < spec.S; ++j) v(j) = detail::safe_sqrt(spec.p0(j));
  for (Index s = 0; s < n; ++s) v = apply_isometry(spec, s, v);
  return {n, std::move(v)};
}

inline LocalObservable make_local_observable(const EntangledChainSpec& spec, Index sites, ComplexMatrix A,
                                             const Tolerances& tol = {}) {
  if (sites < 1) throw Error("parameter", "an observable needs at least one site", {double(sites)});
  require_level(spec, sites);
  const Index dim = detail::ipow(spec.S, sites);
  if (A.rows() != dim || A.cols() != dim)
    throw Error("shape", "observable must be " + std::to_string(dim) + "x" + std::to_string(dim),
                {double(A.rows()), double(A.cols())});
  const double defect = max_abs(A - A.adjoint());
  if (defect > tol.zero) throw Error("parameter", "observable is not Hermitian", {defect});
  return {sites, std::move(A)};
}

inline ComplexMatrix kron(const ComplexMatrix& A, const ComplexMatrix& B) {
  ComplexMatrix out(A.rows() * B.rows(), A.cols() * B.cols());
  for (Index i = 0; i < A.rows(); ++i)
    for (Index j = 0; j < A.cols(); ++j) out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return out;
}

/// <Psi_n, (A (x) I) Psi_n> for n >= sites.
inline double local_expectation(const EntangledChainSpec& spec, const LocalObservable& obs, Index n) {
  if (n < obs.sites)
    throw Error("window", "level " + std::to_string(n) + " does not extend past the observable window",
                {double(n), double(obs.sites)});
  const TruncatedState st = build_state(spec, n);
  const Index win = obs.A.rows(), tail = st.amplitudes.size() / win;
  // row-major digits: amplitude a*tail + r is column r of the win x tail block
  const auto W = st.amplitudes.reshaped<Eigen::RowMajor>(win, tail);
  return (W.adjoint() * obs.A * W).trace().real();
}

inline MarkovOperator markov_operator(const RealMatrix& t, const Tolerances& tol = {}) {
  detail::require_stochastic(t, tol);
  MarkovOperator P;
  P.R = t.unaryExpr([](double x) { return detail::safe_sqrt(x); });
  return P;
}

/// P(I) != I, with the first offending entry in row-major order.
inline EntanglementReport is_entangled(const RealMatrix& t, const Tolerances& tol = {}) {
  EntanglementReport rep;
  rep.p_of_identity = markov_operator(t, tol).of_identity();
  const Index S = t.rows();
  for (Index i = 0; i < S && !rep.entangled; ++i)
    for (Index j = 0; j < S; ++j) {
      const double dev = std::abs(rep.p_of_identity(i, j) - (i == j ? 1.0 : 0.0));
      if (dev > tol.zero) {
        rep.entangled = true;
        rep.i = i;
        rep.j = j;
        rep.value = rep.p_of_identity(i, j);
        break;
      }
    }
  return rep;
}

namespace detail {

inline void require_same_square(const ComplexMatrix& M, const ComplexMatrix& N) {
  if (M.rows() != M.cols() || N.rows() != N.cols() || M.rows() != N.rows())
    throw Error("shape", "transition expectation needs two square matrices of one size",
                {double(M.rows()), double(M.cols()), double(N.rows()), double(N.cols())});
}

}  // namespace detail

/// m(A (x) B) = A o B.
inline ComplexMatrix schur_compression(const ComplexMatrix& A, const ComplexMatrix& B) {
  detail::require_same_square(A, B);
  return A.cwiseProduct(B);
}

/// m(M (x) (e o N)), the classical embedding through a Schur multiplier.
inline ComplexMatrix transition_expectation_diagonal(const ComplexMatrix& e, const ComplexMatrix& M,
                                                     const ComplexMatrix& N) {
  detail::require_same_square(M, N);
  detail::require_same_square(e, N);
  return schur_compression(M, e.cwiseProduct(N));
}

/// m(M (x) P(N)) = V*(M (x) N)V.
inline ComplexMatrix transition_expectation_entangled(const MarkovOperator& P, const ComplexMatrix& M,
                                                      const ComplexMatrix& N) {
  detail::require_same_square(M, N);
  if (P.R.rows() != N.rows()) throw Error("shape", "Markov operator and matrices disagree in size");
  return schur_compression(M, P.apply(N));
}

/// phi_0[E(A_0 (x) E(A_1 (x) ... E(A_k (x) I)))] with phi_0 the vector state at
/// sqrt(p0).
inline double qmc_evaluate(const EntangledChainSpec& spec, const std::vector<ComplexMatrix>& obs) {
  if (obs.empty()) return 1.0;
  require_level(spec, static_cast<Index>(obs.size()));
  const MarkovOperator P = markov_operator(spec.t);
  ComplexMatrix Y = ComplexMatrix::Identity(spec.S, spec.S);
  for (auto it = obs.rbegin(); it != obs.rend(); ++it) Y = transition_expectation_entangled(P, *it, Y);
  ComplexVector xi(spec.S);
  for (Index j = 0; j < spec.S; ++j) xi(j) = detail::safe_sqrt(spec.p0(j));
  return xi.dot(Y * xi).real();
}

}  // namespace schemeq
