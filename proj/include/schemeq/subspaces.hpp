#pragma once

#include <cstdint>
#include <vector>

#include "schemeq/common.hpp"

namespace schemeq::gf {

inline bool is_prime(std::int64_t q) {
  if (q < 2) return false;
  for (std::int64_t p = 2; p * p <= q; ++p)
    if (q % p == 0) return false;
  return true;
}

inline std::int64_t inverse_mod(std::int64_t a, std::int64_t q) {
  // q is prime, so a^(q-2) is the inverse
  std::int64_t r = 1, b = a % q, e = q - 2;
  while (e > 0) {
    if (e & 1) r = r * b % q;
    b = b * b % q;
    e >>= 1;
  }
  return r;
}

/// Number of d-dimensional subspaces of GF(q)^v; saturates at `limit + 1`.
inline std::int64_t gaussian_binomial(int v, int d, std::int64_t q, std::int64_t limit) {
  if (d < 0 || d > v) return 0;
  // [v choose d]_q = prod_{i<d} (q^{v-i} - 1) / (q^{i+1} - 1), evaluated
  // incrementally; every partial quotient is itself a Gaussian binomial.
  long double acc = 1;
  for (int i = 0; i < d; ++i) {
    long double num = 1, den = 1;
    for (int t = 0; t < v - i; ++t) num *= static_cast<long double>(q);
    for (int t = 0; t < i + 1; ++t) den *= static_cast<long double>(q);
    acc = acc * (num - 1) / (den - 1);
    if (acc > static_cast<long double>(limit) * 1e6L) return limit + 1;
  }
  std::int64_t r = static_cast<std::int64_t>(acc + 0.5L);
  return r > limit ? limit + 1 : r;
}

/// Row-major d x v matrix over GF(q) with entries in [0, q).
using Rows = std::vector<std::uint8_t>;

/// Rank over GF(q) of a row-major matrix with `cols` columns. Destroys `m`.
inline int rank_mod_q(Rows m, int cols, std::int64_t q) {
  const int rows = static_cast<int>(m.size()) / cols;
  int rank = 0;
  for (int c = 0; c < cols && rank < rows; ++c) {
    int piv = -1;
    for (int r = rank; r < rows; ++r)
      if (m[r * cols + c] != 0) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    for (int t = 0; t < cols; ++t) std::swap(m[piv * cols + t], m[rank * cols + t]);
    const std::int64_t inv = inverse_mod(m[rank * cols + c], q);
    for (int t = 0; t < cols; ++t) m[rank * cols + t] = static_cast<std::uint8_t>(m[rank * cols + t] * inv % q);
    for (int r = 0; r < rows; ++r) {
      if (r == rank || m[r * cols + c] == 0) continue;
      const std::int64_t f = m[r * cols + c];
      for (int t = 0; t < cols; ++t)
        m[r * cols + t] = static_cast<std::uint8_t>(((m[r * cols + t] - f * m[rank * cols + t]) % q + q) % q);
    }
    ++rank;
  }
  return rank;
}

/// All d-dimensional subspaces of GF(q)^v as reduced row-echelon bases.
/// Order: pivot column sets lexicographically, then the free entries read in
/// row-major order as a base-q counter (last entry fastest).
inline std::vector<Rows> enumerate_subspaces(int v, int d, std::int64_t q) {
  std::vector<Rows> out;
  std::vector<int> piv(d);
  for (int i = 0; i < d; ++i) piv[i] = i;
  while (true) {
    std::vector<char> is_piv(v, 0);
    for (int p : piv) is_piv[p] = 1;
    std::vector<int> free_pos;  // flat positions r*v + c that are free
    for (int r = 0; r < d; ++r)
      for (int c = piv[r] + 1; c < v; ++c)
        if (!is_piv[c]) free_pos.push_back(r * v + c);

    std::vector<std::int64_t> digits(free_pos.size(), 0);
    while (true) {
      Rows m(static_cast<size_t>(d) * v, 0);
      for (int r = 0; r < d; ++r) m[r * v + piv[r]] = 1;
      for (size_t t = 0; t < free_pos.size(); ++t) m[free_pos[t]] = static_cast<std::uint8_t>(digits[t]);
      out.push_back(std::move(m));
      int t = static_cast<int>(digits.size()) - 1;
      while (t >= 0 && ++digits[t] == q) digits[t--] = 0;
      if (t < 0) break;
    }

    int i = d - 1;
    while (i >= 0 && piv[i] == v - d + i) --i;
    if (i < 0) break;
    ++piv[i];
    for (int j = i + 1; j < d; ++j) piv[j] = piv[j - 1] + 1;
  }
  return out;
}

/// dim(a ∩ b) for two d-dimensional subspaces given by bases.
inline int intersection_dim(const Rows& a, const Rows& b, int v, int d, std::int64_t q) {
  Rows stacked(a);
  stacked.insert(stacked.end(), b.begin(), b.end());
  return 2 * d - rank_mod_q(std::move(stacked), v, q);
}

}  // namespace schemeq::gf
