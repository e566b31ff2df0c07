#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "schemeq/common.hpp"
#include "schemeq/group_table.hpp"
#include "schemeq/scheme.hpp"

namespace schemeq {

/// Irreducible characters on conjugacy classes. Class i is class i of
/// build_conjugacy_scheme for the same group, so class 0 is {e}; chars[j][i]
/// is chi_j(C_i).
struct CharacterTable {
  std::vector<std::int64_t> class_sizes;
  std::vector<std::vector<cplx>> chars;

  Index rank() const { return static_cast<Index>(class_sizes.size()); }
  double dim(Index j) const { return chars[j][0].real(); }
  std::int64_t group_order() const {
    std::int64_t s = 0;
    for (auto c : class_sizes) s += c;
    return s;
  }
};

/// max_{j,k} |sum_i |C_i| chi_j(C_i) conj(chi_k(C_i)) - |G| delta_jk|.
inline double row_orthogonality_defect(const CharacterTable& ct) {
  const Index r = ct.rank();
  const double order = static_cast<double>(ct.group_order());
  double worst = 0;
  for (Index j = 0; j < r; ++j)
    for (Index k = 0; k < r; ++k) {
      cplx s = 0;
      for (Index i = 0; i < r; ++i) s += double(ct.class_sizes[i]) * ct.chars[j][i] * std::conj(ct.chars[k][i]);
      worst = std::max(worst, std::abs(s - (j == k ? order : 0.0)));
    }
  return worst;
}

/// Evaluates class functions given on group elements at class representatives.
inline CharacterTable character_table_from_functions(const GroupTable& g,
                                                     const std::vector<std::function<cplx(Index)>>& chis) {
  const AssociationScheme cs = build_conjugacy_scheme(g);
  CharacterTable ct;
  std::vector<Index> rep(cs.rank(), -1);
  for (Index k = 0; k < cs.rank(); ++k) {
    std::int64_t size = 0;
    for (Index x = 0; x < g.order; ++x)
      if (cs.classes[k](x, g.identity)) {
        if (rep[k] < 0) rep[k] = x;
        ++size;
      }
    ct.class_sizes.push_back(size);
  }
  for (const auto& chi : chis) {
    std::vector<cplx> row;
    for (Index k = 0; k < cs.rank(); ++k) row.push_back(chi(rep[k]));
    ct.chars.push_back(std::move(row));
  }
  return ct;
}

/// Characters x -> exp(2 pi i j x / n) of cyclic_group(n).
inline CharacterTable cyclic_character_table(Index n) {
  const GroupTable g = cyclic_group(n);
  std::vector<std::function<cplx(Index)>> chis;
  for (Index j = 0; j < n; ++j)
    chis.emplace_back([j, n](Index x) {
      return std::polar(1.0, 2.0 * std::numbers::pi * double((j * x) % n) / double(n));
    });
  return character_table_from_functions(g, chis);
}

/// Trivial, sign and standard characters of symmetric_group(3).
inline CharacterTable s3_character_table() {
  const GroupTable g = symmetric_group(3);
  const auto elems = symmetric_group_elements(3);
  auto sign = [&elems](Index x) {
    int inv = 0;
    const auto& p = elems[x];
    for (size_t a = 0; a < p.size(); ++a)
      for (size_t b = a + 1; b < p.size(); ++b) inv += p[a] > p[b];
    return cplx(inv % 2 ? -1.0 : 1.0);
  };
  auto standard = [&elems](Index x) {
    int fixed = 0;
    for (size_t a = 0; a < elems[x].size(); ++a) fixed += elems[x][a] == Index(a);
    return cplx(fixed - 1.0);
  };
  return character_table_from_functions(g, {[](Index) { return cplx(1.0); }, sign, standard});
}

/// Characters of quaternion_group(): trivial, the three sign characters with
/// kernels <i>, <j>, <k>, and the 2-dimensional one.
inline CharacterTable q8_character_table() {
  const GroupTable g = quaternion_group();
  auto kernel_sign = [](Index unit) {
    return [unit](Index x) { return cplx((x / 2 == 0 || x / 2 == unit) ? 1.0 : -1.0); };
  };
  auto two_dim = [](Index x) { return cplx(x == 0 ? 2.0 : (x == 1 ? -2.0 : 0.0)); };
  return character_table_from_functions(g, {[](Index) { return cplx(1.0); }, kernel_sign(1), kernel_sign(2),
                                            kernel_sign(3), two_dim});
}

/// Hypergroup weights of the dual object straight from characters:
/// dim(chi_k) / (dim(chi_i) dim(chi_j)) * mult(chi_k, chi_i (x) chi_j).
/// Indexed h[(i * r + j) * r + k].
inline std::vector<double> character_hypergroup(const CharacterTable& ct) {
  const Index r = ct.rank();
  const double order = static_cast<double>(ct.group_order());
  std::vector<double> h(static_cast<size_t>(r * r * r));
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < r; ++j)
      for (Index k = 0; k < r; ++k) {
        cplx mult = 0;
        for (Index c = 0; c < r; ++c)
          mult += double(ct.class_sizes[c]) * ct.chars[i][c] * ct.chars[j][c] * std::conj(ct.chars[k][c]);
        mult /= order;
        h[(i * r + j) * r + k] = ct.dim(k) / (ct.dim(i) * ct.dim(j)) * mult.real();
      }
  return h;
}

}  // namespace schemeq
