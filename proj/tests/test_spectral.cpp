#include <gtest/gtest.h>

#include <map>

#include "oracles.hpp"
#include "schemeq/spectral.hpp"

using namespace schemeq;

namespace {

std::vector<std::pair<std::string, AssociationScheme>> commutative_test_schemes() {
  return {{"C5", build_group_scheme(cyclic_group(5))},
          {"C6", build_group_scheme(cyclic_group(6))},
          {"S3conj", build_conjugacy_scheme(symmetric_group(3))},
          {"Q8conj", build_conjugacy_scheme(quaternion_group())},
          {"S4conj", build_conjugacy_scheme(symmetric_group(4))},
          {"C5inv", build_subscheme(cyclic_group(5), {{0, 4, 3, 2, 1}})},
          {"J42", build_johnson(4, 2)},
          {"J52", build_johnson(5, 2)},
          {"J63", build_johnson(6, 3)},
          {"J2_4_2", build_grassmann(2, 4, 2)}};
}

/// label[j] = the DFT character index whose idempotent matches E_j.
std::vector<long> dft_labels(const SpectralData& sd, long n) {
  std::vector<long> label(sd.rank(), -1);
  for (Index j = 0; j < sd.rank(); ++j)
    for (long c = 0; c < n; ++c) {
      double diff = 0;
      for (long y = 0; y < n; ++y)
        for (long z = 0; z < n; ++z) diff = std::max(diff, std::abs(sd.E[j](y, z) - oracle::dft_idempotent(n, c, y, z)));
      if (diff < 1e-9) label[j] = c;
    }
  return label;
}

}  // namespace

TEST(PrimitiveIdempotents, ProjectionInvariants) {
  for (const auto& [name, s] : commutative_test_schemes()) {
    SCOPED_TRACE(name);
    const auto sd = primitive_idempotents(s);
    ASSERT_EQ(sd.rank(), s.rank());
    const ComplexMatrix I = ComplexMatrix::Identity(s.n, s.n);
    ComplexMatrix sum = ComplexMatrix::Zero(s.n, s.n);
    Index msum = 0;
    for (Index j = 0; j < sd.rank(); ++j) {
      for (Index k = 0; k < sd.rank(); ++k) {
        const ComplexMatrix expect = j == k ? sd.E[j] : ComplexMatrix::Zero(s.n, s.n);
        EXPECT_LT(max_abs(sd.E[j] * sd.E[k] - expect), 1e-9);
      }
      sum += sd.E[j];
      msum += sd.m[j];
      Eigen::ColPivHouseholderQR<ComplexMatrix> qr(sd.E[j]);
      qr.setThreshold(1e-8);
      EXPECT_EQ(qr.rank(), sd.m[j]);
      EXPECT_LT(max_abs(sd.E[j] - sd.E[j].adjoint()), 1e-9);
      EXPECT_LT(max_abs(sd.E[sd.conjugate[j]] - sd.E[j].conjugate()), 1e-9);
    }
    EXPECT_LT(max_abs(sum - I), 1e-9);
    EXPECT_EQ(msum, s.n);
    EXPECT_LT(max_abs(sd.E[0] - ComplexMatrix::Constant(s.n, s.n, 1.0 / double(s.n))), 1e-9);
    EXPECT_EQ(sd.m[0], 1);
    for (Index i = 0; i < s.rank(); ++i) {
      ComplexMatrix recon = ComplexMatrix::Zero(s.n, s.n);
      for (Index j = 0; j < sd.rank(); ++j) recon += sd.eigenmatrix(j, i) * sd.E[j];
      EXPECT_LT(max_abs(recon - s.classes[i].cast<cplx>()), 1e-9);
    }
  }
}

TEST(PrimitiveIdempotents, C5IsTheDiscreteFourierBasis) {
  const auto sd = primitive_idempotents(build_group_scheme(cyclic_group(5)));
  auto labels = dft_labels(sd, 5);
  EXPECT_EQ(labels[0], 0);
  std::sort(labels.begin(), labels.end());
  EXPECT_EQ(labels, (std::vector<long>{0, 1, 2, 3, 4}));
  for (Index j = 0; j < 5; ++j) EXPECT_EQ(sd.m[j], 1);
}

TEST(PrimitiveIdempotents, S3ConjugacyMultiplicities) {
  const auto sd = primitive_idempotents(build_conjugacy_scheme(symmetric_group(3)));
  // dim(chi)^2 for the trivial, sign and standard characters
  EXPECT_EQ(sd.m, (std::vector<Index>{1, 1, 4}));
  // eigenvalues of the transposition class: 3, -3, 0
  EXPECT_NEAR(sd.eigenmatrix(1, 1).real(), -3.0, 1e-9);
  EXPECT_NEAR(sd.eigenmatrix(2, 1).real(), 0.0, 1e-9);
}

TEST(PrimitiveIdempotents, SeedDoesNotChangeTheResult) {
  const auto s = build_johnson(5, 2);
  const auto a = primitive_idempotents(s, {}, 1);
  const auto b = primitive_idempotents(s, {}, 123456789);
  ASSERT_EQ(a.rank(), b.rank());
  for (Index j = 0; j < a.rank(); ++j) EXPECT_LT(max_abs(a.E[j] - b.E[j]), 1e-9);
}

TEST(PrimitiveIdempotents, RejectsNonCommutative) {
  try {
    primitive_idempotents(build_group_scheme(symmetric_group(3)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "commutativity-required");
  }
}

TEST(PrimitiveIdempotents, ImpossibleClusteringReportsGap) {
  // a huge clustering tolerance merges every eigenvalue into one cluster
  Tolerances tol;
  tol.eig = 1e3;
  try {
    primitive_idempotents(build_johnson(4, 2), tol);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "degeneracy");
    EXPECT_EQ(e.witness().size(), 1u);
  }
}

TEST(CharacterPath, TrivialCharacterGivesAveragingProjection) {
  const GroupTable g = symmetric_group(3);
  const auto sd = idempotents_from_characters(g, s3_character_table());
  EXPECT_LT(max_abs(sd.E[0] - ComplexMatrix::Constant(6, 6, 1.0 / 6.0)), 1e-12);
  EXPECT_EQ(sd.m, (std::vector<Index>{1, 1, 4}));
}

TEST(CharacterPath, AgreesWithSpectralPath) {
  struct Case {
    GroupTable g;
    CharacterTable ct;
  };
  for (const auto& c : {Case{symmetric_group(3), s3_character_table()}, Case{quaternion_group(), q8_character_table()},
                        Case{cyclic_group(3), cyclic_character_table(3)},
                        Case{cyclic_group(7), cyclic_character_table(7)}}) {
    const auto chars = idempotents_from_characters(c.g, c.ct);
    const auto spec = primitive_idempotents(build_conjugacy_scheme(c.g));
    double diff = 1;
    auto perm = match_idempotents(chars, spec, &diff);
    EXPECT_LT(diff, 1e-8);
    std::sort(perm.begin(), perm.end());
    for (Index j = 0; j < static_cast<Index>(perm.size()); ++j) EXPECT_EQ(perm[j], j);
  }
}

TEST(CharacterPath, C3IsTheDiscreteFourierBasis) {
  const auto sd = idempotents_from_characters(cyclic_group(3), cyclic_character_table(3));
  auto labels = dft_labels(sd, 3);
  std::sort(labels.begin(), labels.end());
  EXPECT_EQ(labels, (std::vector<long>{0, 1, 2}));
}

TEST(CharacterPath, RejectsInconsistentTables) {
  auto ct = s3_character_table();
  ct.chars[2][1] = 1.0;
  try {
    idempotents_from_characters(symmetric_group(3), ct);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "invalid-character-table");
  }
  auto short_table = s3_character_table();
  short_table.chars.pop_back();
  EXPECT_THROW(idempotents_from_characters(symmetric_group(3), short_table), Error);
}

TEST(Krein, C5IsSelfDual) {
  const auto s = build_group_scheme(cyclic_group(5));
  const auto sd = primitive_idempotents(s);
  const auto q = krein_parameters(s, sd);
  const auto lab = dft_labels(sd, 5);
  for (Index k = 0; k < 5; ++k)
    for (Index i = 0; i < 5; ++i)
      for (Index j = 0; j < 5; ++j)
        EXPECT_NEAR(q(k, i, j), lab[k] == (lab[i] + lab[j]) % 5 ? 1.0 : 0.0, 1e-9);
}

TEST(Krein, IdentityRowAndKreinCondition) {
  for (const auto& [name, s] : commutative_test_schemes()) {
    SCOPED_TRACE(name);
    const auto sd = primitive_idempotents(s);
    const auto q = krein_parameters(s, sd);
    const Index r = sd.rank();
    for (Index i = 0; i < r; ++i)
      for (Index j = 0; j < r; ++j) {
        double msum = 0;
        for (Index k = 0; k < r; ++k) {
          EXPECT_NEAR(q(k, 0, j), k == j ? 1.0 : 0.0, 1e-9);
          EXPECT_GE(q(k, i, j), -1e-9);
          msum += double(sd.m[k]) * q(k, i, j);
        }
        EXPECT_NEAR(msum, double(sd.m[i] * sd.m[j]), 1e-8);
      }
  }
}

TEST(Krein, CorruptedIdempotentsAreRejected) {
  const auto s = build_johnson(4, 2);
  auto sd = primitive_idempotents(s);
  sd.E[1](0, 1) += 0.1;
  try {
    krein_parameters(s, sd);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "basis-inconsistency");
  }
}

TEST(Hypergroup, StochasticWithIdentityAndSymmetry) {
  for (const auto& [name, s] : commutative_test_schemes()) {
    SCOPED_TRACE(name);
    const auto sd = primitive_idempotents(s);
    const auto h = hypergroup(s, sd);
    const Index r = sd.rank();
    for (Index i = 0; i < r; ++i)
      for (Index j = 0; j < r; ++j) {
        double row = 0;
        for (Index k = 0; k < r; ++k) {
          EXPECT_GE(h(i, j, k), -1e-9);
          EXPECT_NEAR(h(i, j, k), h(j, i, k), 1e-9);
          row += h(i, j, k);
        }
        EXPECT_NEAR(row, 1.0, 1e-8);
      }
    for (Index j = 0; j < r; ++j)
      for (Index k = 0; k < r; ++k) EXPECT_NEAR(h(0, j, k), j == k ? 1.0 : 0.0, 1e-9);
  }
}

TEST(Hypergroup, RawExpansionCoefficientsSumToOneOverN) {
  for (const auto& [name, s] : commutative_test_schemes()) {
    SCOPED_TRACE(name);
    const auto sd = primitive_idempotents(s);
    for (Index i = 0; i < sd.rank(); ++i)
      for (Index j = 0; j < sd.rank(); ++j) {
        const ComplexMatrix prod = sd.e[i].cwiseProduct(sd.e[j]);
        // coefficient of e_k in prod is tr(E_k prod)
        cplx total = 0;
        for (Index k = 0; k < sd.rank(); ++k) total += (sd.E[k] * prod).trace();
        EXPECT_NEAR(total.real(), 1.0 / double(s.n), 1e-8);
        EXPECT_NEAR(total.imag(), 0.0, 1e-8);
      }
  }
}

TEST(Hypergroup, C5IsThePermutationTensorOfZ5) {
  const auto s = build_group_scheme(cyclic_group(5));
  const auto sd = primitive_idempotents(s);
  const auto h = hypergroup(s, sd);
  const auto lab = dft_labels(sd, 5);
  const auto p = intersection_numbers(s);
  for (Index i = 0; i < 5; ++i)
    for (Index j = 0; j < 5; ++j)
      for (Index k = 0; k < 5; ++k) {
        EXPECT_NEAR(h(i, j, k), lab[k] == (lab[i] + lab[j]) % 5 ? 1.0 : 0.0, 1e-9);
        // self-duality: class k of the group scheme is element k, valency 1
        EXPECT_EQ(p(k, i, j), k == (i + j) % 5 ? 1 : 0);
      }
}

TEST(Hypergroup, S3StandardSquare) {
  const auto s = build_conjugacy_scheme(symmetric_group(3));
  const auto h = hypergroup(s, primitive_idempotents(s));
  // chi_2 (x) chi_2 = 1 + sgn + chi_2, weighted by dim(chi_k) / 4
  EXPECT_NEAR(h(2, 2, 0), 0.25, 1e-9);
  EXPECT_NEAR(h(2, 2, 1), 0.25, 1e-9);
  EXPECT_NEAR(h(2, 2, 2), 0.5, 1e-9);
  EXPECT_NEAR(h(1, 2, 2), 1.0, 1e-9);
  EXPECT_NEAR(h(1, 1, 0), 1.0, 1e-9);
}

TEST(Hypergroup, ConjugacySchemesMatchCharacterFormula) {
  struct Case {
    GroupTable g;
    CharacterTable ct;
  };
  for (const auto& c : {Case{symmetric_group(3), s3_character_table()}, Case{quaternion_group(), q8_character_table()},
                        Case{cyclic_group(6), cyclic_character_table(6)}}) {
    const auto s = build_conjugacy_scheme(c.g);
    const auto sd = primitive_idempotents(s);
    const auto chars = idempotents_from_characters(c.g, c.ct);
    // chars.E[a] follows the table order after moving the trivial row first,
    // which is already first in every built-in table
    const auto perm = match_idempotents(chars, sd);
    const auto h = hypergroup(s, sd);
    const auto hc = character_hypergroup(c.ct);
    const Index r = s.rank();
    for (Index i = 0; i < r; ++i)
      for (Index j = 0; j < r; ++j)
        for (Index k = 0; k < r; ++k)
          EXPECT_NEAR(h(perm[i], perm[j], perm[k]), hc[(i * r + j) * r + k], 1e-8);
  }
}

TEST(Hypergroup, RelabelingPermutesTheTensor) {
  const auto s = build_johnson(5, 2);
  const auto sd = primitive_idempotents(s);
  auto swapped = sd;
  std::swap(swapped.E[1], swapped.E[2]);
  std::swap(swapped.e[1], swapped.e[2]);
  std::swap(swapped.m[1], swapped.m[2]);
  const auto h = hypergroup(s, sd);
  const auto h2 = hypergroup(s, swapped);
  const Index sigma[3] = {0, 2, 1};
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 3; ++j)
      for (Index k = 0; k < 3; ++k) EXPECT_NEAR(h2(sigma[i], sigma[j], sigma[k]), h(i, j, k), 1e-12);
}
