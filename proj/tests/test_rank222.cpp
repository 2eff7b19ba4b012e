#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tenrank/orbit222.hpp"

using namespace tenrank;

namespace {

Mat<Rational> rmat(std::initializer_list<std::initializer_list<long>> rows) {
  Mat<Rational> m(static_cast<Index>(rows.size()),
                  static_cast<Index>(rows.begin()->size()));
  Index i = 0;
  for (const auto& row : rows) {
    Index j = 0;
    for (long v : row) m(i, j++) = make_rational(v);
    ++i;
  }
  return m;
}

// Orthogonal rational 3x3 rotation from a Pythagorean triple, embedded in the
// plane (axis, axis+1 mod 3). det = +1, entries exact.
Mat<Rational> rational_rotation(int axis, long p, long q, long r) {
  Mat<Rational> m = Mat<Rational>::identity(3);
  Index i = axis;
  Index j = (axis + 1) % 3;
  m(i, i) = make_rational(p, r);
  m(i, j) = make_rational(q, r);
  m(j, i) = make_rational(-q, r);
  m(j, j) = make_rational(p, r);
  return m;
}

MultilinearMap<Rational> random_gl_map(std::mt19937_64& eng) {
  return MultilinearMap<Rational>({oracles::random_invertible<Rational>(2, eng),
                                   oracles::random_invertible<Rational>(2, eng),
                                   oracles::random_invertible<Rational>(2, eng)});
}

}  // namespace

TEST(Delta, CanonicalValues) {
  EXPECT_EQ(delta(canonical<Rational>(OrbitClass::G2)), make_rational(1));
  EXPECT_EQ(delta(canonical<Rational>(OrbitClass::G3)), make_rational(-4));
  EXPECT_EQ(delta(canonical<Rational>(OrbitClass::D3)), make_rational(0));
  for (OrbitClass c : {OrbitClass::D0, OrbitClass::D1, OrbitClass::D2, OrbitClass::D2p,
                       OrbitClass::D2pp})
    EXPECT_EQ(delta(canonical<Rational>(c)), make_rational(0));
}

TEST(Delta, MatchesSlabOracle) {
  std::mt19937_64 eng(101);
  for (int trial = 0; trial < 200; ++trial) {
    auto a = oracles::random_int_tensor<Rational>(Shape{2, 2, 2}, eng, -5, 5);
    EXPECT_EQ(delta(a), oracles::delta_slabs(a));
  }
  for (int trial = 0; trial < 100; ++trial) {
    auto a = oracles::random_real_tensor(Shape{2, 2, 2}, eng);
    double expected = oracles::delta_slabs(a);
    EXPECT_NEAR(delta(a), expected, 1e-12 * std::max(1.0, std::abs(expected)));
  }
}

TEST(Delta, Homogeneity) {
  std::mt19937_64 eng(103);
  auto a = oracles::random_int_tensor<Rational>(Shape{2, 2, 2}, eng);
  Rational c = make_rational(-3, 2);
  EXPECT_EQ(delta(scale(a, c)), c * c * c * c * delta(a));
}

TEST(Delta, TransformationLaw) {
  std::mt19937_64 eng(107);
  for (int trial = 0; trial < 100; ++trial) {
    auto a = oracles::random_int_tensor<Rational>(Shape{2, 2, 2}, eng);
    MultilinearMap<Rational> g({oracles::random_int_matrix<Rational>(2, 2, eng),
                                oracles::random_int_matrix<Rational>(2, 2, eng),
                                oracles::random_int_matrix<Rational>(2, 2, eng)});
    Rational dets = determinant(g.factors[0]) * determinant(g.factors[1]) *
                    determinant(g.factors[2]);
    EXPECT_EQ(delta(mmm(a, g)), dets * dets * delta(a));
  }
  for (int trial = 0; trial < 50; ++trial) {
    auto a = oracles::random_real_tensor(Shape{2, 2, 2}, eng);
    Mat<double> l(2, 2), m(2, 2), n(2, 2);
    for (double& e : l.a) e = oracles::rand_unit(eng);
    for (double& e : m.a) e = oracles::rand_unit(eng);
    for (double& e : n.a) e = oracles::rand_unit(eng);
    MultilinearMap<double> g({l, m, n});
    double dets = determinant(l) * determinant(m) * determinant(n);
    double expected = dets * dets * delta(a);
    EXPECT_NEAR(delta(mmm(a, g)), expected, 1e-9 * std::max(1.0, std::abs(expected)));
  }
}

TEST(Delta, PermutationInvariance) {
  std::mt19937_64 eng(109);
  const std::vector<std::vector<int>> perms = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                               {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (int trial = 0; trial < 100; ++trial) {
    auto a = oracles::random_int_tensor<Rational>(Shape{2, 2, 2}, eng);
    Rational d = delta(a);
    for (const auto& p : perms) EXPECT_EQ(delta(permute_modes(a, p)), d);
  }
}

TEST(Minors, MatchHandWrittenEquations) {
  std::mt19937_64 eng(113);
  for (int trial = 0; trial < 100; ++trial) {
    auto a = oracles::random_int_tensor<Rational>(Shape{2, 2, 2}, eng, -2, 2);
    for (int mode = 0; mode < 3; ++mode) {
      bool all_zero = true;
      for (const Rational& m : oracles::six_minors(a, mode))
        if (m != 0) all_zero = false;
      EXPECT_EQ(minors_vanish(a, mode), all_zero);
      // Vanishing of all six minors is exactly flattening rank <= 1.
      EXPECT_EQ(all_zero, oracles::fiber_rank(a, mode) <= 1);
    }
  }
}

TEST(Classify, CanonicalTableRows) {
  for (OrbitClass c : all_orbit_classes) {
    auto rep = classify222(canonical<Rational>(c));
    EXPECT_EQ(rep.orbit_class, c);
    EXPECT_EQ(sign_of(rep.delta_value), delta_sign_of(c));
    EXPECT_EQ(rep.mlrank, mlrank_of(c));
    EXPECT_EQ(rep.outer_rank, outer_rank_of(c));
    EXPECT_EQ(rep.border_rank, border_rank_of(c));
    EXPECT_FALSE(rep.witness.has_value());
  }
  // The four rank-jumping facts of the table in one place: D3 has full
  // multilinear rank and rank 3 but border rank only 2.
  EXPECT_EQ(outer_rank_of(OrbitClass::D3), 3);
  EXPECT_EQ(border_rank_of(OrbitClass::D3), 2);
  EXPECT_EQ(border_rank_of(OrbitClass::G3), 3);
}

TEST(Classify, HandmadeExamples) {
  // First element of the two-term approximating sequence at n=1 with unit
  // basis vectors: slabs [[0,1],[1,1]] and [[1,1],[1,1]].
  auto a1 = from_slabs(rmat({{0, 1}, {1, 1}}), rmat({{1, 1}, {1, 1}}));
  auto rep = classify222(a1);
  EXPECT_EQ(rep.orbit_class, OrbitClass::G2);
  EXPECT_EQ(rep.delta_value, make_rational(1));

  EXPECT_EQ(classify222(DenseTensor<Rational>(Shape{2, 2, 2})).orbit_class, OrbitClass::D0);
  EXPECT_THROW(classify222(DenseTensor<Rational>(Shape{2, 2})), std::invalid_argument);

  // Scale must not change any decision in float mode.
  auto g3 = to_double_tensor(canonical<Rational>(OrbitClass::G3));
  EXPECT_EQ(classify222(scale(g3, 1e-7)).orbit_class, OrbitClass::G3);
  EXPECT_EQ(classify222(scale(g3, 1e7)).orbit_class, OrbitClass::G3);
}

TEST(Classify, ImpossibleInvariantPatternIsAnError) {
  // Multilinear rank (1,1,2) cannot occur for a real 2x2x2 tensor; the
  // classifier must flag it as a tolerance failure instead of guessing.
  EXPECT_THROW(detail::classify_from_invariants(false, MlRank{1, 1, 2}, 0),
               std::runtime_error);
  // A nonzero hyperdeterminant forces full multilinear rank.
  EXPECT_THROW(detail::classify_from_invariants(false, MlRank{1, 2, 2}, 1),
               std::runtime_error);
}

TEST(Classify, OrbitInvarianceUnderRandomGl) {
  std::mt19937_64 eng(127);
  for (int trial = 0; trial < 60; ++trial) {
    auto a = oracles::random_int_tensor<Rational>(Shape{2, 2, 2}, eng);
    auto g = random_gl_map(eng);
    EXPECT_EQ(classify222(mmm(a, g)).orbit_class, classify222(a).orbit_class);
  }
}

TEST(Classify, RankBoundsFromDeltaSign) {
  std::mt19937_64 eng(131);
  for (int trial = 0; trial < 200; ++trial) {
    auto a = oracles::random_int_tensor<Rational>(Shape{2, 2, 2}, eng);
    auto rep = classify222(a);
    if (sign_of(rep.delta_value) > 0) {
      EXPECT_LE(rep.outer_rank, 2);
    }
    if (rep.outer_rank <= 2) {
      EXPECT_GE(sign_of(rep.delta_value), 0);
    }
  }
}

TEST(Reduce, IdentityWitnessOnCanonicals) {
  for (OrbitClass c : all_orbit_classes) {
    auto rep = reduce222(canonical<Rational>(c));
    EXPECT_EQ(rep.orbit_class, c);
    ASSERT_TRUE(rep.witness.has_value());
    for (const auto& f : rep.witness->factors) EXPECT_EQ(f, Mat<Rational>::identity(2));
  }
}

TEST(Reduce, WitnessReconstructsExactly) {
  std::mt19937_64 eng(137);
  for (OrbitClass c : all_orbit_classes) {
    for (int trial = 0; trial < 10; ++trial) {
      auto g = random_gl_map(eng);
      auto a = mmm(canonical<Rational>(c), g);
      OrbitReport<Rational> rep;
      try {
        rep = reduce222(a);
      } catch (const std::runtime_error&) {
        // Exact reduction of G-class tensors can hit an irrational pencil
        // eigenvalue; that refusal is correct and covered separately.
        ASSERT_TRUE(c == OrbitClass::G2 || c == OrbitClass::G3);
        continue;
      }
      EXPECT_EQ(rep.orbit_class, c);
      ASSERT_TRUE(rep.witness.has_value());
      EXPECT_TRUE(rep.witness->invertible());
      EXPECT_EQ(mmm(canonical<Rational>(c), *rep.witness), a);
    }
  }
}

TEST(Reduce, FixedD3ConjugationReconstructs) {
  MultilinearMap<Rational> g(
      {rmat({{1, 2}, {0, 1}}), rmat({{3, -1}, {1, 1}}), rmat({{2, 1}, {1, 1}})});
  auto a = mmm(canonical<Rational>(OrbitClass::D3), g);
  auto rep = reduce222(a);
  EXPECT_EQ(rep.orbit_class, OrbitClass::D3);
  ASSERT_TRUE(rep.witness.has_value());
  EXPECT_EQ(mmm(canonical<Rational>(OrbitClass::D3), *rep.witness), a);
}

TEST(Reduce, ComplexEigenvalueSlabsAreG3) {
  for (long b = 1; b <= 3; ++b) {
    auto a = from_slabs(rmat({{1, 0}, {0, 1}}), rmat({{0, -b}, {b, 0}}));
    auto rep = reduce222(a);
    EXPECT_EQ(rep.orbit_class, OrbitClass::G3);
    ASSERT_TRUE(rep.witness.has_value());
    EXPECT_EQ(mmm(canonical<Rational>(OrbitClass::G3), *rep.witness), a);
  }
}

TEST(Reduce, IrrationalDiscriminantRefusesExactly) {
  // Pencil slab C = [[0,1],[2,0]] has eigenvalues ±sqrt(2): a rational witness
  // cannot exist, and exact mode must say so rather than approximate.
  auto a = from_slabs(rmat({{1, 0}, {0, 1}}), rmat({{0, 1}, {2, 0}}));
  EXPECT_THROW(reduce222(a), std::runtime_error);
  // The classifier still handles it: delta = 8 > 0 means G2.
  EXPECT_EQ(classify222(a).orbit_class, OrbitClass::G2);
  // Float mode reduces it fine.
  auto repf = reduce222(to_double_tensor(a));
  EXPECT_EQ(repf.orbit_class, OrbitClass::G2);
  ASSERT_TRUE(repf.witness.has_value());
  auto rebuilt = mmm(to_double_tensor(canonical<Rational>(OrbitClass::G2)), *repf.witness);
  EXPECT_LE(frobenius_norm(rebuilt - to_double_tensor(a)),
            1e-9 * frobenius_norm(to_double_tensor(a)));
}

TEST(Reduce, FloatWitnessSoundness) {
  std::mt19937_64 eng(139);
  int checked = 0;
  for (OrbitClass c : all_orbit_classes) {
    for (int trial = 0; trial < 8; ++trial) {
      auto g = random_gl_map(eng);
      auto a = to_double_tensor(mmm(canonical<Rational>(c), g));
      auto rep = reduce222(a);
      EXPECT_EQ(rep.orbit_class, c);
      ASSERT_TRUE(rep.witness.has_value());
      auto rebuilt = mmm(to_double_tensor(canonical<Rational>(c)), *rep.witness);
      double scale_norm = std::max(1.0, frobenius_norm(a));
      EXPECT_LE(frobenius_norm(rebuilt - a), 1e-9 * scale_norm);
      ++checked;
    }
  }
  EXPECT_EQ(checked, 64);
}

TEST(Reduce, PivotsToSecondSlabWhenFirstIsSingular) {
  auto a = from_slabs(rmat({{0, 0}, {0, 0}}), rmat({{1, 0}, {0, 1}}));
  auto rep = reduce222(a);
  EXPECT_EQ(rep.orbit_class, OrbitClass::D2);
  ASSERT_TRUE(rep.witness.has_value());
  EXPECT_EQ(mmm(canonical<Rational>(OrbitClass::D2), *rep.witness), a);
}

TEST(DeltaExtended, AgreesWithDeltaOnEmbeddedTensors) {
  std::mt19937_64 eng(149);
  for (int trial = 0; trial < 30; ++trial) {
    auto a = oracles::random_int_tensor<Rational>(Shape{2, 2, 2}, eng);
    EXPECT_EQ(delta_extended(a), delta(a));
    auto embedded = embed_pad(a, Shape{3, 3, 3});
    EXPECT_EQ(delta_extended(embedded), delta(a));
  }
}

TEST(DeltaExtended, InvariantUnderRationalRotations) {
  std::mt19937_64 eng(151);
  MultilinearMap<Rational> rot({rational_rotation(0, 3, 4, 5), rational_rotation(1, 5, 12, 13),
                                rational_rotation(2, 8, 15, 17)});
  for (int trial = 0; trial < 20; ++trial) {
    auto a = oracles::random_int_tensor<Rational>(Shape{2, 2, 2}, eng);
    auto rotated = mmm(embed_pad(a, Shape{3, 3, 3}), rot);
    EXPECT_EQ(delta_extended(rotated), delta(a));
  }
}

TEST(DeltaExtended, FloatAgreesAfterRandomRotation) {
  std::mt19937_64 eng(157);
  for (int trial = 0; trial < 20; ++trial) {
    auto a = to_double_tensor(oracles::random_int_tensor<Rational>(Shape{2, 2, 2}, eng));
    // Random orthogonal factors from QR of a Gaussian matrix.
    MultilinearMap<double> rot;
    for (int m = 0; m < 3; ++m) {
      Mat<double> g(3, 3);
      for (double& e : g.a) e = oracles::rand_unit(eng);
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(to_eigen(g));
      rot.factors.push_back(from_eigen(Eigen::MatrixXd(qr.householderQ())));
    }
    auto rotated = mmm(embed_pad(a, Shape{3, 3, 3}), rot);
    double expected = delta(a);
    EXPECT_NEAR(delta_extended(rotated), expected,
                1e-9 * std::max(1.0, std::abs(expected)));
  }
}

TEST(DeltaExtended, RejectsLargeMultilinearRank) {
  // A 3x3x3 diagonal of size 3 has multilinear rank (3,3,3).
  DenseTensor<Rational> diag(Shape{3, 3, 3});
  for (Index i = 0; i < 3; ++i) diag.at({i, i, i}) = make_rational(1);
  EXPECT_THROW(delta_extended(diag), std::invalid_argument);
  EXPECT_THROW(delta_extended(DenseTensor<Rational>(Shape{2, 2})), std::invalid_argument);
}

TEST(DeltaExtended, HandlesThinModes) {
  // A 1x2x2 tensor embeds into 2x2x2 with a zero slab; delta is then 0 and
  // the class is decided by the remaining invariants.
  DenseTensor<Rational> thin(Shape{1, 2, 2});
  thin.at({0, 0, 0}) = make_rational(1);
  thin.at({0, 1, 1}) = make_rational(1);
  EXPECT_EQ(delta_extended(thin), make_rational(0));
}

TEST(ClassifyGeneral, EmbeddedCanonicalsKeepTheirClass) {
  MultilinearMap<Rational> rot({rational_rotation(1, 3, 4, 5), rational_rotation(0, 5, 12, 13),
                                rational_rotation(2, 3, 4, 5)});
  for (OrbitClass c : all_orbit_classes) {
    auto embedded = mmm(embed_pad(canonical<Rational>(c), Shape{3, 3, 3}), rot);
    auto rep = classify_general(embedded);
    ASSERT_TRUE(rep.has_value());
    EXPECT_EQ(rep->orbit_class, c);
    EXPECT_EQ(rep->outer_rank, outer_rank_of(c));
    EXPECT_EQ(rep->border_rank, border_rank_of(c));
  }
}

TEST(ClassifyGeneral, UnclassifiableAndDegenerateShapes) {
  DenseTensor<Rational> diag(Shape{3, 3, 3});
  for (Index i = 0; i < 3; ++i) diag.at({i, i, i}) = make_rational(1);
  EXPECT_FALSE(classify_general(diag).has_value());

  EXPECT_EQ(classify_general(DenseTensor<Rational>(Shape{4, 5, 6}))->orbit_class,
            OrbitClass::D0);
  EXPECT_THROW(classify_general(DenseTensor<Rational>(Shape{2, 2})), std::invalid_argument);

  // Rank-1 tensor in a big ambient space.
  Vec<Rational> u{make_rational(1), make_rational(2), make_rational(0)};
  Vec<Rational> v{make_rational(1), make_rational(-1), make_rational(1)};
  Vec<Rational> w{make_rational(2), make_rational(1), make_rational(1)};
  auto rep = classify_general(outer_product<Rational>({u, v, w}));
  ASSERT_TRUE(rep.has_value());
  EXPECT_EQ(rep->orbit_class, OrbitClass::D1);
}

TEST(OrbitTable, MarkdownHasAllRows) {
  std::string table = orbit_table_markdown();
  for (OrbitClass c : all_orbit_classes)
    EXPECT_NE(table.find(std::string("| ") + to_string(c) + " |"), std::string::npos);
  EXPECT_NE(table.find("| D3 | 0 | (2,2,2) | 3 | 2 |"), std::string::npos);
  EXPECT_NE(table.find("| G3 | - | (2,2,2) | 3 | 3 |"), std::string::npos);
}
