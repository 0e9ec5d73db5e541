#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "tightbell/tightbell.hpp"

using namespace tightbell;

namespace {

std::vector<std::vector<std::int64_t>> random_points(std::mt19937_64& rng, std::size_t count, std::size_t dim) {
  std::uniform_int_distribution<std::int64_t> v(-3, 3);
  std::vector<std::vector<std::int64_t>> pts(count, std::vector<std::int64_t>(dim));
  for (auto& p : pts)
    for (auto& e : p) e = v(rng);
  return pts;
}

FaceConfig classical_only() {
  FaceConfig c;
  c.solve_quantum = false;
  return c;
}

}  // namespace

TEST(Embed, Examples) {
  const auto e = embed_vertex({{1, 1}, {1, 1}});
  EXPECT_EQ(e.coords, (std::vector<std::int64_t>{1, 1, 1, 1, 1, 1, 1, 1}));
  const auto f = embed_vertex({{1, -1}, {1, 1}});
  EXPECT_EQ(f.correlation_coords(), (std::vector<std::int64_t>{1, 1, -1, -1}));
  const DeterministicStrategy s{{1, -1, 1}, {-1, 1}};
  EXPECT_EQ(embed_vertex(s).strategy(), s);
  EXPECT_THROW(embed_vertex({{0}, {1}}), Error);
}

TEST(AffineDimension, Examples) {
  EXPECT_EQ(affine_dimension_exact({{1, 2, 3}}), 0u);
  EXPECT_EQ(affine_dimension_exact({{1, 1}, {1, -1}, {-1, 1}}), 2u);
  std::vector<std::vector<std::int64_t>> pts;
  for (const auto& v : optimal_vertices(make_identity(1)).vertices) pts.push_back(embed_vertex(v).coords);
  EXPECT_EQ(affine_dimension_exact(pts), 3u);
  try {
    affine_dimension_exact({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::empty_input);
  }
}

TEST(AffineDimension, MatchesRationalOracle) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 60; ++i) {
    const auto pts = random_points(rng, 1 + i % 9, 1 + i % 7);
    EXPECT_EQ(affine_dimension_exact(pts), oracle::affine_dimension(pts));
  }
}

TEST(AffineDimension, PermutationAndBasePointInvariant) {
  std::mt19937_64 rng(32);
  for (int i = 0; i < 40; ++i) {
    auto pts = random_points(rng, 6, 8);
    // Force a dependency so the rank is not simply full.
    for (std::size_t k = 0; k < 8; ++k) pts[5][k] = 2 * pts[1][k] - pts[0][k];
    const std::size_t d = affine_dimension_exact(pts);
    std::shuffle(pts.begin(), pts.end(), rng);
    EXPECT_EQ(affine_dimension_exact(pts), d);
    std::rotate(pts.begin(), pts.begin() + 1, pts.end());
    EXPECT_EQ(affine_dimension_exact(pts), d);
  }
}

TEST(AffineDimension, LargeEntriesFallBackToBigIntegers) {
  const std::int64_t big = std::int64_t{1} << 40;
  const std::vector<std::vector<std::int64_t>> pts{{0, 0, 0}, {big, 1, 3}, {7, big, 1}, {big + 7, big + 1, 4}};
  EXPECT_EQ(affine_dimension_exact(pts), oracle::affine_dimension(pts));
  EXPECT_EQ(affine_dimension_exact(pts), 2u);
}

TEST(Bounds, Theorem1) {
  EXPECT_EQ(theorem1_dim_bound(2, 2), 3u);
  EXPECT_EQ(theorem1_dim_bound(1, 1), 1u);
  EXPECT_EQ(theorem1_dim_bound(4, 4), 10u);
  EXPECT_EQ(theorem1_dim_bound(3, 7), 6u);
}

TEST(Bounds, Theorem2) {
  EXPECT_EQ(theorem2_codim_bound(3, 3, 2, 2).full, 5u);
  EXPECT_EQ(theorem2_codim_bound(2, 2, 2, 2).full, 5u);
  EXPECT_EQ(theorem2_codim_bound(1, 1, 1, 1).correlation, 1u);
  EXPECT_THROW(theorem2_codim_bound(2, 2, 3, 3), Error);
  EXPECT_THROW(theorem2_codim_bound(2, 2, 0, 1), Error);
  EXPECT_EQ(exhaustive_codim_bound(4, 4), 4u + 16u - 6u);
}

TEST(FaceReport, Chsh) {
  const auto r = face_report(make_chsh());
  EXPECT_EQ(r.dim_full, 7u);
  EXPECT_EQ(r.D, 8u);
  ASSERT_TRUE(r.is_facet_full);
  EXPECT_TRUE(*r.is_facet_full);
  EXPECT_EQ(r.dim_corr, 3u);
  EXPECT_EQ(r.classification, Classification::advantage);
}

TEST(FaceReport, IdentityEquality) {
  const auto r = face_report(make_identity(2));
  EXPECT_EQ(r.dim_full, 10u);
  EXPECT_EQ(r.D, 24u);
  EXPECT_EQ(r.codim_full, 14u);
  EXPECT_EQ(r.dim_corr, 6u);
  EXPECT_EQ(r.dim_full, r.bound_thm1_dim);
  EXPECT_EQ(r.classification, Classification::no_advantage);
  ASSERT_TRUE(r.is_facet_full);
  EXPECT_FALSE(*r.is_facet_full);
  const auto one = face_report(make_identity(1));
  EXPECT_EQ(one.dim_full, 3u);
  EXPECT_EQ(one.dim_corr, 1u);
}

TEST(FaceReport, AppendixD) {
  const auto r = face_report(make_appendix_d(2));
  EXPECT_EQ(r.dim_corr, 3u);
  EXPECT_EQ(r.codim_corr, 13u);
  ASSERT_TRUE(r.is_facet_corr);
  EXPECT_FALSE(*r.is_facet_corr);
}

TEST(FaceReport, MatchesOracleOnRandomGames) {
  std::mt19937_64 rng(33);
  std::uniform_int_distribution<std::size_t> side(1, 4);
  for (int i = 0; i < 40; ++i) {
    const XorGame g = oracle::random_game(rng, side(rng), side(rng));
    const auto r = face_report(g, classical_only());
    const auto pairs = oracle::brute_optimal_pairs(g);
    std::vector<std::vector<std::int64_t>> full, corr;
    for (const auto& p : pairs) {
      full.push_back(oracle::embed(p, false));
      corr.push_back(oracle::embed(p, true));
    }
    EXPECT_EQ(r.num_vertices, pairs.size());
    EXPECT_EQ(r.dim_full, oracle::affine_dimension(full)) << "game " << i;
    EXPECT_EQ(r.dim_corr, oracle::affine_dimension(corr)) << "game " << i;
  }
}

TEST(FaceReport, PaddingKeepsCodimensionAboveTheorem2) {
  const Rational a(1, 4);
  const XorGame padded = build_game(RationalMatrix::from_rows({{a, 0, a}, {0, 0, 0}, {a, 0, a}}),
                                    BitMatrix::from_rows({{0, 0, 0}, {0, 0, 0}, {0, 0, 0}}));
  const auto r = face_report(padded);
  EXPECT_EQ(r.reduced_dims, (std::pair<std::size_t, std::size_t>{2, 2}));
  EXPECT_EQ(r.provenance, Provenance::measured);
  EXPECT_GE(r.codim_full, r.bound_thm2_codim.full);
  EXPECT_GE(r.codim_corr, r.bound_thm2_codim.correlation);
}

TEST(FaceReport, NoAdvantageRespectsTheorem1) {
  std::mt19937_64 rng(34);
  std::size_t checked = 0;
  for (int i = 0; i < 60 && checked < 15; ++i) {
    const XorGame g = oracle::random_exhaustive_game(rng, 2 + i % 3, 2 + i % 4);
    const auto r = face_report(g);
    if (r.classification != Classification::no_advantage) continue;
    ++checked;
    EXPECT_LE(r.dim_full, r.bound_thm1_dim);
    EXPECT_GE(r.codim_full, r.bound_exhaustive_codim);
    EXPECT_FALSE(*r.is_facet_full);
  }
  EXPECT_GT(checked, 0u);
}

TEST(FaceReport, CapForcesBoundProvenance) {
  const Rational a(1, 4);
  RationalMatrix q(2, 20);
  q(0, 0) = q(0, 1) = q(1, 0) = q(1, 1) = a;
  BitMatrix f(2, 20, 0);
  f(1, 1) = 1;
  FaceConfig cfg = classical_only();
  cfg.classical.vertex_cap = 1000;
  const auto r = face_report(build_game(q, f), cfg);
  EXPECT_EQ(r.provenance, Provenance::theorem2_bound);
  EXPECT_FALSE(r.is_facet_full);
  EXPECT_EQ(to_string(r.provenance), "bound via Theorem 2");
}

TEST(TrivialFacet, Examples) {
  auto r = trivial_facet_check(2, 2, 0, 0, 1);
  EXPECT_EQ(r.dim, 3u);
  EXPECT_TRUE(r.is_facet);
  r = trivial_facet_check(1, 1, 0, 0, -1);
  EXPECT_EQ(r.dim, 0u);
  EXPECT_TRUE(r.is_facet);
  r = trivial_facet_check(2, 3, 1, 2, -1);
  EXPECT_EQ(r.dim, 5u);
  EXPECT_TRUE(r.is_facet);
  EXPECT_THROW(trivial_facet_check(2, 2, 2, 0, 1), Error);
  EXPECT_THROW(trivial_facet_check(10, 10, 0, 0, 1), Error);
}

TEST(TrivialFacet, AllSmallSizes) {
  for (std::size_t ma = 1; ma <= 3; ++ma)
    for (std::size_t mb = 1; mb <= 3; ++mb)
      for (std::size_t x = 0; x < ma; ++x)
        for (std::size_t y = 0; y < mb; ++y)
          for (int s : {1, -1}) EXPECT_EQ(trivial_facet_check(ma, mb, x, y, s).dim, ma * mb - 1);
}

TEST(Probe, Examples) {
  const auto id = quantum_face_probe(make_identity(1));
  EXPECT_EQ(id.thm3_bound, 1u);
  EXPECT_LE(id.dim_lower_bound, id.thm3_bound);
  EXPECT_TRUE(id.bound_respected);

  const auto nlc = quantum_face_probe(make_named("nlc-and", 2));
  EXPECT_EQ(nlc.thm3_bound, 6u);
  EXPECT_LE(nlc.dim_lower_bound, 6u);

  const auto single = quantum_face_probe(make_single_entry());
  EXPECT_EQ(single.thm3_bound, 0u);
  EXPECT_EQ(single.dim_lower_bound, 0u);

  EXPECT_THROW(quantum_face_probe(make_chsh()), Error);
}
