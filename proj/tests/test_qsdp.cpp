#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tightbell/tightbell.hpp"

using namespace tightbell;

namespace {

constexpr double kGapTol = 1e-7;
constexpr double kFeasTol = 1e-8;

void expect_certified(const QuantumBiasResult& r) {
  EXPECT_TRUE(r.certified());
  EXPECT_LE(r.gap, kGapTol);
  EXPECT_GE(r.cert.min_eig, -kFeasTol);
}

// Smallest eigenvalue of diag(t) - Phi~ recomputed from scratch.
double independent_min_eig(const XorGame& g, const Eigen::VectorXd& t) {
  const std::size_t n = g.m_a() + g.m_b();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  const auto phi = game_matrix(g);
  for (std::size_t x = 0; x < g.m_a(); ++x)
    for (std::size_t y = 0; y < g.m_b(); ++y) {
      m(x, g.m_a() + y) = -0.5 * to_double(phi(x, y));
      m(g.m_a() + y, x) = m(x, g.m_a() + y);
    }
  for (std::size_t i = 0; i < n; ++i) m(i, i) += t(i);
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues().minCoeff();
}

}  // namespace

TEST(PhiTilde, Examples) {
  const auto single = build_phi_tilde(make_single_entry()).dense();
  EXPECT_EQ(single(0, 1), 0.5);
  EXPECT_EQ(single(1, 0), 0.5);
  EXPECT_EQ(single(0, 0), 0.0);

  const auto chsh = build_phi_tilde(make_chsh()).dense();
  EXPECT_EQ(chsh(0, 2), 0.125);
  EXPECT_EQ(chsh(1, 3), -0.125);
  EXPECT_EQ(chsh(3, 1), -0.125);
  EXPECT_EQ(chsh(0, 1), 0.0);

  const auto id = build_phi_tilde(make_identity(1)).dense();
  Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(id).eigenvalues();
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(ev(i)), 0.25, 1e-15);
}

TEST(Solver, Chsh) {
  SolverConfig cfg;
  cfg.seed = 42;
  const auto r = solve_quantum_bias(make_chsh(), cfg);
  expect_certified(r);
  EXPECT_NEAR(r.xi_q, std::sqrt(2.0) / 2, 1e-6);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(r.cert.t(i), std::sqrt(2.0) / 8, 1e-6);
  EXPECT_EQ(r.classification, Classification::advantage);
  ASSERT_TRUE(r.xi_c);
  EXPECT_EQ(*r.xi_c, Rational(1, 2));
}

TEST(Solver, AnalyticChshDualIsFeasible) {
  const Eigen::VectorXd t = Eigen::VectorXd::Constant(4, std::sqrt(2.0) / 8);
  EXPECT_NEAR(independent_min_eig(make_chsh(), t), 0.0, 1e-15);
}

TEST(Solver, IdentityHasNoAdvantage) {
  for (unsigned n = 1; n <= 3; ++n) {
    const auto r = solve_quantum_bias(make_identity(n));
    expect_certified(r);
    EXPECT_NEAR(r.xi_q, 1.0, 1e-8);
    EXPECT_LE(std::abs(r.gap), 1e-8);
    EXPECT_EQ(r.classification, Classification::no_advantage);
  }
}

TEST(Solver, NlcAnd) {
  const auto r = solve_quantum_bias(make_named("nlc-and", 2));
  expect_certified(r);
  EXPECT_NEAR(r.xi_q, 0.5, 1e-6);
  EXPECT_EQ(r.classification, Classification::no_advantage);
}

TEST(Solver, CertificateIsIndependentlyFeasible) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<std::size_t> side(1, 9);
  for (int i = 0; i < 25; ++i) {
    const XorGame g = oracle::random_exhaustive_game(rng, side(rng), side(rng));
    const auto r = solve_quantum_bias(g);
    expect_certified(r);
    EXPECT_GE(independent_min_eig(g, r.cert.t), -kFeasTol);
    EXPECT_NEAR(r.cert.t.sum(), r.dual_value, 1e-12);
    // Weak duality: any feasible primal value is at most the dual value.
    EXPECT_LE(r.xi_q, r.dual_value + kFeasTol);
    EXPECT_GE(r.xi_q, to_double(oracle::brute_classical_bias(g)) - 1e-9);
    EXPECT_LE(r.xi_q, 1.0 + 1e-8);
  }
}

TEST(Solver, UnitNormsAndGramStructure) {
  const auto r = solve_quantum_bias(make_chsh());
  const Eigen::MatrixXd G = r.gram.gram();
  for (Eigen::Index i = 0; i < G.rows(); ++i) EXPECT_NEAR(G(i, i), 1.0, 1e-12);
  EXPECT_LE(r.stalls, r.sweeps * 4);
  const Eigen::MatrixXd C = r.gram.C();
  double xi = 0.0;
  const auto phi = game_matrix_double(make_chsh());
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) xi += phi(x, y) * C(x, y);
  EXPECT_NEAR(xi, r.xi_q, 1e-12);
}

TEST(Solver, MonotoneTrace) {
  std::mt19937_64 rng(22);
  SolverConfig cfg;
  cfg.record_trace = true;
  cfg.restarts = 1;
  for (int i = 0; i < 10; ++i) {
    const auto r = solve_quantum_bias(oracle::random_exhaustive_game(rng, 6, 7), cfg);
    ASSERT_FALSE(r.trace.empty());
    for (std::size_t k = 1; k < r.trace.size(); ++k) EXPECT_GE(r.trace[k], r.trace[k - 1] - 1e-14);
  }
}

TEST(Solver, Deterministic) {
  std::mt19937_64 rng(23);
  const XorGame g = oracle::random_exhaustive_game(rng, 10, 12);
  SolverConfig a, b;
  a.seed = b.seed = 7;
  a.threads = 1;
  b.threads = 5;
  const auto r1 = solve_quantum_bias(g, a);
  const auto r2 = solve_quantum_bias(g, b);
  EXPECT_EQ(r1.xi_q, r2.xi_q);
  EXPECT_EQ(r1.gap, r2.gap);
  EXPECT_EQ(r1.restart, r2.restart);
  EXPECT_TRUE(r1.cert.t == r2.cert.t);
}

TEST(Solver, RejectsBadParameters) {
  SolverConfig cfg;
  cfg.restarts = 0;
  EXPECT_THROW(solve_quantum_bias(make_chsh(), cfg), Error);
}

TEST(Solver, NotConvergedIsReportedNotFabricated) {
  SolverConfig cfg;
  cfg.max_iters = 1;
  cfg.restarts = 1;
  std::mt19937_64 rng(24);
  const auto r = solve_quantum_bias(oracle::random_exhaustive_game(rng, 8, 8), cfg);
  if (!r.certified()) EXPECT_EQ(r.classification, Classification::undecided);
}

TEST(ExtractF, Identity) {
  for (unsigned n = 1; n <= 3; ++n) {
    const XorGame g = make_identity(n);
    const auto r = solve_quantum_bias(g);
    const Eigen::MatrixXd F = extract_F(r.cert, g);
    const std::size_t m = std::size_t{1} << n;
    EXPECT_LE((F - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff(), 1e-7);
  }
}

TEST(ExtractF, AppendixD) {
  const XorGame g = make_appendix_d(2);
  const auto r = solve_quantum_bias(g);
  expect_certified(r);
  const Eigen::MatrixXd expected = Eigen::MatrixXd::Identity(4, 4) - 0.5 * Eigen::MatrixXd::Ones(4, 4);
  EXPECT_LE((extract_F(r.cert, g) - expected).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(ExtractF, SingleEntrySign) {
  for (std::uint8_t f : {0, 1}) {
    const XorGame g = build_game(RationalMatrix(1, 1, Rational(1)), BitMatrix(1, 1, f));
    const auto r = solve_quantum_bias(g);
    EXPECT_NEAR(extract_F(r.cert, g)(0, 0), f ? -1.0 : 1.0, 1e-9);
  }
}

TEST(ExtractF, SingularLambda) {
  DualCertificate cert;
  cert.t = Eigen::VectorXd::Zero(2);
  try {
    extract_F(cert, make_single_entry());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::singular_lambda);
  }
}

TEST(Slackness, Classical) {
  const XorGame id = make_identity(1);
  const auto r = solve_quantum_bias(id);
  EXPECT_LE(slackness_residual_classical(r.cert, id, {{1, 1}, {1, 1}}), 1e-8);

  const XorGame ad = make_appendix_d(2);
  const auto ra = solve_quantum_bias(ad);
  for (const auto& v : optimal_vertices(ad).vertices) EXPECT_LE(slackness_residual_classical(ra.cert, ad, v), 1e-8);

  const XorGame chsh = make_chsh();
  const auto rc = solve_quantum_bias(chsh);
  for (const auto& v : optimal_vertices(chsh).vertices) EXPECT_GE(slackness_residual_classical(rc.cert, chsh, v), 0.05);
}

TEST(Slackness, Quantum) {
  struct Case {
    XorGame g;
    double tol;
  };
  const std::vector<Case> cases{{make_identity(2), 1e-6}, {make_named("nlc-and", 2), 1e-5}, {make_appendix_d(3), 1e-5}};
  for (const auto& c : cases) {
    const auto r = solve_quantum_bias(c.g);
    expect_certified(r);
    const auto F = extract_F(r.cert, c.g);
    const auto rep = quantum_slackness_check(r, F, c.tol);
    EXPECT_TRUE(rep.pass) << rep.max_residual;
  }
  const auto r = solve_quantum_bias(make_chsh());
  EXPECT_THROW(quantum_slackness_check(r, Eigen::MatrixXd::Identity(2, 2), 1e-5), Error);
}

TEST(Refine, FromCertifiedStartStaysOptimal) {
  const XorGame g = make_identity(2);
  const auto r = solve_quantum_bias(g);
  const auto again = refine_quantum_solution(g, r.gram.vectors, SolverConfig{}, r.xi_c);
  expect_certified(again);
  EXPECT_NEAR(again.xi_q, r.xi_q, 1e-9);
}
