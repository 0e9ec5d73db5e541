#pragma once

// Quantum (Tsirelson) bias of an XOR game via the unit-diagonal SDP
//
//   max tr(Q Phi~)  s.t.  diag(Q) = 1, Q >= 0,   Phi~ = 1/2 [[0, Phi], [Phi^T, 0]]
//
// solved on the factorization Q = V V^T with unit rows. Each row update
// v_i <- w_i / |w_i|, w_i = sum_j Phi~_ij v_j, is the exact maximizer with the
// other rows fixed. Because Phi~ is bipartite, all Alice rows can be updated
// at once from Bob's rows and vice versa. The dual candidate t_i = |w_i| comes
// from stationarity; it is made exactly feasible by shifting with the
// smallest eigenvalue of diag(t) - Phi~, and the resulting duality gap is the
// certificate for the reported value.

#include <Eigen/Dense>

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "tightbell/classical.hpp"
#include "tightbell/error.hpp"
#include "tightbell/game.hpp"
#include "tightbell/parallel.hpp"
#include "tightbell/rational.hpp"

namespace tightbell {

struct SolverConfig {
  std::size_t rank = 0;  // 0: m_a + m_b
  unsigned restarts = 8;
  std::uint64_t seed = 0;
  std::size_t max_iters = 200000;  // sweeps per restart
  double gap_tol = 1e-7;
  double feas_tol = 1e-8;
  double adv_tol = 1e-6;
  double stationarity_tol = 1e-15;
  unsigned threads = 0;                // 0: worker_threads()
  unsigned classical_enum_bits = 20;   // classify only when the classical side is enumerable
  bool record_trace = false;
};

enum class Classification { advantage, no_advantage, undecided };
enum class SolveStatus { certified, not_converged, dual_infeasible };

inline std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::advantage: return "advantage";
    case Classification::no_advantage: return "no_advantage";
    case Classification::undecided: return "undecided";
  }
  return "undecided";
}

inline std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::certified: return "certified";
    case SolveStatus::not_converged: return "NotConverged";
    case SolveStatus::dual_infeasible: return "DualInfeasible";
  }
  return "NotConverged";
}

/// Phi~ in exact form.
struct PhiTilde {
  RationalMatrix matrix;
  std::size_t m_a = 0;
  std::size_t m_b = 0;

  Eigen::MatrixXd dense() const {
    Eigen::MatrixXd out(matrix.rows(), matrix.cols());
    for (std::size_t i = 0; i < matrix.rows(); ++i)
      for (std::size_t j = 0; j < matrix.cols(); ++j) out(i, j) = to_double(matrix(i, j));
    return out;
  }
};

inline PhiTilde build_phi_tilde(const XorGame& g) {
  const RationalMatrix phi = game_matrix(g);
  const std::size_t n = g.m_a() + g.m_b();
  PhiTilde pt{RationalMatrix(n, n), g.m_a(), g.m_b()};
  for (std::size_t x = 0; x < g.m_a(); ++x) {
    for (std::size_t y = 0; y < g.m_b(); ++y) {
      const Rational half = phi(x, y) / 2;
      pt.matrix(x, g.m_a() + y) = half;
      pt.matrix(g.m_a() + y, x) = half;
    }
  }
  return pt;
}

/// Unit vectors u_i (rows of `vectors`): Alice's first, then Bob's.
struct GramSolution {
  Eigen::MatrixXd vectors;
  std::size_t m_a = 0;
  std::size_t m_b = 0;

  Eigen::MatrixXd alice() const { return vectors.topRows(m_a); }
  Eigen::MatrixXd bob() const { return vectors.bottomRows(m_b); }
  Eigen::MatrixXd gram() const { return vectors * vectors.transpose(); }
  Eigen::MatrixXd R() const { return alice() * alice().transpose(); }
  Eigen::MatrixXd C() const { return alice() * bob().transpose(); }
  Eigen::MatrixXd S() const { return bob() * bob().transpose(); }
};

struct DualCertificate {
  Eigen::VectorXd t;
  Eigen::VectorXd sigma;        // 2 t on Alice's block
  Eigen::VectorXd lambda_diag;  // 2 t on Bob's block
  double min_eig = 0.0;         // smallest eigenvalue of diag(t) - Phi~
  double dual_value = 0.0;      // sum_i t_i
  double shift = 0.0;           // uniform increase applied to the stationarity duals
};

struct QuantumBiasResult {
  double xi_q = 0.0;
  double dual_value = 0.0;
  double gap = 0.0;
  GramSolution gram;
  DualCertificate cert;
  Classification classification = Classification::undecided;
  SolveStatus status = SolveStatus::not_converged;
  std::optional<Rational> xi_c;
  unsigned restart = 0;
  std::size_t sweeps = 0;
  std::size_t stalls = 0;
  std::vector<double> trace;  // primal value after each sweep when requested

  bool certified() const { return status == SolveStatus::certified; }
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline Eigen::MatrixXd random_unit_rows(std::size_t n, std::size_t r, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd v(n, r);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < r; ++k) v(i, k) = normal(rng);
    v.row(i).normalize();
  }
  return v;
}

inline Eigen::MatrixXd to_eigen(const Matrix<double>& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  return out;
}

/// Sets each row of `target` to the normalized row of `w`; rows with w = 0
/// are left unchanged and counted.
inline std::size_t normalize_rows_into(const Eigen::MatrixXd& w, Eigen::MatrixXd& target, Eigen::VectorXd& norms) {
  std::size_t stalls = 0;
  norms.resize(w.rows());
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    const double n = w.row(i).norm();
    norms(i) = n;
    if (n > std::numeric_limits<double>::min())
      target.row(i) = w.row(i) / n;
    else
      ++stalls;
  }
  return stalls;
}

struct AscentState {
  Eigen::MatrixXd alice;
  Eigen::MatrixXd bob;
  Eigen::VectorXd t_alice;
  Eigen::VectorXd t_bob;
  double primal = -std::numeric_limits<double>::infinity();
  double stationarity_gap = std::numeric_limits<double>::infinity();
  std::size_t sweeps = 0;
  std::size_t stalls = 0;
  std::vector<double> trace;
};

/// Block-coordinate ascent until the stationarity gap sum(t) - primal falls
/// below `tol` or the sweep budget runs out.
inline void ascend(const Eigen::MatrixXd& half_phi, AscentState& s, std::size_t max_sweeps, double tol,
                   bool record) {
  Eigen::MatrixXd wa = half_phi * s.bob;
  Eigen::VectorXd scratch;
  std::size_t flat = 0;
  for (std::size_t it = 0; it < max_sweeps; ++it) {
    s.stalls += normalize_rows_into(wa, s.alice, scratch);
    const Eigen::MatrixXd wb = half_phi.transpose() * s.alice;
    s.stalls += normalize_rows_into(wb, s.bob, s.t_bob);
    wa = half_phi * s.bob;
    s.t_alice = wa.rowwise().norm();
    const double primal = 2.0 * s.alice.cwiseProduct(wa).sum();
    // Each half-sweep is an exact maximization, so the objective cannot drop
    // beyond rounding.
    assert(primal >= s.primal - 1e-12 * std::max(1.0, std::abs(primal)));
    const double gap = s.t_alice.sum() + s.t_bob.sum() - primal;
    flat = (primal <= s.primal + 1e-17 && gap >= s.stationarity_gap) ? flat + 1 : 0;
    s.primal = primal;
    s.stationarity_gap = gap;
    ++s.sweeps;
    if (record) s.trace.push_back(primal);
    if (gap <= tol || flat >= 2000) break;
  }
}

inline double min_eigenvalue(const Eigen::VectorXd& t, const Eigen::MatrixXd& phi_tilde) {
  Eigen::MatrixXd m = -phi_tilde;
  m.diagonal() += t;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

inline Classification classify(double xi_q, double gap, const std::optional<Rational>& xi_c, SolveStatus status,
                               const SolverConfig& cfg) {
  if (status != SolveStatus::certified || !xi_c) return Classification::undecided;
  const double c = to_double(*xi_c);
  if (xi_q - c > cfg.adv_tol) return Classification::advantage;
  if (gap <= cfg.gap_tol && std::abs(xi_q - c) <= cfg.adv_tol) return Classification::no_advantage;
  return Classification::undecided;
}

inline QuantumBiasResult finish(const XorGame& g, const Eigen::MatrixXd& phi_tilde, const AscentState& s,
                                const std::optional<Rational>& xi_c, const SolverConfig& cfg) {
  QuantumBiasResult r;
  const std::size_t ma = g.m_a();
  const std::size_t mb = g.m_b();
  Eigen::VectorXd t(ma + mb);
  t << s.t_alice, s.t_bob;
  const double raw_min = min_eigenvalue(t, phi_tilde);
  double shift = 0.0;
  double min_eig = raw_min;
  if (raw_min < 0.0) {
    shift = -raw_min;
    t.array() += shift;
    min_eig = min_eigenvalue(t, phi_tilde);
  }
  r.cert.t = t;
  r.cert.sigma = 2.0 * t.head(ma);
  r.cert.lambda_diag = 2.0 * t.tail(mb);
  r.cert.min_eig = min_eig;
  r.cert.dual_value = t.sum();
  r.cert.shift = shift;
  r.xi_q = s.primal;
  r.dual_value = r.cert.dual_value;
  r.gap = r.dual_value - r.xi_q;
  r.gram.m_a = ma;
  r.gram.m_b = mb;
  r.gram.vectors.resize(ma + mb, s.alice.cols());
  r.gram.vectors << s.alice, s.bob;
  r.sweeps = s.sweeps;
  r.stalls = s.stalls;
  r.trace = s.trace;
  r.xi_c = xi_c;
  if (min_eig < -cfg.feas_tol)
    r.status = SolveStatus::dual_infeasible;
  else if (r.gap > cfg.gap_tol)
    r.status = SolveStatus::not_converged;
  else
    r.status = SolveStatus::certified;
  r.classification = classify(r.xi_q, r.gap, xi_c, r.status, cfg);
  return r;
}

/// Ascent followed by certification rounds. A stationary point can still
/// leave the dual slightly infeasible when the optimum is degenerate, so the
/// sweeps continue while the certified gap keeps shrinking.
inline QuantumBiasResult ascend_and_certify(const XorGame& g, const Eigen::MatrixXd& half_phi,
                                            const Eigen::MatrixXd& phi_tilde, AscentState& s,
                                            const std::optional<Rational>& xi_c, const SolverConfig& cfg) {
  ascend(half_phi, s, cfg.max_iters, cfg.stationarity_tol, cfg.record_trace);
  QuantumBiasResult best = finish(g, phi_tilde, s, xi_c, cfg);
  const double target = cfg.gap_tol * 1e-4;
  for (int round = 0; round < 16 && best.gap > target && s.sweeps < cfg.max_iters; ++round) {
    const std::size_t before = s.sweeps;
    ascend(half_phi, s, std::min(std::max<std::size_t>(50, s.sweeps), cfg.max_iters - s.sweeps), -1.0,
           cfg.record_trace);
    if (s.sweeps == before) break;
    QuantumBiasResult next = finish(g, phi_tilde, s, xi_c, cfg);
    if (next.gap >= best.gap && next.status == best.status) {
      best.sweeps = next.sweeps;
      break;
    }
    best = std::move(next);
  }
  return best;
}

inline std::optional<Rational> classical_reference(const XorGame& g, const SolverConfig& cfg) {
  if (std::min(g.m_a(), g.m_b()) > cfg.classical_enum_bits) return std::nullopt;
  ClassicalConfig cc;
  cc.max_enum_bits = cfg.classical_enum_bits;
  cc.threads = cfg.threads;
  return classical_bias(g, cc).xi_c;
}

inline void check_solvable(const XorGame& g, const SolverConfig& cfg) {
  if (g.m_a() + g.m_b() > 4096) throw Error(ErrorCode::too_large, "m_a + m_b exceeds 4096");
  if (cfg.restarts == 0) throw Error(ErrorCode::invalid_parameter, "restarts must be positive");
  if (!(cfg.gap_tol > 0 && cfg.feas_tol > 0 && cfg.adv_tol > 0))
    throw Error(ErrorCode::invalid_parameter, "tolerances must be positive");
}

/// Better of two results: certified first, then larger primal value; the
/// incumbent (earlier restart) wins exact ties.
inline bool better(const QuantumBiasResult& challenger, const QuantumBiasResult& incumbent) {
  if (challenger.certified() != incumbent.certified()) return challenger.certified();
  if (challenger.certified()) return challenger.xi_q > incumbent.xi_q;
  return challenger.gap < incumbent.gap;
}

}  // namespace detail

/// Continues the ascent from given unit vectors (rows: Alice then Bob) and
/// certifies the result.
inline QuantumBiasResult refine_quantum_solution(const XorGame& g, const Eigen::MatrixXd& start,
                                                 const SolverConfig& cfg = {},
                                                 std::optional<Rational> xi_c = std::nullopt) {
  detail::check_solvable(g, cfg);
  if (static_cast<std::size_t>(start.rows()) != g.m_a() + g.m_b())
    throw Error(ErrorCode::shape_mismatch, "start vectors must have m_a + m_b rows");
  if (!xi_c) xi_c = detail::classical_reference(g, cfg);
  const Eigen::MatrixXd half_phi = 0.5 * detail::to_eigen(game_matrix_double(g));
  const Eigen::MatrixXd phi_tilde = build_phi_tilde(g).dense();
  detail::AscentState s;
  s.alice = start.topRows(g.m_a()).rowwise().normalized();
  s.bob = start.bottomRows(g.m_b()).rowwise().normalized();
  return detail::ascend_and_certify(g, half_phi, phi_tilde, s, xi_c, cfg);
}

/// Runs cfg.restarts seeded initializations and returns the best certified
/// one (largest primal value, earliest restart on ties). `xi_c` is computed
/// by enumeration when omitted and the game is small enough; otherwise the
/// classification stays undecided.
inline QuantumBiasResult solve_quantum_bias(const XorGame& g, const SolverConfig& cfg = {},
                                            std::optional<Rational> xi_c = std::nullopt) {
  detail::check_solvable(g, cfg);
  if (!xi_c) xi_c = detail::classical_reference(g, cfg);
  const std::size_t n = g.m_a() + g.m_b();
  const std::size_t rank = cfg.rank == 0 ? n : cfg.rank;
  const Eigen::MatrixXd half_phi = 0.5 * detail::to_eigen(game_matrix_double(g));
  const Eigen::MatrixXd phi_tilde = build_phi_tilde(g).dense();

  std::vector<QuantumBiasResult> runs(cfg.restarts);
  const unsigned threads = cfg.threads == 0 ? worker_threads() : cfg.threads;
  for_each_chunk(cfg.restarts, cfg.restarts, threads, [&](std::size_t k, std::uint64_t, std::uint64_t) {
    detail::AscentState s;
    const Eigen::MatrixXd v = detail::random_unit_rows(n, rank, detail::splitmix64(cfg.seed + k));
    s.alice = v.topRows(g.m_a());
    s.bob = v.bottomRows(g.m_b());
    runs[k] = detail::ascend_and_certify(g, half_phi, phi_tilde, s, xi_c, cfg);
    runs[k].restart = static_cast<unsigned>(k);
  });
  std::size_t best = 0;
  for (std::size_t k = 1; k < runs.size(); ++k)
    if (detail::better(runs[k], runs[best])) best = k;
  return std::move(runs[best]);
}

/// F = Lambda^{-1} Phi^T (m_b x m_a), with Lambda = 2 diag(t_Bob).
inline Eigen::MatrixXd extract_F(const DualCertificate& cert, const XorGame& g, double feas_tol = 1e-8) {
  if (static_cast<std::size_t>(cert.t.size()) != g.m_a() + g.m_b())
    throw Error(ErrorCode::shape_mismatch, "certificate does not match game");
  const Eigen::MatrixXd phi = detail::to_eigen(game_matrix_double(g));
  Eigen::MatrixXd F(g.m_b(), g.m_a());
  for (std::size_t y = 0; y < g.m_b(); ++y) {
    const double t = cert.t(g.m_a() + y);
    if (!(t > feas_tol))
      throw Error(ErrorCode::singular_lambda, "dual variable of Bob input " + std::to_string(y) + " is not positive");
    F.row(y) = phi.col(y).transpose() / (2.0 * t);
  }
  return F;
}

/// ||(diag(t) - Phi~) s||_inf with s = alpha (+) beta.
inline double slackness_residual_classical(const DualCertificate& cert, const XorGame& g,
                                           const DeterministicStrategy& v) {
  if (v.alpha.size() != g.m_a() || v.beta.size() != g.m_b())
    throw Error(ErrorCode::shape_mismatch, "strategy does not match game");
  Eigen::VectorXd s(g.m_a() + g.m_b());
  for (std::size_t x = 0; x < g.m_a(); ++x) s(x) = v.alpha[x];
  for (std::size_t y = 0; y < g.m_b(); ++y) s(g.m_a() + y) = v.beta[y];
  const Eigen::MatrixXd phi_tilde = build_phi_tilde(g).dense();
  const Eigen::VectorXd r = cert.t.cwiseProduct(s) - phi_tilde * s;
  return r.cwiseAbs().maxCoeff();
}

struct QuantumSlackReport {
  double max_residual = 0.0;
  bool pass = false;
};

/// max_y || u_Bob,y - sum_x F_yx u_Alice,x ||_2 on the solver's vectors.
inline QuantumSlackReport quantum_slackness_check(const QuantumBiasResult& res, const Eigen::MatrixXd& F,
                                                  double tol) {
  if (res.classification != Classification::no_advantage)
    throw Error(ErrorCode::not_applicable, "requires a certified no-advantage game");
  const Eigen::MatrixXd a = res.gram.alice();
  const Eigen::MatrixXd b = res.gram.bob();
  if (F.rows() != b.rows() || F.cols() != a.rows()) throw Error(ErrorCode::shape_mismatch, "F must be m_b x m_a");
  QuantumSlackReport r;
  r.max_residual = (b - F * a).rowwise().norm().maxCoeff();
  r.pass = r.max_residual <= tol;
  return r;
}

}  // namespace tightbell
