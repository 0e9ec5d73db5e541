#pragma once

// Geometry of the face of the local polytope cut out by an XOR game.
// Behaviour coordinates are (alpha, beta, vec(alpha beta^T)) with the
// correlator flattened row-major; D = m_a m_b + m_a + m_b.

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tightbell/classical.hpp"
#include "tightbell/error.hpp"
#include "tightbell/game.hpp"
#include "tightbell/qsdp.hpp"
#include "tightbell/rational.hpp"

namespace tightbell {

struct EmbeddedVertex {
  std::vector<std::int64_t> coords;
  std::size_t m_a = 0;
  std::size_t m_b = 0;

  std::vector<std::int64_t> correlation_coords() const {
    return {coords.begin() + static_cast<std::ptrdiff_t>(m_a + m_b), coords.end()};
  }
  DeterministicStrategy strategy() const {
    DeterministicStrategy s;
    s.alpha.assign(coords.begin(), coords.begin() + static_cast<std::ptrdiff_t>(m_a));
    s.beta.assign(coords.begin() + static_cast<std::ptrdiff_t>(m_a),
                  coords.begin() + static_cast<std::ptrdiff_t>(m_a + m_b));
    return s;
  }
};

inline EmbeddedVertex embed_vertex(const DeterministicStrategy& v) {
  if (!is_valid(v)) throw Error(ErrorCode::invalid_parameter, "strategy entries must be +-1");
  EmbeddedVertex e;
  e.m_a = v.alpha.size();
  e.m_b = v.beta.size();
  e.coords.reserve(e.m_a * e.m_b + e.m_a + e.m_b);
  e.coords.insert(e.coords.end(), v.alpha.begin(), v.alpha.end());
  e.coords.insert(e.coords.end(), v.beta.begin(), v.beta.end());
  for (int a : v.alpha)
    for (int b : v.beta) e.coords.push_back(a * b);
  return e;
}

namespace detail {

struct Overflow {};

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw Overflow{};
  return r;
}
inline std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_sub_overflow(a, b, &r)) throw Overflow{};
  return r;
}
inline BigInt checked_mul(const BigInt& a, const BigInt& b) { return a * b; }
inline BigInt checked_sub(const BigInt& a, const BigInt& b) { return a - b; }

/// Rank by fraction-free (Bareiss) elimination. Every intermediate entry is a
/// minor of the input, so the divisions are exact.
template <class Int>
std::size_t bareiss_rank(std::vector<std::vector<Int>> m, std::size_t cols) {
  const std::size_t rows = m.size();
  std::size_t rank = 0;
  Int prev(1);
  for (std::size_t col = 0; col < cols && rank < rows; ++col) {
    std::size_t pivot = rank;
    while (pivot < rows && m[pivot][col] == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(m[pivot], m[rank]);
    const Int p = m[rank][col];
    for (std::size_t i = rank + 1; i < rows; ++i) {
      const Int lead = m[i][col];
      for (std::size_t j = col + 1; j < cols; ++j)
        m[i][j] = checked_sub(checked_mul(p, m[i][j]), checked_mul(lead, m[rank][j])) / prev;
      m[i][col] = 0;
    }
    prev = p;
    ++rank;
  }
  return rank;
}

}  // namespace detail

/// Exact dimension of the affine hull of integer points: the rank over Q of
/// the differences p_i - p_0.
inline std::size_t affine_dimension_exact(const std::vector<std::vector<std::int64_t>>& points) {
  if (points.empty()) throw Error(ErrorCode::empty_input, "no points");
  const std::size_t cols = points.front().size();
  std::vector<std::vector<std::int64_t>> diffs;
  diffs.reserve(points.size() - 1);
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].size() != cols) throw Error(ErrorCode::shape_mismatch, "points have different lengths");
    std::vector<std::int64_t> d(cols);
    bool nonzero = false;
    for (std::size_t j = 0; j < cols; ++j) {
      d[j] = points[i][j] - points[0][j];
      nonzero = nonzero || d[j] != 0;
    }
    if (nonzero) diffs.push_back(std::move(d));
  }
  if (diffs.empty()) return 0;
  try {
    return detail::bareiss_rank<std::int64_t>(diffs, cols);
  } catch (const detail::Overflow&) {
    std::vector<std::vector<BigInt>> big(diffs.size(), std::vector<BigInt>(cols));
    for (std::size_t i = 0; i < diffs.size(); ++i)
      for (std::size_t j = 0; j < cols; ++j) big[i][j] = diffs[i][j];
    return detail::bareiss_rank<BigInt>(std::move(big), cols);
  }
}

/// m + m(m-1)/2 with m = min(m_a, m_b): the largest face dimension a game
/// without quantum advantage can have.
inline std::size_t theorem1_dim_bound(std::size_t m_a, std::size_t m_b) {
  const std::size_t m = std::min(m_a, m_b);
  return m + m * (m - 1) / 2;
}

/// m_b + m_a m_b - m_a(m_a-1)/2 for an exhaustive no-advantage game, m_a <= m_b.
inline std::size_t exhaustive_codim_bound(std::size_t m_a, std::size_t m_b) {
  const std::size_t lo = std::min(m_a, m_b);
  const std::size_t hi = std::max(m_a, m_b);
  return hi + lo * hi - lo * (lo - 1) / 2;
}

struct CodimBound {
  std::size_t full = 0;         // Delta
  std::size_t correlation = 0;  // Delta_0
};

/// Codimension lower bounds for a game with M_a x M_b inputs whose
/// exhaustive reduction is m_a x m_b (m_a <= m_b, m <= M on both sides).
inline CodimBound theorem2_codim_bound(std::size_t M_a, std::size_t M_b, std::size_t m_a, std::size_t m_b) {
  if (m_a == 0 || m_b == 0 || m_a > M_a || m_b > M_b || m_a > m_b)
    throw Error(ErrorCode::invalid_dims, "need 0 < m_a <= m_b, m_a <= M_a, m_b <= M_b");
  CodimBound b;
  b.correlation = M_a * (m_b - m_a) + m_a * (m_a + 1) / 2;
  b.full = m_b + b.correlation;
  return b;
}

enum class Provenance { measured, theorem2_bound };

inline std::string_view to_string(Provenance p) {
  return p == Provenance::measured ? "measured" : "bound via Theorem 2";
}

struct FaceConfig {
  ClassicalConfig classical;
  SolverConfig solver;
  bool solve_quantum = true;
};

struct FaceReport {
  Rational xi_c;
  std::optional<QuantumBiasResult> quantum;
  Classification classification = Classification::undecided;
  std::size_t num_vertices = 0;
  std::size_t D = 0;
  std::size_t corr_dim = 0;  // M_a M_b
  std::size_t dim_full = 0;
  std::size_t dim_corr = 0;
  std::size_t codim_full = 0;
  std::size_t codim_corr = 0;
  Provenance provenance = Provenance::measured;
  std::size_t bound_thm1_dim = 0;
  std::size_t bound_thm1_dim_corr = 0;
  std::size_t bound_exhaustive_codim = 0;
  CodimBound bound_thm2_codim;
  std::optional<bool> is_facet_full;  // empty when truncated
  std::optional<bool> is_facet_corr;
  bool truncated = false;
  bool transposed = false;  // min-side normalization swapped the players
  std::pair<std::size_t, std::size_t> original_dims;
  std::pair<std::size_t, std::size_t> reduced_dims;
};

namespace detail {

inline std::size_t rank_of_strategies(const std::vector<DeterministicStrategy>& vs, bool correlation_only) {
  std::vector<std::vector<std::int64_t>> pts;
  pts.reserve(vs.size());
  for (const auto& v : vs) {
    EmbeddedVertex e = embed_vertex(v);
    pts.push_back(correlation_only ? e.correlation_coords() : std::move(e.coords));
  }
  return affine_dimension_exact(pts);
}

}  // namespace detail

/// Pipeline: reduce to the exhaustive game, enumerate its optimal vertices,
/// lift them back with every completion on dropped inputs, and measure the
/// exact affine dimensions in the original coordinates. When the lift would
/// exceed the vertex cap, the dimensions are derived from the codimension
/// bound instead and labelled accordingly.
inline FaceReport face_report(const XorGame& g, const FaceConfig& cfg = {}) {
  FaceReport r;
  auto [reduced, map] = reduce_exhaustive(g);
  r.original_dims = map.original_dims;
  r.reduced_dims = {reduced.m_a(), reduced.m_b()};
  const std::size_t Ma = g.m_a(), Mb = g.m_b();
  const std::size_t ma = reduced.m_a(), mb = reduced.m_b();
  r.D = Ma * Mb + Ma + Mb;
  r.corr_dim = Ma * Mb;

  const OptimalVertexSet vs = optimal_vertices(reduced, cfg.classical);
  r.xi_c = vs.xi_c;
  r.truncated = vs.truncated;

  const std::size_t free = free_coordinates(map);
  const bool lift_fits =
      free < 63 && vs.vertices.size() <= cfg.classical.vertex_cap >> std::min<std::size_t>(free, 63);
  r.transposed = mb < ma;
  const std::size_t lo = std::min(ma, mb), hi = std::max(ma, mb);
  const std::size_t Mlo = r.transposed ? Mb : Ma, Mhi = r.transposed ? Ma : Mb;
  r.bound_thm1_dim = theorem1_dim_bound(ma, mb);
  r.bound_thm1_dim_corr = lo * (lo - 1) / 2;
  r.bound_exhaustive_codim = exhaustive_codim_bound(ma, mb);
  r.bound_thm2_codim = theorem2_codim_bound(Mlo, Mhi, lo, hi);

  if (lift_fits) {
    std::vector<DeterministicStrategy> lifted;
    lifted.reserve(vs.vertices.size() << free);
    for (const auto& v : vs.vertices)
      for (std::uint64_t c = 0; c < (std::uint64_t{1} << free); ++c) lifted.push_back(lift_strategy(v, map, c));
    r.num_vertices = lifted.size();
    r.dim_full = detail::rank_of_strategies(lifted, false);
    r.dim_corr = detail::rank_of_strategies(lifted, true);
    r.provenance = Provenance::measured;
  } else {
    r.num_vertices = vs.vertices.size();
    r.provenance = Provenance::theorem2_bound;
    r.dim_full = r.D - r.bound_thm2_codim.full;
    r.dim_corr = r.corr_dim - r.bound_thm2_codim.correlation;
  }
  r.codim_full = r.D - r.dim_full;
  r.codim_corr = r.corr_dim - r.dim_corr;
  if (!r.truncated && r.provenance == Provenance::measured) {
    r.is_facet_full = r.dim_full + 1 == r.D;
    r.is_facet_corr = r.dim_corr + 1 == r.corr_dim;
  }

  if (cfg.solve_quantum) {
    r.quantum = solve_quantum_bias(reduced, cfg.solver, vs.xi_c);
    r.classification = r.quantum->classification;
  }
  return r;
}

struct TrivialFacetReport {
  std::size_t dim = 0;
  bool is_facet = false;
  std::size_t num_points = 0;
};

/// Face of the correlation polytope on which c(x0,y0) = sign.
inline TrivialFacetReport trivial_facet_check(std::size_t m_a, std::size_t m_b, std::size_t x0, std::size_t y0,
                                              int sign) {
  if (m_a == 0 || m_b == 0 || x0 >= m_a || y0 >= m_b || (sign != 1 && sign != -1))
    throw Error(ErrorCode::invalid_parameter, "need x0 < m_a, y0 < m_b, sign = +-1");
  if (m_a + m_b > 16) throw Error(ErrorCode::too_large, "m_a + m_b exceeds 16");
  std::vector<std::vector<std::int64_t>> pts;
  // alpha_{x0} = +1 suffices: (-alpha, -beta) has the same correlator.
  for (std::uint64_t pa = 0; pa < (std::uint64_t{1} << m_a); ++pa) {
    if ((pa >> x0) & 1) continue;
    const std::vector<int> alpha = detail::signs_of(pa, m_a);
    for (std::uint64_t pb = 0; pb < (std::uint64_t{1} << m_b); ++pb) {
      const std::vector<int> beta = detail::signs_of(pb, m_b);
      if (alpha[x0] * beta[y0] != sign) continue;
      std::vector<std::int64_t> c;
      c.reserve(m_a * m_b);
      for (int a : alpha)
        for (int b : beta) c.push_back(a * b);
      pts.push_back(std::move(c));
    }
  }
  TrivialFacetReport r;
  r.num_points = pts.size();
  r.dim = affine_dimension_exact(pts);
  r.is_facet = r.dim + 1 == m_a * m_b;
  return r;
}

struct ProbeConfig {
  std::size_t samples = 24;
  double perturb_scale = 0.3;
  double rank_tol = 1e-6;
};

struct QuantumFaceProbe {
  std::size_t dim_lower_bound = 0;
  std::size_t thm3_bound = 0;
  std::size_t accepted_samples = 0;
  std::vector<double> singular_values;
  bool bound_respected = true;
};

/// Lower bound on the dimension of the optimal quantum face at correlator
/// level: collects optimal correlator matrices from fresh restarts and from
/// re-optimized perturbations of the base optimum, and counts the singular
/// values of their differences above rank_tol * max(1, sigma_max).
inline QuantumFaceProbe quantum_face_probe(const XorGame& game, const ProbeConfig& pc = {},
                                           const SolverConfig& sc = {}) {
  const XorGame g = reduce_exhaustive(game).first;
  const QuantumBiasResult base = solve_quantum_bias(g, sc);
  if (base.classification != Classification::no_advantage)
    throw Error(ErrorCode::not_applicable, "quantum face probe needs a certified no-advantage game");
  const std::size_t m = std::min(g.m_a(), g.m_b());
  QuantumFaceProbe out;
  out.thm3_bound = m * (m - 1) / 2;

  const Eigen::MatrixXd c0 = base.gram.C();
  std::vector<Eigen::VectorXd> diffs;
  std::mt19937_64 rng(detail::splitmix64(sc.seed ^ 0xFACEULL));
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t k = 0; k < pc.samples; ++k) {
    QuantumBiasResult sample;
    if (k % 2 == 0) {
      SolverConfig fresh = sc;
      fresh.restarts = 1;
      fresh.seed = detail::splitmix64(sc.seed + 1000 + k);
      sample = solve_quantum_bias(g, fresh, base.xi_c);
    } else {
      Eigen::MatrixXd start = base.gram.vectors;
      for (Eigen::Index i = 0; i < start.rows(); ++i)
        for (Eigen::Index j = 0; j < start.cols(); ++j) start(i, j) += pc.perturb_scale * normal(rng);
      sample = refine_quantum_solution(g, start, sc, base.xi_c);
    }
    if (!sample.certified() || std::abs(sample.xi_q - base.xi_q) > sc.gap_tol) continue;
    ++out.accepted_samples;
    const Eigen::MatrixXd d = sample.gram.C() - c0;
    diffs.emplace_back(Eigen::Map<const Eigen::VectorXd>(d.data(), d.size()));
  }
  if (!diffs.empty()) {
    Eigen::MatrixXd stack(diffs.size(), diffs.front().size());
    for (std::size_t i = 0; i < diffs.size(); ++i) stack.row(static_cast<Eigen::Index>(i)) = diffs[i].transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(stack);
    const Eigen::VectorXd sv = svd.singularValues();
    out.singular_values.assign(sv.data(), sv.data() + sv.size());
    const double threshold = pc.rank_tol * std::max(1.0, sv.size() ? sv(0) : 0.0);
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv(i) > threshold) ++out.dim_lower_bound;
  }
  out.bound_respected = out.dim_lower_bound <= out.thm3_bound;
  return out;
}

}  // namespace tightbell
