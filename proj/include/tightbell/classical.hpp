#pragma once

// Exact classical bias and the complete set of optimal deterministic
// strategies. The game matrix is scaled to integers by the lcm of its
// denominators and the smaller side is enumerated in Gray-code order, so
// every comparison is exact.

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <vector>

#include "tightbell/error.hpp"
#include "tightbell/game.hpp"
#include "tightbell/parallel.hpp"
#include "tightbell/rational.hpp"

namespace tightbell {

struct ClassicalConfig {
  unsigned max_enum_bits = 24;        // enumerate at most 2^24 sign vectors
  std::size_t vertex_cap = 1'000'000;  // stored optimal vertices
  unsigned threads = 0;               // 0: worker_threads()
};

struct ClassicalBiasResult {
  Rational xi_c;
  DeterministicStrategy witness;
  std::uint64_t num_alpha_optimal = 0;
  bool transposed = false;  // Bob's side was enumerated (m_b < m_a)
};

struct OptimalVertexSet {
  std::vector<DeterministicStrategy> vertices;
  bool truncated = false;
  std::size_t cap = 0;
  Rational xi_c;
};

namespace detail {

/// Phi scaled to an integer matrix, oriented so that rows() <= cols().
template <class Int>
struct ScaledGame {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Int> entries;  // row-major
  BigInt scale;
  bool transposed = false;

  const Int& operator()(std::size_t i, std::size_t j) const { return entries[i * cols + j]; }
};

inline BigInt common_denominator(const RationalMatrix& phi) {
  BigInt l = 1;
  for (const auto& e : phi.data()) {
    const BigInt d = denominator(e);
    l = l / boost::multiprecision::gcd(l, d) * d;
  }
  return l;
}

template <class Int>
ScaledGame<Int> scale_game(const XorGame& g, const BigInt& scale) {
  RationalMatrix phi = game_matrix(g);
  ScaledGame<Int> s;
  s.scale = scale;
  s.transposed = g.m_b() < g.m_a();
  if (s.transposed) phi = phi.transposed();
  s.rows = phi.rows();
  s.cols = phi.cols();
  s.entries.reserve(s.rows * s.cols);
  for (const auto& e : phi.data()) {
    const BigInt v = numerator(e) * (scale / denominator(e));
    if constexpr (std::is_same_v<Int, BigInt>)
      s.entries.push_back(v);
    else
      s.entries.push_back(v.template convert_to<Int>());
  }
  return s;
}

/// Sign vectors are encoded as bit patterns: bit i set means alpha_i = -1.
/// Only patterns with the top bit clear are scanned; the complement of an
/// optimal pattern is optimal with the negated partner.
template <class Int>
struct ChunkScan {
  Int best{};
  std::uint64_t best_pattern = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t count = 0;
  std::vector<std::uint64_t> hits;
  bool overflowed = false;
};

template <class Int>
void column_sums(const ScaledGame<Int>& s, std::uint64_t pattern, std::vector<Int>& v) {
  v.assign(s.cols, Int(0));
  for (std::size_t x = 0; x < s.rows; ++x) {
    const bool neg = (pattern >> x) & 1;
    for (std::size_t y = 0; y < s.cols; ++y) {
      if (neg)
        v[y] -= s(x, y);
      else
        v[y] += s(x, y);
    }
  }
}

template <class Int>
Int abs_sum(const std::vector<Int>& v) {
  Int total(0);
  for (const auto& e : v) total += e < 0 ? Int(-e) : e;
  return total;
}

/// Scans Gray-code indices [begin, end). With `target` set, records every
/// pattern whose value equals it (up to `hit_cap`) instead of tracking the max.
template <class Int>
ChunkScan<Int> scan_range(const ScaledGame<Int>& s, std::uint64_t begin, std::uint64_t end, const Int* target,
                          std::size_t hit_cap) {
  ChunkScan<Int> out;
  if (begin >= end) return out;
  std::vector<Int> v;
  std::uint64_t pattern = begin ^ (begin >> 1);
  column_sums(s, pattern, v);
  for (std::uint64_t i = begin;;) {
    const Int value = abs_sum(v);
    if (target) {
      if (value == *target) {
        ++out.count;
        if (out.hits.size() < hit_cap)
          out.hits.push_back(pattern);
        else
          out.overflowed = true;
      }
    } else if (out.count == 0 || value > out.best) {
      out.best = value;
      out.best_pattern = pattern;
      out.count = 1;
    } else if (value == out.best) {
      out.best_pattern = std::min(out.best_pattern, pattern);
      ++out.count;
    }
    if (++i >= end) break;
    const unsigned bit = static_cast<unsigned>(std::countr_zero(i));
    pattern ^= std::uint64_t{1} << bit;
    const bool now_negative = (pattern >> bit) & 1;
    for (std::size_t y = 0; y < s.cols; ++y) {
      const Int twice = s(bit, y) + s(bit, y);
      if (now_negative)
        v[y] -= twice;
      else
        v[y] += twice;
    }
  }
  return out;
}

inline constexpr std::size_t kScanChunks = 64;

template <class Int>
ChunkScan<Int> scan_max(const ScaledGame<Int>& s, unsigned threads) {
  const std::uint64_t half = std::uint64_t{1} << (s.rows - 1);
  std::vector<ChunkScan<Int>> parts(kScanChunks);
  for_each_chunk(half, kScanChunks, threads, [&](std::size_t c, std::uint64_t b, std::uint64_t e) {
    parts[c] = scan_range<Int>(s, b, e, nullptr, 0);
  });
  ChunkScan<Int> merged;
  for (auto& p : parts) {
    if (p.count == 0) continue;
    if (merged.count == 0 || p.best > merged.best) {
      merged.best = p.best;
      merged.best_pattern = p.best_pattern;
      merged.count = p.count;
    } else if (p.best == merged.best) {
      merged.best_pattern = std::min(merged.best_pattern, p.best_pattern);
      merged.count += p.count;
    }
  }
  return merged;
}

template <class Int>
ChunkScan<Int> scan_hits(const ScaledGame<Int>& s, const Int& target, std::size_t hit_cap, unsigned threads) {
  const std::uint64_t half = std::uint64_t{1} << (s.rows - 1);
  std::vector<ChunkScan<Int>> parts(kScanChunks);
  for_each_chunk(half, kScanChunks, threads, [&](std::size_t c, std::uint64_t b, std::uint64_t e) {
    parts[c] = scan_range<Int>(s, b, e, &target, hit_cap + 1);
  });
  ChunkScan<Int> merged;
  for (auto& p : parts) {
    merged.count += p.count;
    merged.overflowed = merged.overflowed || p.overflowed;
    merged.hits.insert(merged.hits.end(), p.hits.begin(), p.hits.end());
  }
  std::sort(merged.hits.begin(), merged.hits.end());
  if (merged.hits.size() > hit_cap) {
    merged.hits.resize(hit_cap);
    merged.overflowed = true;
  }
  return merged;
}

inline std::vector<int> signs_of(std::uint64_t pattern, std::size_t n) {
  std::vector<int> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = (pattern >> i) & 1 ? -1 : 1;
  return out;
}

inline unsigned resolve_threads(unsigned requested) { return requested == 0 ? worker_threads() : requested; }

inline void check_enumerable(const XorGame& g, const ClassicalConfig& cfg) {
  const std::size_t side = std::min(g.m_a(), g.m_b());
  if (side > cfg.max_enum_bits || side > 63)
    throw Error(ErrorCode::too_large, "enumeration side has " + std::to_string(side) + " inputs, limit is " +
                                          std::to_string(cfg.max_enum_bits));
}

inline bool fits_int64(const BigInt& scale) { return scale < (BigInt(1) << 61); }

template <class Int>
ClassicalBiasResult classical_bias_impl(const XorGame& g, const BigInt& scale, unsigned threads) {
  const ScaledGame<Int> s = scale_game<Int>(g, scale);
  const ChunkScan<Int> best = scan_max(s, threads);
  ClassicalBiasResult r;
  r.transposed = s.transposed;
  r.num_alpha_optimal = 2 * best.count;
  if constexpr (std::is_same_v<Int, BigInt>)
    r.xi_c = Rational(best.best, scale);
  else
    r.xi_c = Rational(BigInt(best.best), scale);
  std::vector<int> enumerated = signs_of(best.best_pattern, s.rows);
  std::vector<Int> v;
  column_sums(s, best.best_pattern, v);
  std::vector<int> partner(s.cols);
  for (std::size_t y = 0; y < s.cols; ++y) partner[y] = v[y] < 0 ? -1 : 1;
  if (s.transposed)
    r.witness = {std::move(partner), std::move(enumerated)};
  else
    r.witness = {std::move(enumerated), std::move(partner)};
  return r;
}

template <class Int>
OptimalVertexSet optimal_vertices_impl(const XorGame& g, const BigInt& scale, std::size_t cap, unsigned threads) {
  const ScaledGame<Int> s = scale_game<Int>(g, scale);
  const ChunkScan<Int> best = scan_max(s, threads);
  const ChunkScan<Int> hits = scan_hits(s, best.best, cap, threads);
  OptimalVertexSet out;
  out.cap = cap;
  if constexpr (std::is_same_v<Int, BigInt>)
    out.xi_c = Rational(best.best, scale);
  else
    out.xi_c = Rational(BigInt(best.best), scale);

  std::vector<Int> v;
  bool full = false;
  for (std::uint64_t pattern : hits.hits) {
    column_sums(s, pattern, v);
    std::vector<std::size_t> zeros;
    std::vector<int> base(s.cols);
    for (std::size_t y = 0; y < s.cols; ++y) {
      base[y] = v[y] < 0 ? -1 : 1;
      if (v[y] == 0) zeros.push_back(y);
    }
    if (zeros.size() >= 63) throw Error(ErrorCode::too_large, "too many tied partner coordinates");
    const std::uint64_t completions = std::uint64_t{1} << zeros.size();
    const std::vector<int> enumerated = signs_of(pattern, s.rows);
    std::vector<int> negated(enumerated.size());
    std::transform(enumerated.begin(), enumerated.end(), negated.begin(), [](int e) { return -e; });
    for (std::uint64_t c = 0; c < completions; ++c) {
      if (out.vertices.size() + 2 > cap) {
        full = true;
        break;
      }
      std::vector<int> partner = base;
      for (std::size_t k = 0; k < zeros.size(); ++k) partner[zeros[k]] = (c >> k) & 1 ? -1 : 1;
      std::vector<int> neg_partner(partner.size());
      std::transform(partner.begin(), partner.end(), neg_partner.begin(), [](int e) { return -e; });
      if (s.transposed) {
        out.vertices.push_back({partner, enumerated});
        out.vertices.push_back({neg_partner, negated});
      } else {
        out.vertices.push_back({enumerated, partner});
        out.vertices.push_back({negated, neg_partner});
      }
    }
    if (full) break;
  }
  out.truncated = full || hits.overflowed;
  std::sort(out.vertices.begin(), out.vertices.end());
  return out;
}

}  // namespace detail

/// Maximum of <alpha|Phi|beta> over deterministic strategies, computed as the
/// maximum over the smaller side of sum_y |(Phi^T alpha)_y|. Ties in the
/// witness go to the smallest sign pattern, and the partner takes +1 where
/// its column sum vanishes.
inline ClassicalBiasResult classical_bias(const XorGame& g, const ClassicalConfig& cfg = {}) {
  detail::check_enumerable(g, cfg);
  const BigInt scale = detail::common_denominator(game_matrix(g));
  const unsigned threads = detail::resolve_threads(cfg.threads);
  if (detail::fits_int64(scale)) return detail::classical_bias_impl<std::int64_t>(g, scale, threads);
  return detail::classical_bias_impl<BigInt>(g, scale, threads);
}

/// Every deterministic pair attaining the classical bias, including all sign
/// choices on partner coordinates whose column sum is zero. Both (a, b) and
/// (-a, -b) are listed. Sorted; truncated (and flagged) at cfg.vertex_cap.
inline OptimalVertexSet optimal_vertices(const XorGame& g, const ClassicalConfig& cfg = {}) {
  detail::check_enumerable(g, cfg);
  if (cfg.vertex_cap == 0) throw Error(ErrorCode::invalid_parameter, "vertex cap must be positive");
  const BigInt scale = detail::common_denominator(game_matrix(g));
  const unsigned threads = detail::resolve_threads(cfg.threads);
  if (detail::fits_int64(scale)) return detail::optimal_vertices_impl<std::int64_t>(g, scale, cfg.vertex_cap, threads);
  return detail::optimal_vertices_impl<BigInt>(g, scale, cfg.vertex_cap, threads);
}

struct FRelationReport {
  double max_residual = 0.0;
  bool all_pass = true;
};

/// max over vertices of ||beta - F alpha||_inf, F of shape m_b x m_a.
inline FRelationReport verify_F_relation(const OptimalVertexSet& vs, const Eigen::MatrixXd& F, double tol) {
  if (vs.truncated) throw Error(ErrorCode::truncated, "vertex set was truncated at " + std::to_string(vs.cap));
  FRelationReport r;
  for (const auto& v : vs.vertices) {
    if (static_cast<std::size_t>(F.rows()) != v.beta.size() || static_cast<std::size_t>(F.cols()) != v.alpha.size())
      throw Error(ErrorCode::shape_mismatch, "F must be m_b x m_a");
    Eigen::VectorXd a(v.alpha.size()), b(v.beta.size());
    for (std::size_t i = 0; i < v.alpha.size(); ++i) a(i) = v.alpha[i];
    for (std::size_t j = 0; j < v.beta.size(); ++j) b(j) = v.beta[j];
    r.max_residual = std::max(r.max_residual, (b - F * a).cwiseAbs().maxCoeff());
  }
  r.all_pass = r.max_residual <= tol;
  return r;
}

}  // namespace tightbell
