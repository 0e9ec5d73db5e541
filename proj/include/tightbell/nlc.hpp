#pragma once

// Non-local computation games: x and y are uniform shares of z = x xor y,
// q(x,y) = 2^-n q~(x xor y) and the players must output a xor b = f(x xor y).
// The game matrix is an XOR-convolution and is diagonalized exactly by the
// +-1 Hadamard matrix.
//
// Normalization: the spectrum g^(u) = sum_z (-1)^{u.z} (-1)^{f(z)} q~(z) is
// taken for the q~-weighted matrix. The actual game matrix has eigenvalues
// 2^-n g^(u) on the Hadamard vectors, which are themselves +-1 strategies, so
// the classical bias is exactly max_u |g^(u)| = 2^n ||Phi||. Brute force on
// n = 1, 2, 3 confirms this (e.g. the two-bit AND game has bias 1/2 = ||Phi_NLC||).

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <vector>

#include "tightbell/classical.hpp"
#include "tightbell/error.hpp"
#include "tightbell/facegeom.hpp"
#include "tightbell/game.hpp"
#include "tightbell/rational.hpp"

namespace tightbell {

struct NlcSpec {
  unsigned n = 0;
  std::vector<Rational> q_tilde;   // indexed by z in [0, 2^n)
  std::vector<std::uint8_t> f_z;
};

inline void validate(const NlcSpec& spec) {
  if (spec.n > 16) throw Error(ErrorCode::invalid_spec, "n must be at most 16");
  const std::size_t size = std::size_t{1} << spec.n;
  if (spec.q_tilde.size() != size || spec.f_z.size() != size)
    throw Error(ErrorCode::invalid_spec, "q_tilde and f_z need 2^n entries");
  Rational total = 0;
  for (std::size_t z = 0; z < size; ++z) {
    if (spec.q_tilde[z] < 0) throw Error(ErrorCode::invalid_spec, "negative q_tilde entry");
    if (spec.f_z[z] > 1) throw Error(ErrorCode::invalid_spec, "f_z entries must be 0 or 1");
    total += spec.q_tilde[z];
  }
  if (total != 1) throw Error(ErrorCode::invalid_spec, "q_tilde sums to " + to_string(total));
}

inline XorGame build_nlc(const NlcSpec& spec) {
  validate(spec);
  const std::size_t size = std::size_t{1} << spec.n;
  RationalMatrix q(size, size);
  BitMatrix f(size, size);
  const Rational weight(1, size);
  for (std::size_t x = 0; x < size; ++x) {
    for (std::size_t y = 0; y < size; ++y) {
      q(x, y) = weight * spec.q_tilde[x ^ y];
      f(x, y) = spec.f_z[x ^ y];
    }
  }
  return build_game(std::move(q), std::move(f));
}

/// Uniform q~ and f(z) = AND of all n bits.
inline NlcSpec nlc_and_spec(unsigned n) {
  if (n < 1) throw Error(ErrorCode::invalid_parameter, "n must be at least 1");
  const std::size_t size = std::size_t{1} << n;
  NlcSpec spec{n, std::vector<Rational>(size, Rational(1, size)), std::vector<std::uint8_t>(size, 0)};
  spec.f_z[size - 1] = 1;
  return spec;
}

/// Recovers the NLC structure of a game when q and f depend only on x xor y.
inline std::optional<NlcSpec> nlc_spec_from_game(const XorGame& g) {
  const std::size_t size = g.m_a();
  if (size != g.m_b() || !std::has_single_bit(size)) return std::nullopt;
  NlcSpec spec;
  spec.n = static_cast<unsigned>(std::countr_zero(size));
  spec.q_tilde.resize(size);
  spec.f_z.resize(size);
  for (std::size_t z = 0; z < size; ++z) {
    spec.q_tilde[z] = g.q()(0, z) * size;
    spec.f_z[z] = g.f()(0, z);
  }
  for (std::size_t x = 0; x < size; ++x) {
    for (std::size_t y = 0; y < size; ++y) {
      const std::size_t z = x ^ y;
      if (g.q()(x, y) * size != spec.q_tilde[z]) return std::nullopt;
      if (spec.q_tilde[z] != 0 && g.f()(x, y) != spec.f_z[z]) return std::nullopt;
    }
  }
  return spec;
}

/// In-place Walsh-Hadamard butterfly: v[u] <- sum_z (-1)^{popcount(u & z)} v[z].
template <class T>
void walsh_hadamard(std::vector<T>& v) {
  for (std::size_t len = 1; len < v.size(); len <<= 1) {
    for (std::size_t i = 0; i < v.size(); i += len << 1) {
      for (std::size_t j = i; j < i + len; ++j) {
        T a = v[j];
        T b = v[j + len];
        v[j] = a + b;
        v[j + len] = a - b;
      }
    }
  }
}

struct NlcAnalysis {
  unsigned n = 0;
  std::vector<Rational> spectrum;  // g^(u)
  Rational lambda_norm;            // max_u |g^(u)|
  std::size_t k = 0;               // multiplicity of +lambda_norm
  std::size_t l = 0;               // multiplicity of -lambda_norm
  bool diagonalization_verified = false;
};

inline constexpr unsigned kDiagonalizationCheckMaxN = 8;

inline std::vector<Rational> signed_weights(const NlcSpec& spec) {
  std::vector<Rational> g(spec.q_tilde.size());
  for (std::size_t z = 0; z < g.size(); ++z) g[z] = spec.f_z[z] ? Rational(-spec.q_tilde[z]) : spec.q_tilde[z];
  return g;
}

/// Computes H M H for M(x,y) = g(x xor y) by transforming rows then columns
/// and checks that it equals diag(2^n g^(u)) exactly.
inline bool verify_hadamard_diagonalization(const NlcSpec& spec, const std::vector<Rational>& spectrum) {
  const std::size_t size = spec.q_tilde.size();
  const std::vector<Rational> g = signed_weights(spec);
  std::vector<std::vector<Rational>> m(size, std::vector<Rational>(size));
  for (std::size_t x = 0; x < size; ++x)
    for (std::size_t y = 0; y < size; ++y) m[x][y] = g[x ^ y];
  for (auto& row : m) walsh_hadamard(row);
  std::vector<Rational> col(size);
  for (std::size_t y = 0; y < size; ++y) {
    for (std::size_t x = 0; x < size; ++x) col[x] = m[x][y];
    walsh_hadamard(col);
    for (std::size_t u = 0; u < size; ++u) {
      const Rational expected = u == y ? Rational(spectrum[u] * size) : Rational(0);
      if (col[u] != expected) return false;
    }
  }
  return true;
}

inline NlcAnalysis hadamard_spectrum(const NlcSpec& spec) {
  validate(spec);
  NlcAnalysis a;
  a.n = spec.n;
  a.spectrum = signed_weights(spec);
  walsh_hadamard(a.spectrum);
  a.lambda_norm = 0;
  for (const auto& s : a.spectrum) a.lambda_norm = std::max(a.lambda_norm, abs(s));
  for (const auto& s : a.spectrum) {
    if (a.lambda_norm == 0) break;
    if (s == a.lambda_norm) ++a.k;
    if (s == -a.lambda_norm) ++a.l;
  }
  if (spec.n <= kDiagonalizationCheckMaxN) {
    a.diagonalization_verified = verify_hadamard_diagonalization(spec, a.spectrum);
    if (!a.diagonalization_verified)
      throw Error(ErrorCode::internal, "Hadamard conjugation left nonzero off-diagonal entries");
  }
  return a;
}

/// Exact operator norm of an NLC game matrix. Every Hadamard vector h_u is
/// checked to satisfy Phi h_u = mu_u h_u in rationals; since the h_u form an
/// orthogonal basis the norm is max |mu_u|.
inline Rational nlc_operator_norm(const XorGame& g) {
  const std::size_t size = g.m_a();
  if (size != g.m_b() || !std::has_single_bit(size))
    throw Error(ErrorCode::invalid_spec, "game matrix is not 2^n x 2^n");
  const RationalMatrix phi = game_matrix(g);
  Rational norm = 0;
  std::vector<Rational> image(size);
  for (std::size_t u = 0; u < size; ++u) {
    for (std::size_t x = 0; x < size; ++x) {
      image[x] = 0;
      for (std::size_t y = 0; y < size; ++y) {
        if (std::popcount(u & y) & 1)
          image[x] -= phi(x, y);
        else
          image[x] += phi(x, y);
      }
    }
    const Rational mu = image[0];
    for (std::size_t x = 0; x < size; ++x) {
      const Rational expected = std::popcount(u & x) & 1 ? Rational(-mu) : mu;
      if (image[x] != expected) throw Error(ErrorCode::invalid_spec, "game matrix is not diagonal in the Hadamard basis");
    }
    norm = std::max(norm, abs(mu));
  }
  return norm;
}

struct NlcBiasBound {
  Rational xi_star;  // 2^n ||Phi||
  Rational xi_c;
  bool matches_classical = false;
};

inline NlcBiasBound nlc_bias_bound(const NlcAnalysis& a, const XorGame& g, const ClassicalConfig& cfg = {}) {
  if (g.m_a() != (std::size_t{1} << a.n)) throw Error(ErrorCode::shape_mismatch, "analysis and game differ in n");
  NlcBiasBound b;
  b.xi_star = nlc_operator_norm(g) * g.m_a();
  if (b.xi_star != a.lambda_norm) throw Error(ErrorCode::shape_mismatch, "analysis and game come from different specs");
  b.xi_c = classical_bias(g, cfg).xi_c;
  b.matches_classical = b.xi_c == b.xi_star;
  return b;
}

/// k + l + k(k+1)/2 + l(l+1)/2 - 1.
inline std::size_t kl_dimension_bound(std::size_t k, std::size_t l) {
  if (k + l < 1) throw Error(ErrorCode::invalid_dims, "k + l must be at least 1");
  return k + l + k * (k + 1) / 2 + l * (l + 1) / 2 - 1;
}

struct G0Dimension {
  std::size_t formula_value = 0;
  std::size_t verified_value = 0;
  std::size_t balanced_vectors = 0;
  std::size_t face_dim_with_antipodal = 0;  // balanced points plus -J
};

inline constexpr unsigned kG0MaxN = 4;

/// dim of the symmetric unit-diagonal matrices with zero row sums,
/// 2^{n-1}(2^n - 3), against the exact affine dimension of the balanced
/// rank-one points alpha alpha^T. Points are compared on their strict upper
/// triangle, a linear bijection on symmetric unit-diagonal matrices.
inline G0Dimension g0_dimension(unsigned n) {
  if (n < 2) throw Error(ErrorCode::invalid_parameter, "n must be at least 2");
  if (n > kG0MaxN) throw Error(ErrorCode::too_large, "balanced-vector enumeration is capped at n = 4");
  const std::size_t size = std::size_t{1} << n;
  G0Dimension r;
  r.formula_value = (size / 2) * (size - 3);
  std::vector<std::vector<std::int64_t>> pts;
  for (std::uint64_t p = 0; p < (std::uint64_t{1} << size); ++p) {
    if (static_cast<std::size_t>(std::popcount(p)) != size / 2) continue;
    const std::vector<int> alpha = detail::signs_of(p, size);
    std::vector<std::int64_t> upper;
    upper.reserve(size * (size - 1) / 2);
    for (std::size_t i = 0; i < size; ++i)
      for (std::size_t j = i + 1; j < size; ++j) upper.push_back(alpha[i] * alpha[j]);
    pts.push_back(std::move(upper));
  }
  r.balanced_vectors = pts.size();
  r.verified_value = affine_dimension_exact(pts);
  pts.emplace_back(size * (size - 1) / 2, -1);
  r.face_dim_with_antipodal = affine_dimension_exact(pts);
  return r;
}

struct CorollaryBound {
  std::size_t dim_bound = 0;
  std::size_t codim_bound_full = 0;
  std::size_t codim_bound_corr = 0;
};

inline CorollaryBound corollary_bound(unsigned n) {
  if (n < 1 || n > 30) throw Error(ErrorCode::invalid_parameter, "n must be in [1, 30]");
  const std::size_t size = std::size_t{1} << n;
  CorollaryBound b;
  b.dim_bound = size + (size / 2) * (size - 1);
  b.codim_bound_corr = (size / 2) * (size + 1);
  b.codim_bound_full = size + b.codim_bound_corr;
  return b;
}

}  // namespace tightbell
