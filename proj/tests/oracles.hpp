#pragma once

// Independent reference implementations used only by the tests. They share
// no code with the library beyond the XorGame container.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <random>
#include <vector>

#include "tightbell/game.hpp"
#include "tightbell/nlc.hpp"
#include "tightbell/rational.hpp"

namespace oracle {

using tightbell::Rational;

// Random valid game: integer weights in [lo, 9], normalized exactly.
inline tightbell::XorGame random_game(std::mt19937_64& rng, std::size_t ma, std::size_t mb, int lo = 0) {
  std::uniform_int_distribution<int> w(lo, 9), bit(0, 1);
  tightbell::RationalMatrix q(ma, mb);
  tightbell::BitMatrix f(ma, mb);
  Rational total = 0;
  for (std::size_t x = 0; x < ma; ++x)
    for (std::size_t y = 0; y < mb; ++y) {
      q(x, y) = w(rng);
      f(x, y) = static_cast<std::uint8_t>(bit(rng));
      total += q(x, y);
    }
  if (total == 0) {
    q(0, 0) = 1;
    total = 1;
  }
  for (std::size_t x = 0; x < ma; ++x)
    for (std::size_t y = 0; y < mb; ++y) q(x, y) /= total;
  return tightbell::build_game(std::move(q), std::move(f));
}

// Random exhaustive game: strictly positive weights.
inline tightbell::XorGame random_exhaustive_game(std::mt19937_64& rng, std::size_t ma, std::size_t mb) {
  return random_game(rng, ma, mb, 1);
}

inline tightbell::NlcSpec random_nlc_spec(std::mt19937_64& rng, unsigned n) {
  std::uniform_int_distribution<int> w(1, 9), bit(0, 1);
  tightbell::NlcSpec s;
  s.n = n;
  Rational total = 0;
  for (std::size_t z = 0; z < (std::size_t{1} << n); ++z) {
    s.q_tilde.push_back(w(rng));
    s.f_z.push_back(static_cast<std::uint8_t>(bit(rng)));
    total += s.q_tilde.back();
  }
  for (auto& v : s.q_tilde) v /= total;
  return s;
}

inline std::vector<std::vector<Rational>> phi(const tightbell::XorGame& g) {
  std::vector<std::vector<Rational>> p(g.m_a(), std::vector<Rational>(g.m_b()));
  for (std::size_t x = 0; x < g.m_a(); ++x)
    for (std::size_t y = 0; y < g.m_b(); ++y) p[x][y] = g.f()(x, y) ? -g.q()(x, y) : g.q()(x, y);
  return p;
}

inline int sign_bit(std::uint64_t mask, std::size_t i) { return (mask >> i) & 1 ? -1 : 1; }

// Phi times the lcm of its denominators, as integers.
template <class Int>
std::vector<std::vector<Int>> integer_phi(const tightbell::XorGame& g, tightbell::BigInt& scale) {
  scale = 1;
  for (std::size_t x = 0; x < g.m_a(); ++x)
    for (std::size_t y = 0; y < g.m_b(); ++y) scale = boost::multiprecision::lcm(scale, tightbell::denominator(g.q()(x, y)));
  const auto p = phi(g);
  std::vector<std::vector<Int>> out(g.m_a(), std::vector<Int>(g.m_b()));
  for (std::size_t x = 0; x < g.m_a(); ++x)
    for (std::size_t y = 0; y < g.m_b(); ++y)
      out[x][y] = static_cast<Int>(tightbell::numerator(p[x][y]) * (scale / tightbell::denominator(p[x][y])));
  return out;
}

// Value of every deterministic pair, (a, b) bit masks, by a plain double loop.
template <class Int, class Fn>
void for_each_pair_value(const std::vector<std::vector<Int>>& p, std::size_t ma, std::size_t mb, Fn&& fn) {
  for (std::uint64_t a = 0; a < (std::uint64_t{1} << ma); ++a)
    for (std::uint64_t b = 0; b < (std::uint64_t{1} << mb); ++b) {
      Int v = 0;
      for (std::size_t x = 0; x < ma; ++x)
        for (std::size_t y = 0; y < mb; ++y) v += sign_bit(a, x) * sign_bit(b, y) * p[x][y];
      fn(a, b, v);
    }
}

template <class Int>
std::vector<tightbell::DeterministicStrategy> brute_force(const tightbell::XorGame& g, Rational& best_out) {
  tightbell::BigInt scale;
  const auto p = integer_phi<Int>(g, scale);
  Int best = 0;
  bool first = true;
  for_each_pair_value(p, g.m_a(), g.m_b(), [&](std::uint64_t, std::uint64_t, const Int& v) {
    if (first || v > best) best = v;
    first = false;
  });
  std::vector<tightbell::DeterministicStrategy> out;
  for_each_pair_value(p, g.m_a(), g.m_b(), [&](std::uint64_t a, std::uint64_t b, const Int& v) {
    if (v != best) return;
    tightbell::DeterministicStrategy s;
    for (std::size_t x = 0; x < g.m_a(); ++x) s.alpha.push_back(sign_bit(a, x));
    for (std::size_t y = 0; y < g.m_b(); ++y) s.beta.push_back(sign_bit(b, y));
    out.push_back(std::move(s));
  });
  std::sort(out.begin(), out.end());
  best_out = Rational(tightbell::BigInt(best), scale);
  return out;
}

inline std::vector<tightbell::DeterministicStrategy> brute_force(const tightbell::XorGame& g, Rational& best) {
  tightbell::BigInt scale = 1;
  for (std::size_t x = 0; x < g.m_a(); ++x)
    for (std::size_t y = 0; y < g.m_b(); ++y) scale = boost::multiprecision::lcm(scale, tightbell::denominator(g.q()(x, y)));
  if (scale < (tightbell::BigInt(1) << 40)) return brute_force<std::int64_t>(g, best);
  return brute_force<tightbell::BigInt>(g, best);
}

// <alpha|Phi|beta> maximised over every deterministic pair: 2^(ma+mb) terms.
inline Rational brute_classical_bias(const tightbell::XorGame& g) {
  Rational best;
  brute_force(g, best);
  return best;
}

// Every optimal deterministic pair, sorted.
inline std::vector<tightbell::DeterministicStrategy> brute_optimal_pairs(const tightbell::XorGame& g) {
  Rational best;
  return brute_force(g, best);
}

// Plain Gaussian elimination over the rationals.
inline std::size_t rational_rank(std::vector<std::vector<Rational>> m) {
  if (m.empty()) return 0;
  const std::size_t cols = m.front().size();
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < m.size(); ++c) {
    std::size_t pivot = rank;
    while (pivot < m.size() && m[pivot][c] == 0) ++pivot;
    if (pivot == m.size()) continue;
    std::swap(m[pivot], m[rank]);
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (r == rank || m[r][c] == 0) continue;
      const Rational factor = m[r][c] / m[rank][c];
      for (std::size_t k = c; k < cols; ++k) m[r][k] -= factor * m[rank][k];
    }
    ++rank;
  }
  return rank;
}

inline std::size_t affine_dimension(const std::vector<std::vector<std::int64_t>>& pts) {
  std::vector<std::vector<Rational>> diffs;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    std::vector<Rational> d;
    for (std::size_t k = 0; k < pts[i].size(); ++k) d.push_back(Rational(pts[i][k] - pts[0][k]));
    diffs.push_back(std::move(d));
  }
  return rational_rank(std::move(diffs));
}

inline std::vector<std::int64_t> embed(const tightbell::DeterministicStrategy& s, bool correlation_only) {
  std::vector<std::int64_t> v;
  if (!correlation_only) {
    v.insert(v.end(), s.alpha.begin(), s.alpha.end());
    v.insert(v.end(), s.beta.begin(), s.beta.end());
  }
  for (int a : s.alpha)
    for (int b : s.beta) v.push_back(a * b);
  return v;
}

// ghat(u) = sum_z (-1)^{u.z} (-1)^{f(z)} qtilde(z), evaluated term by term.
inline std::vector<Rational> naive_hadamard(const tightbell::NlcSpec& s) {
  const std::size_t N = std::size_t{1} << s.n;
  std::vector<Rational> out(N);
  for (std::size_t u = 0; u < N; ++u)
    for (std::size_t z = 0; z < N; ++z) {
      const int parity = (std::popcount(u & z) + s.f_z[z]) & 1;
      out[u] += parity ? -s.q_tilde[z] : s.q_tilde[z];
    }
  return out;
}

}  // namespace oracle
