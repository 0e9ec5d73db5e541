#pragma once

// Two-player XOR games: validated construction, the signed game matrix,
// the exhaustive-game reduction and evaluation of behaviours.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "tightbell/error.hpp"
#include "tightbell/rational.hpp"

namespace tightbell {

using BitMatrix = Matrix<std::uint8_t>;

class XorGame;
XorGame build_game(RationalMatrix q, BitMatrix f);

/// Prior q(x,y) over question pairs and winning predicate f(x,y): the players
/// win when their output bits satisfy a xor b = f(x,y). Instances are only
/// obtainable through build_game, so every XorGame in circulation is valid.
class XorGame {
 public:
  std::size_t m_a() const noexcept { return q_.rows(); }
  std::size_t m_b() const noexcept { return q_.cols(); }
  const RationalMatrix& q() const noexcept { return q_; }
  const BitMatrix& f() const noexcept { return f_; }

  /// Same game with the roles of Alice and Bob exchanged.
  XorGame transposed() const { return XorGame(q_.transposed(), f_.transposed()); }

  friend bool operator==(const XorGame&, const XorGame&) = default;

 private:
  XorGame(RationalMatrix q, BitMatrix f) : q_(std::move(q)), f_(std::move(f)) {}
  friend XorGame build_game(RationalMatrix q, BitMatrix f);

  RationalMatrix q_;
  BitMatrix f_;
};

/// Validates and wraps (q, f). Normalization is checked, never applied.
inline XorGame build_game(RationalMatrix q, BitMatrix f) {
  if (q.rows() == 0 || q.cols() == 0)
    throw Error(ErrorCode::shape_mismatch, "game needs at least one input per player");
  if (q.rows() != f.rows() || q.cols() != f.cols())
    throw Error(ErrorCode::shape_mismatch, "prior and predicate shapes differ");
  Rational total = 0;
  for (std::size_t x = 0; x < q.rows(); ++x) {
    for (std::size_t y = 0; y < q.cols(); ++y) {
      if (q(x, y) < 0) throw Error(ErrorCode::negative_prior, "q(" + std::to_string(x) + "," + std::to_string(y) + ") < 0");
      if (f(x, y) > 1) throw Error(ErrorCode::parse_error, "predicate entries must be 0 or 1");
      total += q(x, y);
    }
  }
  if (total != 1) throw Error(ErrorCode::not_normalized, "prior sums to " + to_string(total));
  return XorGame(std::move(q), std::move(f));
}

/// Phi(x,y) = (-1)^f(x,y) q(x,y), exact.
inline RationalMatrix game_matrix(const XorGame& g) {
  RationalMatrix phi(g.m_a(), g.m_b());
  for (std::size_t x = 0; x < g.m_a(); ++x)
    for (std::size_t y = 0; y < g.m_b(); ++y) phi(x, y) = g.f()(x, y) ? Rational(-g.q()(x, y)) : g.q()(x, y);
  return phi;
}

inline Matrix<double> game_matrix_double(const XorGame& g) {
  const RationalMatrix phi = game_matrix(g);
  Matrix<double> out(phi.rows(), phi.cols());
  for (std::size_t x = 0; x < phi.rows(); ++x)
    for (std::size_t y = 0; y < phi.cols(); ++y) out(x, y) = to_double(phi(x, y));
  return out;
}

/// A pair of deterministic local strategies, one +-1 output sign per input.
struct DeterministicStrategy {
  std::vector<int> alpha;
  std::vector<int> beta;

  friend bool operator==(const DeterministicStrategy&, const DeterministicStrategy&) = default;
  friend auto operator<=>(const DeterministicStrategy&, const DeterministicStrategy&) = default;
};

inline bool is_valid(const DeterministicStrategy& s) {
  auto ok = [](const std::vector<int>& v) {
    for (int e : v)
      if (e != 1 && e != -1) return false;
    return !v.empty();
  };
  return ok(s.alpha) && ok(s.beta);
}

/// Exact value <alpha|Phi|beta> of a deterministic pair.
inline Rational strategy_bias(const XorGame& g, const DeterministicStrategy& s) {
  if (s.alpha.size() != g.m_a() || s.beta.size() != g.m_b())
    throw Error(ErrorCode::shape_mismatch, "strategy does not match game dimensions");
  Rational xi = 0;
  for (std::size_t x = 0; x < g.m_a(); ++x) {
    for (std::size_t y = 0; y < g.m_b(); ++y) {
      if (g.q()(x, y) == 0) continue;
      const int sign = s.alpha[x] * s.beta[y] * (g.f()(x, y) ? -1 : 1);
      if (sign > 0)
        xi += g.q()(x, y);
      else
        xi -= g.q()(x, y);
    }
  }
  return xi;
}

/// Behaviour in the (alpha, beta, C) parametrization: first moments of each
/// party and the correlator matrix c(x,y) = <(-1)^(a+b)>.
struct Behaviour {
  std::vector<double> alpha;
  std::vector<double> beta;
  Matrix<double> c;
};

/// Joint distribution p(a,b|x,y) for a,b in {0,1}, indexed [2a+b].
inline std::array<double, 4> probabilities(const Behaviour& b, std::size_t x, std::size_t y) {
  std::array<double, 4> p{};
  for (int a = 0; a < 2; ++a) {
    for (int bb = 0; bb < 2; ++bb) {
      const double sa = a ? -1.0 : 1.0;
      const double sb = bb ? -1.0 : 1.0;
      p[2 * a + bb] = (1.0 + sa * b.alpha[x] + sb * b.beta[y] + sa * sb * b.c(x, y)) / 4.0;
    }
  }
  return p;
}

/// True when every reconstructed probability is >= -tol.
inline bool is_physical(const Behaviour& b, double tol = 0.0) {
  for (std::size_t x = 0; x < b.alpha.size(); ++x)
    for (std::size_t y = 0; y < b.beta.size(); ++y)
      for (double p : probabilities(b, x, y))
        if (p < -tol) return false;
  return true;
}

/// Exact no-signalling check: Alice's marginal may not depend on y and Bob's
/// may not depend on x. Comparisons are exact equalities on doubles.
inline bool satisfies_no_signalling(const Behaviour& b) {
  const std::size_t ma = b.alpha.size();
  const std::size_t mb = b.beta.size();
  for (std::size_t x = 0; x < ma; ++x) {
    const auto p0 = probabilities(b, x, 0);
    for (std::size_t y = 1; y < mb; ++y) {
      const auto p = probabilities(b, x, y);
      if (p[0] + p[1] != p0[0] + p0[1] || p[2] + p[3] != p0[2] + p0[3]) return false;
    }
  }
  for (std::size_t y = 0; y < mb; ++y) {
    const auto p0 = probabilities(b, 0, y);
    for (std::size_t x = 1; x < ma; ++x) {
      const auto p = probabilities(b, x, y);
      if (p[0] + p[2] != p0[0] + p0[2] || p[1] + p[3] != p0[1] + p0[3]) return false;
    }
  }
  return true;
}

/// xi = sum_xy Phi(x,y) c(x,y); the winning probability is (1 + xi) / 2.
inline double bias_of_behaviour(const XorGame& g, const Behaviour& b) {
  if (b.c.rows() != g.m_a() || b.c.cols() != g.m_b() || b.alpha.size() != g.m_a() || b.beta.size() != g.m_b())
    throw Error(ErrorCode::shape_mismatch, "behaviour does not match game dimensions");
  // Summed exactly and rounded once, so a perfect behaviour scores exactly 1.
  const RationalMatrix phi = game_matrix(g);
  Rational xi = 0;
  for (std::size_t x = 0; x < g.m_a(); ++x)
    for (std::size_t y = 0; y < g.m_b(); ++y)
      if (b.c(x, y) != 0.0) xi += phi(x, y) * Rational(b.c(x, y));
  return to_double(xi);
}

inline double winning_probability(double bias) { return 0.5 * (1.0 + bias); }

inline Behaviour behaviour_of_strategy(const DeterministicStrategy& s) {
  Behaviour b;
  b.alpha.assign(s.alpha.begin(), s.alpha.end());
  b.beta.assign(s.beta.begin(), s.beta.end());
  b.c = Matrix<double>(s.alpha.size(), s.beta.size());
  for (std::size_t x = 0; x < s.alpha.size(); ++x)
    for (std::size_t y = 0; y < s.beta.size(); ++y) b.c(x, y) = static_cast<double>(s.alpha[x] * s.beta[y]);
  return b;
}

/// Uniformly random local bits with a xor b = f(x,y) always: wins every XOR
/// game with certainty and is no-signalling.
inline Behaviour ns_perfect_behaviour(const XorGame& g) {
  Behaviour b;
  b.alpha.assign(g.m_a(), 0.0);
  b.beta.assign(g.m_b(), 0.0);
  b.c = Matrix<double>(g.m_a(), g.m_b());
  for (std::size_t x = 0; x < g.m_a(); ++x)
    for (std::size_t y = 0; y < g.m_b(); ++y) b.c(x, y) = g.f()(x, y) ? -1.0 : 1.0;
  return b;
}

struct ReductionMap {
  std::vector<std::size_t> kept_rows;
  std::vector<std::size_t> kept_cols;
  std::pair<std::size_t, std::size_t> original_dims;

  bool is_identity() const {
    return kept_rows.size() == original_dims.first && kept_cols.size() == original_dims.second;
  }
};

inline bool is_exhaustive(const XorGame& g) {
  for (std::size_t x = 0; x < g.m_a(); ++x) {
    bool any = false;
    for (std::size_t y = 0; y < g.m_b() && !any; ++y) any = g.q()(x, y) != 0;
    if (!any) return false;
  }
  for (std::size_t y = 0; y < g.m_b(); ++y) {
    bool any = false;
    for (std::size_t x = 0; x < g.m_a() && !any; ++x) any = g.q()(x, y) != 0;
    if (!any) return false;
  }
  return true;
}

/// Drops inputs that are never asked. Biases are unaffected because the
/// dropped coordinates carry zero weight.
inline std::pair<XorGame, ReductionMap> reduce_exhaustive(const XorGame& g) {
  ReductionMap map;
  map.original_dims = {g.m_a(), g.m_b()};
  for (std::size_t x = 0; x < g.m_a(); ++x) {
    for (std::size_t y = 0; y < g.m_b(); ++y) {
      if (g.q()(x, y) != 0) {
        map.kept_rows.push_back(x);
        break;
      }
    }
  }
  for (std::size_t y = 0; y < g.m_b(); ++y) {
    for (std::size_t x = 0; x < g.m_a(); ++x) {
      if (g.q()(x, y) != 0) {
        map.kept_cols.push_back(y);
        break;
      }
    }
  }
  if (map.kept_rows.empty() || map.kept_cols.empty()) throw Error(ErrorCode::empty_game, "prior is identically zero");
  RationalMatrix q(map.kept_rows.size(), map.kept_cols.size());
  BitMatrix f(map.kept_rows.size(), map.kept_cols.size());
  for (std::size_t i = 0; i < map.kept_rows.size(); ++i) {
    for (std::size_t j = 0; j < map.kept_cols.size(); ++j) {
      q(i, j) = g.q()(map.kept_rows[i], map.kept_cols[j]);
      f(i, j) = g.f()(map.kept_rows[i], map.kept_cols[j]);
    }
  }
  return {build_game(std::move(q), std::move(f)), std::move(map)};
}

/// Number of free (dropped) coordinates a lifted strategy carries.
inline std::size_t free_coordinates(const ReductionMap& map) {
  return (map.original_dims.first - map.kept_rows.size()) + (map.original_dims.second - map.kept_cols.size());
}

/// Lifts a strategy of the reduced game to the original index set. Bit i of
/// `completion` fixes the i-th dropped coordinate (Alice's first, then Bob's)
/// to -1 when set and +1 otherwise.
inline DeterministicStrategy lift_strategy(const DeterministicStrategy& reduced, const ReductionMap& map,
                                           std::uint64_t completion) {
  DeterministicStrategy out;
  out.alpha.assign(map.original_dims.first, 0);
  out.beta.assign(map.original_dims.second, 0);
  for (std::size_t i = 0; i < map.kept_rows.size(); ++i) out.alpha[map.kept_rows[i]] = reduced.alpha[i];
  for (std::size_t j = 0; j < map.kept_cols.size(); ++j) out.beta[map.kept_cols[j]] = reduced.beta[j];
  std::size_t bit = 0;
  for (auto& a : out.alpha)
    if (a == 0) a = (completion >> bit++) & 1 ? -1 : 1;
  for (auto& b : out.beta)
    if (b == 0) b = (completion >> bit++) & 1 ? -1 : 1;
  return out;
}

}  // namespace tightbell
