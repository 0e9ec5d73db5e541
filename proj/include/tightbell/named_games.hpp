#pragma once

#include <string>
#include <string_view>

#include "tightbell/error.hpp"
#include "tightbell/game.hpp"
#include "tightbell/nlc.hpp"

namespace tightbell {

enum class NamedGame { chsh, identity, nlc_and, appendix_d, single_entry };

inline NamedGame parse_named_game(std::string_view name) {
  if (name == "chsh") return NamedGame::chsh;
  if (name == "identity") return NamedGame::identity;
  if (name == "nlc-and" || name == "nlc_and") return NamedGame::nlc_and;
  if (name == "appendixd" || name == "appendix_d" || name == "appendix-d") return NamedGame::appendix_d;
  if (name == "single-entry" || name == "single_entry") return NamedGame::single_entry;
  throw Error(ErrorCode::unknown_name, "unknown game '" + std::string(name) + "'");
}

inline XorGame make_chsh() {
  const Rational quarter(1, 4);
  return build_game(RationalMatrix(2, 2, quarter), BitMatrix::from_rows({{0, 0}, {0, 1}}));
}

/// Phi = 2^-n I on 2^n inputs: x uniform, y = x, win with a = b.
inline XorGame make_identity(unsigned n) {
  if (n < 1 || n > 12) throw Error(ErrorCode::invalid_parameter, "identity needs 1 <= n <= 12");
  const std::size_t size = std::size_t{1} << n;
  RationalMatrix q(size, size);
  for (std::size_t x = 0; x < size; ++x) q(x, x) = Rational(1, size);
  return build_game(std::move(q), BitMatrix(size, size, 0));
}

/// Phi = lambda (I - 2^{1-n} J), lambda = 1 / (3 2^n - 4): eigenvalue +lambda
/// on the complement of the all-ones vector and -lambda on it.
inline XorGame make_appendix_d(unsigned n) {
  if (n < 2 || n > 12) throw Error(ErrorCode::invalid_parameter, "appendix_d needs 2 <= n <= 12");
  const std::size_t size = std::size_t{1} << n;
  const Rational lambda(1, 3 * size - 4);
  const Rational off = lambda * Rational(2, size);
  RationalMatrix q(size, size, off);
  BitMatrix f(size, size, 1);
  for (std::size_t x = 0; x < size; ++x) {
    q(x, x) = lambda - off;
    f(x, x) = 0;
  }
  return build_game(std::move(q), std::move(f));
}

inline XorGame make_single_entry() { return build_game(RationalMatrix(1, 1, Rational(1)), BitMatrix(1, 1, 0)); }

inline XorGame make_named(NamedGame which, unsigned n = 1) {
  switch (which) {
    case NamedGame::chsh: return make_chsh();
    case NamedGame::identity: return make_identity(n);
    case NamedGame::nlc_and:
      if (n < 1 || n > 12) throw Error(ErrorCode::invalid_parameter, "nlc_and needs 1 <= n <= 12");
      return build_nlc(nlc_and_spec(n));
    case NamedGame::appendix_d: return make_appendix_d(n);
    case NamedGame::single_entry: return make_single_entry();
  }
  throw Error(ErrorCode::unknown_name, "unknown game");
}

inline XorGame make_named(std::string_view name, unsigned n = 1) { return make_named(parse_named_game(name), n); }

}  // namespace tightbell
