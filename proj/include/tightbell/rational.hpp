#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "tightbell/error.hpp"

namespace tightbell {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt numerator(const Rational& r) { return boost::multiprecision::numerator(r); }
inline BigInt denominator(const Rational& r) { return boost::multiprecision::denominator(r); }

inline Rational abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// Canonical text form: "p/q" in lowest terms, or "p" when the denominator is 1.
inline std::string to_string(const Rational& r) {
  const BigInt den = denominator(r);
  if (den == 1) return numerator(r).str();
  return numerator(r).str() + "/" + den.str();
}

namespace detail {

inline BigInt parse_integer(std::string_view s, std::string_view full) {
  if (s.empty()) throw Error(ErrorCode::parse_error, "malformed rational '" + std::string(full) + "'");
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw Error(ErrorCode::parse_error, "malformed rational '" + std::string(full) + "'");
  }
  while (s.size() > 1 && s.front() == '0') s.remove_prefix(1);  // cpp_int reads a leading 0 as octal
  return BigInt(std::string(s));
}

inline BigInt pow10(long e) {
  BigInt r = 1;
  for (long i = 0; i < e; ++i) r *= 10;
  return r;
}

}  // namespace detail

/// Parses "p/q", an integer, or a finite decimal such as "-0.125" or "2.5e-3".
/// The result is exact: decimals are read as the rational they denote.
inline Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  Rational value;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    BigInt num = detail::parse_integer(s.substr(0, slash), text);
    BigInt den = detail::parse_integer(s.substr(slash + 1), text);
    if (den == 0) throw Error(ErrorCode::parse_error, "zero denominator in '" + std::string(text) + "'");
    value = Rational(num, den);
  } else {
    long exponent = 0;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
      std::string_view exp = s.substr(e + 1);
      bool exp_negative = false;
      if (!exp.empty() && (exp.front() == '-' || exp.front() == '+')) {
        exp_negative = exp.front() == '-';
        exp.remove_prefix(1);
      }
      BigInt e_val = detail::parse_integer(exp, text);
      if (e_val > 4096) throw Error(ErrorCode::parse_error, "exponent too large in '" + std::string(text) + "'");
      exponent = e_val.convert_to<long>();
      if (exp_negative) exponent = -exponent;
      s = s.substr(0, e);
    }
    std::string digits;
    long frac_digits = 0;
    if (auto dot = s.find('.'); dot != std::string_view::npos) {
      std::string_view ip = s.substr(0, dot);
      std::string_view fp = s.substr(dot + 1);
      if (ip.empty() && fp.empty())
        throw Error(ErrorCode::parse_error, "malformed rational '" + std::string(text) + "'");
      digits = std::string(ip) + std::string(fp);
      frac_digits = static_cast<long>(fp.size());
    } else {
      digits = std::string(s);
    }
    BigInt mantissa = detail::parse_integer(digits, text);
    long scale = exponent - frac_digits;
    if (scale >= 0)
      value = Rational(mantissa * detail::pow10(scale));
    else
      value = Rational(mantissa, detail::pow10(-scale));
  }
  return negative ? Rational(-value) : value;
}

/// Dense row-major matrix used for exact (rational, integer) data.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, const T& fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix from_rows(const std::vector<std::vector<T>>& rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.front().size();
    Matrix m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
      if (rows[i].size() != c) throw Error(ErrorCode::shape_mismatch, "ragged matrix rows");
      for (std::size_t j = 0; j < c; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  Matrix transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  const std::vector<T>& data() const noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using RationalMatrix = Matrix<Rational>;

}  // namespace tightbell
