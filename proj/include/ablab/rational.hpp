#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace ablab {

/// Exact rational p/q in lowest terms with q > 0.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }
  bool is_integer() const noexcept { return den_ == 1; }
  double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

  /// "p/q" or "p" when q = 1.
  std::string str() const;

  Rational operator+(const Rational& o) const;
  Rational operator-(const Rational& o) const;
  Rational operator*(const Rational& o) const;
  Rational operator-() const { return Rational(-num_, den_); }
  bool operator==(const Rational&) const = default;
  std::strong_ordering operator<=>(const Rational& o) const;

 private:
  std::int64_t num_{0};
  std::int64_t den_{1};
};

/// Parses "p/q" or an integer "p" (optional sign, surrounding blanks allowed).
/// InvalidArgument on anything else, including q = 0.
Rational parse_rational(std::string_view text);

/// True when `text` is written as a rational or integer (no decimal point or
/// exponent).
bool looks_rational(std::string_view text);

}  // namespace ablab
