#include "ablab/rational.hpp"

#include <charconv>
#include <numeric>

#include "ablab/errors.hpp"

namespace ablab {

namespace {

std::int64_t checked(__int128 v) {
  if (v > INT64_MAX || v < -INT64_MAX) throw Error(ErrorCode::RangeError, "rational overflow");
  return static_cast<std::int64_t>(v);
}

std::string_view trim(std::string_view t) {
  while (!t.empty() && (t.front() == ' ' || t.front() == '\t')) t.remove_prefix(1);
  while (!t.empty() && (t.back() == ' ' || t.back() == '\t')) t.remove_suffix(1);
  return t;
}

std::int64_t parse_int(std::string_view t, std::string_view whole) {
  if (!t.empty() && t.front() == '+') t.remove_prefix(1);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
    throw Error(ErrorCode::InvalidArgument, "not a rational: '" + std::string(whole) + "'");
  }
  return v;
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw Error(ErrorCode::InvalidArgument, "rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  num_ = num / g;
  den_ = den / g;
}

std::string Rational::str() const {
  return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::operator+(const Rational& o) const {
  return Rational(checked(static_cast<__int128>(num_) * o.den_ + static_cast<__int128>(o.num_) * den_),
                  checked(static_cast<__int128>(den_) * o.den_));
}

Rational Rational::operator-(const Rational& o) const { return *this + (-o); }

Rational Rational::operator*(const Rational& o) const {
  return Rational(checked(static_cast<__int128>(num_) * o.num_),
                  checked(static_cast<__int128>(den_) * o.den_));
}

std::strong_ordering Rational::operator<=>(const Rational& o) const {
  const __int128 l = static_cast<__int128>(num_) * o.den_;
  const __int128 r = static_cast<__int128>(o.num_) * den_;
  return l <=> r;
}

Rational parse_rational(std::string_view text) {
  const std::string_view t = trim(text);
  const auto slash = t.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(t, text));
  return Rational(parse_int(trim(t.substr(0, slash)), text), parse_int(trim(t.substr(slash + 1)), text));
}

bool looks_rational(std::string_view text) {
  try {
    parse_rational(text);
    return true;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace ablab
