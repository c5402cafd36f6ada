#pragma once

#include <boost/rational.hpp>

#include <charconv>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>

namespace vcsp {

using Rational = boost::rational<std::int64_t>;

template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;

  static bool leq(const Rational& a, const Rational& b) { return a <= b; }
  static bool less(const Rational& a, const Rational& b) { return a < b; }
  static bool eq(const Rational& a, const Rational& b) { return a == b; }

  static std::string format(const Rational& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
  }

  // Accepts "p", "p/q" and plain decimals "12.375". Throws std::invalid_argument.
  static Rational parse(std::string_view text) {
    if (text.empty()) throw std::invalid_argument("empty number");
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
      std::int64_t p = parse_int(text.substr(0, slash));
      std::int64_t q = parse_int(text.substr(slash + 1));
      if (q == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
      return Rational(p, q);
    }
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
      std::string_view whole = text.substr(0, dot);
      std::string_view frac = text.substr(dot + 1);
      if (frac.empty() || frac.size() > 17) {
        throw std::invalid_argument("unsupported decimal '" + std::string(text) + "'");
      }
      bool negative = !whole.empty() && whole.front() == '-';
      if (negative) whole.remove_prefix(1);
      std::int64_t w = whole.empty() ? 0 : parse_int(whole);
      std::int64_t f = parse_int(frac);
      if (w < 0 || f < 0) throw std::invalid_argument("malformed decimal '" + std::string(text) + "'");
      std::int64_t scale = 1;
      for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
      Rational r = Rational(w) + Rational(f, scale);
      return negative ? -r : r;
    }
    return Rational(parse_int(text));
  }

 private:
  static std::int64_t parse_int(std::string_view s) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
      throw std::invalid_argument("malformed number '" + std::string(s) + "'");
    }
    return v;
  }
};

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static constexpr double tolerance = 1e-9;

  static bool leq(double a, double b) { return a <= b + tolerance; }
  static bool less(double a, double b) { return a < b - tolerance; }
  static bool eq(double a, double b) { return std::fabs(a - b) <= tolerance; }

  static std::string format(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
  }

  static double parse(std::string_view text) {
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
      double q = parse(text.substr(slash + 1));
      if (q == 0.0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
      return parse(text.substr(0, slash)) / q;
    }
    double v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) {
      throw std::invalid_argument("malformed number '" + std::string(text) + "'");
    }
    return v;
  }
};

// A non-negative cost or the absorbing infinity element.
template <class S>
class ExtCost {
 public:
  using scalar_type = S;
  using traits = ScalarTraits<S>;

  ExtCost() = default;

  ExtCost(S v) : value_(std::move(v)) {  // NOLINT(google-explicit-constructor)
    if (value_ < S(0)) throw std::invalid_argument("costs must be non-negative");
  }

  template <std::integral I>
  ExtCost(I v) : ExtCost(S(static_cast<std::int64_t>(v))) {}  // NOLINT(google-explicit-constructor)

  static ExtCost infinity() {
    ExtCost c;
    c.infinite_ = true;
    return c;
  }

  bool is_finite() const { return !infinite_; }
  bool is_infinite() const { return infinite_; }

  const S& value() const {
    if (infinite_) throw std::logic_error("value() of infinite cost");
    return value_;
  }

  ExtCost& operator+=(const ExtCost& o) {
    if (infinite_) return *this;
    if (o.infinite_) {
      infinite_ = true;
      value_ = S(0);
      return *this;
    }
    value_ += o.value_;
    return *this;
  }

  friend ExtCost operator+(ExtCost a, const ExtCost& b) { return a += b; }

  friend bool operator==(const ExtCost& a, const ExtCost& b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
    return a.value_ == b.value_;
  }
  friend bool operator<(const ExtCost& a, const ExtCost& b) {
    if (a.infinite_) return false;
    if (b.infinite_) return true;
    return a.value_ < b.value_;
  }
  friend bool operator>(const ExtCost& a, const ExtCost& b) { return b < a; }
  friend bool operator<=(const ExtCost& a, const ExtCost& b) { return !(b < a); }
  friend bool operator>=(const ExtCost& a, const ExtCost& b) { return !(a < b); }

  std::string to_string() const { return infinite_ ? "inf" : traits::format(value_); }

  static ExtCost parse(std::string_view text) {
    if (text == "inf") return infinity();
    return ExtCost(traits::parse(text));
  }

  friend std::ostream& operator<<(std::ostream& os, const ExtCost& c) { return os << c.to_string(); }

 private:
  S value_{0};
  bool infinite_ = false;
};

// Comparisons honouring the scalar tolerance (exact for rationals).
template <class S>
bool cost_leq(const ExtCost<S>& a, const ExtCost<S>& b) {
  if (b.is_infinite()) return true;
  if (a.is_infinite()) return false;
  return ScalarTraits<S>::leq(a.value(), b.value());
}

template <class S>
bool cost_less(const ExtCost<S>& a, const ExtCost<S>& b) {
  if (a.is_infinite()) return false;
  if (b.is_infinite()) return true;
  return ScalarTraits<S>::less(a.value(), b.value());
}

template <class S>
bool cost_eq(const ExtCost<S>& a, const ExtCost<S>& b) {
  if (a.is_infinite() || b.is_infinite()) return a.is_infinite() == b.is_infinite();
  return ScalarTraits<S>::eq(a.value(), b.value());
}

using Cost = ExtCost<Rational>;
using FloatCost = ExtCost<double>;

template <class C>
concept CostType = requires { typename C::scalar_type; } &&
                   std::same_as<C, ExtCost<typename C::scalar_type>>;

}  // namespace vcsp
