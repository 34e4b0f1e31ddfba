#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace evidx {

/// Exact base-10 number: mantissa * 10^-scale, kept canonical (no trailing
/// fractional zeros), so 0.70 and 0.7 compare and print identically.
class Decimal {
 public:
  constexpr Decimal() = default;

  static Decimal from_int(std::int64_t value) { return Decimal(value, 0); }

  /// Plain decimal or scientific notation ("-0.70", "1e3", "+12.5").
  /// Returns nullopt on anything else or when more than 18 significant
  /// digits would be needed.
  static std::optional<Decimal> parse(std::string_view text);

  /// Like parse() but also accepts comma thousands separators ("5,417",
  /// "1,323,052.5") and surrounding whitespace.
  static std::optional<Decimal> parse_lenient(std::string_view text);

  std::int64_t mantissa() const { return mantissa_; }
  int scale() const { return scale_; }

  bool is_integer() const { return scale_ == 0; }
  std::optional<std::int64_t> to_int() const;
  double to_double() const;
  std::string to_string() const;

  Decimal operator+(const Decimal& other) const;
  Decimal operator-() const { return Decimal(-mantissa_, scale_); }

  friend bool operator==(const Decimal& a, const Decimal& b) = default;
  friend std::strong_ordering operator<=>(const Decimal& a, const Decimal& b);

 private:
  Decimal(std::int64_t mantissa, int scale);
  void canonicalize();

  std::int64_t mantissa_ = 0;
  int scale_ = 0;
};

/// Reduced fraction with positive denominator. Used for derived answers such
/// as means whose decimal expansion may not terminate.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t numerator, std::int64_t denominator);
  static Rational from_decimal(const Decimal& d);

  std::int64_t numerator() const { return num_; }
  std::int64_t denominator() const { return den_; }

  /// True when the decimal expansion terminates (denominator is 2^a 5^b).
  bool terminates() const;

  /// Exact decimal if it terminates, otherwise rounded half-up to `digits`
  /// fractional digits.
  Decimal to_decimal(int digits = 6) const;
  std::string to_string() const;  // "4599/11" or "20"
  double to_double() const;

  friend bool operator==(const Rational& a, const Rational& b) = default;

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// Scoring equality between a reported number and an exact derived value.
/// Terminating values require exact equality. Non-terminating values accept
/// the prediction when it equals the exact value rounded to the prediction's
/// own precision (at least two fractional digits).
bool numerically_equal(const Decimal& predicted, const Rational& exact);

}  // namespace evidx
