#include "evidx/decimal.hpp"

#include <cctype>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

namespace evidx {
namespace {

using i128 = __int128;

constexpr int kMaxDigits = 18;
constexpr int kMaxScale = 18;

i128 pow10(int n) {
  i128 r = 1;
  for (int i = 0; i < n; ++i) r *= 10;
  return r;
}

bool mul_checked(i128 a, i128 b, i128& out) { return !__builtin_mul_overflow(a, b, &out); }

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// value / 10^scale rendered without going through floating point.
std::string fixed_point(i128 value, int scale) {
  const bool negative = value < 0;
  i128 a = negative ? -value : value;
  std::string s;
  do {
    s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(a % 10)));
    a /= 10;
  } while (a > 0);
  if (scale > 0) {
    if (static_cast<int>(s.size()) <= scale) {
      s.insert(0, static_cast<std::size_t>(scale - static_cast<int>(s.size()) + 1), '0');
    }
    s.insert(s.size() - static_cast<std::size_t>(scale), 1, '.');
  }
  return negative ? "-" + s : s;
}

// "1,234,567.89" -> "1234567.89"; anything not following the 3-digit grouping
// is left untouched so that "1,2" stays invalid.
std::optional<std::string> strip_thousands(std::string_view s) {
  std::size_t pos = 0;
  std::string out;
  if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) out.push_back(s[pos++]);
  std::size_t lead = 0;
  while (pos < s.size() && is_digit(s[pos]) && lead < 4) {
    out.push_back(s[pos++]);
    ++lead;
  }
  if (lead == 0 || lead > 3 || pos >= s.size() || s[pos] != ',') return std::nullopt;
  while (pos < s.size() && s[pos] == ',') {
    ++pos;
    for (int i = 0; i < 3; ++i) {
      if (pos >= s.size() || !is_digit(s[pos])) return std::nullopt;
      out.push_back(s[pos++]);
    }
  }
  if (pos < s.size() && is_digit(s[pos])) return std::nullopt;
  out.append(s.substr(pos));
  return out;
}

}  // namespace

Decimal::Decimal(std::int64_t mantissa, int scale) : mantissa_(mantissa), scale_(scale) {
  canonicalize();
}

void Decimal::canonicalize() {
  while (scale_ > 0 && mantissa_ % 10 == 0) {
    mantissa_ /= 10;
    --scale_;
  }
  if (mantissa_ == 0) scale_ = 0;
}

std::optional<Decimal> Decimal::parse(std::string_view text) {
  std::size_t pos = 0;
  bool negative = false;
  if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
    negative = text[pos] == '-';
    ++pos;
  }
  std::string digits;
  int frac_len = 0;
  bool any_digit = false;
  while (pos < text.size() && is_digit(text[pos])) {
    digits.push_back(text[pos++]);
    any_digit = true;
  }
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    while (pos < text.size() && is_digit(text[pos])) {
      digits.push_back(text[pos++]);
      ++frac_len;
      any_digit = true;
    }
  }
  if (!any_digit) return std::nullopt;
  int exponent = 0;
  if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
    ++pos;
    bool exp_negative = false;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
      exp_negative = text[pos] == '-';
      ++pos;
    }
    if (pos >= text.size() || !is_digit(text[pos])) return std::nullopt;
    while (pos < text.size() && is_digit(text[pos])) {
      exponent = exponent * 10 + (text[pos++] - '0');
      if (exponent > 400) return std::nullopt;
    }
    if (exp_negative) exponent = -exponent;
  }
  if (pos != text.size()) return std::nullopt;

  int scale = frac_len - exponent;
  std::size_t first = digits.find_first_not_of('0');
  if (first == std::string::npos) return Decimal();
  digits.erase(0, first);
  while (!digits.empty() && digits.back() == '0') {
    digits.pop_back();
    --scale;
  }
  if (scale < 0) {
    digits.append(static_cast<std::size_t>(-scale), '0');
    scale = 0;
  }
  if (static_cast<int>(digits.size()) > kMaxDigits || scale > kMaxScale) return std::nullopt;
  std::int64_t mantissa = 0;
  for (char c : digits) mantissa = mantissa * 10 + (c - '0');
  return Decimal(negative ? -mantissa : mantissa, scale);
}

std::optional<Decimal> Decimal::parse_lenient(std::string_view text) {
  text = trim(text);
  if (auto plain = parse(text)) return plain;
  if (auto stripped = strip_thousands(text)) return parse(*stripped);
  return std::nullopt;
}

std::optional<std::int64_t> Decimal::to_int() const {
  if (scale_ != 0) return std::nullopt;
  return mantissa_;
}

double Decimal::to_double() const { return std::strtod(to_string().c_str(), nullptr); }

std::string Decimal::to_string() const { return fixed_point(mantissa_, scale_); }

Decimal Decimal::operator+(const Decimal& other) const {
  const int scale = std::max(scale_, other.scale_);
  const i128 sum = static_cast<i128>(mantissa_) * pow10(scale - scale_) +
                   static_cast<i128>(other.mantissa_) * pow10(scale - other.scale_);
  if (sum > INT64_MAX || sum < INT64_MIN) throw std::overflow_error("decimal addition overflow");
  return Decimal(static_cast<std::int64_t>(sum), scale);
}

std::strong_ordering operator<=>(const Decimal& a, const Decimal& b) {
  const int scale = std::max(a.scale_, b.scale_);
  const i128 lhs = static_cast<i128>(a.mantissa_) * pow10(scale - a.scale_);
  const i128 rhs = static_cast<i128>(b.mantissa_) * pow10(scale - b.scale_);
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

Rational::Rational(std::int64_t numerator, std::int64_t denominator) : num_(numerator), den_(denominator) {
  if (den_ == 0) throw std::invalid_argument("rational with zero denominator");
  if (den_ < 0) {
    num_ = -num_;
    den_ = -den_;
  }
  const std::int64_t g = std::gcd(num_, den_);
  if (g > 1) {
    num_ /= g;
    den_ /= g;
  }
}

Rational Rational::from_decimal(const Decimal& d) {
  return Rational(d.mantissa(), static_cast<std::int64_t>(pow10(d.scale())));
}

bool Rational::terminates() const {
  std::int64_t d = den_;
  while (d % 2 == 0) d /= 2;
  while (d % 5 == 0) d /= 5;
  return d == 1;
}

Decimal Rational::to_decimal(int digits) const {
  if (terminates()) {
    for (int k = 0; k <= kMaxScale; ++k) {
      const i128 p = pow10(k);
      if (p % den_ == 0) return *Decimal::parse(fixed_point(static_cast<i128>(num_) * (p / den_), k));
    }
  }
  const bool neg = num_ < 0;
  const i128 a = neg ? -static_cast<i128>(num_) : static_cast<i128>(num_);
  const i128 q = (2 * a * pow10(digits) + den_) / (2 * static_cast<i128>(den_));
  return *Decimal::parse(fixed_point(neg ? -q : q, digits));
}

std::string Rational::to_string() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

double Rational::to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

bool numerically_equal(const Decimal& predicted, const Rational& exact) {
  // predicted = m / 10^s ; exact = n / d
  const i128 m = predicted.mantissa();
  const int s = predicted.scale();
  const i128 n = exact.numerator();
  const i128 d = exact.denominator();
  if (exact.terminates()) {
    i128 lhs, rhs;
    if (!mul_checked(m, d, lhs) || !mul_checked(n, pow10(s), rhs)) return false;
    return lhs == rhs;
  }
  const int digits = std::max(s, 2);
  // |m * 10^(digits-s) / 10^digits - n/d| < 1/2 * 10^-digits
  // <=> |2 * (m * 10^(digits-s) * d - n * 10^digits)| < d
  i128 a, b, lhs, rhs;
  if (!mul_checked(m, pow10(digits - s), a) || !mul_checked(a, d, lhs)) return false;
  if (!mul_checked(n, pow10(digits), b)) return false;
  rhs = lhs - b;
  if (rhs < 0) rhs = -rhs;
  return 2 * rhs < d;
}

}  // namespace evidx
