#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace asynkit {

/// Error raised by any asynkit operation whose contract is violated.
/// `code()` is a stable machine-readable identifier (e.g. "WidthMismatch").
class error : public std::runtime_error {
public:
  error(std::string code, const std::string& what)
      : std::runtime_error(code + ": " + what), code_(std::move(code)) {}

  const std::string& code() const { return code_; }

private:
  std::string code_;
};

/// Exact rational number. Invariants: den > 0, gcd(|num|, den) == 1.
/// Magnitudes stay desk-scale here (event times, periods), so 64-bit
/// numerator/denominator with 128-bit intermediates is ample.
class rat {
public:
  constexpr rat() = default;
  constexpr rat(long long n) : num_(n), den_(1) {}  // NOLINT: implicit by design
  rat(long long n, long long d) : num_(n), den_(d) { normalize(); }

  long long num() const { return num_; }
  long long den() const { return den_; }

  bool is_integer() const { return den_ == 1; }

  friend rat operator+(const rat& a, const rat& b) {
    return rat(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend rat operator-(const rat& a, const rat& b) {
    return rat(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
  }
  friend rat operator*(const rat& a, const rat& b) {
    return rat(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend rat operator/(const rat& a, const rat& b) {
    if (b.num_ == 0) throw error("DivisionByZero", "rational division by zero");
    return rat(a.num_ * b.den_, a.den_ * b.num_);
  }
  rat operator-() const {
    rat r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
  }
  rat& operator+=(const rat& o) { return *this = *this + o; }
  rat& operator-=(const rat& o) { return *this = *this - o; }
  rat& operator*=(const rat& o) { return *this = *this * o; }
  rat& operator/=(const rat& o) { return *this = *this / o; }

  friend bool operator==(const rat& a, const rat& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const rat& a, const rat& b) {
    auto l = static_cast<__int128>(a.num_) * b.den_;
    auto r = static_cast<__int128>(b.num_) * a.den_;
    return l < r ? std::strong_ordering::less
         : l > r ? std::strong_ordering::greater
                 : std::strong_ordering::equal;
  }

  /// Largest integer <= value.
  long long floor() const {
    long long q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return q;
  }

  /// "P" when integral, else "P/Q".
  std::string str() const {
    std::string s = std::to_string(num_);
    if (den_ != 1) s += "/" + std::to_string(den_);
    return s;
  }

  /// Parses "P" or "P/Q" with optional sign. Throws error("BadRational").
  static rat parse(const std::string& text) {
    std::size_t slash = text.find('/');
    try {
      std::size_t used = 0;
      if (slash == std::string::npos) {
        long long n = std::stoll(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return rat(n);
      }
      long long n = std::stoll(text.substr(0, slash), &used);
      if (used != slash) throw std::invalid_argument(text);
      long long d = std::stoll(text.substr(slash + 1), &used);
      if (used != text.size() - slash - 1) throw std::invalid_argument(text);
      return rat(n, d);
    } catch (const std::exception&) {
      throw error("BadRational", "cannot parse rational '" + text + "'");
    }
  }

private:
  void normalize() {
    if (den_ == 0) throw error("DivisionByZero", "rational with zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    long long g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  long long num_ = 0;
  long long den_ = 1;
};

/// Least positive rational that is an integer multiple of both arguments.
inline rat rat_lcm(const rat& a, const rat& b) {
  long long n = std::lcm(a.num() < 0 ? -a.num() : a.num(), b.num() < 0 ? -b.num() : b.num());
  long long d = std::gcd(a.den(), b.den());
  return rat(n, d);
}

/// a mod p into [0, p), p > 0.
inline rat rat_mod(const rat& a, const rat& p) {
  rat k = (a / p).floor();
  return a - k * p;
}

inline rat rat_min(const rat& a, const rat& b) { return a < b ? a : b; }
inline rat rat_max(const rat& a, const rat& b) { return a < b ? b : a; }

}  // namespace asynkit
