#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "asynkit/rational.hpp"

namespace asynkit {

/// Fixed-width vector over {0,1}. Coordinates are numbered 1..width in the
/// source-material convention; internally bit i-1 holds coordinate i.
/// Coordinate 1 is the most significant bit of `index()`.
class bitvec {
public:
  static constexpr std::uint32_t max_width = 48;

  bitvec() = default;
  explicit bitvec(std::uint32_t width, std::uint64_t bits = 0) : width_(width), bits_(bits) {
    check_width(width);
    bits_ &= mask();
  }
  bitvec(std::initializer_list<int> vals) : width_(static_cast<std::uint32_t>(vals.size())) {
    check_width(width_);
    std::uint32_t i = 0;
    for (int v : vals) set(i++, v != 0);
  }

  std::uint32_t width() const { return width_; }

  /// Coordinate i+1, i in [0, width).
  bool get(std::uint32_t i) const { return (bits_ >> i) & 1u; }
  void set(std::uint32_t i, bool v) {
    if (v)
      bits_ |= (std::uint64_t{1} << i);
    else
      bits_ &= ~(std::uint64_t{1} << i);
  }

  /// Row index with coordinate 1 most significant.
  std::uint64_t index() const {
    std::uint64_t idx = 0;
    for (std::uint32_t i = 0; i < width_; ++i) idx = (idx << 1) | (get(i) ? 1u : 0u);
    return idx;
  }
  static bitvec from_index(std::uint32_t width, std::uint64_t idx) {
    bitvec v(width);
    for (std::uint32_t i = 0; i < width; ++i)
      v.set(i, (idx >> (width - 1 - i)) & 1u);
    return v;
  }

  bitvec complemented() const { return bitvec(width_, ~bits_ & mask()); }

  bitvec concat(const bitvec& o) const {
    bitvec r(width_ + o.width_);
    for (std::uint32_t i = 0; i < width_; ++i) r.set(i, get(i));
    for (std::uint32_t i = 0; i < o.width_; ++i) r.set(width_ + i, o.get(i));
    return r;
  }

  /// Coordinates [from+1, from+len] as a new vector.
  bitvec slice(std::uint32_t from, std::uint32_t len) const {
    if (from + len > width_) throw error("WidthMismatch", "slice out of range");
    bitvec r(len);
    for (std::uint32_t i = 0; i < len; ++i) r.set(i, get(from + i));
    return r;
  }

  bitvec permuted(const std::vector<std::uint32_t>& perm) const {
    if (perm.size() != width_) throw error("WidthMismatch", "permutation size != width");
    bitvec r(width_);
    for (std::uint32_t i = 0; i < width_; ++i) r.set(i, get(perm[i]));
    return r;
  }

  bool all_zero() const { return bits_ == 0; }
  bool all_one() const { return bits_ == mask(); }

  /// "0101" with coordinate 1 leftmost.
  std::string str() const {
    std::string s(width_, '0');
    for (std::uint32_t i = 0; i < width_; ++i)
      if (get(i)) s[i] = '1';
    return s;
  }
  static bitvec parse(const std::string& text) {
    check_width(static_cast<std::uint32_t>(text.size()));
    bitvec v(static_cast<std::uint32_t>(text.size()));
    for (std::uint32_t i = 0; i < v.width_; ++i) {
      char c = text[i];
      if (c != '0' && c != '1') throw error("BadBits", "bad bit string '" + text + "'");
      v.set(i, c == '1');
    }
    return v;
  }

  friend bool operator==(const bitvec&, const bitvec&) = default;
  friend std::strong_ordering operator<=>(const bitvec& a, const bitvec& b) {
    if (auto c = a.width_ <=> b.width_; c != 0) return c;
    return a.index() <=> b.index();
  }

private:
  static void check_width(std::uint32_t w) {
    if (w == 0 || w > max_width) throw error("WidthMismatch", "width must be in [1, 48]");
  }
  std::uint64_t mask() const {
    return width_ >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << width_) - 1u);
  }

  std::uint32_t width_ = 1;
  std::uint64_t bits_ = 0;
};

}  // namespace asynkit
