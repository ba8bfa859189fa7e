#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <vector>

#include "asynkit/bitvec.hpp"
#include "asynkit/signal.hpp"

namespace asynkit {

/// Total Boolean vector function B^m -> B^n, m, n in [1, 16], stored as a
/// truth table indexed by input row (coordinate 1 most significant).
/// Coordinate arguments (i, j) in the public API are 1-based.
class bool_fn {
public:
  static constexpr std::uint32_t max_arity = 16;

  bool_fn(std::uint32_t m, std::uint32_t n, std::vector<bitvec> table)
      : m_(m), n_(n), table_(std::move(table)) {
    if (m_ == 0 || m_ > max_arity || n_ == 0 || n_ > max_arity)
      throw error("WidthMismatch", "function arity must be in [1, 16]");
    if (table_.size() != (std::size_t{1} << m_))
      throw error("WidthMismatch", "truth table must have 2^m rows");
    for (const auto& v : table_)
      if (v.width() != n_) throw error("WidthMismatch", "truth table row width differs from n");
  }

  static bool_fn from_fn(std::uint32_t m, std::uint32_t n,
                         const std::function<bitvec(const bitvec&)>& fn) {
    std::vector<bitvec> t;
    t.reserve(std::size_t{1} << m);
    for (std::uint64_t i = 0; i < (std::uint64_t{1} << m); ++i)
      t.push_back(fn(bitvec::from_index(m, i)));
    return bool_fn(m, n, std::move(t));
  }

  static bool_fn identity(std::uint32_t m) {
    return from_fn(m, m, [](const bitvec& v) { return v; });
  }
  static bool_fn constant(std::uint32_t m, const bitvec& value) {
    return from_fn(m, value.width(), [&](const bitvec&) { return value; });
  }
  /// (lambda_1, ..., lambda_m) -> lambda_i, 1-based.
  static bool_fn projection(std::uint32_t m, std::uint32_t i) {
    return from_fn(m, 1, [&](const bitvec& v) { return bitvec{v.get(i - 1) ? 1 : 0}; });
  }
  static bool_fn and_fn(std::uint32_t m) {
    return from_fn(m, 1, [](const bitvec& v) { return bitvec{v.all_one() ? 1 : 0}; });
  }
  static bool_fn or_fn(std::uint32_t m) {
    return from_fn(m, 1, [](const bitvec& v) { return bitvec{v.all_zero() ? 0 : 1}; });
  }
  static bool_fn xor_fn(std::uint32_t m) {
    return from_fn(m, 1, [](const bitvec& v) {
      int s = 0;
      for (std::uint32_t i = 0; i < v.width(); ++i) s ^= v.get(i) ? 1 : 0;
      return bitvec{s};
    });
  }
  static bool_fn not_fn() {
    return from_fn(1, 1, [](const bitvec& v) { return v.complemented(); });
  }

  std::uint32_t arity_in() const { return m_; }
  std::uint32_t arity_out() const { return n_; }
  const std::vector<bitvec>& table() const { return table_; }

  bitvec apply(const bitvec& v) const {
    if (v.width() != m_) throw error("WidthMismatch", "apply with wrong input width");
    return table_[v.index()];
  }

  bool_fn complemented() const {
    return from_fn(m_, n_, [&](const bitvec& v) { return apply(v).complemented(); });
  }

  /// Same outputs, one extra (ignored) trailing input.
  bool_fn extended() const {
    return from_fn(m_ + 1, n_, [&](const bitvec& v) { return apply(v.slice(0, m_)); });
  }

  /// Input j replaced by input i (1-based).
  bool_fn substituted(std::uint32_t i, std::uint32_t j) const {
    check_coord(i, m_);
    check_coord(j, m_);
    return from_fn(m_, n_, [&](const bitvec& v) {
      bitvec w = v;
      w.set(j - 1, v.get(i - 1));
      return apply(w);
    });
  }

  bool depends_on(std::uint32_t i) const {
    check_coord(i, m_);
    for (std::uint64_t k = 0; k < (std::uint64_t{1} << m_); ++k) {
      bitvec v = bitvec::from_index(m_, k);
      bitvec w = v;
      w.set(i - 1, !v.get(i - 1));
      if (apply(v) != apply(w)) return true;
    }
    return false;
  }

  /// Removes input i (1-based). Requires the function not to depend on it.
  bool_fn dropped(std::uint32_t i) const {
    check_coord(i, m_);
    if (depends_on(i)) throw error("DependentInput", "cannot drop an input the function uses");
    if (m_ == 1) throw error("WidthMismatch", "cannot drop the only input");
    return from_fn(m_ - 1, n_, [&](const bitvec& v) {
      bitvec w(m_);
      for (std::uint32_t k = 0, src = 0; k < m_; ++k)
        w.set(k, k == i - 1 ? false : v.get(src++));
      return apply(w);
    });
  }

  friend bool operator==(const bool_fn&, const bool_fn&) = default;

  bool is_coord_symmetric() const {
    for (std::uint32_t k = 0; k + 1 < m_; ++k)
      for (std::uint64_t r = 0; r < (std::uint64_t{1} << m_); ++r) {
        bitvec v = bitvec::from_index(m_, r);
        bitvec w = v;
        w.set(k, v.get(k + 1));
        w.set(k + 1, v.get(k));
        if (apply(v) != apply(w)) return false;
      }
    return true;
  }

  bool is_rf_symmetric() const {
    for (std::uint64_t r = 0; r < (std::uint64_t{1} << m_); ++r) {
      bitvec v = bitvec::from_index(m_, r);
      if (apply(v.complemented()) != apply(v).complemented()) return false;
    }
    return true;
  }

  std::vector<bitvec> range() const {
    std::vector<bitvec> out = table_;
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  bool is_injective() const { return range().size() == table_.size(); }

private:
  static void check_coord(std::uint32_t i, std::uint32_t m) {
    if (i == 0 || i > m) throw error("WidthMismatch", "coordinate out of range");
  }

  std::uint32_t m_, n_;
  std::vector<bitvec> table_;
};

/// Outer after a tuple of inner functions applied to disjoint input blocks.
inline bool_fn compose(const bool_fn& outer, const std::vector<bool_fn>& parts) {
  std::uint32_t total_in = 0, total_mid = 0;
  for (const auto& p : parts) {
    total_in += p.arity_in();
    total_mid += p.arity_out();
  }
  if (total_mid != outer.arity_in())
    throw error("WidthMismatch", "composition arities do not line up");
  return bool_fn::from_fn(total_in, outer.arity_out(), [&](const bitvec& v) {
    bitvec mid(1);
    bool first = true;
    std::uint32_t off = 0;
    for (const auto& p : parts) {
      bitvec piece = p.apply(v.slice(off, p.arity_in()));
      mid = first ? piece : mid.concat(piece);
      first = false;
      off += p.arity_in();
    }
    return outer.apply(mid);
  });
}

inline bool_fn direct_product(const std::vector<bool_fn>& parts) {
  if (parts.empty()) throw error("WidthMismatch", "direct product of zero functions");
  std::uint32_t total_in = 0;
  std::uint32_t total_out = 0;
  for (const auto& p : parts) {
    total_in += p.arity_in();
    total_out += p.arity_out();
  }
  return bool_fn::from_fn(total_in, total_out, [&](const bitvec& v) {
    bitvec out(1);
    bool first = true;
    std::uint32_t off = 0;
    for (const auto& p : parts) {
      bitvec piece = p.apply(v.slice(off, p.arity_in()));
      out = first ? piece : out.concat(piece);
      first = false;
      off += p.arity_in();
    }
    return out;
  });
}

/// Whether equal F-values force equal G-values (F's partition refines G's).
inline bool partition_refines(const bool_fn& f, const bool_fn& g) {
  if (f.arity_in() != g.arity_in())
    throw error("WidthMismatch", "partition compare needs equal input arity");
  std::uint64_t rows = std::uint64_t{1} << f.arity_in();
  for (std::uint64_t a = 0; a < rows; ++a)
    for (std::uint64_t b = a + 1; b < rows; ++b) {
      bitvec va = bitvec::from_index(f.arity_in(), a);
      bitvec vb = bitvec::from_index(f.arity_in(), b);
      if (f.apply(va) == f.apply(vb) && g.apply(va) != g.apply(vb)) return false;
    }
  return true;
}

/// F applied to the signal value at every time.
inline signal map_pointwise(const bool_fn& f, const signal& u) {
  if (u.width() != f.arity_in())
    throw error("WidthMismatch", "pointwise map width differs from function arity");
  std::vector<sig_event> evs;
  for (const auto& e : u.events()) evs.push_back({e.t, f.apply(e.v)});
  std::optional<sig_tail> tl;
  if (u.tail()) {
    tl = sig_tail{u.tail()->start, u.tail()->period, {}};
    for (const auto& e : u.tail()->pattern) tl->pattern.push_back({e.t, f.apply(e.v)});
  }
  return signal(f.apply(u.initial()), std::move(evs), std::move(tl));
}

}  // namespace asynkit
