#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "asynkit/bitvec.hpp"
#include "asynkit/rational.hpp"

namespace asynkit {

/// One switch: the signal takes value `v` on [t, next switch).
struct sig_event {
  rat t;
  bitvec v;
  friend bool operator==(const sig_event&, const sig_event&) = default;
  friend std::strong_ordering operator<=>(const sig_event&, const sig_event&) = default;
};

/// Periodic continuation: from `start` on, the value at start + k*period + o
/// is the pattern value at offset o. Offsets live in [0, period), start at 0.
struct sig_tail {
  rat start;
  rat period;
  std::vector<sig_event> pattern;
  friend bool operator==(const sig_tail&, const sig_tail&) = default;
  friend std::strong_ordering operator<=>(const sig_tail&, const sig_tail&) = default;
};

/// Piecewise-constant, right-continuous map R -> {0,1}^w: constant before its
/// first switch (at time >= 0), finitely many switches, optionally followed by
/// an ultimately periodic tail. Construction canonicalizes, and two signals
/// are equal as functions iff their canonical forms are identical:
///   - no-op switches are merged (transient, in-pattern, seam, cycle wrap),
///   - the tail pattern is primitive (not a repetition of a shorter cycle),
///   - the tail start is minimal (transient events replicating the periodic
///     structure are absorbed into the tail).
class signal {
public:
  explicit signal(bitvec initial, std::vector<sig_event> events = {},
                  std::optional<sig_tail> tail = {})
      : initial_(initial), events_(std::move(events)), tail_(std::move(tail)) {
    validate();
    normalize();
  }

  static signal constant(bitvec v) { return signal(v); }

  /// from before t, to from t on.
  static signal step(bitvec from, bitvec to, rat t) {
    return signal(from, {{t, to}});
  }

  /// Width-1 characteristic function of [t, infinity).
  static signal unit_step(rat t) { return step(bitvec{0}, bitvec{1}, t); }

  std::uint32_t width() const { return initial_.width(); }
  const bitvec& initial() const { return initial_; }
  const std::vector<sig_event>& events() const { return events_; }
  const std::optional<sig_tail>& tail() const { return tail_; }

  /// Value at time t.
  bitvec at(const rat& t) const {
    if (tail_ && t >= tail_->start) {
      rat ph = rat_mod(t - tail_->start, tail_->period);
      const sig_event* last = &tail_->pattern.front();
      for (const auto& e : tail_->pattern)
        if (e.t <= ph) last = &e;
      return last->v;
    }
    bitvec v = initial_;
    for (const auto& e : events_) {
      if (e.t > t) break;
      v = e.v;
    }
    return v;
  }

  /// Left limit at time t (value just before t).
  bitvec before(const rat& t) const {
    if (tail_ && t > tail_->start) {
      rat ph = rat_mod(t - tail_->start, tail_->period);
      if (ph == rat(0)) return tail_->pattern.back().v;
      bitvec v = tail_->pattern.back().v;
      for (const auto& e : tail_->pattern) {
        if (e.t >= ph) break;
        v = e.v;
      }
      return v;
    }
    bitvec v = initial_;
    for (const auto& e : events_) {
      if (e.t >= t) break;
      v = e.v;
    }
    return v;
  }

  bool is_constant() const { return events_.empty() && !tail_; }

  /// min{ t : before(t) != at(t) }, absent for constant signals.
  std::optional<rat> first_switch() const {
    if (!events_.empty()) return events_.front().t;
    if (tail_) return tail_->start;
    return std::nullopt;
  }

  bool eventually_constant() const { return !tail_.has_value(); }

  /// Final value when the signal is eventually constant.
  std::optional<bitvec> limit() const {
    if (tail_) return std::nullopt;
    return events_.empty() ? initial_ : events_.back().v;
  }

  /// Earliest time from which the signal is constant; absent when it never
  /// settles; rat(0)-like semantics for constants are the caller's concern:
  /// for constant signals this returns t = 0 though they are constant on all
  /// of R (query `is_constant` when the difference matters).
  std::optional<rat> constant_from() const {
    if (tail_) return std::nullopt;
    return events_.empty() ? rat(0) : events_.back().t;
  }

  /// All switch times <= horizon, tail unfolded.
  std::vector<rat> switch_times_until(const rat& horizon) const {
    std::vector<rat> out;
    for (const auto& e : events_)
      if (e.t <= horizon) out.push_back(e.t);
    if (tail_) {
      for (rat base = tail_->start; base <= horizon; base += tail_->period)
        for (const auto& e : tail_->pattern) {
          rat t = base + e.t;
          if (t <= horizon) out.push_back(t);
        }
    }
    return out;
  }

  /// Distinct values attained on [from, infinity); `from` absent means all of R.
  std::vector<bitvec> values_from(const std::optional<rat>& from) const {
    std::vector<bitvec> out;
    auto add = [&](const bitvec& v) {
      if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    };
    auto fs = first_switch();
    if (!from || !fs || *from < *fs) add(initial_);
    for (std::size_t i = 0; i < events_.size(); ++i) {
      // value holds on [events_[i].t, next), next = following switch or tail start
      std::optional<rat> next;
      if (i + 1 < events_.size())
        next = events_[i + 1].t;
      else if (tail_)
        next = tail_->start;
      if (!from || !next || *next > *from) add(events_[i].v);
    }
    if (tail_)
      for (const auto& e : tail_->pattern) add(e.v);
    return out;
  }

  signal complemented() const {
    signal r = *this;
    r.initial_ = r.initial_.complemented();
    for (auto& e : r.events_) e.v = e.v.complemented();
    if (r.tail_)
      for (auto& e : r.tail_->pattern) e.v = e.v.complemented();
    return r;  // complement preserves canonical form
  }

  signal permuted(const std::vector<std::uint32_t>& perm) const {
    signal r = *this;
    r.initial_ = r.initial_.permuted(perm);
    for (auto& e : r.events_) e.v = e.v.permuted(perm);
    if (r.tail_)
      for (auto& e : r.tail_->pattern) e.v = e.v.permuted(perm);
    return r;  // a bijection on values preserves canonical form
  }

  /// Keeps coordinates idxs[0]+1, idxs[1]+1, ... (0-based indices).
  signal projected(const std::vector<std::uint32_t>& idxs) const {
    auto pick = [&](const bitvec& v) {
      bitvec r(static_cast<std::uint32_t>(idxs.size()));
      for (std::uint32_t i = 0; i < idxs.size(); ++i) r.set(i, v.get(idxs[i]));
      return r;
    };
    std::vector<sig_event> evs;
    for (const auto& e : events_) evs.push_back({e.t, pick(e.v)});
    std::optional<sig_tail> tl;
    if (tail_) {
      tl = sig_tail{tail_->start, tail_->period, {}};
      for (const auto& e : tail_->pattern) tl->pattern.push_back({e.t, pick(e.v)});
    }
    return signal(pick(initial_), std::move(evs), std::move(tl));
  }

  /// Coordinates [from+1, from+len].
  signal sliced(std::uint32_t from, std::uint32_t len) const {
    std::vector<std::uint32_t> idxs(len);
    for (std::uint32_t i = 0; i < len; ++i) idxs[i] = from + i;
    return projected(idxs);
  }

  /// Equal to *this strictly before t, holds before(t) from t on. t >= 0.
  signal frozen(const rat& t) const {
    if (t < rat(0)) throw error("NegativeEventTime", "freeze time must be >= 0");
    std::vector<sig_event> evs;
    for (const auto& e : events_)
      if (e.t < t) evs.push_back(e);
    if (tail_ && tail_->start < t)
      for (rat base = tail_->start; base < t; base += tail_->period)
        for (const auto& e : tail_->pattern) {
          if (base + e.t >= t) break;
          if (base + e.t >= tail_->start) evs.push_back({base + e.t, e.v});
        }
    std::sort(evs.begin(), evs.end(),
              [](const sig_event& a, const sig_event& b) { return a.t < b.t; });
    return signal(initial_, std::move(evs));
  }

  /// Agreement on (-infinity, t1).
  bool prefix_equals(const signal& o, const rat& t1) const {
    if (width() != o.width()) throw error("WidthMismatch", "prefix compare widths differ");
    if (t1 <= rat(0)) return initial_ == o.initial_;
    return frozen(t1) == o.frozen(t1);
  }

  friend bool operator==(const signal&, const signal&) = default;
  friend std::strong_ordering operator<=>(const signal&, const signal&) = default;

private:
  void validate() const {
    for (const auto& e : events_) {
      if (e.v.width() != initial_.width())
        throw error("WidthMismatch", "event value width differs from signal width");
      if (e.t < rat(0)) throw error("NegativeEventTime", "event at time " + e.t.str());
    }
    for (std::size_t i = 1; i < events_.size(); ++i)
      if (!(events_[i - 1].t < events_[i].t))
        throw error("NonIncreasingTimes", "event times must strictly increase");
    if (tail_) {
      if (tail_->period <= rat(0)) throw error("BadTail", "tail period must be positive");
      if (tail_->pattern.empty()) throw error("BadTail", "tail pattern must be nonempty");
      if (tail_->pattern.front().t != rat(0))
        throw error("BadTail", "tail pattern must start at offset 0");
      for (const auto& e : tail_->pattern) {
        if (e.v.width() != initial_.width())
          throw error("WidthMismatch", "tail value width differs from signal width");
        if (e.t < rat(0) || e.t >= tail_->period)
          throw error("BadTail", "tail offsets must lie in [0, period)");
      }
      for (std::size_t i = 1; i < tail_->pattern.size(); ++i)
        if (!(tail_->pattern[i - 1].t < tail_->pattern[i].t))
          throw error("BadTail", "tail offsets must strictly increase");
      if (tail_->start < rat(0)) throw error("NegativeEventTime", "tail starts before 0");
      if (!events_.empty() && !(events_.back().t < tail_->start))
        throw error("BadTail", "transient events must precede the tail start");
    }
  }

  void normalize() {
    // Transient: drop no-op switches.
    merge_events();
    for (int guard = 0; tail_ && guard < 1024; ++guard) {
      bool changed = false;
      changed |= merge_pattern();
      if (!tail_) break;  // pattern degenerated to a constant
      changed |= fix_wrap();
      if (!tail_) break;
      changed |= fix_seam();
      changed |= reduce_period();
      changed |= pull_back();
      if (!changed) break;
    }
    merge_events();
  }

  void merge_events() {
    std::vector<sig_event> out;
    bitvec prev = initial_;
    for (const auto& e : events_) {
      if (e.v != prev) {
        out.push_back(e);
        prev = e.v;
      }
    }
    events_ = std::move(out);
  }

  bitvec value_before_tail() const {
    return events_.empty() ? initial_ : events_.back().v;
  }

  // Drops in-pattern no-op entries; collapses a constant pattern into the
  // transient. Keeps pattern[0] (offset 0) even if a no-op: seam/wrap fix it.
  bool merge_pattern() {
    auto& p = tail_->pattern;
    std::vector<sig_event> out;
    for (const auto& e : p)
      if (out.empty() || out.back().v != e.v) out.push_back(e);
    bool changed = out.size() != p.size();
    p = std::move(out);
    if (p.size() == 1) {
      sig_event ev{tail_->start, p.front().v};
      tail_.reset();
      if (ev.v != value_before_tail()) events_.push_back(ev);
      return true;
    }
    return changed;
  }

  // Cycle boundary no-op (last pattern value == first): the offset-0 entry
  // only matters in cycle 0; move that segment into the transient and start
  // the tail at the first genuine in-cycle switch.
  bool fix_wrap() {
    auto& p = tail_->pattern;
    if (p.front().v != p.back().v) return false;
    sig_event head = p.front();
    rat shift = p[1].t;
    std::vector<sig_event> np;
    for (std::size_t i = 1; i < p.size(); ++i) np.push_back({p[i].t - shift, p[i].v});
    if (head.v != value_before_tail()) events_.push_back({tail_->start, head.v});
    tail_->start += shift;
    p = std::move(np);
    if (p.size() == 1) {
      sig_event ev{tail_->start, p.front().v};
      tail_.reset();
      if (ev.v != value_before_tail()) events_.push_back(ev);
    }
    return true;
  }

  // Seam no-op (transient runs into the pattern without a switch): rotate the
  // pattern left so the tail starts at its first genuine switch.
  bool fix_seam() {
    auto& p = tail_->pattern;
    if (p.front().v != value_before_tail()) return false;
    rat shift = p[1].t;
    std::vector<sig_event> np;
    for (std::size_t i = 1; i < p.size(); ++i) np.push_back({p[i].t - shift, p[i].v});
    np.push_back({tail_->period - shift, p.front().v});
    tail_->start += shift;
    p = std::move(np);
    return true;
  }

  // Replaces a pattern that repeats a shorter cycle by that cycle.
  bool reduce_period() {
    auto& p = tail_->pattern;
    const rat& P = tail_->period;
    for (std::size_t j = 1; j < p.size(); ++j) {
      rat q = p[j].t;  // candidate sub-period
      if (rat_mod(P, q) != rat(0)) continue;
      bool ok = true;
      for (const auto& e : p) {
        rat shifted = rat_mod(e.t + q, P);
        bool found = false;
        for (const auto& f : p)
          if (f.t == shifted && f.v == e.v) {
            found = true;
            break;
          }
        if (!found) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      std::vector<sig_event> np;
      for (const auto& e : p)
        if (e.t < q) np.push_back(e);
      p = std::move(np);
      tail_->period = q;
      return true;
    }
    return false;
  }

  // Absorbs a transient event that replicates the periodic structure,
  // minimizing the tail start.
  bool pull_back() {
    if (events_.empty()) return false;
    auto& p = tail_->pattern;
    rat step = tail_->period - p.back().t;
    rat t_prev = tail_->start - step;
    const sig_event& last = events_.back();
    if (last.t != t_prev || last.v != p.back().v) return false;
    std::vector<sig_event> np;
    np.push_back({rat(0), p.back().v});
    for (std::size_t i = 0; i + 1 < p.size(); ++i) np.push_back({p[i].t + step, p[i].v});
    events_.pop_back();
    tail_->start = t_prev;
    p = std::move(np);
    return true;
  }

  bitvec initial_;
  std::vector<sig_event> events_;
  std::optional<sig_tail> tail_;
};

/// w shifted so that each switch at time e happens at e + d; absent when the
/// result would switch before 0 (then it is not a signal).
inline std::optional<signal> translated(const signal& w, const rat& d) {
  if (w.is_constant()) return w;
  if (*w.first_switch() + d < rat(0)) return std::nullopt;
  std::vector<sig_event> evs;
  for (const auto& e : w.events()) evs.push_back({e.t + d, e.v});
  std::optional<sig_tail> tl;
  if (w.tail()) tl = sig_tail{w.tail()->start + d, w.tail()->period, w.tail()->pattern};
  return signal(w.initial(), std::move(evs), std::move(tl));
}

/// Combined signal: coordinates of the inputs side by side.
inline signal flatten(std::span<const signal> parts) {
  if (parts.empty()) throw error("WidthMismatch", "flatten of zero signals");
  bitvec init = parts[0].initial();
  for (std::size_t i = 1; i < parts.size(); ++i) init = init.concat(parts[i].initial());
  auto value_at = [&](const rat& t) {
    bitvec v = parts[0].at(t);
    for (std::size_t i = 1; i < parts.size(); ++i) v = v.concat(parts[i].at(t));
    return v;
  };

  bool tailed = false;
  rat period(1), start(0);
  for (const auto& s : parts) {
    if (s.tail()) {
      tailed = true;
      period = rat_lcm(period, s.tail()->period);
      start = rat_max(start, s.tail()->start);
    } else if (!s.events().empty()) {
      start = rat_max(start, s.events().back().t + rat(1));
    }
  }

  std::vector<rat> times;
  rat horizon = tailed ? start + period : start;
  for (const auto& s : parts)
    for (const auto& t : s.switch_times_until(horizon)) times.push_back(t);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  std::vector<sig_event> evs;
  std::optional<sig_tail> tl;
  if (!tailed) {
    for (const auto& t : times) evs.push_back({t, value_at(t)});
    return signal(init, std::move(evs));
  }
  for (const auto& t : times)
    if (t < start) evs.push_back({t, value_at(t)});
  tl = sig_tail{start, period, {{rat(0), value_at(start)}}};
  for (const auto& t : times)
    if (t > start && t < start + period) tl->pattern.push_back({t - start, value_at(t)});
  return signal(init, std::move(evs), std::move(tl));
}

inline signal flatten(const signal& a, const signal& b) {
  signal arr[] = {a, b};
  return flatten(std::span<const signal>(arr, 2));
}

}  // namespace asynkit
