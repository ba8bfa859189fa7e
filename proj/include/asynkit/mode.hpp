#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "asynkit/bitvec.hpp"
#include "asynkit/boolfn.hpp"
#include "asynkit/generator.hpp"
#include "asynkit/rational.hpp"
#include "asynkit/signal.hpp"
#include "asynkit/system.hpp"

namespace asynkit {

/// Switch schedule for step-mode operation. The explicit times are strictly
/// increasing and start at or after 0; past the last element the schedule
/// continues implicitly with unit steps, so it always names an unbounded
/// sequence of times. The continuation only carries information when the pair
/// under scrutiny has settled by the last explicit time; checks treat the
/// implicit region exactly, not as an assumption.
class mode_grid {
public:
  explicit mode_grid(std::vector<rat> times) : times_(std::move(times)) {
    if (times_.empty())
      throw error("BadArgument", "schedule needs at least one time");
    if (times_.front() < rat(0))
      throw error("BadArgument", "schedule starts before 0");
    for (std::size_t i = 1; i < times_.size(); ++i)
      if (!(times_[i - 1] < times_[i]))
        throw error("BadArgument", "schedule times must increase strictly");
  }

  const std::vector<rat>& times() const { return times_; }
  std::size_t size() const { return times_.size(); }

  /// k-th time of the unbounded schedule (unit steps past the last element).
  rat at(std::size_t k) const {
    if (k < times_.size()) return times_[k];
    return times_.back() + rat(static_cast<long long>(k - times_.size() + 1));
  }

  /// Is t one of the schedule times (explicit or implicit)?
  bool on_schedule(const rat& t) const {
    if (times_.back() < t) {
      rat d = t - times_.back();
      return d.den() == 1;
    }
    return std::binary_search(times_.begin(), times_.end(), t);
  }

  friend bool operator==(const mode_grid&, const mode_grid&) = default;

private:
  std::vector<rat> times_;
};

/// New schedule with tau inserted before position k. tau must lie strictly
/// between the explicit neighbours, so every interval keeps positive length.
inline mode_grid refine_grid(const mode_grid& g, std::size_t k, const rat& tau) {
  if (k == 0 || k >= g.size())
    throw error("IndexOutOfRange", "insertion needs an interior interval");
  if (!(g.times()[k - 1] < tau && tau < g.times()[k]))
    throw error("OutOfInterval", "new time must lie strictly between its neighbours");
  std::vector<rat> ts = g.times();
  ts.insert(ts.begin() + static_cast<std::ptrdiff_t>(k), tau);
  return mode_grid(std::move(ts));
}

/// How strictly a pair (u, x) must follow a switch schedule.
///   - pseudo: every frozen prefix taken at a schedule time stays a member.
///   - fundamental: additionally the input is constant before the first time
///     and only switches at schedule times.
///   - relative_to(F): the schedule discipline is imposed on F(u) instead of
///     on u itself.
///   - delay_insensitive_to(F): relative_to(F), and the state has reached
///     F(input) by every schedule time (left limits agree there).
struct mode_kind {
  enum class tag : std::uint8_t {
    pseudo,
    fundamental,
    relative_to,
    delay_insensitive_to,
  };

  tag t = tag::fundamental;
  std::optional<bool_fn> F;

  static mode_kind pseudo() { return {tag::pseudo, std::nullopt}; }
  static mode_kind fundamental() { return {tag::fundamental, std::nullopt}; }
  static mode_kind relative_to(bool_fn f) {
    return {tag::relative_to, std::move(f)};
  }
  static mode_kind delay_insensitive_to(bool_fn f) {
    return {tag::delay_insensitive_to, std::move(f)};
  }
};

/// Outcome of a schedule check. Every clause is evaluated and reported
/// individually (reference clauses only when a reference is present); the
/// overall verdict conjoins the clauses the kind requires. failing_index and
/// failing_check name the first refuted required clause; indices count
/// schedule times of the unbounded sequence, with interval clauses blaming
/// the interval's left endpoint.
struct mode_report {
  verdict overall;

  verdict input_constant_before_start;  // u holds one value before the first time
  verdict input_steps_on_schedule;      // u switches only at schedule times
  verdict reference_steps_on_schedule;  // F(u) switches only at schedule times
  verdict frozen_prefix_membership;     // frozen (u, x) stays a member at each time
  verdict state_matches_reference;      // x(t-0) = F(u(t-0)) at each time from 1 on

  std::optional<std::size_t> failing_index;
  std::string failing_check;

  // Left limits of (u, x) at every explicit schedule time, first time included.
  std::vector<std::pair<bitvec, bitvec>> equilibria;
};

/// Frozen pair at the k-th schedule time, k >= 1: both signals cut there and
/// held at their left limits. Past the settling time of the pair this is the
/// pair itself.
inline std::pair<signal, signal> prefixes(const signal& u, const signal& x,
                                          const mode_grid& grid, std::size_t k) {
  if (k == 0) throw error("IndexOutOfRange", "prefixes start at index 1");
  rat t = grid.at(k);
  return {u.frozen(t), x.frozen(t)};
}

/// Left limits of (u, x) at every explicit schedule time.
inline std::vector<std::pair<bitvec, bitvec>> equilibrium_points(
    const signal& u, const signal& x, const mode_grid& grid) {
  std::vector<std::pair<bitvec, bitvec>> out;
  out.reserve(grid.size());
  for (const rat& t : grid.times()) out.emplace_back(u.before(t), x.before(t));
  return out;
}

namespace detail {

// Index of the unbounded-schedule interval [t_k, t_{k+1}) containing s.
// Callers pass s strictly above the first time and off the schedule.
inline std::size_t interval_index(const mode_grid& g, const rat& s) {
  const std::vector<rat>& ts = g.times();
  if (ts.back() < s) {
    rat d = s - ts.back();
    long long whole = d.num() / d.den();
    return ts.size() - 1 + static_cast<std::size_t>(whole);
  }
  auto it = std::lower_bound(ts.begin(), ts.end(), s);
  return static_cast<std::size_t>(it - ts.begin()) - 1;
}

// Yes iff every switch of w strictly above the first schedule time lands on a
// schedule time. Earlier switches belong to the before-start clause.
inline verdict switches_on_schedule(const signal& w, const mode_grid& g,
                                    std::optional<std::size_t>& bad_index) {
  for (const sig_event& e : w.events()) {
    if (!(g.times().front() < e.t)) continue;
    if (g.on_schedule(e.t)) continue;
    bad_index = interval_index(g, e.t);
    return verdict::no();
  }
  return verdict::yes();
}

}  // namespace detail

/// Check that (u, x) follows the schedule in the sense of the kind. Needs
/// both signals eventually constant, so the unbounded schedule has a settled
/// tail; the finitely many frozen prefixes up to settling are checked one by
/// one and all later ones collapse to a single membership query on the full
/// pair. Membership queries may come back unknown, in which case the overall
/// verdict is unknown unless some required clause already refutes.
inline mode_report verify_mode(const mode_kind& kind, const system& f,
                               const signal& u, const signal& x,
                               const mode_grid& grid,
                               const query_budget& budget = {}) {
  detail::check_widths(f, u, x);
  bool needs_ref = kind.t == mode_kind::tag::relative_to ||
                   kind.t == mode_kind::tag::delay_insensitive_to;
  if (needs_ref && !kind.F)
    throw error("BadArgument", "kind needs a reference function");
  if (kind.F &&
      (kind.F->arity_in() != u.width() || kind.F->arity_out() != x.width()))
    throw error("ArityMismatch", "reference must map input vectors to state vectors");
  if (!u.eventually_constant() || !x.eventually_constant())
    throw error("PeriodicTailUnsupported",
                "schedule checks need eventually constant signals");

  const std::vector<rat>& ts = grid.times();
  rat settle = ts.front();
  if (!u.events().empty()) settle = std::max(settle, u.events().back().t);
  if (!x.events().empty()) settle = std::max(settle, x.events().back().t);

  mode_report rep;
  std::optional<std::size_t> idx_start, idx_input, idx_reference, idx_member,
      idx_state;

  rep.input_constant_before_start =
      u.frozen(ts.front()).is_constant() ? verdict::yes() : verdict::no();
  if (rep.input_constant_before_start.is_no()) idx_start = 0;

  rep.input_steps_on_schedule = detail::switches_on_schedule(u, grid, idx_input);

  if (kind.F) {
    signal fu = map_pointwise(*kind.F, u);
    rep.reference_steps_on_schedule =
        detail::switches_on_schedule(fu, grid, idx_reference);
  } else {
    rep.reference_steps_on_schedule =
        verdict::unknown("needs a reference function");
  }

  rep.frozen_prefix_membership = verdict::yes();
  std::optional<std::size_t> unk_index;
  std::string unk_note;
  std::size_t k = 1;
  for (;; ++k) {
    rat t = grid.at(k);
    if (settle < t) break;
    verdict cv = contains(f, u.frozen(t), x.frozen(t), budget);
    if (cv.is_no()) {
      rep.frozen_prefix_membership = verdict::no();
      idx_member = k;
      break;
    }
    if (cv.is_unknown() && !unk_index) {
      unk_index = k;
      unk_note = cv.note;
    }
  }
  if (rep.frozen_prefix_membership.is_yes()) {
    // From the first schedule time past settling on, freezing is the
    // identity: one query covers the whole tail.
    verdict cv = contains(f, u, x, budget);
    if (cv.is_no()) {
      rep.frozen_prefix_membership = verdict::no();
      idx_member = k;
    } else if (cv.is_unknown() && !unk_index) {
      unk_index = k;
      unk_note = cv.note;
    }
  }
  if (rep.frozen_prefix_membership.is_yes() && unk_index) {
    rep.frozen_prefix_membership = verdict::unknown(unk_note);
    idx_member = unk_index;
  }

  if (kind.F) {
    rep.state_matches_reference = verdict::yes();
    std::size_t k2 = 1;
    for (;; ++k2) {
      rat t = grid.at(k2);
      if (settle < t) break;
      if (!(x.before(t) == kind.F->apply(u.before(t)))) {
        rep.state_matches_reference = verdict::no();
        idx_state = k2;
        break;
      }
    }
    if (rep.state_matches_reference.is_yes() &&
        !(*x.limit() == kind.F->apply(*u.limit()))) {
      rep.state_matches_reference = verdict::no();
      idx_state = k2;
    }
  } else {
    rep.state_matches_reference = verdict::unknown("needs a reference function");
  }

  rep.equilibria = equilibrium_points(u, x, grid);

  struct clause {
    const verdict* v;
    const std::optional<std::size_t>* idx;
    const char* name;
  };
  std::vector<clause> required;
  switch (kind.t) {
    case mode_kind::tag::pseudo:
      required = {{&rep.frozen_prefix_membership, &idx_member,
                   "frozen prefix membership"}};
      break;
    case mode_kind::tag::fundamental:
      required = {{&rep.input_constant_before_start, &idx_start,
                   "input constant before start"},
                  {&rep.input_steps_on_schedule, &idx_input,
                   "input steps on schedule"},
                  {&rep.frozen_prefix_membership, &idx_member,
                   "frozen prefix membership"}};
      break;
    case mode_kind::tag::relative_to:
      required = {{&rep.input_constant_before_start, &idx_start,
                   "input constant before start"},
                  {&rep.reference_steps_on_schedule, &idx_reference,
                   "reference steps on schedule"},
                  {&rep.frozen_prefix_membership, &idx_member,
                   "frozen prefix membership"}};
      break;
    case mode_kind::tag::delay_insensitive_to:
      required = {{&rep.input_constant_before_start, &idx_start,
                   "input constant before start"},
                  {&rep.reference_steps_on_schedule, &idx_reference,
                   "reference steps on schedule"},
                  {&rep.frozen_prefix_membership, &idx_member,
                   "frozen prefix membership"},
                  {&rep.state_matches_reference, &idx_state,
                   "state matches reference"}};
      break;
  }

  rep.overall = verdict::yes();
  for (const clause& c : required)
    if (c.v->is_no()) {
      rep.overall = verdict::no();
      rep.failing_index = *c.idx;
      rep.failing_check = c.name;
      break;
    }
  if (rep.overall.is_yes())
    for (const clause& c : required)
      if (c.v->is_unknown()) {
        rep.overall = verdict::unknown(c.v->note);
        break;
      }
  return rep;
}

/// A constructed pair with its schedule. reference_tracked reports whether
/// the state's left limit agreed with the reference image of the input's left
/// limit at every schedule time from the second one on; constructions without
/// a reference leave it true.
struct mode_construction {
  signal u;
  signal x;
  mode_grid grid;
  bool reference_tracked = true;
};

namespace detail {

inline const nd_generated& generator_backing(const system& f) {
  if (auto* g = std::get_if<nd_generated>(&f.node())) return *g;
  throw error("BadArgument", "construction needs a generator-backed system");
}

}  // namespace detail

/// Drive a generator-backed system through the given input steps, one
/// schedule interval per step, waiting out stabilization before each switch.
/// The input is 0 before t0 and steps through the vectors at the schedule
/// times; the state starts in a seed-chosen initial state, holds it until t0,
/// and then follows a seed-chosen run of single-step updates at unit times,
/// each interval long enough for the run to stabilize before the next input
/// switch. The schedule gets one final time past the last stabilization, so
/// every later implicit time sees the settled pair. Requires the settling
/// check to pass, which bounds every run.
inline mode_construction construct_mode(const system& f,
                                        const std::vector<bitvec>& steps,
                                        const rat& t0, std::uint64_t seed) {
  const nd_generated& g = detail::generator_backing(f);
  if (steps.empty()) throw error("BadArgument", "need at least one input step");
  for (const bitvec& s : steps)
    if (s.width() != f.inputs())
      throw error("WidthMismatch", "input step width differs from the system");
  if (t0 < rat(0)) throw error("BadArgument", "start time before 0");
  settling_report sr = settling_check(g.phi);
  if (sr.result != settling_report::verdict::yes)
    throw error("NotSettling", "generator may admit a fair non-stabilizing run");

  std::mt19937_64 rng(seed);
  bitvec u0(f.inputs());
  const std::vector<bitvec>& starts = g.init.at(u0);
  bitvec cur = starts[rng() % starts.size()];
  bitvec x0 = cur;

  std::vector<sig_event> uev, xev;
  std::vector<rat> times;
  rat tk = t0;
  std::uint64_t bound = (std::uint64_t{1} << g.phi.states()) + 4;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    uev.push_back({tk, steps[k]});
    times.push_back(tk);
    std::uint64_t count = 0;
    while (!g.phi.is_stable(steps[k], cur)) {
      std::vector<bitvec> succ = successors(g.phi, steps[k], cur);
      cur = succ[1 + rng() % (succ.size() - 1)];
      ++count;
      xev.push_back({tk + rat(static_cast<long long>(count)), cur});
      if (count > bound)
        throw error("NotSettling", "run exceeded its stabilization bound");
    }
    tk = tk + rat(static_cast<long long>(count) + 1);
  }
  times.push_back(tk);
  return {signal(u0, std::move(uev)), signal(x0, std::move(xev)),
          mode_grid(std::move(times)), true};
}

/// construct_mode through the cheapest preimages of the targets: each target
/// vector is replaced by its lowest-index preimage under the reference. The
/// returned reference_tracked flag reports whether the state reached the
/// reference image by every schedule time, which a caller expecting
/// delay-insensitive operation can assert.
inline mode_construction construct_mode_relative(const system& f,
                                                 const bool_fn& F,
                                                 const std::vector<bitvec>& targets,
                                                 const rat& t0,
                                                 std::uint64_t seed) {
  if (F.arity_in() != f.inputs() || F.arity_out() != f.outputs())
    throw error("ArityMismatch", "reference must map input vectors to state vectors");
  std::vector<bitvec> steps;
  steps.reserve(targets.size());
  for (const bitvec& tv : targets) {
    if (tv.width() != f.outputs())
      throw error("WidthMismatch", "target width differs from the system state");
    std::optional<bitvec> pre;
    std::uint64_t all = std::uint64_t{1} << F.arity_in();
    for (std::uint64_t i = 0; i < all && !pre; ++i) {
      bitvec lam = bitvec::from_index(F.arity_in(), i);
      if (F.apply(lam) == tv) pre = lam;
    }
    if (!pre)
      throw error("TargetNotInRange", "target has no preimage under the reference");
    steps.push_back(*pre);
  }

  mode_construction mc = construct_mode(f, steps, t0, seed);
  for (std::size_t k = 1; k < mc.grid.size(); ++k) {
    rat t = mc.grid.times()[k];
    if (!(mc.x.before(t) == F.apply(mc.u.before(t)))) {
      mc.reference_tracked = false;
      break;
    }
  }
  return mc;
}

}  // namespace asynkit
