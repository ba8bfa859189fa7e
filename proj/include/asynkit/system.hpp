#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "asynkit/generator.hpp"
#include "asynkit/signal.hpp"

namespace asynkit {

enum class vkind : std::uint8_t { yes, no, unknown };

/// Three-valued query answer. Unknown carries a budget note and never stands
/// for a well-defined finite check.
struct verdict {
  vkind k = vkind::unknown;
  std::string note;

  static verdict yes() { return {vkind::yes, {}}; }
  static verdict no() { return {vkind::no, {}}; }
  static verdict unknown(std::string why) { return {vkind::unknown, std::move(why)}; }
  bool is_yes() const { return k == vkind::yes; }
  bool is_no() const { return k == vkind::no; }
  bool is_unknown() const { return k == vkind::unknown; }
};

struct query_budget {
  std::uint64_t max_set = std::uint64_t{1} << 12;  // candidate / product cap
  std::uint32_t internal_steps = 3;                // interleaving subdivisions
  std::vector<rat> extra_times;                    // user-widened grid
};

/// Initial-state map: either one set for every input, or a set per initial
/// input vector (the map must be total on B^m).
struct initial_spec {
  std::vector<bitvec> constant;
  std::map<bitvec, std::vector<bitvec>> by_input;

  bool input_free() const { return by_input.empty(); }
  const std::vector<bitvec>& at(const bitvec& u0) const {
    if (input_free()) return constant;
    auto it = by_input.find(u0);
    if (it == by_input.end()) throw error("BadArgument", "initial-state map not total");
    return it->second;
  }
};

class system;
using system_ptr = std::shared_ptr<const system>;

enum class delay_kind : std::uint8_t {
  eventually_fn,         // x(t) = F(u(t)) from some time on
  tracks_from0,          // x(t) = F(u(t)) for all t >= 0
  rise_gated_and,        // rises of x need AND(u) true d earlier; falls free
  inertial_runs,         // autonomous: 1-runs longer than dr, 0-runs than df
  rise_after_settled_and,  // no falls; rises only once AND(u) held forever
  band_inequality,       // AND of a trailing window <= x(t) <= OR of one
  zero_if_and_settles,   // ends at 0 when AND(u) has a limit, else tracks u1
  zero_if_input_settles,  // ends at 0 when u has a limit, else tracks u1
  one_on_unit_step,      // {1} on the unit step input, {u1} otherwise
};

struct nd_ideal_delay { std::uint32_t width; rat d; };
struct nd_pointwise { bool_fn F; };
struct nd_limsup_and { std::uint32_t m; };
struct nd_autonomous { std::uint32_t m; std::vector<signal> members; };
struct nd_delay_model {
  delay_kind kind;
  std::uint32_t m;
  std::optional<bool_fn> F;  // eventually_fn / tracks_from0
  rat d1, d2;                // kind-specific delays / window lengths
};
struct nd_generated { gen_fn phi; initial_spec init; };
struct nd_complement { system_ptr f; };
struct nd_extend { system_ptr f; };
struct nd_substitute { system_ptr f; std::uint32_t i, j; };
struct nd_drop { system_ptr f; std::uint32_t i; };
struct nd_intersect { system_ptr f, g; };
struct nd_union { system_ptr f, g; };
struct nd_parallel { std::vector<system_ptr> parts; };
struct nd_serial { system_ptr outer; std::vector<system_ptr> parts; };

using system_node =
    std::variant<nd_ideal_delay, nd_pointwise, nd_limsup_and, nd_autonomous,
                 nd_delay_model, nd_generated, nd_complement, nd_extend,
                 nd_substitute, nd_drop, nd_intersect, nd_union, nd_parallel,
                 nd_serial>;

/// A multivalued map from input signals of width m to nonempty sets of state
/// signals of width n, closed under the combinators below.
class system {
public:
  std::uint32_t inputs() const { return m_; }
  std::uint32_t outputs() const { return n_; }
  const system_node& node() const { return node_; }

  static system_ptr ideal_delay(std::uint32_t width, rat d) {
    if (width == 0 || d < rat(0)) throw error("BadArgument", "ideal delay needs width >= 1, d >= 0");
    return make(width, width, nd_ideal_delay{width, d});
  }
  static system_ptr pointwise(bool_fn F) {
    std::uint32_t m = F.arity_in(), n = F.arity_out();
    return make(m, n, nd_pointwise{std::move(F)});
  }
  static system_ptr limsup_and(std::uint32_t m) {
    if (m == 0) throw error("BadArgument", "limsup system needs m >= 1");
    return make(m, 1, nd_limsup_and{m});
  }
  static system_ptr autonomous(std::uint32_t m, std::vector<signal> members) {
    if (m == 0 || members.empty()) throw error("BadArgument", "autonomous system needs m >= 1 and a nonempty set");
    std::uint32_t n = members.front().width();
    for (const auto& s : members)
      if (s.width() != n) throw error("WidthMismatch", "autonomous members differ in width");
    return make(m, n, nd_autonomous{m, std::move(members)});
  }
  static system_ptr eventually_fn(bool_fn F) {
    std::uint32_t m = F.arity_in(), n = F.arity_out();
    return make(m, n, nd_delay_model{delay_kind::eventually_fn, m, std::move(F), rat(0), rat(0)});
  }
  static system_ptr tracks_from0(bool_fn F) {
    std::uint32_t m = F.arity_in(), n = F.arity_out();
    return make(m, n, nd_delay_model{delay_kind::tracks_from0, m, std::move(F), rat(0), rat(0)});
  }
  static system_ptr rise_gated_and(std::uint32_t m, rat d) {
    if (m == 0 || d < rat(0)) throw error("BadArgument", "rise gate needs m >= 1, d >= 0");
    return make(m, 1, nd_delay_model{delay_kind::rise_gated_and, m, {}, d, rat(0)});
  }
  static system_ptr inertial_runs(std::uint32_t m, rat dr, rat df) {
    if (m == 0 || dr < rat(0) || df < rat(0))
      throw error("BadArgument", "inertial run lengths must be >= 0");
    return make(m, 1, nd_delay_model{delay_kind::inertial_runs, m, {}, dr, df});
  }
  static system_ptr rise_after_settled_and(std::uint32_t m, rat window) {
    if (m == 0 || window < rat(0)) throw error("BadArgument", "window must be >= 0");
    return make(m, 1, nd_delay_model{delay_kind::rise_after_settled_and, m, {}, window, rat(0)});
  }
  static system_ptr band_inequality(rat dr, rat df) {
    if (dr <= rat(0) || df <= rat(0)) throw error("BadArgument", "band delays must be > 0");
    return make(1, 1, nd_delay_model{delay_kind::band_inequality, 1, {}, dr, df});
  }
  static system_ptr zero_if_and_settles(std::uint32_t m) {
    if (m == 0) throw error("BadArgument", "needs m >= 1");
    return make(m, 1, nd_delay_model{delay_kind::zero_if_and_settles, m, {}, rat(0), rat(0)});
  }
  static system_ptr zero_if_input_settles(std::uint32_t m) {
    if (m == 0) throw error("BadArgument", "needs m >= 1");
    return make(m, 1, nd_delay_model{delay_kind::zero_if_input_settles, m, {}, rat(0), rat(0)});
  }
  static system_ptr one_on_unit_step() {
    return make(1, 1, nd_delay_model{delay_kind::one_on_unit_step, 1, {}, rat(0), rat(0)});
  }
  static system_ptr generated(gen_fn phi, initial_spec init) {
    std::uint32_t m = phi.inputs(), n = phi.states();
    auto check = [&](const std::vector<bitvec>& s) {
      if (s.empty()) throw error("BadArgument", "initial-state sets must be nonempty");
      for (const auto& b : s)
        if (b.width() != n) throw error("WidthMismatch", "initial state width");
    };
    if (init.input_free()) {
      check(init.constant);
    } else {
      if (init.by_input.size() != (std::size_t{1} << m))
        throw error("BadArgument", "initial-state map not total");
      for (const auto& [k, v] : init.by_input) {
        if (k.width() != m) throw error("WidthMismatch", "initial map key width");
        check(v);
      }
    }
    return make(m, n, nd_generated{std::move(phi), std::move(init)});
  }
  static system_ptr complement(system_ptr f) {
    std::uint32_t m = f->inputs(), n = f->outputs();
    return make(m, n, nd_complement{std::move(f)});
  }
  static system_ptr extend(system_ptr f) {
    std::uint32_t m = f->inputs(), n = f->outputs();
    return make(m + 1, n, nd_extend{std::move(f)});
  }
  static system_ptr substitute(system_ptr f, std::uint32_t i, std::uint32_t j) {
    std::uint32_t m = f->inputs(), n = f->outputs();
    if (i == 0 || j == 0 || i > m || j > m || i == j)
      throw error("ArityMismatch", "substitute needs distinct 1-based input slots");
    return make(m, n, nd_substitute{std::move(f), i, j});
  }
  static system_ptr drop_input(system_ptr f, std::uint32_t i) {
    std::uint32_t m = f->inputs(), n = f->outputs();
    if (m < 2 || i == 0 || i > m) throw error("ArityMismatch", "drop needs m >= 2 and a valid slot");
    return make(m - 1, n, nd_drop{std::move(f), i});
  }
  static system_ptr intersect(system_ptr f, system_ptr g) {
    std::uint32_t m = f->inputs(), n = f->outputs();
    if (g->inputs() != m || g->outputs() != n)
      throw error("ArityMismatch", "intersection needs equal arities");
    return make(m, n, nd_intersect{std::move(f), std::move(g)});
  }
  static system_ptr unite(system_ptr f, system_ptr g) {
    std::uint32_t m = f->inputs(), n = f->outputs();
    if (g->inputs() != m || g->outputs() != n)
      throw error("ArityMismatch", "union needs equal arities");
    return make(m, n, nd_union{std::move(f), std::move(g)});
  }
  static system_ptr parallel(std::vector<system_ptr> parts) {
    if (parts.empty()) throw error("ArityMismatch", "parallel needs parts");
    std::uint32_t m = 0, n = 0;
    for (const auto& p : parts) { m += p->inputs(); n += p->outputs(); }
    return make(m, n, nd_parallel{std::move(parts)});
  }
  static system_ptr serial(system_ptr outer, std::vector<system_ptr> parts) {
    if (parts.empty()) throw error("ArityMismatch", "serial needs parts");
    std::uint32_t mid = 0, m = 0, n = outer->outputs();
    for (const auto& p : parts) { mid += p->outputs(); m += p->inputs(); }
    if (mid != outer->inputs())
      throw error("ArityMismatch", "inner outputs must sum to the outer input arity");
    return make(m, n, nd_serial{std::move(outer), std::move(parts)});
  }

private:
  system(std::uint32_t m, std::uint32_t n, system_node node)
      : m_(m), n_(n), node_(std::move(node)) {}
  static system_ptr make(std::uint32_t m, std::uint32_t n, system_node node) {
    return system_ptr(new system(m, n, std::move(node)));
  }
  std::uint32_t m_, n_;
  system_node node_;
};

struct enum_result {
  std::set<signal> items;
  bool exhaustive = false;  // provably all members with events on the grid
  bool complete = false;    // provably the entire value set
};

verdict contains(const system& f, const signal& u, const signal& x,
                 const query_budget& budget = {});
enum_result enumerate(const system& f, const signal& u, const rat& horizon,
                      const query_budget& budget = {});
std::set<bitvec> initial_states(const system& f, const signal& u,
                                const query_budget& budget = {});

namespace detail {

inline void check_widths(const system& f, const signal& u, const signal& x) {
  if (u.width() != f.inputs() || x.width() != f.outputs())
    throw error("ArityMismatch", "signal widths do not match the system arities");
}

inline rat joint_horizon(const signal& s) {
  if (s.tail()) return s.tail()->start + s.tail()->period;
  return s.events().empty() ? rat(0) : s.events().back().t;
}

inline bool bit_and_over(const signal& u, const rat& a, const rat& b) {
  // AND of the width-1 signal u over [a, b), assumed a < b.
  if (!u.at(a).get(0)) return false;
  for (const rat& s : u.switch_times_until(b))
    if (s > a && s < b && !u.at(s).get(0)) return false;
  return true;
}

inline bool bit_or_over(const signal& u, const rat& a, const rat& b) {
  if (u.at(a).get(0)) return true;
  for (const rat& s : u.switch_times_until(b))
    if (s > a && s < b && u.at(s).get(0)) return true;
  return false;
}

/// x(t) = target(t) from some point on (both ultimately periodic, so the
/// tails either disagree infinitely often or agree from the joint cycle).
inline bool eventually_equal(const signal& x, const signal& target) {
  signal j = flatten(x, target);
  std::uint32_t w = x.width();
  auto halves_equal = [&](const bitvec& v) { return v.slice(0, w) == v.slice(w, w); };
  if (!j.tail()) {
    bitvec last = j.events().empty() ? j.initial() : j.events().back().v;
    return halves_equal(last);
  }
  for (const auto& e : j.tail()->pattern)
    if (!halves_equal(j.at(j.tail()->start + e.t))) return false;
  return true;
}

/// x(t) = target(t) for every t >= 0.
inline bool equal_from_zero(const signal& x, const signal& target) {
  signal j = flatten(x, target);
  std::uint32_t w = x.width();
  auto halves_equal = [&](const bitvec& v) { return v.slice(0, w) == v.slice(w, w); };
  if (!halves_equal(j.at(rat(0)))) return false;
  rat h = joint_horizon(j);
  for (const rat& t : j.switch_times_until(h))
    if (t > rat(0) && !halves_equal(j.at(t))) return false;
  return true;
}

inline bool limsup_bit(const signal& a) {
  // a has width 1; 1 iff a equals 1 at arbitrarily late times.
  if (a.tail()) {
    for (const auto& e : a.tail()->pattern)
      if (e.v.get(0)) return true;
    return false;
  }
  return (a.events().empty() ? a.initial() : a.events().back().v).get(0);
}

/// Rise/fall switch times of a width-1 signal up to the horizon.
inline std::vector<rat> edge_times(const signal& x, const rat& h, bool rising) {
  std::vector<rat> out;
  for (const rat& t : x.switch_times_until(h))
    if (x.at(t).get(0) == rising) out.push_back(t);
  return out;
}

inline signal insert_zero_coord(const signal& u, std::uint32_t i) {
  // 1-based slot i receives the constant 0 coordinate.
  std::vector<signal> parts;
  std::uint32_t m = u.width();
  std::vector<std::uint32_t> pre, post;
  for (std::uint32_t k = 0; k + 1 < i; ++k) pre.push_back(k);
  for (std::uint32_t k = i - 1; k < m; ++k) post.push_back(k);
  if (!pre.empty()) parts.push_back(u.projected(pre));
  parts.push_back(signal::constant(bitvec(1)));
  if (!post.empty()) parts.push_back(u.projected(post));
  std::vector<const signal*> ptrs;
  if (parts.size() == 2) return flatten(parts[0], parts[1]);
  return flatten(flatten(parts[0], parts[1]), parts[2]);
}

inline signal substitute_input(const signal& u, std::uint32_t i, std::uint32_t j) {
  std::vector<std::uint32_t> idx(u.width());
  for (std::uint32_t k = 0; k < u.width(); ++k) idx[k] = k;
  idx[j - 1] = i - 1;
  return u.projected(idx);
}

inline signal drop_last_coord(const signal& u) {
  std::vector<std::uint32_t> idx;
  for (std::uint32_t k = 0; k + 1 < u.width(); ++k) idx.push_back(k);
  return u.projected(idx);
}

/// Splice: candidate prefix before `from`, then follow `target` forever.
inline signal follow_from(const bitvec& init, std::vector<sig_event> prefix,
                          const signal& target, const rat& from) {
  std::vector<sig_event> evs;
  for (auto& e : prefix)
    if (e.t < from) evs.push_back(std::move(e));
  evs.push_back({from, target.at(from)});
  std::optional<sig_tail> tl;
  if (!target.tail()) {
    for (const auto& e : target.events())
      if (e.t > from) evs.push_back(e);
  } else {
    rat start = target.tail()->start;
    const rat& p = target.tail()->period;
    for (const auto& e : target.events())
      if (e.t > from) evs.push_back(e);
    while (start <= from) start += p;
    for (const rat& t : target.switch_times_until(start))
      if (t > from && t < start &&
          (evs.empty() || evs.back().t < t))
        evs.push_back({t, target.at(t)});
    tl = sig_tail{start, p, target.tail()->pattern};
  }
  return signal(init, std::move(evs), std::move(tl));
}

/// Deterministic value of the one_on_unit_step variant.
inline signal unit_step_value(const signal& u) {
  if (u == signal({0}, {{rat(0), bitvec{1}}})) return signal::constant(bitvec{1});
  return u;
}

inline verdict delay_model_contains(const nd_delay_model& dm, const signal& u,
                                    const signal& x) {
  switch (dm.kind) {
    case delay_kind::eventually_fn:
      return eventually_equal(x, map_pointwise(*dm.F, u)) ? verdict::yes() : verdict::no();
    case delay_kind::tracks_from0:
      return equal_from_zero(x, map_pointwise(*dm.F, u)) ? verdict::yes() : verdict::no();
    case delay_kind::rise_gated_and: {
      signal a = map_pointwise(bool_fn::and_fn(dm.m), u);
      signal delayed = *translated(a, dm.d1);
      rat h = joint_horizon(flatten(x, delayed));
      for (const rat& t : edge_times(x, h, true))
        if (!a.at(t - dm.d1).get(0)) return verdict::no();
      return verdict::yes();
    }
    case delay_kind::inertial_runs: {
      rat guard = rat_max(dm.d1, dm.d2) + rat(1);
      rat h = joint_horizon(x) + (x.tail() ? x.tail()->period : rat(0)) + guard;
      std::vector<rat> sw = x.switch_times_until(h);
      for (std::size_t k = 0; k + 1 < sw.size(); ++k) {
        const rat& need = x.at(sw[k]).get(0) ? dm.d1 : dm.d2;
        if (!(sw[k + 1] - sw[k] > need)) return verdict::no();
      }
      return verdict::yes();
    }
    case delay_kind::rise_after_settled_and: {
      // No falls; at most one rise, only once AND(u) has settled to 1 for a
      // full trailing window.
      signal a = map_pointwise(bool_fn::and_fn(dm.m), u);
      rat h = joint_horizon(flatten(x, a)) + rat(1);
      if (!edge_times(x, h, false).empty() || x.tail()) return verdict::no();
      std::vector<rat> rises = edge_times(x, h, true);
      if (rises.empty()) return verdict::yes();
      if (a.is_constant())
        return a.initial().get(0) ? verdict::yes() : verdict::no();
      if (!a.eventually_constant() || !a.limit()->get(0)) return verdict::no();
      return rises.front() - dm.d1 >= *a.constant_from() ? verdict::yes() : verdict::no();
    }
    case delay_kind::band_inequality: {
      const rat& dr = dm.d1;
      const rat& df = dm.d2;
      rat slack = rat_max(dr, df);
      signal j = flatten(u, x);
      rat h = joint_horizon(j) + (j.tail() ? j.tail()->period : rat(0)) + slack + rat(1);
      std::vector<rat> crit;
      for (const rat& t : u.switch_times_until(h)) {
        crit.push_back(t);
        crit.push_back(t + dr);
        crit.push_back(t + df);
      }
      for (const rat& t : x.switch_times_until(h)) crit.push_back(t);
      rat lo = crit.empty() ? rat(0) : *std::min_element(crit.begin(), crit.end());
      crit.push_back(lo - slack - rat(1));
      crit.push_back(h + rat(1));
      std::sort(crit.begin(), crit.end());
      crit.erase(std::unique(crit.begin(), crit.end()), crit.end());
      std::vector<rat> samples = crit;
      for (std::size_t k = 0; k + 1 < crit.size(); ++k)
        samples.push_back((crit[k] + crit[k + 1]) / rat(2));
      for (const rat& t : samples) {
        bool xv = x.at(t).get(0);
        if (bit_and_over(u, t - dr, t) && !xv) return verdict::no();
        if (xv && !bit_or_over(u, t - df, t)) return verdict::no();
      }
      return verdict::yes();
    }
    case delay_kind::zero_if_and_settles: {
      signal a = map_pointwise(bool_fn::and_fn(dm.m), u);
      signal target = a.eventually_constant() ? signal::constant(bitvec(1))
                                              : u.projected({0});
      return eventually_equal(x, target) ? verdict::yes() : verdict::no();
    }
    case delay_kind::zero_if_input_settles: {
      signal target = u.eventually_constant() ? signal::constant(bitvec(1))
                                              : u.projected({0});
      return eventually_equal(x, target) ? verdict::yes() : verdict::no();
    }
    case delay_kind::one_on_unit_step:
      return x == unit_step_value(u) ? verdict::yes() : verdict::no();
  }
  throw error("BadArgument", "unknown delay model");
}

/// Variant-declared grid times: thresholds where membership flips.
inline std::vector<rat> delay_model_grid_extras(const nd_delay_model& dm, const signal& u,
                                                const rat& horizon) {
  std::vector<rat> out;
  switch (dm.kind) {
    case delay_kind::rise_gated_and:
      for (const rat& t : u.switch_times_until(horizon)) out.push_back(t + dm.d1);
      break;
    case delay_kind::band_inequality:
      for (const rat& t : u.switch_times_until(horizon)) {
        out.push_back(t + dm.d1);
        out.push_back(t + dm.d2);
      }
      break;
    case delay_kind::rise_after_settled_and: {
      signal a = map_pointwise(bool_fn::and_fn(dm.m), u);
      if (a.is_constant() && a.initial().get(0)) out.push_back(dm.d1);
      else if (a.eventually_constant() && a.limit()->get(0))
        out.push_back(*a.constant_from() + dm.d1);
      break;
    }
    case delay_kind::inertial_runs: {
      rat step = rat_max(dm.d1, dm.d2) + rat(1);
      for (rat t(0); t <= horizon; t += step) out.push_back(t);
      break;
    }
    default:
      break;
  }
  return out;
}

/// Targets a delay model may settle on, used as enumeration completions.
inline std::vector<signal> delay_model_targets(const nd_delay_model& dm, const signal& u) {
  switch (dm.kind) {
    case delay_kind::eventually_fn:
    case delay_kind::tracks_from0:
      return {map_pointwise(*dm.F, u)};
    case delay_kind::zero_if_and_settles: {
      signal a = map_pointwise(bool_fn::and_fn(dm.m), u);
      return {a.eventually_constant() ? signal::constant(bitvec(1)) : u.projected({0})};
    }
    case delay_kind::zero_if_input_settles:
      return {u.eventually_constant() ? signal::constant(bitvec(1)) : u.projected({0})};
    default:
      return {};
  }
}

}  // namespace detail

inline verdict contains(const system& f, const signal& u, const signal& x,
                        const query_budget& budget) {
  detail::check_widths(f, u, x);
  const system_node& nd = f.node();

  if (auto* p = std::get_if<nd_ideal_delay>(&nd))
    return x == *translated(u, p->d) ? verdict::yes() : verdict::no();
  if (auto* p = std::get_if<nd_pointwise>(&nd))
    return x == map_pointwise(p->F, u) ? verdict::yes() : verdict::no();
  if (auto* p = std::get_if<nd_limsup_and>(&nd)) {
    signal a = map_pointwise(bool_fn::and_fn(p->m), u);
    bitvec v(1);
    v.set(0, detail::limsup_bit(a));
    return x == signal::constant(v) ? verdict::yes() : verdict::no();
  }
  if (auto* p = std::get_if<nd_autonomous>(&nd)) {
    for (const auto& s : p->members)
      if (s == x) return verdict::yes();
    return verdict::no();
  }
  if (auto* p = std::get_if<nd_delay_model>(&nd))
    return detail::delay_model_contains(*p, u, x);
  if (auto* p = std::get_if<nd_generated>(&nd)) {
    const auto& inits = p->init.at(u.initial());
    if (std::find(inits.begin(), inits.end(), x.initial()) == inits.end())
      return verdict::no();
    return check_membership(p->phi, u, x) ? verdict::yes() : verdict::no();
  }
  if (auto* p = std::get_if<nd_complement>(&nd))
    return contains(*p->f, u, x.complemented(), budget);
  if (auto* p = std::get_if<nd_extend>(&nd))
    return contains(*p->f, detail::drop_last_coord(u), x, budget);
  if (auto* p = std::get_if<nd_substitute>(&nd))
    return contains(*p->f, detail::substitute_input(u, p->i, p->j), x, budget);
  if (auto* p = std::get_if<nd_drop>(&nd)) {
    // Droppability is asserted by the caller; probe the slot with both
    // constants and flag a disagreement as detected dependence.
    signal with0 = detail::insert_zero_coord(u, p->i);
    signal one = signal::constant(bitvec{1});
    std::vector<signal> cols;
    for (std::uint32_t k = 0; k < with0.width(); ++k)
      cols.push_back(k + 1 == p->i ? one : with0.projected({k}));
    signal with1 = cols.front();
    for (std::size_t k = 1; k < cols.size(); ++k) with1 = flatten(with1, cols[k]);
    verdict v0 = contains(*p->f, with0, x, budget);
    verdict v1 = contains(*p->f, with1, x, budget);
    if (!v0.is_unknown() && !v1.is_unknown() && v0.k != v1.k)
      throw error("DependenceDetected", "dropped input influences the system");
    return v0;
  }
  if (auto* p = std::get_if<nd_intersect>(&nd)) {
    verdict a = contains(*p->f, u, x, budget), b = contains(*p->g, u, x, budget);
    if (a.is_no() || b.is_no()) return verdict::no();
    if (a.is_yes() && b.is_yes()) return verdict::yes();
    return verdict::unknown(a.is_unknown() ? a.note : b.note);
  }
  if (auto* p = std::get_if<nd_union>(&nd)) {
    verdict a = contains(*p->f, u, x, budget), b = contains(*p->g, u, x, budget);
    if (a.is_yes() || b.is_yes()) return verdict::yes();
    if (a.is_no() && b.is_no()) return verdict::no();
    return verdict::unknown(a.is_unknown() ? a.note : b.note);
  }
  if (auto* p = std::get_if<nd_parallel>(&nd)) {
    std::uint32_t mo = 0, no = 0;
    bool unknown = false;
    std::string note;
    for (const auto& part : p->parts) {
      std::vector<std::uint32_t> mi, ni;
      for (std::uint32_t k = 0; k < part->inputs(); ++k) mi.push_back(mo + k);
      for (std::uint32_t k = 0; k < part->outputs(); ++k) ni.push_back(no + k);
      verdict v = contains(*part, u.projected(mi), x.projected(ni), budget);
      if (v.is_no()) return verdict::no();
      if (v.is_unknown()) { unknown = true; note = v.note; }
      mo += part->inputs();
      no += part->outputs();
    }
    return unknown ? verdict::unknown(note) : verdict::yes();
  }
  if (auto* p = std::get_if<nd_serial>(&nd)) {
    rat h = rat_max(detail::joint_horizon(u), detail::joint_horizon(x)) + rat(1);
    std::vector<enum_result> mids;
    std::uint32_t off = 0;
    bool all_complete = true;
    std::uint64_t combos = 1;
    for (const auto& part : p->parts) {
      std::vector<std::uint32_t> mi;
      for (std::uint32_t k = 0; k < part->inputs(); ++k) mi.push_back(off + k);
      mids.push_back(enumerate(*part, u.projected(mi), h, budget));
      all_complete = all_complete && mids.back().complete;
      combos *= std::max<std::uint64_t>(mids.back().items.size(), 1);
      off += part->inputs();
    }
    if (combos > budget.max_set)
      return verdict::unknown("serial intermediate product exceeds budget");
    bool saw_unknown = false;
    std::string note;
    std::vector<std::set<signal>::const_iterator> its;
    for (const auto& m : mids) {
      if (m.items.empty()) return verdict::unknown("empty intermediate enumeration");
      its.push_back(m.items.begin());
    }
    while (true) {
      signal y = *its[0];
      for (std::size_t k = 1; k < its.size(); ++k) y = flatten(y, *its[k]);
      verdict v = contains(*p->outer, y, x, budget);
      if (v.is_yes()) return verdict::yes();
      if (v.is_unknown()) { saw_unknown = true; note = v.note; }
      std::size_t k = its.size();
      while (k > 0) {
        ++its[k - 1];
        if (its[k - 1] != mids[k - 1].items.end()) break;
        its[k - 1] = mids[k - 1].items.begin();
        --k;
      }
      if (k == 0) break;
    }
    if (saw_unknown) return verdict::unknown(note);
    if (!all_complete) return verdict::unknown("intermediate enumeration not complete");
    return verdict::no();
  }
  throw error("BadArgument", "unknown system node");
}

inline enum_result enumerate(const system& f, const signal& u, const rat& horizon,
                             const query_budget& budget) {
  if (u.width() != f.inputs())
    throw error("ArityMismatch", "input width does not match the system arity");
  const system_node& nd = f.node();
  enum_result out;

  if (auto* p = std::get_if<nd_ideal_delay>(&nd)) {
    out.items.insert(*translated(u, p->d));
    out.exhaustive = out.complete = true;
    return out;
  }
  if (auto* p = std::get_if<nd_pointwise>(&nd)) {
    out.items.insert(map_pointwise(p->F, u));
    out.exhaustive = out.complete = true;
    return out;
  }
  if (auto* p = std::get_if<nd_limsup_and>(&nd)) {
    signal a = map_pointwise(bool_fn::and_fn(p->m), u);
    bitvec v(1);
    v.set(0, detail::limsup_bit(a));
    out.items.insert(signal::constant(v));
    out.exhaustive = out.complete = true;
    return out;
  }
  if (auto* p = std::get_if<nd_autonomous>(&nd)) {
    out.items.insert(p->members.begin(), p->members.end());
    out.exhaustive = out.complete = true;
    return out;
  }
  if (auto* p = std::get_if<nd_delay_model>(&nd)) {
    if (p->kind == delay_kind::one_on_unit_step) {
      out.items.insert(detail::unit_step_value(u));
      out.exhaustive = out.complete = true;
      return out;
    }
    std::vector<rat> grid{rat(0)};
    for (const rat& t : u.switch_times_until(horizon))
      if (t <= horizon) grid.push_back(t);
    for (const rat& t : detail::delay_model_grid_extras(*p, u, horizon))
      if (t >= rat(0) && t <= horizon) grid.push_back(t);
    for (const rat& t : budget.extra_times)
      if (t >= rat(0) && t <= horizon) grid.push_back(t);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    std::uint32_t n = f.outputs();
    std::vector<signal> targets = detail::delay_model_targets(*p, u);
    out.exhaustive = true;
    std::uint64_t per_val = std::uint64_t{1} << n;
    std::uint64_t states = 1;
    for (std::size_t k = 0; k <= grid.size(); ++k) {
      if (states > budget.max_set / per_val) {
        out.exhaustive = false;
        states = budget.max_set;
        break;
      }
      states *= per_val;
    }
    if (states > budget.max_set) {
      out.exhaustive = false;
      states = budget.max_set;
    }
    for (std::uint64_t c = 0; c < states; ++c) {
      std::uint64_t bits = c;
      bitvec init = bitvec::from_index(n, bits % per_val);
      bits /= per_val;
      std::vector<sig_event> evs;
      for (const rat& t : grid) {
        evs.push_back({t, bitvec::from_index(n, bits % per_val)});
        bits /= per_val;
      }
      signal cand(init, evs);
      if (contains(f, u, cand, budget).is_yes()) out.items.insert(cand);
      for (const auto& tgt : targets) {
        signal followed = detail::follow_from(init, evs, tgt, grid.back() + rat(1));
        if (contains(f, u, followed, budget).is_yes()) out.items.insert(followed);
      }
    }
    return out;
  }
  if (auto* p = std::get_if<nd_generated>(&nd)) {
    out.exhaustive = true;
    for (const auto& x0 : p->init.at(u.initial())) {
      auto ts = enumerate_trajectories(p->phi, u, x0, budget.internal_steps, true,
                                       budget.max_set);
      for (const auto& tr : ts.items) out.items.insert(tr.rendered());
      out.exhaustive = out.exhaustive && ts.exhaustive;
    }
    return out;
  }
  if (auto* p = std::get_if<nd_complement>(&nd)) {
    enum_result inner = enumerate(*p->f, u, horizon, budget);
    for (const auto& s : inner.items) out.items.insert(s.complemented());
    out.exhaustive = inner.exhaustive;
    out.complete = inner.complete;
    return out;
  }
  if (auto* p = std::get_if<nd_extend>(&nd))
    return enumerate(*p->f, detail::drop_last_coord(u), horizon, budget);
  if (auto* p = std::get_if<nd_substitute>(&nd))
    return enumerate(*p->f, detail::substitute_input(u, p->i, p->j), horizon, budget);
  if (auto* p = std::get_if<nd_drop>(&nd))
    return enumerate(*p->f, detail::insert_zero_coord(u, p->i), horizon, budget);
  if (auto* p = std::get_if<nd_intersect>(&nd)) {
    enum_result a = enumerate(*p->f, u, horizon, budget);
    enum_result b = enumerate(*p->g, u, horizon, budget);
    std::set_intersection(a.items.begin(), a.items.end(), b.items.begin(),
                          b.items.end(), std::inserter(out.items, out.items.end()));
    out.exhaustive = a.exhaustive && b.exhaustive;
    out.complete = a.complete && b.complete;
    if (out.items.empty() && out.complete)
      throw error("EmptyValue", "intersection is empty for this input");
    return out;
  }
  if (auto* p = std::get_if<nd_union>(&nd)) {
    enum_result a = enumerate(*p->f, u, horizon, budget);
    enum_result b = enumerate(*p->g, u, horizon, budget);
    out.items = a.items;
    out.items.insert(b.items.begin(), b.items.end());
    out.exhaustive = a.exhaustive && b.exhaustive;
    out.complete = a.complete && b.complete;
    return out;
  }
  if (auto* p = std::get_if<nd_parallel>(&nd)) {
    std::vector<enum_result> parts;
    std::uint32_t off = 0;
    out.exhaustive = out.complete = true;
    std::uint64_t combos = 1;
    for (const auto& part : p->parts) {
      std::vector<std::uint32_t> mi;
      for (std::uint32_t k = 0; k < part->inputs(); ++k) mi.push_back(off + k);
      parts.push_back(enumerate(*part, u.projected(mi), horizon, budget));
      out.exhaustive = out.exhaustive && parts.back().exhaustive;
      out.complete = out.complete && parts.back().complete;
      combos *= std::max<std::uint64_t>(parts.back().items.size(), 1);
      off += part->inputs();
    }
    if (combos > budget.max_set) {
      out.exhaustive = out.complete = false;
      return out;
    }
    std::vector<std::set<signal>::const_iterator> its;
    for (const auto& m : parts) {
      if (m.items.empty()) return out;
      its.push_back(m.items.begin());
    }
    while (true) {
      signal x = *its[0];
      for (std::size_t k = 1; k < its.size(); ++k) x = flatten(x, *its[k]);
      out.items.insert(x);
      std::size_t k = its.size();
      while (k > 0) {
        ++its[k - 1];
        if (its[k - 1] != parts[k - 1].items.end()) break;
        its[k - 1] = parts[k - 1].items.begin();
        --k;
      }
      if (k == 0) break;
    }
    return out;
  }
  if (auto* p = std::get_if<nd_serial>(&nd)) {
    std::vector<enum_result> mids;
    std::uint32_t off = 0;
    bool all_complete = true;
    std::uint64_t combos = 1;
    for (const auto& part : p->parts) {
      std::vector<std::uint32_t> mi;
      for (std::uint32_t k = 0; k < part->inputs(); ++k) mi.push_back(off + k);
      mids.push_back(enumerate(*part, u.projected(mi), horizon, budget));
      all_complete = all_complete && mids.back().complete;
      combos *= std::max<std::uint64_t>(mids.back().items.size(), 1);
      off += part->inputs();
    }
    if (combos > budget.max_set) return out;  // nothing provable
    out.exhaustive = all_complete;
    out.complete = all_complete;
    std::vector<std::set<signal>::const_iterator> its;
    for (const auto& m : mids) {
      if (m.items.empty()) return enum_result{};
      its.push_back(m.items.begin());
    }
    while (true) {
      signal y = *its[0];
      for (std::size_t k = 1; k < its.size(); ++k) y = flatten(y, *its[k]);
      enum_result inner = enumerate(*p->outer, y, horizon, budget);
      out.items.insert(inner.items.begin(), inner.items.end());
      out.exhaustive = out.exhaustive && inner.exhaustive;
      out.complete = out.complete && inner.complete;
      std::size_t k = its.size();
      while (k > 0) {
        ++its[k - 1];
        if (its[k - 1] != mids[k - 1].items.end()) break;
        its[k - 1] = mids[k - 1].items.begin();
        --k;
      }
      if (k == 0) break;
    }
    return out;
  }
  throw error("BadArgument", "unknown system node");
}

inline std::set<bitvec> initial_states(const system& f, const signal& u,
                                       const query_budget& budget) {
  if (u.width() != f.inputs())
    throw error("ArityMismatch", "input width does not match the system arity");
  const system_node& nd = f.node();
  std::set<bitvec> out;

  if (std::get_if<nd_ideal_delay>(&nd)) return {u.initial()};
  if (auto* p = std::get_if<nd_pointwise>(&nd)) return {p->F.apply(u.initial())};
  if (auto* p = std::get_if<nd_limsup_and>(&nd)) {
    signal a = map_pointwise(bool_fn::and_fn(p->m), u);
    bitvec v(1);
    v.set(0, detail::limsup_bit(a));
    return {v};
  }
  if (auto* p = std::get_if<nd_autonomous>(&nd)) {
    for (const auto& s : p->members) out.insert(s.initial());
    return out;
  }
  if (auto* p = std::get_if<nd_delay_model>(&nd)) {
    if (p->kind == delay_kind::one_on_unit_step)
      return {detail::unit_step_value(u).initial()};
    if (p->kind == delay_kind::band_inequality) {
      // The window bounds pin the state just left of 0.
      rat t0(-1);
      std::optional<rat> last_neg;
      for (const rat& t : u.switch_times_until(rat(0)))
        if (t < rat(0)) last_neg = t;
      if (last_neg) t0 = *last_neg / rat(2);
      bool lo = detail::bit_and_over(u, t0 - p->d1, t0);
      bool hi = detail::bit_or_over(u, t0 - p->d2, t0);
      if (!lo) out.insert(bitvec(1));
      if (hi) out.insert(bitvec{1});
      return out;
    }
    // The remaining families leave the state free before activity starts.
    for (std::uint64_t i = 0; i < (std::uint64_t{1} << f.outputs()); ++i)
      out.insert(bitvec::from_index(f.outputs(), i));
    return out;
  }
  if (auto* p = std::get_if<nd_generated>(&nd)) {
    const auto& inits = p->init.at(u.initial());
    return std::set<bitvec>(inits.begin(), inits.end());
  }
  if (auto* p = std::get_if<nd_complement>(&nd)) {
    for (const auto& b : initial_states(*p->f, u, budget)) out.insert(b.complemented());
    return out;
  }
  if (auto* p = std::get_if<nd_extend>(&nd))
    return initial_states(*p->f, detail::drop_last_coord(u), budget);
  if (auto* p = std::get_if<nd_substitute>(&nd))
    return initial_states(*p->f, detail::substitute_input(u, p->i, p->j), budget);
  if (auto* p = std::get_if<nd_drop>(&nd))
    return initial_states(*p->f, detail::insert_zero_coord(u, p->i), budget);
  if (auto* p = std::get_if<nd_intersect>(&nd)) {
    // Exact when the value sets are completely enumerable; the structural
    // formula only bounds the true set from above.
    rat h = detail::joint_horizon(u) + rat(1);
    enum_result e = enumerate(f, u, h, budget);
    if (e.complete) {
      for (const auto& s : e.items) out.insert(s.initial());
      return out;
    }
    std::set<bitvec> a = initial_states(*p->f, u, budget);
    std::set<bitvec> b = initial_states(*p->g, u, budget);
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                          std::inserter(out, out.end()));
    if (out.empty()) throw error("EmptyValue", "intersection is empty for this input");
    return out;
  }
  if (auto* p = std::get_if<nd_union>(&nd)) {
    out = initial_states(*p->f, u, budget);
    for (const auto& b : initial_states(*p->g, u, budget)) out.insert(b);
    return out;
  }
  if (auto* p = std::get_if<nd_parallel>(&nd)) {
    std::vector<std::set<bitvec>> parts;
    std::uint32_t off = 0;
    for (const auto& part : p->parts) {
      std::vector<std::uint32_t> mi;
      for (std::uint32_t k = 0; k < part->inputs(); ++k) mi.push_back(off + k);
      parts.push_back(initial_states(*part, u.projected(mi), budget));
      off += part->inputs();
    }
    std::vector<std::set<bitvec>::const_iterator> its;
    for (const auto& m : parts) its.push_back(m.begin());
    while (true) {
      bitvec v = *its[0];
      for (std::size_t k = 1; k < its.size(); ++k) v = v.concat(*its[k]);
      out.insert(v);
      std::size_t k = its.size();
      while (k > 0) {
        ++its[k - 1];
        if (its[k - 1] != parts[k - 1].end()) break;
        its[k - 1] = parts[k - 1].begin();
        --k;
      }
      if (k == 0) break;
    }
    return out;
  }
  if (auto* p = std::get_if<nd_serial>(&nd)) {
    rat h = detail::joint_horizon(u) + rat(1);
    std::vector<enum_result> mids;
    std::uint32_t off = 0;
    std::uint64_t combos = 1;
    for (const auto& part : p->parts) {
      std::vector<std::uint32_t> mi;
      for (std::uint32_t k = 0; k < part->inputs(); ++k) mi.push_back(off + k);
      mids.push_back(enumerate(*part, u.projected(mi), h, budget));
      if (!mids.back().complete)
        throw error("BudgetExceeded", "serial initial states need complete intermediates");
      combos *= std::max<std::uint64_t>(mids.back().items.size(), 1);
      off += part->inputs();
    }
    if (combos > budget.max_set)
      throw error("BudgetExceeded", "serial intermediate product exceeds budget");
    std::vector<std::set<signal>::const_iterator> its;
    for (const auto& m : mids) its.push_back(m.items.begin());
    while (true) {
      signal y = *its[0];
      for (std::size_t k = 1; k < its.size(); ++k) y = flatten(y, *its[k]);
      for (const auto& b : initial_states(*p->outer, y, budget)) out.insert(b);
      std::size_t k = its.size();
      while (k > 0) {
        ++its[k - 1];
        if (its[k - 1] != mids[k - 1].items.end()) break;
        its[k - 1] = mids[k - 1].items.begin();
        --k;
      }
      if (k == 0) break;
    }
    return out;
  }
  throw error("BadArgument", "unknown system node");
}

struct initial_set_result {
  std::set<bitvec> states;
  bool exact = false;  // the initial-state function provably ignores the input
};

namespace detail {

inline bool initials_input_free(const system& f) {
  const system_node& nd = f.node();
  if (std::get_if<nd_autonomous>(&nd)) return true;
  if (auto* p = std::get_if<nd_generated>(&nd)) return p->init.input_free();
  if (auto* p = std::get_if<nd_delay_model>(&nd))
    return p->kind != delay_kind::one_on_unit_step;
  if (auto* p = std::get_if<nd_complement>(&nd)) return initials_input_free(*p->f);
  if (auto* p = std::get_if<nd_extend>(&nd)) return initials_input_free(*p->f);
  if (auto* p = std::get_if<nd_substitute>(&nd)) return initials_input_free(*p->f);
  if (auto* p = std::get_if<nd_drop>(&nd)) return initials_input_free(*p->f);
  if (auto* p = std::get_if<nd_union>(&nd))
    return initials_input_free(*p->f) && initials_input_free(*p->g);
  if (auto* p = std::get_if<nd_parallel>(&nd)) {
    for (const auto& part : p->parts)
      if (!initials_input_free(*part)) return false;
    return true;
  }
  return false;
}

}  // namespace detail

inline initial_set_result initial_state_set(const system& f,
                                            const std::vector<signal>& probes,
                                            const query_budget& budget = {}) {
  initial_set_result out;
  out.exact = detail::initials_input_free(f);
  if (out.exact && !probes.empty()) {
    out.states = initial_states(f, probes.front(), budget);
    return out;
  }
  for (const auto& u : probes)
    for (const auto& b : initial_states(f, u, budget)) out.states.insert(b);
  return out;
}

struct inclusion_result {
  verdict v;
  std::optional<signal> witness_u, witness_x;
};

/// Probe-set inclusion check: No with a concrete witness, Yes only when both
/// enumerations are exhaustive and every enumerated member of f verifies in g.
inline inclusion_result includes(const system& f, const system& g,
                                 const std::vector<signal>& probes, const rat& horizon,
                                 const query_budget& budget = {}) {
  if (f.inputs() != g.inputs() || f.outputs() != g.outputs())
    throw error("ArityMismatch", "inclusion needs equal arities");
  bool all_proved = true;
  std::string note = "no probes";
  for (const auto& u : probes) {
    enum_result ef = enumerate(f, u, horizon, budget);
    enum_result eg = enumerate(g, u, horizon, budget);
    for (const auto& x : ef.items) {
      verdict v = contains(g, u, x, budget);
      if (v.is_no()) return {verdict::no(), u, x};
      if (v.is_unknown()) {
        if (eg.exhaustive && !eg.items.count(x)) {
          all_proved = false;
          note = "membership in g unresolved";
        } else if (!eg.exhaustive) {
          all_proved = false;
          note = v.note;
        }
      }
    }
    if (!ef.exhaustive || !eg.exhaustive) {
      all_proved = false;
      note = "enumeration not exhaustive";
    }
  }
  if (probes.empty()) all_proved = false;
  return {all_proved ? verdict::yes() : verdict::unknown(note), {}, {}};
}

struct classification {
  verdict autonomous, finite, deterministic;
};

inline classification classify(const system& f) {
  const system_node& nd = f.node();
  auto yes = verdict::yes;
  auto no = verdict::no;
  auto unk = [] { return verdict::unknown("structure insufficient"); };

  if (std::get_if<nd_ideal_delay>(&nd)) return {no(), yes(), yes()};
  if (auto* p = std::get_if<nd_pointwise>(&nd)) {
    bool is_const = true;
    for (const auto& row : p->F.table())
      if (row != p->F.table().front()) is_const = false;
    return {is_const ? yes() : no(), yes(), yes()};
  }
  if (std::get_if<nd_limsup_and>(&nd)) return {no(), yes(), yes()};
  if (auto* p = std::get_if<nd_autonomous>(&nd))
    return {yes(), yes(), p->members.size() == 1 ? yes() : no()};
  if (auto* p = std::get_if<nd_delay_model>(&nd)) {
    if (p->kind == delay_kind::one_on_unit_step) return {no(), yes(), yes()};
    if (p->kind == delay_kind::inertial_runs) return {yes(), no(), no()};
    if (p->kind == delay_kind::eventually_fn || p->kind == delay_kind::tracks_from0) {
      bool is_const = true;
      for (const auto& row : p->F->table())
        if (row != p->F->table().front()) is_const = false;
      return {is_const ? yes() : no(), no(), no()};
    }
    return {no(), no(), no()};
  }
  if (auto* p = std::get_if<nd_generated>(&nd)) {
    bool state_proj = true;
    std::uint32_t m = p->phi.inputs(), n = p->phi.states();
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << (m + n)); ++v) {
      bitvec in = bitvec::from_index(m + n, v);
      if (p->phi.fn().apply(in) != in.slice(m, n)) { state_proj = false; break; }
    }
    bool singleton = p->init.input_free() && p->init.constant.size() == 1;
    if (state_proj)
      return {p->init.input_free() ? yes() : verdict::unknown("initial map varies"),
              yes(), singleton ? yes() : no()};
    bool ignores_input = true;
    for (std::uint32_t i = 1; i <= m && ignores_input; ++i)
      if (p->phi.fn().depends_on(i)) ignores_input = false;
    if (ignores_input && p->init.input_free())
      return {yes(), verdict::unknown("structure insufficient"), unk()};
    return {unk(), unk(), unk()};
  }
  auto lift1 = [&](const system_ptr& g) { return classify(*g); };
  if (auto* p = std::get_if<nd_complement>(&nd)) return lift1(p->f);
  if (auto* p = std::get_if<nd_extend>(&nd)) {
    classification c = lift1(p->f);
    return c;
  }
  if (auto* p = std::get_if<nd_substitute>(&nd)) return lift1(p->f);
  if (auto* p = std::get_if<nd_drop>(&nd)) return lift1(p->f);
  if (auto* p = std::get_if<nd_intersect>(&nd)) {
    classification a = lift1(p->f), b = lift1(p->g);
    verdict aut = (a.autonomous.is_yes() && b.autonomous.is_yes()) ? yes() : unk();
    verdict fin = (a.finite.is_yes() || b.finite.is_yes()) ? yes() : unk();
    verdict det = (a.deterministic.is_yes() || b.deterministic.is_yes()) ? yes() : unk();
    return {aut, fin, det};
  }
  if (auto* p = std::get_if<nd_union>(&nd)) {
    classification a = lift1(p->f), b = lift1(p->g);
    verdict aut = (a.autonomous.is_yes() && b.autonomous.is_yes()) ? yes() : unk();
    verdict fin = (a.finite.is_yes() && b.finite.is_yes()) ? yes() : unk();
    return {aut, fin, unk()};
  }
  if (auto* p = std::get_if<nd_parallel>(&nd)) {
    verdict aut = yes(), fin = yes(), det = yes();
    for (const auto& part : p->parts) {
      classification c = classify(*part);
      auto meet = [&](verdict acc, verdict v) {
        if (acc.is_no() || v.is_no()) return no();
        if (acc.is_yes() && v.is_yes()) return yes();
        return verdict::unknown("structure insufficient");
      };
      aut = meet(aut, c.autonomous);
      fin = meet(fin, c.finite);
      det = meet(det, c.deterministic);
    }
    return {aut, fin, det};
  }
  if (auto* p = std::get_if<nd_serial>(&nd)) {
    classification o = classify(*p->outer);
    bool inner_aut = true, inner_fin = true, inner_det = true;
    for (const auto& part : p->parts) {
      classification c = classify(*part);
      inner_aut = inner_aut && c.autonomous.is_yes();
      inner_fin = inner_fin && c.finite.is_yes();
      inner_det = inner_det && c.deterministic.is_yes();
    }
    verdict aut = (o.autonomous.is_yes() || inner_aut) ? yes() : unk();
    verdict fin = (o.finite.is_yes() && inner_fin) ? yes() : unk();
    verdict det = (o.deterministic.is_yes() && inner_det) ? yes() : unk();
    return {aut, fin, det};
  }
  return {unk(), unk(), unk()};
}

}  // namespace asynkit
