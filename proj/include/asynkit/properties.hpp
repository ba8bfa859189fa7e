#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "asynkit/system.hpp"

namespace asynkit {

/// Seeded random-signal source: a bounded number of switches at times k/denom
/// in [0, max_time], optional ultimately periodic tails, and a corpus of
/// inputs tried before any random draw. Sampling is pure in the passed rng.
struct signal_gen {
  std::uint32_t width = 1;
  std::uint32_t max_events = 4;
  std::int64_t max_time = 6;
  std::int64_t denom = 2;
  bool tails = true;
  std::vector<signal> corpus;

  rat grid_time(std::mt19937_64& rng) const {
    return rat(static_cast<long long>(rng() % static_cast<std::uint64_t>(max_time * denom + 1)),
               denom);
  }

  signal sample(std::mt19937_64& rng) const {
    bitvec init(width, rng());
    std::set<rat> times;
    std::uint32_t k = static_cast<std::uint32_t>(rng() % (max_events + 1));
    for (std::uint32_t i = 0; i < k; ++i) times.insert(grid_time(rng));
    std::vector<sig_event> evs;
    bitvec prev = init;
    for (const rat& t : times) {
      bitvec v(width, rng());
      if (v == prev) {
        std::uint32_t bit = static_cast<std::uint32_t>(rng() % width);
        v.set(bit, !v.get(bit));
      }
      evs.push_back({t, v});
      prev = v;
    }
    std::optional<sig_tail> tl;
    if (tails && rng() % 4 == 0) {
      rat period = rng() % 2 == 0 ? rat(1) : rat(2);
      rat start = evs.empty() ? grid_time(rng) : evs.back().t + rat(1);
      bitvec a(width, rng());
      std::uint32_t bit = static_cast<std::uint32_t>(rng() % width);
      bitvec b = a;
      b.set(bit, !a.get(bit));
      tl = sig_tail{start, period, {{rat(0), a}, {period / rat(2), b}}};
    }
    return signal(init, std::move(evs), std::move(tl));
  }

  /// Same values as u strictly before t1, fresh random switches from t1 on.
  signal mutate_after(std::mt19937_64& rng, const signal& u, const rat& t1) const {
    signal base = u.frozen(t1);
    std::vector<sig_event> evs = base.events();
    bitvec prev = base.at(t1);
    std::set<rat> times;
    std::uint32_t k = 1 + static_cast<std::uint32_t>(rng() % max_events);
    for (std::uint32_t i = 0; i < k; ++i) {
      rat t = grid_time(rng);
      if (t >= t1) times.insert(t);
    }
    if (times.empty()) times.insert(t1);
    for (const rat& t : times) {
      bitvec v(width, rng());
      if (v == prev) v = prev.complemented();
      evs.push_back({t, v});
      prev = v;
    }
    return signal(u.initial(), std::move(evs));
  }

  signal pick(std::mt19937_64& rng, std::uint64_t trial) const {
    if (trial < corpus.size() && corpus[trial].width() == width) return corpus[trial];
    return sample(rng);
  }
};

enum class prop_status : std::uint8_t { passed, refuted, unknown };

/// Replayable counterexample: the probe input plus whichever of the offending
/// member, second input, translation offset, prefix boundary, or coordinate
/// permutation discriminates the property.
struct prop_witness {
  explicit prop_witness(signal u_) : u(std::move(u_)) {}
  signal u;
  std::optional<signal> x;
  std::optional<signal> v;
  std::optional<rat> d;
  std::optional<rat> t1;
  std::vector<std::uint32_t> perm;
  std::string note;
};

/// Refutation-style answer for a universally quantified property: Passed(N)
/// means no counterexample in N fully decided trials (`skipped` counts trials
/// some enumeration or membership query left undecided), Refuted always
/// carries a witness, Unknown means not a single trial could be decided.
struct prop_verdict {
  prop_status status = prop_status::unknown;
  std::uint64_t trials = 0;
  std::uint64_t skipped = 0;
  std::optional<prop_witness> witness;
  std::string note;

  static prop_verdict passed(std::uint64_t n, std::uint64_t skip, std::string note = {}) {
    prop_verdict r;
    r.status = prop_status::passed;
    r.trials = n;
    r.skipped = skip;
    r.note = std::move(note);
    return r;
  }
  static prop_verdict refuted(prop_witness w, std::uint64_t decided) {
    prop_verdict r;
    r.status = prop_status::refuted;
    r.trials = decided;
    r.witness = std::move(w);
    return r;
  }
  static prop_verdict unknown(std::string why) {
    prop_verdict r;
    r.status = prop_status::unknown;
    r.note = std::move(why);
    return r;
  }
  bool is_passed() const { return status == prop_status::passed; }
  bool is_refuted() const { return status == prop_status::refuted; }
  bool is_unknown() const { return status == prop_status::unknown; }
};

/// One of the four settling guarantees: unconditional; under a settling
/// input; under a settling F(u); settling to a value F(u) takes from there on.
struct stability_kind {
  enum class tag : std::uint8_t { absolute, relative, relative_to, delay_insensitive_to };
  tag t;
  std::optional<bool_fn> F;

  static stability_kind absolute() { return {tag::absolute, {}}; }
  static stability_kind relative() { return {tag::relative, {}}; }
  static stability_kind relative_to(bool_fn F) { return {tag::relative_to, std::move(F)}; }
  static stability_kind delay_insensitive_to(bool_fn F) {
    return {tag::delay_insensitive_to, std::move(F)};
  }
};

/// Translation compatibility of one (input, state) pair. Exact: a pair
/// survives every offset that keeps the input in the class iff the state is
/// constant or both vary and the input switches first.
inline bool nonanticipation1_pair(const signal& u, const signal& x) {
  if (x.is_constant()) return true;
  if (u.is_constant()) return false;
  return *u.first_switch() <= *x.first_switch();
}

/// Agreement on (-infinity, t1), optionally including t1 itself.
inline bool prefix_equal(const signal& a, const signal& b, const rat& t1, bool closed = false) {
  if (!a.prefix_equals(b, t1)) return false;
  return !closed || a.at(t1) == b.at(t1);
}

inline bool stability_pair(const stability_kind& k, const signal& u, const signal& x) {
  using tag = stability_kind::tag;
  if (k.t == tag::absolute) return x.eventually_constant();
  if (k.t == tag::relative) return !u.eventually_constant() || x.eventually_constant();
  if (!k.F) throw error("BadArgument", "this stability kind needs a reference function");
  signal fu = map_pointwise(*k.F, u);
  if (!fu.eventually_constant()) return true;
  if (k.t == tag::relative_to) return x.eventually_constant();
  // Settled state must show a value the reference takes at or after the
  // moment the state went constant (anywhere at all for a constant state).
  if (!x.eventually_constant()) return false;
  std::optional<rat> from;
  if (!x.is_constant()) from = x.constant_from();
  for (const bitvec& v : fu.values_from(from))
    if (v == *x.limit()) return true;
  return false;
}

/// Both the translated input and state must stay in the class and the
/// membership must carry over; vacuous when the input itself drops out.
inline verdict time_invariance_pair(const system& f, const signal& u, const signal& x,
                                    const rat& d, const query_budget& budget = {}) {
  auto ud = translated(u, d);
  if (!ud) return verdict::yes();
  auto xd = translated(x, d);
  if (!xd) return verdict::no();
  return contains(f, *ud, *xd, budget);
}

namespace detail {

inline rat probe_horizon(const signal& u, const signal_gen& gen) {
  return rat_max(rat(gen.max_time) + rat(2), joint_horizon(u) + rat(2));
}

/// Bounded greedy witness shrink: drop the tail, delete events, round
/// fractional switch times down to integers; every candidate re-validated.
template <class Fn>
signal shrink_signal(signal cur, Fn still_refutes) {
  for (int round = 0; round < 64; ++round) {
    bool changed = false;
    if (cur.tail()) {
      signal cand(cur.initial(), cur.events());
      if (still_refutes(cand)) {
        cur = cand;
        changed = true;
      }
    }
    if (!changed)
      for (std::size_t i = 0; i < cur.events().size(); ++i) {
        std::vector<sig_event> evs = cur.events();
        evs.erase(evs.begin() + static_cast<std::ptrdiff_t>(i));
        signal cand(cur.initial(), std::move(evs), cur.tail());
        if (still_refutes(cand)) {
          cur = cand;
          changed = true;
          break;
        }
      }
    if (!changed)
      for (std::size_t i = 0; i < cur.events().size(); ++i) {
        const rat& t = cur.events()[i].t;
        if (t.den() == 1) continue;
        rat fl(t.num() / t.den());
        if (i > 0 && !(cur.events()[i - 1].t < fl)) continue;
        if (i + 1 < cur.events().size() && !(fl < cur.events()[i + 1].t)) continue;
        if (cur.tail() && !(fl < cur.tail()->start)) continue;
        std::vector<sig_event> evs = cur.events();
        evs[i].t = fl;
        signal cand(cur.initial(), std::move(evs), cur.tail());
        if (still_refutes(cand)) {
          cur = cand;
          changed = true;
          break;
        }
      }
    if (!changed) break;
  }
  return cur;
}

template <class Bad>
std::optional<signal> find_bad_member(const system& f, const signal& u, const rat& horizon,
                                      const query_budget& budget, Bad bad) {
  try {
    enum_result e = enumerate(f, u, horizon, budget);
    for (const auto& x : e.items)
      if (bad(x)) return x;
  } catch (const error&) {
  }
  return std::nullopt;
}

}  // namespace detail

inline prop_verdict test_nonanticipation1(const system& f, const signal_gen& gen,
                                          std::uint64_t trials, std::uint64_t seed,
                                          const query_budget& budget = {}) {
  signal_gen g = gen;
  g.width = f.inputs();
  std::mt19937_64 rng(seed);
  std::uint64_t done = 0, skipped = 0;
  std::string why;
  for (std::uint64_t i = 0; i < trials; ++i) {
    signal u = g.pick(rng, i);
    rat horizon = detail::probe_horizon(u, g);
    enum_result e;
    try {
      e = enumerate(f, u, horizon, budget);
    } catch (const error& err) {
      ++skipped;
      why = err.what();
      continue;
    }
    std::optional<signal> culprit;
    for (const auto& x : e.items)
      if (!nonanticipation1_pair(u, x)) {
        culprit = x;
        break;
      }
    if (culprit) {
      auto still = [&](const signal& cand) {
        auto b = detail::find_bad_member(f, cand, detail::probe_horizon(cand, g), budget,
                                         [&](const signal& x) { return !nonanticipation1_pair(cand, x); });
        if (b) culprit = b;
        return b.has_value();
      };
      signal su = detail::shrink_signal(u, still);
      prop_witness w(su);
      w.x = culprit;
      w.d = su.is_constant() ? -(*culprit->first_switch()) - rat(1) : -(*su.first_switch());
      w.note = "translating by d keeps the input in the class but not the state";
      return prop_verdict::refuted(std::move(w), done);
    }
    ++done;
  }
  if (done == 0) return prop_verdict::unknown(why.empty() ? "no decisive trials" : why);
  return prop_verdict::passed(done, skipped);
}

inline prop_verdict test_nonanticipation2(const system& f, const signal_gen& gen,
                                          std::uint64_t trials, std::uint64_t seed,
                                          const query_budget& budget = {},
                                          bool closed_prefix = false) {
  signal_gen g = gen;
  g.width = f.inputs();
  std::mt19937_64 rng(seed);
  std::uint64_t done = 0, skipped = 0;
  std::string why;
  for (std::uint64_t i = 0; i < trials; ++i) {
    signal u = g.pick(rng, i);
    std::uint64_t span = static_cast<std::uint64_t>(g.max_time * g.denom);
    rat t1(1 + static_cast<long long>(rng() % (span ? span : 1)), g.denom);
    // The closed variant compares agreement up to and including t1, so the
    // mutation may only start strictly later.
    rat cut = closed_prefix ? t1 + rat(1, g.denom) : t1;
    signal v = g.mutate_after(rng, u, cut);
    rat horizon = rat_max(detail::probe_horizon(u, g), detail::probe_horizon(v, g));
    enum_result xs;
    try {
      xs = enumerate(f, u, horizon, budget);
    } catch (const error& err) {
      ++skipped;
      why = err.what();
      continue;
    }
    bool undecided = false;
    for (const auto& x : xs.items) {
      query_budget vb = budget;
      for (const rat& s : x.switch_times_until(t1)) vb.extra_times.push_back(s);
      vb.extra_times.push_back(t1);
      enum_result ys;
      try {
        ys = enumerate(f, v, horizon, vb);
      } catch (const error& err) {
        undecided = true;
        why = err.what();
        break;
      }
      bool matched = false;
      for (const auto& y : ys.items)
        if (prefix_equal(x, y, t1, closed_prefix)) {
          matched = true;
          break;
        }
      if (matched) continue;
      if (!ys.complete) {
        undecided = true;
        why = "state set not provably complete";
        break;
      }
      signal bad = x;
      auto still = [&](const signal& vc) {
        if (!prefix_equal(u, vc, t1, closed_prefix)) return false;
        try {
          enum_result xs2 = enumerate(f, u, horizon, budget);
          enum_result ys2 = enumerate(f, vc, horizon, vb);
          if (!ys2.complete) return false;
          for (const auto& x2 : xs2.items) {
            bool m2 = false;
            for (const auto& y2 : ys2.items)
              if (prefix_equal(x2, y2, t1, closed_prefix)) {
                m2 = true;
                break;
              }
            if (!m2) {
              bad = x2;
              return true;
            }
          }
        } catch (const error&) {
        }
        return false;
      };
      signal sv = detail::shrink_signal(v, still);
      prop_witness w(u);
      w.v = sv;
      w.t1 = t1;
      w.x = bad;
      w.note = "no state over the mutated input matches this prefix";
      return prop_verdict::refuted(std::move(w), done);
    }
    if (undecided) {
      ++skipped;
      continue;
    }
    ++done;
  }
  if (done == 0) return prop_verdict::unknown(why.empty() ? "no decisive trials" : why);
  return prop_verdict::passed(done, skipped);
}

inline prop_verdict test_time_invariance(const system& f, const signal_gen& gen,
                                         std::uint64_t trials, std::uint64_t seed,
                                         const query_budget& budget = {}) {
  signal_gen g = gen;
  g.width = f.inputs();
  std::mt19937_64 rng(seed);
  std::uint64_t done = 0, skipped = 0;
  std::string why;
  for (std::uint64_t i = 0; i < trials; ++i) {
    signal u = g.pick(rng, i);
    rat horizon = detail::probe_horizon(u, g);
    enum_result e;
    try {
      e = enumerate(f, u, horizon, budget);
    } catch (const error& err) {
      ++skipped;
      why = err.what();
      continue;
    }
    bool undecided = false;
    for (const auto& x : e.items) {
      std::set<rat> ds{rat(1), rat(1, 2)};
      if (auto s = u.first_switch()) {
        ds.insert(-*s);
        ds.insert(-*s + rat(1, 2));
        ds.insert(-(*s / rat(2)));
      }
      if (auto s = x.first_switch()) {
        ds.insert(-*s);
        ds.insert(-*s - rat(1));
        ds.insert(-(*s / rat(2)));
      }
      for (const rat& d : ds) {
        verdict pv = time_invariance_pair(f, u, x, d, budget);
        if (pv.is_unknown()) {
          undecided = true;
          why = pv.note;
          continue;
        }
        if (pv.is_yes()) continue;
        signal bx = x;
        rat bd = d;
        auto still = [&](const signal& cand) {
          auto b = detail::find_bad_member(
              f, cand, detail::probe_horizon(cand, g), budget, [&](const signal& x2) {
                std::set<rat> ds2{rat(1), rat(1, 2), bd};
                if (auto s2 = cand.first_switch()) ds2.insert(-*s2);
                if (auto s2 = x2.first_switch()) {
                  ds2.insert(-*s2);
                  ds2.insert(-*s2 - rat(1));
                }
                for (const rat& d2 : ds2)
                  if (time_invariance_pair(f, cand, x2, d2, budget).is_no()) {
                    bd = d2;
                    return true;
                  }
                return false;
              });
          if (b) bx = *b;
          return b.has_value();
        };
        signal su = detail::shrink_signal(u, still);
        prop_witness w(su);
        w.x = bx;
        w.d = bd;
        w.note = "membership does not survive this translation";
        return prop_verdict::refuted(std::move(w), done);
      }
    }
    if (undecided) {
      ++skipped;
      continue;
    }
    ++done;
  }
  if (done == 0) return prop_verdict::unknown(why.empty() ? "no decisive trials" : why);
  return prop_verdict::passed(done, skipped);
}

namespace detail {

struct image_cmp {
  std::optional<signal> member;  // offending member of either side
  bool undecided = false;
  std::string why;
};

/// Two-sided comparison of f(u) and f(v) through a value map: every
/// enumerated member of one side, mapped, must verify in the other.
template <class Map>
image_cmp compare_once(const system& f, const signal& u, const signal& v, Map map_state,
                       const rat& horizon, const query_budget& budget) {
  image_cmp r;
  enum_result a, b;
  try {
    a = enumerate(f, u, horizon, budget);
    b = enumerate(f, v, horizon, budget);
  } catch (const error& err) {
    r.undecided = true;
    r.why = err.what();
    return r;
  }
  for (const auto& x : a.items) {
    verdict pv = contains(f, v, map_state(x), budget);
    if (pv.is_no()) {
      r.member = x;
      return r;
    }
    if (pv.is_unknown()) {
      r.undecided = true;
      r.why = pv.note;
    }
  }
  for (const auto& y : b.items) {
    verdict pv = contains(f, u, map_state(y), budget);
    if (pv.is_no()) {
      r.member = y;
      return r;
    }
    if (pv.is_unknown()) {
      r.undecided = true;
      r.why = pv.note;
    }
  }
  return r;
}

}  // namespace detail

inline prop_verdict test_coord_symmetry(const system& f, const signal_gen& gen,
                                        std::uint64_t trials, std::uint64_t seed,
                                        const query_budget& budget = {}) {
  if (f.inputs() < 2)
    return prop_verdict::passed(trials, 0, "single input: every permutation is the identity");
  signal_gen g = gen;
  g.width = f.inputs();
  std::mt19937_64 rng(seed);
  std::uint64_t done = 0, skipped = 0;
  std::string why;
  // One adjacent transposition per trial; transpositions generate every
  // permutation, so any asymmetry shows on some adjacent pair.
  for (std::uint64_t i = 0; i < trials; ++i) {
    signal u = g.pick(rng, i);
    std::uint32_t p = static_cast<std::uint32_t>(rng() % (f.inputs() - 1));
    std::vector<std::uint32_t> perm(f.inputs());
    for (std::uint32_t k = 0; k < f.inputs(); ++k) perm[k] = k;
    std::swap(perm[p], perm[p + 1]);
    auto ident = [](const signal& s) { return s; };
    detail::image_cmp r =
        detail::compare_once(f, u, u.permuted(perm), ident, detail::probe_horizon(u, g), budget);
    if (r.member) {
      signal bad = *r.member;
      auto still = [&](const signal& cand) {
        detail::image_cmp r2 = detail::compare_once(f, cand, cand.permuted(perm), ident,
                                                    detail::probe_horizon(cand, g), budget);
        if (r2.member) bad = *r2.member;
        return r2.member.has_value();
      };
      signal su = detail::shrink_signal(u, still);
      prop_witness w(su);
      w.v = su.permuted(perm);
      w.x = bad;
      w.perm = perm;
      w.note = "state set changes when two adjacent inputs swap";
      return prop_verdict::refuted(std::move(w), done);
    }
    if (r.undecided) {
      ++skipped;
      why = r.why;
      continue;
    }
    ++done;
  }
  if (done == 0) return prop_verdict::unknown(why.empty() ? "no decisive trials" : why);
  return prop_verdict::passed(done, skipped);
}

inline prop_verdict test_rf_symmetry(const system& f, const signal_gen& gen,
                                     std::uint64_t trials, std::uint64_t seed,
                                     const query_budget& budget = {}) {
  signal_gen g = gen;
  g.width = f.inputs();
  std::mt19937_64 rng(seed);
  std::uint64_t done = 0, skipped = 0;
  std::string why;
  auto comp = [](const signal& s) { return s.complemented(); };
  for (std::uint64_t i = 0; i < trials; ++i) {
    signal u = g.pick(rng, i);
    detail::image_cmp r =
        detail::compare_once(f, u, u.complemented(), comp, detail::probe_horizon(u, g), budget);
    if (r.member) {
      signal bad = *r.member;
      auto still = [&](const signal& cand) {
        detail::image_cmp r2 = detail::compare_once(f, cand, cand.complemented(), comp,
                                                    detail::probe_horizon(cand, g), budget);
        if (r2.member) bad = *r2.member;
        return r2.member.has_value();
      };
      signal su = detail::shrink_signal(u, still);
      prop_witness w(su);
      w.v = su.complemented();
      w.x = bad;
      w.note = "complementing input and state does not preserve membership";
      return prop_verdict::refuted(std::move(w), done);
    }
    if (r.undecided) {
      ++skipped;
      why = r.why;
      continue;
    }
    ++done;
  }
  if (done == 0) return prop_verdict::unknown(why.empty() ? "no decisive trials" : why);
  return prop_verdict::passed(done, skipped);
}

inline prop_verdict test_stability(const stability_kind& kind, const system& f,
                                   const signal_gen& gen, std::uint64_t trials,
                                   std::uint64_t seed, const query_budget& budget = {}) {
  if (kind.F && kind.F->arity_in() != f.inputs())
    throw error("ArityMismatch", "reference function arity differs from the system input arity");
  if (kind.F && kind.t == stability_kind::tag::delay_insensitive_to &&
      kind.F->arity_out() != f.outputs())
    throw error("ArityMismatch", "reference output width differs from the state width");
  signal_gen g = gen;
  g.width = f.inputs();
  std::mt19937_64 rng(seed);
  std::uint64_t done = 0, skipped = 0;
  std::string why;
  for (std::uint64_t i = 0; i < trials; ++i) {
    signal u = g.pick(rng, i);
    rat horizon = detail::probe_horizon(u, g);
    enum_result e;
    try {
      e = enumerate(f, u, horizon, budget);
    } catch (const error& err) {
      ++skipped;
      why = err.what();
      continue;
    }
    for (const auto& x : e.items)
      if (!stability_pair(kind, u, x)) {
        signal bad = x;
        auto still = [&](const signal& cand) {
          auto b = detail::find_bad_member(f, cand, detail::probe_horizon(cand, g), budget,
                                           [&](const signal& x2) { return !stability_pair(kind, cand, x2); });
          if (b) bad = *b;
          return b.has_value();
        };
        signal su = detail::shrink_signal(u, still);
        prop_witness w(su);
        w.x = bad;
        w.note = "state fails the settling guarantee on this input";
        return prop_verdict::refuted(std::move(w), done);
      }
    ++done;
  }
  if (done == 0) return prop_verdict::unknown(why.empty() ? "no decisive trials" : why);
  return prop_verdict::passed(done, skipped);
}

}  // namespace asynkit
