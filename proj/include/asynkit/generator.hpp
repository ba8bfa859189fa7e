#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "asynkit/boolfn.hpp"
#include "asynkit/signal.hpp"

namespace asynkit {

/// Next-state function Phi : B^m x B^n -> B^n (inputs first, state last).
class gen_fn {
public:
  gen_fn(std::uint32_t m, std::uint32_t n, bool_fn fn)
      : m_(m), n_(n), fn_(std::move(fn)) {
    if (fn_.arity_in() != m_ + n_ || fn_.arity_out() != n_)
      throw error("WidthMismatch", "generator function must map B^(m+n) to B^n");
  }

  std::uint32_t inputs() const { return m_; }
  std::uint32_t states() const { return n_; }
  const bool_fn& fn() const { return fn_; }

  bitvec next(const bitvec& lambda, const bitvec& mu) const {
    return fn_.apply(lambda.concat(mu));
  }

  /// Coordinates where the computed next state differs from mu.
  bitvec excited(const bitvec& lambda, const bitvec& mu) const {
    bitvec target = next(lambda, mu);
    bitvec mask(n_);
    for (std::uint32_t i = 0; i < n_; ++i) mask.set(i, target.get(i) != mu.get(i));
    return mask;
  }

  bool is_stable(const bitvec& lambda, const bitvec& mu) const {
    return excited(lambda, mu).all_zero();
  }

  friend bool operator==(const gen_fn&, const gen_fn&) = default;

private:
  std::uint32_t m_, n_;
  bool_fn fn_;
};

/// All states reachable in one update: every subset of the excited
/// coordinates takes its computed value, the rest hold. Sorted by subset
/// rank, so the held state comes first.
inline std::vector<bitvec> successors(const gen_fn& phi, const bitvec& lambda,
                                      const bitvec& mu) {
  bitvec target = phi.next(lambda, mu);
  std::vector<std::uint32_t> exc;
  for (std::uint32_t i = 0; i < phi.states(); ++i)
    if (target.get(i) != mu.get(i)) exc.push_back(i);
  std::vector<bitvec> out;
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << exc.size()); ++s) {
    bitvec v = mu;
    for (std::size_t k = 0; k < exc.size(); ++k)
      if ((s >> k) & 1u) v.set(exc[k], target.get(exc[k]));
    out.push_back(v);
  }
  return out;
}

enum class first_transition : std::uint8_t {
  justified,  // a switch at time 0 is allowed when the generator justifies it
  hold,       // the state must keep its pre-initial value at time 0
};

/// Exact decision of "x is a run of phi under input u": every switch of x is
/// justified by phi evaluated on left-limit values, and no coordinate is
/// ultimately excited toward a fixed complement while never updating.
/// Total on ultimately periodic signals (periodic behaviour is checked over
/// one joint period). Does not constrain x(0-0).
inline bool check_membership(const gen_fn& phi, const signal& u, const signal& x,
                             first_transition rule = first_transition::justified) {
  if (u.width() != phi.inputs() || x.width() != phi.states())
    throw error("WidthMismatch", "signal widths do not match the generator function");
  if (rule == first_transition::hold && x.first_switch() == rat(0)) return false;

  signal joint = flatten(u, x);
  rat horizon = joint.tail() ? joint.tail()->start + joint.tail()->period
              : joint.events().empty() ? rat(0)
                                       : joint.events().back().t;
  for (const rat& t : x.switch_times_until(horizon)) {
    bitvec lam = u.before(t);
    bitvec mu = x.before(t);
    bitvec nu = x.at(t);
    bitvec target = phi.next(lam, mu);
    for (std::uint32_t i = 0; i < phi.states(); ++i)
      if (nu.get(i) != mu.get(i) && nu.get(i) != target.get(i)) return false;
  }

  if (!joint.tail()) {
    bitvec lam = u.events().empty() ? u.initial() : u.events().back().v;
    bitvec mu = x.events().empty() ? x.initial() : x.events().back().v;
    return phi.is_stable(lam, mu);
  }

  // Periodic tail: a coordinate is treated unfairly iff it is constant over
  // the cycle while the generator points at its complement at every sample.
  const sig_tail& tl = *joint.tail();
  for (std::uint32_t i = 0; i < phi.states(); ++i) {
    bool const_coord = true;
    bool always_excited = true;
    bool first = true;
    bool value = false;
    for (const auto& e : tl.pattern) {
      rat t = tl.start + e.t;
      bitvec lam = u.at(t);
      bitvec mu = x.at(t);
      if (first) {
        value = mu.get(i);
        first = false;
      } else if (mu.get(i) != value) {
        const_coord = false;
        break;
      }
      if (phi.next(lam, mu).get(i) == mu.get(i)) always_excited = false;
    }
    if (const_coord && always_excited) return false;
  }
  return true;
}

/// One interleaving run: the state at every step time, with the update mask
/// (zero mask = hold). states[k] holds from times[k] to times[k+1).
struct trajectory {
  bitvec x0;
  std::vector<rat> times;
  std::vector<bitvec> states;
  std::vector<bitvec> masks;

  signal rendered() const {
    std::vector<sig_event> evs;
    bitvec prev = x0;
    for (std::size_t k = 0; k < times.size(); ++k) {
      if (states[k] != prev) evs.push_back({times[k], states[k]});
      prev = states[k];
    }
    return signal(x0, std::move(evs));
  }
};

struct trajectory_set {
  std::vector<trajectory> items;
  bool exhaustive = true;
};

/// Breadth-first interleaving exploration. Between consecutive input events
/// there are max_internal_steps evenly spaced update opportunities besides
/// the one at each event time; after the last event, unit-spaced steps run
/// until the whole frontier is stable or max_internal_steps more were taken.
/// With fairness_filter only runs that settled in a stable state survive.
/// exhaustive is true when no unstable frontier state was left behind.
inline trajectory_set enumerate_trajectories(const gen_fn& phi, const signal& u,
                                             const bitvec& x0,
                                             std::uint32_t max_internal_steps,
                                             bool fairness_filter,
                                             std::uint64_t max_runs = std::uint64_t{1} << 14) {
  if (u.width() != phi.inputs() || x0.width() != phi.states())
    throw error("WidthMismatch", "signal widths do not match the generator function");
  if (!u.eventually_constant())
    throw error("PeriodicTailUnsupported", "trajectory enumeration needs an eventually constant input");

  std::vector<rat> anchors{rat(0)};
  for (const auto& e : u.events())
    if (e.t > rat(0)) anchors.push_back(e.t);

  std::vector<rat> step_times;
  for (std::size_t a = 0; a + 1 < anchors.size(); ++a) {
    step_times.push_back(anchors[a]);
    rat gap = anchors[a + 1] - anchors[a];
    for (std::uint32_t j = 1; j <= max_internal_steps; ++j)
      step_times.push_back(anchors[a] + gap * rat(j) / rat(max_internal_steps + 1));
  }
  step_times.push_back(anchors.back());

  std::vector<trajectory> frontier{{x0, {}, {}, {}}};
  bool exhaustive = true;
  bitvec final_input = *u.limit();

  auto step_at = [&](const rat& t) {
    std::vector<trajectory> next;
    for (const auto& tr : frontier) {
      bitvec mu = tr.states.empty() ? tr.x0 : tr.states.back();
      bitvec lam = u.before(t);
      for (const bitvec& nu : successors(phi, lam, mu)) {
        if (next.size() >= max_runs) {
          exhaustive = false;
          break;
        }
        trajectory ext = tr;
        ext.times.push_back(t);
        ext.states.push_back(nu);
        bitvec mask(phi.states());
        for (std::uint32_t i = 0; i < phi.states(); ++i) mask.set(i, nu.get(i) != mu.get(i));
        ext.masks.push_back(mask);
        next.push_back(std::move(ext));
      }
    }
    frontier = std::move(next);
  };

  auto all_stable = [&]() {
    for (const auto& tr : frontier) {
      bitvec mu = tr.states.empty() ? tr.x0 : tr.states.back();
      if (!phi.is_stable(final_input, mu)) return false;
    }
    return true;
  };

  for (const rat& t : step_times) step_at(t);
  for (std::uint32_t j = 1; j <= max_internal_steps && !all_stable(); ++j)
    step_at(anchors.back() + rat(j));
  if (!all_stable()) exhaustive = false;

  trajectory_set out;
  out.exhaustive = exhaustive;
  for (auto& tr : frontier) {
    if (fairness_filter) {
      bitvec mu = tr.states.empty() ? tr.x0 : tr.states.back();
      if (!phi.is_stable(final_input, mu)) continue;
    }
    out.items.push_back(std::move(tr));
  }
  return out;
}

/// The single row a constant generator function outputs, when it is constant.
inline std::optional<bitvec> constant_value(const gen_fn& phi) {
  const auto& t = phi.fn().table();
  for (const auto& row : t)
    if (row != t.front()) return std::nullopt;
  return t.front();
}

/// Closed form for runs of a constant generator function with value x1 from
/// pre-initial state x0: every coordinate either stays (when x0_i == x1_i) or
/// switches exactly once from x0_i to x1_i at an arbitrary time >= 0.
inline bool constant_phi_member(const bitvec& x1, const bitvec& x0, const signal& x) {
  if (x.width() != x1.width() || x0.width() != x1.width())
    throw error("WidthMismatch", "state widths differ");
  if (x.initial() != x0) return false;
  for (std::uint32_t i = 0; i < x1.width(); ++i) {
    signal xi = x.projected({i});
    if (x0.get(i) == x1.get(i)) {
      if (!xi.is_constant()) return false;
    } else {
      if (xi.events().size() != 1 || xi.tail()) return false;
    }
  }
  return true;
}

enum class gamma_kind : std::uint8_t { complement, extend, substitute, drop };

/// Generator-side images of the system combinators:
///   complement: Gamma(lambda, mu) = ~Phi(lambda, ~mu)
///   extend:     one extra ignored input
///   substitute: input j fed from input i
///   drop:       input i removed (must be unused), 1-based indices.
inline gen_fn gamma_transform(const gen_fn& phi, gamma_kind kind, std::uint32_t i = 0,
                              std::uint32_t j = 0) {
  std::uint32_t m = phi.inputs(), n = phi.states();
  switch (kind) {
    case gamma_kind::complement:
      return gen_fn(m, n, bool_fn::from_fn(m + n, n, [&](const bitvec& v) {
                      bitvec lam = v.slice(0, m);
                      bitvec mu = v.slice(m, n);
                      return phi.next(lam, mu.complemented()).complemented();
                    }));
    case gamma_kind::extend:
      return gen_fn(m + 1, n, bool_fn::from_fn(m + 1 + n, n, [&](const bitvec& v) {
                      return phi.next(v.slice(0, m), v.slice(m + 1, n));
                    }));
    case gamma_kind::substitute: {
      if (i == 0 || i > m || j == 0 || j > m)
        throw error("WidthMismatch", "substitute coordinates out of range");
      return gen_fn(m, n, phi.fn().substituted(i, j));
    }
    case gamma_kind::drop: {
      if (i == 0 || i > m) throw error("WidthMismatch", "drop coordinate out of range");
      if (phi.fn().depends_on(i))
        throw error("DependentInput", "generator function depends on the dropped input");
      return gen_fn(m - 1, n, phi.fn().dropped(i));
    }
  }
  throw error("BadArgument", "unknown gamma kind");
}

struct settling_report {
  enum class verdict : std::uint8_t { yes, no, unknown } result;
  // For "no": an input and a strongly connected set of states carrying a fair
  // non-settling run.
  std::optional<bitvec> witness_input;
  std::vector<bitvec> witness_states;
};

/// Sufficient settling test: for every constant input the proper-update
/// successor graph must be acyclic (stable points have no proper updates).
/// When a cycle exists, searches for a fair strongly connected witness; if
/// none is found the answer stays unknown.
inline settling_report settling_check(const gen_fn& phi) {
  std::uint32_t n = phi.states();
  if (n > 10) throw error("BudgetExceeded", "settling check limited to n <= 10");
  std::uint64_t states = std::uint64_t{1} << n;
  bool any_cycle = false;
  settling_report rep{settling_report::verdict::yes, {}, {}};

  for (std::uint64_t li = 0; li < (std::uint64_t{1} << phi.inputs()); ++li) {
    bitvec lam = bitvec::from_index(phi.inputs(), li);
    std::vector<std::vector<std::uint64_t>> adj(states);
    for (std::uint64_t mi = 0; mi < states; ++mi) {
      bitvec mu = bitvec::from_index(n, mi);
      for (const bitvec& nu : successors(phi, lam, mu))
        if (nu != mu) adj[mi].push_back(nu.index());
    }
    // Cycle detection (iterative colouring).
    std::vector<int> colour(states, 0);
    bool cyclic = false;
    for (std::uint64_t s = 0; s < states && !cyclic; ++s) {
      if (colour[s] != 0) continue;
      std::vector<std::pair<std::uint64_t, std::size_t>> stack{{s, 0}};
      colour[s] = 1;
      while (!stack.empty()) {
        auto& [node, idx] = stack.back();
        if (idx < adj[node].size()) {
          std::uint64_t nxt = adj[node][idx++];
          if (colour[nxt] == 1) {
            cyclic = true;
            break;
          }
          if (colour[nxt] == 0) {
            colour[nxt] = 1;
            stack.push_back({nxt, 0});
          }
        } else {
          colour[node] = 2;
          stack.pop_back();
        }
      }
    }
    if (!cyclic) continue;
    any_cycle = true;

    if (n <= 4) {
      // Exhaustive search for a fair strongly connected witness set.
      for (std::uint64_t set = 1; set < (std::uint64_t{1} << states); ++set) {
        std::vector<std::uint64_t> members;
        for (std::uint64_t s = 0; s < states; ++s)
          if ((set >> s) & 1u) members.push_back(s);
        if (members.size() < 2) continue;
        auto inside = [&](std::uint64_t s) { return (set >> s) & 1u; };
        // Strong connectivity within the subset.
        bool sc = true;
        for (std::uint64_t from : members) {
          std::vector<bool> seen(states, false);
          std::vector<std::uint64_t> q{from};
          seen[from] = true;
          for (std::size_t h = 0; h < q.size(); ++h)
            for (std::uint64_t nxt : adj[q[h]])
              if (inside(nxt) && !seen[nxt]) {
                seen[nxt] = true;
                q.push_back(nxt);
              }
          for (std::uint64_t other : members)
            if (!seen[other]) {
              sc = false;
              break;
            }
          if (!sc) break;
        }
        if (!sc) continue;
        bool fair = true;
        for (std::uint32_t i = 0; i < n && fair; ++i) {
          bool coord_varies = false;
          bool sometimes_content = false;
          for (std::uint64_t s : members) {
            bitvec mu = bitvec::from_index(n, s);
            if (mu.get(i) != bitvec::from_index(n, members.front()).get(i)) coord_varies = true;
            if (phi.next(lam, mu).get(i) == mu.get(i)) sometimes_content = true;
          }
          if (!coord_varies && !sometimes_content) fair = false;
        }
        if (fair) {
          rep.result = settling_report::verdict::no;
          rep.witness_input = lam;
          for (std::uint64_t s : members) rep.witness_states.push_back(bitvec::from_index(n, s));
          return rep;
        }
      }
    }
  }
  rep.result = any_cycle ? settling_report::verdict::unknown : settling_report::verdict::yes;
  return rep;
}

}  // namespace asynkit
