// Batch front-end: parse signal / truth-table / system files, run the
// checkers and enumerations, and emit deterministic reports.
//
// Exit codes: 0 = yes/passed, 1 = no/refuted (witness files written),
// 2 = unknown, 3 = usage or parse error. Identical inputs and seed produce
// byte-identical output.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "asynkit/io.hpp"
#include "asynkit/mode.hpp"
#include "asynkit/properties.hpp"

namespace {

using namespace asynkit;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error("IoError", "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw error("IoError", "cannot write '" + path + "'");
  out << text;
}

signal load_signal(const std::string& path) {
  return parse_signal_text(slurp(path), path);
}

bool_fn load_boolfn(const std::string& path) {
  return parse_boolfn_text(slurp(path), path);
}

gen_fn load_genfn(const std::string& path) {
  return parse_genfn_text(slurp(path), path);
}

system_ptr load_system(const std::string& path) {
  std::filesystem::path dir = std::filesystem::path(path).parent_path();
  file_loader loader = [dir](const std::string& ref) {
    return slurp((dir / ref).string());
  };
  return parse_system_text(slurp(path), path, loader);
}

std::string verdict_word(const verdict& v) {
  if (v.is_yes()) return "yes";
  if (v.is_no()) return "no";
  return "unknown";
}

int verdict_exit(const verdict& v) {
  if (v.is_yes()) return 0;
  if (v.is_no()) return 1;
  return 2;
}

std::string status_word(prop_status s) {
  switch (s) {
    case prop_status::passed: return "passed";
    case prop_status::refuted: return "refuted";
    case prop_status::unknown: return "unknown";
  }
  return "unknown";
}

std::vector<rat> parse_rat_list(const std::string& text) {
  std::vector<rat> out;
  std::size_t i = 0;
  while (i <= text.size()) {
    std::size_t j = text.find(',', i);
    std::string tok = j == std::string::npos ? text.substr(i)
                                             : text.substr(i, j - i);
    if (!tok.empty()) out.push_back(rat::parse(tok));
    if (j == std::string::npos) break;
    i = j + 1;
  }
  if (out.empty()) throw error("BadArgument", "empty time list");
  return out;
}

std::vector<bitvec> parse_bits_list(const std::string& text) {
  std::vector<bitvec> out;
  std::size_t i = 0;
  while (i <= text.size()) {
    std::size_t j = text.find(';', i);
    std::string tok = j == std::string::npos ? text.substr(i)
                                             : text.substr(i, j - i);
    if (!tok.empty()) out.push_back(bitvec::parse(tok));
    if (j == std::string::npos) break;
    i = j + 1;
  }
  if (out.empty()) throw error("BadArgument", "empty bit-vector list");
  return out;
}

// Shared flag values. --out is a prefix for every file the run writes
// (artifacts, witnesses); reports always go to stdout.
struct flags {
  std::uint64_t seed = 0;
  std::uint64_t trials = 200;
  std::string horizon = "6";
  std::uint64_t budget = 0;  // 0 keeps the library default
  std::string out;
  std::string format = "text";

  rat horizon_rat() const { return rat::parse(horizon); }

  query_budget make_budget() const {
    query_budget b;
    if (budget) b.max_set = budget;
    return b;
  }

  report_format fmt() const { return parse_report_format(format); }

  std::string prefix() const { return out.empty() ? "witness" : out; }
};

void add_common(CLI::App* cmd, flags& fl) {
  cmd->add_option("--seed", fl.seed, "RNG seed (default 0)");
  cmd->add_option("--trials", fl.trials, "number of randomized trials");
  cmd->add_option("--horizon", fl.horizon, "enumeration horizon (rational)");
  cmd->add_option("--budget", fl.budget, "candidate-set budget");
  cmd->add_option("--out", fl.out, "output path prefix for written files");
  cmd->add_option("--format", fl.format, "report format: text, machine, csv")
      ->check(CLI::IsMember({"text", "machine", "csv"}));
}

int emit_report(const report& rep, const flags& fl) {
  std::cout << rep.render(fl.fmt() == report_format::csv ? report_format::text
                                                         : fl.fmt());
  return 0;
}

void add_witness_fields(report& rep, const prop_witness& w, const flags& fl) {
  rep.add("witness_u", emit_signal_inline(w.u));
  spit(fl.prefix() + ".u.sig", emit_signal(w.u));
  if (w.x) {
    rep.add("witness_x", emit_signal_inline(*w.x));
    spit(fl.prefix() + ".x.sig", emit_signal(*w.x));
  }
  if (w.v) {
    rep.add("witness_v", emit_signal_inline(*w.v));
    spit(fl.prefix() + ".v.sig", emit_signal(*w.v));
  }
  if (w.d) rep.add("witness_d", w.d->str());
  if (w.t1) rep.add("witness_t1", w.t1->str());
  if (!w.perm.empty()) {
    std::string p;
    for (std::size_t i = 0; i < w.perm.size(); ++i)
      p += (i ? "," : "") + std::to_string(w.perm[i]);
    rep.add("witness_perm", p);
  }
  if (!w.note.empty()) rep.add("witness_note", w.note);
}

int report_prop(const prop_verdict& pv, const flags& fl) {
  report rep;
  rep.add("status", status_word(pv.status));
  rep.add("trials", std::to_string(pv.trials));
  rep.add("skipped", std::to_string(pv.skipped));
  if (!pv.note.empty()) rep.add("note", pv.note);
  if (pv.witness) add_witness_fields(rep, *pv.witness, fl);
  emit_report(rep, fl);
  switch (pv.status) {
    case prop_status::passed: return 0;
    case prop_status::refuted: return 1;
    case prop_status::unknown: return 2;
  }
  return 2;
}

// Transform subcommands emit the artifact inline and, with --out, as a file.
int report_signal_artifact(const signal& s, const flags& fl) {
  report rep;
  rep.add("result", "yes");
  rep.add("signal", emit_signal_inline(s));
  emit_report(rep, fl);
  if (!fl.out.empty()) spit(fl.out + ".sig", emit_signal(s));
  return 0;
}

int run_signal_eval(const flags& fl, const std::string& in, const std::string& t) {
  signal u = load_signal(in);
  rat at = rat::parse(t);
  report rep;
  rep.add("t", at.str());
  rep.add("value", u.at(at).str());
  rep.add("before", u.before(at).str());
  return emit_report(rep, fl);
}

int run_signal_translate(const flags& fl, const std::string& in, const std::string& d) {
  signal u = load_signal(in);
  rat off = rat::parse(d);
  std::optional<signal> moved = translated(u, off);
  if (!moved) {
    report rep;
    rep.add("result", "no");
    rep.add("error", "NotASignal");
    rep.add("note", "translation would move the first switch before 0");
    emit_report(rep, fl);
    return 1;
  }
  return report_signal_artifact(*moved, fl);
}

int run_sys_contains(const flags& fl, const std::string& sys_path,
                     const std::string& u_path, const std::string& x_path) {
  system_ptr f = load_system(sys_path);
  verdict v = contains(*f, load_signal(u_path), load_signal(x_path), fl.make_budget());
  report rep;
  rep.add("verdict", verdict_word(v));
  if (!v.note.empty()) rep.add("note", v.note);
  emit_report(rep, fl);
  return verdict_exit(v);
}

int run_sys_enumerate(const flags& fl, const std::string& sys_path,
                      const std::string& u_path) {
  system_ptr f = load_system(sys_path);
  enum_result r = enumerate(*f, load_signal(u_path), fl.horizon_rat(), fl.make_budget());
  report rep;
  rep.add("count", std::to_string(r.items.size()));
  rep.add("exhaustive", r.exhaustive ? "true" : "false");
  rep.add("complete", r.complete ? "true" : "false");
  std::size_t k = 0;
  for (const signal& s : r.items)
    rep.add("item" + std::to_string(k++), emit_signal_inline(s));
  emit_report(rep, fl);
  return r.exhaustive ? 0 : 2;
}

int run_sys_initials(const flags& fl, const std::string& sys_path,
                     const std::string& u_path) {
  system_ptr f = load_system(sys_path);
  std::set<bitvec> st = initial_states(*f, load_signal(u_path), fl.make_budget());
  report rep;
  rep.add("count", std::to_string(st.size()));
  std::size_t k = 0;
  for (const bitvec& v : st) rep.add("state" + std::to_string(k++), v.str());
  return emit_report(rep, fl);
}

int run_sys_includes(const flags& fl, const std::string& sys_path,
                     const std::string& other_path) {
  system_ptr f = load_system(sys_path);
  system_ptr g = load_system(other_path);
  signal_gen gen;
  gen.width = f->inputs();
  std::mt19937_64 rng(fl.seed);
  std::vector<signal> probes;
  for (std::uint64_t i = 0; i < fl.trials; ++i) probes.push_back(gen.sample(rng));
  inclusion_result r = includes(*f, *g, probes, fl.horizon_rat(), fl.make_budget());
  report rep;
  rep.add("verdict", verdict_word(r.v));
  if (!r.v.note.empty()) rep.add("note", r.v.note);
  if (r.witness_u) {
    rep.add("witness_u", emit_signal_inline(*r.witness_u));
    spit(fl.prefix() + ".u.sig", emit_signal(*r.witness_u));
  }
  if (r.witness_x) {
    rep.add("witness_x", emit_signal_inline(*r.witness_x));
    spit(fl.prefix() + ".x.sig", emit_signal(*r.witness_x));
  }
  emit_report(rep, fl);
  return verdict_exit(r.v);
}

int run_sys_classify(const flags& fl, const std::string& sys_path,
                     const std::string& f_path) {
  system_ptr f = load_system(sys_path);
  std::vector<std::pair<std::string, stability_kind>> kinds;
  kinds.emplace_back("absolute", stability_kind::absolute());
  kinds.emplace_back("relative", stability_kind::relative());
  if (!f_path.empty()) {
    bool_fn F = load_boolfn(f_path);
    kinds.emplace_back("relative_to", stability_kind::relative_to(F));
    kinds.emplace_back("delay_insensitive_to", stability_kind::delay_insensitive_to(F));
  }
  report rep;
  bool any_unknown = false;
  for (const auto& [label, kind] : kinds) {
    prop_verdict pv = test_stability(kind, *f, signal_gen{}, fl.trials, fl.seed,
                                     fl.make_budget());
    rep.add(label, status_word(pv.status));
    if (pv.status == prop_status::unknown) any_unknown = true;
  }
  emit_report(rep, fl);
  return any_unknown ? 2 : 0;
}

int run_prop(const flags& fl, const std::string& which, const std::string& sys_path,
             const std::string& f_path, const std::string& stab_kind,
             bool closed_prefix) {
  system_ptr f = load_system(sys_path);
  signal_gen gen;
  prop_verdict pv;
  if (which == "na1") {
    pv = test_nonanticipation1(*f, gen, fl.trials, fl.seed, fl.make_budget());
  } else if (which == "na2") {
    pv = test_nonanticipation2(*f, gen, fl.trials, fl.seed, fl.make_budget(),
                               closed_prefix);
  } else if (which == "tinv") {
    pv = test_time_invariance(*f, gen, fl.trials, fl.seed, fl.make_budget());
  } else if (which == "sym") {
    pv = test_coord_symmetry(*f, gen, fl.trials, fl.seed, fl.make_budget());
  } else if (which == "rfsym") {
    pv = test_rf_symmetry(*f, gen, fl.trials, fl.seed, fl.make_budget());
  } else {
    stability_kind kind = [&] {
      if (stab_kind == "absolute") return stability_kind::absolute();
      if (stab_kind == "relative") return stability_kind::relative();
      if (f_path.empty())
        throw error("BadArgument", "--kind " + stab_kind + " needs --F");
      bool_fn F = load_boolfn(f_path);
      if (stab_kind == "relative-to") return stability_kind::relative_to(std::move(F));
      if (stab_kind == "di") return stability_kind::delay_insensitive_to(std::move(F));
      throw error("BadArgument", "unknown stability kind '" + stab_kind + "'");
    }();
    pv = test_stability(kind, *f, gen, fl.trials, fl.seed, fl.make_budget());
  }
  return report_prop(pv, fl);
}

int run_mode_verify(const flags& fl, const std::string& sys_path,
                    const std::string& kind_name, const std::string& f_path,
                    const std::string& u_path, const std::string& x_path,
                    const std::string& grid_text) {
  system_ptr f = load_system(sys_path);
  mode_kind kind = [&] {
    if (kind_name == "pseudo") return mode_kind::pseudo();
    if (kind_name == "fundamental") return mode_kind::fundamental();
    if (f_path.empty())
      throw error("BadArgument", "--kind " + kind_name + " needs --F");
    bool_fn F = load_boolfn(f_path);
    if (kind_name == "relative") return mode_kind::relative_to(std::move(F));
    if (kind_name == "di") return mode_kind::delay_insensitive_to(std::move(F));
    throw error("BadArgument", "unknown mode kind '" + kind_name + "'");
  }();
  mode_grid grid(parse_rat_list(grid_text));
  mode_report r = verify_mode(kind, *f, load_signal(u_path), load_signal(x_path),
                              grid, fl.make_budget());
  report rep;
  rep.add("overall", verdict_word(r.overall));
  rep.add("input_constant_before_start", verdict_word(r.input_constant_before_start));
  rep.add("input_steps_on_schedule", verdict_word(r.input_steps_on_schedule));
  rep.add("reference_steps_on_schedule", verdict_word(r.reference_steps_on_schedule));
  rep.add("frozen_prefix_membership", verdict_word(r.frozen_prefix_membership));
  rep.add("state_matches_reference", verdict_word(r.state_matches_reference));
  if (r.failing_index) rep.add("failing_index", std::to_string(*r.failing_index));
  if (!r.failing_check.empty()) rep.add("failing_check", r.failing_check);
  if (!r.overall.note.empty()) rep.add("note", r.overall.note);
  std::size_t k = 0;
  for (const auto& [uv, xv] : r.equilibria)
    rep.add("equilibrium" + std::to_string(k++), uv.str() + "/" + xv.str());
  emit_report(rep, fl);
  return verdict_exit(r.overall);
}

int run_mode_construct(const flags& fl, const std::string& sys_path,
                       const std::string& steps_text, const std::string& f_path,
                       const std::string& targets_text, const std::string& t0_text) {
  system_ptr f = load_system(sys_path);
  rat t0 = rat::parse(t0_text);
  mode_construction c = [&] {
    if (!targets_text.empty()) {
      if (f_path.empty())
        throw error("BadArgument", "--targets needs --F");
      return construct_mode_relative(*f, load_boolfn(f_path),
                                     parse_bits_list(targets_text), t0, fl.seed);
    }
    if (steps_text.empty())
      throw error("BadArgument", "construct needs --steps or --targets");
    return construct_mode(*f, parse_bits_list(steps_text), t0, fl.seed);
  }();
  report rep;
  rep.add("result", "yes");
  rep.add("u", emit_signal_inline(c.u));
  rep.add("x", emit_signal_inline(c.x));
  std::string gtext;
  for (std::size_t i = 0; i < c.grid.times().size(); ++i)
    gtext += (i ? "," : "") + c.grid.times()[i].str();
  rep.add("grid", gtext);
  rep.add("reference_tracked", c.reference_tracked ? "true" : "false");
  emit_report(rep, fl);
  if (!fl.out.empty()) {
    spit(fl.out + ".u.sig", emit_signal(c.u));
    spit(fl.out + ".x.sig", emit_signal(c.x));
  }
  return 0;
}

int run_gen_succ(const flags& fl, const std::string& phi_path,
                 const std::string& lambda, const std::string& mu) {
  gen_fn phi = load_genfn(phi_path);
  bitvec lam = bitvec::parse(lambda), m = bitvec::parse(mu);
  std::vector<bitvec> succ = successors(phi, lam, m);
  report rep;
  rep.add("stable", phi.is_stable(lam, m) ? "true" : "false");
  rep.add("excited", phi.excited(lam, m).str());
  rep.add("count", std::to_string(succ.size()));
  std::size_t k = 0;
  for (const bitvec& v : succ) rep.add("succ" + std::to_string(k++), v.str());
  return emit_report(rep, fl);
}

int run_gen_member(const flags& fl, const std::string& phi_path,
                   const std::string& u_path, const std::string& x_path,
                   const std::string& rule) {
  gen_fn phi = load_genfn(phi_path);
  first_transition ft = rule == "hold" ? first_transition::hold
                                       : first_transition::justified;
  bool ok = check_membership(phi, load_signal(u_path), load_signal(x_path), ft);
  report rep;
  rep.add("verdict", ok ? "yes" : "no");
  emit_report(rep, fl);
  return ok ? 0 : 1;
}

int run_gen_enumerate(const flags& fl, const std::string& phi_path,
                      const std::string& u_path, const std::string& x0,
                      std::uint32_t max_steps, bool no_fair) {
  gen_fn phi = load_genfn(phi_path);
  trajectory_set ts = enumerate_trajectories(phi, load_signal(u_path),
                                             bitvec::parse(x0), max_steps,
                                             !no_fair);
  if (fl.fmt() == report_format::csv) {
    std::size_t k = 0;
    for (const trajectory& tr : ts.items) {
      std::cout << "# run " << k++ << "\n" << trajectory_csv(tr);
    }
    return ts.exhaustive ? 0 : 2;
  }
  report rep;
  rep.add("count", std::to_string(ts.items.size()));
  rep.add("exhaustive", ts.exhaustive ? "true" : "false");
  std::size_t k = 0;
  for (const trajectory& tr : ts.items)
    rep.add("run" + std::to_string(k++), emit_signal_inline(tr.rendered()));
  emit_report(rep, fl);
  return ts.exhaustive ? 0 : 2;
}

int run_gen_settling(const flags& fl, const std::string& phi_path) {
  settling_report r = settling_check(load_genfn(phi_path));
  report rep;
  std::string word = r.result == settling_report::verdict::yes ? "yes"
                     : r.result == settling_report::verdict::no ? "no"
                                                                : "unknown";
  rep.add("verdict", word);
  if (r.witness_input) rep.add("witness_input", r.witness_input->str());
  if (!r.witness_states.empty()) {
    std::string s;
    for (std::size_t i = 0; i < r.witness_states.size(); ++i)
      s += (i ? "," : "") + r.witness_states[i].str();
    rep.add("witness_states", s);
  }
  emit_report(rep, fl);
  return r.result == settling_report::verdict::yes ? 0
         : r.result == settling_report::verdict::no ? 1
                                                    : 2;
}

int run_gen_gamma(const flags& fl, const std::string& phi_path,
                  const std::string& kind_name, std::uint32_t i, std::uint32_t j) {
  gen_fn phi = load_genfn(phi_path);
  gamma_kind kind = [&] {
    if (kind_name == "complement") return gamma_kind::complement;
    if (kind_name == "extend") return gamma_kind::extend;
    if (kind_name == "substitute") return gamma_kind::substitute;
    if (kind_name == "drop") return gamma_kind::drop;
    throw error("BadArgument", "unknown transform '" + kind_name + "'");
  }();
  gen_fn out = gamma_transform(phi, kind, i, j);
  report rep;
  rep.add("result", "yes");
  rep.add("phi", emit_genfn_inline(out));
  emit_report(rep, fl);
  if (!fl.out.empty()) spit(fl.out + ".tt", emit_genfn(out));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Checkers and enumerations for asynchronous systems"};
  app.require_subcommand(1);

  flags fl;
  if (const char* env = std::getenv("ASYNKIT_BUDGET")) {
    try {
      fl.budget = std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "error: ASYNKIT_BUDGET must be an integer\n";
      return 3;
    }
  }

  std::function<int()> action;

  std::string in_path, sys_path, other_path, u_path, x_path, phi_path, f_path;
  std::string t_text, d_text = "0", grid_text, steps_text, targets_text;
  std::string t0_text = "0", kind_name, rule = "justified", lambda, mu, x0;
  std::uint32_t max_steps = 3, arg_i = 0, arg_j = 0;
  bool closed_prefix = false, no_fair = false;

  // signal -------------------------------------------------------------
  CLI::App* sig = app.add_subcommand("signal", "pointwise signal operations");
  sig->require_subcommand(1);

  CLI::App* sig_eval = sig->add_subcommand("eval", "value and left limit at a time");
  add_common(sig_eval, fl);
  sig_eval->add_option("--in", in_path, "signal file")->required();
  sig_eval->add_option("--t", t_text, "query time")->required();
  sig_eval->callback([&] { action = [&] { return run_signal_eval(fl, in_path, t_text); }; });

  CLI::App* sig_tr = sig->add_subcommand("translate", "shift all switches by d");
  add_common(sig_tr, fl);
  sig_tr->add_option("--in", in_path, "signal file")->required();
  sig_tr->add_option("--d", d_text, "translation offset (rational)")->required();
  sig_tr->callback([&] { action = [&] { return run_signal_translate(fl, in_path, d_text); }; });

  CLI::App* sig_fr = sig->add_subcommand("freeze", "hold the value from a time on");
  add_common(sig_fr, fl);
  sig_fr->add_option("--in", in_path, "signal file")->required();
  sig_fr->add_option("--t", t_text, "freeze time")->required();
  sig_fr->callback([&] {
    action = [&] {
      return report_signal_artifact(load_signal(in_path).frozen(rat::parse(t_text)), fl);
    };
  });

  CLI::App* sig_co = sig->add_subcommand("complement", "flip every coordinate");
  add_common(sig_co, fl);
  sig_co->add_option("--in", in_path, "signal file")->required();
  sig_co->callback([&] {
    action = [&] { return report_signal_artifact(load_signal(in_path).complemented(), fl); };
  });

  // sys ----------------------------------------------------------------
  CLI::App* sys = app.add_subcommand("sys", "system queries");
  sys->require_subcommand(1);

  CLI::App* sys_c = sys->add_subcommand("contains", "is x a member of f(u)?");
  add_common(sys_c, fl);
  sys_c->add_option("--system", sys_path, "system file")->required();
  sys_c->add_option("--u", u_path, "input signal file")->required();
  sys_c->add_option("--x", x_path, "state signal file")->required();
  sys_c->callback([&] { action = [&] { return run_sys_contains(fl, sys_path, u_path, x_path); }; });

  CLI::App* sys_e = sys->add_subcommand("enumerate", "list members of f(u)");
  add_common(sys_e, fl);
  sys_e->add_option("--system", sys_path, "system file")->required();
  sys_e->add_option("--u", u_path, "input signal file")->required();
  sys_e->callback([&] { action = [&] { return run_sys_enumerate(fl, sys_path, u_path); }; });

  CLI::App* sys_i = sys->add_subcommand("initials", "initial values of members");
  add_common(sys_i, fl);
  sys_i->add_option("--system", sys_path, "system file")->required();
  sys_i->add_option("--u", u_path, "input signal file")->required();
  sys_i->callback([&] { action = [&] { return run_sys_initials(fl, sys_path, u_path); }; });

  CLI::App* sys_in = sys->add_subcommand("includes", "probe whether f covers g on random inputs");
  add_common(sys_in, fl);
  sys_in->add_option("--system", sys_path, "outer system file")->required();
  sys_in->add_option("--other", other_path, "candidate subsystem file")->required();
  sys_in->callback([&] { action = [&] { return run_sys_includes(fl, sys_path, other_path); }; });

  CLI::App* sys_cl = sys->add_subcommand("classify", "stability classification");
  add_common(sys_cl, fl);
  sys_cl->add_option("--system", sys_path, "system file")->required();
  sys_cl->add_option("--F", f_path, "reference truth table for relative kinds");
  sys_cl->callback([&] { action = [&] { return run_sys_classify(fl, sys_path, f_path); }; });

  // prop ---------------------------------------------------------------
  CLI::App* prop = app.add_subcommand("prop", "randomized property tests");
  prop->require_subcommand(1);
  const char* prop_names[] = {"na1", "na2", "tinv", "sym", "rfsym", "stab"};
  for (const char* name : prop_names) {
    CLI::App* p = prop->add_subcommand(name, std::string("property ") + name);
    add_common(p, fl);
    p->add_option("--system", sys_path, "system file")->required();
    if (std::string(name) == "na2")
      p->add_flag("--closed-prefix", closed_prefix, "compare prefixes closed at t1");
    if (std::string(name) == "stab") {
      p->add_option("--kind", kind_name, "absolute, relative, relative-to, di")->required();
      p->add_option("--F", f_path, "reference truth table");
    }
    std::string captured = name;
    p->callback([&, captured] {
      action = [&, captured] {
        return run_prop(fl, captured, sys_path, f_path, kind_name, closed_prefix);
      };
    });
  }

  // mode ---------------------------------------------------------------
  CLI::App* mode = app.add_subcommand("mode", "scheduled operation checks");
  mode->require_subcommand(1);

  CLI::App* mode_v = mode->add_subcommand("verify", "check a pair against a schedule");
  add_common(mode_v, fl);
  mode_v->add_option("--system", sys_path, "system file")->required();
  mode_v->add_option("--kind", kind_name, "pseudo, fundamental, relative, di")->required();
  mode_v->add_option("--F", f_path, "reference truth table");
  mode_v->add_option("--u", u_path, "input signal file")->required();
  mode_v->add_option("--x", x_path, "state signal file")->required();
  mode_v->add_option("--grid", grid_text, "comma-separated schedule times")->required();
  mode_v->callback([&] {
    action = [&] {
      return run_mode_verify(fl, sys_path, kind_name, f_path, u_path, x_path, grid_text);
    };
  });

  CLI::App* mode_c = mode->add_subcommand("construct", "build a schedule-faithful pair");
  add_common(mode_c, fl);
  mode_c->add_option("--system", sys_path, "system file (generated)")->required();
  mode_c->add_option("--steps", steps_text, "semicolon-separated input vectors");
  mode_c->add_option("--F", f_path, "reference truth table");
  mode_c->add_option("--targets", targets_text, "semicolon-separated target outputs");
  mode_c->add_option("--t0", t0_text, "first schedule time");
  mode_c->callback([&] {
    action = [&] {
      return run_mode_construct(fl, sys_path, steps_text, f_path, targets_text, t0_text);
    };
  });

  // gen ----------------------------------------------------------------
  CLI::App* gen = app.add_subcommand("gen", "generator-function operations");
  gen->require_subcommand(1);

  CLI::App* gen_s = gen->add_subcommand("succ", "one-step successors of a point");
  add_common(gen_s, fl);
  gen_s->add_option("--phi", phi_path, "generator table file")->required();
  gen_s->add_option("--lambda", lambda, "input bits")->required();
  gen_s->add_option("--mu", mu, "state bits")->required();
  gen_s->callback([&] { action = [&] { return run_gen_succ(fl, phi_path, lambda, mu); }; });

  CLI::App* gen_m = gen->add_subcommand("member", "does the pair follow the table?");
  add_common(gen_m, fl);
  gen_m->add_option("--phi", phi_path, "generator table file")->required();
  gen_m->add_option("--u", u_path, "input signal file")->required();
  gen_m->add_option("--x", x_path, "state signal file")->required();
  gen_m->add_option("--first-transition", rule, "justified or hold")
      ->check(CLI::IsMember({"justified", "hold"}));
  gen_m->callback([&] { action = [&] { return run_gen_member(fl, phi_path, u_path, x_path, rule); }; });

  CLI::App* gen_e = gen->add_subcommand("enumerate", "explore update interleavings");
  add_common(gen_e, fl);
  gen_e->add_option("--phi", phi_path, "generator table file")->required();
  gen_e->add_option("--u", u_path, "input signal file")->required();
  gen_e->add_option("--x0", x0, "initial state bits")->required();
  gen_e->add_option("--max-steps", max_steps, "internal steps between events");
  gen_e->add_flag("--no-fair", no_fair, "keep runs that were cut unstable");
  gen_e->callback([&] {
    action = [&] { return run_gen_enumerate(fl, phi_path, u_path, x0, max_steps, no_fair); };
  });

  CLI::App* gen_st = gen->add_subcommand("settling", "do all fair runs settle?");
  add_common(gen_st, fl);
  gen_st->add_option("--phi", phi_path, "generator table file")->required();
  gen_st->callback([&] { action = [&] { return run_gen_settling(fl, phi_path); }; });

  CLI::App* gen_g = gen->add_subcommand("gamma", "transform the generator table");
  add_common(gen_g, fl);
  gen_g->add_option("--phi", phi_path, "generator table file")->required();
  gen_g->add_option("--kind", kind_name, "complement, extend, substitute, drop")->required();
  gen_g->add_option("--i", arg_i, "first 1-based input index");
  gen_g->add_option("--j", arg_j, "second 1-based input index");
  gen_g->callback([&] {
    action = [&] { return run_gen_gamma(fl, phi_path, kind_name, arg_i, arg_j); };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 3;
  }

  try {
    return action ? action() : 3;
  } catch (const error& e) {
    if (e.code() == "NotSettling" || e.code() == "TargetNotInRange" ||
        e.code() == "DependentInput") {
      report rep;
      rep.add("result", "no");
      rep.add("error", e.code());
      std::cout << rep.render(fl.fmt() == report_format::csv
                                  ? report_format::text
                                  : fl.fmt());
      return 1;
    }
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
