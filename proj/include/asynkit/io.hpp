#pragma once

// Plain-text formats with located diagnostics and canonical emitters.
//   signal files:      "width W", "initial BITS", "at T -> BITS" lines and an
//                      optional "tail at S period P" block of "+O -> BITS".
//   truth tables:      "in M out N" then every input row in ascending order.
//   generator tables:  a truth table preceded by "# phi m=M n=N" fixing the
//                      input/state split of the 2^(m+n) rows.
//   system trees:      s-expressions whose leaves are file references or the
//                      equivalent inline forms (tt ...), (phi ...), (sig ...).
// Emitters always produce the inline, fully normalized form, so
// parse(emit(v)) reproduces v and emit(parse(text)) is canonical.

#include <cctype>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
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

/// Resolves a file reference found inside a system description to its text.
using file_loader = std::function<std::string(const std::string&)>;

namespace iodetail {

[[noreturn]] inline void fail(const std::string& name, std::size_t line_no,
                              const std::string& what) {
  throw error("ParseError",
              name + ":" + std::to_string(line_no) + ": " + what);
}

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline std::vector<std::string> words(const std::string& s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

/// Significant lines of a text: trimmed, with comments and blanks dropped,
/// each carrying its original 1-based line number.
inline std::vector<std::pair<std::size_t, std::string>> significant_lines(
    const std::string& text) {
  std::vector<std::pair<std::size_t, std::string>> out;
  std::size_t no = 0, i = 0;
  while (i <= text.size()) {
    std::size_t j = text.find('\n', i);
    std::string line =
        j == std::string::npos ? text.substr(i) : text.substr(i, j - i);
    ++no;
    std::string t = trim(line);
    if (!t.empty() && t[0] != '#') out.emplace_back(no, t);
    if (j == std::string::npos) break;
    i = j + 1;
  }
  return out;
}

/// The message of an error without its code prefix, for rewrapping.
inline std::string strip_code(const error& e) {
  std::string msg = e.what();
  std::string prefix = e.code() + ": ";
  if (msg.rfind(prefix, 0) == 0) msg = msg.substr(prefix.size());
  return msg;
}

inline std::uint64_t parse_count(const std::string& name, std::size_t line_no,
                                 const std::string& tok) {
  if (tok.empty()) fail(name, line_no, "expected a number");
  std::uint64_t v = 0;
  for (char c : tok) {
    if (c < '0' || c > '9')
      fail(name, line_no, "expected a nonnegative integer, got '" + tok + "'");
    v = v * 10 + static_cast<std::uint64_t>(c - '0');
  }
  return v;
}

inline rat parse_time(const std::string& name, std::size_t line_no,
                      const std::string& tok) {
  try {
    return rat::parse(tok);
  } catch (const error&) {
    fail(name, line_no, "expected a rational, got '" + tok + "'");
  }
}

inline bitvec parse_bits(const std::string& name, std::size_t line_no,
                         const std::string& tok, std::uint32_t want_width) {
  bitvec v = [&] {
    try {
      return bitvec::parse(tok);
    } catch (const error&) {
      fail(name, line_no, "expected a bit string, got '" + tok + "'");
    }
  }();
  if (want_width != 0 && v.width() != want_width)
    fail(name, line_no, "expected " + std::to_string(want_width) +
                            " bits, got '" + tok + "'");
  return v;
}

}  // namespace iodetail

// ---------------------------------------------------------------------------
// Signals

inline signal parse_signal_text(const std::string& text,
                                const std::string& name = "<signal>") {
  using namespace iodetail;
  auto ls = significant_lines(text);
  std::size_t i = 0;
  auto at_end = [&] { return i >= ls.size(); };
  auto line_no = [&] { return at_end() ? (ls.empty() ? 1 : ls.back().first) : ls[i].first; };

  if (at_end()) fail(name, 1, "empty signal file");
  auto w0 = words(ls[i].second);
  if (w0.size() != 2 || w0[0] != "width")
    fail(name, line_no(), "expected 'width W'");
  std::uint64_t w = parse_count(name, line_no(), w0[1]);
  if (w == 0 || w > 64) fail(name, line_no(), "width must be in [1, 64]");
  ++i;

  if (at_end()) fail(name, line_no(), "expected 'initial BITS'");
  auto w1 = words(ls[i].second);
  if (w1.size() != 2 || w1[0] != "initial")
    fail(name, line_no(), "expected 'initial BITS'");
  bitvec init = parse_bits(name, line_no(), w1[1], static_cast<std::uint32_t>(w));
  ++i;

  std::vector<sig_event> events;
  std::optional<rat> prev;
  while (!at_end()) {
    auto ws = words(ls[i].second);
    if (ws[0] != "at") break;
    if (ws.size() != 4 || ws[2] != "->")
      fail(name, line_no(), "expected 'at T -> BITS'");
    rat t = parse_time(name, line_no(), ws[1]);
    if (t < rat(0)) fail(name, line_no(), "switch times must be >= 0");
    if (prev && !(*prev < t))
      fail(name, line_no(), "switch times must increase strictly");
    prev = t;
    events.push_back({t, parse_bits(name, line_no(), ws[3],
                                    static_cast<std::uint32_t>(w))});
    ++i;
  }

  std::optional<sig_tail> tail;
  if (!at_end()) {
    auto ws = words(ls[i].second);
    if (!(ws.size() == 5 && ws[0] == "tail" && ws[1] == "at" && ws[3] == "period"))
      fail(name, line_no(), "expected 'at T -> BITS' or 'tail at S period P'");
    rat start = parse_time(name, line_no(), ws[2]);
    rat period = parse_time(name, line_no(), ws[4]);
    ++i;
    std::vector<sig_event> pattern;
    std::optional<rat> prev_off;
    while (!at_end()) {
      auto pw = words(ls[i].second);
      if (pw[0].empty() || pw[0][0] != '+') break;
      if (pw.size() != 3 || pw[1] != "->")
        fail(name, line_no(), "expected '+O -> BITS'");
      rat off = parse_time(name, line_no(), pw[0].substr(1));
      if (prev_off && !(*prev_off < off))
        fail(name, line_no(), "tail offsets must increase strictly");
      prev_off = off;
      pattern.push_back({off, parse_bits(name, line_no(), pw[2],
                                         static_cast<std::uint32_t>(w))});
      ++i;
    }
    if (pattern.empty()) fail(name, line_no(), "tail block needs '+O -> BITS' lines");
    tail = sig_tail{start, period, std::move(pattern)};
  }
  if (!at_end()) fail(name, line_no(), "unexpected line after the signal body");

  try {
    return signal(init, std::move(events), std::move(tail));
  } catch (const error& e) {
    throw error(e.code(), name + ": " + strip_code(e));
  }
}

inline std::string emit_signal(const signal& s) {
  std::string out = "width " + std::to_string(s.width()) + "\n";
  out += "initial " + s.initial().str() + "\n";
  for (const sig_event& e : s.events())
    out += "at " + e.t.str() + " -> " + e.v.str() + "\n";
  if (s.tail()) {
    out += "tail at " + s.tail()->start.str() + " period " +
           s.tail()->period.str() + "\n";
    for (const sig_event& e : s.tail()->pattern)
      out += "  +" + e.t.str() + " -> " + e.v.str() + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Truth tables and generator functions

inline bool_fn parse_boolfn_text(const std::string& text,
                                 const std::string& name = "<table>") {
  using namespace iodetail;
  auto ls = significant_lines(text);
  if (ls.empty()) fail(name, 1, "empty truth table file");
  auto hw = words(ls[0].second);
  if (hw.size() != 4 || hw[0] != "in" || hw[2] != "out")
    fail(name, ls[0].first, "expected 'in M out N'");
  std::uint64_t m = parse_count(name, ls[0].first, hw[1]);
  std::uint64_t n = parse_count(name, ls[0].first, hw[3]);
  if (m == 0 || m > bool_fn::max_arity || n == 0 || n > bool_fn::max_arity)
    fail(name, ls[0].first, "arities must be in [1, 16]");

  std::vector<bitvec> table;
  std::uint64_t rows = std::uint64_t{1} << m;
  for (std::uint64_t r = 0; r < rows; ++r) {
    std::string want = bitvec::from_index(static_cast<std::uint32_t>(m), r).str();
    if (1 + r >= ls.size())
      fail(name, ls.back().first, "missing row for input '" + want + "'");
    auto rw = words(ls[1 + r].second);
    if (rw.size() != 3 || rw[1] != "->")
      fail(name, ls[1 + r].first, "expected 'BITS -> BITS'");
    if (rw[0] != want)
      fail(name, ls[1 + r].first,
           "expected the row for input '" + want + "', got '" + rw[0] + "'");
    table.push_back(parse_bits(name, ls[1 + r].first, rw[2],
                               static_cast<std::uint32_t>(n)));
  }
  if (ls.size() > 1 + rows)
    fail(name, ls[1 + rows].first, "unexpected line after the last row");
  return bool_fn(static_cast<std::uint32_t>(m), static_cast<std::uint32_t>(n),
                 std::move(table));
}

inline std::string emit_boolfn(const bool_fn& f) {
  std::string out = "in " + std::to_string(f.arity_in()) + " out " +
                    std::to_string(f.arity_out()) + "\n";
  for (std::uint64_t r = 0; r < f.table().size(); ++r)
    out += bitvec::from_index(f.arity_in(), r).str() + " -> " +
           f.table()[r].str() + "\n";
  return out;
}

/// A generator table is a truth table whose input/state split is fixed by a
/// '# phi m=M n=N' comment line before the header.
inline gen_fn parse_genfn_text(const std::string& text,
                               const std::string& name = "<phi>") {
  using namespace iodetail;
  std::optional<std::uint64_t> m, n;
  std::size_t no = 0, i = 0;
  while (i <= text.size()) {
    std::size_t j = text.find('\n', i);
    std::string line = trim(j == std::string::npos ? text.substr(i)
                                                   : text.substr(i, j - i));
    ++no;
    if (!line.empty() && line[0] == '#') {
      auto ws = words(line.substr(1));
      if (ws.size() == 3 && ws[0] == "phi" && ws[1].rfind("m=", 0) == 0 &&
          ws[2].rfind("n=", 0) == 0) {
        m = parse_count(name, no, ws[1].substr(2));
        n = parse_count(name, no, ws[2].substr(2));
      }
    } else if (!line.empty()) {
      break;
    }
    if (j == std::string::npos) break;
    i = j + 1;
  }
  if (!m || !n)
    fail(name, 1, "generator tables need a '# phi m=M n=N' header line");
  bool_fn table = parse_boolfn_text(text, name);
  if (table.arity_in() != *m + *n || table.arity_out() != *n)
    fail(name, 1, "table arities disagree with the phi header");
  try {
    return gen_fn(static_cast<std::uint32_t>(*m),
                  static_cast<std::uint32_t>(*n), std::move(table));
  } catch (const error& e) {
    throw error(e.code(), name + ": " + strip_code(e));
  }
}

inline std::string emit_genfn(const gen_fn& phi) {
  return "# phi m=" + std::to_string(phi.inputs()) + " n=" +
         std::to_string(phi.states()) + "\n" + emit_boolfn(phi.fn());
}

// ---------------------------------------------------------------------------
// System descriptions

namespace iodetail {

struct sexp {
  bool is_atom = false;
  std::string atom;
  std::vector<sexp> items;
  std::size_t line = 1;
};

inline std::vector<std::pair<std::size_t, std::string>> sexp_tokens(
    const std::string& text, const std::string& name) {
  std::vector<std::pair<std::size_t, std::string>> out;
  std::size_t line = 1;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (c == '(' || c == ')') {
      out.emplace_back(line, std::string(1, c));
      ++i;
    } else {
      std::size_t j = i;
      while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) &&
             text[j] != '(' && text[j] != ')' && text[j] != '#')
        ++j;
      out.emplace_back(line, text.substr(i, j - i));
      i = j;
    }
  }
  if (out.empty()) fail(name, 1, "empty system description");
  return out;
}

inline sexp parse_sexp_at(const std::vector<std::pair<std::size_t, std::string>>& toks,
                          std::size_t& pos, const std::string& name) {
  if (pos >= toks.size())
    fail(name, toks.back().first, "unexpected end of input");
  auto [line, tok] = toks[pos];
  if (tok == ")") fail(name, line, "unexpected ')'");
  ++pos;
  sexp e;
  e.line = line;
  if (tok != "(") {
    e.is_atom = true;
    e.atom = tok;
    return e;
  }
  while (true) {
    if (pos >= toks.size()) fail(name, line, "missing ')'");
    if (toks[pos].second == ")") {
      ++pos;
      return e;
    }
    e.items.push_back(parse_sexp_at(toks, pos, name));
  }
}

inline sexp parse_sexp(const std::string& text, const std::string& name) {
  auto toks = sexp_tokens(text, name);
  std::size_t pos = 0;
  sexp e = parse_sexp_at(toks, pos, name);
  if (pos != toks.size())
    fail(name, toks[pos].first, "unexpected trailing content");
  return e;
}

inline const std::string& head_of(const sexp& e, const std::string& name) {
  if (e.is_atom || e.items.empty() || !e.items[0].is_atom)
    fail(name, e.line, "expected a parenthesized form with a head symbol");
  return e.items[0].atom;
}

inline void want_args(const sexp& e, const std::string& name, std::size_t lo,
                      std::size_t hi) {
  std::size_t got = e.items.size() - 1;
  if (got < lo || got > hi)
    fail(name, e.line, "'" + e.items[0].atom + "' takes " +
                           (lo == hi ? std::to_string(lo)
                                     : std::to_string(lo) + " to " +
                                           std::to_string(hi)) +
                           " arguments, got " + std::to_string(got));
}

inline std::uint64_t sexp_count(const sexp& e, const std::string& name) {
  if (!e.is_atom) fail(name, e.line, "expected a number");
  return parse_count(name, e.line, e.atom);
}

inline rat sexp_rat(const sexp& e, const std::string& name) {
  if (!e.is_atom) fail(name, e.line, "expected a rational");
  return parse_time(name, e.line, e.atom);
}

inline bitvec sexp_bits(const sexp& e, const std::string& name,
                        std::uint32_t want_width = 0) {
  if (!e.is_atom) fail(name, e.line, "expected a bit string");
  return parse_bits(name, e.line, e.atom, want_width);
}

inline std::string load_ref(const sexp& e, const std::string& name,
                            const file_loader& loader) {
  if (!loader)
    fail(name, e.line, "no loader for file reference '" + e.atom + "'");
  try {
    return loader(e.atom);
  } catch (const error&) {
    throw;
  } catch (const std::exception& ex) {
    fail(name, e.line, "cannot load '" + e.atom + "': " + ex.what());
  }
}

inline bool_fn sexp_boolfn(const sexp& e, const std::string& name,
                           const file_loader& loader) {
  if (e.is_atom) return parse_boolfn_text(load_ref(e, name, loader), e.atom);
  if (head_of(e, name) != "tt")
    fail(name, e.line, "expected a .tt reference or '(tt M N rows...)'");
  if (e.items.size() < 3) fail(name, e.line, "'tt' needs M N and the rows");
  std::uint64_t m = sexp_count(e.items[1], name);
  std::uint64_t n = sexp_count(e.items[2], name);
  if (m == 0 || m > bool_fn::max_arity || n == 0 || n > bool_fn::max_arity)
    fail(name, e.line, "arities must be in [1, 16]");
  std::uint64_t rows = std::uint64_t{1} << m;
  if (e.items.size() != 3 + rows)
    fail(name, e.line, "'tt' with " + std::to_string(m) + " inputs needs " +
                           std::to_string(rows) + " rows");
  std::vector<bitvec> table;
  for (std::uint64_t r = 0; r < rows; ++r)
    table.push_back(sexp_bits(e.items[3 + r], name,
                              static_cast<std::uint32_t>(n)));
  return bool_fn(static_cast<std::uint32_t>(m), static_cast<std::uint32_t>(n),
                 std::move(table));
}

inline gen_fn sexp_genfn(const sexp& e, const std::string& name,
                         const file_loader& loader) {
  if (e.is_atom) return parse_genfn_text(load_ref(e, name, loader), e.atom);
  if (head_of(e, name) != "phi")
    fail(name, e.line, "expected a .tt reference or '(phi M N rows...)'");
  if (e.items.size() < 3) fail(name, e.line, "'phi' needs M N and the rows");
  std::uint64_t m = sexp_count(e.items[1], name);
  std::uint64_t n = sexp_count(e.items[2], name);
  std::uint64_t rows = std::uint64_t{1} << (m + n);
  if (m + n > bool_fn::max_arity || n == 0 || m == 0)
    fail(name, e.line, "phi arities must be in [1, 16]");
  if (e.items.size() != 3 + rows)
    fail(name, e.line, "'phi' with m=" + std::to_string(m) +
                           " n=" + std::to_string(n) + " needs " +
                           std::to_string(rows) + " rows");
  std::vector<bitvec> table;
  for (std::uint64_t r = 0; r < rows; ++r)
    table.push_back(sexp_bits(e.items[3 + r], name,
                              static_cast<std::uint32_t>(n)));
  return gen_fn(static_cast<std::uint32_t>(m), static_cast<std::uint32_t>(n),
                bool_fn(static_cast<std::uint32_t>(m + n),
                        static_cast<std::uint32_t>(n), std::move(table)));
}

inline signal sexp_signal(const sexp& e, const std::string& name,
                          const file_loader& loader) {
  if (e.is_atom) return parse_signal_text(load_ref(e, name, loader), e.atom);
  if (head_of(e, name) != "sig")
    fail(name, e.line, "expected a .sig reference or '(sig W INIT items...)'");
  if (e.items.size() < 3) fail(name, e.line, "'sig' needs a width and initial bits");
  std::uint64_t w = sexp_count(e.items[1], name);
  if (w == 0 || w > 64) fail(name, e.line, "width must be in [1, 64]");
  bitvec init = sexp_bits(e.items[2], name, static_cast<std::uint32_t>(w));
  std::vector<sig_event> events;
  std::optional<sig_tail> tail;
  for (std::size_t i = 3; i < e.items.size(); ++i) {
    const sexp& it = e.items[i];
    const std::string& h = head_of(it, name);
    if (h == "at") {
      if (tail) fail(name, it.line, "'at' items must come before the tail");
      want_args(it, name, 2, 2);
      events.push_back({sexp_rat(it.items[1], name),
                        sexp_bits(it.items[2], name,
                                  static_cast<std::uint32_t>(w))});
    } else if (h == "tail") {
      if (tail) fail(name, it.line, "only one tail is allowed");
      if (it.items.size() < 4)
        fail(name, it.line, "'tail' needs a start, a period, and offsets");
      rat start = sexp_rat(it.items[1], name);
      rat period = sexp_rat(it.items[2], name);
      std::vector<sig_event> pattern;
      for (std::size_t k = 3; k < it.items.size(); ++k) {
        const sexp& pe = it.items[k];
        if (pe.is_atom || pe.items.size() != 2 || !pe.items[0].is_atom ||
            pe.items[0].atom.empty() || pe.items[0].atom[0] != '+')
          fail(name, pe.line, "expected '(+O BITS)'");
        pattern.push_back({parse_time(name, pe.line, pe.items[0].atom.substr(1)),
                           sexp_bits(pe.items[1], name,
                                     static_cast<std::uint32_t>(w))});
      }
      tail = sig_tail{start, period, std::move(pattern)};
    } else {
      fail(name, it.line, "expected '(at T BITS)' or '(tail S P (+O BITS)...)'");
    }
  }
  try {
    return signal(init, std::move(events), std::move(tail));
  } catch (const error& err) {
    throw error(err.code(), name + ":" + std::to_string(e.line) + ": " +
                                strip_code(err));
  }
}

inline system_ptr build_system(const sexp& e, const std::string& name,
                               const file_loader& loader);

inline initial_spec sexp_initials(const sexp& parent, std::size_t first,
                                  const std::string& name,
                                  const file_loader& loader, std::uint32_t m,
                                  std::uint32_t n) {
  (void)loader;
  initial_spec init;
  for (std::size_t i = first; i < parent.items.size(); ++i) {
    const sexp& it = parent.items[i];
    const std::string& h = head_of(it, name);
    if (h == "init") {
      if (i != first || parent.items.size() != first + 1)
        fail(name, it.line, "'init' must be the only initial-state form");
      want_args(it, name, 1, std::size_t(-1));
      for (std::size_t k = 1; k < it.items.size(); ++k)
        init.constant.push_back(sexp_bits(it.items[k], name, n));
    } else if (h == "init-for") {
      if (it.items.size() < 3)
        fail(name, it.line, "'init-for' needs an input vector and states");
      bitvec u0 = sexp_bits(it.items[1], name, m);
      std::vector<bitvec>& slot = init.by_input[u0];
      for (std::size_t k = 2; k < it.items.size(); ++k)
        slot.push_back(sexp_bits(it.items[k], name, n));
    } else {
      fail(name, it.line, "expected '(init ...)' or '(init-for ...)'");
    }
  }
  if (init.constant.empty() && init.by_input.empty())
    fail(name, parent.line, "'generated' needs initial states");
  return init;
}

inline system_ptr build_delay_model(const sexp& e, const std::string& name,
                                    const file_loader& loader) {
  if (e.items.size() < 2 || !e.items[1].is_atom)
    fail(name, e.line, "'delay-model' needs a kind symbol");
  const std::string& kind = e.items[1].atom;
  auto count = [&](std::size_t idx) { return sexp_count(e.items[idx], name); };
  auto time = [&](std::size_t idx) { return sexp_rat(e.items[idx], name); };
  auto nargs = [&](std::size_t k) {
    if (e.items.size() != 2 + k)
      fail(name, e.line, "'" + kind + "' takes " + std::to_string(k) +
                             " arguments, got " +
                             std::to_string(e.items.size() - 2));
  };
  if (kind == "eventually-fn") {
    nargs(1);
    return system::eventually_fn(sexp_boolfn(e.items[2], name, loader));
  }
  if (kind == "tracks-from0") {
    nargs(1);
    return system::tracks_from0(sexp_boolfn(e.items[2], name, loader));
  }
  if (kind == "rise-gated-and") {
    nargs(2);
    return system::rise_gated_and(static_cast<std::uint32_t>(count(2)), time(3));
  }
  if (kind == "inertial-runs") {
    nargs(3);
    return system::inertial_runs(static_cast<std::uint32_t>(count(2)), time(3),
                                 time(4));
  }
  if (kind == "rise-after-settled-and") {
    nargs(2);
    return system::rise_after_settled_and(static_cast<std::uint32_t>(count(2)),
                                          time(3));
  }
  if (kind == "band-inequality") {
    nargs(2);
    return system::band_inequality(time(2), time(3));
  }
  if (kind == "zero-if-and-settles") {
    nargs(1);
    return system::zero_if_and_settles(static_cast<std::uint32_t>(count(2)));
  }
  if (kind == "zero-if-input-settles") {
    nargs(1);
    return system::zero_if_input_settles(static_cast<std::uint32_t>(count(2)));
  }
  if (kind == "one-on-unit-step") {
    nargs(0);
    return system::one_on_unit_step();
  }
  fail(name, e.items[1].line, "unknown delay model '" + kind + "'");
}

inline system_ptr build_system(const sexp& e, const std::string& name,
                               const file_loader& loader) {
  const std::string& h = head_of(e, name);
  auto sub = [&](std::size_t i) { return build_system(e.items[i], name, loader); };
  if (h == "ideal-delay") {
    want_args(e, name, 1, 2);
    if (e.items.size() == 2) return system::ideal_delay(1, sexp_rat(e.items[1], name));
    return system::ideal_delay(
        static_cast<std::uint32_t>(sexp_count(e.items[1], name)),
        sexp_rat(e.items[2], name));
  }
  if (h == "pointwise") {
    want_args(e, name, 1, 1);
    return system::pointwise(sexp_boolfn(e.items[1], name, loader));
  }
  if (h == "limsup-and") {
    want_args(e, name, 1, 1);
    return system::limsup_and(static_cast<std::uint32_t>(sexp_count(e.items[1], name)));
  }
  if (h == "autonomous") {
    if (e.items.size() < 2) fail(name, e.line, "'autonomous' needs members");
    std::size_t first = 1;
    std::uint32_t m = 1;
    if (e.items[1].is_atom && !e.items[1].atom.empty() &&
        std::isdigit(static_cast<unsigned char>(e.items[1].atom[0])) &&
        e.items[1].atom.find_first_not_of("0123456789") == std::string::npos) {
      m = static_cast<std::uint32_t>(sexp_count(e.items[1], name));
      first = 2;
    }
    std::vector<signal> members;
    for (std::size_t i = first; i < e.items.size(); ++i)
      members.push_back(sexp_signal(e.items[i], name, loader));
    if (members.empty()) fail(name, e.line, "'autonomous' needs members");
    return system::autonomous(m, std::move(members));
  }
  if (h == "delay-model") return build_delay_model(e, name, loader);
  if (h == "generated") {
    if (e.items.size() < 3)
      fail(name, e.line, "'generated' needs a table and initial states");
    gen_fn phi = sexp_genfn(e.items[1], name, loader);
    std::uint32_t m = phi.inputs(), n = phi.states();
    return system::generated(std::move(phi),
                             sexp_initials(e, 2, name, loader, m, n));
  }
  if (h == "complement") {
    want_args(e, name, 1, 1);
    return system::complement(sub(1));
  }
  if (h == "extend") {
    want_args(e, name, 1, 1);
    return system::extend(sub(1));
  }
  if (h == "substitute") {
    want_args(e, name, 3, 3);
    return system::substitute(
        sub(1), static_cast<std::uint32_t>(sexp_count(e.items[2], name)),
        static_cast<std::uint32_t>(sexp_count(e.items[3], name)));
  }
  if (h == "drop") {
    want_args(e, name, 2, 2);
    return system::drop_input(sub(1), static_cast<std::uint32_t>(
                                          sexp_count(e.items[2], name)));
  }
  if (h == "intersect") {
    want_args(e, name, 2, 2);
    return system::intersect(sub(1), sub(2));
  }
  if (h == "union") {
    want_args(e, name, 2, 2);
    return system::unite(sub(1), sub(2));
  }
  if (h == "parallel") {
    want_args(e, name, 1, std::size_t(-1));
    std::vector<system_ptr> parts;
    for (std::size_t i = 1; i < e.items.size(); ++i) parts.push_back(sub(i));
    return system::parallel(std::move(parts));
  }
  if (h == "serial") {
    want_args(e, name, 2, 2);
    const sexp& pl = e.items[2];
    if (pl.is_atom || pl.items.empty())
      fail(name, pl.line, "'serial' needs a parenthesized list of parts");
    std::vector<system_ptr> parts;
    for (const sexp& p : pl.items)
      parts.push_back(build_system(p, name, loader));
    return system::serial(sub(1), std::move(parts));
  }
  fail(name, e.line, "unknown system form '" + h + "'");
}

}  // namespace iodetail

inline system_ptr parse_system_text(const std::string& text,
                                    const std::string& name = "<system>",
                                    const file_loader& loader = {}) {
  iodetail::sexp e = iodetail::parse_sexp(text, name);
  return iodetail::build_system(e, name, loader);
}

/// Single-line inline form of a signal, as accepted inside system trees.
inline std::string emit_signal_inline(const signal& s) {
  std::string out = "(sig " + std::to_string(s.width()) + " " + s.initial().str();
  for (const sig_event& e : s.events())
    out += " (at " + e.t.str() + " " + e.v.str() + ")";
  if (s.tail()) {
    out += " (tail " + s.tail()->start.str() + " " + s.tail()->period.str();
    for (const sig_event& e : s.tail()->pattern)
      out += " (+" + e.t.str() + " " + e.v.str() + ")";
    out += ")";
  }
  return out + ")";
}

inline std::string emit_boolfn_inline(const bool_fn& f) {
  std::string out = "(tt " + std::to_string(f.arity_in()) + " " +
                    std::to_string(f.arity_out());
  for (const bitvec& row : f.table()) out += " " + row.str();
  return out + ")";
}

inline std::string emit_genfn_inline(const gen_fn& phi) {
  std::string out = "(phi " + std::to_string(phi.inputs()) + " " +
                    std::to_string(phi.states());
  for (const bitvec& row : phi.fn().table()) out += " " + row.str();
  return out + ")";
}

inline std::string emit_system(const system& f) {
  const system_node& nd = f.node();
  if (auto* p = std::get_if<nd_ideal_delay>(&nd))
    return "(ideal-delay " + std::to_string(p->width) + " " + p->d.str() + ")";
  if (auto* p = std::get_if<nd_pointwise>(&nd))
    return "(pointwise " + emit_boolfn_inline(p->F) + ")";
  if (auto* p = std::get_if<nd_limsup_and>(&nd))
    return "(limsup-and " + std::to_string(p->m) + ")";
  if (auto* p = std::get_if<nd_autonomous>(&nd)) {
    std::string out = "(autonomous " + std::to_string(p->m);
    for (const signal& s : p->members) out += " " + emit_signal_inline(s);
    return out + ")";
  }
  if (auto* p = std::get_if<nd_delay_model>(&nd)) {
    switch (p->kind) {
      case delay_kind::eventually_fn:
        return "(delay-model eventually-fn " + emit_boolfn_inline(*p->F) + ")";
      case delay_kind::tracks_from0:
        return "(delay-model tracks-from0 " + emit_boolfn_inline(*p->F) + ")";
      case delay_kind::rise_gated_and:
        return "(delay-model rise-gated-and " + std::to_string(p->m) + " " +
               p->d1.str() + ")";
      case delay_kind::inertial_runs:
        return "(delay-model inertial-runs " + std::to_string(p->m) + " " +
               p->d1.str() + " " + p->d2.str() + ")";
      case delay_kind::rise_after_settled_and:
        return "(delay-model rise-after-settled-and " + std::to_string(p->m) +
               " " + p->d1.str() + ")";
      case delay_kind::band_inequality:
        return "(delay-model band-inequality " + p->d1.str() + " " +
               p->d2.str() + ")";
      case delay_kind::zero_if_and_settles:
        return "(delay-model zero-if-and-settles " + std::to_string(p->m) + ")";
      case delay_kind::zero_if_input_settles:
        return "(delay-model zero-if-input-settles " + std::to_string(p->m) +
               ")";
      case delay_kind::one_on_unit_step:
        return "(delay-model one-on-unit-step)";
    }
  }
  if (auto* p = std::get_if<nd_generated>(&nd)) {
    std::string out = "(generated " + emit_genfn_inline(p->phi);
    if (p->init.input_free()) {
      out += " (init";
      for (const bitvec& v : p->init.constant) out += " " + v.str();
      out += ")";
    } else {
      for (const auto& [u0, states] : p->init.by_input) {
        out += " (init-for " + u0.str();
        for (const bitvec& v : states) out += " " + v.str();
        out += ")";
      }
    }
    return out + ")";
  }
  if (auto* p = std::get_if<nd_complement>(&nd))
    return "(complement " + emit_system(*p->f) + ")";
  if (auto* p = std::get_if<nd_extend>(&nd))
    return "(extend " + emit_system(*p->f) + ")";
  if (auto* p = std::get_if<nd_substitute>(&nd))
    return "(substitute " + emit_system(*p->f) + " " + std::to_string(p->i) +
           " " + std::to_string(p->j) + ")";
  if (auto* p = std::get_if<nd_drop>(&nd))
    return "(drop " + emit_system(*p->f) + " " + std::to_string(p->i) + ")";
  if (auto* p = std::get_if<nd_intersect>(&nd))
    return "(intersect " + emit_system(*p->f) + " " + emit_system(*p->g) + ")";
  if (auto* p = std::get_if<nd_union>(&nd))
    return "(union " + emit_system(*p->f) + " " + emit_system(*p->g) + ")";
  if (auto* p = std::get_if<nd_parallel>(&nd)) {
    std::string out = "(parallel";
    for (const system_ptr& part : p->parts) out += " " + emit_system(*part);
    return out + ")";
  }
  if (auto* p = std::get_if<nd_serial>(&nd)) {
    std::string out = "(serial " + emit_system(*p->outer) + " (";
    for (std::size_t i = 0; i < p->parts.size(); ++i)
      out += (i ? " " : "") + emit_system(*p->parts[i]);
    return out + "))";
  }
  throw error("BadArgument", "unknown system node");
}

// ---------------------------------------------------------------------------
// Reports

enum class report_format : std::uint8_t { text, machine, csv };

inline report_format parse_report_format(const std::string& s) {
  if (s == "text") return report_format::text;
  if (s == "machine") return report_format::machine;
  if (s == "csv") return report_format::csv;
  throw error("BadArgument", "unknown format '" + s + "'");
}

/// Ordered key/value report. The machine rendering is one 'key=value' line
/// per field in insertion order, so identical runs diff byte-identically; the
/// text rendering uses 'key: value'.
struct report {
  std::vector<std::pair<std::string, std::string>> fields;

  void add(std::string key, std::string value) {
    fields.emplace_back(std::move(key), std::move(value));
  }

  std::string render(report_format fmt) const {
    std::string out;
    for (const auto& [k, v] : fields)
      out += k + (fmt == report_format::text ? ": " : "=") + v + "\n";
    return out;
  }
};

inline std::string trajectory_csv(const trajectory& tr) {
  std::string out = "t,bits,mask\n";
  out += "-0," + tr.x0.str() + "," + std::string(tr.x0.width(), '0') + "\n";
  for (std::size_t k = 0; k < tr.times.size(); ++k)
    out += tr.times[k].str() + "," + tr.states[k].str() + "," +
           tr.masks[k].str() + "\n";
  return out;
}

}  // namespace asynkit
