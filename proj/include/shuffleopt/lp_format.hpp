// LP text format (CPLEX dialect subset) export and import for OptModel.
// Written files are whitespace-tokenized: every name, operator, and number
// is space-separated, which keeps the reader simple and unambiguous.
#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "shuffleopt/common.hpp"
#include "shuffleopt/optmodel.hpp"

namespace shuffleopt {

namespace detail {

// Full-precision doubles so models survive a write/read cycle unchanged.
inline std::string lp_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// LP names may not contain ':'; constraint tags get a row-id prefix so the
// original tag stays recoverable and names stay unique.
inline std::string lp_row_name(const LinearConstraint& c) {
  std::string name = "c" + std::to_string(c.id) + "_" + c.tag;
  for (char& ch : name)
    if (ch == ':') ch = '_';
  return name;
}

inline void lp_terms(std::ostream& os, const std::vector<LinearTerm>& terms,
                     const OptModel& m) {
  int on_line = 0;
  for (const auto& t : terms) {
    if (on_line == 8) {
      os << "\n   ";
      on_line = 0;
    }
    os << (t.coef < 0 ? " - " : " + ") << lp_num(std::fabs(t.coef)) << ' '
       << m.vars[static_cast<size_t>(t.var)].name;
    ++on_line;
  }
}

}  // namespace detail

inline std::string write_lp(const OptModel& m) {
  std::ostringstream os;
  os << "\\ " << (m.stage_tag.empty() ? "model" : m.stage_tag)
     << " topology_fp=" << hex64(m.topology_fp) << " demand_fp=" << hex64(m.demand_fp)
     << "\n";
  os << (m.sense == ObjSense::Maximize ? "Maximize" : "Minimize") << "\n obj :";
  detail::lp_terms(os, m.objective, m);
  os << "\nSubject To\n";
  for (const auto& c : m.rows) {
    os << ' ' << detail::lp_row_name(c) << " :";
    detail::lp_terms(os, c.terms, m);
    switch (c.sense) {
      case RowSense::LE: os << " <= "; break;
      case RowSense::GE: os << " >= "; break;
      case RowSense::EQ: os << " = "; break;
    }
    os << detail::lp_num(c.rhs) << "\n";
  }
  os << "Bounds\n";
  for (const auto& v : m.vars) {
    os << ' ';
    const bool lo = std::isfinite(v.lower), hi = std::isfinite(v.upper);
    if (!lo && !hi)
      os << v.name << " free";
    else if (v.lower == v.upper)
      os << v.name << " = " << detail::lp_num(v.lower);
    else if (lo && hi)
      os << detail::lp_num(v.lower) << " <= " << v.name << " <= " << detail::lp_num(v.upper);
    else if (lo)
      os << v.name << " >= " << detail::lp_num(v.lower);
    else
      os << v.name << " <= " << detail::lp_num(v.upper);
    os << "\n";
  }
  bool any_binary = false;
  for (const auto& v : m.vars)
    if (v.kind == VarKind::Binary) {
      if (!any_binary) os << "Binary\n";
      any_binary = true;
      os << ' ' << v.name << "\n";
    }
  os << "End\n";
  return os.str();
}

inline void save_lp(const OptModel& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << write_lp(m);
  if (!out) throw IoError("write failed: " + path);
}

// ---------------------------------------------------------------------------
// Reader
// ---------------------------------------------------------------------------

namespace detail {

struct LpTokens {
  std::vector<std::string> toks;
  size_t pos = 0;

  bool done() const { return pos >= toks.size(); }
  const std::string& peek(size_t ahead = 0) const {
    static const std::string empty;
    return pos + ahead >= toks.size() ? empty : toks[pos + ahead];
  }
  std::string next() {
    if (done()) throw ParseError("lp file: unexpected end of input");
    return toks[pos++];
  }
};

inline std::string lp_lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

inline LpTokens lp_tokenize(const std::string& text) {
  LpTokens t;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto cut = line.find('\\');
    if (cut != std::string::npos) line.erase(cut);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) t.toks.push_back(tok);
  }
  return t;
}

inline bool lp_is_number(const std::string& s, double* out) {
  if (s.empty()) return false;
  const std::string low = lp_lower(s);
  if (low == "inf" || low == "+inf" || low == "infinity" || low == "+infinity") {
    *out = kInf;
    return true;
  }
  if (low == "-inf" || low == "-infinity") {
    *out = -kInf;
    return true;
  }
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return false;
  *out = v;
  return true;
}

// If the next tokens start a section, consume them and report the section
// name; otherwise leave the stream untouched. End of input counts as "end".
inline bool lp_try_section(LpTokens& t, std::string* section) {
  if (t.done()) {
    *section = "end";
    return true;
  }
  const size_t save = t.pos;
  const std::string low = lp_lower(t.next());
  if (low == "maximize" || low == "maximise" || low == "max") {
    *section = "objective-max";
    return true;
  }
  if (low == "minimize" || low == "minimise" || low == "min") {
    *section = "objective-min";
    return true;
  }
  if (low == "subject" && lp_lower(t.peek()) == "to") {
    t.next();
    *section = "constraints";
    return true;
  }
  if (low == "st" || low == "s.t.") {
    *section = "constraints";
    return true;
  }
  if (low == "such" && lp_lower(t.peek()) == "that") {
    t.next();
    *section = "constraints";
    return true;
  }
  if (low == "bounds" || low == "bound") {
    *section = "bounds";
    return true;
  }
  if (low == "binary" || low == "binaries" || low == "bin") {
    *section = "binary";
    return true;
  }
  if (low == "general" || low == "generals" || low == "gen") {
    *section = "general";
    return true;
  }
  if (low == "end") {
    *section = "end";
    return true;
  }
  t.pos = save;
  return false;
}

}  // namespace detail

// Parse the subset emitted by write_lp (whitespace-separated tokens).
// Repeated terms on the same variable are folded; variables are created on
// first mention with LP-default bounds [0, +inf) until Bounds says otherwise.
inline OptModel parse_lp(const std::string& text) {
  detail::LpTokens t = detail::lp_tokenize(text);
  OptModel m;
  std::map<std::string, int> var_ids;
  auto var_of = [&](const std::string& name) {
    auto it = var_ids.find(name);
    if (it != var_ids.end()) return it->second;
    int id = m.add_var(name, 0.0, kInf);
    var_ids.emplace(name, id);
    return id;
  };

  // terms := { (+|-) [number] name }, ending at a relation token or a section
  // keyword (the keyword is consumed and reported via stopped_section).
  auto parse_terms = [&](std::vector<LinearTerm>* out, std::string* stopped_section,
                         std::string* sense_tok) {
    std::map<int, double> acc;
    double sign = 1.0;
    bool have_sign = false;
    while (true) {
      if (!have_sign) {
        if (detail::lp_try_section(t, stopped_section)) break;
        const std::string& ahead = t.peek();
        if (ahead == "<=" || ahead == ">=" || ahead == "=" || ahead == "<" || ahead == ">") {
          *sense_tok = t.next();
          break;
        }
      }
      std::string tok = t.next();
      if (tok == ":") throw ParseError("lp file: unexpected ':' inside expression");
      if (tok == "+") {
        sign = 1.0;
        have_sign = true;
        continue;
      }
      if (tok == "-") {
        sign = -1.0;
        have_sign = true;
        continue;
      }
      double num;
      if (detail::lp_is_number(tok, &num)) {
        // A coefficient must be followed by a variable name.
        const std::string& ahead = t.peek();
        double probe;
        const bool name_follows = !ahead.empty() && ahead != "+" && ahead != "-" &&
                                  ahead != "<=" && ahead != ">=" && ahead != "=" &&
                                  !detail::lp_is_number(ahead, &probe);
        if (!name_follows) {
          if (num != 0.0) throw ParseError("lp file: stray numeric constant in expression");
          sign = 1.0;
          have_sign = false;
          continue;
        }
        acc[var_of(t.next())] += sign * num;
      } else {
        acc[var_of(tok)] += sign;
      }
      sign = 1.0;
      have_sign = false;
    }
    for (const auto& [var, coef] : acc) out->push_back({var, coef});
  };

  std::string section;
  if (!detail::lp_try_section(t, &section))
    throw ParseError("lp file: expected objective sense, found '" + t.peek() + "'");

  while (section != "end") {
    if (section == "objective-max" || section == "objective-min") {
      m.sense = section == "objective-max" ? ObjSense::Maximize : ObjSense::Minimize;
      std::string label = t.next();
      if (t.peek() == ":") {
        t.next();
      } else if (!label.empty() && label.back() == ':') {
        // tolerate "obj:" written without a space
      } else {
        throw ParseError("lp file: expected ':' after objective label");
      }
      std::string sense_tok;
      parse_terms(&m.objective, &section, &sense_tok);
      if (!sense_tok.empty()) throw ParseError("lp file: relation inside objective");
      continue;
    }
    if (section == "constraints") {
      while (true) {
        if (detail::lp_try_section(t, &section)) break;
        std::string name = t.next();
        if (!name.empty() && name.back() == ':') {
          name.pop_back();
        } else {
          if (t.peek() != ":")
            throw ParseError("lp file: constraint '" + name + "' missing ':'");
          t.next();
        }
        std::vector<LinearTerm> terms;
        std::string stopped, sense_tok;
        parse_terms(&terms, &stopped, &sense_tok);
        if (sense_tok.empty())
          throw ParseError("lp file: constraint '" + name + "' has no relation");
        double rhs;
        if (!detail::lp_is_number(t.next(), &rhs))
          throw ParseError("lp file: constraint '" + name + "' right-hand side not numeric");
        RowSense sense = RowSense::EQ;
        if (sense_tok == "<=" || sense_tok == "<") sense = RowSense::LE;
        else if (sense_tok == ">=" || sense_tok == ">") sense = RowSense::GE;
        m.add_row(name, sense, rhs, std::move(terms));
      }
      continue;
    }
    if (section == "bounds") {
      while (true) {
        if (detail::lp_try_section(t, &section)) break;
        // Forms: "lb <= x <= ub" | "x <= ub" | "x >= lb" | "x = v" | "x free"
        std::string first = t.next();
        double num;
        if (detail::lp_is_number(first, &num)) {
          if (t.next() != "<=") throw ParseError("lp file: malformed bounds line");
          int v = var_of(t.next());
          if (t.next() != "<=") throw ParseError("lp file: malformed bounds line");
          double hi;
          if (!detail::lp_is_number(t.next(), &hi))
            throw ParseError("lp file: bounds upper value not numeric");
          m.vars[static_cast<size_t>(v)].lower = num;
          m.vars[static_cast<size_t>(v)].upper = hi;
          continue;
        }
        int v = var_of(first);
        std::string op = t.next();
        if (detail::lp_lower(op) == "free") {
          m.vars[static_cast<size_t>(v)].lower = -kInf;
          m.vars[static_cast<size_t>(v)].upper = kInf;
          continue;
        }
        double val;
        if (!detail::lp_is_number(t.next(), &val))
          throw ParseError("lp file: bounds value not numeric");
        if (op == "<=")
          m.vars[static_cast<size_t>(v)].upper = val;
        else if (op == ">=")
          m.vars[static_cast<size_t>(v)].lower = val;
        else if (op == "=")
          m.vars[static_cast<size_t>(v)].lower = m.vars[static_cast<size_t>(v)].upper = val;
        else
          throw ParseError("lp file: malformed bounds line near '" + op + "'");
      }
      continue;
    }
    if (section == "binary" || section == "general") {
      const bool binary = section == "binary";
      while (true) {
        if (detail::lp_try_section(t, &section)) break;
        int v = var_of(t.next());
        if (binary) {
          Variable& var = m.vars[static_cast<size_t>(v)];
          var.kind = VarKind::Binary;
          var.lower = std::max(0.0, var.lower);
          var.upper = std::min(1.0, var.upper);
        }
      }
      continue;
    }
    throw ParseError("lp file: unhandled section '" + section + "'");
  }
  return m;
}

inline OptModel load_lp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open lp file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_lp(ss.str());
}

}  // namespace shuffleopt
