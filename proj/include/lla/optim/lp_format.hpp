#pragma once

// Reading and writing the common human-readable LP file format (objective,
// Subject To, Bounds, Binaries, End). Strict rows are written with the
// epsilon already folded into the right-hand side.

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lla/optim/problem.hpp"

namespace lla::optim {

class LpFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string lp_number(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline bool lp_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '#' ||
         c == '(' || c == ')' || c == '{' || c == '}' || c == '~' || c == '@' || c == '$' ||
         c == '!' || c == '%' || c == '&' || c == '|' || c == '?' || c == '\'' || c == ',';
}

inline std::string lp_sanitize(const std::string& name, const char* fallback_prefix, int idx) {
  std::string out;
  for (char c : name) out += lp_name_char(c) ? c : '_';
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0])) || out[0] == '.' ||
      out[0] == 'e' || out[0] == 'E') {
    out = std::string(fallback_prefix) + std::to_string(idx) + (out.empty() ? "" : "_" + out);
  }
  return out;
}

inline void write_terms(std::ostringstream& os, const std::vector<Term>& terms,
                        const std::vector<std::string>& names) {
  if (terms.empty()) {
    os << " 0 " << names.front();
    return;
  }
  bool first = true;
  for (const auto& t : terms) {
    const double c = t.coef;
    if (first) {
      os << ' ' << (c < 0 ? "- " : "") << lp_number(std::abs(c)) << ' ' << names[t.var];
    } else {
      os << (c < 0 ? " - " : " + ") << lp_number(std::abs(c)) << ' ' << names[t.var];
    }
    first = false;
  }
}

}  // namespace detail

inline std::string export_lp(const OptProblem& p) {
  std::vector<std::string> names;
  std::map<std::string, int> seen;
  for (int j = 0; j < p.num_vars(); ++j) {
    std::string n = detail::lp_sanitize(p.variable(j).name, "v", j);
    if (seen.count(n)) n += "_" + std::to_string(j);
    seen[n] = j;
    names.push_back(n);
  }
  if (names.empty()) names.push_back("v0");

  std::ostringstream os;
  os << "\\ exported by lla: " << p.num_vars() << " variables, " << p.num_rows() << " rows\n";
  os << (p.sense == Sense::kMaximize ? "Maximize\n" : "Minimize\n");
  os << " obj:";
  std::vector<Term> obj;
  for (int j = 0; j < p.num_vars(); ++j) {
    if (p.variable(j).objective != 0.0) obj.push_back({j, p.variable(j).objective});
  }
  detail::write_terms(os, obj, names);
  os << "\nSubject To\n";
  int idx = 0;
  for (const auto& r : p.constraints()) {
    os << ' ' << detail::lp_sanitize(r.name, "c", idx) << "_" << idx << ':';
    detail::write_terms(os, r.terms, names);
    switch (r.relation) {
      case Relation::kLessEqual: os << " <= "; break;
      case Relation::kGreaterEqual: os << " >= "; break;
      case Relation::kEqual: os << " = "; break;
    }
    os << detail::lp_number(r.effective_rhs(p.eps_strict));
    if (r.strict) os << "  \\ strict";
    os << '\n';
    ++idx;
  }
  os << "Bounds\n";
  std::vector<std::string> bins;
  for (int j = 0; j < p.num_vars(); ++j) {
    const auto& v = p.variable(j);
    if (v.kind == VarKind::kBinary) {
      bins.push_back(names[j]);
      continue;
    }
    if (v.lower == 0.0 && v.upper == kInf) continue;
    if (v.lower == -kInf && v.upper == kInf) {
      os << ' ' << names[j] << " free\n";
    } else if (v.lower == v.upper) {
      os << ' ' << names[j] << " = " << detail::lp_number(v.lower) << '\n';
    } else {
      os << ' ' << detail::lp_number(v.lower) << " <= " << names[j] << " <= "
         << detail::lp_number(v.upper) << '\n';
    }
  }
  if (!bins.empty()) {
    os << "Binaries\n";
    for (const auto& b : bins) os << ' ' << b << '\n';
  }
  os << "End\n";
  return os.str();
}

namespace detail {

struct LpToken {
  std::string text;
  int line;
};

inline std::vector<LpToken> lp_tokenize(const std::string& text) {
  std::vector<LpToken> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto c = line.find('\\'); c != std::string::npos) line.resize(c);
    std::size_t i = 0;
    while (i < line.size()) {
      const char c = line[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
      } else if (c == '<' || c == '>' || c == '=') {
        std::string op(1, c);
        if (i + 1 < line.size() && line[i + 1] == '=') {
          op += '=';
          ++i;
        }
        if (op == "=<") op = "<=";
        if (op == "=>") op = ">=";
        if (op == "<") op = "<=";
        if (op == ">") op = ">=";
        out.push_back({op, lineno});
        ++i;
      } else if (c == '+' || c == '-' || c == ':') {
        out.push_back({std::string(1, c), lineno});
        ++i;
      } else {
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])) &&
               line[j] != '<' && line[j] != '>' && line[j] != '=' && line[j] != ':' &&
               !((line[j] == '+' || line[j] == '-') && j > i &&
                 line[j - 1] != 'e' && line[j - 1] != 'E')) {
          ++j;
        }
        out.push_back({line.substr(i, j - i), lineno});
        i = j;
      }
    }
    out.push_back({"\n", lineno});
  }
  return out;
}

inline bool lp_parse_number(const std::string& s, double& v) {
  std::string lower;
  for (char c : s) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "inf" || lower == "infinity") {
    v = kInf;
    return true;
  }
  char* end = nullptr;
  v = std::strtod(s.c_str(), &end);
  return end && *end == '\0' && !s.empty();
}

inline std::string lp_lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace detail

inline OptProblem parse_lp(const std::string& text) {
  using detail::LpToken;
  const auto toks = detail::lp_tokenize(text);
  OptProblem p;
  std::map<std::string, int> var_index;
  auto var = [&](const std::string& name) {
    auto it = var_index.find(name);
    if (it != var_index.end()) return it->second;
    const int j = p.add_variable(name, 0.0, kInf);
    var_index[name] = j;
    return j;
  };
  auto fail = [](int line, const std::string& msg) -> void {
    throw LpFormatError("line " + std::to_string(line) + ": " + msg);
  };

  enum class Sec { kNone, kObjective, kRows, kBounds, kBinaries, kEnd };
  Sec sec = Sec::kNone;
  std::size_t i = 0;
  auto section_header = [&](std::size_t& k) -> bool {
    const std::string w = detail::lp_lower(toks[k].text);
    if (w == "maximize" || w == "maximum" || w == "max" || w == "maximise") {
      p.sense = Sense::kMaximize;
      sec = Sec::kObjective;
      ++k;
      return true;
    }
    if (w == "minimize" || w == "minimum" || w == "min" || w == "minimise") {
      p.sense = Sense::kMinimize;
      sec = Sec::kObjective;
      ++k;
      return true;
    }
    if (w == "subject" && k + 1 < toks.size() && detail::lp_lower(toks[k + 1].text) == "to") {
      sec = Sec::kRows;
      k += 2;
      return true;
    }
    if (w == "st" || w == "s.t." || w == "such") {
      sec = Sec::kRows;
      k += (w == "such") ? 2 : 1;
      return true;
    }
    if (w == "bounds" || w == "bound") {
      sec = Sec::kBounds;
      ++k;
      return true;
    }
    if (w == "binaries" || w == "binary" || w == "bin") {
      sec = Sec::kBinaries;
      ++k;
      return true;
    }
    if (w == "generals" || w == "general" || w == "gen" || w == "integers") {
      fail(toks[k].line, "general integer variables are not supported");
    }
    if (w == "end") {
      sec = Sec::kEnd;
      ++k;
      return true;
    }
    return false;
  };

  // Parses `[name:] terms` up to a relation or a section header.
  auto parse_terms = [&](std::size_t& k, std::vector<Term>& terms, std::string& label) {
    if (k + 1 < toks.size() && toks[k + 1].text == ":") {
      label = toks[k].text;
      k += 2;
    }
    double sign = 1.0;
    double coef = 1.0;
    bool have_coef = false;
    while (k < toks.size()) {
      const auto& t = toks[k];
      if (t.text == "\n") {
        ++k;
        continue;
      }
      if (t.text == "<=" || t.text == ">=" || t.text == "=") return;
      std::size_t probe = k;
      if (!have_coef && sign == 1.0 && section_header(probe)) return;
      if (t.text == "+") {
        ++k;
        continue;
      }
      if (t.text == "-") {
        sign = -sign;
        ++k;
        continue;
      }
      double v;
      if (detail::lp_parse_number(t.text, v)) {
        coef = v;
        have_coef = true;
        ++k;
        continue;
      }
      terms.push_back({var(t.text), sign * coef});
      sign = 1.0;
      coef = 1.0;
      have_coef = false;
      ++k;
      // A new line without an operator after a complete term may start the next row.
      if (k < toks.size() && toks[k].text == "\n") {
        std::size_t look = k;
        while (look < toks.size() && toks[look].text == "\n") ++look;
        if (look < toks.size() && look + 1 < toks.size() && toks[look + 1].text == ":") {
          k = look;
          return;
        }
      }
    }
  };

  int row_count = 0;
  bool saw_sense = false;
  while (i < toks.size() && sec != Sec::kEnd) {
    if (toks[i].text == "\n") {
      ++i;
      continue;
    }
    if (section_header(i)) {
      if (sec != Sec::kObjective && sec != Sec::kNone && !saw_sense) {
        fail(toks[i - 1].line, "expected Maximize or Minimize first");
      }
      saw_sense = saw_sense || sec == Sec::kObjective;
      continue;
    }
    switch (sec) {
      case Sec::kNone: fail(toks[i].line, "expected Maximize or Minimize"); break;
      case Sec::kObjective: {
        std::vector<Term> terms;
        std::string label;
        parse_terms(i, terms, label);
        for (const auto& t : terms) p.variable(t.var).objective += t.coef;
        break;
      }
      case Sec::kRows: {
        std::vector<Term> terms;
        std::string label;
        const int line = toks[i].line;
        parse_terms(i, terms, label);
        if (i >= toks.size()) fail(line, "row without relation");
        const std::string rel = toks[i].text;
        if (rel != "<=" && rel != ">=" && rel != "=") fail(toks[i].line, "expected relation");
        ++i;
        double sign = 1.0;
        if (i < toks.size() && toks[i].text == "-") {
          sign = -1.0;
          ++i;
        } else if (i < toks.size() && toks[i].text == "+") {
          ++i;
        }
        double rhs;
        if (i >= toks.size() || !detail::lp_parse_number(toks[i].text, rhs)) {
          fail(line, "expected numeric right-hand side");
        }
        ++i;
        const Relation r = rel == "<=" ? Relation::kLessEqual
                           : rel == ">=" ? Relation::kGreaterEqual
                                         : Relation::kEqual;
        if (label.empty()) label = "r" + std::to_string(row_count);
        p.add_constraint(label, std::move(terms), r, sign * rhs);
        ++row_count;
        break;
      }
      case Sec::kBounds: {
        // Collect one line of tokens.
        std::vector<LpToken> line;
        const int lineno = toks[i].line;
        while (i < toks.size() && toks[i].text != "\n") line.push_back(toks[i++]);
        // Merge unary minus into numbers.
        std::vector<std::string> w;
        for (std::size_t k = 0; k < line.size(); ++k) {
          if (line[k].text == "-" && k + 1 < line.size()) {
            w.push_back("-" + line[k + 1].text);
            ++k;
          } else if (line[k].text == "+" && k + 1 < line.size()) {
            w.push_back(line[k + 1].text);
            ++k;
          } else {
            w.push_back(line[k].text);
          }
        }
        double a, b;
        if (w.size() == 2 && detail::lp_lower(w[1]) == "free") {
          auto& v = p.variable(var(w[0]));
          v.lower = -kInf;
          v.upper = kInf;
        } else if (w.size() == 5 && w[1] == "<=" && w[3] == "<=" &&
                   detail::lp_parse_number(w[0], a) && detail::lp_parse_number(w[4], b)) {
          auto& v = p.variable(var(w[2]));
          v.lower = a;
          v.upper = b;
        } else if (w.size() == 3 && detail::lp_parse_number(w[2], a)) {
          auto& v = p.variable(var(w[0]));
          if (w[1] == "<=") v.upper = a;
          else if (w[1] == ">=") v.lower = a;
          else { v.lower = a; v.upper = a; }
        } else if (w.size() == 3 && detail::lp_parse_number(w[0], a)) {
          auto& v = p.variable(var(w[2]));
          if (w[1] == "<=") v.lower = a;
          else if (w[1] == ">=") v.upper = a;
          else { v.lower = a; v.upper = a; }
        } else {
          fail(lineno, "unrecognized bound");
        }
        break;
      }
      case Sec::kBinaries: {
        auto& v = p.variable(var(toks[i].text));
        v.kind = VarKind::kBinary;
        v.lower = 0.0;
        v.upper = 1.0;
        ++i;
        break;
      }
      case Sec::kEnd: break;
    }
  }
  return p;
}

}  // namespace lla::optim
