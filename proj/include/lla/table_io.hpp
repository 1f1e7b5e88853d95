#pragma once

// CSV tables for node values (`node,value`) and realization plans
// (`seq,infoset,action,label,value`; only seq and value are read back).

#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lla/equilibrium.hpp"
#include "lla/game.hpp"
#include "lla/game_io.hpp"

namespace lla {

class TableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<std::string> csv_fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream in(line);
  std::string f;
  while (std::getline(in, f, ',')) {
    if (!f.empty() && f.back() == '\r') f.pop_back();
    out.push_back(f);
  }
  return out;
}

// Reads (index, value) pairs from the named columns of a headed CSV.
inline std::vector<std::pair<int, double>> read_pairs(const std::string& text, const std::string& key) {
  std::stringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw TableError("empty table");
  const auto head = csv_fields(line);
  int ki = -1, vi = -1;
  for (int c = 0; c < static_cast<int>(head.size()); ++c) {
    if (head[c] == key) ki = c;
    if (head[c] == "value") vi = c;
  }
  if (ki < 0 || vi < 0) throw TableError("table needs '" + key + "' and 'value' columns");
  std::vector<std::pair<int, double>> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto f = csv_fields(line);
    if (static_cast<int>(f.size()) <= std::max(ki, vi)) {
      throw TableError("line " + std::to_string(lineno) + ": missing columns");
    }
    try {
      std::size_t used = 0;
      const int idx = std::stoi(f[ki], &used);
      if (used != f[ki].size()) throw std::invalid_argument(f[ki]);
      out.emplace_back(idx, parse_double(lineno, f[vi]));
    } catch (const std::exception&) {
      throw TableError("line " + std::to_string(lineno) + ": bad number");
    }
  }
  return out;
}

template <typename Fill>
void fill_dense(const std::vector<std::pair<int, double>>& pairs, int n, const char* what, Fill fill) {
  std::vector<bool> seen(n, false);
  for (const auto& [i, v] : pairs) {
    if (i < 0 || i >= n) throw TableError(std::string(what) + " " + std::to_string(i) + " out of range");
    if (seen[i]) throw TableError(std::string(what) + " " + std::to_string(i) + " listed twice");
    seen[i] = true;
    fill(i, v);
  }
  for (int i = 0; i < n; ++i) {
    if (!seen[i]) throw TableError(std::string(what) + " " + std::to_string(i) + " missing");
  }
}

}  // namespace detail

inline std::string heuristic_csv(const EvaluationFunction& h) {
  std::string out = "node,value\n";
  for (int s = 0; s < h.size(); ++s) out += std::to_string(s) + ',' + detail::fmt_double(h[s]) + '\n';
  return out;
}

// Every node must appear exactly once.
inline EvaluationFunction parse_heuristic_csv(const GameTree& g, const std::string& text) {
  EvaluationFunction h;
  h.values.assign(g.num_nodes(), 0.0);
  detail::fill_dense(detail::read_pairs(text, "node"), g.num_nodes(), "node",
                     [&](int s, double v) { h.values[s] = v; });
  return h;
}

inline std::string plan_csv(const GameTree& g, const RealizationPlan& x) {
  std::string out = "seq,infoset,action,label,value\n";
  for (int q = 0; q < static_cast<int>(x.values.size()); ++q) {
    const Sequence& s = g.sequence(x.owner, q);
    out += std::to_string(q) + ',';
    if (s.infoset < 0) {
      out += "-,-,-,";
    } else {
      out += std::to_string(s.infoset) + ',' + std::to_string(s.action) + ',' +
             g.infoset(s.infoset).labels[s.action] + ',';
    }
    out += detail::fmt_double(x[q]) + '\n';
  }
  return out;
}

// Every sequence of `who` must appear exactly once; the result is checked
// against the flow constraints.
inline RealizationPlan parse_plan_csv(const GameTree& g, Player who, const std::string& text,
                                      double tol = 1e-9) {
  RealizationPlan x{who, std::vector<double>(g.num_sequences(who), 0.0)};
  detail::fill_dense(detail::read_pairs(text, "seq"), g.num_sequences(who), "sequence",
                     [&](int q, double v) { x[q] = v; });
  if (plan_violation(g, x) > tol) throw TableError("plan breaks the sequence-form constraints");
  return x;
}

}  // namespace lla
