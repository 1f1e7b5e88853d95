#pragma once

// 3SAT gadget games for the hardness constructions, plus brute-force SAT and
// MAXSAT to check solvers against.

#include <array>
#include <cstdint>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lla/game.hpp"
#include "lla/lookahead.hpp"
#include "lla/rng.hpp"

namespace lla {

class CnfError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Literal {
  int var = 0;  // 0-based
  bool positive = true;

  bool satisfied_by(bool value) const { return value == positive; }
  bool operator==(const Literal&) const = default;
};

using Clause = std::array<Literal, 3>;

struct CnfInstance {
  int num_vars = 0;
  std::vector<Clause> clauses;

  int num_clauses() const { return static_cast<int>(clauses.size()); }

  void validate() const {
    for (const auto& c : clauses) {
      for (const auto& l : c) {
        if (l.var < 0 || l.var >= num_vars) throw CnfError("literal variable out of range");
      }
    }
  }
};

// Turns clauses of any length into 3-literal clauses over extra variables.
// A short clause c becomes c with every sign pattern of fresh dummies, so the
// result is satisfiable exactly when the input is; longer clauses are split
// with fresh link variables.
inline CnfInstance to_3cnf(int num_vars, const std::vector<std::vector<Literal>>& clauses) {
  CnfInstance out;
  out.num_vars = num_vars;
  for (const auto& c : clauses) {
    if (c.empty()) throw CnfError("empty clause");
    for (const auto& l : c) {
      if (l.var < 0 || l.var >= num_vars) throw CnfError("literal variable out of range");
    }
    if (c.size() == 3) {
      out.clauses.push_back({c[0], c[1], c[2]});
    } else if (c.size() < 3) {
      const int pad = 3 - static_cast<int>(c.size());
      const int first = out.num_vars;
      out.num_vars += pad;
      for (int mask = 0; mask < (1 << pad); ++mask) {
        std::vector<Literal> full = c;
        for (int d = 0; d < pad; ++d) full.push_back({first + d, ((mask >> d) & 1) == 0});
        out.clauses.push_back({full[0], full[1], full[2]});
      }
    } else {
      // (l0 v l1 v z1) (-z1 v l2 v z2) ... (-zk v l(n-2) v l(n-1))
      int link = out.num_vars++;
      out.clauses.push_back({c[0], c[1], Literal{link, true}});
      for (std::size_t j = 2; j + 2 < c.size(); ++j) {
        const int next = out.num_vars++;
        out.clauses.push_back({Literal{link, false}, c[j], Literal{next, true}});
        link = next;
      }
      out.clauses.push_back({Literal{link, false}, c[c.size() - 2], c[c.size() - 1]});
    }
  }
  return out;
}

inline CnfInstance parse_dimacs(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int declared_vars = -1;
  long declared_clauses = -1;
  std::vector<std::vector<Literal>> clauses;
  std::vector<Literal> cur;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (tok == "c") continue;
    if (tok == "%") break;
    if (tok == "p") {
      std::string fmt;
      if (!(ls >> fmt >> declared_vars >> declared_clauses) || fmt != "cnf" || declared_vars < 0) {
        throw CnfError("bad problem line: " + line);
      }
      continue;
    }
    if (declared_vars < 0) throw CnfError("clause before the problem line");
    do {
      char* end = nullptr;
      const long v = std::strtol(tok.c_str(), &end, 10);
      if (end == tok.c_str() || *end != '\0') throw CnfError("bad literal '" + tok + "'");
      if (v == 0) {
        if (cur.empty()) throw CnfError("empty clause");
        clauses.push_back(cur);
        cur.clear();
        continue;
      }
      const long var = std::labs(v);
      if (var > declared_vars) throw CnfError("literal " + tok + " exceeds the declared variables");
      cur.push_back({static_cast<int>(var - 1), v > 0});
    } while (ls >> tok);
  }
  if (declared_vars < 0) throw CnfError("missing problem line");
  if (!cur.empty()) clauses.push_back(cur);
  if (declared_clauses >= 0 && static_cast<long>(clauses.size()) != declared_clauses) {
    throw CnfError("declared " + std::to_string(declared_clauses) + " clauses, found " +
                   std::to_string(clauses.size()));
  }
  return to_3cnf(declared_vars, clauses);
}

inline std::string to_dimacs(const CnfInstance& cnf) {
  std::ostringstream os;
  os << "p cnf " << cnf.num_vars << " " << cnf.num_clauses() << "\n";
  for (const auto& c : cnf.clauses) {
    for (const auto& l : c) os << (l.positive ? "" : "-") << l.var + 1 << " ";
    os << "0\n";
  }
  return os.str();
}

// Uniform 3SAT with three distinct variables per clause (num_vars >= 3).
inline CnfInstance random_3sat(std::uint64_t seed, int num_vars, int num_clauses) {
  if (num_vars < 3) throw CnfError("need at least 3 variables");
  Rng rng(hash_seed(seed, {0x35a7ULL}));
  CnfInstance cnf;
  cnf.num_vars = num_vars;
  for (int c = 0; c < num_clauses; ++c) {
    Clause cl;
    for (int j = 0; j < 3; ++j) {
      int v;
      do {
        v = static_cast<int>(rng.below(num_vars));
      } while ((j > 0 && cl[0].var == v) || (j > 1 && cl[1].var == v));
      cl[j] = {v, rng.below(2) == 0};
    }
    cnf.clauses.push_back(cl);
  }
  return cnf;
}

inline int count_satisfied(const CnfInstance& cnf, std::uint64_t assignment) {
  int n = 0;
  for (const auto& c : cnf.clauses) {
    for (const auto& l : c) {
      if (l.satisfied_by((assignment >> l.var) & 1)) {
        ++n;
        break;
      }
    }
  }
  return n;
}

// Exhaustive over 2^n assignments.
inline int max_satisfied(const CnfInstance& cnf) {
  if (cnf.num_vars > 30) throw CnfError("too many variables for brute force");
  int best = 0;
  for (std::uint64_t a = 0; a < (std::uint64_t{1} << cnf.num_vars); ++a) {
    best = std::max(best, count_satisfied(cnf, a));
    if (best == cnf.num_clauses()) break;
  }
  return best;
}

inline bool satisfiable(const CnfInstance& cnf) { return max_satisfied(cnf) == cnf.num_clauses(); }

struct Gadget {
  GameTree game;
  LookaheadSpec spec;
};

namespace detail {

inline std::string literal_label(const Literal& l) {
  return (l.positive ? "x" : "-x") + std::to_string(l.var + 1);
}

// h equal to l's utility on leaves and 0 elsewhere.
inline EvaluationFunction leaf_heuristic(const GameTree& g) {
  EvaluationFunction h;
  h.values.resize(g.num_nodes());
  for (int s = 0; s < g.num_nodes(); ++s) h.values[s] = g.node(s).terminal ? g.node(s).ul : 0.0;
  return h;
}

// Nature picks a clause; l picks a literal (plus "unsat" in the lookahead-2
// version); r sets the literal's variable, one infoset per variable.
inline GameTree clause_tree(const CnfInstance& cnf, bool lookahead2) {
  cnf.validate();
  if (cnf.clauses.empty()) throw CnfError("instance has no clauses");
  GameBuilder b;
  const int root = b.add_node(Player::kNature);
  std::vector<int> var_info(cnf.num_vars, -1);
  const double p = 1.0 / cnf.num_clauses();
  for (int c = 0; c < cnf.num_clauses(); ++c) {
    const int node = b.add_node(Player::kLimited, b.add_infoset(Player::kLimited));
    b.add_action(root, "c" + std::to_string(c + 1), node, p);
    if (lookahead2) b.add_action(node, "unsat", b.add_leaf(0.0, 2.0 / 3.0));
    for (const auto& lit : cnf.clauses[c]) {
      if (var_info[lit.var] < 0) var_info[lit.var] = b.add_infoset(Player::kRational);
      const int r = b.add_node(Player::kRational, var_info[lit.var]);
      b.add_action(node, literal_label(lit), r);
      for (bool value : {true, false}) {
        const bool sat = lit.satisfied_by(value);
        const int leaf = lookahead2 ? b.add_leaf(1.0, sat ? 1.0 : 0.0) : b.add_leaf(sat ? 1.0 : 0.0, 0.0);
        b.add_action(r, value ? "t" : "f", leaf);
      }
    }
  }
  return b.build();
}

}  // namespace detail

// MAXSAT gadget: l is indifferent among the literals of each clause, so with
// favorable ties the value is (max satisfied clauses) / m.
inline Gadget gadget_favorable(const CnfInstance& cnf) {
  Gadget out{detail::clause_tree(cnf, false), {}};
  out.spec.k = 1;
  out.spec.tie = TieBreak::kFavorable;
  out.spec.h = detail::leaf_heuristic(out.game);
  return out;
}

// Lookahead-2 gadget: each clause also offers "unsat" (0 to r, 2/3 to l), and
// a literal is worth to l the chance that r satisfies it. Value 1 iff
// satisfiable, under any tie rule.
inline Gadget gadget_lookahead2(const CnfInstance& cnf) {
  Gadget out{detail::clause_tree(cnf, true), {}};
  out.spec.k = 2;
  out.spec.tie = TieBreak::kAdversarial;
  out.spec.h = detail::leaf_heuristic(out.game);
  return out;
}

// Information-set gadget: Nature picks a (variable, clause) pair, r sees only
// the variable, and l sees only the clause. l's variable actions pay 3 on the
// nodes where r's choice satisfies the clause through that variable; "unsat"
// pays 2/3. Value 1 iff satisfiable. Clauses must use three distinct
// variables.
inline Gadget gadget_infosets(const CnfInstance& cnf) {
  cnf.validate();
  if (cnf.clauses.empty()) throw CnfError("instance has no clauses");
  for (const auto& c : cnf.clauses) {
    if (c[0].var == c[1].var || c[0].var == c[2].var || c[1].var == c[2].var) {
      throw CnfError("information-set gadget needs three distinct variables per clause");
    }
  }
  GameBuilder b;
  const int root = b.add_node(Player::kNature);
  std::vector<int> var_info(cnf.num_vars, -1);
  std::vector<int> clause_info(cnf.num_clauses());
  for (int c = 0; c < cnf.num_clauses(); ++c) clause_info[c] = b.add_infoset(Player::kLimited);
  const double p = 1.0 / (3.0 * cnf.num_clauses());
  for (int c = 0; c < cnf.num_clauses(); ++c) {
    for (const auto& lit : cnf.clauses[c]) {
      if (var_info[lit.var] < 0) var_info[lit.var] = b.add_infoset(Player::kRational);
      const int r = b.add_node(Player::kRational, var_info[lit.var]);
      b.add_action(root, "x" + std::to_string(lit.var + 1) + "c" + std::to_string(c + 1), r, p);
      for (bool value : {true, false}) {
        const int l = b.add_node(Player::kLimited, clause_info[c]);
        b.add_action(r, value ? "t" : "f", l);
        b.add_action(l, "unsat", b.add_leaf(0.0, 2.0 / 3.0));
        for (const auto& other : cnf.clauses[c]) {
          const bool pays = other.var == lit.var && lit.satisfied_by(value);
          b.add_action(l, "x" + std::to_string(other.var + 1), b.add_leaf(1.0, pays ? 3.0 : 0.0));
        }
      }
    }
  }
  Gadget out{b.build(), {}};
  out.spec.k = 1;
  out.spec.tie = TieBreak::kAdversarial;
  out.spec.h = detail::leaf_heuristic(out.game);
  return out;
}

// 1 = favorable MAXSAT gadget, 2 = lookahead-2 gadget, 3 = information-set gadget.
inline Gadget make_gadget(int kind, const CnfInstance& cnf) {
  switch (kind) {
    case 1: return gadget_favorable(cnf);
    case 2: return gadget_lookahead2(cnf);
    case 3: return gadget_infosets(cnf);
  }
  throw CnfError("unknown gadget " + std::to_string(kind) + " (expected 1, 2 or 3)");
}

}  // namespace lla
