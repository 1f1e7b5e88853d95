#pragma once

// Line-oriented game files:
//
//   player r <name>
//   player l <name>
//   infoset <iid> owner=<r|l>
//   node <id> parent=<id|-> owner=<r|l|c> infoset=<iid|->
//   action <nodeid> <label> child=<id> [prob=<float>]
//   leaf <id> parent=<id> ur=<float> ul=<float>
//
// '#' starts a comment. Ids are arbitrary non-negative integers in the file;
// loading renumbers nodes to preorder.

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "lla/game.hpp"

namespace lla {

namespace detail {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct ParsedNode {
  int line = 0;
  bool leaf = false;
  std::string parent;  // "-" for the root
  Player owner = Player::kNature;
  std::string infoset = "-";
  double ur = 0.0;
  double ul = 0.0;
};

struct ParsedAction {
  int line = 0;
  std::string node;
  std::string label;
  std::string child;
  bool has_prob = false;
  double prob = 0.0;
};

[[noreturn]] inline void parse_fail(int line, const std::string& msg) {
  throw GameFormatError("line " + std::to_string(line) + ": " + msg);
}

inline double parse_double(int line, const std::string& s) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) parse_fail(line, "bad number '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    parse_fail(line, "bad number '" + s + "'");
  }
}

inline Player parse_owner(int line, const std::string& s, bool allow_chance) {
  if (s == "r") return Player::kRational;
  if (s == "l") return Player::kLimited;
  if (s == "c" && allow_chance) return Player::kNature;
  parse_fail(line, "bad owner '" + s + "'");
}

// Splits `key=value` tokens; plain tokens go to `positional`.
inline void split_fields(int line, const std::vector<std::string>& toks, std::size_t from,
                         std::vector<std::string>& positional,
                         std::map<std::string, std::string>& kv) {
  for (std::size_t i = from; i < toks.size(); ++i) {
    const auto eq = toks[i].find('=');
    if (eq == std::string::npos) {
      positional.push_back(toks[i]);
    } else {
      const std::string key = toks[i].substr(0, eq);
      if (kv.count(key)) parse_fail(line, "duplicate field '" + key + "'");
      kv[key] = toks[i].substr(eq + 1);
    }
  }
}

inline const std::string& require(int line, const std::map<std::string, std::string>& kv,
                                  const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) parse_fail(line, "missing field '" + key + "'");
  return it->second;
}

}  // namespace detail

// Parses without semantic validation beyond tree structure.
inline GameTree parse_game(const std::string& text) {
  using namespace detail;
  std::map<std::string, ParsedNode> nodes;
  std::vector<std::string> node_order;
  std::vector<ParsedAction> actions;
  std::map<std::string, Player> infosets;
  std::vector<std::string> infoset_order;
  std::string names[2] = {"r", "l"};

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (auto c = raw.find('#'); c != std::string::npos) raw.resize(c);
    std::istringstream ls(raw);
    std::vector<std::string> toks;
    for (std::string t; ls >> t;) toks.push_back(t);
    if (toks.empty()) continue;
    std::vector<std::string> pos;
    std::map<std::string, std::string> kv;
    const std::string& kind = toks[0];
    split_fields(lineno, toks, 1, pos, kv);

    if (kind == "player") {
      if (pos.size() != 2 || !kv.empty()) parse_fail(lineno, "expected: player <r|l> <name>");
      names[side(parse_owner(lineno, pos[0], false))] = pos[1];
    } else if (kind == "infoset") {
      if (pos.size() != 1) parse_fail(lineno, "expected: infoset <iid> owner=<r|l>");
      if (infosets.count(pos[0])) parse_fail(lineno, "duplicate infoset " + pos[0]);
      infosets[pos[0]] = parse_owner(lineno, require(lineno, kv, "owner"), false);
      infoset_order.push_back(pos[0]);
    } else if (kind == "node" || kind == "leaf") {
      if (pos.size() != 1) parse_fail(lineno, "expected a single node id");
      if (nodes.count(pos[0])) parse_fail(lineno, "duplicate node " + pos[0]);
      ParsedNode n;
      n.line = lineno;
      n.parent = require(lineno, kv, "parent");
      if (kind == "leaf") {
        n.leaf = true;
        n.ur = parse_double(lineno, require(lineno, kv, "ur"));
        n.ul = parse_double(lineno, require(lineno, kv, "ul"));
      } else {
        n.owner = parse_owner(lineno, require(lineno, kv, "owner"), true);
        n.infoset = kv.count("infoset") ? kv["infoset"] : "-";
        if (n.owner == Player::kNature && n.infoset != "-") {
          parse_fail(lineno, "Nature node " + pos[0] + " cannot have an infoset");
        }
      }
      nodes[pos[0]] = n;
      node_order.push_back(pos[0]);
    } else if (kind == "action") {
      if (pos.size() != 2) parse_fail(lineno, "expected: action <nodeid> <label> child=<id>");
      ParsedAction a;
      a.line = lineno;
      a.node = pos[0];
      a.label = pos[1];
      a.child = require(lineno, kv, "child");
      if (kv.count("prob")) {
        a.has_prob = true;
        a.prob = parse_double(lineno, kv["prob"]);
      }
      actions.push_back(a);
    } else {
      parse_fail(lineno, "unknown record '" + kind + "'");
    }
  }

  GameBuilder b;
  b.set_player_name(Player::kRational, names[0]);
  b.set_player_name(Player::kLimited, names[1]);
  std::map<std::string, int> iid;
  for (const auto& name : infoset_order) iid[name] = b.add_infoset(infosets[name]);
  std::map<std::string, int> id;
  for (const auto& name : node_order) {
    const ParsedNode& n = nodes[name];
    if (n.leaf) {
      id[name] = b.add_leaf(n.ur, n.ul);
    } else {
      int info = -1;
      if (n.infoset != "-") {
        auto it = iid.find(n.infoset);
        if (it == iid.end()) parse_fail(n.line, "unknown infoset " + n.infoset);
        info = it->second;
      }
      id[name] = b.add_node(n.owner, info);
    }
  }
  std::map<std::string, std::string> parent_of_child;
  for (const auto& a : actions) {
    auto pn = id.find(a.node);
    if (pn == id.end()) parse_fail(a.line, "action on unknown node " + a.node);
    auto cn = id.find(a.child);
    if (cn == id.end()) parse_fail(a.line, "dangling child reference " + a.child);
    const ParsedNode& par = nodes[a.node];
    if (par.leaf) parse_fail(a.line, "leaf " + a.node + " cannot have actions");
    if (par.owner == Player::kNature && !a.has_prob) {
      parse_fail(a.line, "Nature action needs prob=");
    }
    if (par.owner != Player::kNature && a.has_prob) {
      parse_fail(a.line, "prob= is only allowed on Nature actions");
    }
    if (nodes[a.child].parent != a.node) {
      parse_fail(a.line, "node " + a.child + " declares parent " + nodes[a.child].parent +
                             ", not " + a.node);
    }
    if (parent_of_child.count(a.child)) parse_fail(a.line, "node " + a.child + " has two parents");
    parent_of_child[a.child] = a.node;
    try {
      b.add_action(pn->second, a.label, cn->second, a.prob);
    } catch (const GameFormatError& e) {
      parse_fail(a.line, e.what());
    }
  }
  for (const auto& name : node_order) {
    const ParsedNode& n = nodes[name];
    if (n.parent == "-") continue;
    if (!nodes.count(n.parent)) parse_fail(n.line, "dangling parent reference " + n.parent);
    if (!parent_of_child.count(name)) {
      parse_fail(n.line, "no action of node " + n.parent + " leads to " + name);
    }
  }
  return b.build();
}

// Parses and validates; validation failures are reported as a GameFormatError.
inline GameTree load_game(const std::string& text) {
  GameTree g = parse_game(text);
  const auto violations = validate(g);
  if (!violations.empty()) {
    std::string msg = "invalid game:";
    for (const auto& v : violations) msg += std::string("\n  ") + to_string(v.kind) + ": " + v.message;
    throw GameFormatError(msg);
  }
  return g;
}

inline GameTree load_game_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw GameFormatError("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return load_game(ss.str());
}

inline std::string save_game(const GameTree& g) {
  using detail::fmt_double;
  std::ostringstream os;
  os << "player r " << g.player_name(Player::kRational) << '\n';
  os << "player l " << g.player_name(Player::kLimited) << '\n';
  for (int i = 0; i < g.num_infosets(); ++i) {
    os << "infoset " << i << " owner=" << player_code(g.infoset(i).owner) << '\n';
  }
  for (int s = 0; s < g.num_nodes(); ++s) {
    const Node& n = g.node(s);
    const std::string parent = n.parent < 0 ? "-" : std::to_string(n.parent);
    if (n.terminal) {
      os << "leaf " << s << " parent=" << parent << " ur=" << fmt_double(n.ur)
         << " ul=" << fmt_double(n.ul) << '\n';
      continue;
    }
    os << "node " << s << " parent=" << parent << " owner=" << player_code(n.owner)
       << " infoset=" << (n.infoset < 0 ? "-" : std::to_string(n.infoset)) << '\n';
    for (int a = 0; a < n.num_actions(); ++a) {
      os << "action " << s << ' ' << n.labels[a] << " child=" << n.children[a];
      if (n.owner == Player::kNature) os << " prob=" << fmt_double(n.probs[a]);
      os << '\n';
    }
  }
  return os.str();
}

}  // namespace lla
