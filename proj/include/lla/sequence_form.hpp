#pragma once

// Building blocks shared by the sequence-form LPs and MIPs.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "lla/game.hpp"
#include "lla/optim/problem.hpp"

namespace lla {

// Adds one realization variable in [0,1] per sequence of p and the
// flow-conservation rows (x_empty = 1, children sum to parent). Returns the
// variable index of every sequence.
inline std::vector<int> add_plan_variables(optim::OptProblem& p, const GameTree& g, Player who,
                                           const std::string& prefix) {
  std::vector<int> var(g.num_sequences(who));
  for (int q = 0; q < g.num_sequences(who); ++q) {
    var[q] = p.add_variable(prefix + std::to_string(q), 0.0, 1.0);
  }
  p.add_constraint(prefix + "root", {{var[0], 1.0}}, optim::Relation::kEqual, 1.0);
  for (int i : g.infosets_of(who)) {
    const InfoSet& info = g.infoset(i);
    std::vector<optim::Term> terms{{var[info.parent_seq], -1.0}};
    for (int a = 0; a < info.num_actions(); ++a) terms.push_back({var[info.seq(a)], 1.0});
    p.add_constraint(prefix + "flow" + std::to_string(i), std::move(terms),
                     optim::Relation::kEqual, 0.0);
  }
  return var;
}

// Sparse payoff matrix of player `who`: (seq_r, seq_l) -> sum of
// pi_0(z) * (u_who(z) + offset) over leaves with those sequences.
inline std::map<std::pair<int, int>, double> payoff_matrix(const GameTree& g, Player who,
                                                           double offset = 0.0) {
  std::map<std::pair<int, int>, double> m;
  for (int z : g.leaves()) {
    const double w = g.chance_reach(z) * (g.node(z).utility(who) + offset);
    if (w == 0.0) continue;
    m[{g.seq_to(Player::kRational, z), g.seq_to(Player::kLimited, z)}] += w;
  }
  return m;
}

// Payoff terms grouped by player-l sequence: for each seq_l, the list of
// (seq_r, weight) pairs.
inline std::vector<std::vector<std::pair<int, double>>> payoff_by_l_sequence(
    const GameTree& g, Player who, double offset = 0.0) {
  std::vector<std::vector<std::pair<int, double>>> out(g.num_sequences(Player::kLimited));
  for (const auto& [key, w] : payoff_matrix(g, who, offset)) out[key.second].push_back({key.first, w});
  return out;
}

}  // namespace lla
