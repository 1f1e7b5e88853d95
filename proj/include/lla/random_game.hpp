#pragma once

// Seeded random games with imperfect information and perfect recall, for
// property tests and oracle cross-checks.

#include <cmath>
#include <cstdint>
#include <map>
#include <tuple>
#include <vector>

#include "lla/equilibrium.hpp"
#include "lla/game.hpp"
#include "lla/rng.hpp"

namespace lla {

struct RandomGameOptions {
  int max_depth = 4;
  int max_actions = 3;
  int max_l_infosets = 4;
  double p_leaf = 0.2;    // below the root
  double p_nature = 0.15;
  double p_merge = 0.5;   // chance of joining a compatible existing infoset
  // Utilities are multiples of `grid` in [-3, 3]; a coarse grid makes ties.
  double grid = 0.25;
  bool zero_sum = false;
};

// Nodes of one player join an infoset only when they share that player's
// last sequence and action count, which keeps perfect recall.
inline GameTree random_game(std::uint64_t seed, const RandomGameOptions& opt = {}) {
  Rng rng(hash_seed(seed, {0x9a3eULL}));
  GameBuilder b;
  auto utility = [&] {
    const long steps = std::lround(3.0 / opt.grid);
    return opt.grid * static_cast<double>(static_cast<long>(rng.below(2 * steps + 1)) - steps);
  };
  // (player, parent sequence as (infoset, action), #actions) -> infosets
  std::map<std::tuple<int, int, int, int>, std::vector<int>> open;
  int l_infosets = 0;
  struct Hist {
    int infoset[2] = {-1, -1};
    int action[2] = {-1, -1};
  };
  auto grow = [&](auto&& self, int depth, Hist h) -> int {
    const bool leaf = depth == opt.max_depth || (depth > 0 && rng.uniform() < opt.p_leaf);
    if (leaf) {
      const double ur = utility();
      return b.add_leaf(ur, opt.zero_sum ? -ur : utility());
    }
    const int na = 2 + static_cast<int>(rng.below(opt.max_actions - 1));
    if (rng.uniform() < opt.p_nature) {
      const int s = b.add_node(Player::kNature);
      std::vector<double> w(na);
      double total = 0.0;
      for (auto& x : w) total += (x = 1.0 + static_cast<double>(rng.below(4)));
      for (int a = 0; a < na; ++a) b.add_action(s, "n" + std::to_string(a), self(self, depth + 1, h), w[a] / total);
      return s;
    }
    Player p = rng.below(2) == 0 ? Player::kRational : Player::kLimited;
    const int sd = side(p);
    const auto key = std::make_tuple(sd, h.infoset[sd], h.action[sd], na);
    auto& pool = open[key];
    int info = -1;
    if (!pool.empty() && rng.uniform() < opt.p_merge) {
      info = pool[rng.below(pool.size())];
    } else if (p == Player::kLimited && l_infosets >= opt.max_l_infosets) {
      p = Player::kRational;
    }
    if (info < 0) {
      info = b.add_infoset(p);
      if (p == Player::kLimited) ++l_infosets;
      open[std::make_tuple(side(p), h.infoset[side(p)], h.action[side(p)], na)].push_back(info);
    }
    const int s = b.add_node(p, info);
    for (int a = 0; a < na; ++a) {
      Hist next = h;
      next.infoset[side(p)] = info;
      next.action[side(p)] = a;
      b.add_action(s, "a" + std::to_string(a), self(self, depth + 1, next));
    }
    return s;
  };
  grow(grow, 0, Hist{});
  return b.build();
}

// Independent N(0, 1) values on every node.
inline EvaluationFunction random_heuristic(const GameTree& g, std::uint64_t seed) {
  Rng rng(hash_seed(seed, {0x4e7aULL}));
  EvaluationFunction h;
  h.values.resize(g.num_nodes());
  for (auto& v : h.values) v = rng.normal();
  return h;
}

// Random behavior normalized per infoset, turned into a realization plan.
inline RealizationPlan random_plan(const GameTree& g, Player p, std::uint64_t seed) {
  Rng rng(hash_seed(seed, {0x71a2ULL, static_cast<std::uint64_t>(side(p))}));
  std::vector<double> beh(g.num_sequences(p), 0.0);
  for (int i : g.infosets_of(p)) {
    const InfoSet& info = g.infoset(i);
    double total = 0.0;
    for (int a = 0; a < info.num_actions(); ++a) total += (beh[info.seq(a)] = rng.uniform() + 1e-3);
    for (int a = 0; a < info.num_actions(); ++a) beh[info.seq(a)] /= total;
  }
  return from_behavioral(g, p, beh);
}

}  // namespace lla
