#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "lla/equilibrium.hpp"
#include "lla/game.hpp"
#include "lla/lookahead.hpp"
#include "lla/poker.hpp"
#include "lla/random_game.hpp"

namespace {

using namespace lla;

EvaluationFunction constant_h(const GameTree& g, double v = 0.0) {
  EvaluationFunction h;
  h.values.assign(g.num_nodes(), v);
  return h;
}

std::set<int> frontier_nodes(const Frontier& f) {
  std::set<int> out;
  for (const auto& fn : f.nodes) out.insert(fn.node);
  return out;
}

// Infosets of l in Kuhn (r = seat 1) that face a bet: labelled fold/call.
std::vector<int> kuhn_facing_bet(const GameTree& g) {
  std::vector<int> out;
  for (int i : g.infosets_of(Player::kLimited)) {
    if (g.infoset(i).labels[0] == "fold") out.push_back(i);
  }
  return out;
}

TEST(Frontier, KuhnFacingBetIsFoldAndCallOutcomes) {
  const GameTree g = build_kuhn(1);
  const auto facing = kuhn_facing_bet(g);
  // One infoset per P2 card; each holds the two deals with a different P1 card.
  ASSERT_EQ(facing.size(), 3u);
  for (int i : facing) {
    const InfoSet& info = g.infoset(i);
    ASSERT_EQ(info.nodes.size(), 2u);
    for (int a = 0; a < 2; ++a) {
      const Frontier f = build_frontier(g, i, a, 1);
      ASSERT_EQ(f.nodes.size(), 2u);
      EXPECT_TRUE(f.window.empty());
      for (const auto& fn : f.nodes) {
        const Node& leaf = g.node(fn.node);
        ASSERT_TRUE(leaf.terminal);
        EXPECT_EQ(leaf.parent, fn.origin);
        EXPECT_NEAR(fn.chance, 1.0 / 6.0, 1e-15);
        // Folding hands P1 the ante; a call settles two chips.
        EXPECT_EQ(a == 0 ? leaf.ur : std::abs(leaf.ur), a == 0 ? 1.0 : 2.0);
      }
    }
  }
}

TEST(Frontier, DepthOneIsDirectChildren) {
  const GameTree g = build_kj(1);
  for (int i : g.infosets_of(Player::kLimited)) {
    for (int a = 0; a < g.infoset(i).num_actions(); ++a) {
      std::set<int> expect;
      for (int s : g.infoset(i).nodes) expect.insert(g.node(s).children[a]);
      EXPECT_EQ(frontier_nodes(build_frontier(g, i, a, 1)), expect);
    }
  }
}

TEST(Frontier, DeepLookaheadReachesAllLeaves) {
  const GameTree g = build_kj(2);
  for (int i : g.infosets_of(Player::kLimited)) {
    for (int a = 0; a < g.infoset(i).num_actions(); ++a) {
      std::set<int> expect;
      for (int s : g.infoset(i).nodes) {
        for (int z : g.leaves()) {
          for (int t = z; t >= 0; t = g.node(t).parent) {
            if (g.node(t).parent == s && g.node(t).action_index == a) expect.insert(z);
          }
        }
      }
      const Frontier f = build_frontier(g, i, a, 50);
      EXPECT_EQ(frontier_nodes(f), expect);
      EXPECT_EQ(f.nodes.size(), expect.size());
    }
  }
}

TEST(Frontier, WindowNodesWithinDepth) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const GameTree g = random_game(seed);
    for (int k = 1; k <= 3; ++k) {
      for (int i : g.infosets_of(Player::kLimited)) {
        for (int a = 0; a < g.infoset(i).num_actions(); ++a) {
          const Frontier f = build_frontier(g, i, a, k);
          for (const auto& fn : f.nodes) {
            const int d = g.node(fn.node).depth - g.node(fn.origin).depth;
            EXPECT_LE(d, k);
            EXPECT_TRUE(d == k || g.node(fn.node).terminal);
            int t = fn.node;
            while (g.node(t).parent != fn.origin) t = g.node(t).parent;
            EXPECT_EQ(g.node(t).action_index, a);
          }
        }
      }
    }
  }
}

TEST(OptimalActions, SingleNodeArgmax) {
  GameBuilder b;
  const int s = b.add_node(Player::kLimited);
  b.add_action(s, "a", b.add_leaf(0, 3));
  b.add_action(s, "b", b.add_leaf(0, 5));
  const GameTree g = b.build();
  LookaheadSpec spec;
  spec.h = make_heuristic_exact(g, uniform_plan(g, Player::kRational), uniform_plan(g, Player::kLimited));
  const auto set = optimal_actions(g, spec, uniform_plan(g, Player::kRational), 0);
  EXPECT_EQ(set.actions(), std::vector<int>{1});
}

TEST(OptimalActions, TieKeepsBoth) {
  GameBuilder b;
  const int s = b.add_node(Player::kLimited);
  b.add_action(s, "a", b.add_leaf(0, 4));
  b.add_action(s, "b", b.add_leaf(1, 4));
  const GameTree g = b.build();
  LookaheadSpec spec;
  spec.h = constant_h(g, 4.0);
  const auto set = optimal_actions(g, spec, uniform_plan(g, Player::kRational), 0);
  EXPECT_EQ(set.actions(), (std::vector<int>{0, 1}));
}

TEST(OptimalActions, UnreachableKeepsEveryAction) {
  // r's first action avoids l entirely.
  GameBuilder b;
  const int r = b.add_node(Player::kRational);
  const int s = b.add_node(Player::kLimited);
  b.add_action(r, "out", b.add_leaf(0, 0));
  b.add_action(r, "in", s);
  b.add_action(s, "a", b.add_leaf(0, 1));
  b.add_action(s, "b", b.add_leaf(0, 2));
  const GameTree g = b.build();
  LookaheadSpec spec;
  spec.h = make_heuristic_exact(g, uniform_plan(g, Player::kRational), uniform_plan(g, Player::kLimited));
  const RealizationPlan out{Player::kRational, {1.0, 1.0, 0.0}};
  const int li = g.node(g.node(0).children[1]).infoset;
  const auto set = optimal_actions(g, spec, out, li);
  EXPECT_FALSE(set.reachable());
  EXPECT_EQ(set.actions(), (std::vector<int>{0, 1}));
  const RealizationPlan in{Player::kRational, {1.0, 0.0, 1.0}};
  EXPECT_EQ(optimal_actions(g, spec, in, li).actions(), std::vector<int>{1});
}

TEST(OptimalActions, KuhnEquilibriumSupportAtDepthTwo) {
  const GameTree g = build_kuhn(1);
  const auto eq = solve_zero_sum(g);
  LookaheadSpec spec;
  spec.k = 2;
  spec.h = make_heuristic_exact(g, eq);
  const LookaheadModel model(g, 2);
  for (int i : g.infosets_of(Player::kLimited)) {
    const auto set = optimal_actions(g, model, spec.h, eq.plan_r, i, 1e-7);
    const InfoSet& info = g.infoset(i);
    for (int a = 0; a < info.num_actions(); ++a) {
      EXPECT_TRUE(eq.plan_l[info.seq(a)] <= 1e-9 || set.optimal[a]) << "infoset " << i << " action " << a;
    }
  }
}

TEST(OptimalActions, HypotheticalPlayIsOptimal) {
  // Compare the recursive maximization against every pure hypothetical play.
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const GameTree g = random_game(seed);
    const auto h = random_heuristic(g, seed);
    const auto x = random_plan(g, Player::kRational, seed);
    for (int k = 1; k <= 3; ++k) {
      for (int i : g.infosets_of(Player::kLimited)) {
        for (int a = 0; a < g.infoset(i).num_actions(); ++a) {
          const Frontier f = build_frontier(g, i, a, k);
          const auto best = frontier_value(f, h, x);
          EXPECT_NEAR(frontier_value(f, h, x, best.play), best.value, 1e-12);
          std::vector<int> play(f.window.size(), 0);
          double brute = -1e300;
          while (true) {
            brute = std::max(brute, frontier_value(f, h, x, play));
            std::size_t w = 0;
            while (w < play.size() && ++play[w] == f.window[w].num_actions) play[w++] = 0;
            if (w == play.size()) break;
          }
          EXPECT_NEAR(best.value, brute, 1e-12);
        }
      }
    }
  }
}

TEST(OptimalActions, ScaleAndShiftInvariance) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const GameTree g = seed % 5 == 0 ? build_kuhn(1) : random_game(seed);
    const auto h = random_heuristic(g, seed);
    const auto x = random_plan(g, Player::kRational, seed + 100);
    for (int k = 1; k <= 2; ++k) {
      const LookaheadModel model(g, k);
      for (double c : {0.1, 3.0}) {
        for (double shift : {0.0, -2.0, 7.5}) {
          EvaluationFunction h2 = h;
          for (auto& v : h2.values) v = c * v + shift;
          for (int i : g.infosets_of(Player::kLimited)) {
            EXPECT_EQ(optimal_actions(g, model, h, x, i).actions(),
                      optimal_actions(g, model, h2, x, i).actions());
          }
        }
      }
    }
  }
}

TEST(OptimalActions, BeliefNormalizationDropsOut) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const GameTree g = random_game(seed);
    const auto h = random_heuristic(g, seed);
    const auto x = random_plan(g, Player::kRational, seed);
    const LookaheadModel model(g, 2);
    for (int i : g.infosets_of(Player::kLimited)) {
      const auto set = optimal_actions(g, model, h, x, i);
      ASSERT_TRUE(set.reachable());
      std::vector<double> normalized;
      for (double v : set.values) normalized.push_back(v / set.reach);
      const double best = *std::max_element(normalized.begin(), normalized.end());
      for (std::size_t a = 0; a < normalized.size(); ++a) {
        EXPECT_EQ(set.optimal[a], normalized[a] >= best - 1e-9 / set.reach);
      }
    }
  }
}

// Rational value of (I, a): max over l's pure plans that play a at I of the
// leaf sum below I, weighted by Nature and x. Enumerates whole plans.
std::vector<double> rational_values(const GameTree& g, const RealizationPlan& x, int infoset) {
  const auto& linfo = g.infosets_of(Player::kLimited);
  const InfoSet& info = g.infoset(infoset);
  std::vector<double> best(info.num_actions(), -1e300);
  std::vector<int> choice(g.num_infosets(), 0);
  while (true) {
    double v = 0.0;
    for (int z : g.leaves()) {
      bool ok = true;
      int origin = -1;
      for (int t = z; g.node(t).parent >= 0; t = g.node(t).parent) {
        const Node& p = g.node(g.node(t).parent);
        if (p.owner == Player::kLimited && choice[p.infoset] != g.node(t).action_index) ok = false;
        if (p.infoset == infoset) {
          origin = g.node(t).parent;
          break;
        }
      }
      if (ok && origin >= 0) {
        v += g.chance_reach(z) * x[g.seq_to(Player::kRational, z)] * g.node(z).ul;
      }
    }
    double& slot = best[choice[infoset]];
    slot = std::max(slot, v);
    std::size_t k = 0;
    while (k < linfo.size() && ++choice[linfo[k]] == g.infoset(linfo[k]).num_actions()) choice[linfo[k++]] = 0;
    if (k == linfo.size()) break;
  }
  return best;
}

TEST(OptimalActions, FullLookaheadIsRationalBestResponse) {
  RandomGameOptions opt;
  opt.max_depth = 4;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const GameTree g = random_game(seed, opt);
    EvaluationFunction h = random_heuristic(g, seed);
    for (int z : g.leaves()) h.values[z] = g.node(z).ul;
    const auto x = random_plan(g, Player::kRational, seed);
    const LookaheadModel model(g, g.max_depth() + 1);
    for (int i : g.infosets_of(Player::kLimited)) {
      const auto values = rational_values(g, x, i);
      const double top = *std::max_element(values.begin(), values.end());
      const auto set = optimal_actions(g, model, h, x, i);
      for (std::size_t a = 0; a < values.size(); ++a) {
        EXPECT_NEAR(set.values[a], values[a], 1e-12);
        EXPECT_EQ(set.optimal[a], values[a] >= top - 1e-9) << "seed " << seed;
      }
    }
  }
}

// r moves L or R; R pays 2. After L, l chooses x (r gets 1) or y (r gets 3),
// both worth the same to her.
GameTree tie_game() {
  GameBuilder b;
  const int r = b.add_node(Player::kRational);
  const int l = b.add_node(Player::kLimited);
  b.add_action(r, "L", l);
  b.add_action(r, "R", b.add_leaf(2, 0));
  b.add_action(l, "x", b.add_leaf(1, 5));
  b.add_action(l, "y", b.add_leaf(3, 5));
  return b.build();
}

// Value to r of its best response with l fixed to a pure choice at every
// node, for each combination of tied choices.
std::vector<double> tied_subgame_values(const GameTree& g) {
  std::vector<double> out;
  for (int a = 0; a < 2; ++a) {
    std::vector<double> beh(g.num_sequences(Player::kLimited), 0.0);
    beh[g.infoset(g.infosets_of(Player::kLimited)[0]).seq(a)] = 1.0;
    out.push_back(best_response(g, from_behavioral(g, Player::kLimited, beh)).value);
  }
  return out;
}

TEST(SingletonLookahead1, TieBreakModes) {
  const GameTree g = tie_game();
  LookaheadSpec spec;
  spec.h = make_heuristic_exact(g, uniform_plan(g, Player::kRational), uniform_plan(g, Player::kLimited));
  const auto tied = tied_subgame_values(g);
  spec.tie = TieBreak::kAdversarial;
  EXPECT_NEAR(solve_singleton_lookahead1(g, spec).value_r, *std::min_element(tied.begin(), tied.end()), 1e-9);
  spec.tie = TieBreak::kFavorable;
  const auto fav = solve_singleton_lookahead1(g, spec);
  EXPECT_NEAR(fav.value_r, *std::max_element(tied.begin(), tied.end()), 1e-9);
  EXPECT_NEAR(fav.plan_l[2], 1.0, 1e-12);
  spec.tie = TieBreak::kStatic;
  EXPECT_NEAR(solve_singleton_lookahead1(g, spec).value_r, tied[0], 1e-9);
  const int li = g.infosets_of(Player::kLimited)[0];
  spec.static_order.assign(g.num_infosets(), {});
  spec.static_order[li] = {1, 0};
  EXPECT_NEAR(solve_singleton_lookahead1(g, spec).value_r, tied[1], 1e-9);
}

TEST(SingletonLookahead1, UniqueArgmaxModesAgree) {
  RandomGameOptions opt;
  opt.p_merge = 0.0;
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const GameTree g = random_game(seed, opt);
    LookaheadSpec spec;
    spec.h = random_heuristic(g, seed);
    std::vector<double> values;
    for (auto t : {TieBreak::kFavorable, TieBreak::kStatic, TieBreak::kAdversarial}) {
      spec.tie = t;
      const auto sol = solve_singleton_lookahead1(g, spec);
      EXPECT_NEAR(expected_utility(g, sol.plan_r, sol.plan_l, Player::kRational), sol.value_r, 1e-7);
      values.push_back(sol.value_r);
    }
    EXPECT_NEAR(values[0], values[1], 1e-7) << "seed " << seed;
    EXPECT_NEAR(values[1], values[2], 1e-7) << "seed " << seed;
  }
}

TEST(SingletonLookahead1, Preconditions) {
  const GameTree g = build_kuhn(1);
  LookaheadSpec spec;
  spec.h = constant_h(g);
  EXPECT_THROW(solve_singleton_lookahead1(g, spec), PreconditionViolated);
  const GameTree t = tie_game();
  spec.h = constant_h(t);
  spec.k = 2;
  EXPECT_THROW(solve_singleton_lookahead1(t, spec), PreconditionViolated);
}

}  // namespace
