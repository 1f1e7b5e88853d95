#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "lla/equilibrium.hpp"
#include "lla/game.hpp"
#include "lla/poker.hpp"

namespace {

using namespace lla;

// KJ is fair: round one is symmetric and the solver certifies 0 to 1e-17.
constexpr double kKjValueSeat1 = 0.0;

// Every pure plan of player p, by enumerating one action per infoset.
std::vector<RealizationPlan> all_pure_plans(const GameTree& g, Player p) {
  const auto& infos = g.infosets_of(p);
  std::vector<int> choice(infos.size(), 0);
  std::vector<RealizationPlan> out;
  while (true) {
    std::vector<double> beh(g.num_sequences(p), 0.0);
    for (std::size_t k = 0; k < infos.size(); ++k) beh[g.infoset(infos[k]).seq(choice[k])] = 1.0;
    out.push_back(from_behavioral(g, p, beh));
    std::size_t k = 0;
    while (k < infos.size() && ++choice[k] == g.infoset(infos[k]).num_actions()) choice[k++] = 0;
    if (k == infos.size()) break;
  }
  return out;
}

TEST(ZeroSum, KuhnValue) {
  const GameTree g = build_kuhn(1);
  const auto eq = solve_zero_sum(g);
  EXPECT_NEAR(eq.game_value, -1.0 / 18.0, 1e-6);
  EXPECT_LE(plan_violation(g, eq.plan_r), 1e-9);
  EXPECT_LE(plan_violation(g, eq.plan_l), 1e-9);
  // Certificate: neither player gains by deviating.
  EXPECT_NEAR(best_response(g, eq.plan_l).value, eq.game_value, 1e-6);
  EXPECT_NEAR(-best_response(g, eq.plan_r).value, eq.game_value, 1e-6);
  EXPECT_LE(exploitability(g, eq.plan_r, eq.plan_l), 1e-6);
}

TEST(ZeroSum, KuhnSecondSeat) {
  const GameTree g = build_kuhn(2);
  const auto eq = solve_zero_sum(g);
  EXPECT_NEAR(eq.game_value, 1.0 / 18.0, 1e-6);
  EXPECT_LE(exploitability(g, eq.plan_r, eq.plan_l), 1e-6);
}

TEST(ZeroSum, KjValueRegression) {
  const GameTree g = build_kj(1);
  const auto eq = solve_zero_sum(g);
  EXPECT_LE(exploitability(g, eq.plan_r, eq.plan_l), 1e-6);
  EXPECT_NEAR(best_response(g, eq.plan_l).value, eq.game_value, 1e-6);
  // Frozen after the best-response certificate above held.
  EXPECT_NEAR(eq.game_value, kKjValueSeat1, 1e-6);
  const auto eq2 = solve_zero_sum(build_kj(2));
  EXPECT_NEAR(eq2.game_value, -kKjValueSeat1, 1e-6);
}

TEST(ZeroSum, MatchingPennies) {
  GameBuilder b;
  const int r = b.add_node(Player::kRational);
  const int li = b.add_infoset(Player::kLimited);
  const int s1 = b.add_node(Player::kLimited, li);
  const int s2 = b.add_node(Player::kLimited, li);
  b.add_action(r, "H", s1);
  b.add_action(r, "T", s2);
  b.add_action(s1, "H", b.add_leaf(1, -1));
  b.add_action(s1, "T", b.add_leaf(-1, 1));
  b.add_action(s2, "H", b.add_leaf(-1, 1));
  b.add_action(s2, "T", b.add_leaf(1, -1));
  const GameTree g = b.build();
  const auto eq = solve_zero_sum(g);
  EXPECT_NEAR(eq.game_value, 0.0, 1e-9);
  EXPECT_NEAR(eq.plan_r[1], 0.5, 1e-9);
  EXPECT_NEAR(eq.plan_l[1], 0.5, 1e-9);
}

TEST(ZeroSum, SingleLeaf) {
  GameBuilder b;
  b.add_leaf(2.5, -2.5);
  const auto eq = solve_zero_sum(b.build());
  EXPECT_NEAR(eq.game_value, 2.5, 1e-12);
}

TEST(ZeroSum, RejectsGeneralSum) {
  GameBuilder b;
  const int r = b.add_node(Player::kRational);
  b.add_action(r, "a", b.add_leaf(1, 1));
  b.add_action(r, "b", b.add_leaf(0, 0));
  EXPECT_THROW(solve_zero_sum(b.build()), NotZeroSum);
}

TEST(BestResponse, AgainstAlwaysFoldMatchesEnumeration) {
  // r = seat 1 responds to a seat-2 plan that folds to every bet and checks
  // behind otherwise.
  const GameTree g = build_kuhn(1);
  std::vector<double> beh(g.num_sequences(Player::kLimited), 0.0);
  for (int i : g.infosets_of(Player::kLimited)) {
    const InfoSet& info = g.infoset(i);
    beh[info.seq(0)] = 1.0;  // "check" after a check, "fold" after a bet
  }
  const auto y = from_behavioral(g, Player::kLimited, beh);
  const auto br = best_response(g, y);
  double best = -1e9;
  for (const auto& x : all_pure_plans(g, Player::kRational)) {
    best = std::max(best, expected_utility(g, x, y, Player::kRational));
  }
  EXPECT_NEAR(br.value, best, 1e-12);
  EXPECT_NEAR(expected_utility(g, br.plan, y, Player::kRational), br.value, 1e-12);
  // Betting every hand takes the ante every time.
  EXPECT_NEAR(br.value, 1.0, 1e-12);
}

TEST(BestResponse, RandomOpponentsMatchEnumeration) {
  const GameTree g = build_kuhn(2);
  Rng rng(3);
  const auto pure = all_pure_plans(g, Player::kLimited);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> beh(g.num_sequences(Player::kRational), 0.0);
    for (int i : g.infosets_of(Player::kRational)) {
      const double p = rng.uniform();
      beh[g.infoset(i).seq(0)] = p;
      beh[g.infoset(i).seq(1)] = 1.0 - p;
    }
    const auto x = from_behavioral(g, Player::kRational, beh);
    double best = -1e9;
    for (const auto& y : pure) best = std::max(best, expected_utility(g, x, y, Player::kLimited));
    EXPECT_NEAR(best_response(g, x).value, best, 1e-12);
  }
}

TEST(BestResponse, SingleDecisionPicksArgmax) {
  GameBuilder b;
  const int r = b.add_node(Player::kRational);
  b.add_action(r, "a", b.add_leaf(1, 0));
  b.add_action(r, "b", b.add_leaf(3, 0));
  b.add_action(r, "c", b.add_leaf(2, 0));
  const GameTree g = b.build();
  const auto br = best_response(g, RealizationPlan{Player::kLimited, {1.0}});
  EXPECT_EQ(br.value, 3.0);
  EXPECT_EQ(br.plan[2], 1.0);
}

TEST(Heuristic, ExactMatchesDefinition) {
  const GameTree g = build_kuhn(1);
  const auto eq = solve_zero_sum(g);
  const auto h = make_heuristic_exact(g, eq);
  const auto bx = to_behavioral(g, eq.plan_r);
  const auto by = to_behavioral(g, eq.plan_l);
  for (int s = 0; s < g.num_nodes(); ++s) {
    const Node& n = g.node(s);
    if (n.terminal) {
      EXPECT_EQ(h[s], n.ul);
      continue;
    }
    double v = 0.0;
    for (int a = 0; a < n.num_actions(); ++a) v += action_prob(g, s, a, bx, by) * h[n.children[a]];
    EXPECT_NEAR(h[s], v, 1e-9);
  }
  EXPECT_NEAR(h[g.root()], -eq.game_value, 1e-9);
  // The root is a Nature node: a plain average over the six deals.
  double avg = 0.0;
  for (int c : g.node(g.root()).children) avg += h[c] / 6.0;
  EXPECT_NEAR(h[g.root()], avg, 1e-12);
}

TEST(Heuristic, LinearInLimitedUtilities) {
  const GameTree g = build_kuhn(1);
  const auto eq = solve_zero_sum(g);
  const auto h = make_heuristic_exact(g, eq);
  // Rebuild the game with l's utilities scaled by 2.5.
  GameBuilder b;
  std::vector<int> id(g.num_nodes());
  std::vector<int> remap(g.num_infosets());
  for (int i = 0; i < g.num_infosets(); ++i) remap[i] = b.add_infoset(g.infoset(i).owner);
  for (int s = 0; s < g.num_nodes(); ++s) {
    const Node& n = g.node(s);
    id[s] = n.terminal ? b.add_leaf(n.ur, 2.5 * n.ul)
                       : b.add_node(n.owner, n.infoset < 0 ? -1 : remap[n.infoset]);
  }
  for (int s = 0; s < g.num_nodes(); ++s) {
    const Node& n = g.node(s);
    for (int a = 0; a < n.num_actions(); ++a) {
      b.add_action(id[s], n.labels[a], id[n.children[a]],
                   n.owner == Player::kNature ? n.probs[a] : 0.0);
    }
  }
  const GameTree scaled = b.build();
  const auto h2 = make_heuristic_exact(scaled, eq.plan_r, eq.plan_l);
  for (int s = 0; s < g.num_nodes(); ++s) EXPECT_NEAR(h2[s], 2.5 * h[s], 1e-9);
}

TEST(Heuristic, NoiseModels) {
  const GameTree g = build_kj(1);
  const auto eq = solve_zero_sum(g);
  const auto h = make_heuristic_exact(g, eq);
  for (auto model : {HeuristicModel::kIndependent, HeuristicModel::kCumulative}) {
    const auto zero = make_heuristic_noisy(g, h, model, 0.0, 17);
    EXPECT_EQ(zero.values, h.values);
    const auto a = make_heuristic_noisy(g, h, model, 0.5, 17);
    const auto b = make_heuristic_noisy(g, h, model, 0.5, 17);
    EXPECT_EQ(a.values, b.values);
    const auto c = make_heuristic_noisy(g, h, model, 0.5, 18);
    EXPECT_NE(a.values, c.values);
  }
  const auto cum = make_heuristic_noisy(g, h, HeuristicModel::kCumulative, 2.0, 5);
  for (int z : g.leaves()) EXPECT_EQ(cum[z], g.node(z).ul);
}

TEST(Heuristic, IndependentNoiseMoments) {
  const GameTree g = build_kj(1);
  const auto eq = solve_zero_sum(g);
  const auto h = make_heuristic_exact(g, eq);
  double sum = 0.0, sq = 0.0;
  long n = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto noisy = make_heuristic_noisy(g, h, HeuristicModel::kIndependent, 1.0, seed);
    for (int s = 0; s < g.num_nodes(); ++s) {
      const double mu = noisy[s] - h[s];
      sum += mu;
      sq += mu * mu;
      ++n;
    }
  }
  ASSERT_GE(n, 10000);
  const double mean = sum / n;
  const double sd = std::sqrt(sq / n - mean * mean);
  EXPECT_NEAR(mean, 0.0, 0.05);
  EXPECT_NEAR(sd, 1.0, 0.05);
}

}  // namespace
