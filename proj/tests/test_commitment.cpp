#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "lla/commitment.hpp"
#include "lla/equilibrium.hpp"
#include "lla/optim/lp_format.hpp"
#include "lla/poker.hpp"
#include "lla/random_game.hpp"

namespace {

using namespace lla;

constexpr double kKuhnValue = -1.0 / 18.0;

LookaheadSpec exact_spec(const GameTree& g, int k, TieBreak tie) {
  LookaheadSpec spec;
  spec.k = k;
  spec.tie = tie;
  spec.h = make_heuristic_exact(g, solve_zero_sum(g));
  return spec;
}

LookaheadSpec random_spec(const GameTree& g, std::uint64_t seed, TieBreak tie) {
  LookaheadSpec spec;
  spec.k = 1 + static_cast<int>(seed % 3);
  spec.tie = tie;
  spec.h = random_heuristic(g, seed);
  return spec;
}

// Every action l plays with positive probability must be h-optimal at
// plan_r; in static mode every more preferred action must trail by eps.
void expect_incentives(const GameTree& g, const LookaheadSpec& spec, const CommitmentResult& r,
                       double eps) {
  const LookaheadModel model(g, spec.k);
  for (int i : g.infosets_of(Player::kLimited)) {
    const InfoSet& info = g.infoset(i);
    if (r.plan_l[info.parent_seq] <= 1e-9) continue;
    const ActionSet as = optimal_actions(g, model, spec.h, r.plan_r, i);
    if (!as.reachable()) continue;
    double best = -1e300;
    for (double v : as.values) best = std::max(best, v);
    for (int a = 0; a < info.num_actions(); ++a) {
      if (r.plan_l[info.seq(a)] <= 1e-9) continue;
      EXPECT_GE(as.values[a] - best, -1e-6) << "infoset " << i << " action " << a;
      if (spec.tie != TieBreak::kStatic) continue;
      for (int b = 0; b < info.num_actions(); ++b) {
        if (spec.rank(i, info.num_actions(), b) < spec.rank(i, info.num_actions(), a)) {
          EXPECT_GE(as.values[a] - as.values[b], eps - 1e-6) << "infoset " << i;
        }
      }
    }
  }
}

// r: L leads to an l decision between x (r gets 1) and y (r gets 3) that l
// values equally; R ends with 2 for r.
GameTree tie_game() {
  GameBuilder b;
  const int r = b.add_node(Player::kRational);
  const int li = b.add_infoset(Player::kLimited);
  const int s = b.add_node(Player::kLimited, li);
  b.add_action(r, "L", s);
  b.add_action(r, "R", b.add_leaf(2, 0));
  b.add_action(s, "x", b.add_leaf(1, 0));
  b.add_action(s, "y", b.add_leaf(3, 0));
  return b.build();
}

LookaheadSpec leaf_spec(const GameTree& g, int k, TieBreak tie) {
  LookaheadSpec spec;
  spec.k = k;
  spec.tie = tie;
  spec.h.values.resize(g.num_nodes());
  for (int s = 0; s < g.num_nodes(); ++s) spec.h.values[s] = g.node(s).terminal ? g.node(s).ul : 0.0;
  return spec;
}

TEST(Commitment, OneActionPerInfosetIsBestResponse) {
  // l moves first with a single action, then r picks among three leaves.
  GameBuilder b;
  const int l = b.add_node(Player::kLimited, b.add_infoset(Player::kLimited));
  const int r = b.add_node(Player::kRational);
  b.add_action(l, "only", r);
  b.add_action(r, "a", b.add_leaf(1, 5));
  b.add_action(r, "b", b.add_leaf(4, -2));
  b.add_action(r, "c", b.add_leaf(-1, 0));
  const GameTree g = b.build();
  for (TieBreak t : {TieBreak::kAdversarial, TieBreak::kStatic, TieBreak::kFavorable}) {
    const auto res = solve_commitment(g, leaf_spec(g, 1, t));
    ASSERT_TRUE(res.ok()) << to_string(t);
    EXPECT_NEAR(res.value_r, 4.0, 1e-9) << to_string(t);
  }
}

TEST(Commitment, KuhnLookaheadTwoReachesGameValue) {
  const GameTree g = build_kuhn(1);
  const auto spec = exact_spec(g, 2, TieBreak::kAdversarial);
  const auto res = solve_adversarial(g, spec);
  ASSERT_TRUE(res.ok());
  EXPECT_NEAR(res.value_r, kKuhnValue, 1e-4);
  EXPECT_NEAR(res.objective, res.value_r, 1e-6);
  expect_incentives(g, spec, res, 1e-6);
}

TEST(Commitment, KuhnLookaheadOneIsExploitable) {
  const GameTree g = build_kuhn(1);
  const auto spec = exact_spec(g, 1, TieBreak::kAdversarial);
  const auto res = solve_adversarial(g, spec);
  ASSERT_TRUE(res.ok());
  EXPECT_GT(res.value_r, kKuhnValue + 0.01);
  EXPECT_NEAR(res.objective, res.value_r, 1e-6);
  expect_incentives(g, spec, res, 1e-6);
}

TEST(Commitment, KuhnLookaheadOneMatchesOracle) {
  const GameTree g = build_kuhn(1);
  const auto spec = exact_spec(g, 1, TieBreak::kAdversarial);
  const auto mip = solve_adversarial(g, spec);
  const auto oracle = enumerate_structures_oracle(g, spec);
  ASSERT_TRUE(oracle.ok());
  EXPECT_EQ(oracle.structures, 729);  // 3 nonempty subsets at each of 6 infosets
  EXPECT_NEAR(mip.value_r, oracle.value_r, 1e-6);
  EXPECT_LE(oracle.max_duality_gap, 1e-6);
}

TEST(Commitment, OracleMatchesMipOnRandomGames) {
  int compared = 0;
  for (std::uint64_t seed = 100; seed < 115; ++seed) {
    const GameTree g = random_game(seed);
    const auto spec = random_spec(g, seed, TieBreak::kAdversarial);
    const auto mip = solve_adversarial(g, spec);
    const auto oracle = enumerate_structures_oracle(g, spec);
    ASSERT_TRUE(mip.ok()) << "seed " << seed;
    ASSERT_TRUE(oracle.ok()) << "seed " << seed;
    EXPECT_NEAR(mip.value_r, oracle.value_r, 1e-5) << "seed " << seed;
    EXPECT_NEAR(mip.objective, mip.value_r, 1e-6) << "seed " << seed;
    EXPECT_LE(oracle.max_duality_gap, 1e-6) << "seed " << seed;
    expect_incentives(g, spec, mip, 1e-6);
    ++compared;
  }
  EXPECT_EQ(compared, 15);
}

TEST(Commitment, TieBreakOrderingOnRandomGames) {
  for (std::uint64_t seed = 200; seed < 212; ++seed) {
    const GameTree g = random_game(seed);
    auto spec = random_spec(g, seed, TieBreak::kAdversarial);
    const double adv = solve_commitment(g, spec).value_r;
    spec.tie = TieBreak::kStatic;
    const auto st = solve_commitment(g, spec);
    spec.tie = TieBreak::kFavorable;
    const auto fav = solve_commitment(g, spec);
    ASSERT_TRUE(st.ok() && fav.ok()) << "seed " << seed;
    EXPECT_LE(adv, st.value_r + 1e-6) << "seed " << seed;
    EXPECT_LE(st.value_r, fav.value_r + 1e-6) << "seed " << seed;
    EXPECT_NEAR(st.objective, st.value_r, 1e-6);
    EXPECT_NEAR(fav.objective, fav.value_r, 1e-6);
    spec.tie = TieBreak::kStatic;
    expect_incentives(g, spec, st, 1e-6);
    spec.tie = TieBreak::kFavorable;
    expect_incentives(g, spec, fav, 1e-6);
  }
}

TEST(Commitment, RoundingHeuristicDoesNotChangeValues) {
  for (std::uint64_t seed = 400; seed < 410; ++seed) {
    const GameTree g = random_game(seed);
    for (TieBreak t : {TieBreak::kAdversarial, TieBreak::kStatic, TieBreak::kFavorable}) {
      const auto spec = random_spec(g, seed, t);
      CommitOptions off, every;
      off.heuristic_every = 0;
      every.heuristic_every = 1;
      const auto a = solve_commitment(g, spec, off);
      const auto b = solve_commitment(g, spec, every);
      ASSERT_TRUE(a.ok() && b.ok());
      EXPECT_NEAR(a.value_r, b.value_r, 1e-6) << "seed " << seed << " " << to_string(t);
    }
  }
}

TEST(Commitment, TieBreakOrderingOnKuhn) {
  const GameTree g = build_kuhn(1);
  auto spec = exact_spec(g, 1, TieBreak::kAdversarial);
  const double adv = solve_commitment(g, spec).value_r;
  spec.tie = TieBreak::kStatic;
  const double st = solve_commitment(g, spec).value_r;
  spec.tie = TieBreak::kFavorable;
  const double fav = solve_commitment(g, spec).value_r;
  EXPECT_LE(adv, st + 1e-6);
  EXPECT_LE(st, fav + 1e-6);
}

TEST(Commitment, StaticOrderDecidesUnbreakableTie) {
  const GameTree g = tie_game();
  EXPECT_NEAR(solve_commitment(g, leaf_spec(g, 1, TieBreak::kFavorable)).value_r, 3.0, 1e-9);
  EXPECT_NEAR(solve_commitment(g, leaf_spec(g, 1, TieBreak::kAdversarial)).value_r, 2.0, 1e-9);
  auto spec = leaf_spec(g, 1, TieBreak::kStatic);
  // Declaration order prefers x, so r takes R.
  EXPECT_NEAR(solve_commitment(g, spec).value_r, 2.0, 1e-9);
  spec.static_order.assign(g.num_infosets(), {});
  spec.static_order[g.infosets_of(Player::kLimited)[0]] = {1, 0};
  EXPECT_NEAR(solve_commitment(g, spec).value_r, 3.0, 1e-9);
}

TEST(Commitment, StaticMatchesFavorableWhenTieCanBeBroken) {
  // Both r actions lead into one l infoset. l prefers x after L and y after
  // R; r wants y, so it leans toward R.
  GameBuilder b;
  const int r = b.add_node(Player::kRational);
  const int li = b.add_infoset(Player::kLimited);
  const int s1 = b.add_node(Player::kLimited, li);
  const int s2 = b.add_node(Player::kLimited, li);
  b.add_action(r, "L", s1);
  b.add_action(r, "R", s2);
  b.add_action(s1, "x", b.add_leaf(0, 1));
  b.add_action(s1, "y", b.add_leaf(3, 0));
  b.add_action(s2, "x", b.add_leaf(0, 0));
  b.add_action(s2, "y", b.add_leaf(3, 1));
  const GameTree g = b.build();
  const double fav = solve_commitment(g, leaf_spec(g, 1, TieBreak::kFavorable)).value_r;
  const double st = solve_commitment(g, leaf_spec(g, 1, TieBreak::kStatic)).value_r;
  EXPECT_NEAR(fav, 3.0, 1e-9);
  EXPECT_NEAR(st, fav, 1e-6);
}

TEST(Commitment, EpsilonDoesNotMoveKuhnResults) {
  const GameTree g = build_kuhn(1);
  for (int k : {1, 2}) {
    for (TieBreak t : {TieBreak::kAdversarial, TieBreak::kStatic, TieBreak::kFavorable}) {
      const auto spec = exact_spec(g, k, t);
      std::vector<double> values;
      for (double eps : {1e-5, 1e-6, 5e-7, 1e-7}) {
        CommitOptions opt;
        opt.eps = eps;
        const auto res = solve_commitment(g, spec, opt);
        ASSERT_TRUE(res.ok());
        expect_incentives(g, spec, res, eps);
        values.push_back(res.value_r);
      }
      for (double v : values) EXPECT_NEAR(v, values[0], 1e-4) << "k " << k << " " << to_string(t);
    }
  }
}

TEST(Commitment, WrongTieModeIsRejected) {
  const GameTree g = tie_game();
  const auto spec = leaf_spec(g, 1, TieBreak::kFavorable);
  EXPECT_THROW(solve_adversarial(g, spec), PreconditionViolated);
  EXPECT_THROW(solve_static(g, spec), PreconditionViolated);
  EXPECT_NO_THROW(solve_favorable(g, spec));
}

TEST(Commitment, ExportedModelSolvesTheSame) {
  const GameTree g = build_kuhn(1);
  const auto spec = exact_spec(g, 1, TieBreak::kAdversarial);
  const auto m = build_commitment_mip(g, spec);
  const auto back = optim::parse_lp(optim::export_lp(m.problem));
  EXPECT_EQ(back.num_vars(), m.problem.num_vars());
  EXPECT_EQ(back.num_rows(), m.problem.num_rows());
  const auto a = optim::solve_mip(m.problem);
  const auto b2 = optim::solve_mip(back);
  ASSERT_TRUE(a.optimal() && b2.optimal());
  EXPECT_NEAR(a.objective, b2.objective, 1e-6);
}

TEST(FixedStructure, KuhnEquilibriumStructureGivesGameValue) {
  const GameTree g = build_kuhn(1);
  const auto eq = solve_zero_sum(g);
  LookaheadSpec spec;
  spec.k = 2;
  spec.h = make_heuristic_exact(g, eq);
  const LookaheadModel model(g, 2);
  const auto s = structure_at(g, model, spec.h, eq.plan_r);
  // The equilibrium of l only uses actions that are optimal at k = 2.
  for (int i : g.infosets_of(Player::kLimited)) {
    for (int a = 0; a < g.infoset(i).num_actions(); ++a) {
      EXPECT_TRUE(eq.plan_l[g.infoset(i).seq(a)] <= 1e-9 || s.active[i][a]);
    }
  }
  const auto sol = solve_fixed_structure(g, spec, s, model);
  ASSERT_TRUE(sol.feasible());
  EXPECT_NEAR(sol.value_r, kKuhnValue, 1e-6);
  EXPECT_LE(sol.duality_gap, 1e-6);
}

TEST(FixedStructure, DominatedActionIsInfeasible) {
  GameBuilder b;
  const int l = b.add_node(Player::kLimited, b.add_infoset(Player::kLimited));
  b.add_action(l, "bad", b.add_leaf(5, 0));
  b.add_action(l, "good", b.add_leaf(0, 1));
  const GameTree g = b.build();
  const auto spec = leaf_spec(g, 1, TieBreak::kAdversarial);
  const int i = g.infosets_of(Player::kLimited)[0];
  InducedStructure s = InducedStructure::empty_for(g);
  s.play[i].assign(2, {});
  s.active[i] = {true, false};
  EXPECT_FALSE(solve_fixed_structure(g, spec, s).feasible());
  s.active[i] = {true, true};
  EXPECT_FALSE(solve_fixed_structure(g, spec, s).feasible());
  s.active[i] = {false, true};
  const auto ok = solve_fixed_structure(g, spec, s);
  ASSERT_TRUE(ok.feasible());
  EXPECT_NEAR(ok.value_r, 0.0, 1e-9);
}

TEST(FixedStructure, SingletonStructureIsBestResponse) {
  // l moves before r sees anything, so A* does not depend on x.
  GameBuilder b;
  const int l = b.add_node(Player::kLimited, b.add_infoset(Player::kLimited));
  const int ri = b.add_infoset(Player::kRational);
  const int r1 = b.add_node(Player::kRational, ri);
  const int r2 = b.add_node(Player::kRational, ri);
  b.add_action(l, "u", r1);
  b.add_action(l, "d", r2);
  b.add_action(r1, "a", b.add_leaf(2, 1));
  b.add_action(r1, "b", b.add_leaf(-1, 0));
  b.add_action(r2, "a", b.add_leaf(0, 0));
  b.add_action(r2, "b", b.add_leaf(1, 0));
  const GameTree g = b.build();
  LookaheadSpec spec;
  spec.k = 1;
  spec.h.values.assign(g.num_nodes(), 0.0);
  spec.h.values[r1] = 1.0;
  const int i = g.infosets_of(Player::kLimited)[0];
  InducedStructure s = InducedStructure::empty_for(g);
  s.active[i] = {true, false};
  s.play[i].assign(2, {});
  const auto sol = solve_fixed_structure(g, spec, s);
  ASSERT_TRUE(sol.feasible());
  EXPECT_NEAR(sol.plan_l[g.infoset(i).seq(0)], 1.0, 1e-9);
  EXPECT_NEAR(sol.plan_l[g.infoset(i).seq(1)], 0.0, 1e-9);
  EXPECT_NEAR(sol.value_r, best_response(g, sol.plan_l).value, 1e-9);
  EXPECT_NEAR(sol.value_r, 2.0, 1e-9);
}

TEST(FixedStructure, DualPlanIsBestResponseWithinStructure) {
  int checked = 0;
  for (std::uint64_t seed = 300; seed < 330; ++seed) {
    const GameTree g = random_game(seed);
    const auto spec = random_spec(g, seed, TieBreak::kAdversarial);
    const LookaheadModel model(g, spec.k);
    const auto s = structure_at(g, model, spec.h, random_plan(g, Player::kRational, seed));
    const auto sol = solve_fixed_structure(g, spec, s, model);
    if (!sol.feasible()) continue;
    ++checked;
    const auto active = s.active_sequences(g);
    EXPECT_LE(plan_violation(g, sol.plan_l), 1e-7) << "seed " << seed;
    for (int q = 0; q < g.num_sequences(Player::kLimited); ++q) {
      EXPECT_TRUE(active[q] || std::abs(sol.plan_l[q]) <= 1e-7) << "seed " << seed;
    }
    EXPECT_NEAR(expected_utility(g, sol.plan_r, sol.plan_l, Player::kRational), sol.value_r, 1e-6);
    const auto worst = restricted_response(g, sol.plan_r, Player::kRational, true, active);
    EXPECT_GE(worst.value, sol.value_r - 1e-6) << "seed " << seed;
    EXPECT_LE(sol.duality_gap, 1e-6) << "seed " << seed;
  }
  EXPECT_GE(checked, 20);
}

TEST(Oracle, TinyGameHasThreeStructures) {
  const GameTree g = tie_game();
  const auto spec = leaf_spec(g, 1, TieBreak::kAdversarial);
  const auto oracle = enumerate_structures_oracle(g, spec);
  EXPECT_EQ(oracle.structures, 3);
  EXPECT_NEAR(oracle.value_r, solve_adversarial(g, spec).value_r, 1e-6);
}

TEST(Oracle, CapIsEnforced) {
  const GameTree g = build_kuhn(1);
  const auto spec = exact_spec(g, 1, TieBreak::kAdversarial);
  CommitOptions opt;
  opt.oracle_cap = 100;
  EXPECT_THROW(enumerate_structures_oracle(g, spec, opt), CapExceeded);
}

TEST(SizeBound, NonzerosStayUnderBound) {
  for (const GameTree& g : {build_kuhn(1), build_kuhn(2), build_kj(1), build_kj(2)}) {
    for (int k : {1, 2, 3}) {
      const auto sb = mip_size_bound(g, k);
      EXPECT_GT(sb.nonzeros, 0u);
      EXPECT_LE(static_cast<long>(sb.nonzeros), sb.bound) << "k " << k;
    }
  }
}

TEST(SizeBound, KjTermRegression) {
  // Frozen from a hand count: 8 l infosets of 2 actions below the deal have
  // subtrees of height 2 or more, and the widest node is the 4-way deal.
  EXPECT_EQ(mip_size_bound(build_kj(1), 1).term, 224);
  EXPECT_EQ(mip_size_bound(build_kj(1), 2).term, 608);
}

TEST(SizeBound, SingleActionChainDegenerates) {
  GameBuilder b;
  const int l1 = b.add_node(Player::kLimited, b.add_infoset(Player::kLimited));
  const int r = b.add_node(Player::kRational);
  const int l2 = b.add_node(Player::kLimited, b.add_infoset(Player::kLimited));
  b.add_action(l1, "a", r);
  b.add_action(r, "b", l2);
  b.add_action(l2, "c", b.add_leaf(1, 1));
  const GameTree g = b.build();
  EXPECT_EQ(mip_size_bound(g, 1).term, 2);
}

}  // namespace
