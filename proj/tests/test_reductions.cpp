#include <gtest/gtest.h>

#include <cstdint>
#include <vector>

#include "lla/commitment.hpp"
#include "lla/reductions.hpp"

namespace {

using namespace lla;

// Brute force on raw clauses of any length, independent of the 3-CNF lift.
bool raw_satisfiable(int n, const std::vector<std::vector<Literal>>& clauses) {
  for (std::uint64_t a = 0; a < (std::uint64_t{1} << n); ++a) {
    bool all = true;
    for (const auto& c : clauses) {
      bool any = false;
      for (const auto& l : c) any = any || l.satisfied_by((a >> l.var) & 1);
      all = all && any;
    }
    if (all) return true;
  }
  return false;
}

double value_of(const Gadget& gd) { return solve_commitment(gd.game, gd.spec).value_r; }

CnfInstance single_clause() {
  CnfInstance cnf;
  cnf.num_vars = 3;
  cnf.clauses.push_back({Literal{0, true}, Literal{1, false}, Literal{2, true}});
  return cnf;
}

TEST(Dimacs, RoundTrip) {
  const auto cnf = random_3sat(4, 5, 7);
  const auto back = parse_dimacs(to_dimacs(cnf));
  EXPECT_EQ(back.num_vars, cnf.num_vars);
  EXPECT_EQ(back.clauses, cnf.clauses);
}

TEST(Dimacs, CommentsAndMultiLineClauses) {
  const auto cnf = parse_dimacs("c hello\np cnf 3 2\n1 -2\n 3 0 -1 2 3 0\n");
  ASSERT_EQ(cnf.num_clauses(), 2);
  EXPECT_EQ(cnf.clauses[0][1], (Literal{1, false}));
  EXPECT_EQ(cnf.clauses[1][0], (Literal{0, false}));
}

TEST(Dimacs, Rejects) {
  EXPECT_THROW(parse_dimacs("1 2 3 0\n"), CnfError);
  EXPECT_THROW(parse_dimacs("p cnf 2 1\n1 3 0\n"), CnfError);
  EXPECT_THROW(parse_dimacs("p cnf 2 2\n1 2 0\n"), CnfError);
  EXPECT_THROW(parse_dimacs("p cnf 2 1\n1 x 0\n"), CnfError);
  EXPECT_THROW(parse_dimacs("p dnf 2 1\n1 2 0\n"), CnfError);
}

TEST(Dimacs, PaddingKeepsSatisfiability) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(4));
    std::vector<std::vector<Literal>> clauses(1 + rng.below(5));
    for (auto& c : clauses) {
      c.resize(1 + rng.below(5));
      for (auto& l : c) l = {static_cast<int>(rng.below(n)), rng.below(2) == 0};
    }
    const auto cnf = to_3cnf(n, clauses);
    EXPECT_EQ(satisfiable(cnf), raw_satisfiable(n, clauses)) << "trial " << trial;
  }
}

TEST(Dimacs, UnitClausesArePaddedWithDummies) {
  // (x) and (-x) each become four clauses over two dummies.
  const auto cnf = parse_dimacs("p cnf 1 2\n1 0\n-1 0\n");
  EXPECT_EQ(cnf.num_vars, 5);
  EXPECT_EQ(cnf.num_clauses(), 8);
  EXPECT_FALSE(satisfiable(cnf));
  EXPECT_EQ(max_satisfied(cnf), 7);
}

TEST(BruteForce, Counts) {
  CnfInstance cnf;
  cnf.num_vars = 3;
  const Literal x{0, true}, nx{0, false}, y{1, true}, z{2, true};
  cnf.clauses = {{x, x, x}, {nx, nx, nx}, {y, y, y}, {z, z, z}};
  EXPECT_EQ(max_satisfied(cnf), 3);
  EXPECT_EQ(count_satisfied(cnf, 0b111), 3);
  EXPECT_EQ(count_satisfied(cnf, 0b000), 1);
  EXPECT_FALSE(satisfiable(cnf));
  EXPECT_TRUE(satisfiable(single_clause()));
}

TEST(Gadgets, ShapesMatchTheConstruction) {
  const auto cnf = random_3sat(9, 5, 6);
  for (int kind : {1, 2, 3}) {
    const Gadget gd = make_gadget(kind, cnf);
    EXPECT_TRUE(validate(gd.game).empty()) << "gadget " << kind;
    EXPECT_NO_THROW(gd.spec.check(gd.game));
    const auto& linfo = gd.game.infosets_of(Player::kLimited);
    EXPECT_EQ(static_cast<int>(linfo.size()), cnf.num_clauses());
    for (int i : linfo) {
      const InfoSet& info = gd.game.infoset(i);
      EXPECT_EQ(info.nodes.size(), kind == 3 ? 6u : 1u);
      EXPECT_EQ(info.num_actions(), kind == 1 ? 3 : 4);
    }
  }
  EXPECT_EQ(make_gadget(1, cnf).spec.tie, TieBreak::kFavorable);
  EXPECT_EQ(make_gadget(2, cnf).spec.k, 2);
  EXPECT_THROW(make_gadget(4, cnf), CnfError);
}

TEST(Gadgets, FavorableSingleClauseIsWorthOne) {
  EXPECT_NEAR(value_of(gadget_favorable(single_clause())), 1.0, 1e-6);
}

TEST(Gadgets, FavorableRepeatedLiteralsGiveThreeQuarters) {
  CnfInstance cnf;
  cnf.num_vars = 3;
  const Literal x{0, true}, nx{0, false}, y{1, true}, z{2, true};
  cnf.clauses = {{x, x, x}, {nx, nx, nx}, {y, y, y}, {z, z, z}};
  EXPECT_NEAR(value_of(gadget_favorable(cnf)), 0.75, 1e-6);
}

TEST(Gadgets, FavorableContradictionUsesPaddedOptimum) {
  const auto cnf = parse_dimacs("p cnf 1 2\n1 0\n-1 0\n");
  EXPECT_NEAR(value_of(gadget_favorable(cnf)) * cnf.num_clauses(), max_satisfied(cnf), 1e-6);
}

TEST(Gadgets, SingleClauseLookahead2NeverPicksUnsat) {
  const Gadget gd = gadget_lookahead2(single_clause());
  const auto res = solve_commitment(gd.game, gd.spec);
  EXPECT_NEAR(res.value_r, 1.0, 1e-6);
  const int i = gd.game.infosets_of(Player::kLimited)[0];
  EXPECT_EQ(gd.game.infoset(i).labels[0], "unsat");
  EXPECT_NEAR(res.plan_l[gd.game.infoset(i).seq(0)], 0.0, 1e-9);
}

TEST(Gadgets, RandomRoundTrip) {
  int sat = 0, unsat = 0;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const int n = 3 + static_cast<int>(seed % 4);
    const int m = 4 + static_cast<int>(seed % 5);
    const auto cnf = random_3sat(seed, n, m);
    const bool is_sat = satisfiable(cnf);
    (is_sat ? sat : unsat)++;
    EXPECT_NEAR(value_of(gadget_favorable(cnf)) * m, max_satisfied(cnf), 1e-6) << "seed " << seed;
    EXPECT_EQ(std::abs(value_of(gadget_lookahead2(cnf)) - 1.0) <= 1e-6, is_sat) << "seed " << seed;
    EXPECT_EQ(std::abs(value_of(gadget_infosets(cnf)) - 1.0) <= 1e-6, is_sat) << "seed " << seed;
  }
  EXPECT_GT(sat, 0);
}

TEST(Gadgets, UnsatisfiableInstancesStayBelowOne) {
  // All eight sign patterns over three variables.
  CnfInstance cnf;
  cnf.num_vars = 3;
  for (int mask = 0; mask < 8; ++mask) {
    cnf.clauses.push_back({Literal{0, (mask & 1) != 0}, Literal{1, (mask & 2) != 0},
                           Literal{2, (mask & 4) != 0}});
  }
  ASSERT_FALSE(satisfiable(cnf));
  EXPECT_NEAR(value_of(gadget_favorable(cnf)), 7.0 / 8.0, 1e-6);
  EXPECT_LT(value_of(gadget_lookahead2(cnf)), 1.0 - 1e-6);
  EXPECT_LT(value_of(gadget_infosets(cnf)), 1.0 - 1e-6);
}

TEST(Gadgets, InfosetGadgetRejectsRepeatedVariables) {
  CnfInstance cnf;
  cnf.num_vars = 2;
  cnf.clauses.push_back({Literal{0, true}, Literal{0, false}, Literal{1, true}});
  EXPECT_THROW(gadget_infosets(cnf), CnfError);
}

TEST(Gadgets, InfosetThresholdIsTwoThirds) {
  const Gadget gd = gadget_infosets(single_clause());
  const GameTree& g = gd.game;
  const LookaheadModel model(g, 1);
  const int clause = g.infosets_of(Player::kLimited)[0];
  // r infosets in order x1, x2, x3; x1 true with probability p, the others
  // set against the clause.
  for (double p : {0.6, 2.0 / 3.0, 0.7}) {
    std::vector<double> beh(g.num_sequences(Player::kRational), 0.0);
    const auto& rinfo = g.infosets_of(Player::kRational);
    beh[g.infoset(rinfo[0]).seq(0)] = p;
    beh[g.infoset(rinfo[0]).seq(1)] = 1.0 - p;
    beh[g.infoset(rinfo[1]).seq(0)] = 1.0;  // x2 appears negated
    beh[g.infoset(rinfo[2]).seq(1)] = 1.0;
    const auto x = from_behavioral(g, Player::kRational, beh);
    const auto as = optimal_actions(g, model, gd.spec.h, x, clause);
    // Unnormalized: reach of the clause infoset is 1, unsat pays 2/3 and x1
    // pays 3 on (x1, true), reached with probability p / 3.
    EXPECT_NEAR(as.values[0], 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(as.values[1], p, 1e-12);
    EXPECT_EQ(as.optimal[1], p >= 2.0 / 3.0 - 1e-12) << p;
    EXPECT_EQ(as.optimal[0], p <= 2.0 / 3.0 + 1e-12) << p;
  }
}

}  // namespace
