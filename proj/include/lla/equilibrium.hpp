#pragma once

// Zero-sum equilibria, best responses and node-evaluation heuristics.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "lla/game.hpp"
#include "lla/optim/simplex.hpp"
#include "lla/rng.hpp"
#include "lla/sequence_form.hpp"

namespace lla {

class NotZeroSum : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SolverFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EquilibriumProfile {
  RealizationPlan plan_r;
  RealizationPlan plan_l;
  double game_value = 0.0;  // to player r
};

struct BestResponse {
  RealizationPlan plan;
  double value = 0.0;
};

// Pure plan of `me` against `opponent` that maximizes (or, with `minimize`,
// minimizes) the expected utility of `payoff_of`, by backward induction over
// my sequences. A nonempty `allowed` restricts me to the flagged sequences.
// Ties go to the first action. `value` is the optimized expected utility.
inline BestResponse restricted_response(const GameTree& g, const RealizationPlan& opponent,
                                        Player payoff_of, bool minimize,
                                        const std::vector<bool>& allowed = {}) {
  const Player me = other(opponent.owner);
  const int nseq = g.num_sequences(me);
  const double sign = minimize ? -1.0 : 1.0;
  // Direct payoff of each of my sequences against the opponent's plan.
  std::vector<double> seq_value(nseq, 0.0);
  for (int z : g.leaves()) {
    const double w = g.chance_reach(z) * opponent[g.seq_to(opponent.owner, z)];
    if (w == 0.0) continue;
    seq_value[g.seq_to(me, z)] += sign * w * g.node(z).utility(payoff_of);
  }
  const auto& mine = g.infosets_of(me);
  std::vector<int> choice(g.num_infosets(), 0);
  // Children infosets have larger ids than their parents, so a reverse sweep
  // sees every subtree before its parent sequence.
  for (auto it = mine.rbegin(); it != mine.rend(); ++it) {
    const InfoSet& info = g.infoset(*it);
    int best = -1;
    for (int a = 0; a < info.num_actions(); ++a) {
      if (!allowed.empty() && !allowed[info.seq(a)]) continue;
      if (best < 0 || seq_value[info.seq(a)] > seq_value[info.seq(best)] + 1e-12) best = a;
    }
    if (best < 0) best = 0;  // below a forbidden sequence; never reached
    choice[*it] = best;
    seq_value[info.parent_seq] += seq_value[info.seq(best)];
  }
  BestResponse br;
  br.plan = RealizationPlan{me, std::vector<double>(nseq, 0.0)};
  br.plan[0] = 1.0;
  for (int i : mine) {
    const InfoSet& info = g.infoset(i);
    br.plan[info.seq(choice[i])] = br.plan[info.parent_seq];
  }
  br.value = sign * seq_value[0];
  return br;
}

// Pure best response of the other player to `opponent`.
inline BestResponse best_response(const GameTree& g, const RealizationPlan& opponent) {
  return restricted_response(g, opponent, other(opponent.owner), false);
}

// Sum of both players' best-response gains against the profile.
inline double exploitability(const GameTree& g, const RealizationPlan& x, const RealizationPlan& y) {
  const double ur = expected_utility(g, x, y, Player::kRational);
  const double ul = expected_utility(g, x, y, Player::kLimited);
  const RealizationPlan& xr = x.owner == Player::kRational ? x : y;
  const RealizationPlan& yl = x.owner == Player::kRational ? y : x;
  return (best_response(g, yl).value - ur) + (best_response(g, xr).value - ul);
}

// Common value u_r + u_l of a constant-sum game; throws otherwise.
inline double constant_sum(const GameTree& g, double tol = 1e-9) {
  if (g.leaves().empty()) return 0.0;
  const Node& first = g.node(g.leaves().front());
  const double c = first.ur + first.ul;
  for (int z : g.leaves()) {
    const Node& n = g.node(z);
    if (std::abs(n.ur + n.ul - c) > tol) {
      throw NotZeroSum("leaf " + std::to_string(z) + " has utility sum " +
                       std::to_string(n.ur + n.ul) + ", expected " + std::to_string(c));
    }
  }
  return c;
}

namespace detail {

// Sequence-form LP: max over x of min over y of x^T A y, written with the
// dual of player l's best-response problem. Player l's plan is read from the
// duals of the per-sequence rows. When `allowed` is nonempty, l may only use
// sequences flagged there (the rows of the others are dropped, so their
// realization is 0). Only u_r is read, so general-sum games get the
// pessimistic value for r.
inline EquilibriumProfile maxmin_lp(const GameTree& g, const std::vector<bool>& allowed,
                                    const optim::SimplexOptions& opt) {
  using optim::Relation;
  using optim::Term;
  optim::OptProblem p;
  p.sense = optim::Sense::kMaximize;
  const auto x = add_plan_variables(p, g, Player::kRational, "x");
  const auto& linfo = g.infosets_of(Player::kLimited);
  std::vector<int> qvar(g.num_infosets(), -1);
  const int qroot = p.add_variable("qroot", -optim::kInf, optim::kInf, 1.0);
  for (int i : linfo) qvar[i] = p.add_variable("q" + std::to_string(i), -optim::kInf, optim::kInf);
  const auto payoff = payoff_by_l_sequence(g, Player::kRational);
  const int nseq = g.num_sequences(Player::kLimited);
  std::vector<int> seq_row(nseq, -1);
  for (int s = 0; s < nseq; ++s) {
    if (!allowed.empty() && !allowed[s]) continue;
    std::vector<Term> terms;
    if (s == 0) {
      terms.push_back({qroot, 1.0});
    } else {
      terms.push_back({qvar[g.sequence(Player::kLimited, s).infoset], 1.0});
    }
    for (int child : g.child_infosets(Player::kLimited, s)) terms.push_back({qvar[child], -1.0});
    for (const auto& [sr, w] : payoff[s]) terms.push_back({x[sr], -w});
    seq_row[s] = p.add_constraint("seq" + std::to_string(s), std::move(terms),
                                  Relation::kLessEqual, 0.0);
  }
  const auto sol = optim::solve_lp(p, opt);
  if (!sol.optimal()) {
    throw SolverFailure(std::string("zero-sum LP: ") + optim::to_string(sol.status));
  }
  EquilibriumProfile out;
  out.plan_r = RealizationPlan{Player::kRational, {}};
  for (int v : x) out.plan_r.values.push_back(std::max(0.0, sol.primal[v]));
  out.plan_l = RealizationPlan{Player::kLimited, {}};
  for (int r : seq_row) out.plan_l.values.push_back(r < 0 ? 0.0 : std::max(0.0, sol.dual[r]));
  out.game_value = sol.objective;
  return out;
}

}  // namespace detail

inline EquilibriumProfile solve_zero_sum(const GameTree& g, const optim::SimplexOptions& opt = {}) {
  constant_sum(g);
  return detail::maxmin_lp(g, {}, opt);
}

// ---------------------------------------------------------------------------
// Heuristics

enum class HeuristicModel { kExact, kIndependent, kCumulative, kCustom };

inline const char* to_string(HeuristicModel m) {
  switch (m) {
    case HeuristicModel::kExact: return "exact";
    case HeuristicModel::kIndependent: return "ind";
    case HeuristicModel::kCumulative: return "cum";
    case HeuristicModel::kCustom: return "custom";
  }
  return "?";
}

// Node values h(s). Heuristics derived from a profile also keep the
// probability of each node given its parent, which the cumulative noise model
// needs.
struct EvaluationFunction {
  std::vector<double> values;
  std::vector<double> edge_prob;  // empty for custom heuristics
  HeuristicModel model = HeuristicModel::kCustom;
  double gamma = 0.0;
  std::uint64_t seed = 0;

  double operator[](int s) const { return values[s]; }
  int size() const { return static_cast<int>(values.size()); }
};

inline EvaluationFunction make_heuristic_exact(const GameTree& g, const RealizationPlan& x,
                                               const RealizationPlan& y) {
  const auto bx = to_behavioral(g, x.owner == Player::kRational ? x : y);
  const auto by = to_behavioral(g, x.owner == Player::kRational ? y : x);
  EvaluationFunction h;
  h.model = HeuristicModel::kExact;
  const int n = g.num_nodes();
  h.values.assign(n, 0.0);
  h.edge_prob.assign(n, 1.0);
  for (int s = 1; s < n; ++s) {
    const Node& nd = g.node(s);
    h.edge_prob[s] = action_prob(g, nd.parent, nd.action_index, bx, by);
  }
  for (int s = n - 1; s >= 0; --s) {
    const Node& nd = g.node(s);
    if (nd.terminal) {
      h.values[s] = nd.ul;
      continue;
    }
    double v = 0.0;
    for (int c : nd.children) v += h.edge_prob[c] * h.values[c];
    h.values[s] = v;
  }
  return h;
}

inline EvaluationFunction make_heuristic_exact(const GameTree& g, const EquilibriumProfile& eq) {
  return make_heuristic_exact(g, eq.plan_r, eq.plan_l);
}

// Independent model: Gaussian noise N(0, gamma) on every node, leaves
// included. Cumulative model: leaves exact, each internal node gets the
// weighted average of its (noisy) children plus its own draw.
inline EvaluationFunction make_heuristic_noisy(const GameTree& g, const EvaluationFunction& base,
                                               HeuristicModel model, double gamma,
                                               std::uint64_t seed) {
  if (gamma < 0.0) throw std::invalid_argument("gamma must be non-negative");
  if (model != HeuristicModel::kIndependent && model != HeuristicModel::kCumulative) {
    throw std::invalid_argument("noise model must be independent or cumulative");
  }
  EvaluationFunction h = base;
  h.model = model;
  h.gamma = gamma;
  h.seed = seed;
  if (gamma == 0.0) return h;
  Rng rng(seed);
  const int n = g.num_nodes();
  if (model == HeuristicModel::kIndependent) {
    for (int s = 0; s < n; ++s) h.values[s] += gamma * rng.normal();
    return h;
  }
  if (base.edge_prob.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("cumulative noise needs a profile-derived heuristic");
  }
  std::vector<double> noise(n, 0.0);
  for (int s = 0; s < n; ++s) {
    if (!g.node(s).terminal) noise[s] = gamma * rng.normal();
  }
  for (int s = n - 1; s >= 0; --s) {
    const Node& nd = g.node(s);
    if (nd.terminal) {
      h.values[s] = nd.ul;
      continue;
    }
    double v = 0.0;
    for (int c : nd.children) v += base.edge_prob[c] * h.values[c];
    h.values[s] = v + noise[s];
  }
  return h;
}

}  // namespace lla
