#pragma once

// The limited-lookahead opponent: frontiers below each (infoset, action),
// optimal action sets under optimal hypothetical play, and the easy case of
// singleton infosets with lookahead 1.

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "lla/equilibrium.hpp"
#include "lla/game.hpp"
#include "lla/optim/branch_and_bound.hpp"
#include "lla/sequence_form.hpp"

namespace lla {

enum class TieBreak { kFavorable, kStatic, kAdversarial };

inline const char* to_string(TieBreak t) {
  switch (t) {
    case TieBreak::kFavorable: return "fav";
    case TieBreak::kStatic: return "static";
    case TieBreak::kAdversarial: return "adv";
  }
  return "?";
}

inline TieBreak parse_tie_break(const std::string& s) {
  if (s == "fav" || s == "favorable") return TieBreak::kFavorable;
  if (s == "static") return TieBreak::kStatic;
  if (s == "adv" || s == "adversarial") return TieBreak::kAdversarial;
  throw std::invalid_argument("unknown tie-break '" + s + "' (fav, static or adv)");
}

class PreconditionViolated : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct LookaheadSpec {
  int k = 1;
  EvaluationFunction h;
  TieBreak tie = TieBreak::kAdversarial;
  // Static preference per infoset id, most preferred action first. Infosets
  // without an entry prefer actions in declaration order.
  std::vector<std::vector<int>> static_order;

  std::vector<int> order(int infoset, int num_actions) const {
    if (infoset < static_cast<int>(static_order.size()) && !static_order[infoset].empty()) {
      return static_order[infoset];
    }
    std::vector<int> o(num_actions);
    for (int a = 0; a < num_actions; ++a) o[a] = a;
    return o;
  }

  // Position of `action` in the static order (0 = most preferred).
  int rank(int infoset, int num_actions, int action) const {
    const auto o = order(infoset, num_actions);
    return static_cast<int>(std::find(o.begin(), o.end(), action) - o.begin());
  }

  void check(const GameTree& g) const {
    if (k < 1) throw PreconditionViolated("lookahead depth must be at least 1");
    if (h.size() != g.num_nodes()) {
      throw PreconditionViolated("evaluation function has " + std::to_string(h.size()) +
                                 " values for " + std::to_string(g.num_nodes()) + " nodes");
    }
    for (std::size_t i = 0; i < static_order.size(); ++i) {
      if (static_order[i].empty()) continue;
      const int n = g.infoset(static_cast<int>(i)).num_actions();
      auto o = static_order[i];
      std::sort(o.begin(), o.end());
      for (int a = 0; a < n; ++a) {
        if (static_cast<int>(o.size()) != n || o[a] != a) {
          throw PreconditionViolated("static order of infoset " + std::to_string(i) +
                                     " is not a permutation of its actions");
        }
      }
    }
  }
};

// ---------------------------------------------------------------------------
// Frontiers

struct FrontierNode {
  int node = -1;
  int origin = -1;      // the node of I this one descends from
  double chance = 0.0;  // Nature's reach probability from the root
  int seq_r = 0;        // r's sequence on the path
  int wseq = 0;         // window sequence it hangs under; 0 is (I, a) itself
};

// An l-infoset met strictly inside the lookahead window. Its window
// sequences are first_wseq .. first_wseq + num_actions - 1.
struct WindowInfoset {
  int infoset = -1;
  int parent_wseq = 0;
  int first_wseq = 0;
  int num_actions = 0;
};

struct Frontier {
  int infoset = -1;
  int action = -1;
  int k = 1;
  std::vector<FrontierNode> nodes;
  std::vector<WindowInfoset> window;  // parents before children
  std::vector<int> wseq_owner{-1};    // window infoset of each window sequence
  std::vector<std::vector<int>> wseq_children{{}};

  int num_wseqs() const { return static_cast<int>(wseq_owner.size()); }
  int wseq_action(int w) const { return w - window[wseq_owner[w]].first_wseq; }
  // Number of pure hypothetical plays.
  long num_plays() const {
    long n = 1;
    for (const auto& w : window) n *= w.num_actions;
    return n;
  }
};

inline Frontier build_frontier(const GameTree& g, int infoset, int action, int k) {
  const InfoSet& info = g.infoset(infoset);
  if (info.owner != Player::kLimited) throw PreconditionViolated("frontier of a non-l infoset");
  if (action < 0 || action >= info.num_actions()) throw PreconditionViolated("no such action");
  if (k < 1) throw PreconditionViolated("lookahead depth must be at least 1");
  Frontier f;
  f.infoset = infoset;
  f.action = action;
  f.k = k;
  std::map<int, int> window_of;  // game infoset -> window index
  auto walk = [&](auto&& self, int s, int origin, int depth, int wseq) -> void {
    const Node& n = g.node(s);
    if (n.terminal || depth == k) {
      f.nodes.push_back({s, origin, g.chance_reach(s), g.seq_to(Player::kRational, s), wseq});
      return;
    }
    if (n.owner == Player::kLimited) {
      auto it = window_of.find(n.infoset);
      if (it == window_of.end()) {
        WindowInfoset w;
        w.infoset = n.infoset;
        w.parent_wseq = wseq;
        w.first_wseq = f.num_wseqs();
        w.num_actions = n.num_actions();
        const int idx = static_cast<int>(f.window.size());
        f.window.push_back(w);
        f.wseq_children[wseq].push_back(idx);
        for (int b = 0; b < w.num_actions; ++b) {
          f.wseq_owner.push_back(idx);
          f.wseq_children.emplace_back();
        }
        it = window_of.emplace(n.infoset, idx).first;
      }
      const int first = f.window[it->second].first_wseq;  // f.window grows below
      for (int b = 0; b < n.num_actions(); ++b) {
        self(self, n.children[b], origin, depth + 1, first + b);
      }
      return;
    }
    for (int c : n.children) self(self, c, origin, depth + 1, wseq);
  };
  for (int s : info.nodes) walk(walk, g.node(s).children[action], s, 1, 0);
  return f;
}

// All frontiers of player l for one lookahead depth, indexed [infoset][action].
class LookaheadModel {
 public:
  LookaheadModel() = default;
  LookaheadModel(const GameTree& g, int k) : k_(k), frontiers_(g.num_infosets()) {
    for (int i : g.infosets_of(Player::kLimited)) {
      for (int a = 0; a < g.infoset(i).num_actions(); ++a) {
        frontiers_[i].push_back(build_frontier(g, i, a, k));
      }
    }
  }
  int k() const { return k_; }
  const Frontier& frontier(int infoset, int action) const { return frontiers_[infoset][action]; }

 private:
  int k_ = 1;
  std::vector<std::vector<Frontier>> frontiers_;
};

struct WindowValue {
  double value = 0.0;
  std::vector<int> play;  // chosen action per window infoset
};

inline constexpr double kTieTol = 1e-9;

// Value of (I, a) under r's plan: sum over frontier nodes of
// pi_0 * x * h, maximized over pure hypothetical plays. Ties between
// hypothetical actions go to the first one.
inline WindowValue frontier_value(const Frontier& f, const EvaluationFunction& h,
                                  const RealizationPlan& x) {
  std::vector<double> val(f.num_wseqs(), 0.0);
  for (const auto& fn : f.nodes) val[fn.wseq] += fn.chance * x[fn.seq_r] * h[fn.node];
  WindowValue out;
  out.play.assign(f.window.size(), 0);
  // Children come after parents, so a reverse sweep folds subtrees upward.
  for (int w = static_cast<int>(f.window.size()) - 1; w >= 0; --w) {
    const WindowInfoset& wi = f.window[w];
    int best = 0;
    for (int b = 1; b < wi.num_actions; ++b) {
      if (val[wi.first_wseq + b] > val[wi.first_wseq + best] + kTieTol) best = b;
    }
    out.play[w] = best;
    val[wi.parent_wseq] += val[wi.first_wseq + best];
  }
  out.value = val[0];
  return out;
}

// Value of (I, a) under a given hypothetical play.
inline double frontier_value(const Frontier& f, const EvaluationFunction& h,
                             const RealizationPlan& x, const std::vector<int>& play) {
  std::vector<bool> on(f.num_wseqs(), false);
  on[0] = true;
  for (std::size_t w = 0; w < f.window.size(); ++w) {
    on[f.window[w].first_wseq + play[w]] = on[f.window[w].parent_wseq];
  }
  double v = 0.0;
  for (const auto& fn : f.nodes) {
    if (on[fn.wseq]) v += fn.chance * x[fn.seq_r] * h[fn.node];
  }
  return v;
}

// ---------------------------------------------------------------------------
// Optimal action sets

struct ActionSet {
  int infoset = -1;
  double reach = 0.0;  // pi_{-l}(I); the values below are not divided by it
  std::vector<double> values;
  std::vector<bool> optimal;
  std::vector<std::vector<int>> play;  // optimal hypothetical play per action

  bool reachable() const { return reach > 0.0; }
  std::vector<int> actions() const {
    std::vector<int> out;
    for (std::size_t a = 0; a < optimal.size(); ++a) {
      if (optimal[a]) out.push_back(static_cast<int>(a));
    }
    return out;
  }
};

inline double reach_excluding_l(const GameTree& g, const RealizationPlan& x, int infoset) {
  double r = 0.0;
  for (int s : g.infoset(infoset).nodes) r += g.chance_reach(s) * x[g.seq_to(Player::kRational, s)];
  return r;
}

// A*_I for r's plan x. Unreachable infosets keep every action.
inline ActionSet optimal_actions(const GameTree& g, const LookaheadModel& model,
                                 const EvaluationFunction& h, const RealizationPlan& x,
                                 int infoset, double tol = kTieTol) {
  const InfoSet& info = g.infoset(infoset);
  ActionSet out;
  out.infoset = infoset;
  out.reach = reach_excluding_l(g, x, infoset);
  double best = -optim::kInf;
  for (int a = 0; a < info.num_actions(); ++a) {
    auto wv = frontier_value(model.frontier(infoset, a), h, x);
    best = std::max(best, wv.value);
    out.values.push_back(wv.value);
    out.play.push_back(std::move(wv.play));
  }
  for (double v : out.values) out.optimal.push_back(!out.reachable() || v >= best - tol);
  return out;
}

inline ActionSet optimal_actions(const GameTree& g, const LookaheadSpec& spec,
                                 const RealizationPlan& x, int infoset) {
  return optimal_actions(g, LookaheadModel(g, spec.k), spec.h, x, infoset);
}

// ---------------------------------------------------------------------------
// Singleton infosets, lookahead 1

struct SingletonSolution {
  RealizationPlan plan_l;
  RealizationPlan plan_r;
  double value_r = 0.0;
};

namespace detail {

// Best joint payoff to r when l is a pure plan restricted to `allowed`:
// max over x and pure y of sum pi_0 u_r x y, with per-pair caps
// w <= W x and w <= W y.
inline SingletonSolution favorable_within(const GameTree& g, const std::vector<bool>& allowed) {
  using optim::Relation;
  optim::OptProblem p;
  p.sense = optim::Sense::kMaximize;
  const double shift = g.shift();
  const auto x = add_plan_variables(p, g, Player::kRational, "x");
  const int nl = g.num_sequences(Player::kLimited);
  std::vector<int> y(nl, -1);
  for (int q = 1; q < nl; ++q) {
    y[q] = allowed[q] ? p.add_binary("y" + std::to_string(q))
                      : p.add_variable("y" + std::to_string(q), 0.0, 0.0);
  }
  for (int i : g.infosets_of(Player::kLimited)) {
    const InfoSet& info = g.infoset(i);
    std::vector<optim::Term> terms;
    for (int a = 0; a < info.num_actions(); ++a) terms.push_back({y[info.seq(a)], 1.0});
    double rhs = 1.0;
    if (info.parent_seq != 0) {
      terms.push_back({y[info.parent_seq], -1.0});
      rhs = 0.0;
    }
    p.add_constraint("yflow" + std::to_string(i), std::move(terms), Relation::kEqual, rhs);
  }
  for (const auto& [key, w] : payoff_matrix(g, Player::kRational, shift)) {
    const auto [sr, sl] = key;
    const int r = p.add_variable("w" + std::to_string(sr) + "_" + std::to_string(sl), 0.0, w, 1.0);
    p.add_constraint("capx", {{r, 1.0}, {x[sr], -w}}, Relation::kLessEqual, 0.0);
    if (sl != 0) p.add_constraint("capy", {{r, 1.0}, {y[sl], -w}}, Relation::kLessEqual, 0.0);
  }
  const auto sol = optim::solve_mip(p);
  if (!sol.optimal()) throw SolverFailure(std::string("favorable MIP: ") + optim::to_string(sol.status));
  SingletonSolution out;
  out.plan_r = RealizationPlan{Player::kRational, {}};
  for (int v : x) out.plan_r.values.push_back(std::clamp(sol.primal[v], 0.0, 1.0));
  out.plan_l = RealizationPlan{Player::kLimited, std::vector<double>(nl, 0.0)};
  out.plan_l[0] = 1.0;
  for (int q = 1; q < nl; ++q) out.plan_l[q] = std::round(sol.primal[y[q]]);
  out.value_r = expected_utility(g, out.plan_r, out.plan_l, Player::kRational);
  return out;
}

}  // namespace detail

// With singleton l-infosets and lookahead 1 the value of an action does not
// depend on r's plan (beyond reachability), so A*_s is fixed up front.
// Static: l plays the preferred argmax and r best-responds. Adversarial: l is
// restricted to A*_s and the restricted zero-sum game is solved by LP.
// Favorable: r and l jointly maximize u_r within A*_s, a small MIP because r
// may lack information.
inline SingletonSolution solve_singleton_lookahead1(const GameTree& g, const LookaheadSpec& spec) {
  spec.check(g);
  if (spec.k != 1) throw PreconditionViolated("lookahead must be 1, got " + std::to_string(spec.k));
  std::vector<bool> allowed(g.num_sequences(Player::kLimited), false);
  allowed[0] = true;
  std::vector<int> chosen(g.num_infosets(), -1);
  for (int i : g.infosets_of(Player::kLimited)) {
    const InfoSet& info = g.infoset(i);
    if (info.nodes.size() != 1) {
      throw PreconditionViolated("infoset " + std::to_string(i) + " has " +
                                 std::to_string(info.nodes.size()) + " nodes");
    }
    const Node& n = g.node(info.nodes[0]);
    double best = -optim::kInf;
    for (int c : n.children) best = std::max(best, spec.h[c]);
    for (int a = 0; a < n.num_actions(); ++a) {
      allowed[info.seq(a)] = spec.h[n.children[a]] >= best - kTieTol;
    }
    for (int a : spec.order(i, info.num_actions())) {
      if (allowed[info.seq(a)]) {
        chosen[i] = a;
        break;
      }
    }
  }
  SingletonSolution out;
  switch (spec.tie) {
    case TieBreak::kStatic: {
      std::vector<double> beh(g.num_sequences(Player::kLimited), 0.0);
      for (int i : g.infosets_of(Player::kLimited)) beh[g.infoset(i).seq(chosen[i])] = 1.0;
      out.plan_l = from_behavioral(g, Player::kLimited, beh);
      auto br = best_response(g, out.plan_l);
      out.plan_r = std::move(br.plan);
      out.value_r = br.value;
      return out;
    }
    case TieBreak::kAdversarial: {
      const auto eq = detail::maxmin_lp(g, allowed, {});
      out.plan_r = eq.plan_r;
      out.plan_l = eq.plan_l;
      out.value_r = eq.game_value;
      return out;
    }
    case TieBreak::kFavorable: return detail::favorable_within(g, allowed);
  }
  return out;
}

}  // namespace lla
