#pragma once

// Optimal commitment against a limited-lookahead player: MIPs for favorable,
// static and adversarial tie-breaking, the LP for a fixed induced structure,
// and an exhaustive oracle over structures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lla/equilibrium.hpp"
#include "lla/game.hpp"
#include "lla/lookahead.hpp"
#include "lla/optim/branch_and_bound.hpp"
#include "lla/optim/simplex.hpp"
#include "lla/sequence_form.hpp"

namespace lla {

class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommitOptions {
  double eps = 1e-6;
  optim::MipOptions mip;
  optim::SimplexOptions lp;
  long oracle_cap = 1'000'000;
  // The structure rounding heuristic runs at the B&B root and then every
  // n-th node; 0 turns it off.
  long heuristic_every = 256;
};

// Which l actions are optimal at each infoset, and the hypothetical play
// behind each optimal action. Indexed by infoset id; infosets of r and those
// cut off by an inactive parent sequence have empty entries.
struct InducedStructure {
  std::vector<std::vector<bool>> active;
  std::vector<std::vector<std::vector<int>>> play;

  static InducedStructure empty_for(const GameTree& g) {
    InducedStructure s;
    s.active.resize(g.num_infosets());
    s.play.resize(g.num_infosets());
    return s;
  }

  bool reached(int infoset) const { return !active[infoset].empty(); }

  // Flags per l sequence; the empty sequence is always active.
  std::vector<bool> active_sequences(const GameTree& g) const {
    std::vector<bool> out(g.num_sequences(Player::kLimited), false);
    out[0] = true;
    for (int i : g.infosets_of(Player::kLimited)) {
      if (!reached(i)) continue;
      for (int a = 0; a < g.infoset(i).num_actions(); ++a) out[g.infoset(i).seq(a)] = active[i][a];
    }
    return out;
  }

  std::vector<int> actions(int infoset) const {
    std::vector<int> out;
    for (std::size_t a = 0; a < active[infoset].size(); ++a) {
      if (active[infoset][a]) out.push_back(static_cast<int>(a));
    }
    return out;
  }

  // One line per reached infoset: "<id>: label label".
  std::string summary(const GameTree& g) const {
    std::ostringstream os;
    for (int i : g.infosets_of(Player::kLimited)) {
      if (!reached(i)) continue;
      os << i << ":";
      for (int a : actions(i)) os << " " << g.infoset(i).labels[a];
      os << "\n";
    }
    return os.str();
  }

  bool operator==(const InducedStructure&) const = default;
};

// Infosets of l reached when only sequences flagged in `active_seq` are
// played (a parent's flag decides for its children).
inline std::vector<bool> reached_infosets(const GameTree& g, const std::vector<bool>& active_seq) {
  std::vector<bool> reached(g.num_infosets(), false);
  for (int i : g.infosets_of(Player::kLimited)) {
    const int ps = g.infoset(i).parent_seq;
    reached[i] = ps == 0 || (reached[g.sequence(Player::kLimited, ps).infoset] && active_seq[ps]);
  }
  return reached;
}

struct CommitmentResult {
  optim::SolveStatus status = optim::SolveStatus::kInfeasible;
  TieBreak tie = TieBreak::kAdversarial;
  RealizationPlan plan_r;
  // l's response: the pure plan read off the MIP for favorable and static
  // ties, the worst response within the structure for adversarial ties.
  RealizationPlan plan_l;
  InducedStructure induced;
  double value_r = 0.0;    // leaf-wise expected utility of (plan_r, plan_l)
  double objective = 0.0;  // solver objective mapped back to r's utility
  long nodes = 0;
  long pivots = 0;
  double wall_ms = 0.0;
  int rows = 0;
  int cols = 0;
  int binaries = 0;
  std::size_t nonzeros = 0;
  // Oracle only.
  long structures = 0;
  long feasible_structures = 0;
  double max_duality_gap = 0.0;

  bool ok() const {
    return status == optim::SolveStatus::kOptimal || status == optim::SolveStatus::kNodeLimit;
  }
};

namespace detail {

using Expr = std::vector<optim::Term>;

inline Expr concat(Expr a, const Expr& b, double scale = 1.0) {
  for (const auto& t : b) a.push_back({t.var, scale * t.coef});
  return a;
}

// Rows and auxiliary variables that express frontier values as linear
// functions of r's plan. Heuristic values are shifted to be at least 1;
// the shift adds the same multiple of pi_{-l}(I) to every action of I and
// so leaves every comparison intact.
class IncentiveSystem {
 public:
  IncentiveSystem(const GameTree& g, const LookaheadModel& model, const EvaluationFunction& h,
                  optim::OptProblem& p, const std::vector<int>& x)
      : g_(g), model_(model), p_(p), x_(x), hs_(h.values), cap_(g.num_infosets()),
        upper_(g.num_infosets()) {
    const double hmin = *std::min_element(h.values.begin(), h.values.end());
    for (auto& v : hs_) v = v - hmin + 1.0;
    for (int i : g.infosets_of(Player::kLimited)) {
      const int n = g.infoset(i).num_actions();
      cap_[i].assign(n, 0.0);
      upper_[i].resize(n);
      for (int a = 0; a < n; ++a) {
        for (const auto& fn : model.frontier(i, a).nodes) cap_[i][a] += fn.chance * hs_[fn.node];
      }
    }
  }

  // Largest value any action of I can take (x <= 1).
  double cap(int infoset) const {
    return *std::max_element(cap_[infoset].begin(), cap_[infoset].end());
  }

  // Frontier nodes hanging directly under window sequence `wseq`, grouped by
  // r's sequence.
  Expr direct(const Frontier& f, int wseq) const {
    std::map<int, double> by_seq;
    for (const auto& fn : f.nodes) {
      if (fn.wseq == wseq) by_seq[fn.seq_r] += fn.chance * hs_[fn.node];
    }
    Expr e;
    for (const auto& [sr, c] : by_seq) e.push_back({x_[sr], c});
    return e;
  }

  // Upper envelope of the value of (I, a) over hypothetical plays: one
  // variable per window infoset bounded below by each of its actions. Tight
  // wherever the envelope is pushed down.
  const Expr& upper(int i, int a) {
    auto& cached = upper_[i][a];
    if (cached.built) return cached.expr;
    const Frontier& f = model_.frontier(i, a);
    const std::string tag = "I" + std::to_string(i) + "a" + std::to_string(a);
    std::vector<int> vd(f.window.size());
    for (std::size_t w = 0; w < f.window.size(); ++w) {
      vd[w] = p_.add_variable("vd_" + tag + "_" + std::to_string(w), 0.0, cap_[i][a]);
    }
    for (int w = static_cast<int>(f.window.size()) - 1; w >= 0; --w) {
      const WindowInfoset& wi = f.window[w];
      for (int b = 0; b < wi.num_actions; ++b) {
        const int ws = wi.first_wseq + b;
        Expr row{{vd[w], 1.0}};
        row = concat(row, direct(f, ws), -1.0);
        for (int c : f.wseq_children[ws]) row.push_back({vd[c], -1.0});
        p_.add_constraint("vdrow_" + tag + "_" + std::to_string(ws), std::move(row),
                          optim::Relation::kGreaterEqual, 0.0);
      }
    }
    cached.expr = direct(f, 0);
    for (int c : f.wseq_children[0]) cached.expr.push_back({vd[c], 1.0});
    cached.built = true;
    return cached.expr;
  }

  // Value of (I, a) under a hypothetical play chosen by binaries (one per
  // window sequence, returned in `sigma`, -1 for the root). Each frontier
  // group below the root becomes v = C * x * sigma, linearized with three
  // rows.
  Expr chosen(int i, int a, std::vector<int>& sigma) {
    const Frontier& f = model_.frontier(i, a);
    const std::string tag = "I" + std::to_string(i) + "a" + std::to_string(a);
    sigma.assign(f.num_wseqs(), -1);
    for (int ws = 1; ws < f.num_wseqs(); ++ws) {
      sigma[ws] = p_.add_binary("sig_" + tag + "_" + std::to_string(ws));
    }
    for (std::size_t w = 0; w < f.window.size(); ++w) {
      const WindowInfoset& wi = f.window[w];
      Expr row;
      for (int b = 0; b < wi.num_actions; ++b) row.push_back({sigma[wi.first_wseq + b], 1.0});
      double rhs = 1.0;
      if (wi.parent_wseq != 0) {
        row.push_back({sigma[wi.parent_wseq], -1.0});
        rhs = 0.0;
      }
      p_.add_constraint("sigflow_" + tag + "_" + std::to_string(w), std::move(row),
                        optim::Relation::kEqual, rhs);
    }
    Expr e = direct(f, 0);
    for (int ws = 1; ws < f.num_wseqs(); ++ws) {
      for (const auto& t : direct(f, ws)) {
        const double c = t.coef;
        const std::string vn = tag + "_" + std::to_string(ws) + "_" + std::to_string(t.var);
        const int v = p_.add_variable("vi_" + vn, 0.0, c);
        p_.add_constraint("vix_" + vn, {{v, 1.0}, {t.var, -c}}, optim::Relation::kLessEqual, 0.0);
        p_.add_constraint("vis_" + vn, {{v, 1.0}, {sigma[ws], -c}}, optim::Relation::kLessEqual, 0.0);
        p_.add_constraint("vilo_" + vn, {{v, 1.0}, {t.var, -c}, {sigma[ws], -c}},
                          optim::Relation::kGreaterEqual, -c);
        e.push_back({v, 1.0});
      }
    }
    return e;
  }

  // Value of (I, a) under a fixed hypothetical play.
  Expr fixed(int i, int a, const std::vector<int>& play) const {
    const Frontier& f = model_.frontier(i, a);
    std::vector<bool> on(f.num_wseqs(), false);
    on[0] = true;
    for (std::size_t w = 0; w < f.window.size(); ++w) {
      on[f.window[w].first_wseq + play[w]] = on[f.window[w].parent_wseq];
    }
    Expr e;
    for (int ws = 0; ws < f.num_wseqs(); ++ws) {
      if (on[ws]) e = concat(e, direct(f, ws));
    }
    return e;
  }

  bool has_window(int i, int a) const { return !model_.frontier(i, a).window.empty(); }

 private:
  struct Cached {
    bool built = false;
    Expr expr;
  };
  const GameTree& g_;
  const LookaheadModel& model_;
  optim::OptProblem& p_;
  const std::vector<int>& x_;
  std::vector<double> hs_;
  std::vector<std::vector<double>> cap_;
  std::vector<std::vector<Cached>> upper_;
};

// r's shifted utility below each node when Nature averages and both players
// steer toward r's best leaf, ignoring information. No pair of plans does
// better, so it caps every value below a node.
inline std::vector<double> cooperative_value(const GameTree& g, double shift) {
  std::vector<double> v(g.num_nodes(), 0.0);
  for (int s = g.num_nodes() - 1; s >= 0; --s) {
    const Node& n = g.node(s);
    if (n.terminal) {
      v[s] = n.ur + shift;
    } else if (n.owner == Player::kNature) {
      for (int a = 0; a < n.num_actions(); ++a) v[s] += n.probs[a] * v[n.children[a]];
    } else {
      for (int c : n.children) v[s] = std::max(v[s], v[c]);
    }
  }
  return v;
}

// Largest chance-weighted value r can collect below each l infoset.
inline std::vector<double> subtree_mass(const GameTree& g, double shift) {
  const auto v = cooperative_value(g, shift);
  std::vector<double> mass(g.num_infosets(), 0.0);
  for (int i : g.infosets_of(Player::kLimited)) {
    for (int s : g.infoset(i).nodes) mass[i] += g.chance_reach(s) * v[s];
  }
  return mass;
}

inline RealizationPlan read_plan(Player who, const std::vector<int>& vars,
                                 const std::vector<double>& primal) {
  RealizationPlan out{who, {}};
  for (int v : vars) out.values.push_back(std::clamp(primal[v], 0.0, 1.0));
  return out;
}

}  // namespace detail

// The MIP for spec.tie with its variable maps.
struct CommitmentModel {
  optim::OptProblem problem;
  TieBreak tie = TieBreak::kAdversarial;
  std::vector<int> x;                             // r's plan
  std::vector<int> l_seq;                         // w (adv) or y (fav, static); -1 for the root
  std::vector<std::vector<std::vector<int>>> sigma;  // [infoset][action][window sequence]
  double shift = 0.0;                             // objective - shift = r's utility
  LookaheadModel lookahead;
};

inline CommitmentModel build_commitment_mip(const GameTree& g, const LookaheadSpec& spec,
                                            const CommitOptions& opt = {}) {
  using optim::Relation;
  spec.check(g);
  if (!(opt.eps > 0.0 && opt.eps < 0.5)) throw std::invalid_argument("eps must lie in (0, 0.5)");
  CommitmentModel m;
  m.tie = spec.tie;
  m.shift = g.shift();
  auto& p = m.problem;
  p.sense = optim::Sense::kMaximize;
  p.eps_strict = opt.eps;
  m.x = add_plan_variables(p, g, Player::kRational, "x");
  m.lookahead = LookaheadModel(g, spec.k);
  detail::IncentiveSystem inc(g, m.lookahead, spec.h, p, m.x);
  const int nl = g.num_sequences(Player::kLimited);
  const auto& linfo = g.infosets_of(Player::kLimited);
  m.l_seq.assign(nl, -1);
  const char* lname = spec.tie == TieBreak::kAdversarial ? "w" : "y";
  for (int q = 1; q < nl; ++q) m.l_seq[q] = p.add_binary(lname + std::to_string(q));
  m.sigma.resize(g.num_infosets());

  // Sequence rows over the l binaries: at least one active action below an
  // active parent (adversarial), exactly one chosen action (favorable/static).
  for (int i : linfo) {
    const InfoSet& info = g.infoset(i);
    detail::Expr row;
    for (int a = 0; a < info.num_actions(); ++a) row.push_back({m.l_seq[info.seq(a)], 1.0});
    double rhs = 1.0;
    if (info.parent_seq != 0) {
      row.push_back({m.l_seq[info.parent_seq], -1.0});
      rhs = 0.0;
    }
    const Relation rel = spec.tie == TieBreak::kAdversarial ? Relation::kGreaterEqual : Relation::kEqual;
    p.add_constraint(std::string(lname) + "flow" + std::to_string(i), std::move(row), rel, rhs);
  }

  if (spec.tie == TieBreak::kAdversarial) {
    // Dual of l's best response inside the active structure: q_I is the
    // worst-case value below I, and rows of inactive sequences are relaxed
    // by the largest value q_I can take.
    const auto mass = detail::subtree_mass(g, m.shift);
    const double root_mass = detail::cooperative_value(g, m.shift)[g.root()];
    std::vector<int> q(g.num_infosets(), -1);
    const int qroot = p.add_variable("qroot", 0.0, root_mass, 1.0);
    for (int i : linfo) q[i] = p.add_variable("q" + std::to_string(i), 0.0, mass[i]);
    const auto payoff = payoff_by_l_sequence(g, Player::kRational, m.shift);
    for (int s = 0; s < nl; ++s) {
      detail::Expr row;
      double big = 0.0;
      if (s == 0) {
        row.push_back({qroot, 1.0});
      } else {
        const int i = g.sequence(Player::kLimited, s).infoset;
        row.push_back({q[i], 1.0});
        big = mass[i];
        row.push_back({m.l_seq[s], big});
      }
      for (int c : g.child_infosets(Player::kLimited, s)) row.push_back({q[c], -1.0});
      for (const auto& [sr, w] : payoff[s]) row.push_back({m.x[sr], -w});
      p.add_constraint("dual" + std::to_string(s), std::move(row), Relation::kLessEqual, big);
    }
    for (int i : linfo) {
      const InfoSet& info = g.infoset(i);
      const int n = info.num_actions();
      const double cap = inc.cap(i);
      const double big = cap + 1.0;
      const std::string tag = "I" + std::to_string(i);
      // Dmax >= D(a') for every inactive a'; it may drop to -1 when all are active.
      const int dmax = p.add_variable("Dmax_" + tag, -1.0, cap);
      const int eq = p.add_variable("E_" + tag, 0.0, cap);
      m.sigma[i].resize(n);
      for (int a = 0; a < n; ++a) {
        const int w = m.l_seq[info.seq(a)];
        const std::string ta = tag + "a" + std::to_string(a);
        detail::Expr dm{{dmax, 1.0}, {w, big}};
        p.add_constraint("Dmax_" + ta, detail::concat(dm, inc.upper(i, a), -1.0),
                         Relation::kGreaterEqual, 0.0);
        const auto v = inc.chosen(i, a, m.sigma[i][a]);
        // Active actions beat every inactive one by eps.
        p.add_constraint("H_" + ta, detail::concat({{dmax, -1.0}, {w, -big}}, v),
                         Relation::kGreaterEqual, -big, true);
        // Active actions share one value (a pair of inequalities).
        p.add_constraint("Gup_" + ta, detail::concat({{eq, -1.0}, {w, cap}}, v),
                         Relation::kLessEqual, cap);
        p.add_constraint("Glo_" + ta, detail::concat({{eq, -1.0}, {w, -cap}}, v),
                         Relation::kGreaterEqual, -cap);
        // The hypothetical play of an active action is optimal.
        if (inc.has_window(i, a)) {
          p.add_constraint("self_" + ta,
                           detail::concat(detail::concat({{w, -cap}}, v), inc.upper(i, a), -1.0),
                           Relation::kGreaterEqual, -cap);
        }
      }
    }
    return m;
  }

  // Favorable and static: r_z style caps on each (seq_r, seq_l) payoff block.
  detail::Expr total;
  for (const auto& [key, w] : payoff_matrix(g, Player::kRational, m.shift)) {
    const auto [sr, sl] = key;
    const std::string tag = std::to_string(sr) + "_" + std::to_string(sl);
    const int r = p.add_variable("r" + tag, 0.0, w, 1.0);
    total.push_back({r, 1.0});
    p.add_constraint("rx" + tag, {{r, 1.0}, {m.x[sr], -w}}, Relation::kLessEqual, 0.0);
    if (sl != 0) p.add_constraint("ry" + tag, {{r, 1.0}, {m.l_seq[sl], -w}}, Relation::kLessEqual, 0.0);
  }
  p.add_constraint("cooperative", std::move(total), Relation::kLessEqual,
                   detail::cooperative_value(g, m.shift)[g.root()]);
  for (int i : linfo) {
    const InfoSet& info = g.infoset(i);
    const int n = info.num_actions();
    const double big = inc.cap(i) + 1.0;
    m.sigma[i].resize(n);
    std::vector<detail::Expr> v(n);
    for (int a = 0; a < n; ++a) v[a] = inc.chosen(i, a, m.sigma[i][a]);
    for (int a = 0; a < n; ++a) {
      const int y = m.l_seq[info.seq(a)];
      for (int b = 0; b < n; ++b) {
        if (b == a) continue;
        const bool strict = spec.tie == TieBreak::kStatic &&
                            spec.rank(i, n, b) < spec.rank(i, n, a);
        detail::Expr row = detail::concat(detail::concat({{y, -big}}, v[a]), inc.upper(i, b), -1.0);
        p.add_constraint("inc_I" + std::to_string(i) + "a" + std::to_string(a) + "b" + std::to_string(b),
                         std::move(row), Relation::kGreaterEqual, -big, strict);
      }
    }
  }
  return m;
}

// The structure that r's plan x induces: A*_I(x) and its optimal plays at
// every infoset reached through optimal actions.
inline InducedStructure structure_at(const GameTree& g, const LookaheadModel& model,
                                     const EvaluationFunction& h, const RealizationPlan& x) {
  InducedStructure s = InducedStructure::empty_for(g);
  std::vector<bool> on(g.num_sequences(Player::kLimited), false);
  on[0] = true;
  for (int i : g.infosets_of(Player::kLimited)) {
    const InfoSet& info = g.infoset(i);
    if (!on[info.parent_seq]) continue;
    const ActionSet as = optimal_actions(g, model, h, x, i);
    s.active[i] = as.optimal;
    s.play[i] = as.play;
    for (int a = 0; a < info.num_actions(); ++a) on[info.seq(a)] = as.optimal[a];
  }
  return s;
}

namespace detail {

// A MIP point that plays structure s: active flags (adversarial) or l's
// pick inside s (favorable: best for r at x; static: most preferred), with
// the hypothetical plays of s. Only the binary entries are set.
inline std::vector<double> structure_point(const GameTree& g, const CommitmentModel& m,
                                           const LookaheadSpec& spec, const InducedStructure& s,
                                           const RealizationPlan& x) {
  std::vector<double> point(m.problem.num_vars(), 0.0);
  std::vector<bool> on = s.active_sequences(g);
  if (m.tie == TieBreak::kFavorable) {
    const auto pick = restricted_response(g, x, Player::kRational, false, on).plan;
    for (std::size_t q = 0; q < on.size(); ++q) on[q] = pick[q] > 0.5;
  } else if (m.tie == TieBreak::kStatic) {
    std::vector<bool> pick(on.size(), false);
    pick[0] = true;
    for (int i : g.infosets_of(Player::kLimited)) {
      const InfoSet& info = g.infoset(i);
      if (!pick[info.parent_seq] || !s.reached(i)) continue;
      for (int a : spec.order(i, info.num_actions())) {
        if (s.active[i][a]) {
          pick[info.seq(a)] = true;
          break;
        }
      }
    }
    on = pick;
  }
  for (std::size_t q = 1; q < on.size(); ++q) point[m.l_seq[q]] = on[q] ? 1.0 : 0.0;
  for (int i : g.infosets_of(Player::kLimited)) {
    for (std::size_t a = 0; a < m.sigma[i].size(); ++a) {
      const auto& sig = m.sigma[i][a];
      const Frontier& f = m.lookahead.frontier(i, static_cast<int>(a));
      std::vector<int> play(f.window.size(), 0);
      if (s.reached(i)) play = s.play[i][a];
      std::vector<double> val(f.num_wseqs(), 0.0);
      val[0] = 1.0;
      for (std::size_t w = 0; w < f.window.size(); ++w) {
        val[f.window[w].first_wseq + play[w]] = val[f.window[w].parent_wseq];
      }
      for (int ws = 1; ws < f.num_wseqs(); ++ws) point[sig[ws]] = val[ws];
    }
  }
  return point;
}

inline InducedStructure read_structure(const GameTree& g, const CommitmentModel& m,
                                       const std::vector<double>& primal) {
  std::vector<bool> on(g.num_sequences(Player::kLimited), false);
  on[0] = true;
  for (std::size_t q = 1; q < on.size(); ++q) on[q] = primal[m.l_seq[q]] > 0.5;
  const auto reached = reached_infosets(g, on);
  InducedStructure s = InducedStructure::empty_for(g);
  for (int i : g.infosets_of(Player::kLimited)) {
    if (!reached[i]) continue;
    const InfoSet& info = g.infoset(i);
    s.active[i].assign(info.num_actions(), false);
    s.play[i].resize(info.num_actions());
    for (int a = 0; a < info.num_actions(); ++a) {
      if (!on[info.seq(a)]) continue;
      s.active[i][a] = true;
      const auto& sig = m.sigma[i][a];
      const Frontier& f = m.lookahead.frontier(i, a);
      std::vector<int> play(f.window.size(), 0);
      for (std::size_t w = 0; w < f.window.size(); ++w) {
        for (int b = 0; b < f.window[w].num_actions; ++b) {
          if (primal[sig[f.window[w].first_wseq + b]] > 0.5) play[w] = b;
        }
      }
      s.play[i][a] = play;
    }
  }
  return s;
}

}  // namespace detail

// Solves the MIP for spec.tie. A node-limit stop returns the best incumbent
// with status kNodeLimit.
inline CommitmentResult solve_commitment(const GameTree& g, const LookaheadSpec& spec,
                                         const CommitOptions& opt = {}) {
  const auto start = std::chrono::steady_clock::now();
  const CommitmentModel m = build_commitment_mip(g, spec, opt);
  CommitmentResult out;
  out.tie = spec.tie;
  out.rows = m.problem.num_rows();
  out.cols = m.problem.num_vars();
  for (const auto& v : m.problem.variables()) out.binaries += v.kind == optim::VarKind::kBinary;
  out.nonzeros = m.problem.nonzeros();
  optim::MipOptions mo = opt.mip;
  mo.heuristic_every = opt.heuristic_every;
  if (!mo.heuristic && opt.heuristic_every > 0) {
    // Round through the structure the LP's r plan induces.
    mo.heuristic = [&](const std::vector<double>& primal) {
      const auto x = detail::read_plan(Player::kRational, m.x, primal);
      return detail::structure_point(g, m, spec, structure_at(g, m.lookahead, spec.h, x), x);
    };
  }
  const auto sol = optim::solve_mip(m.problem, mo);
  out.status = sol.status;
  out.nodes = sol.nodes;
  out.pivots = sol.pivots;
  const bool have = sol.status == optim::SolveStatus::kOptimal ||
                    (sol.status == optim::SolveStatus::kNodeLimit && !sol.primal.empty());
  if (have) {
    out.plan_r = detail::read_plan(Player::kRational, m.x, sol.primal);
    out.induced = detail::read_structure(g, m, sol.primal);
    out.objective = sol.objective - m.shift;
    if (spec.tie == TieBreak::kAdversarial) {
      out.plan_l = restricted_response(g, out.plan_r, Player::kRational, true,
                                       out.induced.active_sequences(g))
                       .plan;
    } else {
      std::vector<int> y = m.l_seq;
      y.erase(y.begin());
      out.plan_l = RealizationPlan{Player::kLimited, {1.0}};
      for (int v : y) out.plan_l.values.push_back(std::round(sol.primal[v]));
    }
    out.value_r = expected_utility(g, out.plan_r, out.plan_l, Player::kRational);
  } else if (sol.status == optim::SolveStatus::kNodeLimit) {
    out.status = optim::SolveStatus::kNodeLimit;
    out.value_r = out.objective = std::nan("");
  }
  out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

namespace detail {
inline void require_tie(const LookaheadSpec& spec, TieBreak t) {
  if (spec.tie != t) {
    throw PreconditionViolated(std::string("spec asks for ") + to_string(spec.tie) +
                               " ties, solver handles " + to_string(t));
  }
}
}  // namespace detail

inline CommitmentResult solve_favorable(const GameTree& g, const LookaheadSpec& spec,
                                        const CommitOptions& opt = {}) {
  detail::require_tie(spec, TieBreak::kFavorable);
  return solve_commitment(g, spec, opt);
}

inline CommitmentResult solve_static(const GameTree& g, const LookaheadSpec& spec,
                                     const CommitOptions& opt = {}) {
  detail::require_tie(spec, TieBreak::kStatic);
  return solve_commitment(g, spec, opt);
}

inline CommitmentResult solve_adversarial(const GameTree& g, const LookaheadSpec& spec,
                                          const CommitOptions& opt = {}) {
  detail::require_tie(spec, TieBreak::kAdversarial);
  return solve_commitment(g, spec, opt);
}

// ---------------------------------------------------------------------------
// Fixed structure

struct FixedStructureSolution {
  optim::SolveStatus status = optim::SolveStatus::kInfeasible;
  RealizationPlan plan_r;
  RealizationPlan plan_l;
  double value_r = 0.0;
  double duality_gap = 0.0;

  bool feasible() const { return status == optim::SolveStatus::kOptimal; }
};

// Checks that reached infosets (and only those) carry a nonempty active set
// with one hypothetical play per active action.
inline void check_structure(const GameTree& g, const LookaheadModel& model,
                            const InducedStructure& s) {
  if (s.active.size() != static_cast<std::size_t>(g.num_infosets()) || s.play.size() != s.active.size()) {
    throw PreconditionViolated("structure does not match the game's infosets");
  }
  std::vector<bool> on(g.num_sequences(Player::kLimited), false);
  on[0] = true;
  for (int i : g.infosets_of(Player::kLimited)) {
    for (std::size_t a = 0; a < s.active[i].size(); ++a) on[g.infoset(i).seq(static_cast<int>(a))] = s.active[i][a];
  }
  const auto reached = reached_infosets(g, on);
  for (int i : g.infosets_of(Player::kLimited)) {
    const std::string where = "infoset " + std::to_string(i);
    if (!reached[i]) {
      if (s.reached(i)) throw PreconditionViolated(where + " is cut off but has actions");
      continue;
    }
    const InfoSet& info = g.infoset(i);
    if (static_cast<int>(s.active[i].size()) != info.num_actions() ||
        static_cast<int>(s.play[i].size()) != info.num_actions()) {
      throw PreconditionViolated(where + " needs one flag and play per action");
    }
    if (s.actions(i).empty()) throw PreconditionViolated(where + " is reached but has no active action");
    for (int a : s.actions(i)) {
      const Frontier& f = model.frontier(i, a);
      if (s.play[i][a].size() != f.window.size()) {
        throw PreconditionViolated(where + " action " + std::to_string(a) + " has a play of the wrong size");
      }
      for (std::size_t w = 0; w < f.window.size(); ++w) {
        if (s.play[i][a][w] < 0 || s.play[i][a][w] >= f.window[w].num_actions) {
          throw PreconditionViolated(where + " has an out-of-range hypothetical action");
        }
      }
    }
  }
}

// The induced zero-sum LP: r maximizes the worst case over l's active
// sequences, subject to r's plan making exactly the active actions optimal
// (with their stated hypothetical plays). l's plan comes from the duals.
inline FixedStructureSolution solve_fixed_structure(const GameTree& g, const LookaheadSpec& spec,
                                                    const InducedStructure& s,
                                                    const LookaheadModel& model,
                                                    const CommitOptions& opt = {}) {
  using optim::Relation;
  check_structure(g, model, s);
  optim::OptProblem p;
  p.sense = optim::Sense::kMaximize;
  p.eps_strict = opt.eps;
  const double shift = g.shift();
  const auto x = add_plan_variables(p, g, Player::kRational, "x");
  detail::IncentiveSystem inc(g, model, spec.h, p, x);
  const auto on = s.active_sequences(g);
  std::vector<int> q(g.num_infosets(), -1);
  const int qroot = p.add_variable("qroot", -optim::kInf, optim::kInf, 1.0);
  for (int i : g.infosets_of(Player::kLimited)) {
    if (s.reached(i)) q[i] = p.add_variable("q" + std::to_string(i), -optim::kInf, optim::kInf);
  }
  const auto payoff = payoff_by_l_sequence(g, Player::kRational, shift);
  const int nl = g.num_sequences(Player::kLimited);
  std::vector<int> row_of(nl, -1);
  for (int sq = 0; sq < nl; ++sq) {
    if (!on[sq]) continue;
    detail::Expr row{{sq == 0 ? qroot : q[g.sequence(Player::kLimited, sq).infoset], 1.0}};
    for (int c : g.child_infosets(Player::kLimited, sq)) row.push_back({q[c], -1.0});
    for (const auto& [sr, w] : payoff[sq]) row.push_back({x[sr], -w});
    row_of[sq] = p.add_constraint("dual" + std::to_string(sq), std::move(row), Relation::kLessEqual, 0.0);
  }
  for (int i : g.infosets_of(Player::kLimited)) {
    if (!s.reached(i)) continue;
    const auto act = s.actions(i);
    const std::string tag = "I" + std::to_string(i);
    std::vector<detail::Expr> v(g.infoset(i).num_actions());
    for (int a : act) v[a] = inc.fixed(i, a, s.play[i][a]);
    for (int a : act) {
      const std::string ta = tag + "a" + std::to_string(a);
      for (int b = 0; b < g.infoset(i).num_actions(); ++b) {
        if (s.active[i][b]) continue;
        p.add_constraint("H_" + ta + "b" + std::to_string(b), detail::concat(v[a], inc.upper(i, b), -1.0),
                         Relation::kGreaterEqual, 0.0, true);
      }
      for (int b : act) {
        if (b <= a) continue;
        const auto diff = detail::concat(v[a], v[b], -1.0);
        p.add_constraint("Gup_" + ta + "b" + std::to_string(b), diff, Relation::kLessEqual, 0.0);
        p.add_constraint("Glo_" + ta + "b" + std::to_string(b), diff, Relation::kGreaterEqual, 0.0);
      }
      if (inc.has_window(i, a)) {
        p.add_constraint("self_" + ta, detail::concat(v[a], inc.upper(i, a), -1.0),
                         Relation::kGreaterEqual, 0.0);
      }
    }
  }
  const auto sol = optim::solve_lp(p, opt.lp);
  FixedStructureSolution out;
  out.status = sol.status;
  if (!sol.optimal()) return out;
  out.plan_r = detail::read_plan(Player::kRational, x, sol.primal);
  out.plan_l = RealizationPlan{Player::kLimited, std::vector<double>(nl, 0.0)};
  for (int sq = 0; sq < nl; ++sq) {
    if (row_of[sq] >= 0) out.plan_l[sq] = std::max(0.0, sol.dual[row_of[sq]]);
  }
  out.value_r = sol.objective - shift;
  out.duality_gap = std::abs(sol.objective - sol.dual_objective);
  return out;
}

inline FixedStructureSolution solve_fixed_structure(const GameTree& g, const LookaheadSpec& spec,
                                                    const InducedStructure& s,
                                                    const CommitOptions& opt = {}) {
  return solve_fixed_structure(g, spec, s, LookaheadModel(g, spec.k), opt);
}

// ---------------------------------------------------------------------------
// Oracle

// Calls `visit` on every structure in lexicographic order: infosets by id,
// then nonempty action subsets by bitmask, then hypothetical plays of the
// active actions. Infosets cut off by an inactive parent get no entry.
// Stops early when `visit` returns false.
inline void for_each_structure(const GameTree& g, const LookaheadModel& model,
                               const std::function<bool(const InducedStructure&)>& visit) {
  const auto& linfo = g.infosets_of(Player::kLimited);
  InducedStructure s = InducedStructure::empty_for(g);
  bool go = true;
  std::function<void(std::size_t)> infoset_level;
  // Plays for the active actions of infoset i, action by action.
  std::function<void(std::size_t, int, const std::vector<int>&, std::size_t)> play_level =
      [&](std::size_t pos, int i, const std::vector<int>& act, std::size_t k) {
        if (!go) return;
        if (k == act.size()) {
          infoset_level(pos + 1);
          return;
        }
        const Frontier& f = model.frontier(i, act[k]);
        std::vector<int> play(f.window.size(), 0);
        while (go) {
          s.play[i][act[k]] = play;
          play_level(pos, i, act, k + 1);
          std::size_t w = 0;
          while (w < play.size() && ++play[w] == f.window[w].num_actions) play[w++] = 0;
          if (w == play.size()) break;
        }
        s.play[i][act[k]].clear();
      };
  infoset_level = [&](std::size_t pos) {
    if (!go) return;
    if (pos == linfo.size()) {
      go = visit(s);
      return;
    }
    const int i = linfo[pos];
    const InfoSet& info = g.infoset(i);
    const int ps = info.parent_seq;
    bool reached = ps == 0;
    if (!reached) {
      const int pi = g.sequence(Player::kLimited, ps).infoset;
      reached = s.reached(pi) && s.active[pi][g.sequence(Player::kLimited, ps).action];
    }
    if (!reached) {
      infoset_level(pos + 1);
      return;
    }
    const int n = info.num_actions();
    s.play[i].assign(n, {});
    for (int mask = 1; mask < (1 << n) && go; ++mask) {
      s.active[i].assign(n, false);
      std::vector<int> act;
      for (int a = 0; a < n; ++a) {
        if (mask & (1 << a)) {
          s.active[i][a] = true;
          act.push_back(a);
        }
      }
      play_level(pos, i, act, 0);
    }
    s.active[i].clear();
    s.play[i].clear();
  };
  infoset_level(0);
}

// Exact adversarial optimum: the best feasible fixed-structure LP over all
// structures (ties keep the first). Throws CapExceeded before solving when
// the number of structures exceeds opt.oracle_cap.
inline CommitmentResult enumerate_structures_oracle(const GameTree& g, const LookaheadSpec& spec,
                                                    const CommitOptions& opt = {}) {
  spec.check(g);
  const auto start = std::chrono::steady_clock::now();
  const LookaheadModel model(g, spec.k);
  long count = 0;
  for_each_structure(g, model, [&](const InducedStructure&) { return ++count <= opt.oracle_cap; });
  if (count > opt.oracle_cap) {
    throw CapExceeded("more than " + std::to_string(opt.oracle_cap) + " structures");
  }
  CommitmentResult best;
  best.tie = TieBreak::kAdversarial;
  best.structures = count;
  double best_value = -optim::kInf;
  for_each_structure(g, model, [&](const InducedStructure& s) {
    const auto sol = solve_fixed_structure(g, spec, s, model, opt);
    if (!sol.feasible()) return true;
    ++best.feasible_structures;
    best.max_duality_gap = std::max(best.max_duality_gap, sol.duality_gap);
    if (sol.value_r > best_value + 1e-9) {
      best_value = sol.value_r;
      best.status = optim::SolveStatus::kOptimal;
      best.plan_r = sol.plan_r;
      best.induced = s;
      best.objective = sol.value_r;
    }
    return true;
  });
  if (best.status == optim::SolveStatus::kOptimal) {
    best.plan_l = restricted_response(g, best.plan_r, Player::kRational, true,
                                      best.induced.active_sequences(g))
                      .plan;
    best.value_r = expected_utility(g, best.plan_r, best.plan_l, Player::kRational);
  }
  best.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return best;
}

// ---------------------------------------------------------------------------
// Size bound

struct SizeBound {
  // sum over l infosets of |A_I| * b^min(k, k'_I), with b the largest action
  // count of any node and k'_I the height of the subtrees below I.
  long term = 0;
  // What this construction provably stays under:
  // 8 |S| + 24 * sum over l infosets of |I| * |A_I| * b^min(k, k'_I).
  long bound = 0;
  std::size_t nonzeros = 0;  // of the adversarial MIP actually built
};

inline SizeBound mip_size_bound(const GameTree& g, int k) {
  std::vector<int> height(g.num_nodes(), 0);
  for (int s = g.num_nodes() - 1; s >= 0; --s) {
    for (int c : g.node(s).children) height[s] = std::max(height[s], height[c] + 1);
  }
  long b = 1;
  for (const auto& n : g.nodes()) b = std::max<long>(b, n.num_actions());
  SizeBound out;
  long per_node = 0;
  for (int i : g.infosets_of(Player::kLimited)) {
    const InfoSet& info = g.infoset(i);
    int kp = 0;
    for (int s : info.nodes) kp = std::max(kp, height[s]);
    long pw = 1;
    for (int e = 0; e < std::min(k, kp); ++e) pw *= b;
    out.term += info.num_actions() * pw;
    per_node += static_cast<long>(info.nodes.size()) * info.num_actions() * pw;
  }
  out.bound = 8L * g.num_nodes() + 24L * per_node;
  LookaheadSpec spec;
  spec.k = k;
  spec.h.values.assign(g.num_nodes(), 0.0);
  out.nonzeros = build_commitment_mip(g, spec).problem.nonzeros();
  return out;
}

}  // namespace lla
