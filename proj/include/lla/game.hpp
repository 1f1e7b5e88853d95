#pragma once

// Two-player extensive-form games with Nature, stored as an immutable tree in
// preorder. Player r is the rational (committing) player and player l the
// limited-lookahead one; seats in the underlying poker game are a separate
// matter handled by the game builders.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lla {

enum class Player : std::uint8_t { kNature, kRational, kLimited };

inline const char* player_code(Player p) {
  switch (p) {
    case Player::kNature: return "c";
    case Player::kRational: return "r";
    case Player::kLimited: return "l";
  }
  return "?";
}

// Index into per-player arrays: 0 for r, 1 for l.
inline int side(Player p) { return p == Player::kRational ? 0 : 1; }
inline Player other(Player p) {
  return p == Player::kRational ? Player::kLimited : Player::kRational;
}

class GameFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Node {
  int parent = -1;
  int action_index = -1;  // edge index at the parent
  bool terminal = false;
  Player owner = Player::kNature;
  int infoset = -1;
  std::vector<int> children;
  std::vector<std::string> labels;
  std::vector<double> probs;  // Nature nodes only
  double ur = 0.0;
  double ul = 0.0;
  int depth = 0;

  int num_actions() const { return static_cast<int>(children.size()); }
  double utility(Player p) const { return p == Player::kRational ? ur : ul; }

  bool operator==(const Node&) const = default;
};

struct InfoSet {
  Player owner = Player::kRational;
  std::vector<int> nodes;
  std::vector<std::string> labels;  // taken from the first node
  int parent_seq = 0;
  int first_seq = 0;

  int num_actions() const { return static_cast<int>(labels.size()); }
  int seq(int action) const { return first_seq + action; }
};

// A sequence is an (infoset, action) pair; index 0 is the empty sequence.
struct Sequence {
  int infoset = -1;
  int action = -1;
};

class GameTree {
 public:
  GameTree() = default;

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int root() const { return 0; }
  const Node& node(int s) const { return nodes_[s]; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<int>& leaves() const { return leaves_; }

  int num_infosets() const { return static_cast<int>(infosets_.size()); }
  const InfoSet& infoset(int i) const { return infosets_[i]; }
  const std::vector<InfoSet>& infosets() const { return infosets_; }
  // Infosets of one player, ascending (parents before children).
  const std::vector<int>& infosets_of(Player p) const { return by_player_[side(p)]; }

  int num_sequences(Player p) const { return static_cast<int>(seqs_[side(p)].size()); }
  const Sequence& sequence(Player p, int q) const { return seqs_[side(p)][q]; }
  // Player p's last sequence on the path from the root to s.
  int seq_to(Player p, int s) const { return node_seq_[side(p)][s]; }
  // Infosets of p whose parent sequence is q.
  const std::vector<int>& child_infosets(Player p, int q) const { return seq_children_[side(p)][q]; }

  double chance_reach(int s) const { return chance_reach_[s]; }

  const std::string& player_name(Player p) const { return names_[side(p)]; }

  double min_utility() const { return min_u_; }
  double max_utility() const { return max_u_; }
  // Amount added to every utility to make all of them non-negative.
  double shift() const { return std::max(0.0, -min_u_); }

  int max_depth() const { return max_depth_; }

  bool operator==(const GameTree& o) const {
    if (nodes_ != o.nodes_ || names_[0] != o.names_[0] || names_[1] != o.names_[1]) return false;
    if (infosets_.size() != o.infosets_.size()) return false;
    for (std::size_t i = 0; i < infosets_.size(); ++i) {
      if (infosets_[i].owner != o.infosets_[i].owner || infosets_[i].nodes != o.infosets_[i].nodes)
        return false;
    }
    return true;
  }

 private:
  friend class GameBuilder;

  void finalize();

  std::vector<Node> nodes_;
  std::vector<InfoSet> infosets_;
  std::vector<int> leaves_;
  std::vector<int> by_player_[2];
  std::vector<Sequence> seqs_[2];
  std::vector<int> node_seq_[2];
  std::vector<std::vector<int>> seq_children_[2];
  std::vector<double> chance_reach_;
  std::string names_[2] = {"r", "l"};
  double min_u_ = 0.0;
  double max_u_ = 0.0;
  int max_depth_ = 0;
};

// Incremental construction with arbitrary ids; build() renumbers nodes in
// preorder and infosets by first appearance in that order.
class GameBuilder {
 public:
  void set_player_name(Player p, std::string name) { names_[side(p)] = std::move(name); }

  int add_infoset(Player owner) {
    if (owner == Player::kNature) throw GameFormatError("infosets belong to r or l");
    infoset_owner_.push_back(owner);
    return static_cast<int>(infoset_owner_.size()) - 1;
  }

  // A decision or Nature node; infoset -1 makes a singleton for r/l nodes.
  int add_node(Player owner, int infoset = -1) {
    if (infoset >= static_cast<int>(infoset_owner_.size())) {
      throw GameFormatError("unknown infoset " + std::to_string(infoset));
    }
    if (infoset < 0 && owner != Player::kNature) infoset = add_infoset(owner);
    Node n;
    n.owner = owner;
    n.infoset = owner == Player::kNature ? -1 : infoset;
    if (owner == Player::kNature && infoset >= 0) nature_infoset_.push_back(infoset);
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
  }

  int add_leaf(double ur, double ul) {
    Node n;
    n.terminal = true;
    n.ur = ur;
    n.ul = ul;
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
  }

  void add_action(int node, std::string label, int child, double prob = 0.0) {
    check_id(node);
    check_id(child);
    Node& n = nodes_[node];
    if (n.terminal) throw GameFormatError("leaf " + std::to_string(node) + " cannot have actions");
    if (nodes_[child].parent >= 0) {
      throw GameFormatError("node " + std::to_string(child) + " has two parents");
    }
    nodes_[child].parent = node;
    nodes_[child].action_index = n.num_actions();
    n.children.push_back(child);
    n.labels.push_back(std::move(label));
    if (n.owner == Player::kNature) n.probs.push_back(prob);
  }

  int num_nodes() const { return static_cast<int>(nodes_.size()); }

  GameTree build() const;

 private:
  void check_id(int id) const {
    if (id < 0 || id >= num_nodes()) throw GameFormatError("unknown node " + std::to_string(id));
  }

  std::vector<Node> nodes_;
  std::vector<Player> infoset_owner_;
  std::vector<int> nature_infoset_;
  std::string names_[2] = {"r", "l"};
};

inline GameTree GameBuilder::build() const {
  if (!nature_infoset_.empty()) throw GameFormatError("Nature nodes cannot join an infoset");
  int root = -1;
  for (int i = 0; i < num_nodes(); ++i) {
    if (nodes_[i].parent < 0) {
      if (root >= 0) {
        throw GameFormatError("multiple roots: " + std::to_string(root) + " and " +
                              std::to_string(i));
      }
      root = i;
    }
  }
  if (root < 0) throw GameFormatError("no root node");

  std::vector<int> order;  // preorder of builder ids
  std::vector<int> new_id(num_nodes(), -1);
  std::vector<int> stack{root};
  while (!stack.empty()) {
    const int s = stack.back();
    stack.pop_back();
    new_id[s] = static_cast<int>(order.size());
    order.push_back(s);
    const auto& ch = nodes_[s].children;
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
  }
  if (static_cast<int>(order.size()) != num_nodes()) {
    throw GameFormatError("nodes unreachable from the root (cycle or detached subtree)");
  }

  std::vector<int> new_infoset(infoset_owner_.size(), -1);
  GameTree g;
  g.names_[0] = names_[0];
  g.names_[1] = names_[1];
  for (int old : order) {
    Node n = nodes_[old];
    n.parent = n.parent < 0 ? -1 : new_id[n.parent];
    for (auto& c : n.children) c = new_id[c];
    if (n.infoset >= 0) {
      int& ni = new_infoset[n.infoset];
      if (ni < 0) {
        ni = static_cast<int>(g.infosets_.size());
        InfoSet info;
        info.owner = infoset_owner_[n.infoset];
        g.infosets_.push_back(info);
      }
      n.infoset = ni;
    }
    g.nodes_.push_back(std::move(n));
  }
  for (std::size_t i = 0; i < new_infoset.size(); ++i) {
    if (new_infoset[i] < 0) throw GameFormatError("infoset " + std::to_string(i) + " has no nodes");
  }
  g.finalize();
  return g;
}

inline void GameTree::finalize() {
  const int n = num_nodes();
  leaves_.clear();
  chance_reach_.assign(n, 1.0);
  min_u_ = std::numeric_limits<double>::infinity();
  max_u_ = -std::numeric_limits<double>::infinity();
  max_depth_ = 0;
  for (int s = 0; s < n; ++s) {
    Node& nd = nodes_[s];
    if (nd.parent >= 0) {
      const Node& p = nodes_[nd.parent];
      nd.depth = p.depth + 1;
      const double pr =
          p.owner == Player::kNature && !p.terminal ? p.probs[nd.action_index] : 1.0;
      chance_reach_[s] = chance_reach_[nd.parent] * pr;
    }
    max_depth_ = std::max(max_depth_, nd.depth);
    if (nd.terminal) {
      leaves_.push_back(s);
      min_u_ = std::min({min_u_, nd.ur, nd.ul});
      max_u_ = std::max({max_u_, nd.ur, nd.ul});
    }
    if (nd.infoset >= 0) infosets_[nd.infoset].nodes.push_back(s);
  }
  if (leaves_.empty()) {
    min_u_ = max_u_ = 0.0;
  }

  for (int p = 0; p < 2; ++p) {
    by_player_[p].clear();
    seqs_[p].assign(1, Sequence{});
    node_seq_[p].assign(n, 0);
  }
  for (int i = 0; i < num_infosets(); ++i) {
    InfoSet& info = infosets_[i];
    info.labels = nodes_[info.nodes.front()].labels;
    const int p = side(info.owner);
    by_player_[p].push_back(i);
  }
  // Preorder guarantees a node's parent is processed first, and infosets are
  // numbered by first appearance, so sequence ids are assigned parent-first.
  std::vector<bool> assigned(num_infosets(), false);
  for (int s = 0; s < n; ++s) {
    const Node& nd = nodes_[s];
    if (nd.parent >= 0) {
      const Node& par = nodes_[nd.parent];
      for (int p = 0; p < 2; ++p) node_seq_[p][s] = node_seq_[p][nd.parent];
      if (par.infoset >= 0) {
        const InfoSet& pi = infosets_[par.infoset];
        if (nd.action_index < pi.num_actions()) {
          node_seq_[side(pi.owner)][s] = pi.first_seq + nd.action_index;
        }
      }
    }
    if (nd.infoset >= 0 && !assigned[nd.infoset]) {
      InfoSet& info = infosets_[nd.infoset];
      const int p = side(info.owner);
      info.parent_seq = node_seq_[p][s];
      info.first_seq = static_cast<int>(seqs_[p].size());
      for (int a = 0; a < info.num_actions(); ++a) seqs_[p].push_back({nd.infoset, a});
      assigned[nd.infoset] = true;
    }
  }
  for (int p = 0; p < 2; ++p) {
    seq_children_[p].assign(seqs_[p].size(), {});
    for (int i : by_player_[p]) seq_children_[p][infosets_[i].parent_seq].push_back(i);
  }
}

// ---------------------------------------------------------------------------
// Validation

enum class ViolationKind {
  kActionSetMismatch,
  kPerfectRecallViolation,
  kOwnerMismatch,
  kNatureProbability,
  kDeadEnd,
  kNonFiniteUtility,
};

inline const char* to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::kActionSetMismatch: return "ActionSetMismatch";
    case ViolationKind::kPerfectRecallViolation: return "PerfectRecallViolation";
    case ViolationKind::kOwnerMismatch: return "OwnerMismatch";
    case ViolationKind::kNatureProbability: return "NatureProbability";
    case ViolationKind::kDeadEnd: return "DeadEnd";
    case ViolationKind::kNonFiniteUtility: return "NonFiniteUtility";
  }
  return "Unknown";
}

struct Violation {
  ViolationKind kind;
  std::string message;
};

inline std::vector<Violation> validate(const GameTree& g) {
  std::vector<Violation> out;
  auto add = [&](ViolationKind k, std::string msg) { out.push_back({k, std::move(msg)}); };
  for (int s = 0; s < g.num_nodes(); ++s) {
    const Node& nd = g.node(s);
    const std::string where = "node " + std::to_string(s);
    if (nd.terminal) {
      if (!std::isfinite(nd.ur) || !std::isfinite(nd.ul)) {
        add(ViolationKind::kNonFiniteUtility, where + " has a non-finite utility");
      }
      continue;
    }
    if (nd.children.empty()) add(ViolationKind::kDeadEnd, where + " has no actions");
    if (nd.owner == Player::kNature) {
      double sum = 0.0;
      for (double p : nd.probs) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
          add(ViolationKind::kNatureProbability, where + " has a negative probability");
        }
        sum += p;
      }
      if (!nd.children.empty() && std::abs(sum - 1.0) > 1e-9) {
        add(ViolationKind::kNatureProbability,
            where + " probabilities sum to " + std::to_string(sum));
      }
    }
  }
  for (int i = 0; i < g.num_infosets(); ++i) {
    const InfoSet& info = g.infoset(i);
    const std::string where = "infoset " + std::to_string(i);
    const int first = info.nodes.front();
    const int seq0 = g.seq_to(info.owner, first);
    for (int s : info.nodes) {
      const Node& nd = g.node(s);
      if (nd.owner != info.owner) {
        add(ViolationKind::kOwnerMismatch,
            where + ": node " + std::to_string(s) + " is owned by " + player_code(nd.owner));
      }
      if (nd.labels != info.labels) {
        add(ViolationKind::kActionSetMismatch,
            where + ": node " + std::to_string(s) + " has a different action set than node " +
                std::to_string(first));
      }
      if (g.seq_to(info.owner, s) != seq0) {
        add(ViolationKind::kPerfectRecallViolation,
            where + ": nodes " + std::to_string(first) + " and " + std::to_string(s) +
                " follow different own histories");
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Strategies

struct RealizationPlan {
  Player owner = Player::kRational;
  std::vector<double> values;

  double operator[](int q) const { return values[q]; }
  double& operator[](int q) { return values[q]; }
};

inline RealizationPlan uniform_plan(const GameTree& g, Player p) {
  RealizationPlan x{p, std::vector<double>(g.num_sequences(p), 0.0)};
  x[0] = 1.0;
  for (int i : g.infosets_of(p)) {
    const InfoSet& info = g.infoset(i);
    for (int a = 0; a < info.num_actions(); ++a) x[info.seq(a)] = x[info.parent_seq] / info.num_actions();
  }
  return x;
}

// Largest violation of the empty-sequence and flow-conservation constraints.
inline double plan_violation(const GameTree& g, const RealizationPlan& x) {
  double worst = std::abs(x[0] - 1.0);
  for (double v : x.values) worst = std::max(worst, -v);
  for (int i : g.infosets_of(x.owner)) {
    const InfoSet& info = g.infoset(i);
    double sum = 0.0;
    for (int a = 0; a < info.num_actions(); ++a) sum += x[info.seq(a)];
    worst = std::max(worst, std::abs(sum - x[info.parent_seq]));
  }
  return worst;
}

// Behavioral probabilities indexed by sequence id (entry 0 unused); uniform
// where the parent sequence has realization below `tol`.
inline std::vector<double> to_behavioral(const GameTree& g, const RealizationPlan& x,
                                         double tol = 1e-12) {
  std::vector<double> b(x.values.size(), 1.0);
  for (int i : g.infosets_of(x.owner)) {
    const InfoSet& info = g.infoset(i);
    const double par = x[info.parent_seq];
    for (int a = 0; a < info.num_actions(); ++a) {
      b[info.seq(a)] = par > tol ? x[info.seq(a)] / par : 1.0 / info.num_actions();
    }
  }
  return b;
}

inline RealizationPlan from_behavioral(const GameTree& g, Player p, const std::vector<double>& b) {
  RealizationPlan x{p, std::vector<double>(g.num_sequences(p), 0.0)};
  x[0] = 1.0;
  for (int i : g.infosets_of(p)) {
    const InfoSet& info = g.infoset(i);
    for (int a = 0; a < info.num_actions(); ++a) x[info.seq(a)] = x[info.parent_seq] * b[info.seq(a)];
  }
  return x;
}

// Probability of each action at node s under the given plans (Nature uses its
// own probabilities).
inline double action_prob(const GameTree& g, int s, int a, const std::vector<double>& beh_r,
                          const std::vector<double>& beh_l) {
  const Node& nd = g.node(s);
  if (nd.owner == Player::kNature) return nd.probs[a];
  const InfoSet& info = g.infoset(nd.infoset);
  return (info.owner == Player::kRational ? beh_r : beh_l)[info.seq(a)];
}

struct ReachProbabilities {
  std::vector<double> total;     // pi(s)
  std::vector<double> chance;    // pi_0(s)
  std::vector<double> excluding[2];  // pi_{-i}(s), indexed by side()

  double minus(Player p, int s) const { return excluding[side(p)][s]; }
};

inline ReachProbabilities reach_probabilities(const GameTree& g, const RealizationPlan& x,
                                              const RealizationPlan& y) {
  const RealizationPlan& xr = x.owner == Player::kRational ? x : y;
  const RealizationPlan& yl = x.owner == Player::kRational ? y : x;
  ReachProbabilities out;
  const int n = g.num_nodes();
  out.total.resize(n);
  out.chance.resize(n);
  out.excluding[0].resize(n);
  out.excluding[1].resize(n);
  for (int s = 0; s < n; ++s) {
    const double c = g.chance_reach(s);
    const double pr = xr[g.seq_to(Player::kRational, s)];
    const double pl = yl[g.seq_to(Player::kLimited, s)];
    out.chance[s] = c;
    out.total[s] = c * pr * pl;
    out.excluding[0][s] = c * pl;
    out.excluding[1][s] = c * pr;
  }
  return out;
}

// Leaf-wise expected utility of player p.
inline double expected_utility(const GameTree& g, const RealizationPlan& x, const RealizationPlan& y,
                               Player p) {
  const RealizationPlan& xr = x.owner == Player::kRational ? x : y;
  const RealizationPlan& yl = x.owner == Player::kRational ? y : x;
  double v = 0.0;
  for (int z : g.leaves()) {
    v += g.chance_reach(z) * xr[g.seq_to(Player::kRational, z)] *
         yl[g.seq_to(Player::kLimited, z)] * g.node(z).utility(p);
  }
  return v;
}

struct GameStats {
  int nodes = 0;
  int leaves = 0;
  int infosets_r = 0;
  int infosets_l = 0;
  int sequences_r = 0;
  int sequences_l = 0;
  int depth = 0;
};

inline GameStats stats(const GameTree& g) {
  GameStats s;
  s.nodes = g.num_nodes();
  s.leaves = static_cast<int>(g.leaves().size());
  s.infosets_r = static_cast<int>(g.infosets_of(Player::kRational).size());
  s.infosets_l = static_cast<int>(g.infosets_of(Player::kLimited).size());
  s.sequences_r = g.num_sequences(Player::kRational);
  s.sequences_l = g.num_sequences(Player::kLimited);
  s.depth = g.max_depth();
  return s;
}

}  // namespace lla
