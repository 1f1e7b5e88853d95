#pragma once

// Kuhn poker and the two-round KJ game. `rational_seat` (1 or 2) says which
// seat is player r; the other seat is player l. Utilities are net chip
// winnings of each seat.

#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lla/game.hpp"

namespace lla {

namespace detail {

class PokerBuilder {
 public:
  explicit PokerBuilder(int rational_seat) : rational_seat_(rational_seat) {
    if (rational_seat != 1 && rational_seat != 2) {
      throw std::invalid_argument("rational seat must be 1 or 2");
    }
    b_.set_player_name(role(1), "P1");
    b_.set_player_name(role(2), "P2");
  }

  Player role(int seat) const {
    return seat == rational_seat_ ? Player::kRational : Player::kLimited;
  }

  // Seat-1 and seat-2 utilities mapped to (r, l).
  int leaf(double u1, double u2) {
    return rational_seat_ == 1 ? b_.add_leaf(u1, u2) : b_.add_leaf(u2, u1);
  }

  int decision(int seat, const std::string& key) {
    auto it = infosets_.find(key);
    if (it == infosets_.end()) it = infosets_.emplace(key, b_.add_infoset(role(seat))).first;
    return b_.add_node(role(seat), it->second);
  }

  // Called when a round ends without a fold, with both contributions and the
  // round's action history ("cc", "cbc" or "bc").
  using Continuation = std::function<int(double c1, double c2, const std::string& history)>;

  // One check/bet round; `view[seat]` is what that seat has seen so far.
  // Returns the root of the round.
  int betting_round(double bet, double c1, double c2, const std::string view[2],
                    const Continuation& showdown_or_next) {
    const std::string h1 = view[0] + "|", h2 = view[1] + "|";
    const int p1 = decision(1, "1:" + h1);
    // P1 checks.
    const int p2c = decision(2, "2:" + h2 + "c");
    b_.add_action(p1, "check", p2c);
    b_.add_action(p2c, "check", showdown_or_next(c1, c2, "cc"));
    const int p1cb = decision(1, "1:" + h1 + "cb");
    b_.add_action(p2c, "bet", p1cb);
    b_.add_action(p1cb, "fold", leaf(-c1, c1));
    b_.add_action(p1cb, "call", showdown_or_next(c1 + bet, c2 + bet, "cbc"));
    // P1 bets.
    const int p2b = decision(2, "2:" + h2 + "b");
    b_.add_action(p1, "bet", p2b);
    b_.add_action(p2b, "fold", leaf(c2, -c2));
    b_.add_action(p2b, "call", showdown_or_next(c1 + bet, c2 + bet, "bc"));
    return p1;
  }

  GameBuilder& raw() { return b_; }

 private:
  int rational_seat_;
  GameBuilder b_;
  std::map<std::string, int> infosets_;
};

}  // namespace detail

inline GameTree build_kuhn(int rational_seat = 1) {
  detail::PokerBuilder pb(rational_seat);
  auto& b = pb.raw();
  const int root = b.add_node(Player::kNature);
  const char cards[3] = {'J', 'Q', 'K'};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      const std::string view[2] = {std::string(1, cards[i]), std::string(1, cards[j])};
      const double sign = i > j ? 1.0 : -1.0;  // seat 1 wins a showdown when its card is higher
      const int sub = pb.betting_round(1.0, 1.0, 1.0, view,
                                       [&](double, double c2, const std::string&) {
                                         return pb.leaf(sign * c2, -sign * c2);
                                       });
      b.add_action(root, view[0] + view[1], sub, 1.0 / 6.0);
    }
  }
  return b.build();
}

inline GameTree build_kj(int rational_seat = 1) {
  detail::PokerBuilder pb(rational_seat);
  auto& b = pb.raw();
  const int root = b.add_node(Player::kNature);
  struct Deal {
    char c1, c2;
    double prob;
  };
  // Two kings and two jacks: matching private cards happen with probability 1/6.
  const Deal deals[4] = {{'K', 'K', 1.0 / 6.0}, {'K', 'J', 1.0 / 3.0}, {'J', 'K', 1.0 / 3.0},
                         {'J', 'J', 1.0 / 6.0}};
  for (const Deal& d : deals) {
    // Cards left for the public deal.
    std::vector<std::pair<char, double>> pub;
    if (d.c1 == d.c2) {
      pub.push_back({d.c1 == 'K' ? 'J' : 'K', 1.0});
    } else {
      pub.push_back({'K', 0.5});
      pub.push_back({'J', 0.5});
    }
    const std::string view1[2] = {std::string(1, d.c1), std::string(1, d.c2)};
    auto showdown = [&](char board, double c1, double c2) {
      const bool pair1 = d.c1 == board, pair2 = d.c2 == board;
      if (d.c1 == d.c2 || pair1 == pair2) return pb.leaf(0.0, 0.0);
      return pair1 ? pb.leaf(c2, -c2) : pb.leaf(-c1, c1);
    };
    auto second_round = [&](double c1, double c2, const std::string& history) {
      const int chance = b.add_node(Player::kNature);
      for (const auto& [board, prob] : pub) {
        const std::string tag = "/" + history + "/" + board;
        const std::string view2[2] = {view1[0] + tag, view1[1] + tag};
        const int sub = pb.betting_round(
            4.0, c1, c2, view2,
            [&](double a1, double a2, const std::string&) { return showdown(board, a1, a2); });
        b.add_action(chance, std::string(1, board), sub, prob);
      }
      return chance;
    };
    const int sub = pb.betting_round(2.0, 1.0, 1.0, view1, second_round);
    b.add_action(root, view1[0] + view1[1], sub, d.prob);
  }
  return b.build();
}

}  // namespace lla
