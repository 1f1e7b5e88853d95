#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <set>
#include <vector>

#include "lla/optim/problem.hpp"
#include "lla/optim/simplex.hpp"

namespace lla::optim {

struct MipOptions {
  SimplexOptions lp;
  long max_nodes = 1'000'000;
  double int_tol = 1e-6;
  double mip_gap = 1e-6;
  long reorder_every = 1000;
  // Re-solve the LP with the incumbent's binaries fixed so every row holds
  // exactly at the integral point rather than to int_tol * M.
  bool polish_incumbent = true;
  // Children reoptimize the parent's final tableau with dual pivots instead
  // of solving from scratch.
  bool warm_start = true;
  // Primal heuristic run on fractional node LPs: returns a point whose binary
  // entries are tried as an incumbent (other entries are ignored), or an
  // empty vector.
  std::function<std::vector<double>(const std::vector<double>&)> heuristic;
  long heuristic_every = 1;  // run at the root and then every n-th node
};

namespace detail {

struct BnbNode {
  std::vector<std::int8_t> fix;  // -1 free, 0 or 1 fixed, indexed by binary position
  double bound;                  // parent LP bound in maximization form
  int depth;
  std::shared_ptr<const DenseSimplex> parent;  // solved LP of the parent, if warm
  int branched = -1;                           // binary position fixed last
};

}  // namespace detail

// Depth-first branch and bound over the binary variables. Branches on the
// most fractional binary (ties to the lowest index), diving toward the
// nearer integer first. An LP point that is integral only to int_tol and
// breaks a row once rounded is branched on rather than accepted. Warm LPs that
// come back with a row violated past 1e-7 (or eps_strict / 100) are solved
// again cold. Every `reorder_every` nodes the open list is sorted so the best
// bound is explored next.
inline OptSolution solve_mip(const OptProblem& p, const MipOptions& opt = {}) {
  const double warm_tol = p.strict_safe_tol(1e-7);
  const auto start = std::chrono::steady_clock::now();
  const int n = p.num_vars();
  const double to_max = p.sense == Sense::kMaximize ? 1.0 : -1.0;

  std::vector<int> binaries;
  for (int j = 0; j < n; ++j) {
    if (p.variable(j).kind == VarKind::kBinary) binaries.push_back(j);
  }
  std::vector<double> base_lo(n), base_hi(n);
  for (int j = 0; j < n; ++j) {
    base_lo[j] = p.variable(j).lower;
    base_hi[j] = p.variable(j).upper;
  }

  OptSolution best;
  best.status = SolveStatus::kInfeasible;
  double incumbent = -kInf;  // maximization form
  long nodes = 0;
  long pivots = 0;
  bool unbounded = false;

  std::vector<detail::BnbNode> open;
  open.push_back({std::vector<std::int8_t>(binaries.size(), -1), kInf, 0, nullptr, -1});
  std::vector<double> lo = base_lo, hi = base_hi;

  // Binary points already handed out by the heuristic.
  std::set<std::vector<std::int8_t>> tried;
  auto try_heuristic = [&](const detail::DenseSimplex& from, const std::vector<double>& primal) {
    const std::vector<double> point = opt.heuristic(primal);
    if (point.empty()) return;
    std::vector<std::int8_t> key(binaries.size());
    for (std::size_t b = 0; b < binaries.size(); ++b) key[b] = point[binaries[b]] > 0.5 ? 1 : 0;
    if (!tried.insert(key).second) return;
    detail::DenseSimplex fixed(from);
    for (std::size_t b = 0; b < binaries.size(); ++b) fixed.set_bounds(binaries[b], key[b], key[b]);
    OptSolution sol = fixed.reoptimize();
    pivots += sol.pivots - from.pivot_count();
    if (sol.status == SolveStatus::kIterLimit || (sol.optimal() && p.max_violation(sol.primal) > warm_tol)) {
      std::vector<double> plo = base_lo, phi = base_hi;
      for (std::size_t b = 0; b < binaries.size(); ++b) plo[binaries[b]] = phi[binaries[b]] = key[b];
      sol = solve_lp(p, plo, phi, opt.lp);
      pivots += sol.pivots;
    }
    if (!sol.optimal() || to_max * sol.objective <= incumbent) return;
    incumbent = to_max * sol.objective;
    for (int j : binaries) sol.primal[j] = std::round(sol.primal[j]);
    best.primal = std::move(sol.primal);
    best.objective = sol.objective;
    best.status = SolveStatus::kOptimal;
  };

  auto apply = [&](const detail::BnbNode& node) {
    lo = base_lo;
    hi = base_hi;
    for (std::size_t b = 0; b < binaries.size(); ++b) {
      if (node.fix[b] >= 0) {
        lo[binaries[b]] = node.fix[b];
        hi[binaries[b]] = node.fix[b];
      }
    }
  };

  while (!open.empty()) {
    if (nodes >= opt.max_nodes) {
      // Any incumbent found so far is kept but reported as unproven.
      best.status = SolveStatus::kNodeLimit;
      break;
    }
    if (opt.reorder_every > 0 && nodes > 0 && nodes % opt.reorder_every == 0) {
      std::stable_sort(open.begin(), open.end(),
                       [](const auto& a, const auto& b) { return a.bound < b.bound; });
    }
    detail::BnbNode node = std::move(open.back());
    open.pop_back();
    if (node.bound <= incumbent + opt.mip_gap) continue;

    std::shared_ptr<detail::DenseSimplex> solver;
    OptSolution lp;
    if (node.parent) {
      solver = std::make_shared<detail::DenseSimplex>(*node.parent);
      const double v = node.fix[node.branched];
      solver->set_bounds(binaries[node.branched], v, v);
      lp = solver->reoptimize();
      lp.pivots -= node.parent->pivot_count();
      if (lp.status == SolveStatus::kIterLimit ||
          (lp.optimal() && p.max_violation(lp.primal) > warm_tol)) {
        pivots += lp.pivots;
        solver.reset();
      }
    }
    if (!solver) {
      apply(node);
      solver = std::make_shared<detail::DenseSimplex>(p, lo, hi, opt.lp);
      lp = solver->run();
    }
    ++nodes;
    pivots += lp.pivots;
    if (lp.status == SolveStatus::kUnbounded) {
      unbounded = true;
      break;
    }
    if (lp.status == SolveStatus::kIterLimit) {
      best.status = SolveStatus::kIterLimit;
      break;
    }
    if (!lp.optimal()) continue;
    const double bound = to_max * lp.objective;
    if (bound <= incumbent + opt.mip_gap) continue;

    int branch = -1;
    double most = -1.0;
    for (std::size_t b = 0; b < binaries.size(); ++b) {
      const double v = lp.primal[binaries[b]];
      const double frac = std::abs(v - std::round(v));
      if (frac <= opt.int_tol) continue;
      const double closeness = 0.5 - std::abs(v - std::floor(v) - 0.5);
      if (closeness > most) {
        most = closeness;
        branch = static_cast<int>(b);
      }
    }

    if (branch < 0) {
      std::vector<double> x = lp.primal;
      double value = lp.objective;
      for (int j : binaries) x[j] = std::round(x[j]);
      if (opt.polish_incumbent && !binaries.empty()) {
        detail::DenseSimplex fixed(*solver);
        for (int j : binaries) fixed.set_bounds(j, x[j], x[j]);
        OptSolution polished = fixed.reoptimize();
        polished.pivots -= solver->pivot_count();
        if (!polished.optimal() || p.max_violation(polished.primal) > warm_tol) {
          std::vector<double> plo = base_lo, phi = base_hi;
          for (int j : binaries) plo[j] = phi[j] = x[j];
          polished = solve_lp(p, plo, phi, opt.lp);
        }
        pivots += polished.pivots;
        if (polished.optimal()) {
          x = polished.primal;
          value = polished.objective;
          for (int j : binaries) x[j] = std::round(x[j]);
        } else {
          // Rounding broke a big-M row: the binaries were only integral to
          // int_tol. Branch on the least integral one instead.
          double off = 0.0;
          for (std::size_t b = 0; b < binaries.size(); ++b) {
            if (node.fix[b] >= 0) continue;
            const double v = lp.primal[binaries[b]];
            const double frac = std::abs(v - std::round(v));
            if (frac > off) {
              off = frac;
              branch = static_cast<int>(b);
            }
          }
          if (branch < 0) continue;
        }
      }
      if (branch < 0) {
        if (to_max * value > incumbent) {
          incumbent = to_max * value;
          best.primal = std::move(x);
          best.objective = value;
          best.status = SolveStatus::kOptimal;
        }
        continue;
      }
    }

    if (opt.heuristic && (nodes - 1) % std::max(1L, opt.heuristic_every) == 0) {
      try_heuristic(*solver, lp.primal);
    }

    const double v = lp.primal[binaries[branch]];
    std::shared_ptr<const detail::DenseSimplex> warm;
    if (opt.warm_start) warm = solver;
    detail::BnbNode down{node.fix, bound, node.depth + 1, warm, branch};
    detail::BnbNode up{std::move(node.fix), bound, node.depth + 1, warm, branch};
    down.fix[branch] = 0;
    up.fix[branch] = 1;
    // The child pushed last is explored first.
    if (v - std::floor(v) >= 0.5) {
      open.push_back(std::move(down));
      open.push_back(std::move(up));
    } else {
      open.push_back(std::move(up));
      open.push_back(std::move(down));
    }
  }

  if (unbounded) {
    best = OptSolution{};
    best.status = SolveStatus::kUnbounded;
  }
  best.nodes = nodes;
  best.pivots = pivots;
  best.dual_objective = best.objective;
  best.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return best;
}

}  // namespace lla::optim
