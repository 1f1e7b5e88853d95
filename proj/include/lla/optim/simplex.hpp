#pragma once

// Dense-tableau primal simplex over bounded variables.
//
// Every row gets a slack (`a.x + s = b`), so each variable, structural or
// slack, lives in an interval [lo, hi]. Phase 1 minimizes the sum of
// artificials added to rows whose initial residual falls outside the slack
// bounds. Pricing is Dantzig's largest reduced cost; after a run of degenerate
// pivots the solver switches to Bland's smallest-index rule until the
// objective moves again, which rules out cycling.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "lla/optim/problem.hpp"

namespace lla::optim {

struct SimplexOptions {
  long max_pivots = 1'000'000;
  double feas_tol = 1e-9;
  double opt_tol = 1e-9;
  double pivot_tol = 1e-9;
  // Phase-1 infeasibility threshold on the sum of artificials.
  double phase1_tol = 1e-7;
  int degenerate_run_before_bland = 30;
  bool always_bland = false;
};

namespace detail {

class DenseSimplex {
 public:
  DenseSimplex(const OptProblem& p, std::span<const double> lower, std::span<const double> upper,
               const SimplexOptions& opt)
      : p_(p), opt_(opt), n_(p.num_vars()), m_(p.num_rows()) {
    setup(lower, upper);
  }

  OptSolution run() {
    OptSolution sol;
    if (bound_conflict_) {
      sol.status = SolveStatus::kInfeasible;
      return sol;
    }
    if (num_art_ > 0) {
      set_phase1_costs();
      const SolveStatus s1 = iterate();
      if (s1 == SolveStatus::kIterLimit) {
        sol.status = s1;
        sol.pivots = pivots_;
        return sol;
      }
      double infeas = 0.0;
      for (int c = art_begin_; c < ncols_; ++c) infeas += value_[c];
      if (infeas > phase1_threshold()) {
        sol.status = SolveStatus::kInfeasible;
        sol.pivots = pivots_;
        return sol;
      }
      drive_out_artificials();
    }
    set_phase2_costs();
    return finish(iterate());
  }

  // Warm start after an optimal run(): moves variable j into [lo, hi]. The
  // basis stays dual feasible, so reoptimize() repairs it with dual pivots.
  void set_bounds(int j, double lo, double hi) {
    lo_[j] = lo;
    hi_[j] = hi;
    if (state_[j] == At::kBasic) return;
    double target = value_[j];
    if (state_[j] == At::kLower || target < lo) {
      target = lo;
      state_[j] = At::kLower;
    }
    if (state_[j] == At::kUpper || target > hi) {
      target = hi;
      state_[j] = At::kUpper;
    }
    const double delta = target - value_[j];
    if (delta == 0.0) return;
    for (int i = 0; i < m_; ++i) {
      const double a = tab(i, j);
      if (a != 0.0) value_[basis_[i]] -= a * delta;
    }
    value_[j] = target;
  }

  long pivot_count() const { return pivots_; }

  // A strict row missed by its whole eps must not pass as feasible.
  double phase1_threshold() const { return p_.strict_safe_tol(opt_.phase1_tol); }

  OptSolution reoptimize() {
    const SolveStatus s = dual_iterate();
    if (s != SolveStatus::kOptimal) {
      OptSolution sol;
      sol.status = s;
      sol.pivots = pivots_;
      return sol;
    }
    // Primal cleanup of reduced costs that drifted past opt_tol.
    return finish(iterate());
  }

 private:
  enum class At : std::uint8_t { kLower, kUpper, kFree, kBasic };

  OptSolution finish(SolveStatus status) {
    OptSolution sol;
    sol.status = status;
    sol.pivots = pivots_;
    if (status != SolveStatus::kOptimal) return sol;
    sol.primal.assign(value_.begin(), value_.begin() + n_);
    sol.objective = p_.objective_value(sol.primal);
    extract_duals(sol);
    return sol;
  }

  // Bounded dual simplex: the most violated basic variable leaves at the
  // bound it broke; the entering column keeps every reduced cost feasible.
  SolveStatus dual_iterate() {
    const long limit = pivots_ + 20L * (m_ + ncols_);
    while (true) {
      if (pivots_ >= opt_.max_pivots || pivots_ >= limit) return SolveStatus::kIterLimit;
      int r = -1;
      double worst = opt_.feas_tol;
      double target = 0.0;
      for (int i = 0; i < m_; ++i) {
        const int b = basis_[i];
        if (lo_[b] - value_[b] > worst) {
          worst = lo_[b] - value_[b];
          r = i;
          target = lo_[b];
        } else if (value_[b] - hi_[b] > worst) {
          worst = value_[b] - hi_[b];
          r = i;
          target = hi_[b];
        }
      }
      if (r < 0) return SolveStatus::kOptimal;
      const int leaving = basis_[r];
      const bool raise = value_[leaving] < target;

      int enter = -1;
      double best_ratio = kInf;
      double best_abs = 0.0;
      for (int c = 0; c < ncols_; ++c) {
        if (!movable(c)) continue;
        const double a = tab(r, c);
        if (std::abs(a) <= opt_.pivot_tol) continue;
        // x_leaving moves by -a per unit of x_c.
        const int dir = (raise ? -1 : 1) * (a > 0.0 ? 1 : -1);
        if (state_[c] == At::kLower && dir < 0) continue;
        if (state_[c] == At::kUpper && dir > 0) continue;
        const double ratio = std::abs(reduced_[c]) / std::abs(a);
        if (ratio < best_ratio - 1e-12 || (ratio <= best_ratio + 1e-12 && std::abs(a) > best_abs)) {
          best_ratio = ratio;
          best_abs = std::abs(a);
          enter = c;
        }
      }
      if (enter < 0) return SolveStatus::kInfeasible;

      const double step = (value_[leaving] - target) / tab(r, enter);
      for (int i = 0; i < m_; ++i) {
        const double a = tab(i, enter);
        if (a != 0.0) value_[basis_[i]] -= a * step;
      }
      value_[enter] += step;
      value_[leaving] = target;
      state_[leaving] = target == lo_[leaving] ? At::kLower : At::kUpper;
      pivot(r, enter);
      ++pivots_;
    }
  }

  double& tab(int r, int c) { return tableau_[static_cast<std::size_t>(r) * ncols_ + c]; }
  double tab(int r, int c) const { return tableau_[static_cast<std::size_t>(r) * ncols_ + c]; }

  void setup(std::span<const double> lower, std::span<const double> upper) {
    const auto& rows = p_.constraints();
    art_begin_ = n_ + m_;
    // Residuals decide which rows need an artificial.
    lo_.assign(n_ + m_, 0.0);
    hi_.assign(n_ + m_, 0.0);
    for (int j = 0; j < n_; ++j) {
      lo_[j] = lower[j];
      hi_[j] = upper[j];
      if (lo_[j] > hi_[j] + opt_.feas_tol) bound_conflict_ = true;
    }
    for (int i = 0; i < m_; ++i) {
      switch (rows[i].relation) {
        case Relation::kLessEqual: lo_[n_ + i] = 0.0; hi_[n_ + i] = kInf; break;
        case Relation::kGreaterEqual: lo_[n_ + i] = -kInf; hi_[n_ + i] = 0.0; break;
        case Relation::kEqual: lo_[n_ + i] = 0.0; hi_[n_ + i] = 0.0; break;
      }
    }
    std::vector<double> x0(n_);
    for (int j = 0; j < n_; ++j) {
      if (std::isfinite(lo_[j])) x0[j] = lo_[j];
      else if (std::isfinite(hi_[j])) x0[j] = hi_[j];
      else x0[j] = 0.0;
    }
    std::vector<double> resid(m_);
    std::vector<int> sign(m_, 0);
    for (int i = 0; i < m_; ++i) {
      double act = 0.0;
      for (const auto& t : rows[i].terms) act += t.coef * x0[t.var];
      resid[i] = rows[i].effective_rhs(p_.eps_strict) - act;
      const double slo = lo_[n_ + i], shi = hi_[n_ + i];
      if (resid[i] < slo - opt_.feas_tol || resid[i] > shi + opt_.feas_tol) {
        sign[i] = resid[i] > shi ? 1 : -1;
        ++num_art_;
      }
    }
    ncols_ = n_ + m_ + num_art_;
    lo_.resize(ncols_, 0.0);
    hi_.resize(ncols_, kInf);
    tableau_.assign(static_cast<std::size_t>(m_) * ncols_, 0.0);
    value_.assign(ncols_, 0.0);
    state_.assign(ncols_, At::kLower);
    basis_.assign(m_, -1);

    for (int j = 0; j < n_; ++j) {
      value_[j] = x0[j];
      if (std::isfinite(lo_[j])) state_[j] = At::kLower;
      else if (std::isfinite(hi_[j])) state_[j] = At::kUpper;
      else state_[j] = At::kFree;
    }
    int art = art_begin_;
    for (int i = 0; i < m_; ++i) {
      const double scale = sign[i] == 0 ? 1.0 : static_cast<double>(sign[i]);
      for (const auto& t : rows[i].terms) tab(i, t.var) = scale * t.coef;
      tab(i, n_ + i) = scale;
      if (sign[i] == 0) {
        basis_[i] = n_ + i;
        state_[n_ + i] = At::kBasic;
        value_[n_ + i] = resid[i];
      } else {
        // Slack parks at 0, which is always one of its bounds.
        value_[n_ + i] = 0.0;
        state_[n_ + i] = std::isfinite(lo_[n_ + i]) ? At::kLower : At::kUpper;
        tab(i, art) = 1.0;
        basis_[i] = art;
        state_[art] = At::kBasic;
        value_[art] = std::abs(resid[i]);
        ++art;
      }
    }
    cost_.assign(ncols_, 0.0);
    reduced_.assign(ncols_, 0.0);
  }

  void set_phase1_costs() {
    std::fill(cost_.begin(), cost_.end(), 0.0);
    for (int c = art_begin_; c < ncols_; ++c) cost_[c] = 1.0;
    recompute_reduced();
  }

  void set_phase2_costs() {
    std::fill(cost_.begin(), cost_.end(), 0.0);
    const double sgn = p_.sense == Sense::kMaximize ? -1.0 : 1.0;
    for (int j = 0; j < n_; ++j) cost_[j] = sgn * p_.variable(j).objective;
    recompute_reduced();
  }

  void recompute_reduced() {
    reduced_ = cost_;
    for (int i = 0; i < m_; ++i) {
      const double cb = cost_[basis_[i]];
      if (cb == 0.0) continue;
      const double* row = &tableau_[static_cast<std::size_t>(i) * ncols_];
      for (int c = 0; c < ncols_; ++c) reduced_[c] -= cb * row[c];
    }
    for (int i = 0; i < m_; ++i) reduced_[basis_[i]] = 0.0;
  }

  bool movable(int c) const {
    return state_[c] != At::kBasic && !(hi_[c] - lo_[c] <= 0.0 && state_[c] != At::kFree);
  }

  // Returns +1 (increase), -1 (decrease) or 0 if the column cannot improve.
  int direction(int c) const {
    const double d = reduced_[c];
    switch (state_[c]) {
      case At::kLower: return d < -opt_.opt_tol ? 1 : 0;
      case At::kUpper: return d > opt_.opt_tol ? -1 : 0;
      case At::kFree: return d < -opt_.opt_tol ? 1 : (d > opt_.opt_tol ? -1 : 0);
      case At::kBasic: return 0;
    }
    return 0;
  }

  SolveStatus iterate() {
    int degenerate_run = 0;
    while (true) {
      if (pivots_ >= opt_.max_pivots) return SolveStatus::kIterLimit;
      const bool bland = opt_.always_bland || degenerate_run >= opt_.degenerate_run_before_bland;

      int enter = -1;
      int dir = 0;
      double best = 0.0;
      for (int c = 0; c < ncols_; ++c) {
        if (!movable(c)) continue;
        const int d = direction(c);
        if (d == 0) continue;
        if (bland) {
          enter = c;
          dir = d;
          break;
        }
        const double score = std::abs(reduced_[c]);
        if (score > best) {
          best = score;
          enter = c;
          dir = d;
        }
      }
      if (enter < 0) return SolveStatus::kOptimal;

      // Ratio test.
      double t_best = kInf;
      int leave_row = -1;
      double leave_pivot_abs = 0.0;
      for (int i = 0; i < m_; ++i) {
        const double a = tab(i, enter);
        if (std::abs(a) <= opt_.pivot_tol) continue;
        const int b = basis_[i];
        const double delta = -a * dir;  // change of basic var per unit step
        double limit;
        if (delta < 0.0) {
          if (!std::isfinite(lo_[b])) continue;
          limit = (value_[b] - lo_[b]) / -delta;
        } else {
          if (!std::isfinite(hi_[b])) continue;
          limit = (hi_[b] - value_[b]) / delta;
        }
        if (limit < 0.0) limit = 0.0;
        bool take = false;
        if (limit < t_best - 1e-12) {
          take = true;
        } else if (limit <= t_best + 1e-12 && leave_row >= 0) {
          if (bland) take = b < basis_[leave_row];
          else take = std::abs(a) > leave_pivot_abs;
        }
        if (take) {
          t_best = limit;
          leave_row = i;
          leave_pivot_abs = std::abs(a);
        }
      }
      const double own_range = hi_[enter] - lo_[enter];
      const bool flip = std::isfinite(own_range) && own_range <= t_best;
      if (!flip && leave_row < 0) return SolveStatus::kUnbounded;

      const double step = flip ? own_range : t_best;
      degenerate_run = step <= opt_.feas_tol ? degenerate_run + 1 : 0;

      if (step > 0.0) {
        for (int i = 0; i < m_; ++i) {
          const double a = tab(i, enter);
          if (a != 0.0) value_[basis_[i]] -= a * dir * step;
        }
        value_[enter] += dir * step;
      }
      ++pivots_;
      if (flip) {
        state_[enter] = dir > 0 ? At::kUpper : At::kLower;
        value_[enter] = dir > 0 ? hi_[enter] : lo_[enter];
        continue;
      }

      const int leaving = basis_[leave_row];
      const double a_leave = tab(leave_row, enter);
      const double delta = -a_leave * dir;
      if (delta < 0.0) {
        value_[leaving] = lo_[leaving];
        state_[leaving] = At::kLower;
      } else {
        value_[leaving] = hi_[leaving];
        state_[leaving] = At::kUpper;
      }
      pivot(leave_row, enter);
    }
  }

  void pivot(int r, int c) {
    double* prow = &tableau_[static_cast<std::size_t>(r) * ncols_];
    const double inv = 1.0 / prow[c];
    nz_.clear();
    for (int k = 0; k < ncols_; ++k) {
      if (prow[k] != 0.0) {
        prow[k] *= inv;
        nz_.push_back(k);
      }
    }
    prow[c] = 1.0;
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* row = &tableau_[static_cast<std::size_t>(i) * ncols_];
      const double f = row[c];
      if (f == 0.0) continue;
      for (int k : nz_) row[k] -= f * prow[k];
      row[c] = 0.0;
    }
    const double f = reduced_[c];
    if (f != 0.0) {
      for (int k : nz_) reduced_[k] -= f * prow[k];
      reduced_[c] = 0.0;
    }
    basis_[r] = c;
    state_[c] = At::kBasic;
  }

  void drive_out_artificials() {
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < art_begin_) continue;
      int best = -1;
      double best_abs = 1e-7;
      for (int c = 0; c < art_begin_; ++c) {
        if (state_[c] == At::kBasic) continue;
        const double a = std::abs(tab(i, c));
        if (a > best_abs) {
          best_abs = a;
          best = c;
        }
      }
      if (best >= 0) {
        const int leaving = basis_[i];
        value_[leaving] = 0.0;
        state_[leaving] = At::kLower;
        pivot(i, best);
      }
    }
    // Artificials stay in the tableau pinned at zero.
    for (int c = art_begin_; c < ncols_; ++c) {
      hi_[c] = 0.0;
      lo_[c] = 0.0;
    }
  }

  void extract_duals(OptSolution& sol) const {
    const auto& rows = p_.constraints();
    const double sgn = p_.sense == Sense::kMaximize ? 1.0 : -1.0;
    sol.dual.assign(m_, 0.0);
    for (int i = 0; i < m_; ++i) sol.dual[i] = sgn * reduced_[n_ + i];

    // Lagrangian bound from the duals against the original data; equals the
    // primal objective at an optimal basis up to rounding.
    std::vector<double> d(n_);
    for (int j = 0; j < n_; ++j) d[j] = p_.variable(j).objective;
    for (int i = 0; i < m_; ++i) {
      for (const auto& t : rows[i].terms) d[t.var] -= sol.dual[i] * t.coef;
    }
    const double tol = 1e-9;
    // For a maximization the bound is b.y + sum_j max_x d_j x_j, and
    // symmetric for minimization.
    double bound = 0.0;
    for (int i = 0; i < m_; ++i) bound += sol.dual[i] * rows[i].effective_rhs(p_.eps_strict);
    for (int j = 0; j < n_; ++j) {
      double dj = d[j];
      if (std::abs(dj) <= tol) dj = 0.0;
      const bool up = p_.sense == Sense::kMaximize ? dj > 0.0 : dj < 0.0;
      double xb;
      if (dj == 0.0) xb = 0.0;
      else xb = up ? hi_[j] : lo_[j];
      if (!std::isfinite(xb)) {
        // Dual infeasible to tolerance; fall back to the primal value so the
        // reported gap reflects only rows that can be certified.
        xb = sol.primal[j];
      }
      bound += dj * xb;
    }
    sol.dual_objective = bound;
  }

  const OptProblem& p_;
  SimplexOptions opt_;
  int n_;
  int m_;
  int ncols_ = 0;
  int art_begin_ = 0;
  int num_art_ = 0;
  bool bound_conflict_ = false;
  long pivots_ = 0;
  std::vector<double> tableau_;
  std::vector<double> value_;
  std::vector<double> lo_;
  std::vector<double> hi_;
  std::vector<At> state_;
  std::vector<int> basis_;
  std::vector<double> cost_;
  std::vector<double> reduced_;
  std::vector<int> nz_;
};

}  // namespace detail

// Solves the LP with the given bound overrides (one lower/upper per variable).
inline OptSolution solve_lp(const OptProblem& p, std::span<const double> lower,
                            std::span<const double> upper, const SimplexOptions& opt = {}) {
  const auto start = std::chrono::steady_clock::now();
  detail::DenseSimplex simplex(p, lower, upper, opt);
  OptSolution sol = simplex.run();
  sol.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return sol;
}

inline OptSolution solve_lp(const OptProblem& p, const SimplexOptions& opt = {}) {
  std::vector<double> lo(p.num_vars()), hi(p.num_vars());
  for (int j = 0; j < p.num_vars(); ++j) {
    lo[j] = p.variable(j).lower;
    hi[j] = p.variable(j).upper;
  }
  return solve_lp(p, lo, hi, opt);
}

}  // namespace lla::optim
