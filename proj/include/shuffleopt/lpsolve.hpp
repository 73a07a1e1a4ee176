// LP/MILP solving for OptModel instances.
//   * Bounded-variable two-phase revised simplex with a dense explicit basis
//     inverse, Dantzig pricing, and a Bland's-rule fallback once degenerate
//     pivots pile up. Periodic refactorization keeps the inverse honest, and
//     every accepted answer is re-verified against the original model.
//   * Branch-and-bound over the binary variables: best-bound node order,
//     most-fractional branching, deterministic tie-breaking throughout.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <queue>
#include <string>
#include <vector>

#include "shuffleopt/common.hpp"
#include "shuffleopt/dense.hpp"
#include "shuffleopt/optmodel.hpp"

namespace shuffleopt {

enum class LpStatus { Optimal, Infeasible, Unbounded, TargetReached };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::TargetReached: return "target-reached";
  }
  return "?";
}

struct LpOptions {
  double feas_tol = 1e-6;    // absolute feasibility accepted in certificates
  double pivot_tol = 1e-9;   // minimum pivot magnitude
  double int_tol = 1e-6;     // binary integrality tolerance (MILP)
  int refactor_every = 512;  // pivots between basis reinversions
  long max_pivots = 0;       // 0 = derive from model size
  // Early stop for feasibility probes: in phase 2, once the objective (in the
  // model's own sense) is at least / at most this good, stop with
  // TargetReached. NaN disables.
  double objective_target = std::numeric_limits<double>::quiet_NaN();
  std::ostream* trace = nullptr;
};

struct LpResult {
  LpStatus status = LpStatus::Optimal;
  double objective = 0.0;
  double dual_bound = 0.0;  // weak-duality bound in the model's sense
  std::vector<double> x;    // structural variable values
  long iterations = 0;
  long phase1_iterations = 0;
  std::string basis_tag;
};

namespace detail {

// One sparse column of the working problem (structurals, slacks, artificials).
struct SimplexCol {
  std::vector<std::pair<int, double>> entries;  // (row, coefficient)
  double lb = 0.0;
  double ub = kInf;
  double cost1 = 0.0;  // phase-1 cost (1 for artificials)
  double cost2 = 0.0;  // phase-2 cost, internal minimize sense
};

enum : signed char { kAtLower = 0, kAtUpper = 1, kBasic = 2, kFree = 3 };

class Simplex {
 public:
  Simplex(const OptModel& model, const std::vector<double>& lb,
          const std::vector<double>& ub, const LpOptions& opt)
      : model_(model), opt_(opt) {
    nrows_ = static_cast<int>(model.rows.size());
    nstruct_ = static_cast<int>(model.vars.size());
    cols_.resize(static_cast<size_t>(nstruct_ + 2 * nrows_));
    b_.resize(static_cast<size_t>(nrows_));
    for (int j = 0; j < nstruct_; ++j) {
      cols_[static_cast<size_t>(j)].lb = lb[static_cast<size_t>(j)];
      cols_[static_cast<size_t>(j)].ub = ub[static_cast<size_t>(j)];
    }
    for (const auto& row : model.rows) {
      b_[static_cast<size_t>(row.id)] = row.rhs;
      for (const auto& t : row.terms)
        cols_[static_cast<size_t>(t.var)].entries.push_back({row.id, t.coef});
      SimplexCol& slack = cols_[static_cast<size_t>(nstruct_ + row.id)];
      slack.entries.push_back({row.id, 1.0});
      switch (row.sense) {
        case RowSense::LE: slack.lb = 0.0; slack.ub = kInf; break;
        case RowSense::GE: slack.lb = -kInf; slack.ub = 0.0; break;
        case RowSense::EQ: slack.lb = 0.0; slack.ub = 0.0; break;
      }
    }
    const double obj_sign = model.sense == ObjSense::Maximize ? -1.0 : 1.0;
    for (const auto& t : model.objective)
      cols_[static_cast<size_t>(t.var)].cost2 = obj_sign * t.coef;
    for (const auto& c : cols_) cmax_ = std::max(cmax_, std::fabs(c.cost2));
    for (double v : b_) bmax_ = std::max(bmax_, std::fabs(v));
    max_pivots_ = opt.max_pivots > 0
                      ? opt.max_pivots
                      : 100000 + 50L * (nrows_ + nstruct_ + 2 * nrows_);
  }

  LpResult run() {
    LpResult res;
    for (int j = 0; j < nstruct_; ++j)
      if (cols_[static_cast<size_t>(j)].lb > cols_[static_cast<size_t>(j)].ub) {
        res.status = LpStatus::Infeasible;
        return res;
      }
    init_state();
    // Phase 1: drive the artificial variables to zero.
    phase_ = 1;
    Outcome out = iterate();
    res.phase1_iterations = iterations_;
    if (out == Outcome::PivotLimit)
      throw SolverFailure("simplex: pivot limit exceeded in phase 1");
    if (out == Outcome::Unbounded)
      throw SolverFailure("simplex: phase-1 objective unbounded (internal error)");
    if (!phase1_feasible()) {
      res.status = LpStatus::Infeasible;
      res.iterations = iterations_;
      return res;
    }
    // Artificials may stay basic at (near) zero; their bounds collapse so
    // they can never carry value again.
    for (int j = nstruct_ + nrows_; j < ncols(); ++j) {
      cols_[static_cast<size_t>(j)].lb = 0.0;
      cols_[static_cast<size_t>(j)].ub = 0.0;
      if (state_[static_cast<size_t>(j)] != kBasic) {
        state_[static_cast<size_t>(j)] = kAtLower;
        val_[static_cast<size_t>(j)] = 0.0;
      }
    }
    phase_ = 2;
    out = iterate();
    if (out == Outcome::PivotLimit)
      throw SolverFailure("simplex: pivot limit exceeded in phase 2");
    if (out == Outcome::Unbounded) {
      res.status = LpStatus::Unbounded;
      res.iterations = iterations_;
      return res;
    }
    res.status = out == Outcome::TargetReached ? LpStatus::TargetReached : LpStatus::Optimal;
    res.iterations = iterations_;
    finalize(res);
    return res;
  }

 private:
  enum class Outcome { Optimal, Unbounded, PivotLimit, TargetReached };

  int ncols() const { return static_cast<int>(cols_.size()); }

  void init_state() {
    // Every row gets an artificial column sized to the initial residual; the
    // artificials form the (trivially invertible) starting basis.
    val_.assign(cols_.size(), 0.0);
    state_.assign(cols_.size(), kAtLower);
    for (int j = 0; j < nstruct_ + nrows_; ++j) {
      SimplexCol& c = cols_[static_cast<size_t>(j)];
      if (std::isfinite(c.lb)) {
        val_[static_cast<size_t>(j)] = c.lb;
        state_[static_cast<size_t>(j)] = kAtLower;
      } else if (std::isfinite(c.ub)) {
        val_[static_cast<size_t>(j)] = c.ub;
        state_[static_cast<size_t>(j)] = kAtUpper;
      } else {
        val_[static_cast<size_t>(j)] = 0.0;
        state_[static_cast<size_t>(j)] = kFree;
      }
    }
    std::vector<double> resid = b_;
    for (int j = 0; j < nstruct_ + nrows_; ++j) {
      const double v = val_[static_cast<size_t>(j)];
      if (v == 0.0) continue;
      for (const auto& [row, a] : cols_[static_cast<size_t>(j)].entries)
        resid[static_cast<size_t>(row)] -= a * v;
    }
    basis_.resize(static_cast<size_t>(nrows_));
    xb_.resize(static_cast<size_t>(nrows_));
    binv_ = DenseMatrix::identity(nrows_);
    for (int i = 0; i < nrows_; ++i) {
      const int aj = nstruct_ + nrows_ + i;
      SimplexCol& art = cols_[static_cast<size_t>(aj)];
      const double sign = resid[static_cast<size_t>(i)] < 0 ? -1.0 : 1.0;
      art.entries = {{i, sign}};
      art.lb = 0.0;
      art.ub = kInf;
      art.cost1 = 1.0;
      binv_(i, i) = sign;  // B = diag(sign) is its own inverse
      basis_[static_cast<size_t>(i)] = aj;
      state_[static_cast<size_t>(aj)] = kBasic;
      xb_[static_cast<size_t>(i)] = std::fabs(resid[static_cast<size_t>(i)]);
    }
    degen_count_ = 0;
    bland_ = false;
    pivots_since_refactor_ = 0;
  }

  double cost(int j) const {
    const SimplexCol& c = cols_[static_cast<size_t>(j)];
    return phase_ == 1 ? c.cost1 : c.cost2;
  }

  double current_objective() const {
    double obj = 0;
    for (int j = 0; j < ncols(); ++j) {
      const double v = state_[static_cast<size_t>(j)] == kBasic
                           ? 0.0
                           : val_[static_cast<size_t>(j)];
      if (v != 0.0) obj += cost(j) * v;
    }
    for (int i = 0; i < nrows_; ++i)
      obj += cost(basis_[static_cast<size_t>(i)]) * xb_[static_cast<size_t>(i)];
    return obj;
  }

  bool phase1_feasible() {
    refactor();
    // The extended system Ax + artificials = b holds at every iterate, so row
    // residuals prove nothing. Infeasibility shows up as artificial columns
    // stuck at positive values once phase 1 runs out of improving pivots.
    const std::vector<double> x = current_point();
    double infeas = 0.0;
    for (int j = nstruct_ + nrows_; j < ncols(); ++j)
      infeas += std::fabs(x[static_cast<size_t>(j)]);
    return infeas <= opt_.feas_tol * (1.0 + bmax_);
  }

  // Values of every column at the current iterate.
  std::vector<double> current_point() const {
    std::vector<double> x(cols_.size());
    for (int j = 0; j < ncols(); ++j)
      x[static_cast<size_t>(j)] =
          state_[static_cast<size_t>(j)] == kBasic ? 0.0 : val_[static_cast<size_t>(j)];
    for (int i = 0; i < nrows_; ++i)
      x[static_cast<size_t>(basis_[static_cast<size_t>(i)])] = xb_[static_cast<size_t>(i)];
    return x;
  }

  void refactor() {
    if (nrows_ == 0) return;
    DenseMatrix B(nrows_, nrows_);
    for (int i = 0; i < nrows_; ++i)
      for (const auto& [row, a] : cols_[static_cast<size_t>(basis_[static_cast<size_t>(i)])].entries)
        B(row, i) = a;
    auto inv = invert(std::move(B), 1e-12);
    if (!inv) throw SolverFailure("simplex: singular basis at refactorization");
    binv_ = std::move(*inv);
    std::vector<double> rhs = b_;
    for (int j = 0; j < ncols(); ++j) {
      if (state_[static_cast<size_t>(j)] == kBasic) continue;
      const double v = val_[static_cast<size_t>(j)];
      if (v == 0.0) continue;
      for (const auto& [row, a] : cols_[static_cast<size_t>(j)].entries)
        rhs[static_cast<size_t>(row)] -= a * v;
    }
    for (int i = 0; i < nrows_; ++i) {
      double s = 0;
      const double* bi = binv_.row(i);
      for (int k = 0; k < nrows_; ++k) s += bi[k] * rhs[static_cast<size_t>(k)];
      xb_[static_cast<size_t>(i)] = s;
    }
    pivots_since_refactor_ = 0;
  }

  // Duals for the current phase costs: y = c_B^T B^{-1}.
  std::vector<double> duals() const {
    std::vector<double> y(static_cast<size_t>(nrows_), 0.0);
    for (int i = 0; i < nrows_; ++i) {
      const double cb = cost(basis_[static_cast<size_t>(i)]);
      if (cb == 0.0) continue;
      const double* bi = binv_.row(i);
      for (int k = 0; k < nrows_; ++k) y[static_cast<size_t>(k)] += cb * bi[k];
    }
    return y;
  }

  double reduced_cost(int j, const std::vector<double>& y) const {
    double d = cost(j);
    for (const auto& [row, a] : cols_[static_cast<size_t>(j)].entries)
      d -= y[static_cast<size_t>(row)] * a;
    return d;
  }

  Outcome iterate() {
    const double dual_tol = 1e-9 * (1.0 + cmax_);
    int stable_confirmations = 0;
    while (true) {
      if (iterations_ >= max_pivots_) return Outcome::PivotLimit;
      if (phase_ == 1) {
        // Early exit once all artificials are (numerically) zero.
        if (current_objective() <= 1e-12 * (1.0 + bmax_)) return Outcome::Optimal;
      } else if (!std::isnan(opt_.objective_target)) {
        const double internal = current_objective();
        const double orig =
            model_.sense == ObjSense::Maximize ? -internal : internal;
        const bool reached = model_.sense == ObjSense::Maximize
                                 ? orig >= opt_.objective_target
                                 : orig <= opt_.objective_target;
        if (reached) return Outcome::TargetReached;
      }

      const std::vector<double> y = duals();
      int enter = -1;
      double best_score = dual_tol;
      int enter_dir = +1;
      for (int j = 0; j < ncols(); ++j) {
        const signed char st = state_[static_cast<size_t>(j)];
        if (st == kBasic) continue;
        const SimplexCol& c = cols_[static_cast<size_t>(j)];
        if (c.lb == c.ub) continue;  // fixed: can never move
        const double d = reduced_cost(j, y);
        int dir = 0;
        if (st == kAtLower && d < -dual_tol) dir = +1;
        else if (st == kAtUpper && d > dual_tol) dir = -1;
        else if (st == kFree && std::fabs(d) > dual_tol) dir = d < 0 ? +1 : -1;
        if (dir == 0) continue;
        if (bland_) {
          enter = j;
          enter_dir = dir;
          break;  // Bland: first (lowest-id) eligible column
        }
        const double score = std::fabs(d);
        if (score > best_score) {
          best_score = score;
          enter = j;
          enter_dir = dir;
        }
      }
      if (enter < 0) {
        // Claimed optimal: refactor once and confirm pricing on the clean
        // inverse before accepting, to rule out drift-induced stops.
        if (nrows_ > 0 && stable_confirmations < 2 && pivots_since_refactor_ > 0) {
          refactor();
          ++stable_confirmations;
          continue;
        }
        return Outcome::Optimal;
      }
      stable_confirmations = 0;

      // Direction through the basis: x_B(t) = x_B - sigma * t * w.
      const SimplexCol& ecol = cols_[static_cast<size_t>(enter)];
      std::vector<double> w(static_cast<size_t>(nrows_), 0.0);
      for (const auto& [row, a] : ecol.entries) {
        if (a == 0.0) continue;
        for (int i = 0; i < nrows_; ++i)
          w[static_cast<size_t>(i)] += binv_(i, row) * a;
      }
      const double sigma = enter_dir;

      double t_best = kInf;
      int leave = -1;        // -1 = bound flip of the entering column
      double leave_bound = 0;
      bool leave_at_lower = true;
      const double span = ecol.ub - ecol.lb;
      if (std::isfinite(span)) t_best = span;
      for (int i = 0; i < nrows_; ++i) {
        const double delta = sigma * w[static_cast<size_t>(i)];
        if (std::fabs(delta) <= opt_.pivot_tol) continue;
        const int bj = basis_[static_cast<size_t>(i)];
        const SimplexCol& bc = cols_[static_cast<size_t>(bj)];
        double t_i;
        bool hits_lower;
        if (delta > 0) {
          if (!std::isfinite(bc.lb)) continue;
          t_i = (xb_[static_cast<size_t>(i)] - bc.lb) / delta;
          hits_lower = true;
        } else {
          if (!std::isfinite(bc.ub)) continue;
          t_i = (bc.ub - xb_[static_cast<size_t>(i)]) / (-delta);
          hits_lower = false;
        }
        if (t_i < 0) t_i = 0;  // tolerate slight bound drift
        bool better = t_i < t_best - 1e-12;
        if (!better && t_i < t_best + 1e-12 && leave >= 0) {
          // Tie-break: larger pivot magnitude for stability; under Bland's
          // rule, lowest leaving variable id for the anti-cycling guarantee.
          if (bland_)
            better = bj < basis_[static_cast<size_t>(leave)];
          else
            better = std::fabs(w[static_cast<size_t>(i)]) >
                     std::fabs(w[static_cast<size_t>(leave)]);
        }
        if (better) {
          t_best = t_i;
          leave = i;
          leave_bound = hits_lower ? bc.lb : bc.ub;
          leave_at_lower = hits_lower;
        }
      }
      if (!std::isfinite(t_best)) return Outcome::Unbounded;

      ++iterations_;
      if (opt_.trace)
        *opt_.trace << "pivot it=" << iterations_ << " phase=" << phase_
                    << " enter=" << enter << " leave="
                    << (leave < 0 ? -1 : basis_[static_cast<size_t>(leave)])
                    << " t=" << t_best << "\n";
      if (t_best <= 1e-10) {
        if (++degen_count_ >= 5L * (nrows_ + ncols()) && !bland_) {
          bland_ = true;
          if (opt_.trace) *opt_.trace << "switching to Bland's rule\n";
        }
      }

      if (leave < 0) {
        // Bound flip: the entering variable runs to its opposite bound.
        for (int i = 0; i < nrows_; ++i)
          xb_[static_cast<size_t>(i)] -= sigma * t_best * w[static_cast<size_t>(i)];
        val_[static_cast<size_t>(enter)] =
            sigma > 0 ? ecol.ub : ecol.lb;
        state_[static_cast<size_t>(enter)] =
            sigma > 0 ? kAtUpper : kAtLower;
        continue;
      }

      // Pivot: update basics, swap entering/leaving, rank-1 update of B^{-1}.
      const double piv = w[static_cast<size_t>(leave)];
      if (std::fabs(piv) < opt_.pivot_tol) {
        refactor();
        continue;  // re-price on the clean inverse
      }
      for (int i = 0; i < nrows_; ++i)
        xb_[static_cast<size_t>(i)] -= sigma * t_best * w[static_cast<size_t>(i)];
      const double enter_val = val_[static_cast<size_t>(enter)] + sigma * t_best;
      const int leaving_var = basis_[static_cast<size_t>(leave)];
      val_[static_cast<size_t>(leaving_var)] = leave_bound;
      state_[static_cast<size_t>(leaving_var)] = leave_at_lower ? kAtLower : kAtUpper;
      basis_[static_cast<size_t>(leave)] = enter;
      state_[static_cast<size_t>(enter)] = kBasic;
      xb_[static_cast<size_t>(leave)] = enter_val;

      double* prow = binv_.row(leave);
      for (int k = 0; k < nrows_; ++k) prow[k] /= piv;
      for (int i = 0; i < nrows_; ++i) {
        if (i == leave) continue;
        const double f = w[static_cast<size_t>(i)];
        if (f == 0.0) continue;
        double* ri = binv_.row(i);
        for (int k = 0; k < nrows_; ++k) ri[k] -= f * prow[k];
      }
      if (++pivots_since_refactor_ >= opt_.refactor_every) refactor();
    }
  }

  void finalize(LpResult& res) {
    refactor();
    std::vector<double> x = current_point();
    res.x.assign(x.begin(), x.begin() + nstruct_);
    res.objective = objective_value(model_, res.x);

    // Residual guard: never return a silently-corrupted answer.
    ViolationReport vr = evaluate_solution(model_, res.x);
    const double worst = std::max(vr.constraint, vr.bound);
    if (res.status == LpStatus::Optimal && worst > opt_.feas_tol)
      throw SolverFailure("simplex: accepted point violates |" + vr.worst_tag +
                          "| by " + format_double(worst));

    // Weak-duality bound from the final duals, clamping reduced costs that
    // are dual-infeasible only at noise level.
    const std::vector<double> y = duals();
    double bound = 0;
    for (int i = 0; i < nrows_; ++i) bound += y[static_cast<size_t>(i)] * b_[static_cast<size_t>(i)];
    const double clamp = 1e-7 * (1.0 + cmax_);
    for (int j = 0; j < ncols(); ++j) {
      const SimplexCol& c = cols_[static_cast<size_t>(j)];
      if (c.lb == c.ub) {
        bound += reduced_cost(j, y) * c.lb;
        continue;
      }
      const double d = reduced_cost(j, y);
      if (std::fabs(d) <= clamp) continue;
      const double pick = d > 0 ? c.lb : c.ub;
      if (!std::isfinite(pick)) {
        bound = -kInf;
        break;
      }
      bound += d * pick;
    }
    res.dual_bound = model_.sense == ObjSense::Maximize ? -bound : bound;

    std::uint64_t h = 1469598103934665603ULL;
    for (int i = 0; i < nrows_; ++i)
      h = fnv1a_append(h, static_cast<std::int64_t>(basis_[static_cast<size_t>(i)]));
    res.basis_tag = hex64(h);
  }

  const OptModel& model_;
  LpOptions opt_;
  int nrows_ = 0;
  int nstruct_ = 0;
  std::vector<SimplexCol> cols_;
  std::vector<double> b_;
  double cmax_ = 0.0;
  double bmax_ = 0.0;
  long max_pivots_ = 0;

  int phase_ = 1;
  std::vector<int> basis_;
  std::vector<double> xb_;
  std::vector<double> val_;
  std::vector<signed char> state_;
  DenseMatrix binv_;
  long iterations_ = 0;
  long degen_count_ = 0;
  bool bland_ = false;
  int pivots_since_refactor_ = 0;
};

}  // namespace detail

inline LpResult solve_lp_bounded(const OptModel& m, const std::vector<double>& lb,
                                 const std::vector<double>& ub, const LpOptions& opt = {}) {
  if (lb.size() != m.vars.size() || ub.size() != m.vars.size())
    throw ModelMismatchError("bound vectors do not match variable count");
  detail::Simplex s(m, lb, ub, opt);
  return s.run();
}

inline LpResult solve_lp(const OptModel& m, const LpOptions& opt = {}) {
  std::vector<double> lb, ub;
  lb.reserve(m.vars.size());
  ub.reserve(m.vars.size());
  for (const auto& v : m.vars) {
    lb.push_back(v.lower);
    ub.push_back(v.upper);
  }
  return solve_lp_bounded(m, lb, ub, opt);
}

// ---------------------------------------------------------------------------
// Branch and bound
// ---------------------------------------------------------------------------

struct MilpOptions {
  LpOptions lp;
  long node_budget = 1000000;
  bool round_up_heuristic = true;
};

struct MilpResult {
  LpStatus status = LpStatus::Optimal;
  double objective = 0.0;
  double best_bound = 0.0;
  std::vector<double> x;
  long explored_nodes = 0;
  long lp_iterations = 0;
  std::string basis_tag;
};

namespace detail {

// A binary can be rounded up without losing feasibility iff every row it
// appears in only gets slacker when it grows.
inline std::vector<bool> round_up_safe(const OptModel& m) {
  std::vector<bool> safe(m.vars.size(), true);
  for (const auto& row : m.rows)
    for (const auto& t : row.terms) {
      const bool ok = (row.sense == RowSense::LE && t.coef <= 0) ||
                      (row.sense == RowSense::GE && t.coef >= 0);
      if (!ok) safe[static_cast<size_t>(t.var)] = false;
    }
  return safe;
}

struct BnbNode {
  long id = 0;
  double parent_bound = 0.0;                  // internal (minimize) sense
  std::vector<std::pair<int, double>> fixes;  // (binary var, 0.0 or 1.0)
};

struct BnbNodeOrder {
  bool operator()(const BnbNode& a, const BnbNode& b) const {
    if (a.parent_bound != b.parent_bound) return a.parent_bound > b.parent_bound;
    return a.id > b.id;  // min-heap: lowest bound first, then lowest id
  }
};

}  // namespace detail

inline MilpResult solve_milp(const OptModel& m, const MilpOptions& opt = {}) {
  std::vector<int> binaries;
  for (const auto& v : m.vars)
    if (v.kind == VarKind::Binary) binaries.push_back(v.id);

  MilpResult res;
  if (binaries.empty()) {
    LpResult lp = solve_lp(m, opt.lp);
    res.status = lp.status;
    res.objective = lp.objective;
    res.best_bound = lp.objective;
    res.x = std::move(lp.x);
    res.explored_nodes = 1;
    res.lp_iterations = lp.iterations;
    res.basis_tag = std::move(lp.basis_tag);
    return res;
  }

  const double key_sign = m.sense == ObjSense::Maximize ? -1.0 : 1.0;
  auto key_of = [&](double obj) { return key_sign * obj; };

  std::vector<double> root_lb, root_ub;
  for (const auto& v : m.vars) {
    root_lb.push_back(v.lower);
    root_ub.push_back(v.upper);
  }
  LpOptions node_opt = opt.lp;
  node_opt.objective_target = std::numeric_limits<double>::quiet_NaN();

  bool have_incumbent = false;
  double incumbent_key = kInf;
  std::vector<double> incumbent_x;
  std::string incumbent_basis;
  const std::vector<bool> safe_up = detail::round_up_safe(m);

  auto try_incumbent = [&](const std::vector<double>& x, const std::string& basis_tag) {
    const double key = key_of(objective_value(m, x));
    if (!have_incumbent || key < incumbent_key - 1e-12 * (1.0 + std::fabs(incumbent_key))) {
      have_incumbent = true;
      incumbent_key = key;
      incumbent_x = x;
      incumbent_basis = basis_tag;
    }
  };

  std::priority_queue<detail::BnbNode, std::vector<detail::BnbNode>, detail::BnbNodeOrder> open;
  open.push(detail::BnbNode{0, -kInf, {}});
  long next_id = 1;

  while (!open.empty()) {
    detail::BnbNode node = open.top();
    open.pop();
    const double prune_margin = 1e-9 * std::max(1.0, std::fabs(incumbent_key));
    if (have_incumbent && node.parent_bound >= incumbent_key - prune_margin) continue;
    if (res.explored_nodes >= opt.node_budget) {
      const double gap = have_incumbent
                             ? (incumbent_key - node.parent_bound) /
                                   std::max(1.0, std::fabs(incumbent_key))
                             : kInf;
      throw ResourceLimitError("branch-and-bound node budget exhausted (" +
                               std::to_string(opt.node_budget) +
                               " nodes); remaining relative gap " + format_double(gap));
    }
    ++res.explored_nodes;

    std::vector<double> lb = root_lb, ub = root_ub;
    for (const auto& [var, val] : node.fixes) {
      lb[static_cast<size_t>(var)] = val;
      ub[static_cast<size_t>(var)] = val;
    }
    LpResult lp;
    try {
      lp = solve_lp_bounded(m, lb, ub, node_opt);
    } catch (const SolverFailure&) {
      throw;  // surfaced with context by callers
    }
    res.lp_iterations += lp.iterations;
    if (opt.lp.trace)
      *opt.lp.trace << "bnb node=" << node.id << " status=" << to_string(lp.status)
                    << " obj=" << lp.objective << " depth=" << node.fixes.size() << "\n";
    if (lp.status == LpStatus::Infeasible) continue;
    if (lp.status == LpStatus::Unbounded)
      throw SolverFailure("branch-and-bound: relaxation unbounded");

    const double bound_key = key_of(lp.objective);
    if (have_incumbent && bound_key >= incumbent_key - prune_margin) continue;

    // Fractional binaries; branch on the one closest to one half.
    int branch_var = -1;
    double branch_score = kInf;  // |x - 0.5|, smaller = more fractional
    for (int bv : binaries) {
      const double xv = lp.x[static_cast<size_t>(bv)];
      if (std::fabs(xv - std::round(xv)) <= opt.lp.int_tol) continue;
      const double score = std::fabs(xv - 0.5);
      if (score < branch_score - 1e-15) {
        branch_score = score;
        branch_var = bv;
      }
    }
    if (branch_var < 0) {
      try_incumbent(lp.x, lp.basis_tag);
      continue;
    }

    // Root-node rounding heuristic: push safely-roundable fractional
    // binaries to 1 and keep the point if it is genuinely feasible.
    if (node.id == 0 && opt.round_up_heuristic) {
      std::vector<double> rounded = lp.x;
      bool viable = true;
      for (int bv : binaries) {
        double& xv = rounded[static_cast<size_t>(bv)];
        if (std::fabs(xv - std::round(xv)) <= opt.lp.int_tol) continue;
        if (safe_up[static_cast<size_t>(bv)] && ub[static_cast<size_t>(bv)] >= 1.0)
          xv = 1.0;
        else
          viable = false;
      }
      if (viable) {
        ViolationReport vr = evaluate_solution(m, rounded);
        if (vr.max_violation() <= opt.lp.feas_tol) try_incumbent(rounded, "heuristic");
      }
    }

    detail::BnbNode down{next_id++, bound_key, node.fixes};
    down.fixes.emplace_back(branch_var, 0.0);
    detail::BnbNode up{next_id++, bound_key, node.fixes};
    up.fixes.emplace_back(branch_var, 1.0);
    open.push(std::move(down));
    open.push(std::move(up));
  }

  if (!have_incumbent) {
    res.status = LpStatus::Infeasible;
    return res;
  }
  res.status = LpStatus::Optimal;
  res.x = std::move(incumbent_x);
  res.objective = objective_value(m, res.x);
  res.best_bound = res.objective;  // tree exhausted: bound met the incumbent
  res.basis_tag = std::move(incumbent_basis);
  return res;
}

// ---------------------------------------------------------------------------
// Certification
// ---------------------------------------------------------------------------

struct CertificateReport {
  bool ok = false;
  double max_violation = 0.0;
  double constraint_violation = 0.0;
  double bound_violation = 0.0;
  double integrality_violation = 0.0;
  std::string worst_tag;
};

// Independent re-evaluation of a claimed solution against the model.
inline CertificateReport check_solution(const OptModel& m, const std::vector<double>& x,
                                        double tol = 1e-6) {
  ViolationReport vr = evaluate_solution(m, x);
  CertificateReport rep;
  rep.constraint_violation = vr.constraint;
  rep.bound_violation = vr.bound;
  rep.integrality_violation = vr.integrality;
  rep.max_violation = vr.max_violation();
  rep.worst_tag = vr.worst_tag;
  rep.ok = rep.max_violation <= tol;
  return rep;
}

}  // namespace shuffleopt
