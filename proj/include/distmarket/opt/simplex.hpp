// Bounded-variable primal simplex with two phases, devex pricing, and a
// Bland's-rule fallback after a run of degenerate pivots. Dense basis inverse
// maintained by product-form updates with periodic refactorization.
#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "distmarket/opt/model.hpp"

namespace distmarket::opt {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SimplexOptions {
  double feas_tol = 1e-7;     // accepted bound/row violation at optimum
  double dual_tol = 1e-9;     // reduced-cost optimality threshold (scaled)
  double pivot_tol = 1e-9;    // smallest acceptable pivot element
  int refactor_period = 600;  // pivots between basis rebuilds
  long max_iter = 0;          // 0 = automatic from problem size
};

// One instance holds the column-wise copy of a LinearProgram and can solve it
// repeatedly under different variable bounds (used by branch and bound, which
// re-solves every node cold). Instances are independent; a single instance is
// single-threaded; the model is not touched after construction.
class SimplexSolver {
 public:
  explicit SimplexSolver(const LinearProgram& model,
                         SimplexOptions opts = SimplexOptions{})
      : opts_(opts) {
    n_ = model.num_vars();
    m_ = model.num_rows();
    sense_flip_ = model.objective_sense() == ObjSense::Maximize ? -1.0 : 1.0;
    obj_.resize(n_);
    base_lo_.resize(n_);
    base_up_.resize(n_);
    for (int j = 0; j < n_; ++j) {
      const Variable& v = model.var(j);
      obj_[j] = sense_flip_ * v.obj;
      base_lo_[j] = v.lower;
      base_up_[j] = v.upper;
    }
    cols_.resize(n_);
    rhs_.resize(m_);
    slack_lo_.resize(m_);
    slack_up_.resize(m_);
    for (int i = 0; i < m_; ++i) {
      const Constraint& r = model.row(i);
      rhs_[i] = r.rhs;
      for (const RowTerm& t : r.terms) cols_[t.var].push_back({i, t.coeff});
      switch (r.sense) {
        case RowSense::LessEqual:
          slack_lo_[i] = 0.0;
          slack_up_[i] = kInf;
          break;
        case RowSense::GreaterEqual:
          slack_lo_[i] = -kInf;
          slack_up_[i] = 0.0;
          break;
        case RowSense::Equal:
          slack_lo_[i] = 0.0;
          slack_up_[i] = 0.0;
          break;
      }
    }
    cost_scale_ = 1.0;
    for (double c : obj_) cost_scale_ = std::max(cost_scale_, std::abs(c));
  }

  int num_rows() const { return m_; }
  int num_vars() const { return n_; }

  LpSolution solve() { return solve_with_bounds(base_lo_, base_up_); }

  // Solve with substituted structural bounds (size n). Binary fixings from
  // branch and bound arrive this way; every solve starts from a slack basis.
  LpSolution solve_with_bounds(const std::vector<double>& lo_struct,
                               const std::vector<double>& up_struct) {
    for (int attempt = 0;; ++attempt) {
      // Escalation ladder on numerical failure: coarser pivots, then Bland.
      mode_ = attempt;
      try {
        return run(lo_struct, up_struct);
      } catch (const RefactorFailure&) {
        if (attempt >= 2)
          throw SolverError("simplex: repeated basis refactorization failure");
      }
    }
  }

 private:
  struct RefactorFailure {};

  enum class VStat : uint8_t { AtLower, AtUpper, Free, Basic };

  SimplexOptions opts_;
  int n_ = 0, m_ = 0;
  int mode_ = 0;
  double sense_flip_ = 1.0;
  double cost_scale_ = 1.0;
  std::vector<std::vector<std::pair<int, double>>> cols_;  // structural only
  std::vector<double> obj_, base_lo_, base_up_;
  std::vector<double> rhs_, slack_lo_, slack_up_;

  // per-solve state
  int ncols_ = 0;  // n + m + artificials
  int nart_ = 0;
  std::vector<double> lo_, up_, x_, cost_, d_, w_;
  std::vector<int8_t> art_sign_;
  std::vector<int> art_row_;
  std::vector<VStat> stat_;
  std::vector<int> basis_;    // basis position -> col
  std::vector<int> bas_row_;  // col -> basis position, -1 if nonbasic
  std::vector<double> binv_;  // m*m row-major; [position][constraint row]
  std::vector<double> alpha_, rho_, work_m_;
  long iter_ = 0;
  long iters_since_refactor_ = 0;
  long degen_streak_ = 0;
  int pivot_rejections_ = 0;
  bool bland_ = false;
  bool phase1_ = false;

  bool is_slack(int j) const { return j >= n_ && j < n_ + m_; }
  bool is_art(int j) const { return j >= n_ + m_; }

  double pivot_accept_tol() const {
    return mode_ >= 1 ? opts_.pivot_tol * 100.0 : opts_.pivot_tol;
  }

  // v' * A_j for any column kind
  double col_entry_dot(int j, const std::vector<double>& v) const {
    if (j < n_) {
      double s = 0.0;
      for (const auto& [i, a] : cols_[j]) s += v[i] * a;
      return s;
    }
    if (is_slack(j)) return v[j - n_];
    int k = j - n_ - m_;
    return static_cast<double>(art_sign_[k]) * v[art_row_[k]];
  }

  LpSolution run(const std::vector<double>& lo_struct,
                 const std::vector<double>& up_struct) {
    setup(lo_struct, up_struct);
    LpSolution out;

    if (nart_ > 0) {
      phase1_ = true;
      load_phase1_costs();
      main_loop();  // phase-1 objective is bounded below by zero
      refresh(true);
      if (any_eligible()) main_loop();
      double infeas = phase1_objective();
      if (infeas > opts_.feas_tol * (1.0 + rhs_scale())) {
        out.status = SolveStatus::Infeasible;
        out.iterations = iter_;
        return out;
      }
      purge_artificials();
    }

    phase1_ = false;
    load_phase2_costs();
    recompute_duals_and_reduced_costs();
    reset_devex();
    for (int round = 0;; ++round) {
      LoopExit e = main_loop();
      if (e == LoopExit::Unbounded) {
        out.status = SolveStatus::Unbounded;
        out.iterations = iter_;
        return out;
      }
      refresh(true);
      if (round >= 3 || !any_eligible()) break;
    }

    out.status = SolveStatus::Optimal;
    out.iterations = iter_;
    out.values.assign(x_.begin(), x_.begin() + n_);
    double obj = 0.0;
    for (int j = 0; j < n_; ++j) obj += obj_[j] * x_[j];
    out.objective = sense_flip_ * obj;
    // y' = c_B' B^-1; reported dual is d(reported objective)/d(rhs).
    std::vector<double> y = btran_costs();
    out.duals.resize(m_);
    for (int i = 0; i < m_; ++i) out.duals[i] = sense_flip_ * y[i];
    return out;
  }

  double rhs_scale() const {
    double s = 1.0;
    for (double b : rhs_) s = std::max(s, std::abs(b));
    return s;
  }

  void setup(const std::vector<double>& lo_struct,
             const std::vector<double>& up_struct) {
    ncols_ = n_ + m_;
    nart_ = 0;
    art_sign_.clear();
    art_row_.clear();
    lo_.assign(ncols_, 0.0);
    up_.assign(ncols_, 0.0);
    x_.assign(ncols_, 0.0);
    stat_.assign(ncols_, VStat::AtLower);
    bas_row_.assign(ncols_, -1);
    basis_.assign(m_, -1);
    iter_ = 0;
    iters_since_refactor_ = 0;
    degen_streak_ = 0;
    pivot_rejections_ = 0;
    bland_ = mode_ >= 2;

    for (int j = 0; j < n_; ++j) {
      lo_[j] = lo_struct[j];
      up_[j] = up_struct[j];
      if (lo_[j] > up_[j])
        throw ModelError("simplex: crossed bounds on variable " +
                         std::to_string(j));
      if (std::isfinite(lo_[j])) {
        stat_[j] = VStat::AtLower;
        x_[j] = lo_[j];
      } else if (std::isfinite(up_[j])) {
        stat_[j] = VStat::AtUpper;
        x_[j] = up_[j];
      } else {
        stat_[j] = VStat::Free;
        x_[j] = 0.0;
      }
    }
    for (int i = 0; i < m_; ++i) {
      lo_[n_ + i] = slack_lo_[i];
      up_[n_ + i] = slack_up_[i];
    }

    // Row activity of the nonbasic structurals decides slack vs artificial
    // start per row.
    std::vector<double> act(m_, 0.0);
    for (int j = 0; j < n_; ++j) {
      double xv = x_[j];
      if (xv == 0.0) continue;
      for (const auto& [i, a] : cols_[j]) act[i] += a * xv;
    }
    for (int i = 0; i < m_; ++i) {
      int sj = n_ + i;
      double want = rhs_[i] - act[i];
      if (want >= lo_[sj] && want <= up_[sj]) {
        basis_[i] = sj;
        bas_row_[sj] = i;
        stat_[sj] = VStat::Basic;
        x_[sj] = want;
      } else {
        double clamped = std::clamp(want, lo_[sj], up_[sj]);
        if (!std::isfinite(clamped))
          clamped = std::isfinite(lo_[sj]) ? lo_[sj] : up_[sj];
        x_[sj] = clamped;
        stat_[sj] = clamped == lo_[sj] ? VStat::AtLower : VStat::AtUpper;
        double deficit = want - clamped;
        int aj = n_ + m_ + nart_;
        art_sign_.push_back(deficit >= 0 ? int8_t{1} : int8_t{-1});
        art_row_.push_back(i);
        ++nart_;
        lo_.push_back(0.0);
        up_.push_back(kInf);
        x_.push_back(std::abs(deficit));
        stat_.push_back(VStat::Basic);
        bas_row_.push_back(i);
        basis_[i] = aj;
      }
    }
    ncols_ += nart_;
    cost_.assign(ncols_, 0.0);
    d_.assign(ncols_, 0.0);
    w_.assign(ncols_, 1.0);
    alpha_.assign(m_, 0.0);
    rho_.assign(m_, 0.0);
    work_m_.assign(m_, 0.0);

    // Starting basis is diagonal: slacks (+1) and artificials (+-1).
    binv_.assign(static_cast<size_t>(m_) * m_, 0.0);
    for (int i = 0; i < m_; ++i) {
      int bj = basis_[i];
      double diag = is_art(bj) ? static_cast<double>(art_sign_[bj - n_ - m_]) : 1.0;
      binv_[static_cast<size_t>(i) * m_ + i] = diag;
    }
  }

  void load_phase1_costs() {
    std::fill(cost_.begin(), cost_.end(), 0.0);
    for (int k = 0; k < nart_; ++k) cost_[n_ + m_ + k] = 1.0;
    recompute_duals_and_reduced_costs();
    reset_devex();
  }

  void load_phase2_costs() {
    std::fill(cost_.begin(), cost_.end(), 0.0);
    for (int j = 0; j < n_; ++j) cost_[j] = obj_[j];
  }

  double phase1_objective() const {
    double s = 0.0;
    for (int k = 0; k < nart_; ++k) s += x_[n_ + m_ + k];
    return s;
  }

  void freeze_artificial(int j) {
    lo_[j] = 0.0;
    up_[j] = 0.0;
    if (stat_[j] != VStat::Basic) {
      stat_[j] = VStat::AtLower;
      x_[j] = 0.0;
    }
  }

  // After a feasible phase 1, drive basic artificials out where a usable
  // pivot exists and freeze every artificial at zero.
  void purge_artificials() {
    for (int i = 0; i < m_; ++i) {
      int bj = basis_[i];
      if (!is_art(bj)) continue;
      rho_from_row(i);
      int pick = -1;
      double best = pivot_accept_tol() * 10.0;
      for (int j = 0; j < n_ + m_; ++j) {
        if (stat_[j] == VStat::Basic) continue;
        double t = std::abs(col_entry_dot(j, rho_));
        if (t > best) {
          best = t;
          pick = j;
        }
      }
      if (pick >= 0) {
        ftran(pick);
        pivot_update(i, pick, +1, 0.0, /*update_costs=*/false);
      }
    }
    for (int k = 0; k < nart_; ++k) freeze_artificial(n_ + m_ + k);
  }

  enum class LoopExit { OptimalPhase, Unbounded };

  long iteration_budget() const {
    long b = opts_.max_iter;
    if (b <= 0) b = 20000 + 25L * (m_ + n_);
    return b;
  }

  LoopExit main_loop() {
    const long budget = iteration_budget();
    for (;;) {
      if (iter_ > budget) throw SolverError("simplex: iteration limit exceeded");
      if (iters_since_refactor_ >= opts_.refactor_period) refresh(false);

      int q = price();
      if (q < 0) return LoopExit::OptimalPhase;
      int dir = entering_direction(q);
      ftran(q);

      RatioResult rr = ratio_test(q, dir);
      if (rr.kind == RatioResult::Kind::Unbounded) {
        if (phase1_) throw SolverError("simplex: unbounded phase-1 subproblem");
        return LoopExit::Unbounded;
      }
      if (rr.kind == RatioResult::Kind::Pivot &&
          std::abs(alpha_[rr.row]) < pivot_accept_tol()) {
        // Numerically poor pivot: rebuild and retry with fresh data; switch
        // to Bland's rule if it keeps happening.
        if (++pivot_rejections_ > 6) throw RefactorFailure{};
        if (pivot_rejections_ > 3) bland_ = true;
        refresh(true);
        continue;
      }

      ++iter_;
      ++iters_since_refactor_;
      if (rr.theta <= 1e-12) {
        if (++degen_streak_ > 2L * (m_ + n_)) bland_ = true;
      } else {
        degen_streak_ = 0;
        if (mode_ < 2) bland_ = false;
      }

      if (rr.kind == RatioResult::Kind::BoundFlip) {
        apply_step(q, dir, rr.theta);
        x_[q] = dir > 0 ? up_[q] : lo_[q];
        stat_[q] = dir > 0 ? VStat::AtUpper : VStat::AtLower;
        continue;
      }
      pivot_update(rr.row, q, dir, rr.theta, /*update_costs=*/true);
    }
  }

  int entering_direction(int q) const {
    switch (stat_[q]) {
      case VStat::AtLower: return +1;
      case VStat::AtUpper: return -1;
      case VStat::Free: return d_[q] < 0 ? +1 : -1;
      default: return +1;
    }
  }

  double dual_threshold() const {
    return opts_.dual_tol * (1.0 + (phase1_ ? 1.0 : cost_scale_));
  }

  bool eligible(int j, double tol) const {
    if (stat_[j] == VStat::Basic) return false;
    if (lo_[j] == up_[j]) return false;
    double dj = d_[j];
    switch (stat_[j]) {
      case VStat::AtLower: return dj < -tol;
      case VStat::AtUpper: return dj > tol;
      case VStat::Free: return std::abs(dj) > tol;
      default: return false;
    }
  }

  bool any_eligible() const {
    double tol = dual_threshold();
    for (int j = 0; j < ncols_; ++j)
      if (eligible(j, tol)) return true;
    return false;
  }

  int price() const {
    double tol = dual_threshold();
    if (bland_) {
      for (int j = 0; j < ncols_; ++j)
        if (eligible(j, tol)) return j;
      return -1;
    }
    int best = -1;
    double best_score = 0.0;
    for (int j = 0; j < ncols_; ++j) {
      if (!eligible(j, tol)) continue;
      double dj = d_[j];
      double score = dj * dj / w_[j];
      if (score > best_score) {
        best_score = score;
        best = j;
      }
    }
    return best;
  }

  void ftran(int q) {
    std::fill(alpha_.begin(), alpha_.end(), 0.0);
    if (q < n_) {
      const auto& col = cols_[q];
      for (int i = 0; i < m_; ++i) {
        const double* row = &binv_[static_cast<size_t>(i) * m_];
        double s = 0.0;
        for (const auto& [k, a] : col) s += row[k] * a;
        alpha_[i] = s;
      }
    } else if (is_slack(q)) {
      int k = q - n_;
      for (int i = 0; i < m_; ++i) alpha_[i] = binv_[static_cast<size_t>(i) * m_ + k];
    } else {
      int a = q - n_ - m_;
      int k = art_row_[a];
      double sgn = static_cast<double>(art_sign_[a]);
      for (int i = 0; i < m_; ++i)
        alpha_[i] = sgn * binv_[static_cast<size_t>(i) * m_ + k];
    }
  }

  void rho_from_row(int r) {
    const double* row = &binv_[static_cast<size_t>(r) * m_];
    std::copy(row, row + m_, rho_.begin());
  }

  struct RatioResult {
    enum class Kind { Pivot, BoundFlip, Unbounded } kind = Kind::Unbounded;
    int row = -1;
    double theta = 0.0;
  };

  RatioResult ratio_test(int q, int dir) const {
    double own_cap = kInf;
    if (std::isfinite(lo_[q]) && std::isfinite(up_[q])) own_cap = up_[q] - lo_[q];

    double best_theta = kInf;
    int best_row = -1;
    double best_alpha = 0.0;
    for (int i = 0; i < m_; ++i) {
      double a = alpha_[i];
      if (std::abs(a) < 1e-10) continue;
      int b = basis_[i];
      double dx = -static_cast<double>(dir) * a;  // movement of basic i per theta
      double cap;
      if (dx < 0) {
        if (!std::isfinite(lo_[b])) continue;
        cap = (x_[b] - lo_[b]) / (-dx);
      } else {
        if (!std::isfinite(up_[b])) continue;
        cap = (up_[b] - x_[b]) / dx;
      }
      if (cap < 0) cap = 0;  // basic marginally outside bounds: degenerate block
      bool take = false;
      if (cap < best_theta - 1e-10) {
        take = true;
      } else if (best_row >= 0 && cap <= best_theta + 1e-10) {
        // near-tie: prefer the numerically larger pivot, then the lower row
        double aa = std::abs(a), bb = std::abs(best_alpha);
        take = aa > bb + 1e-12 || (std::abs(aa - bb) <= 1e-12 && i < best_row);
      } else if (best_row < 0 && std::isfinite(cap)) {
        take = true;
      }
      if (take) {
        best_theta = std::min(best_theta, cap);
        best_row = i;
        best_alpha = a;
      }
    }

    RatioResult rr;
    if (own_cap <= best_theta) {
      if (!std::isfinite(own_cap)) return rr;  // unbounded
      rr.kind = RatioResult::Kind::BoundFlip;
      rr.theta = own_cap;
      return rr;
    }
    if (best_row < 0) return rr;  // unbounded
    rr.kind = RatioResult::Kind::Pivot;
    rr.row = best_row;
    rr.theta = best_theta;
    return rr;
  }

  void apply_step(int q, int dir, double theta) {
    if (theta != 0.0) {
      for (int i = 0; i < m_; ++i) {
        double a = alpha_[i];
        if (a == 0.0) continue;
        x_[basis_[i]] -= static_cast<double>(dir) * theta * a;
      }
      x_[q] += static_cast<double>(dir) * theta;
    }
  }

  void pivot_update(int r, int q, int dir, double theta, bool update_costs) {
    int p = basis_[r];
    double piv = alpha_[r];

    apply_step(q, dir, theta);

    // Leaving variable snaps to the bound it reached (finite by the ratio
    // test; degenerate pivots fall back to whichever bound is finite).
    double dxp = -static_cast<double>(dir) * piv;
    double target = dxp < 0 ? lo_[p] : up_[p];
    if (!std::isfinite(target)) {
      target = std::isfinite(lo_[p]) ? lo_[p] : (std::isfinite(up_[p]) ? up_[p] : x_[p]);
    }
    if (std::isfinite(target)) {
      x_[p] = target;
      stat_[p] = target == lo_[p] ? VStat::AtLower : VStat::AtUpper;
    } else {
      stat_[p] = VStat::Free;  // free variable leaves at its current value
    }
    bas_row_[p] = -1;
    if (phase1_ && is_art(p)) freeze_artificial(p);

    rho_from_row(r);

    if (update_costs) {
      double ratio = d_[q] / piv;
      double wref = std::max(w_[q], 1.0) / (piv * piv);
      for (int j = 0; j < ncols_; ++j) {
        if (stat_[j] == VStat::Basic || j == q) continue;
        double t = col_entry_dot(j, rho_);
        if (t != 0.0) {
          d_[j] -= ratio * t;
          double cand = t * t * wref;
          if (cand > w_[j]) w_[j] = cand;
        }
      }
      d_[p] = -ratio;
      w_[p] = std::max(wref, 1.0);
      d_[q] = 0.0;
    }

    // binv <- E * binv with the eta column derived from alpha
    double* rowr = &binv_[static_cast<size_t>(r) * m_];
    double inv_piv = 1.0 / piv;
    for (int k = 0; k < m_; ++k) rowr[k] *= inv_piv;
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      double f = alpha_[i];
      if (f == 0.0) continue;
      double* rowi = &binv_[static_cast<size_t>(i) * m_];
      for (int k = 0; k < m_; ++k) rowi[k] -= f * rowr[k];
    }

    basis_[r] = q;
    bas_row_[q] = r;
    stat_[q] = VStat::Basic;
  }

  std::vector<double> btran_costs() const {
    std::vector<double> y(m_, 0.0);
    for (int i = 0; i < m_; ++i) {
      double cb = cost_[basis_[i]];
      if (cb == 0.0) continue;
      const double* row = &binv_[static_cast<size_t>(i) * m_];
      for (int k = 0; k < m_; ++k) y[k] += cb * row[k];
    }
    return y;
  }

  void recompute_duals_and_reduced_costs() {
    std::vector<double> y = btran_costs();
    for (int j = 0; j < ncols_; ++j) {
      d_[j] = stat_[j] == VStat::Basic ? 0.0 : cost_[j] - col_entry_dot(j, y);
    }
  }

  void reset_devex() { std::fill(w_.begin(), w_.end(), 1.0); }

  void recompute_basics_from_scratch() {
    for (int i = 0; i < m_; ++i) work_m_[i] = rhs_[i];
    for (int j = 0; j < ncols_; ++j) {
      if (stat_[j] == VStat::Basic) continue;
      double xv = x_[j];
      if (xv == 0.0) continue;
      if (j < n_) {
        for (const auto& [i, a] : cols_[j]) work_m_[i] -= a * xv;
      } else if (is_slack(j)) {
        work_m_[j - n_] -= xv;
      } else {
        int k = j - n_ - m_;
        work_m_[art_row_[k]] -= static_cast<double>(art_sign_[k]) * xv;
      }
    }
    for (int i = 0; i < m_; ++i) {
      const double* row = &binv_[static_cast<size_t>(i) * m_];
      double s = 0.0;
      for (int k = 0; k < m_; ++k) s += row[k] * work_m_[k];
      x_[basis_[i]] = s;
    }
  }

  // Rebuild the inverse from the basis column set, then recompute basics,
  // duals, and reduced costs. `full` additionally resets devex weights.
  void refresh(bool full) {
    refactor();
    recompute_basics_from_scratch();
    recompute_duals_and_reduced_costs();
    if (full) reset_devex();
    iters_since_refactor_ = 0;
  }

  void refactor() {
    const size_t mm = static_cast<size_t>(m_);
    std::vector<double> B(mm * mm, 0.0);
    for (int c = 0; c < m_; ++c) {
      int j = basis_[c];
      if (j < n_) {
        for (const auto& [i, a] : cols_[j]) B[static_cast<size_t>(i) * mm + c] = a;
      } else if (is_slack(j)) {
        B[static_cast<size_t>(j - n_) * mm + c] = 1.0;
      } else {
        int k = j - n_ - m_;
        B[static_cast<size_t>(art_row_[k]) * mm + c] =
            static_cast<double>(art_sign_[k]);
      }
    }
    // Gauss-Jordan with partial pivoting; the accumulated inverse maps
    // constraint-row space to basis-position space.
    std::vector<double> inv(mm * mm, 0.0);
    for (int i = 0; i < m_; ++i) inv[static_cast<size_t>(i) * mm + i] = 1.0;
    for (int c = 0; c < m_; ++c) {
      int piv_row = -1;
      double piv_val = 1e-11;
      for (int i = c; i < m_; ++i) {
        double v = std::abs(B[static_cast<size_t>(i) * mm + c]);
        if (v > piv_val) {
          piv_val = v;
          piv_row = i;
        }
      }
      if (piv_row < 0) throw RefactorFailure{};
      if (piv_row != c) {
        for (int k = 0; k < m_; ++k) {
          std::swap(B[static_cast<size_t>(c) * mm + k],
                    B[static_cast<size_t>(piv_row) * mm + k]);
          std::swap(inv[static_cast<size_t>(c) * mm + k],
                    inv[static_cast<size_t>(piv_row) * mm + k]);
        }
      }
      double ip = 1.0 / B[static_cast<size_t>(c) * mm + c];
      double* bc = &B[static_cast<size_t>(c) * mm];
      double* ic = &inv[static_cast<size_t>(c) * mm];
      for (int k = 0; k < m_; ++k) {
        bc[k] *= ip;
        ic[k] *= ip;
      }
      for (int i = 0; i < m_; ++i) {
        if (i == c) continue;
        double f = B[static_cast<size_t>(i) * mm + c];
        if (f == 0.0) continue;
        double* bi = &B[static_cast<size_t>(i) * mm];
        double* ii = &inv[static_cast<size_t>(i) * mm];
        for (int k = 0; k < m_; ++k) {
          bi[k] -= f * bc[k];
          ii[k] -= f * ic[k];
        }
      }
    }
    binv_ = std::move(inv);
  }
};

// Solve the LP relaxation of `model` (binaries relaxed to [0,1]).
inline LpSolution solve_lp(const LinearProgram& model,
                           SimplexOptions opts = SimplexOptions{}) {
  model.validate();
  SimplexSolver solver(model, opts);
  return solver.solve();
}

}  // namespace distmarket::opt
