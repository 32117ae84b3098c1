// Test-only oracles, independent of the solver implementation paths they
// check: KKT residuals recomputed from scratch, brute-force vertex
// enumeration for tiny LPs, and exhaustive binary enumeration for MIPs
// (leaves solved as plain LPs).
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "distmarket/opt/branch_bound.hpp"
#include "distmarket/opt/model.hpp"
#include "distmarket/opt/simplex.hpp"

namespace testsupport {

using distmarket::opt::kInf;
using distmarket::opt::LinearProgram;
using distmarket::opt::LpSolution;
using distmarket::opt::ObjSense;
using distmarket::opt::RowSense;
using distmarket::opt::SolveStatus;

struct KktReport {
  double row_violation = 0.0;    // worst constraint violation
  double bound_violation = 0.0;  // worst variable bound violation
  double dual_sign_violation = 0.0;
  double comp_slackness = 0.0;  // worst |dual| * |slack| product
  double duality_gap = 0.0;     // |primal - dual| / (1 + |primal|)

  bool ok(double feas = 1e-7, double comp = 1e-6, double gap = 1e-6) const {
    return row_violation <= feas && bound_violation <= feas &&
           dual_sign_violation <= comp && comp_slackness <= comp &&
           duality_gap <= gap;
  }
};

// Recompute primal feasibility, dual sign conditions, complementary
// slackness, and the strong-duality gap from the model and solution alone.
inline KktReport check_kkt(const LinearProgram& model, const LpSolution& sol) {
  KktReport rep;
  const int n = model.num_vars();
  const int m = model.num_rows();
  const double flip = model.objective_sense() == ObjSense::Maximize ? -1.0 : 1.0;

  // canonical minimize space
  std::vector<double> c(n), y(m);
  for (int j = 0; j < n; ++j) c[j] = flip * model.var(j).obj;
  for (int i = 0; i < m; ++i) y[i] = flip * sol.duals[i];

  double scale = 1.0;
  for (int j = 0; j < n; ++j) scale = std::max(scale, std::abs(c[j]));

  for (int i = 0; i < m; ++i) {
    const auto& row = model.row(i);
    double act = 0.0;
    double rowscale = 1.0 + std::abs(row.rhs);
    for (const auto& t : row.terms) {
      act += t.coeff * sol.values[t.var];
      rowscale = std::max(rowscale, std::abs(t.coeff));
    }
    double viol = 0.0, slack = 0.0;
    switch (row.sense) {
      case RowSense::LessEqual:
        viol = std::max(0.0, act - row.rhs);
        slack = std::max(0.0, row.rhs - act);
        // minimize: dual of <= must be nonpositive
        rep.dual_sign_violation = std::max(rep.dual_sign_violation, y[i]);
        break;
      case RowSense::GreaterEqual:
        viol = std::max(0.0, row.rhs - act);
        slack = std::max(0.0, act - row.rhs);
        rep.dual_sign_violation = std::max(rep.dual_sign_violation, -y[i]);
        break;
      case RowSense::Equal:
        viol = std::abs(act - row.rhs);
        slack = 0.0;
        break;
    }
    rep.row_violation = std::max(rep.row_violation, viol / rowscale);
    rep.comp_slackness =
        std::max(rep.comp_slackness, std::abs(y[i]) * slack / rowscale);
  }

  // reduced costs and bound complementarity
  std::vector<double> red(c);
  for (int i = 0; i < m; ++i) {
    for (const auto& t : model.row(i).terms) red[t.var] -= y[i] * t.coeff;
  }
  double dual_obj = 0.0;
  for (int i = 0; i < m; ++i) dual_obj += y[i] * model.row(i).rhs;
  for (int j = 0; j < n; ++j) {
    double lo = model.var(j).lower, up = model.var(j).upper;
    if (model.var(j).kind == distmarket::opt::VarKind::Binary) {
      lo = std::max(lo, 0.0);
      up = std::min(up, 1.0);
    }
    double xv = sol.values[j];
    double bviol = std::max(std::isfinite(lo) ? lo - xv : 0.0,
                            std::isfinite(up) ? xv - up : 0.0);
    rep.bound_violation = std::max(rep.bound_violation, bviol);
    double dj = red[j];
    double toward_lo = std::isfinite(lo) ? xv - lo : kInf;
    double toward_up = std::isfinite(up) ? up - xv : kInf;
    // dj > 0 requires x at lower bound, dj < 0 requires x at upper bound
    if (dj > 0) {
      double dist = std::isfinite(toward_lo) ? toward_lo : kInf;
      if (!std::isfinite(dist))
        rep.dual_sign_violation = std::max(rep.dual_sign_violation, dj / scale);
      else
        rep.comp_slackness =
            std::max(rep.comp_slackness, dj * dist / scale / (1.0 + std::abs(xv)));
      if (std::isfinite(lo)) dual_obj += dj * lo;
    } else if (dj < 0) {
      double dist = std::isfinite(toward_up) ? toward_up : kInf;
      if (!std::isfinite(dist))
        rep.dual_sign_violation =
            std::max(rep.dual_sign_violation, -dj / scale);
      else
        rep.comp_slackness = std::max(rep.comp_slackness,
                                      -dj * dist / scale / (1.0 + std::abs(xv)));
      if (std::isfinite(up)) dual_obj += dj * up;
    }
  }

  double primal = 0.0;
  for (int j = 0; j < n; ++j) primal += c[j] * sol.values[j];
  rep.duality_gap = std::abs(primal - dual_obj) / (1.0 + std::abs(primal));
  return rep;
}

// Enumerate all basic solutions of a small LP (n variables, each basic
// solution defined by n active constraints picked from rows-as-equalities and
// variable bounds), filter feasible ones, and return the best objective.
// Only meaningful for bounded instances; returns nullopt when no vertex is
// feasible.
inline std::optional<double> enumerate_vertices_best(const LinearProgram& model) {
  const int n = model.num_vars();
  const int m = model.num_rows();

  struct Plane {
    std::vector<double> a;
    double b;
  };
  std::vector<Plane> planes;
  for (int i = 0; i < m; ++i) {
    Plane p;
    p.a.assign(n, 0.0);
    for (const auto& t : model.row(i).terms) p.a[t.var] += t.coeff;
    p.b = model.row(i).rhs;
    planes.push_back(std::move(p));
  }
  for (int j = 0; j < n; ++j) {
    double lo = model.var(j).lower, up = model.var(j).upper;
    if (std::isfinite(lo)) {
      Plane p;
      p.a.assign(n, 0.0);
      p.a[j] = 1.0;
      p.b = lo;
      planes.push_back(std::move(p));
    }
    if (std::isfinite(up)) {
      Plane p;
      p.a.assign(n, 0.0);
      p.a[j] = 1.0;
      p.b = up;
      planes.push_back(std::move(p));
    }
  }

  const int np = static_cast<int>(planes.size());
  std::vector<int> pick(n);
  std::optional<double> best;
  const double flip = model.objective_sense() == ObjSense::Maximize ? -1.0 : 1.0;

  auto feasible = [&](const std::vector<double>& x) {
    for (int j = 0; j < n; ++j) {
      if (std::isfinite(model.var(j).lower) && x[j] < model.var(j).lower - 1e-7)
        return false;
      if (std::isfinite(model.var(j).upper) && x[j] > model.var(j).upper + 1e-7)
        return false;
    }
    for (int i = 0; i < m; ++i) {
      double act = 0.0;
      for (const auto& t : model.row(i).terms) act += t.coeff * x[t.var];
      switch (model.row(i).sense) {
        case RowSense::LessEqual:
          if (act > model.row(i).rhs + 1e-7) return false;
          break;
        case RowSense::GreaterEqual:
          if (act < model.row(i).rhs - 1e-7) return false;
          break;
        case RowSense::Equal:
          if (std::abs(act - model.row(i).rhs) > 1e-7) return false;
          break;
      }
    }
    return true;
  };

  auto solve_square = [&](const std::vector<int>& idx,
                          std::vector<double>& x) {
    // Gaussian elimination on the n x n system formed by the picked planes.
    std::vector<std::vector<double>> A(n, std::vector<double>(n + 1, 0.0));
    for (int r = 0; r < n; ++r) {
      for (int j2 = 0; j2 < n; ++j2) A[r][j2] = planes[idx[r]].a[j2];
      A[r][n] = planes[idx[r]].b;
    }
    for (int col = 0; col < n; ++col) {
      int piv = -1;
      double pv = 1e-9;
      for (int r = col; r < n; ++r)
        if (std::abs(A[r][col]) > pv) {
          pv = std::abs(A[r][col]);
          piv = r;
        }
      if (piv < 0) return false;
      std::swap(A[col], A[piv]);
      for (int r = 0; r < n; ++r) {
        if (r == col) continue;
        double f = A[r][col] / A[col][col];
        if (f == 0.0) continue;
        for (int j2 = col; j2 <= n; ++j2) A[r][j2] -= f * A[col][j2];
      }
    }
    x.assign(n, 0.0);
    for (int r = 0; r < n; ++r) x[r] = A[r][n] / A[r][r];
    return true;
  };

  // iterate over all n-subsets of planes
  std::vector<int> comb(n);
  for (int i = 0; i < n; ++i) comb[i] = i;
  if (np < n) return std::nullopt;
  for (;;) {
    std::vector<double> x;
    if (solve_square(comb, x) && feasible(x)) {
      double obj = flip * model.objective_value(x);
      if (!best || obj < *best) best = obj;
    }
    int pos = n - 1;
    while (pos >= 0 && comb[pos] == np - n + pos) --pos;
    if (pos < 0) break;
    ++comb[pos];
    for (int k2 = pos + 1; k2 < n; ++k2) comb[k2] = comb[k2 - 1] + 1;
  }
  if (best) return flip * *best;
  return std::nullopt;
}

// Exhaustive enumeration over all binary assignments; each leaf is a plain LP
// solved by solve_lp on a copy with the binaries pinned via bounds.
struct BruteForceResult {
  bool feasible = false;
  double objective = 0.0;
  std::vector<double> values;
};

inline BruteForceResult brute_force_mip(const LinearProgram& model) {
  const std::vector<int> bins = model.binary_vars();
  const double flip = model.objective_sense() == ObjSense::Maximize ? -1.0 : 1.0;
  BruteForceResult best;
  double best_key = kInf;
  const size_t count = size_t{1} << bins.size();
  for (size_t mask = 0; mask < count; ++mask) {
    LinearProgram leaf = model;
    for (size_t k = 0; k < bins.size(); ++k) {
      double v = (mask >> k) & 1 ? 1.0 : 0.0;
      leaf.var(bins[k]).lower = v;
      leaf.var(bins[k]).upper = v;
    }
    LpSolution s = distmarket::opt::solve_lp(leaf);
    if (s.status != SolveStatus::Optimal) continue;
    double key = flip * s.objective;
    if (key < best_key - 1e-12) {
      best_key = key;
      best.feasible = true;
      best.objective = s.objective;
      best.values = s.values;
    }
  }
  return best;
}

}  // namespace testsupport
