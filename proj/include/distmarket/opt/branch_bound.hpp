// Deterministic branch and bound over binary variables: most-fractional
// branching (ties to the lowest var id), best-bound node selection (ties by
// insertion order), every node LP solved cold.
#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <queue>
#include <vector>

#include "distmarket/opt/model.hpp"
#include "distmarket/opt/simplex.hpp"

namespace distmarket::opt {

struct BnbOptions {
  double int_tol = 1e-6;   // integrality tolerance on binaries
  double rel_gap = 1e-6;   // relative optimality gap at termination
  long max_nodes = 2000000;
  bool rounding_heuristic = true;
  int heuristic_period = 16;  // dive for an incumbent every k-th node
  int dive_limit = 48;        // LP solves allowed per dive
  SimplexOptions lp;
};

namespace detail {

struct BnbNode {
  double bound_key;  // parent LP objective in minimize orientation
  long seq;
  std::vector<int8_t> fix;  // per binary: -1 free, 0, 1
};

struct BnbNodeOrder {
  bool operator()(const BnbNode& a, const BnbNode& b) const {
    if (a.bound_key != b.bound_key) return a.bound_key > b.bound_key;
    return a.seq > b.seq;  // min-heap: earlier insertion wins ties
  }
};

}  // namespace detail

inline MipSolution solve_mip(const LinearProgram& model,
                             BnbOptions opts = BnbOptions{}) {
  model.validate();
  const std::vector<int> bins = model.binary_vars();
  const double flip =
      model.objective_sense() == ObjSense::Maximize ? -1.0 : 1.0;

  SimplexSolver solver(model, opts.lp);
  std::vector<double> lo0(model.num_vars()), up0(model.num_vars());
  for (int j = 0; j < model.num_vars(); ++j) {
    lo0[j] = model.var(j).lower;
    up0[j] = model.var(j).upper;
  }

  MipSolution out;
  out.node_count = 0;

  auto apply_fix = [&](const std::vector<int8_t>& fix, std::vector<double>& lo,
                       std::vector<double>& up) {
    lo = lo0;
    up = up0;
    for (size_t k = 0; k < bins.size(); ++k) {
      if (fix[k] < 0) continue;
      lo[bins[k]] = static_cast<double>(fix[k]);
      up[bins[k]] = static_cast<double>(fix[k]);
    }
  };

  // Rows touching each binary, for the degenerate-snap pass below.
  std::vector<std::vector<std::pair<int, double>>> bin_rows(bins.size());
  {
    std::vector<int> bin_pos(model.num_vars(), -1);
    for (size_t k = 0; k < bins.size(); ++k) bin_pos[bins[k]] = static_cast<int>(k);
    for (int i = 0; i < model.num_rows(); ++i)
      for (const RowTerm& t : model.row(i).terms)
        if (bin_pos[t.var] >= 0)
          bin_rows[bin_pos[t.var]].push_back({i, t.coeff});
  }

  // A fractional binary with no objective stake often sits at a degenerate
  // vertex (the LP is indifferent). Moving it to an integral value when row
  // slacks allow yields an equally optimal vertex and removes fake branching
  // candidates.
  auto snap_degenerate = [&](LpSolution& s, const std::vector<int8_t>& fix) {
    std::vector<double> act(model.num_rows(), 0.0);
    for (int i = 0; i < model.num_rows(); ++i)
      for (const RowTerm& t : model.row(i).terms)
        act[i] += t.coeff * s.values[t.var];
    for (size_t k = 0; k < bins.size(); ++k) {
      if (fix[k] >= 0) continue;
      double v = s.values[bins[k]];
      if (std::min(std::abs(v), std::abs(1.0 - v)) <= opts.int_tol) continue;
      double key_cost = flip * model.var(bins[k]).obj;
      double first = v >= 0.5 ? 1.0 : 0.0;
      for (double w : {first, 1.0 - first}) {
        double delta = w - v;
        if (key_cost * delta > 1e-12) continue;  // would worsen the objective
        bool ok = true;
        for (const auto& [row, coeff] : bin_rows[k]) {
          double na = act[row] + coeff * delta;
          const Constraint& r = model.row(row);
          double slack_tol = 1e-9 * (1.0 + std::abs(r.rhs));
          if (r.sense == RowSense::LessEqual && na > r.rhs + slack_tol) ok = false;
          if (r.sense == RowSense::GreaterEqual && na < r.rhs - slack_tol) ok = false;
          if (r.sense == RowSense::Equal && std::abs(na - r.rhs) > slack_tol) ok = false;
          if (!ok) break;
        }
        if (ok) {
          for (const auto& [row, coeff] : bin_rows[k]) act[row] += coeff * delta;
          s.values[bins[k]] = w;
          break;
        }
      }
    }
  };

  std::priority_queue<detail::BnbNode, std::vector<detail::BnbNode>,
                      detail::BnbNodeOrder>
      open;
  long seq = 0;
  open.push(detail::BnbNode{-kInf, seq++,
                            std::vector<int8_t>(bins.size(), int8_t{-1})});

  bool have_inc = false;
  double inc_key = kInf;
  std::vector<int8_t> inc_fix(bins.size(), int8_t{0});
  double final_gap = 0.0;

  std::vector<double> lo, up;
  auto try_incumbent_fixed = [&](const std::vector<int8_t>& fix) {
    // All binaries pinned: the LP value is the exact MIP value of `fix`.
    apply_fix(fix, lo, up);
    LpSolution s = solver.solve_with_bounds(lo, up);
    if (s.status != SolveStatus::Optimal) return;
    double key = flip * s.objective;
    if (key < inc_key) {
      inc_key = key;
      inc_fix = fix;
      have_inc = true;
    }
  };

  // Diving heuristic: repeatedly pin the near-integral binaries (or, failing
  // that, the single most decided one) and re-solve, which respects coupled
  // constraints that one-shot rounding would break. Produces incumbents only;
  // node selection and branching are untouched.
  auto dive = [&](const std::vector<int8_t>& start_fix, const LpSolution& start) {
    std::vector<int8_t> fix = start_fix;
    LpSolution cur = start;
    for (int step = 0; step < opts.dive_limit; ++step) {
      int loosest = -1;
      double loosest_dist = -1.0;
      int pinned = 0;
      for (size_t k = 0; k < bins.size(); ++k) {
        if (fix[k] >= 0) continue;
        double v = cur.values[bins[k]];
        double dist = std::min(std::abs(v), std::abs(1.0 - v));
        if (dist <= 0.25) {
          fix[k] = v >= 0.5 ? int8_t{1} : int8_t{0};
          ++pinned;
        } else if (dist > loosest_dist) {
          loosest_dist = dist;
          loosest = static_cast<int>(k);
        }
      }
      if (pinned == 0 && loosest >= 0) {
        double v = cur.values[bins[loosest]];
        fix[loosest] = v >= 0.5 ? int8_t{1} : int8_t{0};
      }
      bool open_left = false;
      for (size_t k = 0; k < bins.size(); ++k)
        if (fix[k] < 0) open_left = true;
      if (!open_left) {
        try_incumbent_fixed(fix);
        return;
      }
      apply_fix(fix, lo, up);
      cur = solver.solve_with_bounds(lo, up);
      if (cur.status != SolveStatus::Optimal) return;
      if (have_inc &&
          flip * cur.objective >= inc_key - opts.rel_gap * (1.0 + std::abs(inc_key)))
        return;
    }
  };

  while (!open.empty()) {
    double cut = have_inc ? inc_key - opts.rel_gap * (1.0 + std::abs(inc_key))
                          : kInf;
    const detail::BnbNode node = open.top();
    if (have_inc && node.bound_key >= cut) {
      // Best-bound order: nothing left can improve beyond the gap.
      final_gap = std::max(
          0.0, (inc_key - node.bound_key) / std::max(1.0, std::abs(inc_key)));
      break;
    }
    open.pop();

    if (out.node_count >= opts.max_nodes)
      throw SolverError("branch and bound: node limit exceeded");

    apply_fix(node.fix, lo, up);
    LpSolution rel = solver.solve_with_bounds(lo, up);
    ++out.node_count;
    if (rel.status == SolveStatus::Unbounded) {
      // Children solve over subsets of the root region, so this can only
      // surface an unbounded relaxation of the problem itself.
      throw UnboundedError("mip: LP relaxation is unbounded");
    }
    if (rel.status == SolveStatus::Infeasible) continue;
    double key = flip * rel.objective;
    if (have_inc && key >= cut) continue;
    snap_degenerate(rel, node.fix);

    // most-fractional binary, ties broken by lowest var id
    int branch_k = -1;
    double best_score = -1.0;
    for (size_t k = 0; k < bins.size(); ++k) {
      double v = rel.values[bins[k]];
      double dist = std::min(std::abs(v), std::abs(1.0 - v));
      if (dist <= opts.int_tol) continue;  // integral enough
      double score = std::min(v, 1.0 - v);
      if (score > best_score + 1e-12) {
        best_score = score;
        branch_k = static_cast<int>(k);
      }
    }

    if (branch_k < 0) {
      // Integral relaxation: refine to an exact-binary incumbent.
      std::vector<int8_t> fix(bins.size());
      for (size_t k = 0; k < bins.size(); ++k)
        fix[k] = rel.values[bins[k]] >= 0.5 ? int8_t{1} : int8_t{0};
      try_incumbent_fixed(fix);
      continue;
    }

    if (opts.rounding_heuristic &&
        (out.node_count == 1 ||
         out.node_count % std::max(1, opts.heuristic_period) == 0)) {
      dive(node.fix, rel);
    }

    detail::BnbNode down{key, seq++, node.fix};
    down.fix[branch_k] = 0;
    detail::BnbNode upn{key, seq++, node.fix};
    upn.fix[branch_k] = 1;
    open.push(std::move(down));
    open.push(std::move(upn));
  }

  if (!have_inc) {
    out.status = SolveStatus::Infeasible;
    return out;
  }

  // Final polish: re-solve with the incumbent's binaries pinned so reported
  // binary values are exact and continuous values are LP-accurate.
  apply_fix(inc_fix, lo, up);
  LpSolution fin = solver.solve_with_bounds(lo, up);
  if (fin.status != SolveStatus::Optimal)
    throw SolverError("mip: incumbent repolish failed");
  out.status = SolveStatus::Optimal;
  out.values = fin.values;
  for (size_t k = 0; k < bins.size(); ++k)
    out.values[bins[k]] = static_cast<double>(inc_fix[k]);
  out.objective = fin.objective;
  out.gap = final_gap;
  return out;
}

// Fix every binary per `assignment`, solve the resulting LP, and return the
// solution with duals usable as prices.
inline LpSolution fix_binaries_and_price(const LinearProgram& model,
                                         const std::map<int, int>& assignment,
                                         SimplexOptions opts = SimplexOptions{}) {
  model.validate();
  std::vector<double> lo(model.num_vars()), up(model.num_vars());
  for (int j = 0; j < model.num_vars(); ++j) {
    lo[j] = model.var(j).lower;
    up[j] = model.var(j).upper;
  }
  for (int j : model.binary_vars()) {
    auto it = assignment.find(j);
    if (it == assignment.end())
      throw ModelError("fix_binaries_and_price: assignment misses binary id " +
                       std::to_string(j));
    if (it->second != 0 && it->second != 1)
      throw ModelError("fix_binaries_and_price: assignment for id " +
                       std::to_string(j) + " is not 0/1");
    lo[j] = up[j] = static_cast<double>(it->second);
  }
  SimplexSolver solver(model, opts);
  return solver.solve_with_bounds(lo, up);
}

}  // namespace distmarket::opt
