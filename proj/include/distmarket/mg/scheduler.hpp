// Microgrid day-ahead scheduling: the market-based MILP with assigned power
// and deviation penalties, the price-based variant against hourly LMPs, and
// demand-bid construction from the DG fleet.
#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "distmarket/core/csv.hpp"
#include "distmarket/core/types.hpp"
#include "distmarket/core/unit_model.hpp"
#include "distmarket/opt/branch_bound.hpp"
#include "distmarket/opt/model.hpp"
#include "distmarket/opt/simplex.hpp"

namespace distmarket::mg {

using core::MicrogridSchedule;
using core::MicrogridSpec;
using core::PenaltyMode;

// The assembled optimization model with its variable bookkeeping, exposed so
// tests can enumerate the very same model the scheduler solves.
struct ScheduleModel {
  opt::LinearProgram lp;
  bool market = false;
  PenaltyMode penalty_mode = PenaltyMode::PositiveOnly;
  std::vector<double> assigned;  // empty in price-based mode

  std::vector<int> grid_power;  // P^M per hour
  std::vector<int> load_shed;
  std::vector<int> deviation;       // dP^M
  std::vector<int> deviation_pos;   // dP^M+
  std::vector<int> deviation_flag;  // delta
  std::vector<core::UnitVars> units;
  struct StorageVars {
    std::vector<int> charge, discharge, soc, mode;
  };
  std::vector<StorageVars> storage;
  struct AdjustableVars {
    std::vector<int> demand;  // -1 outside the window
    std::vector<int> active;  // -1 when no binary is needed
    bool has_binary = false;
  };
  std::vector<AdjustableVars> adjustable;
};

namespace detail {

// Constraints (2)-(6): balance with curtailment, DER templates, tie line.
inline void build_common(ScheduleModel& model, const MicrogridSpec& spec) {
  using opt::RowSense;
  using opt::RowTerm;
  opt::LinearProgram& lp = model.lp;
  const int H = spec.horizon();

  for (int t = 0; t < H; ++t) {
    double cap = spec.tie_limit * spec.islanding[t];
    model.grid_power.push_back(
        lp.add_continuous(-cap, cap, 0.0, "pm[" + std::to_string(t) + "]"));
    model.load_shed.push_back(
        lp.add_continuous(0.0, opt::kInf, spec.voll, "ls[" + std::to_string(t) + "]"));
  }
  for (const auto& u : spec.units)
    model.units.push_back(core::add_unit_block(lp, u, H, u.id));

  for (const auto& b : spec.storage) {
    ScheduleModel::StorageVars sv;
    for (int t = 0; t < H; ++t) {
      std::string ts = "[" + std::to_string(t) + "]";
      sv.charge.push_back(lp.add_continuous(0.0, b.charge_max, 0.0, b.id + ".ch" + ts));
      sv.discharge.push_back(
          lp.add_continuous(0.0, b.discharge_max, 0.0, b.id + ".dch" + ts));
      sv.soc.push_back(
          lp.add_continuous(b.soc_min, b.soc_max, 0.0, b.id + ".soc" + ts));
      sv.mode.push_back(lp.add_binary(0.0, b.id + ".mode" + ts));
    }
    for (int t = 0; t < H; ++t) {
      // charging and discharging are mutually exclusive within an hour
      lp.add_row({{sv.charge[t], 1.0}, {sv.mode[t], -b.charge_max}},
                 RowSense::LessEqual, 0.0, b.id + ".ch_mode");
      lp.add_row({{sv.discharge[t], 1.0}, {sv.mode[t], b.discharge_max}},
                 RowSense::LessEqual, b.discharge_max, b.id + ".dch_mode");
      // soc_t = soc_{t-1} + eff_c*ch - dch/eff_d
      std::vector<RowTerm> rec{{sv.soc[t], 1.0},
                               {sv.charge[t], -b.charge_eff},
                               {sv.discharge[t], 1.0 / b.discharge_eff}};
      double rhs = 0.0;
      if (t == 0)
        rhs = b.initial_soc;
      else
        rec.push_back({sv.soc[t - 1], -1.0});
      lp.add_row(std::move(rec), RowSense::Equal, rhs, b.id + ".soc_rec");
    }
    model.storage.push_back(std::move(sv));
  }

  for (const auto& a : spec.adjustable_loads) {
    ScheduleModel::AdjustableVars av;
    av.demand.assign(H, -1);
    av.active.assign(H, -1);
    av.has_binary = a.d_min > 0.0 || a.min_operating_time > 1;
    std::vector<RowTerm> energy;
    for (int t = a.window_start - 1; t <= a.window_end - 1; ++t) {
      std::string ts = "[" + std::to_string(t) + "]";
      av.demand[t] = lp.add_continuous(0.0, a.d_max, 0.0, a.id + ".d" + ts);
      energy.push_back({av.demand[t], 1.0});
      if (av.has_binary) {
        av.active[t] = lp.add_binary(0.0, a.id + ".z" + ts);
        lp.add_row({{av.demand[t], 1.0}, {av.active[t], -a.d_max}},
                   RowSense::LessEqual, 0.0, a.id + ".d_hi");
        if (a.d_min > 0.0)
          lp.add_row({{av.demand[t], 1.0}, {av.active[t], -a.d_min}},
                     RowSense::GreaterEqual, 0.0, a.id + ".d_lo");
      }
    }
    lp.add_row(std::move(energy), RowSense::Equal, a.required_energy,
               a.id + ".energy");
    for (int t = a.window_start; t <= a.window_end - 1; ++t) {
      int d = av.demand[t], dp = av.demand[t - 1];
      double pickup_jump = std::max(a.pickup_rate, a.d_min);
      double drop_jump = std::max(a.drop_rate, a.d_min);
      if (a.pickup_rate > 0.0 && a.pickup_rate < a.d_max) {
        if (av.has_binary)
          lp.add_row({{d, 1.0},
                      {dp, -1.0},
                      {av.active[t - 1], pickup_jump - a.pickup_rate}},
                     RowSense::LessEqual, pickup_jump, a.id + ".pickup");
        else
          lp.add_row({{d, 1.0}, {dp, -1.0}}, RowSense::LessEqual, a.pickup_rate,
                     a.id + ".pickup");
      }
      if (a.drop_rate > 0.0 && a.drop_rate < a.d_max) {
        if (av.has_binary)
          lp.add_row({{dp, 1.0},
                      {d, -1.0},
                      {av.active[t], drop_jump - a.drop_rate}},
                     RowSense::LessEqual, drop_jump, a.id + ".drop");
        else
          lp.add_row({{dp, 1.0}, {d, -1.0}}, RowSense::LessEqual, a.drop_rate,
                     a.id + ".drop");
      }
      if (av.has_binary && a.min_operating_time > 1) {
        for (int k = t + 1;
             k <= std::min(a.window_end - 1, t + a.min_operating_time - 1); ++k)
          lp.add_row({{av.active[k], 1.0},
                      {av.active[t], -1.0},
                      {av.active[t - 1], 1.0}},
                     RowSense::GreaterEqual, 0.0, a.id + ".min_run");
      }
    }
    // an activation in the first window hour also pins the following hours
    if (av.has_binary && a.min_operating_time > 1) {
      int t0 = a.window_start - 1;
      for (int k = t0 + 1;
           k <= std::min(a.window_end - 1, t0 + a.min_operating_time - 1); ++k)
        lp.add_row({{av.active[k], 1.0}, {av.active[t0], -1.0}},
                   RowSense::GreaterEqual, 0.0, a.id + ".min_run0");
    }
    model.adjustable.push_back(std::move(av));
  }

  // (2) hourly balance and the curtailment ceiling
  for (int t = 0; t < H; ++t) {
    std::vector<RowTerm> bal{{model.grid_power[t], 1.0},
                             {model.load_shed[t], 1.0}};
    for (const auto& uv : model.units) bal.push_back({uv.p[t], 1.0});
    for (const auto& sv : model.storage) {
      bal.push_back({sv.discharge[t], 1.0});
      bal.push_back({sv.charge[t], -1.0});
    }
    std::vector<RowTerm> shed{{model.load_shed[t], 1.0}};
    for (const auto& av : model.adjustable) {
      if (av.demand[t] >= 0) {
        bal.push_back({av.demand[t], -1.0});
        shed.push_back({av.demand[t], -1.0});
      }
    }
    double net_fixed = spec.fixed_load[t] - spec.nondispatchable[t];
    lp.add_row(std::move(bal), RowSense::Equal, net_fixed,
               "balance[" + std::to_string(t) + "]");
    lp.add_row(std::move(shed), RowSense::LessEqual, std::max(0.0, net_fixed),
               "shed_cap[" + std::to_string(t) + "]");
  }
}

}  // namespace detail

// Market-based model: minimize sum F + voll*LS + vbar*dP+ (or vbar*|dP|)
// subject to (2)-(10). The big-M in (8)-(10) is widened to tie + assigned so
// the indicator logic stays valid for any feasible deviation range.
inline ScheduleModel build_market_model(const MicrogridSpec& spec,
                                        const std::vector<double>& assigned,
                                        PenaltyMode mode) {
  using opt::RowSense;
  const int H = spec.horizon();
  if (static_cast<int>(assigned.size()) != H)
    throw opt::ModelError("assigned power must cover the horizon");
  ScheduleModel model;
  model.market = true;
  model.penalty_mode = mode;
  model.assigned = assigned;
  detail::build_common(model, spec);
  opt::LinearProgram& lp = model.lp;

  for (int t = 0; t < H; ++t) {
    const double vbar = spec.deviation_penalty.empty() ? 0.0 : spec.deviation_penalty[t];
    const double bigm = spec.tie_limit + std::max(0.0, assigned[t]) + 1.0;
    const std::string ts = "[" + std::to_string(t) + "]";
    double dev_cost = mode == PenaltyMode::Absolute ? -vbar : 0.0;
    double pos_cost = mode == PenaltyMode::Absolute ? 2.0 * vbar : vbar;
    int dev = lp.add_continuous(-opt::kInf, opt::kInf, dev_cost, "dev" + ts);
    int pos = lp.add_continuous(0.0, opt::kInf, pos_cost, "dev_pos" + ts);
    int flg = lp.add_binary(0.0, "delta" + ts);
    model.deviation.push_back(dev);
    model.deviation_pos.push_back(pos);
    model.deviation_flag.push_back(flg);

    // (7) deviation definition
    lp.add_row({{dev, 1.0}, {model.grid_power[t], -1.0}}, RowSense::Equal,
               -assigned[t], "dev_def" + ts);
    // (8) dP+ <= M*delta (lower half subsumed by dP+ >= 0)
    lp.add_row({{pos, 1.0}, {flg, -bigm}}, RowSense::LessEqual, 0.0,
               "dev_pos_gate" + ts);
    // implied by (8)-(10) for integral delta; keeps the relaxation honest
    lp.add_row({{pos, 1.0}, {dev, -1.0}}, RowSense::GreaterEqual, 0.0,
               "dev_pos_floor" + ts);
    // (9) |dP - dP+| <= M*(1-delta)
    lp.add_row({{dev, 1.0}, {pos, -1.0}, {flg, bigm}}, RowSense::LessEqual,
               bigm, "dev_tie_hi" + ts);
    lp.add_row({{dev, 1.0}, {pos, -1.0}, {flg, -bigm}}, RowSense::GreaterEqual,
               -bigm, "dev_tie_lo" + ts);
    // (10) -M*(1-delta) + eps <= dP <= M*delta
    lp.add_row({{dev, 1.0}, {flg, -bigm}}, RowSense::LessEqual, 0.0,
               "dev_sign_hi" + ts);
    lp.add_row({{dev, 1.0}, {flg, -bigm}}, RowSense::GreaterEqual,
               core::kDeviationEpsilon - bigm, "dev_sign_lo" + ts);
  }
  return model;
}

// Price-based model: minimize sum F + voll*LS + lambda*P^M subject to
// (2)-(6); the grid may be exporting (negative P^M) within the tie limit.
inline ScheduleModel build_price_model(const MicrogridSpec& spec,
                                       const std::vector<double>& prices) {
  const int H = spec.horizon();
  if (static_cast<int>(prices.size()) != H)
    throw opt::ModelError("price vector must cover the horizon");
  ScheduleModel model;
  model.market = false;
  detail::build_common(model, spec);
  for (int t = 0; t < H; ++t)
    model.lp.var(model.grid_power[t]).obj = prices[t];
  return model;
}

namespace detail {

inline MicrogridSchedule extract_schedule(const MicrogridSpec& spec,
                                          const ScheduleModel& model,
                                          const std::vector<double>& x,
                                          const std::vector<double>& prices) {
  const int H = spec.horizon();
  MicrogridSchedule s;
  s.microgrid = spec.id;
  s.grid_power.resize(H);
  s.load_shed.resize(H);
  for (int t = 0; t < H; ++t) {
    s.grid_power[t] = x[model.grid_power[t]];
    s.load_shed[t] = x[model.load_shed[t]];
  }
  if (model.market) {
    s.assigned = model.assigned;
    s.deviation.resize(H);
    s.deviation_pos.resize(H);
    s.deviation_flag.resize(H);
    for (int t = 0; t < H; ++t) {
      s.deviation[t] = x[model.deviation[t]];
      s.deviation_pos[t] = x[model.deviation_pos[t]];
      s.deviation_flag[t] = static_cast<int>(std::lround(x[model.deviation_flag[t]]));
    }
  } else {
    s.deviation.assign(H, 0.0);
    s.deviation_pos.assign(H, 0.0);
    s.deviation_flag.assign(H, 0);
  }
  for (size_t i = 0; i < spec.units.size(); ++i) {
    core::UnitSchedule us;
    us.id = spec.units[i].id;
    us.power.resize(H);
    us.on.resize(H);
    for (int t = 0; t < H; ++t) {
      us.power[t] = x[model.units[i].p[t]];
      us.on[t] = static_cast<int>(std::lround(x[model.units[i].on[t]]));
    }
    s.units.push_back(std::move(us));
  }
  for (size_t i = 0; i < spec.storage.size(); ++i) {
    core::StorageSchedule ss;
    ss.id = spec.storage[i].id;
    ss.charge.resize(H);
    ss.discharge.resize(H);
    ss.soc.resize(H);
    ss.charging.resize(H);
    for (int t = 0; t < H; ++t) {
      ss.charge[t] = x[model.storage[i].charge[t]];
      ss.discharge[t] = x[model.storage[i].discharge[t]];
      ss.soc[t] = x[model.storage[i].soc[t]];
      ss.charging[t] = static_cast<int>(std::lround(x[model.storage[i].mode[t]]));
    }
    s.storage.push_back(std::move(ss));
  }
  for (size_t i = 0; i < spec.adjustable_loads.size(); ++i) {
    core::AdjustableSchedule as;
    as.id = spec.adjustable_loads[i].id;
    as.demand.assign(H, 0.0);
    as.active.assign(H, 0);
    for (int t = 0; t < H; ++t) {
      int dv = model.adjustable[i].demand[t];
      if (dv < 0) continue;
      as.demand[t] = x[dv];
      if (model.adjustable[i].has_binary)
        as.active[t] = static_cast<int>(std::lround(x[model.adjustable[i].active[t]]));
      else
        as.active[t] = as.demand[t] > 1e-9 ? 1 : 0;
    }
    s.adjustable.push_back(std::move(as));
  }

  // cost breakdown recomputed from the extracted schedule
  for (size_t i = 0; i < spec.units.size(); ++i) {
    const auto& u = spec.units[i];
    auto [ups, downs] = core::count_switches(u, s.units[i].on);
    s.cost_operation += u.startup_cost * ups + u.shutdown_cost * downs;
    for (int t = 0; t < H; ++t)
      s.cost_operation +=
          u.marginal_cost * s.units[i].power[t] + u.no_load_cost * s.units[i].on[t];
  }
  for (int t = 0; t < H; ++t) s.cost_curtailment += spec.voll * s.load_shed[t];
  if (model.market) {
    for (int t = 0; t < H; ++t) {
      double vbar = spec.deviation_penalty.empty() ? 0.0 : spec.deviation_penalty[t];
      double base = model.penalty_mode == PenaltyMode::Absolute
                        ? std::abs(s.deviation[t])
                        : s.deviation_pos[t];
      s.cost_deviation += vbar * base;
    }
  } else {
    for (int t = 0; t < H; ++t)
      s.cost_grid_energy += prices[t] * s.grid_power[t];
  }
  s.objective = s.cost_operation + s.cost_curtailment + s.cost_deviation +
                s.cost_grid_energy;
  return s;
}

}  // namespace detail

inline MicrogridSchedule build_market_schedule(const MicrogridSpec& spec,
                                               const std::vector<double>& assigned,
                                               PenaltyMode mode,
                                               long* node_count = nullptr) {
  ScheduleModel model = build_market_model(spec, assigned, mode);
  opt::MipSolution sol = opt::solve_mip(model.lp);
  if (sol.status != opt::SolveStatus::Optimal)
    throw opt::SolverError("market schedule for " + spec.id +
                           " is infeasible (check islanded-hour supply)");
  if (node_count) *node_count = sol.node_count;
  return detail::extract_schedule(spec, model, sol.values, {});
}

inline MicrogridSchedule build_price_schedule(const MicrogridSpec& spec,
                                              const std::vector<double>& prices,
                                              long* node_count = nullptr) {
  ScheduleModel model = build_price_model(spec, prices);
  opt::MipSolution sol = opt::solve_mip(model.lp);
  if (sol.status != opt::SolveStatus::Optimal)
    throw opt::SolverError("price schedule for " + spec.id + " is infeasible");
  if (node_count) *node_count = sol.node_count;
  return detail::extract_schedule(spec, model, sol.values, prices);
}

// Demand bid from the DG fleet: the fixed part is the net nonresponsive load
// (plus the inflexible floor of adjustable loads inside their windows); one
// segment per dispatchable unit priced at its marginal cost, widths p_max,
// sorted by nonincreasing price with equal-price segments merged.
inline core::DemandBid build_demand_bid(const MicrogridSpec& spec) {
  const int H = spec.horizon();
  core::DemandBid bid;
  bid.microgrid = spec.id;
  bid.fixed.resize(H);
  for (int t = 0; t < H; ++t) {
    double fixed = spec.fixed_load[t] - spec.nondispatchable[t];
    for (const auto& a : spec.adjustable_loads)
      if (t + 1 >= a.window_start && t + 1 <= a.window_end) fixed += a.d_min;
    bid.fixed[t] = std::max(0.0, fixed);
  }
  std::vector<core::BidSegment> segs;
  for (const auto& u : spec.units)
    if (u.p_max > 0.0) segs.push_back({u.marginal_cost, u.p_max});
  std::stable_sort(segs.begin(), segs.end(),
                   [](const core::BidSegment& a, const core::BidSegment& b) {
                     return a.price > b.price;
                   });
  std::vector<core::BidSegment> merged;
  for (const auto& s : segs) {
    if (!merged.empty() && std::abs(merged.back().price - s.price) <= 1e-9)
      merged.back().width += s.width;
    else
      merged.push_back(s);
  }
  bid.segments.assign(H, merged);
  return bid;
}

inline void write_schedule_csv(const MicrogridSpec& spec,
                               const MicrogridSchedule& s,
                               const std::string& path) {
  core::CsvWriter w(path);
  std::vector<std::string> head{"hour",    "pm_mw",      "assigned_mw",
                                "dev_mw",  "dev_pos_mw", "delta",
                                "shed_mw"};
  for (const auto& u : spec.units) {
    head.push_back(u.id + "_p");
    head.push_back(u.id + "_on");
  }
  for (const auto& b : spec.storage) {
    head.push_back(b.id + "_charge");
    head.push_back(b.id + "_discharge");
    head.push_back(b.id + "_soc");
  }
  for (const auto& a : spec.adjustable_loads) head.push_back(a.id + "_d");
  w.row(head);
  for (int t = 0; t < s.horizon(); ++t) {
    std::vector<std::string> row{
        std::to_string(t + 1),
        core::fmt(s.grid_power[t]),
        core::fmt(s.assigned.empty() ? 0.0 : s.assigned[t]),
        core::fmt(s.deviation.empty() ? 0.0 : s.deviation[t]),
        core::fmt(s.deviation_pos.empty() ? 0.0 : s.deviation_pos[t]),
        std::to_string(s.deviation_flag.empty() ? 0 : s.deviation_flag[t]),
        core::fmt(s.load_shed[t])};
    for (const auto& u : s.units) {
      row.push_back(core::fmt(u.power[t]));
      row.push_back(std::to_string(u.on[t]));
    }
    for (const auto& b : s.storage) {
      row.push_back(core::fmt(b.charge[t]));
      row.push_back(core::fmt(b.discharge[t]));
      row.push_back(core::fmt(b.soc[t]));
    }
    for (const auto& a : s.adjustable) row.push_back(core::fmt(a.demand[t]));
    w.row(row);
  }
}

}  // namespace distmarket::mg
