// Dispatchable-unit block shared by the microgrid scheduler and the ISO
// SCUC: output/commitment variables, capacity coupling, ramp limits with a
// startup allowance, minimum up/down times, and start/stop cost variables.
#pragma once

#include <string>
#include <vector>

#include "distmarket/core/types.hpp"
#include "distmarket/opt/model.hpp"

namespace distmarket::core {

struct UnitVars {
  std::vector<int> p;   // output, MW
  std::vector<int> on;  // commitment binary
  std::vector<int> su;  // startup cost carrier (empty when cost is zero)
  std::vector<int> sd;  // shutdown cost carrier
};

// Generation cost F(P,I) realized as marginal_cost*P + no_load*I +
// startup*(turn-on) + shutdown*(turn-off), single linear block.
inline UnitVars add_unit_block(opt::LinearProgram& lp, const DispatchableUnit& u,
                               int H, const std::string& tag) {
  using opt::RowSense;
  using opt::RowTerm;
  UnitVars v;
  const bool want_su = u.startup_cost != 0.0;
  const bool want_sd = u.shutdown_cost != 0.0;
  for (int t = 0; t < H; ++t) {
    v.p.push_back(lp.add_continuous(0.0, u.p_max, u.marginal_cost,
                                    tag + ".p[" + std::to_string(t) + "]"));
    v.on.push_back(lp.add_binary(u.no_load_cost,
                                 tag + ".on[" + std::to_string(t) + "]"));
    if (want_su)
      v.su.push_back(lp.add_continuous(0.0, 1.0, u.startup_cost,
                                       tag + ".su[" + std::to_string(t) + "]"));
    if (want_sd)
      v.sd.push_back(lp.add_continuous(0.0, 1.0, u.shutdown_cost,
                                       tag + ".sd[" + std::to_string(t) + "]"));
  }
  const int init_on = u.initial_on ? 1 : 0;
  const double startup_ramp = std::max(u.ramp_up, u.p_min);
  const double shutdown_ramp = std::max(u.ramp_down, u.p_min);
  for (int t = 0; t < H; ++t) {
    // capacity coupling (3)
    lp.add_row({{v.p[t], 1.0}, {v.on[t], -u.p_max}}, RowSense::LessEqual, 0.0,
               tag + ".cap_hi");
    if (u.p_min > 0.0)
      lp.add_row({{v.p[t], 1.0}, {v.on[t], -u.p_min}}, RowSense::GreaterEqual,
                 0.0, tag + ".cap_lo");

    // ramps with startup/shutdown allowance; rows omitted when they can
    // never bind
    if (t == 0) {
      double up_allow = u.initial_on ? u.ramp_up : startup_ramp;
      if (up_allow < u.p_max)
        lp.add_row({{v.p[0], 1.0}}, RowSense::LessEqual,
                   u.initial_power + up_allow, tag + ".ramp_up0");
      if (u.initial_on && u.initial_power > u.ramp_down) {
        // init_p - P0 <= DR*I0 + shutdown_ramp*(1 - I0)
        lp.add_row({{v.p[0], 1.0}, {v.on[0], u.ramp_down - shutdown_ramp}},
                   RowSense::GreaterEqual, u.initial_power - shutdown_ramp,
                   tag + ".ramp_dn0");
      }
    } else {
      if (u.ramp_up < u.p_max)
        lp.add_row({{v.p[t], 1.0},
                    {v.p[t - 1], -1.0},
                    {v.on[t - 1], -(u.ramp_up - startup_ramp)}},
                   RowSense::LessEqual, startup_ramp, tag + ".ramp_up");
      if (u.ramp_down < u.p_max)
        lp.add_row({{v.p[t - 1], 1.0},
                    {v.p[t], -1.0},
                    {v.on[t], -(u.ramp_down - shutdown_ramp)}},
                   RowSense::LessEqual, shutdown_ramp, tag + ".ramp_dn");
    }

    // start/stop detection
    if (want_su) {
      if (t == 0)
        lp.add_row({{v.su[0], 1.0}, {v.on[0], -1.0}}, RowSense::GreaterEqual,
                   -init_on, tag + ".su_def");
      else
        lp.add_row({{v.su[t], 1.0}, {v.on[t], -1.0}, {v.on[t - 1], 1.0}},
                   RowSense::GreaterEqual, 0.0, tag + ".su_def");
    }
    if (want_sd) {
      if (t == 0)
        lp.add_row({{v.sd[0], 1.0}, {v.on[0], 1.0}}, RowSense::GreaterEqual,
                   init_on, tag + ".sd_def");
      else
        lp.add_row({{v.sd[t], 1.0}, {v.on[t], 1.0}, {v.on[t - 1], -1.0}},
                   RowSense::GreaterEqual, 0.0, tag + ".sd_def");
    }

    // minimum up/down times (5): a switch pins the following hours
    if (u.min_up > 1) {
      for (int k = t + 1; k < std::min(H, t + u.min_up); ++k) {
        if (t == 0)
          lp.add_row({{v.on[k], 1.0}, {v.on[0], -1.0}}, RowSense::GreaterEqual,
                     -init_on, tag + ".min_up");
        else
          lp.add_row({{v.on[k], 1.0}, {v.on[t], -1.0}, {v.on[t - 1], 1.0}},
                     RowSense::GreaterEqual, 0.0, tag + ".min_up");
      }
    }
    if (u.min_down > 1) {
      for (int k = t + 1; k < std::min(H, t + u.min_down); ++k) {
        if (t == 0)
          lp.add_row({{v.on[k], 1.0}, {v.on[0], -1.0}}, RowSense::LessEqual,
                     1 - init_on, tag + ".min_down");
        else
          lp.add_row({{v.on[k], 1.0}, {v.on[t], -1.0}, {v.on[t - 1], 1.0}},
                     RowSense::LessEqual, 1.0, tag + ".min_down");
      }
    }
  }
  return v;
}

// Startup/shutdown events recomputed from a commitment pattern.
inline std::pair<int, int> count_switches(const DispatchableUnit& u,
                                          const std::vector<int>& on) {
  int ups = 0, downs = 0;
  int prev = u.initial_on ? 1 : 0;
  for (int s : on) {
    if (s == 1 && prev == 0) ++ups;
    if (s == 0 && prev == 1) ++downs;
    prev = s;
  }
  return {ups, downs};
}

}  // namespace distmarket::core
