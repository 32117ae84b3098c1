// Independent re-check of a microgrid schedule against its spec: power
// balance, DER power/energy/time-coupling templates, tie-line and islanding
// limits, and the deviation linearization logic table. Deliberately written
// against the raw schedule arrays, not the optimization model builder.
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "distmarket/core/types.hpp"

namespace distmarket::core {

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Violation {
  std::string constraint;
  int hour = 0;  // 1-based; 0 when not hour-specific
  double magnitude = 0.0;
  std::string detail;
};

inline constexpr double kScheduleTol = 1e-6;

namespace detail {

inline void check_len(const std::string& what, size_t got, int H) {
  if (static_cast<int>(got) != H)
    throw ValidationError("schedule field '" + what + "' covers " +
                          std::to_string(got) + " hours, expected " +
                          std::to_string(H));
}

}  // namespace detail

// Empty result iff every constraint holds within 1e-6. Structural mismatches
// (wrong horizon, missing assets) throw ValidationError instead.
inline std::vector<Violation> validate_schedule(const MicrogridSpec& spec,
                                                const MicrogridSchedule& sched) {
  const int H = spec.horizon();
  std::vector<Violation> out;
  auto flag = [&](const std::string& c, int hour, double mag,
                  const std::string& detail = {}) {
    if (mag > kScheduleTol) out.push_back({c, hour, mag, detail});
  };

  detail::check_len("grid_power", sched.grid_power.size(), H);
  detail::check_len("load_shed", sched.load_shed.size(), H);
  if (sched.units.size() != spec.units.size())
    throw ValidationError("schedule covers " + std::to_string(sched.units.size()) +
                          " units, spec has " + std::to_string(spec.units.size()));
  if (sched.storage.size() != spec.storage.size())
    throw ValidationError("schedule storage set does not match spec");
  if (sched.adjustable.size() != spec.adjustable_loads.size())
    throw ValidationError("schedule adjustable-load set does not match spec");
  for (size_t i = 0; i < spec.units.size(); ++i) {
    if (sched.units[i].id != spec.units[i].id)
      throw ValidationError("unit order mismatch: " + sched.units[i].id);
    detail::check_len("unit power", sched.units[i].power.size(), H);
    detail::check_len("unit on", sched.units[i].on.size(), H);
  }
  const bool market = !sched.assigned.empty();
  if (market) {
    detail::check_len("assigned", sched.assigned.size(), H);
    detail::check_len("deviation", sched.deviation.size(), H);
    detail::check_len("deviation_pos", sched.deviation_pos.size(), H);
    detail::check_len("deviation_flag", sched.deviation_flag.size(), H);
  }

  for (int t = 0; t < H; ++t) {
    // (2) hourly power balance with curtailment slack
    double supply = sched.grid_power[t] + sched.load_shed[t];
    for (const auto& u : sched.units) supply += u.power[t];
    for (const auto& s : sched.storage)
      supply += s.discharge[t] - s.charge[t];
    double demand = spec.fixed_load[t] - spec.nondispatchable[t];
    for (const auto& a : sched.adjustable) demand += a.demand[t];
    flag("power_balance(2)", t + 1, std::abs(supply - demand));

    // curtailment cannot exceed the load present in the hour
    double sheddable = std::max(0.0, spec.fixed_load[t] - spec.nondispatchable[t]);
    for (const auto& a : sched.adjustable) sheddable += a.demand[t];
    flag("load_shed_range", t + 1, std::max(0.0, -sched.load_shed[t]));
    flag("load_shed_range", t + 1, sched.load_shed[t] - sheddable);

    // (6) tie-line limit with islanding zero-out
    double cap = spec.tie_limit * spec.islanding[t];
    flag("tie_limit(6)", t + 1, std::abs(sched.grid_power[t]) - cap);
  }

  // (3) + (5) dispatchable units: capacity, ramps, min up/down
  for (size_t i = 0; i < spec.units.size(); ++i) {
    const auto& u = spec.units[i];
    const auto& s = sched.units[i];
    double startup_ramp = std::max(u.ramp_up, u.p_min);
    double shutdown_ramp = std::max(u.ramp_down, u.p_min);
    for (int t = 0; t < H; ++t) {
      int on = s.on[t];
      if (on != 0 && on != 1)
        out.push_back({"commitment_binary", t + 1, 1.0, u.id});
      flag("unit_capacity(3)", t + 1, u.p_min * on - s.power[t], u.id);
      flag("unit_capacity(3)", t + 1, s.power[t] - u.p_max * on, u.id);
      int prev_on = t == 0 ? (u.initial_on ? 1 : 0) : s.on[t - 1];
      double prev_p = t == 0 ? u.initial_power : s.power[t - 1];
      flag("ramp_up(5)", t + 1,
           s.power[t] - prev_p -
               (u.ramp_up * prev_on + startup_ramp * (1 - prev_on)),
           u.id);
      flag("ramp_down(5)", t + 1,
           prev_p - s.power[t] -
               (u.ramp_down * on + shutdown_ramp * (1 - on)),
           u.id);
      // min up/down: a switch at t pins the following hours
      if (prev_on == 0 && on == 1) {
        for (int k = t + 1; k < std::min(H, t + u.min_up); ++k)
          if (s.on[k] != 1)
            out.push_back({"min_up(5)", k + 1, 1.0, u.id});
      }
      if (prev_on == 1 && on == 0) {
        for (int k = t + 1; k < std::min(H, t + u.min_down); ++k)
          if (s.on[k] != 0)
            out.push_back({"min_down(5)", k + 1, 1.0, u.id});
      }
    }
  }

  // (3)-(5) storage: mode exclusivity, limits, SOC recursion and range
  for (size_t i = 0; i < spec.storage.size(); ++i) {
    const auto& b = spec.storage[i];
    const auto& s = sched.storage[i];
    detail::check_len("storage charge", s.charge.size(), H);
    detail::check_len("storage discharge", s.discharge.size(), H);
    detail::check_len("storage soc", s.soc.size(), H);
    detail::check_len("storage charging", s.charging.size(), H);
    double soc_prev = b.initial_soc;
    for (int t = 0; t < H; ++t) {
      int mode = s.charging[t];
      if (mode != 0 && mode != 1)
        out.push_back({"storage_mode_binary", t + 1, 1.0, b.id});
      flag("storage_power(3)", t + 1, s.charge[t] - b.charge_max * mode, b.id);
      flag("storage_power(3)", t + 1,
           s.discharge[t] - b.discharge_max * (1 - mode), b.id);
      flag("storage_power(3)", t + 1, -s.charge[t], b.id);
      flag("storage_power(3)", t + 1, -s.discharge[t], b.id);
      double soc = soc_prev + b.charge_eff * s.charge[t] -
                   s.discharge[t] / b.discharge_eff;
      flag("storage_soc_recursion(4)", t + 1, std::abs(soc - s.soc[t]), b.id);
      flag("storage_soc_range(4)", t + 1, b.soc_min - s.soc[t], b.id);
      flag("storage_soc_range(4)", t + 1, s.soc[t] - b.soc_max, b.id);
      soc_prev = s.soc[t];
    }
  }

  // (3)-(5) adjustable loads: window, energy cycle, pickup/drop, min run
  for (size_t i = 0; i < spec.adjustable_loads.size(); ++i) {
    const auto& a = spec.adjustable_loads[i];
    const auto& s = sched.adjustable[i];
    detail::check_len("adjustable demand", s.demand.size(), H);
    detail::check_len("adjustable active", s.active.size(), H);
    double energy = 0.0;
    for (int t = 0; t < H; ++t) {
      bool inside = t + 1 >= a.window_start && t + 1 <= a.window_end;
      int z = s.active[t];
      if (z != 0 && z != 1)
        out.push_back({"adjustable_binary", t + 1, 1.0, a.id});
      if (!inside) {
        flag("adjustable_window(3)", t + 1, std::abs(s.demand[t]), a.id);
        continue;
      }
      energy += s.demand[t];
      flag("adjustable_power(3)", t + 1, a.d_min * z - s.demand[t], a.id);
      flag("adjustable_power(3)", t + 1, s.demand[t] - a.d_max * z, a.id);
      bool first = t + 1 == a.window_start;
      int zp = first ? 0 : s.active[t - 1];
      double dp = first ? 0.0 : s.demand[t - 1];
      if (a.pickup_rate > 0) {
        double allowance = a.pickup_rate * zp + std::max(a.pickup_rate, a.d_min) * (1 - zp);
        flag("adjustable_pickup(5)", t + 1, s.demand[t] - dp - allowance, a.id);
      }
      if (a.drop_rate > 0) {
        double allowance = a.drop_rate * z + std::max(a.drop_rate, a.d_min) * (1 - z);
        flag("adjustable_drop(5)", t + 1, dp - s.demand[t] - allowance, a.id);
      }
      if (zp == 0 && z == 1) {
        for (int k = t + 1;
             k < std::min(a.window_end, t + a.min_operating_time); ++k)
          if (s.active[k] != 1)
            out.push_back({"adjustable_min_run(5)", k + 1, 1.0, a.id});
      }
    }
    flag("adjustable_energy(4)", 0, std::abs(energy - a.required_energy), a.id);
  }

  // (7)-(10) deviation accounting, market-based schedules only
  if (market) {
    for (int t = 0; t < H; ++t) {
      double dev = sched.deviation[t];
      double pos = sched.deviation_pos[t];
      int d = sched.deviation_flag[t];
      if (d != 0 && d != 1)
        out.push_back({"deviation_binary(8)", t + 1, 1.0});
      flag("deviation_identity(7)", t + 1,
           std::abs(dev - (sched.grid_power[t] - sched.assigned[t])));
      flag("deviation_pos_range(8)", t + 1, -pos);
      if (d == 0) {
        flag("deviation_logic(10)", t + 1, dev);       // dP <= 0
        flag("deviation_logic(9)", t + 1, std::abs(pos));  // dP+ = 0
      } else {
        flag("deviation_logic(10)", t + 1, kDeviationEpsilon - dev);  // dP >= eps
        flag("deviation_logic(9)", t + 1, std::abs(pos - dev));       // dP+ = dP
      }
      flag("deviation_max(8)", t + 1, std::abs(pos - std::max(0.0, dev)));
    }
  } else {
    for (int t = 0; t < H; ++t) {
      if (!sched.deviation.empty())
        flag("deviation_zeroed", t + 1, std::abs(sched.deviation[t]));
      if (!sched.deviation_pos.empty())
        flag("deviation_zeroed", t + 1, std::abs(sched.deviation_pos[t]));
    }
  }

  return out;
}

}  // namespace distmarket::core
