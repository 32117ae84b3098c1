// Domain model shared by every optimization module: microgrids, DER assets,
// transmission network, bids, and schedules.
#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace distmarket::core {

struct DispatchableUnit {
  std::string id;
  double p_min = 0.0, p_max = 0.0;  // MW
  double marginal_cost = 0.0;       // $/MWh
  double no_load_cost = 0.0;        // $/h
  double startup_cost = 0.0;        // $
  double shutdown_cost = 0.0;       // $
  double ramp_up = 0.0;             // MW/h
  double ramp_down = 0.0;           // MW/h
  int min_up = 1, min_down = 1;     // hours
  bool initial_on = false;
  double initial_power = 0.0;  // MW
};

inline std::vector<std::string> check_invariants(const DispatchableUnit& u) {
  std::vector<std::string> out;
  if (!(0.0 <= u.p_min && u.p_min <= u.p_max))
    out.push_back("unit " + u.id + ": requires 0 <= p_min <= p_max");
  if (u.ramp_up < 0 || u.ramp_down < 0)
    out.push_back("unit " + u.id + ": ramp rates must be nonnegative");
  if (u.min_up < 1 || u.min_down < 1)
    out.push_back("unit " + u.id + ": min up/down times must be >= 1 hour");
  if (u.initial_power != 0.0 &&
      (u.initial_power < u.p_min - 1e-9 || u.initial_power > u.p_max + 1e-9))
    out.push_back("unit " + u.id +
                  ": initial power must be 0 or within [p_min, p_max]");
  if (!u.initial_on && u.initial_power != 0.0)
    out.push_back("unit " + u.id + ": initial power must be 0 when initially off");
  return out;
}

struct StorageUnit {
  std::string id;
  double charge_max = 0.0, discharge_max = 0.0;  // MW
  double energy_capacity = 0.0;                  // MWh
  double soc_min = 0.0, soc_max = 0.0;           // MWh
  double charge_eff = 1.0, discharge_eff = 1.0;  // fraction in (0,1]
  double initial_soc = 0.0;                      // MWh
};

inline std::vector<std::string> check_invariants(const StorageUnit& s) {
  std::vector<std::string> out;
  if (!(0.0 <= s.soc_min && s.soc_min <= s.initial_soc &&
        s.initial_soc <= s.soc_max && s.soc_max <= s.energy_capacity))
    out.push_back("storage " + s.id +
                  ": requires 0 <= soc_min <= initial_soc <= soc_max <= capacity");
  if (s.charge_max < 0 || s.discharge_max < 0)
    out.push_back("storage " + s.id + ": charge/discharge limits must be >= 0");
  if (!(s.charge_eff > 0 && s.charge_eff <= 1.0) ||
      !(s.discharge_eff > 0 && s.discharge_eff <= 1.0))
    out.push_back("storage " + s.id + ": efficiencies must lie in (0,1]");
  return out;
}

struct AdjustableLoad {
  std::string id;
  double d_min = 0.0, d_max = 0.0;  // MW
  double required_energy = 0.0;     // MWh over the window
  int window_start = 1, window_end = 1;  // 1-based hours, inclusive
  int min_operating_time = 1;            // hours
  double pickup_rate = 0.0, drop_rate = 0.0;  // MW/h
};

inline std::vector<std::string> check_invariants(const AdjustableLoad& a) {
  std::vector<std::string> out;
  if (a.d_min > a.d_max)
    out.push_back("adjustable " + a.id + ": requires d_min <= d_max");
  if (a.window_start > a.window_end)
    out.push_back("adjustable " + a.id + ": window start exceeds end");
  int len = a.window_end - a.window_start + 1;
  if (a.required_energy > a.d_max * len + 1e-9)
    out.push_back("adjustable " + a.id +
                  ": required energy exceeds d_max * window length");
  if (a.required_energy < a.d_min * a.min_operating_time - 1e-9)
    out.push_back("adjustable " + a.id +
                  ": required energy below d_min * min operating time");
  if (a.pickup_rate < 0 || a.drop_rate < 0)
    out.push_back("adjustable " + a.id + ": pickup/drop rates must be >= 0");
  return out;
}

struct MicrogridSpec {
  std::string id;
  int bus = 0;
  std::vector<double> fixed_load;        // MW per hour
  std::vector<double> nondispatchable;   // MW per hour, netted against load
  std::vector<DispatchableUnit> units;
  std::vector<StorageUnit> storage;
  std::vector<AdjustableLoad> adjustable_loads;
  double voll = 0.0;       // $/MWh
  double tie_limit = 0.0;  // MW
  std::vector<int> islanding;               // 1 grid-connected, 0 islanded
  std::vector<double> deviation_penalty;    // $/MWh per hour

  int horizon() const { return static_cast<int>(fixed_load.size()); }
};

inline std::vector<std::string> check_invariants(const MicrogridSpec& m) {
  std::vector<std::string> out;
  const int H = m.horizon();
  for (int t = 0; t < H; ++t)
    if (m.fixed_load[t] < 0) {
      out.push_back("microgrid " + m.id + ": fixed load must be >= 0 (hour " +
                    std::to_string(t + 1) + ")");
      break;
    }
  if (!(m.tie_limit > 0))
    out.push_back("microgrid " + m.id + ": tie limit must be positive");
  if (static_cast<int>(m.nondispatchable.size()) != H)
    out.push_back("microgrid " + m.id + ": nondispatchable profile length mismatch");
  if (static_cast<int>(m.islanding.size()) != H)
    out.push_back("microgrid " + m.id + ": islanding profile length mismatch");
  else
    for (int t = 0; t < H; ++t)
      if (m.islanding[t] != 0 && m.islanding[t] != 1) {
        out.push_back("microgrid " + m.id + ": islanding indicator must be 0/1");
        break;
      }
  for (const auto& u : m.units) {
    for (auto& v : check_invariants(u)) out.push_back(v);
    if (m.voll <= u.marginal_cost)
      out.push_back("microgrid " + m.id +
                    ": voll must exceed every unit marginal cost (unit " +
                    u.id + ")");
  }
  for (const auto& s : m.storage)
    for (auto& v : check_invariants(s)) out.push_back(v);
  for (const auto& a : m.adjustable_loads) {
    for (auto& v : check_invariants(a)) out.push_back(v);
    if (a.window_end > H)
      out.push_back("adjustable " + a.id + ": window exceeds horizon");
  }
  return out;
}

struct BidSegment {
  double price = 0.0;  // $/MWh
  double width = 0.0;  // MW
};

// Fixed block plus monotonically decreasing priced segments per hour.
struct DemandBid {
  std::string microgrid;
  std::vector<double> fixed;                      // MW per hour
  std::vector<std::vector<BidSegment>> segments;  // per hour, price-sorted

  int horizon() const { return static_cast<int>(fixed.size()); }
};

inline std::vector<std::string> check_invariants(const DemandBid& b) {
  std::vector<std::string> out;
  if (b.segments.size() != b.fixed.size())
    out.push_back("bid " + b.microgrid + ": segment table length mismatch");
  for (size_t t = 0; t < b.segments.size(); ++t) {
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& s : b.segments[t]) {
      if (!(s.width > 0)) {
        out.push_back("bid " + b.microgrid + ": segment widths must be > 0");
        return out;
      }
      if (s.price > prev + 1e-12) {
        out.push_back("bid " + b.microgrid +
                      ": segment prices must be nonincreasing (hour " +
                      std::to_string(t + 1) + ")");
        return out;
      }
      prev = s.price;
    }
  }
  return out;
}

struct TransmissionLine {
  std::string id;
  int from_bus = 0, to_bus = 0;
  double reactance = 0.0;   // per-unit
  double flow_limit = 0.0;  // MW
};

struct TransmissionNetwork {
  std::vector<int> buses;
  std::vector<TransmissionLine> lines;
  int reference_bus = 0;
  double base_power = 100.0;  // MVA

  bool has_bus(int b) const {
    for (int x : buses)
      if (x == b) return true;
    return false;
  }
};

inline std::vector<std::string> check_invariants(const TransmissionNetwork& n) {
  std::vector<std::string> out;
  if (n.buses.empty()) {
    out.push_back("network: no buses");
    return out;
  }
  if (!n.has_bus(n.reference_bus))
    out.push_back("network: reference bus does not exist");
  for (const auto& l : n.lines) {
    if (!(l.reactance > 0))
      out.push_back("line " + l.id + ": reactance must be positive");
    if (!(l.flow_limit > 0))
      out.push_back("line " + l.id + ": flow limit must be positive");
    if (!n.has_bus(l.from_bus) || !n.has_bus(l.to_bus))
      out.push_back("line " + l.id + ": endpoint bus does not exist");
  }
  // connectivity by union-find over declared buses
  std::vector<int> parent(n.buses.size());
  for (size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
  auto idx = [&](int bus) {
    for (size_t i = 0; i < n.buses.size(); ++i)
      if (n.buses[i] == bus) return static_cast<int>(i);
    return -1;
  };
  std::function<int(int)> find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (const auto& l : n.lines) {
    int a = idx(l.from_bus), b = idx(l.to_bus);
    if (a < 0 || b < 0) continue;
    parent[find(a)] = find(b);
  }
  int root = find(0);
  for (size_t i = 1; i < parent.size(); ++i)
    if (find(static_cast<int>(i)) != root) {
      out.push_back("network: graph is not connected");
      break;
    }
  return out;
}

struct GridUnit {
  DispatchableUnit unit;
  int bus = 0;
};

struct UnitSchedule {
  std::string id;
  std::vector<double> power;  // MW
  std::vector<int> on;        // commitment
};

struct StorageSchedule {
  std::string id;
  std::vector<double> charge, discharge;  // MW
  std::vector<double> soc;                // MWh at end of hour
  std::vector<int> charging;              // mode selector
};

struct AdjustableSchedule {
  std::string id;
  std::vector<double> demand;  // MW
  std::vector<int> active;
};

struct MicrogridSchedule {
  std::string microgrid;
  std::vector<double> grid_power;     // P^M
  std::vector<double> assigned;       // PD^M (zero in price-based mode)
  std::vector<double> deviation;      // dP^M
  std::vector<double> deviation_pos;  // dP^M+
  std::vector<int> deviation_flag;    // delta
  std::vector<double> load_shed;      // LS
  std::vector<UnitSchedule> units;
  std::vector<StorageSchedule> storage;
  std::vector<AdjustableSchedule> adjustable;
  double cost_operation = 0.0;
  double cost_curtailment = 0.0;
  double cost_deviation = 0.0;
  double cost_grid_energy = 0.0;  // price-based mode: sum lambda * P^M
  double objective = 0.0;

  int horizon() const { return static_cast<int>(grid_power.size()); }
  double total_cost() const {
    return cost_operation + cost_curtailment + cost_deviation;
  }
};

enum class PenaltyMode { PositiveOnly, Absolute };

// Tolerance used when the deviation indicator must certify a strictly
// positive deviation.
inline constexpr double kDeviationEpsilon = 1e-3;  // MW

}  // namespace distmarket::core
