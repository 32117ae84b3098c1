// Independent System Operator: social-welfare SCUC over the transmission
// network with DC power flow, LMPs as balance-row duals of the
// fixed-commitment LP, and post-hoc redispatch at realized loads.
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "distmarket/core/csv.hpp"
#include "distmarket/core/types.hpp"
#include "distmarket/core/unit_model.hpp"
#include "distmarket/dmo/dmo.hpp"
#include "distmarket/opt/branch_bound.hpp"
#include "distmarket/opt/model.hpp"

namespace distmarket::iso {

class IsoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct IsoOptions {
  double shed_price = 5000.0;   // $/MWh on the load-shedding slack
  double reserve_margin = 0.0;  // fraction of served demand, 0 disables
};

struct IsoResult {
  std::vector<int> bus_ids;
  std::vector<std::string> unit_ids;
  std::vector<std::string> line_ids;
  std::vector<std::vector<int>> commitment;     // [unit][hour]
  std::vector<std::vector<double>> dispatch;    // [unit][hour] MW
  std::vector<std::vector<double>> flows;       // [line][hour] MW
  std::vector<double> line_limits;              // [line]
  std::vector<std::vector<double>> angles;      // [bus][hour] rad
  std::vector<std::vector<double>> awarded;     // [bus][hour] D_bt MW
  std::vector<std::vector<double>> responsive;  // [bus][hour] awarded bid MW
  std::vector<std::vector<double>> shed;        // [bus][hour] MW
  std::vector<std::vector<double>> lmps;        // [bus][hour] $/MWh
  double welfare = 0.0;          // consumption benefit minus all costs
  double generation_cost = 0.0;  // F over units, including start/stop
  double consumption_benefit = 0.0;
  double shed_cost = 0.0;
  long mip_nodes = 0;

  int horizon() const {
    return awarded.empty() ? 0 : static_cast<int>(awarded[0].size());
  }
  int bus_index(int bus) const {
    for (size_t i = 0; i < bus_ids.size(); ++i)
      if (bus_ids[i] == bus) return static_cast<int>(i);
    return -1;
  }
};

namespace detail {

struct IsoModel {
  opt::LinearProgram lp;
  int H = 0;
  std::vector<core::UnitVars> units;
  std::vector<std::vector<int>> flow;     // [line][hour]
  std::vector<std::vector<int>> theta;    // [bus][hour]
  std::vector<std::vector<int>> shed;     // [bus][hour]
  std::vector<std::vector<std::vector<int>>> dx;  // [bus][hour][segment]
  std::vector<std::vector<int>> balance_row;      // [bus][hour]
  std::vector<double> fixed;                      // [bus*H] rhs demand
};

// Welfare SCUC as a minimization: generation cost plus shed penalty minus
// the staircase consumption benefit of awarded bid segments. Fixed demand is
// a hard constraint, not valued in the objective.
inline IsoModel build_iso_model(
    const core::TransmissionNetwork& net,
    const std::vector<core::GridUnit>& units,
    const std::map<int, std::vector<double>>& fixed_load, int H,
    const std::map<int, dmo::AggregatedBid>& bids, const IsoOptions& opts) {
  using opt::RowSense;
  using opt::RowTerm;
  IsoModel m;
  m.H = H;
  opt::LinearProgram& lp = m.lp;
  const int B = static_cast<int>(net.buses.size());
  auto bus_index = [&](int bus) {
    for (int i = 0; i < B; ++i)
      if (net.buses[i] == bus) return i;
    throw IsoError("unknown bus " + std::to_string(bus));
  };

  for (const auto& g : units)
    m.units.push_back(core::add_unit_block(lp, g.unit, H, g.unit.id));

  m.theta.assign(B, {});
  m.shed.assign(B, {});
  m.dx.assign(B, {});
  m.balance_row.assign(B, std::vector<int>(H, -1));
  m.fixed.assign(static_cast<size_t>(B) * H, 0.0);
  for (int b = 0; b < B; ++b) {
    const bool is_ref = net.buses[b] == net.reference_bus;
    auto fit = fixed_load.find(net.buses[b]);
    for (int t = 0; t < H; ++t) {
      std::string ts = "[" + std::to_string(net.buses[b]) + "," + std::to_string(t) + "]";
      m.theta[b].push_back(is_ref ? lp.add_continuous(0.0, 0.0, 0.0, "theta" + ts)
                                  : lp.add_continuous(-opt::kInf, opt::kInf, 0.0,
                                                      "theta" + ts));
      double demand = fit == fixed_load.end() ? 0.0 : fit->second[t];
      m.fixed[static_cast<size_t>(b) * H + t] = demand;
      m.shed[b].push_back(lp.add_continuous(0.0, std::max(0.0, demand),
                                            opts.shed_price, "shed" + ts));
    }
    m.dx[b].assign(H, {});
    auto bit = bids.find(net.buses[b]);
    if (bit != bids.end()) {
      if (bit->second.horizon() != H)
        throw IsoError("aggregated bid horizon mismatch at bus " +
                       std::to_string(net.buses[b]));
      for (int t = 0; t < H; ++t)
        for (size_t j = 0; j < bit->second.segments[t].size(); ++j) {
          const auto& seg = bit->second.segments[t][j];
          m.dx[b][t].push_back(lp.add_continuous(
              0.0, seg.width, -seg.price,
              "dx[" + std::to_string(net.buses[b]) + "," + std::to_string(t) +
                  "," + std::to_string(j) + "]"));
        }
    }
  }

  m.flow.assign(net.lines.size(), {});
  for (size_t l = 0; l < net.lines.size(); ++l) {
    const auto& line = net.lines[l];
    int fb = bus_index(line.from_bus), tb = bus_index(line.to_bus);
    double susceptance = net.base_power / line.reactance;  // MW per rad
    for (int t = 0; t < H; ++t) {
      int pl = lp.add_continuous(-line.flow_limit, line.flow_limit, 0.0,
                                 "pl[" + line.id + "," + std::to_string(t) + "]");
      m.flow[l].push_back(pl);
      // (23) PL = (theta_from - theta_to) * base / x
      lp.add_row({{pl, 1.0}, {m.theta[fb][t], -susceptance},
                  {m.theta[tb][t], susceptance}},
                 RowSense::Equal, 0.0, "flow_def[" + line.id + "]");
    }
  }

  // (18) nodal balance; duals of these rows realize the LMPs
  for (int b = 0; b < B; ++b) {
    for (int t = 0; t < H; ++t) {
      std::vector<RowTerm> bal;
      for (size_t u = 0; u < units.size(); ++u)
        if (bus_index(units[u].bus) == b) bal.push_back({m.units[u].p[t], 1.0});
      for (size_t l = 0; l < net.lines.size(); ++l) {
        if (bus_index(net.lines[l].to_bus) == b)
          bal.push_back({m.flow[l][t], 1.0});
        if (bus_index(net.lines[l].from_bus) == b)
          bal.push_back({m.flow[l][t], -1.0});
      }
      bal.push_back({m.shed[b][t], 1.0});
      for (int v : m.dx[b][t]) bal.push_back({v, -1.0});
      m.balance_row[b][t] =
          lp.add_row(std::move(bal), RowSense::Equal,
                     m.fixed[static_cast<size_t>(b) * H + t],
                     "balance[" + std::to_string(net.buses[b]) + "," +
                         std::to_string(t) + "]");
    }
  }

  if (opts.reserve_margin > 0.0) {
    for (int t = 0; t < H; ++t) {
      std::vector<RowTerm> resv;
      double served_fixed = 0.0;
      for (int b = 0; b < B; ++b) served_fixed += m.fixed[static_cast<size_t>(b) * H + t];
      for (size_t u = 0; u < units.size(); ++u)
        resv.push_back({m.units[u].on[t], units[u].unit.p_max});
      for (int b = 0; b < B; ++b)
        for (int v : m.dx[b][t]) resv.push_back({v, -(1.0 + opts.reserve_margin)});
      lp.add_row(std::move(resv), RowSense::GreaterEqual,
                 (1.0 + opts.reserve_margin) * served_fixed,
                 "reserve[" + std::to_string(t) + "]");
    }
  }
  return m;
}

inline IsoResult extract(const core::TransmissionNetwork& net,
                         const std::vector<core::GridUnit>& units,
                         const IsoModel& m, const opt::LpSolution& sol,
                         const std::map<int, dmo::AggregatedBid>& bids) {
  const int H = m.H;
  const int B = static_cast<int>(net.buses.size());
  IsoResult r;
  r.bus_ids = net.buses;
  for (const auto& g : units) r.unit_ids.push_back(g.unit.id);
  for (const auto& l : net.lines) {
    r.line_ids.push_back(l.id);
    r.line_limits.push_back(l.flow_limit);
  }
  r.commitment.assign(units.size(), std::vector<int>(H, 0));
  r.dispatch.assign(units.size(), std::vector<double>(H, 0.0));
  for (size_t u = 0; u < units.size(); ++u)
    for (int t = 0; t < H; ++t) {
      r.dispatch[u][t] = sol.values[m.units[u].p[t]];
      r.commitment[u][t] =
          static_cast<int>(std::lround(sol.values[m.units[u].on[t]]));
    }
  r.flows.assign(net.lines.size(), std::vector<double>(H, 0.0));
  for (size_t l = 0; l < net.lines.size(); ++l)
    for (int t = 0; t < H; ++t) r.flows[l][t] = sol.values[m.flow[l][t]];
  r.angles.assign(B, std::vector<double>(H, 0.0));
  r.awarded.assign(B, std::vector<double>(H, 0.0));
  r.responsive.assign(B, std::vector<double>(H, 0.0));
  r.shed.assign(B, std::vector<double>(H, 0.0));
  r.lmps.assign(B, std::vector<double>(H, 0.0));
  for (int b = 0; b < B; ++b)
    for (int t = 0; t < H; ++t) {
      r.angles[b][t] = sol.values[m.theta[b][t]];
      r.shed[b][t] = sol.values[m.shed[b][t]];
      double resp = 0.0;
      for (int v : m.dx[b][t]) resp += sol.values[v];
      r.responsive[b][t] = resp;
      r.awarded[b][t] = m.fixed[static_cast<size_t>(b) * H + t] + resp;
      r.lmps[b][t] = sol.duals[m.balance_row[b][t]];
    }

  for (size_t u = 0; u < units.size(); ++u) {
    const auto& unit = units[u].unit;
    auto [ups, downs] = core::count_switches(unit, r.commitment[u]);
    r.generation_cost += unit.startup_cost * ups + unit.shutdown_cost * downs;
    for (int t = 0; t < H; ++t)
      r.generation_cost += unit.marginal_cost * r.dispatch[u][t] +
                           unit.no_load_cost * r.commitment[u][t];
  }
  for (int b = 0; b < B; ++b) {
    auto bit = bids.find(net.buses[b]);
    for (int t = 0; t < H; ++t) {
      if (bit != bids.end())
        for (size_t j = 0; j < m.dx[b][t].size(); ++j)
          r.consumption_benefit +=
              bit->second.segments[t][j].price * sol.values[m.dx[b][t][j]];
    }
  }
  double shed_total_cost = 0.0;
  for (int b = 0; b < B; ++b)
    for (int t = 0; t < H; ++t) shed_total_cost += r.shed[b][t];
  r.shed_cost = shed_total_cost;  // MWh here; priced below by caller option
  r.welfare = r.consumption_benefit - r.generation_cost;
  return r;
}

}  // namespace detail

// Social-welfare SCUC, Eqs (17)-(23). The aggregated bids' fixed parts must
// already be folded into `fixed_load` at the DMO bus; only the priced
// segments are decision variables here.
inline IsoResult solve_welfare_scuc(const core::TransmissionNetwork& net,
                                    const std::vector<core::GridUnit>& units,
                                    const std::map<int, std::vector<double>>& fixed_load,
                                    int horizon,
                                    const std::map<int, dmo::AggregatedBid>& bids,
                                    IsoOptions opts = IsoOptions{}) {
  detail::IsoModel model =
      detail::build_iso_model(net, units, fixed_load, horizon, bids, opts);
  opt::MipSolution mip = opt::solve_mip(model.lp);
  if (mip.status != opt::SolveStatus::Optimal)
    throw IsoError("SCUC infeasible even with load-shedding slack");
  // Re-solve the fixed-commitment LP for prices.
  std::map<int, int> assignment;
  for (int j : model.lp.binary_vars())
    assignment[j] = static_cast<int>(std::lround(mip.values[j]));
  opt::LpSolution priced = opt::fix_binaries_and_price(model.lp, assignment);
  if (priced.status != opt::SolveStatus::Optimal)
    throw IsoError("SCUC pricing pass failed");
  IsoResult r = detail::extract(net, units, model, priced, bids);
  r.shed_cost *= opts.shed_price;
  r.welfare -= r.shed_cost;
  r.mip_nodes = mip.node_count;
  return r;
}

// Fixed-commitment optimal power flow; lambda_bt is the dual of bus b's
// balance constraint, so one extra MW of load at (b,t) raises cost by
// lambda_bt.
inline IsoResult redispatch(const core::TransmissionNetwork& net,
                            const std::vector<core::GridUnit>& units,
                            const std::vector<std::vector<int>>& commitment,
                            const std::map<int, std::vector<double>>& loads,
                            int horizon, IsoOptions opts = IsoOptions{}) {
  detail::IsoModel model =
      detail::build_iso_model(net, units, loads, horizon, {}, opts);
  if (commitment.size() != units.size())
    throw IsoError("commitment does not cover the unit fleet");
  std::map<int, int> assignment;
  for (size_t u = 0; u < units.size(); ++u) {
    if (static_cast<int>(commitment[u].size()) != horizon)
      throw IsoError("commitment horizon mismatch for unit " + units[u].unit.id);
    for (int t = 0; t < horizon; ++t)
      assignment[model.units[u].on[t]] = commitment[u][t];
  }
  // any remaining binaries (none today) default to off
  for (int j : model.lp.binary_vars())
    if (!assignment.count(j)) assignment[j] = 0;
  opt::LpSolution sol = opt::fix_binaries_and_price(model.lp, assignment);
  if (sol.status != opt::SolveStatus::Optimal)
    throw IsoError("redispatch infeasible under the fixed commitment");
  IsoResult r = detail::extract(net, units, model, sol, {});
  r.shed_cost *= opts.shed_price;
  r.welfare -= r.shed_cost;
  return r;
}

inline std::vector<std::vector<double>> compute_lmps(
    const core::TransmissionNetwork& net,
    const std::vector<core::GridUnit>& units,
    const std::vector<std::vector<int>>& commitment,
    const std::map<int, std::vector<double>>& loads, int horizon,
    IsoOptions opts = IsoOptions{}) {
  return redispatch(net, units, commitment, loads, horizon, opts).lmps;
}

inline void write_commitment_csv(const IsoResult& r, const std::string& path) {
  core::CsvWriter w(path);
  w.row({"hour", "unit", "committed", "dispatch_mw"});
  for (int t = 0; t < r.horizon(); ++t)
    for (size_t u = 0; u < r.unit_ids.size(); ++u)
      w.row({std::to_string(t + 1), r.unit_ids[u],
             std::to_string(r.commitment[u][t]), core::fmt(r.dispatch[u][t])});
}

inline void write_flows_csv(const IsoResult& r, const std::string& path) {
  core::CsvWriter w(path);
  w.row({"hour", "line", "flow_mw", "limit_mw", "binding"});
  for (int t = 0; t < r.horizon(); ++t)
    for (size_t l = 0; l < r.line_ids.size(); ++l) {
      bool binding = std::abs(std::abs(r.flows[l][t]) - r.line_limits[l]) <= 1e-6;
      w.row({std::to_string(t + 1), r.line_ids[l], core::fmt(r.flows[l][t]),
             core::fmt(r.line_limits[l]), binding ? "1" : "0"});
    }
}

inline void write_lmp_csv(const IsoResult& r, const std::string& path) {
  core::CsvWriter w(path);
  w.row({"hour", "bus", "lmp"});
  for (int t = 0; t < r.horizon(); ++t)
    for (size_t b = 0; b < r.bus_ids.size(); ++b)
      w.row({std::to_string(t + 1), std::to_string(r.bus_ids[b]),
             core::fmt(r.lmps[b][t])});
}

}  // namespace distmarket::iso
