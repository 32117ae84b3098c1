// End-to-end orchestration of the two scheduling schemes and the deviation
// penalty sweep, plus CSV/JSON report emission.
#pragma once

#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "distmarket/core/csv.hpp"
#include "distmarket/core/scenario.hpp"
#include "distmarket/core/types.hpp"
#include "distmarket/core/validate.hpp"
#include "distmarket/dmo/dmo.hpp"
#include "distmarket/iso/iso.hpp"
#include "distmarket/mg/scheduler.hpp"

namespace distmarket::pipeline {

using core::Scenario;

struct MicrogridOutcome {
  std::string id;
  core::MicrogridSchedule schedule;
  double settlement = 0.0;  // LMP-priced energy for the assigned power
  long mip_nodes = 0;
};

struct MarketCase {
  std::vector<core::DemandBid> bids;
  std::map<int, dmo::AggregatedBid> aggregated;  // by DMO bus
  iso::IsoResult iso;
  std::map<int, dmo::DisaggregationResult> split;  // by DMO bus
  std::vector<MicrogridOutcome> microgrids;
  std::vector<std::vector<double>> penalty_base;  // [mg][hour], LMP at the bus
  double mg_objective_total = 0.0;
  double settlement_total = 0.0;
};

struct PriceCase {
  iso::IsoResult forecast;
  std::vector<MicrogridOutcome> microgrids;
  iso::IsoResult redispatch;
  double lmp_drift_max = 0.0;    // max |after - before| over buses/hours
  double redispatch_delta = 0.0; // realized minus forecast system cost
  double mg_objective_total = 0.0;
};

struct SweepRow {
  double multiplier = 0.0;
  std::string microgrid;
  double deviation_mwh = 0.0;
  double deviation_cost = 0.0;
  double objective = 0.0;
  double shed_mwh = 0.0;
};

struct CaseReport {
  std::optional<MarketCase> market;
  std::optional<PriceCase> price;
  std::vector<SweepRow> sweep;
  std::string scenario_hash;
  long scuc_nodes = 0;
};

namespace detail {

inline std::vector<double> spiked_load(const core::MicrogridSpec& spec,
                                       const core::ScenarioConfig& cfg) {
  std::vector<double> out = spec.fixed_load;
  for (const auto& s : cfg.load_spike) out[s.hour - 1] *= s.multiplier;
  return out;
}

// FNV-1a over the canonical field order; identifies a scenario in reports.
inline std::string scenario_hash(const Scenario& sc) {
  uint64_t h = 1469598103934665603ull;
  auto mix = [&](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
    h ^= '\n';
    h *= 1099511628211ull;
  };
  for (int b : sc.network.buses) mix(std::to_string(b));
  for (const auto& l : sc.network.lines)
    mix(l.id + core::fmt(l.reactance) + core::fmt(l.flow_limit) +
        std::to_string(l.from_bus) + std::to_string(l.to_bus));
  for (const auto& g : sc.grid_units)
    mix(g.unit.id + std::to_string(g.bus) + core::fmt(g.unit.p_max) +
        core::fmt(g.unit.marginal_cost));
  for (const auto& m : sc.microgrids) {
    mix(m.id + std::to_string(m.bus) + core::fmt(m.voll) + core::fmt(m.tie_limit));
    for (double v : m.fixed_load) mix(core::fmt(v));
    for (double v : m.nondispatchable) mix(core::fmt(v));
    for (int v : m.islanding) mix(std::to_string(v));
    for (const auto& u : m.units) mix(u.id + core::fmt(u.marginal_cost) + core::fmt(u.p_max));
    for (const auto& s : m.storage) mix(s.id + core::fmt(s.energy_capacity));
    for (const auto& a : m.adjustable_loads) mix(a.id + core::fmt(a.required_energy));
  }
  for (const auto& [bus, prof] : sc.bus_loads) {
    mix(std::to_string(bus));
    for (double v : prof) mix(core::fmt(v));
  }
  mix(std::to_string(sc.config.horizon));
  for (const auto& s : sc.config.load_spike)
    mix(std::to_string(s.hour) + core::fmt(s.multiplier));
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Forecast net demand the utility submits for a microgrid: fixed load plus
// the adjustable loads' nominal profile minus nondispatchable output.
inline std::vector<double> forecast_net_load(const core::MicrogridSpec& m) {
  std::vector<double> out(m.horizon());
  for (int t = 0; t < m.horizon(); ++t)
    out[t] = m.fixed_load[t] - m.nondispatchable[t];
  for (const auto& a : m.adjustable_loads) {
    int len = a.window_end - a.window_start + 1;
    double nominal = a.required_energy / len;
    for (int t = a.window_start - 1; t <= a.window_end - 1; ++t)
      out[t] += nominal;
  }
  return out;
}

inline std::map<int, std::vector<double>> add_profiles(
    const std::map<int, std::vector<double>>& base, int bus,
    const std::vector<double>& extra) {
  auto out = base;
  auto& vec = out[bus];
  if (vec.empty()) vec.assign(extra.size(), 0.0);
  for (size_t t = 0; t < extra.size(); ++t) vec[t] += extra[t];
  return out;
}

}  // namespace detail

// Market-based scheme: bids -> aggregation -> welfare SCUC -> disaggregation
// -> microgrid scheduling against the assigned power.
inline MarketCase run_market_case(const Scenario& sc) {
  const int H = sc.config.horizon;
  MarketCase out;

  // (a) demand bids from the unspiked forecast
  for (const auto& m : sc.microgrids) out.bids.push_back(mg::build_demand_bid(m));

  // (b) aggregate per DMO bus
  std::map<int, std::vector<core::DemandBid>> by_bus;
  for (size_t i = 0; i < sc.microgrids.size(); ++i)
    by_bus[sc.microgrids[i].bus].push_back(out.bids[i]);
  for (const auto& [bus, bids] : by_bus)
    out.aggregated[bus] = dmo::aggregate_bids(bids);

  // (c) welfare SCUC with the bids' fixed parts folded into the bus loads
  std::map<int, std::vector<double>> fixed = sc.bus_loads;
  for (const auto& [bus, agg] : out.aggregated) {
    auto& vec = fixed[bus];
    if (vec.empty()) vec.assign(H, 0.0);
    for (int t = 0; t < H; ++t) vec[t] += agg.fixed[t];
  }
  out.iso = iso::solve_welfare_scuc(sc.network, sc.grid_units, fixed, H,
                                    out.aggregated,
                                    {sc.config.system_voll,
                                     sc.config.reserve_margin});

  // (d) disaggregate each DMO bus award back to its microgrids
  for (const auto& [bus, bids] : by_bus) {
    int b = out.iso.bus_index(bus);
    std::vector<double> award(H);
    for (int t = 0; t < H; ++t)
      award[t] = out.aggregated[bus].fixed[t] +
                 std::max(0.0, out.iso.responsive[b][t]);
    out.split[bus] = dmo::disaggregate_award(award, bids);
  }

  // (e) microgrid scheduling at the spiked (realized) load, penalties priced
  // at the market-clearing LMP times the scenario multiplier
  std::vector<core::MicrogridSpec> specs(sc.microgrids.begin(), sc.microgrids.end());
  std::vector<std::vector<double>> assigned(specs.size());
  out.penalty_base.resize(specs.size());
  for (size_t i = 0; i < specs.size(); ++i) {
    auto& spec = specs[i];
    spec.fixed_load = detail::spiked_load(spec, sc.config);
    int b = out.iso.bus_index(spec.bus);
    out.penalty_base[i].resize(H);
    spec.deviation_penalty.resize(H);
    for (int t = 0; t < H; ++t) {
      out.penalty_base[i][t] = std::max(0.0, out.iso.lmps[b][t]);
      spec.deviation_penalty[t] =
          out.penalty_base[i][t] * sc.config.penalty_multiplier;
    }
    const auto& split = out.split.at(spec.bus);
    for (size_t m = 0; m < split.microgrids.size(); ++m)
      if (split.microgrids[m] == spec.id) assigned[i] = split.assigned[m];
  }
  std::vector<std::future<MicrogridOutcome>> jobs;
  for (size_t i = 0; i < specs.size(); ++i) {
    jobs.push_back(std::async(std::launch::async, [&, i]() {
      MicrogridOutcome o;
      o.id = specs[i].id;
      o.schedule = mg::build_market_schedule(specs[i], assigned[i],
                                             sc.config.penalty_mode, &o.mip_nodes);
      int b = out.iso.bus_index(specs[i].bus);
      for (int t = 0; t < H; ++t)
        o.settlement += out.iso.lmps[b][t] * assigned[i][t];
      return o;
    }));
  }
  for (auto& j : jobs) {
    out.microgrids.push_back(j.get());
    out.mg_objective_total += out.microgrids.back().schedule.objective;
    out.settlement_total += out.microgrids.back().settlement;
  }
  return out;
}

// Price-based scheme: SCUC on utility forecasts, LMP broadcast, local cost
// minimization, then redispatch at the realized net loads.
inline PriceCase run_price_case(const Scenario& sc) {
  const int H = sc.config.horizon;
  PriceCase out;

  std::map<int, std::vector<double>> forecast = sc.bus_loads;
  for (const auto& m : sc.microgrids)
    forecast = detail::add_profiles(forecast, m.bus, detail::forecast_net_load(m));
  out.forecast = iso::solve_welfare_scuc(sc.network, sc.grid_units, forecast, H,
                                         {},
                                         {sc.config.system_voll,
                                          sc.config.reserve_margin});

  std::vector<core::MicrogridSpec> specs(sc.microgrids.begin(), sc.microgrids.end());
  std::vector<std::future<MicrogridOutcome>> jobs;
  for (size_t i = 0; i < specs.size(); ++i) {
    specs[i].fixed_load = detail::spiked_load(specs[i], sc.config);
    jobs.push_back(std::async(std::launch::async, [&, i]() {
      MicrogridOutcome o;
      o.id = specs[i].id;
      int b = out.forecast.bus_index(specs[i].bus);
      std::vector<double> lambda(H);
      for (int t = 0; t < H; ++t) lambda[t] = out.forecast.lmps[b][t];
      o.schedule = mg::build_price_schedule(specs[i], lambda, &o.mip_nodes);
      return o;
    }));
  }
  for (auto& j : jobs) {
    out.microgrids.push_back(j.get());
    out.mg_objective_total += out.microgrids.back().schedule.objective;
  }

  // realized bus loads: the microgrids' scheduled net imports
  std::map<int, std::vector<double>> realized = sc.bus_loads;
  for (size_t i = 0; i < specs.size(); ++i)
    realized =
        detail::add_profiles(realized, specs[i].bus, out.microgrids[i].schedule.grid_power);
  out.redispatch = iso::redispatch(sc.network, sc.grid_units,
                                   out.forecast.commitment, realized, H,
                                   {sc.config.system_voll,
                                    sc.config.reserve_margin});
  for (size_t b = 0; b < out.forecast.bus_ids.size(); ++b)
    for (int t = 0; t < H; ++t)
      out.lmp_drift_max = std::max(
          out.lmp_drift_max,
          std::abs(out.redispatch.lmps[b][t] - out.forecast.lmps[b][t]));
  out.redispatch_delta = (out.redispatch.generation_cost + out.redispatch.shed_cost) -
                         (out.forecast.generation_cost + out.forecast.shed_cost);
  return out;
}

// Re-run only the microgrid stage for each penalty multiplier; the ISO award
// and market prices stay fixed.
inline std::vector<SweepRow> run_penalty_sweep(const Scenario& sc,
                                               const MarketCase& market) {
  const int H = sc.config.horizon;
  std::vector<SweepRow> rows;
  for (double mult : sc.config.penalty_multipliers) {
    for (size_t i = 0; i < sc.microgrids.size(); ++i) {
      core::MicrogridSpec spec = sc.microgrids[i];
      spec.fixed_load = detail::spiked_load(spec, sc.config);
      spec.deviation_penalty.resize(H);
      for (int t = 0; t < H; ++t)
        spec.deviation_penalty[t] = market.penalty_base[i][t] * mult;
      std::vector<double> assigned;
      const auto& split = market.split.at(spec.bus);
      for (size_t m = 0; m < split.microgrids.size(); ++m)
        if (split.microgrids[m] == spec.id) assigned = split.assigned[m];
      auto sched = mg::build_market_schedule(spec, assigned, sc.config.penalty_mode);
      SweepRow row;
      row.multiplier = mult;
      row.microgrid = spec.id;
      for (int t = 0; t < H; ++t) {
        row.deviation_mwh += sched.deviation_pos[t];
        row.shed_mwh += sched.load_shed[t];
      }
      row.deviation_cost = sched.cost_deviation;
      row.objective = sched.objective;
      rows.push_back(row);
    }
  }
  return rows;
}

inline CaseReport run(const Scenario& sc, bool with_sweep = false) {
  CaseReport rep;
  rep.scenario_hash = detail::scenario_hash(sc);
  if (sc.config.mode != core::RunMode::Price) {
    rep.market = run_market_case(sc);
    rep.scuc_nodes = rep.market->iso.mip_nodes;
    if (with_sweep) rep.sweep = run_penalty_sweep(sc, *rep.market);
  }
  if (sc.config.mode != core::RunMode::Market) rep.price = run_price_case(sc);
  return rep;
}

inline void write_outputs(const Scenario& sc, const CaseReport& rep,
                          const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  auto p = [&](const std::string& name) { return (fs::path(out_dir) / name).string(); };
  nlohmann::json summary;
  summary["scenario_hash"] = rep.scenario_hash;
  summary["horizon"] = sc.config.horizon;

  if (rep.market) {
    const MarketCase& mc = *rep.market;
    iso::write_commitment_csv(mc.iso, p("iso_commitment.csv"));
    iso::write_flows_csv(mc.iso, p("iso_flows.csv"));
    iso::write_lmp_csv(mc.iso, p("iso_lmp.csv"));
    for (const auto& [bus, agg] : mc.aggregated)
      dmo::write_aggregated_bid_csv(
          agg, p("dmo_aggregated_bid_bus" + std::to_string(bus) + ".csv"));
    for (const auto& [bus, split] : mc.split)
      dmo::write_disaggregation_csv(
          split, p("dmo_disaggregation_bus" + std::to_string(bus) + ".csv"));
    nlohmann::json jmgs = nlohmann::json::array();
    for (size_t i = 0; i < mc.microgrids.size(); ++i) {
      const auto& o = mc.microgrids[i];
      core::MicrogridSpec spec = sc.microgrids[i];
      spec.fixed_load = detail::spiked_load(spec, sc.config);
      mg::write_schedule_csv(spec, o.schedule, p("mg_" + o.id + "_schedule.csv"));
      double dev_total = 0.0;
      for (double v : o.schedule.deviation_pos) dev_total += v;
      jmgs.push_back({{"id", o.id},
                      {"objective", o.schedule.objective},
                      {"cost_operation", o.schedule.cost_operation},
                      {"cost_curtailment", o.schedule.cost_curtailment},
                      {"cost_deviation", o.schedule.cost_deviation},
                      {"deviation_mwh", dev_total},
                      {"settlement", o.settlement},
                      {"objective_plus_settlement",
                       o.schedule.objective + o.settlement},
                      {"solver_nodes", o.mip_nodes}});
    }
    bool shed_flag = false;
    for (const auto& v : mc.iso.shed)
      for (double x : v) shed_flag |= x > 1e-6;
    summary["market"] = {{"microgrids", jmgs},
                         {"iso_welfare", mc.iso.welfare},
                         {"iso_generation_cost", mc.iso.generation_cost},
                         {"iso_benefit", mc.iso.consumption_benefit},
                         {"iso_shed_flag", shed_flag},
                         {"scuc_nodes", mc.iso.mip_nodes},
                         {"mg_objective_total", mc.mg_objective_total},
                         {"settlement_total", mc.settlement_total}};
  }

  if (rep.price) {
    const PriceCase& pc = *rep.price;
    iso::write_commitment_csv(pc.forecast, p("price_iso_commitment.csv"));
    iso::write_flows_csv(pc.forecast, p("price_iso_flows.csv"));
    iso::write_lmp_csv(pc.forecast, p("price_iso_lmp.csv"));
    iso::write_lmp_csv(pc.redispatch, p("price_redispatch_lmp.csv"));
    iso::write_flows_csv(pc.redispatch, p("price_redispatch_flows.csv"));
    nlohmann::json jmgs = nlohmann::json::array();
    for (size_t i = 0; i < pc.microgrids.size(); ++i) {
      const auto& o = pc.microgrids[i];
      core::MicrogridSpec spec = sc.microgrids[i];
      spec.fixed_load = detail::spiked_load(spec, sc.config);
      mg::write_schedule_csv(spec, o.schedule,
                             p("price_mg_" + o.id + "_schedule.csv"));
      jmgs.push_back({{"id", o.id},
                      {"objective", o.schedule.objective},
                      {"cost_operation", o.schedule.cost_operation},
                      {"cost_curtailment", o.schedule.cost_curtailment},
                      {"cost_grid_energy", o.schedule.cost_grid_energy},
                      {"solver_nodes", o.mip_nodes}});
    }
    summary["price"] = {{"microgrids", jmgs},
                        {"forecast_cost",
                         pc.forecast.generation_cost + pc.forecast.shed_cost},
                        {"redispatch_cost",
                         pc.redispatch.generation_cost + pc.redispatch.shed_cost},
                        {"redispatch_delta", pc.redispatch_delta},
                        {"lmp_drift_max", pc.lmp_drift_max},
                        {"mg_objective_total", pc.mg_objective_total}};
  }

  if (rep.market && rep.price)
    summary["comparison"] = {
        {"market_mg_total", rep.market->mg_objective_total},
        {"price_mg_total", rep.price->mg_objective_total},
        {"market_settlement_total", rep.market->settlement_total}};

  if (!rep.sweep.empty()) {
    core::CsvWriter w(p("sweep.csv"));
    w.row({"multiplier", "microgrid", "deviation_mwh", "deviation_cost",
           "objective", "shed_mwh"});
    nlohmann::json jsweep = nlohmann::json::array();
    for (const auto& r : rep.sweep) {
      w.row({core::fmt(r.multiplier), r.microgrid, core::fmt(r.deviation_mwh),
             core::fmt(r.deviation_cost), core::fmt(r.objective),
             core::fmt(r.shed_mwh)});
      jsweep.push_back({{"multiplier", r.multiplier},
                        {"microgrid", r.microgrid},
                        {"deviation_mwh", r.deviation_mwh},
                        {"deviation_cost", r.deviation_cost},
                        {"objective", r.objective}});
    }
    summary["sweep"] = jsweep;
  }

  std::ofstream js(p("summary.json"));
  js << summary.dump(2) << "\n";
}

}  // namespace distmarket::pipeline
