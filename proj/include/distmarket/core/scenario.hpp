// Scenario directory ingestion and re-serialization. A scenario is a
// scenario.toml key-value file plus CSV tables (buses, lines, units,
// microgrids, DER fleets, hourly profiles). Everything is validated on load;
// loaded data is immutable afterwards and safe for concurrent reads.
#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "distmarket/core/csv.hpp"
#include "distmarket/core/types.hpp"

namespace distmarket::core {

enum class RunMode { Market, Price, Both };

struct LoadSpike {
  int hour = 0;  // 1-based
  double multiplier = 1.0;
};

struct IslandingOverride {
  std::string microgrid;
  int hour = 0;  // 1-based
};

struct ScenarioConfig {
  int horizon = 24;
  RunMode mode = RunMode::Both;
  std::vector<double> penalty_multipliers = {1.0, 2.0, 5.0};
  double penalty_multiplier = 1.0;  // base multiplier for the market case
  PenaltyMode penalty_mode = PenaltyMode::PositiveOnly;
  double system_voll = 5000.0;     // $/MWh, prices the ISO shed slack
  double reserve_margin = 0.0;     // fraction, 0 disables the reserve rows
  std::vector<IslandingOverride> islanding_overrides;
  std::vector<LoadSpike> load_spike;
  std::string output_dir = "out";
  long seed = 0;
};

inline std::vector<std::string> check_invariants(const ScenarioConfig& c) {
  std::vector<std::string> out;
  if (c.horizon < 1) out.push_back("config: horizon must be >= 1");
  for (double m : c.penalty_multipliers)
    if (!(m > 0)) out.push_back("config: penalty multipliers must be > 0");
  if (!(c.penalty_multiplier > 0))
    out.push_back("config: penalty multiplier must be > 0");
  for (const auto& s : c.load_spike) {
    if (s.hour < 1 || s.hour > c.horizon)
      out.push_back("config: load spike hour out of 1..horizon");
    if (!(s.multiplier > 0)) out.push_back("config: spike multipliers must be > 0");
  }
  for (const auto& ov : c.islanding_overrides)
    if (ov.hour < 1 || ov.hour > c.horizon)
      out.push_back("config: islanding override hour out of 1..horizon");
  return out;
}

struct Scenario {
  TransmissionNetwork network;
  std::vector<GridUnit> grid_units;
  std::vector<MicrogridSpec> microgrids;
  std::map<int, std::vector<double>> bus_loads;  // non-microgrid fixed demand
  ScenarioConfig config;
};

namespace detail {

inline std::map<std::string, std::string> read_kv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError(path, 0, "missing file");
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t h = line.find('#');
    if (h != std::string::npos) line.resize(h);
    size_t a = line.find_first_not_of(" \t\r");
    if (a == std::string::npos) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw LoadError(path, lineno, "expected key = value");
    auto trim = [](std::string s) {
      size_t x = s.find_first_not_of(" \t\r\"");
      size_t y = s.find_last_not_of(" \t\r\"");
      return x == std::string::npos ? std::string{} : s.substr(x, y - x + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    // strip optional [ ] around lists
    if (!val.empty() && val.front() == '[') val.erase(0, 1);
    if (!val.empty() && val.back() == ']') val.pop_back();
    kv[key] = val;
  }
  return kv;
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(ch))) {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

inline DispatchableUnit unit_from_row(const CsvTable& t, size_t r) {
  DispatchableUnit u;
  u.id = t.cell(r, t.require_col("id"));
  u.p_min = t.num(r, t.require_col("pmin"));
  u.p_max = t.num(r, t.require_col("pmax"));
  u.marginal_cost = t.num(r, t.require_col("cost"));
  u.no_load_cost = t.num(r, t.require_col("noload"));
  u.startup_cost = t.num(r, t.require_col("startup"));
  u.shutdown_cost = t.num(r, t.require_col("shutdown"));
  u.ramp_up = t.num(r, t.require_col("ur"));
  u.ramp_down = t.num(r, t.require_col("dr"));
  u.min_up = static_cast<int>(t.integer(r, t.require_col("minup")));
  u.min_down = static_cast<int>(t.integer(r, t.require_col("mindown")));
  u.initial_on = t.flag(r, t.require_col("init_on"));
  u.initial_power = t.num(r, t.require_col("init_p"));
  return u;
}

}  // namespace detail

inline ScenarioConfig parse_config(const std::string& path, int* horizon_hint = nullptr) {
  auto kv = detail::read_kv_file(path);
  ScenarioConfig cfg;
  auto get = [&](const char* key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    return it->second;
  };
  if (auto v = get("horizon")) cfg.horizon = std::stoi(*v);
  if (horizon_hint) *horizon_hint = cfg.horizon;
  if (auto v = get("mode")) {
    if (*v == "market") cfg.mode = RunMode::Market;
    else if (*v == "price") cfg.mode = RunMode::Price;
    else if (*v == "both") cfg.mode = RunMode::Both;
    else throw LoadError(path, 0, "mode must be market|price|both");
  }
  if (auto v = get("penalty_mode")) {
    if (*v == "positive" || *v == "positive_only")
      cfg.penalty_mode = PenaltyMode::PositiveOnly;
    else if (*v == "absolute") cfg.penalty_mode = PenaltyMode::Absolute;
    else throw LoadError(path, 0, "penalty_mode must be positive|absolute");
  }
  if (auto v = get("penalty_multiplier")) cfg.penalty_multiplier = std::stod(*v);
  if (auto v = get("penalty_multipliers")) {
    cfg.penalty_multipliers.clear();
    for (const auto& s : detail::split_list(*v))
      cfg.penalty_multipliers.push_back(std::stod(s));
    if (cfg.penalty_multipliers.empty())
      throw LoadError(path, 0, "penalty_multipliers must be nonempty");
  }
  if (auto v = get("system_voll")) cfg.system_voll = std::stod(*v);
  if (auto v = get("reserve_margin")) cfg.reserve_margin = std::stod(*v);
  if (auto v = get("seed")) cfg.seed = std::stol(*v);
  if (auto v = get("output_dir")) cfg.output_dir = *v;
  if (auto v = get("load_spike")) {
    for (const auto& s : detail::split_list(*v)) {
      size_t colon = s.find(':');
      if (colon == std::string::npos)
        throw LoadError(path, 0, "load_spike entries use hour:multiplier");
      cfg.load_spike.push_back(
          {std::stoi(s.substr(0, colon)), std::stod(s.substr(colon + 1))});
    }
  }
  if (auto v = get("islanding_overrides")) {
    for (const auto& s : detail::split_list(*v)) {
      size_t colon = s.find(':');
      if (colon == std::string::npos)
        throw LoadError(path, 0, "islanding_overrides entries use mg:hour");
      cfg.islanding_overrides.push_back(
          {s.substr(0, colon), std::stoi(s.substr(colon + 1))});
    }
  }
  for (const auto& err : check_invariants(cfg)) throw LoadError(path, 0, err);
  return cfg;
}

// Load and fully validate a scenario directory. Any missing file, malformed
// row, or violated invariant raises LoadError naming file, row, and rule.
inline Scenario load_scenario(const std::string& dir) {
  namespace fs = std::filesystem;
  Scenario sc;
  sc.config = parse_config((fs::path(dir) / "scenario.toml").string());
  const int H = sc.config.horizon;

  // network
  {
    CsvTable buses = read_csv((fs::path(dir) / "buses.csv").string());
    int cid = buses.require_col("id");
    for (size_t r = 0; r < buses.rows.size(); ++r)
      sc.network.buses.push_back(static_cast<int>(buses.integer(r, cid)));
    if (sc.network.buses.empty())
      throw LoadError(buses.path, 0, "scenario needs at least one bus");
    sc.network.reference_bus = sc.network.buses.front();

    CsvTable lines = read_csv((fs::path(dir) / "lines.csv").string());
    int lid = lines.require_col("id");
    int lfrom = lines.require_col("from");
    int lto = lines.require_col("to");
    int lx = lines.require_col("x");
    int llim = lines.require_col("limit");
    for (size_t r = 0; r < lines.rows.size(); ++r) {
      TransmissionLine l;
      l.id = lines.cell(r, lid);
      l.from_bus = static_cast<int>(lines.integer(r, lfrom));
      l.to_bus = static_cast<int>(lines.integer(r, lto));
      l.reactance = lines.num(r, lx);
      l.flow_limit = lines.num(r, llim);
      sc.network.lines.push_back(l);
    }
  }

  // grid units
  {
    CsvTable t = read_csv((fs::path(dir) / "units.csv").string());
    int cbus = t.require_col("bus");
    for (size_t r = 0; r < t.rows.size(); ++r) {
      GridUnit g;
      g.bus = static_cast<int>(t.integer(r, cbus));
      g.unit = detail::unit_from_row(t, r);
      if (!sc.network.has_bus(g.bus))
        throw LoadError(t.path, static_cast<int>(r) + 2,
                        "unit " + g.unit.id + " references unknown bus");
      for (const auto& err : check_invariants(g.unit))
        throw LoadError(t.path, static_cast<int>(r) + 2, err);
      sc.grid_units.push_back(std::move(g));
    }
  }

  // microgrids
  {
    CsvTable t = read_csv((fs::path(dir) / "microgrids.csv").string());
    int cid = t.require_col("id");
    int cbus = t.require_col("bus");
    int cvoll = t.require_col("voll");
    int ctie = t.require_col("tie_limit");
    for (size_t r = 0; r < t.rows.size(); ++r) {
      MicrogridSpec m;
      m.id = t.cell(r, cid);
      m.bus = static_cast<int>(t.integer(r, cbus));
      m.voll = t.num(r, cvoll);
      m.tie_limit = t.num(r, ctie);
      m.fixed_load.assign(H, 0.0);
      m.nondispatchable.assign(H, 0.0);
      m.islanding.assign(H, 1);
      m.deviation_penalty.assign(H, 0.0);
      if (!sc.network.has_bus(m.bus))
        throw LoadError(t.path, static_cast<int>(r) + 2,
                        "microgrid " + m.id + " references unknown bus");
      sc.microgrids.push_back(std::move(m));
    }
  }
  auto find_mg = [&](const std::string& id) -> MicrogridSpec* {
    for (auto& m : sc.microgrids)
      if (m.id == id) return &m;
    return nullptr;
  };

  // DER fleets
  {
    CsvTable t = read_csv((fs::path(dir) / "mg_units.csv").string());
    int cmg = t.require_col("mg");
    for (size_t r = 0; r < t.rows.size(); ++r) {
      MicrogridSpec* m = find_mg(t.cell(r, cmg));
      if (!m)
        throw LoadError(t.path, static_cast<int>(r) + 2,
                        "unknown microgrid '" + t.cell(r, cmg) + "'");
      m->units.push_back(detail::unit_from_row(t, r));
    }
  }
  {
    CsvTable t = read_csv((fs::path(dir) / "mg_storage.csv").string());
    int cmg = t.require_col("mg");
    int cid = t.require_col("id");
    for (size_t r = 0; r < t.rows.size(); ++r) {
      MicrogridSpec* m = find_mg(t.cell(r, cmg));
      if (!m)
        throw LoadError(t.path, static_cast<int>(r) + 2,
                        "unknown microgrid '" + t.cell(r, cmg) + "'");
      StorageUnit s;
      s.id = t.cell(r, cid);
      s.charge_max = t.num(r, t.require_col("charge_max"));
      s.discharge_max = t.num(r, t.require_col("discharge_max"));
      s.energy_capacity = t.num(r, t.require_col("capacity"));
      s.soc_min = t.num(r, t.require_col("soc_min"));
      s.soc_max = t.num(r, t.require_col("soc_max"));
      s.charge_eff = t.num(r, t.require_col("charge_eff"));
      s.discharge_eff = t.num(r, t.require_col("discharge_eff"));
      s.initial_soc = t.num(r, t.require_col("initial_soc"));
      m->storage.push_back(std::move(s));
    }
  }
  {
    CsvTable t = read_csv((fs::path(dir) / "mg_adjustable.csv").string());
    int cmg = t.require_col("mg");
    int cid = t.require_col("id");
    for (size_t r = 0; r < t.rows.size(); ++r) {
      MicrogridSpec* m = find_mg(t.cell(r, cmg));
      if (!m)
        throw LoadError(t.path, static_cast<int>(r) + 2,
                        "unknown microgrid '" + t.cell(r, cmg) + "'");
      AdjustableLoad a;
      a.id = t.cell(r, cid);
      a.d_min = t.num(r, t.require_col("dmin"));
      a.d_max = t.num(r, t.require_col("dmax"));
      a.required_energy = t.num(r, t.require_col("energy"));
      a.window_start = static_cast<int>(t.integer(r, t.require_col("start")));
      a.window_end = static_cast<int>(t.integer(r, t.require_col("end")));
      a.min_operating_time = static_cast<int>(t.integer(r, t.require_col("min_time")));
      a.pickup_rate = t.num(r, t.require_col("pickup"));
      a.drop_rate = t.num(r, t.require_col("drop"));
      m->adjustable_loads.push_back(std::move(a));
    }
  }

  // hourly profiles: entity keys are mg:<id>:fixed | mg:<id>:ndg |
  // mg:<id>:islanding | bus:<id>:load
  {
    CsvTable t = read_csv((fs::path(dir) / "profiles.csv").string());
    int cent = t.require_col("entity");
    int chour = t.require_col("hour");
    int cval = t.require_col("value");
    for (size_t r = 0; r < t.rows.size(); ++r) {
      const std::string key = t.cell(r, cent);
      int hour = static_cast<int>(t.integer(r, chour));
      if (hour < 1 || hour > H)
        throw LoadError(t.path, static_cast<int>(r) + 2,
                        "hour " + std::to_string(hour) + " out of 1.." +
                            std::to_string(H));
      double value = t.num(r, cval);
      auto parts = [&] {
        std::vector<std::string> p;
        std::string cur;
        for (char ch : key) {
          if (ch == ':') {
            p.push_back(cur);
            cur.clear();
          } else cur.push_back(ch);
        }
        p.push_back(cur);
        return p;
      }();
      if (parts.size() != 3)
        throw LoadError(t.path, static_cast<int>(r) + 2,
                        "entity key must be kind:id:field, got '" + key + "'");
      if (parts[0] == "mg") {
        MicrogridSpec* m = find_mg(parts[1]);
        if (!m)
          throw LoadError(t.path, static_cast<int>(r) + 2,
                          "unknown microgrid '" + parts[1] + "'");
        if (parts[2] == "fixed") m->fixed_load[hour - 1] = value;
        else if (parts[2] == "ndg") m->nondispatchable[hour - 1] = value;
        else if (parts[2] == "islanding")
          m->islanding[hour - 1] = value != 0.0 ? 1 : 0;
        else
          throw LoadError(t.path, static_cast<int>(r) + 2,
                          "unknown microgrid field '" + parts[2] + "'");
      } else if (parts[0] == "bus") {
        int bus = std::stoi(parts[1]);
        if (!sc.network.has_bus(bus))
          throw LoadError(t.path, static_cast<int>(r) + 2,
                          "unknown bus '" + parts[1] + "'");
        auto& vec = sc.bus_loads[bus];
        if (vec.empty()) vec.assign(H, 0.0);
        vec[hour - 1] = value;
      } else {
        throw LoadError(t.path, static_cast<int>(r) + 2,
                        "unknown entity kind '" + parts[0] + "'");
      }
    }
  }

  // islanding overrides from the config
  for (const auto& ov : sc.config.islanding_overrides) {
    MicrogridSpec* m = find_mg(ov.microgrid);
    if (!m)
      throw LoadError(dir + "/scenario.toml", 0,
                      "islanding override names unknown microgrid '" +
                          ov.microgrid + "'");
    m->islanding[ov.hour - 1] = 0;
  }

  // whole-scenario invariants
  for (const auto& err : check_invariants(sc.network))
    throw LoadError(dir + "/lines.csv", 0, err);
  for (const auto& m : sc.microgrids)
    for (const auto& err : check_invariants(m))
      throw LoadError(dir + "/microgrids.csv", 0, err);
  return sc;
}

// Re-serialize a scenario into `dir` in exactly the load format.
inline void save_scenario(const Scenario& sc, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const ScenarioConfig& c = sc.config;
  {
    std::ofstream out(fs::path(dir) / "scenario.toml");
    out << "horizon = " << c.horizon << "\n";
    out << "mode = "
        << (c.mode == RunMode::Market ? "market"
                                      : c.mode == RunMode::Price ? "price" : "both")
        << "\n";
    out << "penalty_mode = "
        << (c.penalty_mode == PenaltyMode::PositiveOnly ? "positive" : "absolute")
        << "\n";
    out << "penalty_multiplier = " << fmt(c.penalty_multiplier) << "\n";
    out << "penalty_multipliers = [";
    for (size_t i = 0; i < c.penalty_multipliers.size(); ++i)
      out << (i ? ", " : "") << fmt(c.penalty_multipliers[i]);
    out << "]\n";
    out << "system_voll = " << fmt(c.system_voll) << "\n";
    out << "reserve_margin = " << fmt(c.reserve_margin) << "\n";
    out << "seed = " << c.seed << "\n";
    if (!c.load_spike.empty()) {
      out << "load_spike = ";
      for (size_t i = 0; i < c.load_spike.size(); ++i)
        out << (i ? "," : "") << c.load_spike[i].hour << ":"
            << fmt(c.load_spike[i].multiplier);
      out << "\n";
    }
  }
  {
    CsvWriter w((fs::path(dir) / "buses.csv").string());
    w.row({"id"});
    for (int b : sc.network.buses) w.row({std::to_string(b)});
  }
  {
    CsvWriter w((fs::path(dir) / "lines.csv").string());
    w.row({"id", "from", "to", "x", "limit"});
    for (const auto& l : sc.network.lines)
      w.row({l.id, std::to_string(l.from_bus), std::to_string(l.to_bus),
             fmt(l.reactance), fmt(l.flow_limit)});
  }
  auto unit_cells = [](const DispatchableUnit& u) {
    return std::vector<std::string>{
        u.id, fmt(u.p_min), fmt(u.p_max), fmt(u.marginal_cost),
        fmt(u.no_load_cost), fmt(u.startup_cost), fmt(u.shutdown_cost),
        fmt(u.ramp_up), fmt(u.ramp_down), std::to_string(u.min_up),
        std::to_string(u.min_down), u.initial_on ? "1" : "0",
        fmt(u.initial_power)};
  };
  {
    CsvWriter w((fs::path(dir) / "units.csv").string());
    w.row({"id", "bus", "pmin", "pmax", "cost", "noload", "startup", "shutdown",
           "ur", "dr", "minup", "mindown", "init_on", "init_p"});
    for (const auto& g : sc.grid_units) {
      auto cells = unit_cells(g.unit);
      cells.insert(cells.begin() + 1, std::to_string(g.bus));
      w.row(cells);
    }
  }
  {
    CsvWriter w((fs::path(dir) / "microgrids.csv").string());
    w.row({"id", "bus", "voll", "tie_limit"});
    for (const auto& m : sc.microgrids)
      w.row({m.id, std::to_string(m.bus), fmt(m.voll), fmt(m.tie_limit)});
  }
  {
    CsvWriter w((fs::path(dir) / "mg_units.csv").string());
    w.row({"mg", "id", "pmin", "pmax", "cost", "noload", "startup", "shutdown",
           "ur", "dr", "minup", "mindown", "init_on", "init_p"});
    for (const auto& m : sc.microgrids)
      for (const auto& u : m.units) {
        auto cells = unit_cells(u);
        cells.insert(cells.begin(), m.id);
        w.row(cells);
      }
  }
  {
    CsvWriter w((fs::path(dir) / "mg_storage.csv").string());
    w.row({"mg", "id", "charge_max", "discharge_max", "capacity", "soc_min",
           "soc_max", "charge_eff", "discharge_eff", "initial_soc"});
    for (const auto& m : sc.microgrids)
      for (const auto& s : m.storage)
        w.row({m.id, s.id, fmt(s.charge_max), fmt(s.discharge_max),
               fmt(s.energy_capacity), fmt(s.soc_min), fmt(s.soc_max),
               fmt(s.charge_eff), fmt(s.discharge_eff), fmt(s.initial_soc)});
  }
  {
    CsvWriter w((fs::path(dir) / "mg_adjustable.csv").string());
    w.row({"mg", "id", "dmin", "dmax", "energy", "start", "end", "min_time",
           "pickup", "drop"});
    for (const auto& m : sc.microgrids)
      for (const auto& a : m.adjustable_loads)
        w.row({m.id, a.id, fmt(a.d_min), fmt(a.d_max), fmt(a.required_energy),
               std::to_string(a.window_start), std::to_string(a.window_end),
               std::to_string(a.min_operating_time), fmt(a.pickup_rate),
               fmt(a.drop_rate)});
  }
  {
    CsvWriter w((fs::path(dir) / "profiles.csv").string());
    w.row({"entity", "hour", "value"});
    for (const auto& m : sc.microgrids) {
      for (int t = 0; t < sc.config.horizon; ++t)
        w.row({"mg:" + m.id + ":fixed", std::to_string(t + 1),
               fmt(m.fixed_load[t])});
      for (int t = 0; t < sc.config.horizon; ++t)
        w.row({"mg:" + m.id + ":ndg", std::to_string(t + 1),
               fmt(m.nondispatchable[t])});
      for (int t = 0; t < sc.config.horizon; ++t)
        if (m.islanding[t] == 0)
          w.row({"mg:" + m.id + ":islanding", std::to_string(t + 1), "0"});
    }
    for (const auto& [bus, profile] : sc.bus_loads)
      for (int t = 0; t < sc.config.horizon; ++t)
        w.row({"bus:" + std::to_string(bus) + ":load", std::to_string(t + 1),
               fmt(profile[t])});
  }
}

}  // namespace distmarket::core
