#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>

#include "distmarket/core/scenario.hpp"
#include "distmarket/core/validate.hpp"
#include "distmarket/mg/scheduler.hpp"
#include "support/spec_builders.hpp"

using namespace distmarket;
namespace fs = std::filesystem;

static const std::string kSixBus = std::string(DM_SOURCE_DIR) + "/scenarios/sixbus";

TEST_CASE("bundled six-bus scenario loads with the documented shape") {
  core::Scenario sc = core::load_scenario(kSixBus);
  CHECK(sc.network.buses.size() == 6);
  CHECK(sc.network.lines.size() == 7);
  CHECK(sc.grid_units.size() == 3);
  CHECK(sc.microgrids.size() == 2);
  CHECK(sc.config.horizon == 24);
  CHECK(sc.microgrids[0].islanding[7] == 0);  // hour 8 islanded
  CHECK(sc.microgrids[0].storage.size() == 1);
  CHECK(sc.microgrids[1].units.size() == 4);
  CHECK(sc.bus_loads.at(2)[0] == Catch::Approx(45.0));
}

TEST_CASE("empty microgrid list is a valid scenario") {
  core::Scenario sc = core::load_scenario(kSixBus);
  sc.microgrids.clear();
  fs::path dir = fs::temp_directory_path() / "dm_empty_mg";
  core::save_scenario(sc, dir.string());
  core::Scenario back = core::load_scenario(dir.string());
  CHECK(back.microgrids.empty());
  CHECK(back.grid_units.size() == 3);
}

TEST_CASE("zero reactance is rejected with the invariant named") {
  core::Scenario sc = core::load_scenario(kSixBus);
  sc.network.lines[2].reactance = 0.0;
  fs::path dir = fs::temp_directory_path() / "dm_bad_x";
  core::save_scenario(sc, dir.string());
  try {
    core::load_scenario(dir.string());
    FAIL("expected LoadError");
  } catch (const core::LoadError& e) {
    CHECK(std::string(e.what()).find("reactance must be positive") !=
          std::string::npos);
  }
}

TEST_CASE("missing file and malformed rows are reported with context") {
  fs::path dir = fs::temp_directory_path() / "dm_missing";
  fs::remove_all(dir);
  fs::create_directories(dir);
  CHECK_THROWS_AS(core::load_scenario(dir.string()), core::LoadError);

  // ragged row
  core::Scenario sc = core::load_scenario(kSixBus);
  core::save_scenario(sc, dir.string());
  std::ofstream app(dir / "lines.csv", std::ios::app);
  app << "L9,1\n";
  app.close();
  try {
    core::load_scenario(dir.string());
    FAIL("expected LoadError");
  } catch (const core::LoadError& e) {
    CHECK(std::string(e.what()).find("lines.csv") != std::string::npos);
    CHECK(e.row() > 1);
  }
}

TEST_CASE("scenario round-trips through save and load") {
  core::Scenario a = core::load_scenario(kSixBus);
  fs::path dir1 = fs::temp_directory_path() / "dm_rt1";
  fs::path dir2 = fs::temp_directory_path() / "dm_rt2";
  core::save_scenario(a, dir1.string());
  core::Scenario b = core::load_scenario(dir1.string());
  core::save_scenario(b, dir2.string());

  REQUIRE(b.network.buses == a.network.buses);
  REQUIRE(b.grid_units.size() == a.grid_units.size());
  for (size_t i = 0; i < a.grid_units.size(); ++i) {
    CHECK(b.grid_units[i].unit.id == a.grid_units[i].unit.id);
    CHECK(b.grid_units[i].unit.p_max == a.grid_units[i].unit.p_max);
    CHECK(b.grid_units[i].unit.startup_cost == a.grid_units[i].unit.startup_cost);
  }
  REQUIRE(b.microgrids.size() == a.microgrids.size());
  for (size_t i = 0; i < a.microgrids.size(); ++i) {
    CHECK(b.microgrids[i].fixed_load == a.microgrids[i].fixed_load);
    CHECK(b.microgrids[i].nondispatchable == a.microgrids[i].nondispatchable);
    CHECK(b.microgrids[i].islanding == a.microgrids[i].islanding);
    CHECK(b.microgrids[i].voll == a.microgrids[i].voll);
    REQUIRE(b.microgrids[i].units.size() == a.microgrids[i].units.size());
    REQUIRE(b.microgrids[i].storage.size() == a.microgrids[i].storage.size());
  }
  // serialized twice gives byte-identical files
  for (const char* name :
       {"buses.csv", "lines.csv", "units.csv", "microgrids.csv", "mg_units.csv",
        "mg_storage.csv", "mg_adjustable.csv", "profiles.csv", "scenario.toml"}) {
    std::ifstream f1(dir1 / name), f2(dir2 / name);
    std::string s1((std::istreambuf_iterator<char>(f1)), {});
    std::string s2((std::istreambuf_iterator<char>(f2)), {});
    INFO(name);
    CHECK(s1 == s2);
  }
}

TEST_CASE("validator flags injected faults and nothing else") {
  using testsupport::flat_spec;
  using testsupport::simple_unit;
  {
    core::MicrogridSpec spec = flat_spec("m", 24, 5.0, 4000.0, 10.0);
    spec.units.push_back(simple_unit("g", 1.0, 10.0, 30.0));
    std::vector<double> assigned(24, 5.0);
    core::MicrogridSchedule s =
        mg::build_market_schedule(spec, assigned, core::PenaltyMode::PositiveOnly);
    auto clean = core::validate_schedule(spec, s);
    CHECK(clean.empty());

    SECTION("corrupting grid power breaks balance at exactly one hour") {
      s.grid_power[5] += 1.0;
      s.deviation[5] += 1.0;  // keep (7) consistent so only (2) trips
      if (s.deviation[5] >= core::kDeviationEpsilon) {
        s.deviation_flag[5] = 1;
        s.deviation_pos[5] = s.deviation[5];
      }
      auto v = core::validate_schedule(spec, s);
      REQUIRE(v.size() == 1);
      CHECK(v[0].constraint == "power_balance(2)");
      CHECK(v[0].hour == 6);
      CHECK(v[0].magnitude == Catch::Approx(1.0).epsilon(0.2));
    }

    SECTION("power on an islanded hour violates the tie constraint") {
      spec.islanding[6] = 0;
      s.grid_power[6] = 2.0;
      auto v = core::validate_schedule(spec, s);
      bool found = false;
      for (const auto& viol : v)
        if (viol.constraint == "tie_limit(6)" && viol.hour == 7) found = true;
      CHECK(found);
    }

    SECTION("structural mismatch throws rather than reporting") {
      s.units.clear();
      CHECK_THROWS_AS(core::validate_schedule(spec, s), core::ValidationError);
    }
  }
}

TEST_CASE("differential check: scheduler output always validates") {
  std::mt19937 rng(424242u);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    core::MicrogridSpec spec = testsupport::random_feasible_spec(rng);
    std::vector<double> assigned = testsupport::random_assignment(rng, spec);
    core::PenaltyMode mode = trial % 3 == 0 ? core::PenaltyMode::Absolute
                                            : core::PenaltyMode::PositiveOnly;
    core::MicrogridSchedule s = mg::build_market_schedule(spec, assigned, mode);
    auto v = core::validate_schedule(spec, s);
    if (!v.empty()) {
      INFO("trial " << trial << ": " << v[0].constraint << " hour " << v[0].hour
                    << " magnitude " << v[0].magnitude << " " << v[0].detail);
      REQUIRE(v.empty());
    }
    ++checked;
  }
  CHECK(checked == 200);
}
