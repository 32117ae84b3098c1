#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "distmarket/core/scenario.hpp"
#include "distmarket/iso/iso.hpp"
#include "support/oracles.hpp"
#include "support/spec_builders.hpp"

using namespace distmarket;
using core::GridUnit;
using core::TransmissionNetwork;

namespace {

TransmissionNetwork single_bus() {
  TransmissionNetwork net;
  net.buses = {1};
  net.reference_bus = 1;
  return net;
}

TransmissionNetwork two_bus(double limit) {
  TransmissionNetwork net;
  net.buses = {1, 2};
  net.reference_bus = 1;
  net.lines.push_back({"L1", 1, 2, 0.2, limit});
  return net;
}

GridUnit grid_unit(const std::string& id, int bus, double pmin, double pmax,
                   double cost) {
  GridUnit g;
  g.unit = testsupport::simple_unit(id, pmin, pmax, cost);
  g.bus = bus;
  return g;
}

dmo::AggregatedBid one_segment_bid(int H, double price, double width) {
  dmo::AggregatedBid agg;
  agg.fixed.assign(H, 0.0);
  agg.segments.assign(H, {dmo::AggSegment{price, width, "m1", 0}});
  return agg;
}

}  // namespace

TEST_CASE("forced dispatch on a single bus prices at the marginal unit") {
  const int H = 4;
  auto net = single_bus();
  std::vector<GridUnit> units{grid_unit("G1", 1, 0.0, 100.0, 20.0)};
  std::map<int, std::vector<double>> load{{1, std::vector<double>(H, 50.0)}};
  auto r = iso::solve_welfare_scuc(net, units, load, H, {});
  for (int t = 0; t < H; ++t) {
    CHECK(r.dispatch[0][t] == Catch::Approx(50.0).margin(1e-7));
    CHECK(r.awarded[0][t] == Catch::Approx(50.0).margin(1e-9));
    CHECK(r.lmps[0][t] == Catch::Approx(20.0).margin(1e-7));
  }
  CHECK(r.welfare == Catch::Approx(-1000.0 * H).margin(1e-5));
  CHECK(r.consumption_benefit == 0.0);
}

TEST_CASE("a bid segment above marginal cost is fully awarded") {
  const int H = 4;
  auto net = single_bus();
  std::vector<GridUnit> units{grid_unit("G1", 1, 0.0, 100.0, 20.0)};
  std::map<int, std::vector<double>> load{{1, std::vector<double>(H, 50.0)}};
  auto base = iso::solve_welfare_scuc(net, units, load, H, {});
  std::map<int, dmo::AggregatedBid> bids{{1, one_segment_bid(H, 30.0, 10.0)}};
  auto r = iso::solve_welfare_scuc(net, units, load, H, bids);
  for (int t = 0; t < H; ++t) {
    CHECK(r.awarded[0][t] == Catch::Approx(60.0).margin(1e-7));
    CHECK(r.responsive[0][t] == Catch::Approx(10.0).margin(1e-7));
  }
  CHECK(r.welfare - base.welfare == Catch::Approx(100.0 * H).margin(1e-5));
}

TEST_CASE("congested two-bus system splits the prices") {
  const int H = 1;
  auto net = two_bus(50.0);
  std::vector<GridUnit> units{grid_unit("cheap", 1, 0.0, 200.0, 10.0),
                              grid_unit("dear", 2, 0.0, 100.0, 50.0)};
  std::map<int, std::vector<double>> load{{2, {80.0}}};
  auto r = iso::solve_welfare_scuc(net, units, load, H, {});
  CHECK(r.flows[0][0] == Catch::Approx(50.0).margin(1e-6));
  CHECK(r.dispatch[0][0] == Catch::Approx(50.0).margin(1e-6));
  CHECK(r.dispatch[1][0] == Catch::Approx(30.0).margin(1e-6));
  CHECK(r.lmps[0][0] == Catch::Approx(10.0).margin(1e-6));
  CHECK(r.lmps[1][0] == Catch::Approx(50.0).margin(1e-6));
}

TEST_CASE("uncongested system has one uniform price") {
  const int H = 2;
  auto net = two_bus(500.0);
  std::vector<GridUnit> units{grid_unit("cheap", 1, 0.0, 200.0, 10.0),
                              grid_unit("dear", 2, 0.0, 100.0, 50.0)};
  std::map<int, std::vector<double>> load{{2, std::vector<double>(H, 80.0)}};
  auto r = iso::solve_welfare_scuc(net, units, load, H, {});
  for (int t = 0; t < H; ++t) {
    CHECK(r.lmps[0][t] == Catch::Approx(10.0).margin(1e-6));
    CHECK(r.lmps[1][t] == Catch::Approx(10.0).margin(1e-6));
  }
}

TEST_CASE("flows recomputed from angles match and energy balances") {
  core::Scenario sc = core::load_scenario(std::string(DM_SOURCE_DIR) +
                                          "/scenarios/sixbus");
  // non-microgrid loads only; enough for a network consistency check
  auto r = iso::solve_welfare_scuc(sc.network, sc.grid_units, sc.bus_loads,
                                   sc.config.horizon, {},
                                   {sc.config.system_voll, 0.0});
  const int H = r.horizon();
  for (int t = 0; t < H; ++t) {
    for (size_t l = 0; l < sc.network.lines.size(); ++l) {
      const auto& line = sc.network.lines[l];
      int fb = r.bus_index(line.from_bus), tb = r.bus_index(line.to_bus);
      double expect = sc.network.base_power *
                      (r.angles[fb][t] - r.angles[tb][t]) / line.reactance;
      CHECK(std::abs(expect - r.flows[l][t]) <= 1e-8);
      CHECK(std::abs(r.flows[l][t]) <= line.flow_limit + 1e-6);
    }
    double net_injection = 0.0;
    for (size_t u = 0; u < sc.grid_units.size(); ++u)
      net_injection += r.dispatch[u][t];
    for (size_t b = 0; b < r.bus_ids.size(); ++b)
      net_injection -= r.awarded[b][t] - r.shed[b][t];
    CHECK(std::abs(net_injection) <= 1e-6);
    // reference angle pinned
    CHECK(r.angles[r.bus_index(sc.network.reference_bus)][t] == 0.0);
  }
}

TEST_CASE("redispatch at the forecast is a fixed point") {
  const int H = 3;
  auto net = two_bus(50.0);
  std::vector<GridUnit> units{grid_unit("cheap", 1, 0.0, 200.0, 10.0),
                              grid_unit("dear", 2, 0.0, 100.0, 50.0)};
  std::map<int, std::vector<double>> load{{2, std::vector<double>(H, 80.0)}};
  auto r = iso::solve_welfare_scuc(net, units, load, H, {});
  auto rr = iso::redispatch(net, units, r.commitment, load, H);
  for (size_t u = 0; u < units.size(); ++u)
    for (int t = 0; t < H; ++t)
      CHECK(rr.dispatch[u][t] == Catch::Approx(r.dispatch[u][t]).margin(1e-7));
  for (size_t b = 0; b < 2; ++b)
    for (int t = 0; t < H; ++t)
      CHECK(rr.lmps[b][t] == Catch::Approx(r.lmps[b][t]).margin(1e-7));
}

TEST_CASE("load relief below the congestion threshold equalizes prices") {
  const int H = 1;
  auto net = two_bus(50.0);
  std::vector<GridUnit> units{grid_unit("cheap", 1, 0.0, 200.0, 10.0),
                              grid_unit("dear", 2, 0.0, 100.0, 50.0)};
  std::map<int, std::vector<double>> load{{2, {80.0}}};
  auto r = iso::solve_welfare_scuc(net, units, load, H, {});
  std::map<int, std::vector<double>> relieved{{2, {40.0}}};
  auto rr = iso::redispatch(net, units, r.commitment, relieved, H);
  CHECK(std::abs(rr.flows[0][0]) < 50.0 - 1e-6);
  CHECK(rr.lmps[0][0] == Catch::Approx(10.0).margin(1e-6));
  CHECK(rr.lmps[1][0] == Catch::Approx(10.0).margin(1e-6));
}

TEST_CASE("overload activates the shedding slack at its price") {
  const int H = 1;
  auto net = single_bus();
  std::vector<GridUnit> units{grid_unit("G1", 1, 0.0, 100.0, 20.0)};
  auto base = iso::solve_welfare_scuc(net, units, {{1, {90.0}}}, H, {});
  auto over = iso::redispatch(net, units, base.commitment, {{1, {130.0}}}, H,
                              {4321.0, 0.0});
  CHECK(over.shed[0][0] == Catch::Approx(30.0).margin(1e-6));
  CHECK(over.lmps[0][0] == Catch::Approx(4321.0).margin(1e-6));
}

TEST_CASE("adding a segment priced above marginal cost never hurts welfare") {
  const int H = 2;
  auto net = two_bus(500.0);
  std::vector<GridUnit> units{grid_unit("cheap", 1, 0.0, 200.0, 18.0),
                              grid_unit("dear", 2, 0.0, 100.0, 45.0)};
  std::map<int, std::vector<double>> load{{2, std::vector<double>(H, 100.0)}};
  auto base = iso::solve_welfare_scuc(net, units, load, H, {});
  double prev = base.welfare;
  for (double price : {20.0, 30.0, 60.0}) {
    std::map<int, dmo::AggregatedBid> bids{{2, one_segment_bid(H, price, 5.0)}};
    auto r = iso::solve_welfare_scuc(net, units, load, H, bids);
    CHECK(r.welfare >= prev - 1e-7);
    prev = r.welfare;
  }
}

TEST_CASE("with no bids the SCUC is plain cost minimization") {
  const int H = 2;
  auto net = two_bus(60.0);
  std::vector<GridUnit> units{grid_unit("A", 1, 5.0, 80.0, 25.0),
                              grid_unit("B", 2, 0.0, 60.0, 40.0)};
  units[0].unit.no_load_cost = 10.0;
  units[0].unit.startup_cost = 50.0;
  std::map<int, std::vector<double>> load{{2, {70.0, 90.0}}};
  auto r = iso::solve_welfare_scuc(net, units, load, H, {});
  CHECK(r.consumption_benefit == 0.0);
  CHECK(r.welfare ==
        Catch::Approx(-(r.generation_cost + r.shed_cost)).margin(1e-9));

  // independent check: brute-force the same commitment space
  auto model = iso::detail::build_iso_model(net, units, load, H, {}, {});
  auto brute = testsupport::brute_force_mip(model.lp);
  REQUIRE(brute.feasible);
  CHECK(-r.welfare == Catch::Approx(brute.objective).margin(1e-6));
}

TEST_CASE("marginal load perturbation reproduces the LMP") {
  const int H = 1;
  auto net = two_bus(50.0);
  std::vector<GridUnit> units{grid_unit("cheap", 1, 0.0, 200.0, 10.0),
                              grid_unit("dear", 2, 0.0, 100.0, 50.0)};
  std::map<int, std::vector<double>> load{{1, {20.0}}, {2, {80.0}}};
  auto r = iso::solve_welfare_scuc(net, units, load, H, {});
  for (int bus : {1, 2}) {
    auto bumped = load;
    bumped[bus][0] += 0.1;
    auto rr = iso::redispatch(net, units, r.commitment, bumped, H);
    double base_cost = r.generation_cost + r.shed_cost;
    double bump_cost = rr.generation_cost + rr.shed_cost;
    double lmp = r.lmps[r.bus_index(bus)][0];
    INFO("bus " << bus);
    CHECK(std::abs((bump_cost - base_cost) - 0.1 * lmp) <=
          1e-3 * (1.0 + std::abs(0.1 * lmp)));
  }
}
