#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>

#include "distmarket/opt/branch_bound.hpp"
#include "distmarket/opt/model.hpp"
#include "support/oracles.hpp"

using namespace distmarket::opt;
using testsupport::brute_force_mip;

TEST_CASE("indicator relaxation branches to the cheaper leaf") {
  // min 3d + 2x  s.t.  x + 10d >= 1.5, x >= 0, d binary.
  // Both leaves cost 3.0; the down child is explored first, so d=0 wins.
  LinearProgram lp;
  int d = lp.add_binary(3.0, "d");
  int x = lp.add_continuous(0.0, kInf, 2.0, "x");
  lp.add_row({{x, 1.0}, {d, 10.0}}, RowSense::GreaterEqual, 1.5);
  MipSolution s = solve_mip(lp);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.objective == Catch::Approx(3.0).margin(1e-9));
  CHECK(s.values[d] == 0.0);
  CHECK(s.values[x] == Catch::Approx(1.5).margin(1e-9));
  auto oracle = brute_force_mip(lp);
  REQUIRE(oracle.feasible);
  CHECK(oracle.objective == Catch::Approx(3.0).margin(1e-9));
}

TEST_CASE("all-continuous model matches solve_lp exactly") {
  LinearProgram lp;
  int x = lp.add_continuous(0.0, 4.0, -1.0, "x");
  int y = lp.add_continuous(0.0, 4.0, -2.0, "y");
  lp.add_row({{x, 1.0}, {y, 1.0}}, RowSense::LessEqual, 5.0);
  LpSolution ls = solve_lp(lp);
  MipSolution ms = solve_mip(lp);
  REQUIRE(ls.status == SolveStatus::Optimal);
  REQUIRE(ms.status == SolveStatus::Optimal);
  CHECK(ms.objective == ls.objective);
  for (int j = 0; j < lp.num_vars(); ++j) CHECK(ms.values[j] == ls.values[j]);
  CHECK(ms.gap == 0.0);
}

TEST_CASE("eight-binary knapsack matches 256-case enumeration") {
  LinearProgram lp;
  lp.set_objective_sense(ObjSense::Maximize);
  const double value[8] = {9, 7, 6, 5, 5, 4, 3, 1};
  const double weight[8] = {6, 5, 4, 4, 3, 3, 2, 1};
  std::vector<RowTerm> cap;
  for (int k = 0; k < 8; ++k) {
    int b = lp.add_binary(value[k]);
    cap.push_back({b, weight[k]});
  }
  lp.add_row(cap, RowSense::LessEqual, 14.0, "capacity");
  MipSolution s = solve_mip(lp);
  REQUIRE(s.status == SolveStatus::Optimal);
  auto oracle = brute_force_mip(lp);
  REQUIRE(oracle.feasible);
  CHECK(s.objective ==
        Catch::Approx(oracle.objective).epsilon(1e-9).margin(1e-9));
  for (int j = 0; j < lp.num_vars(); ++j) {
    CHECK(std::abs(s.values[j] - std::round(s.values[j])) <= 1e-6);
  }
}

TEST_CASE("infeasible integer problem reported") {
  LinearProgram lp;
  int a = lp.add_binary(1.0);
  int b = lp.add_binary(1.0);
  lp.add_row({{a, 1.0}, {b, 1.0}}, RowSense::GreaterEqual, 3.0);
  MipSolution s = solve_mip(lp);
  CHECK(s.status == SolveStatus::Infeasible);
}

TEST_CASE("unbounded relaxation raises an error") {
  LinearProgram lp;
  lp.add_binary(1.0);
  lp.add_continuous(0.0, kInf, -1.0, "ray");
  CHECK_THROWS_AS(solve_mip(lp), UnboundedError);
}

TEST_CASE("random small MIPs match brute force") {
  std::mt19937 rng(991u);
  std::uniform_int_distribution<int> nbin(1, 8), ncont(0, 3), mrows(1, 6),
      coeff(-4, 4);
  std::uniform_real_distribution<double> rhs(-6.0, 12.0);
  std::uniform_int_distribution<int> sense_pick(0, 2);
  int feasible_seen = 0;
  for (int trial = 0; trial < 120; ++trial) {
    LinearProgram lp;
    int nb = nbin(rng), nc = ncont(rng);
    for (int k = 0; k < nb; ++k) lp.add_binary(coeff(rng));
    for (int k = 0; k < nc; ++k) lp.add_continuous(0.0, 10.0, coeff(rng));
    int m = mrows(rng);
    for (int i = 0; i < m; ++i) {
      std::vector<RowTerm> terms;
      for (int j = 0; j < lp.num_vars(); ++j) {
        int c = coeff(rng);
        if (c != 0) terms.push_back({j, static_cast<double>(c)});
      }
      if (terms.empty()) terms.push_back({0, 1.0});
      lp.add_row(std::move(terms), static_cast<RowSense>(sense_pick(rng)),
                 rhs(rng));
    }
    auto oracle = brute_force_mip(lp);
    MipSolution s = solve_mip(lp);
    if (!oracle.feasible) {
      CHECK(s.status == SolveStatus::Infeasible);
      continue;
    }
    ++feasible_seen;
    REQUIRE(s.status == SolveStatus::Optimal);
    INFO("trial " << trial << " bnb " << s.objective << " brute "
                  << oracle.objective);
    CHECK(std::abs(s.objective - oracle.objective) <=
          1e-6 * (1.0 + std::abs(oracle.objective)));
    CHECK(s.gap <= 1e-6);
  }
  CHECK(feasible_seen > 40);
}

TEST_CASE("solve_mip is deterministic across runs") {
  LinearProgram lp;
  std::mt19937 rng(5150u);
  std::uniform_int_distribution<int> coeff(-4, 4);
  for (int k = 0; k < 10; ++k) lp.add_binary(coeff(rng));
  for (int k = 0; k < 3; ++k) lp.add_continuous(0.0, 5.0, coeff(rng));
  for (int i = 0; i < 6; ++i) {
    std::vector<RowTerm> terms;
    for (int j = 0; j < lp.num_vars(); ++j) {
      int c = coeff(rng);
      if (c != 0) terms.push_back({j, static_cast<double>(c)});
    }
    lp.add_row(std::move(terms), i % 2 ? RowSense::LessEqual : RowSense::GreaterEqual,
               i - 2.0);
  }
  MipSolution a = solve_mip(lp);
  MipSolution b = solve_mip(lp);
  REQUIRE(a.status == b.status);
  if (a.status == SolveStatus::Optimal) {
    CHECK(a.objective == b.objective);
    CHECK(a.node_count == b.node_count);
    for (size_t j = 0; j < a.values.size(); ++j) CHECK(a.values[j] == b.values[j]);
  }
}

TEST_CASE("fixing the optimal commitment reproduces the MIP objective") {
  LinearProgram lp;
  int u1 = lp.add_binary(20.0, "u1");
  int u2 = lp.add_binary(15.0, "u2");
  int p1 = lp.add_continuous(0.0, 30.0, 10.0, "p1");
  int p2 = lp.add_continuous(0.0, 100.0, 50.0, "p2");
  lp.add_row({{p1, 1.0}, {u1, -30.0}}, RowSense::LessEqual, 0.0);
  lp.add_row({{p2, 1.0}, {u2, -100.0}}, RowSense::LessEqual, 0.0);
  lp.add_row({{p1, 1.0}, {p2, 1.0}}, RowSense::Equal, 40.0, "balance");
  MipSolution mip = solve_mip(lp);
  REQUIRE(mip.status == SolveStatus::Optimal);
  std::map<int, int> fix{{u1, static_cast<int>(std::lround(mip.values[u1]))},
                         {u2, static_cast<int>(std::lround(mip.values[u2]))}};
  LpSolution priced = fix_binaries_and_price(lp, fix);
  REQUIRE(priced.status == SolveStatus::Optimal);
  CHECK(priced.objective == Catch::Approx(mip.objective).margin(1e-8));
}

TEST_CASE("marginal unit sets the balance dual") {
  // single bus, one generator at 20 $/MWh, demand 50
  LinearProgram lp;
  int p = lp.add_continuous(0.0, 100.0, 20.0, "p");
  lp.add_row({{p, 1.0}}, RowSense::Equal, 50.0, "balance");
  LpSolution s = fix_binaries_and_price(lp, {});
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.duals[0] == Catch::Approx(20.0).margin(1e-9));
}

TEST_CASE("two-generator merit order prices at the marginal unit") {
  // 10 $/MWh cap 30 and 50 $/MWh cap 100 serving 40 MW: dual = 50
  LinearProgram lp;
  int p1 = lp.add_continuous(0.0, 30.0, 10.0, "cheap");
  int p2 = lp.add_continuous(0.0, 100.0, 50.0, "dear");
  lp.add_row({{p1, 1.0}, {p2, 1.0}}, RowSense::Equal, 40.0, "balance");
  LpSolution s = fix_binaries_and_price(lp, {});
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.values[p1] == Catch::Approx(30.0).margin(1e-9));
  CHECK(s.values[p2] == Catch::Approx(10.0).margin(1e-9));
  CHECK(s.duals[0] == Catch::Approx(50.0).margin(1e-9));
}

TEST_CASE("infeasible binary assignment surfaces as status") {
  LinearProgram lp;
  int d = lp.add_binary(1.0, "d");
  int x = lp.add_continuous(0.0, 1.0, 1.0, "x");
  lp.add_row({{x, 1.0}, {d, 1.0}}, RowSense::GreaterEqual, 1.5);
  LpSolution s = fix_binaries_and_price(lp, {{d, 0}});
  CHECK(s.status == SolveStatus::Infeasible);
  CHECK_THROWS_AS(fix_binaries_and_price(lp, {}), ModelError);
}
