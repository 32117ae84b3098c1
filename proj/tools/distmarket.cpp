// distmarket: three-level distribution-market scheduling studies from the
// command line. `run` executes the market- and/or price-based scheme on a
// scenario directory, `validate` checks a scenario, `sweep` re-runs the
// microgrid stage across deviation-penalty multipliers.
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "distmarket/core/scenario.hpp"
#include "distmarket/core/validate.hpp"
#include "distmarket/dmo/dmo.hpp"
#include "distmarket/iso/iso.hpp"
#include "distmarket/opt/model.hpp"
#include "distmarket/opt/simplex.hpp"
#include "distmarket/pipeline/pipeline.hpp"

using namespace distmarket;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitInfeasible = 3;

struct CommonArgs {
  std::string scenario;
  std::string out;
  std::string mode;
  std::string penalty_mode;
  std::vector<double> penalty_mult;
};

core::Scenario load_with_overrides(const CommonArgs& args) {
  core::Scenario sc = core::load_scenario(args.scenario);
  if (!args.mode.empty()) {
    if (args.mode == "market") sc.config.mode = core::RunMode::Market;
    else if (args.mode == "price") sc.config.mode = core::RunMode::Price;
    else if (args.mode == "both") sc.config.mode = core::RunMode::Both;
    else throw core::LoadError(args.scenario, 0, "mode must be market|price|both");
  }
  if (!args.penalty_mode.empty()) {
    if (args.penalty_mode == "positive")
      sc.config.penalty_mode = core::PenaltyMode::PositiveOnly;
    else if (args.penalty_mode == "absolute")
      sc.config.penalty_mode = core::PenaltyMode::Absolute;
    else
      throw core::LoadError(args.scenario, 0,
                            "penalty mode must be positive|absolute");
  }
  if (!args.penalty_mult.empty()) {
    sc.config.penalty_multipliers = args.penalty_mult;
    if (args.penalty_mult.size() == 1)
      sc.config.penalty_multiplier = args.penalty_mult.front();
  }
  if (!args.out.empty()) sc.config.output_dir = args.out;
  return sc;
}

void print_headline(const pipeline::CaseReport& rep, const std::string& out_dir) {
  if (rep.market) {
    std::printf("market case: mg objective total %.2f $, settlement %.2f $, ISO welfare %.2f $\n",
                rep.market->mg_objective_total, rep.market->settlement_total,
                rep.market->iso.welfare);
    for (const auto& o : rep.market->microgrids) {
      double dev = 0.0;
      for (double v : o.schedule.deviation_pos) dev += v;
      std::printf("  %s: objective %.2f $ (operation %.2f, curtailment %.2f, deviation %.2f), deviation %.3f MWh\n",
                  o.id.c_str(), o.schedule.objective, o.schedule.cost_operation,
                  o.schedule.cost_curtailment, o.schedule.cost_deviation, dev);
    }
  }
  if (rep.price) {
    std::printf("price case: mg objective total %.2f $, LMP drift max %.4f $/MWh, redispatch delta %.2f $\n",
                rep.price->mg_objective_total, rep.price->lmp_drift_max,
                rep.price->redispatch_delta);
  }
  if (!rep.sweep.empty()) {
    std::printf("sweep rows: %zu (see sweep.csv)\n", rep.sweep.size());
  }
  std::printf("outputs written to %s\n", out_dir.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"three-level distribution market scheduling simulator"};
  app.require_subcommand(1);

  CommonArgs args;

  CLI::App* run = app.add_subcommand("run", "run the configured case(s)");
  run->add_option("--scenario", args.scenario, "scenario directory")->required();
  run->add_option("--mode", args.mode, "market|price|both");
  run->add_option("--out", args.out, "output directory");
  run->add_option("--penalty-mode", args.penalty_mode, "positive|absolute");
  run->add_option("--penalty-mult", args.penalty_mult, "penalty multipliers")
      ->delimiter(',');

  CLI::App* validate = app.add_subcommand("validate", "validate a scenario");
  validate->add_option("--scenario", args.scenario, "scenario directory")
      ->required();

  CLI::App* sweep = app.add_subcommand("sweep", "penalty multiplier sweep");
  sweep->add_option("--scenario", args.scenario, "scenario directory")->required();
  sweep->add_option("--out", args.out, "output directory");
  sweep->add_option("--penalty-mult", args.penalty_mult, "penalty multipliers")
      ->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) {
      core::Scenario sc = core::load_scenario(args.scenario);
      std::printf("scenario ok: %zu buses, %zu lines, %zu grid units, %zu microgrids, horizon %d\n",
                  sc.network.buses.size(), sc.network.lines.size(),
                  sc.grid_units.size(), sc.microgrids.size(), sc.config.horizon);
      return 0;
    }
    core::Scenario sc = load_with_overrides(args);
    if (sweep->parsed()) sc.config.mode = core::RunMode::Market;
    pipeline::CaseReport rep = pipeline::run(sc, sweep->parsed());
    pipeline::write_outputs(sc, rep, sc.config.output_dir);
    print_headline(rep, sc.config.output_dir);
    return 0;
  } catch (const core::LoadError& e) {
    std::fprintf(stderr, "scenario error: %s\n", e.what());
    return kExitValidation;
  } catch (const core::ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return kExitValidation;
  } catch (const opt::ModelError& e) {
    std::fprintf(stderr, "model error: %s\n", e.what());
    return kExitValidation;
  } catch (const dmo::InfeasibleAwardError& e) {
    std::fprintf(stderr, "infeasible award: %s\n", e.what());
    return kExitInfeasible;
  } catch (const iso::IsoError& e) {
    std::fprintf(stderr, "iso: %s\n", e.what());
    return kExitInfeasible;
  } catch (const opt::UnboundedError& e) {
    std::fprintf(stderr, "unbounded model: %s\n", e.what());
    return kExitInfeasible;
  } catch (const opt::SolverError& e) {
    std::fprintf(stderr, "solver: %s\n", e.what());
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
