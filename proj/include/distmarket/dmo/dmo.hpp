// Distribution Market Operator: aggregate microgrid demand bids into one bid
// for the ISO, and disaggregate the ISO award back to microgrids by solving
// the hour-separable allocation LP.
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "distmarket/core/csv.hpp"
#include "distmarket/core/types.hpp"
#include "distmarket/opt/model.hpp"
#include "distmarket/opt/simplex.hpp"

namespace distmarket::dmo {

class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InfeasibleAwardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Aggregated segment retains provenance to its submitting microgrid.
struct AggSegment {
  double price = 0.0;
  double width = 0.0;
  std::string microgrid;
  int seg_index = 0;  // position in that microgrid's hourly bid
};

struct AggregatedBid {
  std::vector<double> fixed;                      // per hour, Eq (11)
  std::vector<std::vector<AggSegment>> segments;  // per hour, price-sorted

  int horizon() const { return static_cast<int>(fixed.size()); }
  double total_width(int t) const {
    double s = 0.0;
    for (const auto& seg : segments[t]) s += seg.width;
    return s;
  }
};

// D^f_t = sum of the microgrid fixed parts; variable segments are the
// multiset union re-sorted by nonincreasing price.
inline AggregatedBid aggregate_bids(const std::vector<core::DemandBid>& bids) {
  AggregatedBid agg;
  if (bids.empty()) return agg;
  const int H = bids.front().horizon();
  for (const auto& b : bids) {
    if (b.horizon() != H)
      throw StructuralError("bid horizons differ: " + b.microgrid);
    auto errs = check_invariants(b);
    if (!errs.empty()) throw StructuralError(errs.front());
  }
  agg.fixed.assign(H, 0.0);
  agg.segments.assign(H, {});
  for (int t = 0; t < H; ++t) {
    for (const auto& b : bids) {
      agg.fixed[t] += b.fixed[t];
      for (size_t j = 0; j < b.segments[t].size(); ++j)
        agg.segments[t].push_back({b.segments[t][j].price,
                                   b.segments[t][j].width, b.microgrid,
                                   static_cast<int>(j)});
    }
    std::stable_sort(agg.segments[t].begin(), agg.segments[t].end(),
                     [](const AggSegment& a, const AggSegment& b) {
                       return a.price > b.price;
                     });
  }
  return agg;
}

struct DisaggregationResult {
  std::vector<std::string> microgrids;
  std::vector<std::vector<double>> assigned;         // [mg][hour] PD^M
  std::vector<std::vector<std::vector<double>>> dx;  // [mg][hour][segment]
  double objective = 0.0;                            // Eq (12) value
};

// Solve max sum c*DX subject to (13)-(16) hour by hour. Equal-price
// degeneracy is resolved by reallocating each price tier proportionally to
// segment widths, which keeps the objective and the hourly total unchanged.
inline DisaggregationResult disaggregate_award(
    const std::vector<double>& award, const std::vector<core::DemandBid>& bids) {
  const int H = static_cast<int>(award.size());
  for (const auto& b : bids)
    if (b.horizon() != H)
      throw StructuralError("award horizon does not match bid " + b.microgrid);

  DisaggregationResult res;
  res.microgrids.reserve(bids.size());
  for (const auto& b : bids) res.microgrids.push_back(b.microgrid);
  res.assigned.assign(bids.size(), std::vector<double>(H, 0.0));
  res.dx.resize(bids.size());
  for (size_t m = 0; m < bids.size(); ++m) {
    res.dx[m].assign(H, {});
    for (int t = 0; t < H; ++t)
      res.dx[m][t].assign(bids[m].segments[t].size(), 0.0);
  }

  for (int t = 0; t < H; ++t) {
    double fixed_total = 0.0, var_total = 0.0;
    for (const auto& b : bids) {
      fixed_total += b.fixed[t];
      for (const auto& s : b.segments[t]) var_total += s.width;
    }
    if (award[t] < fixed_total - 1e-9)
      throw InfeasibleAwardError(
          "hour " + std::to_string(t + 1) + ": award " + std::to_string(award[t]) +
          " MW is below the total fixed load " + std::to_string(fixed_total));
    if (award[t] > fixed_total + var_total + 1e-9)
      throw InfeasibleAwardError("hour " + std::to_string(t + 1) + ": award " +
                                 std::to_string(award[t]) +
                                 " MW exceeds the total bid quantity");

    // the hourly allocation LP, Eqs (12)-(16)
    opt::LinearProgram lp;
    lp.set_objective_sense(opt::ObjSense::Maximize);
    std::vector<std::vector<int>> dx_vars(bids.size());
    std::vector<int> resp(bids.size()), pdm(bids.size());
    std::vector<opt::RowTerm> total;
    for (size_t m = 0; m < bids.size(); ++m) {
      std::vector<opt::RowTerm> sum_dx;
      for (size_t j = 0; j < bids[m].segments[t].size(); ++j) {
        const auto& seg = bids[m].segments[t][j];
        int v = lp.add_continuous(0.0, seg.width, seg.price);  // (13)
        dx_vars[m].push_back(v);
        sum_dx.push_back({v, -1.0});
      }
      resp[m] = lp.add_continuous(0.0, opt::kInf, 0.0);
      pdm[m] = lp.add_continuous(0.0, opt::kInf, 0.0);
      sum_dx.push_back({resp[m], 1.0});
      lp.add_row(std::move(sum_dx), opt::RowSense::Equal, 0.0);  // (14)
      lp.add_row({{pdm[m], 1.0}, {resp[m], -1.0}}, opt::RowSense::Equal,
                 bids[m].fixed[t]);  // (15)
      total.push_back({pdm[m], 1.0});
    }
    lp.add_row(std::move(total), opt::RowSense::Equal, award[t]);  // (16)
    opt::LpSolution sol = opt::solve_lp(lp);
    if (sol.status != opt::SolveStatus::Optimal)
      throw InfeasibleAwardError("hour " + std::to_string(t + 1) +
                                 ": allocation LP is infeasible");

    for (size_t m = 0; m < bids.size(); ++m)
      for (size_t j = 0; j < dx_vars[m].size(); ++j)
        res.dx[m][t][j] = sol.values[dx_vars[m][j]];

    // proportional reallocation inside price ties
    struct Ref {
      size_t m, j;
    };
    std::vector<std::pair<double, Ref>> flat;
    for (size_t m = 0; m < bids.size(); ++m)
      for (size_t j = 0; j < bids[m].segments[t].size(); ++j)
        flat.push_back({bids[m].segments[t][j].price, {m, j}});
    std::stable_sort(flat.begin(), flat.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    size_t i = 0;
    while (i < flat.size()) {
      size_t k = i;
      while (k < flat.size() && std::abs(flat[k].first - flat[i].first) <= 1e-9)
        ++k;
      if (k - i > 1) {
        double got = 0.0, cap = 0.0;
        for (size_t q = i; q < k; ++q) {
          got += res.dx[flat[q].second.m][t][flat[q].second.j];
          cap += bids[flat[q].second.m].segments[t][flat[q].second.j].width;
        }
        if (cap > 0.0)
          for (size_t q = i; q < k; ++q) {
            const auto& seg = bids[flat[q].second.m].segments[t][flat[q].second.j];
            res.dx[flat[q].second.m][t][flat[q].second.j] =
                got * (seg.width / cap);
          }
      }
      i = k;
    }

    for (size_t m = 0; m < bids.size(); ++m) {
      double pd = bids[m].fixed[t];
      for (size_t j = 0; j < res.dx[m][t].size(); ++j) {
        res.objective += bids[m].segments[t][j].price * res.dx[m][t][j];
        pd += res.dx[m][t][j];
      }
      res.assigned[m][t] = pd;
    }
  }
  return res;
}

inline void write_aggregated_bid_csv(const AggregatedBid& agg,
                                     const std::string& path) {
  core::CsvWriter w(path);
  w.row({"hour", "block", "price", "width", "cumulative_mw"});
  for (int t = 0; t < agg.horizon(); ++t) {
    double cum = agg.fixed[t];
    w.row({std::to_string(t + 1), "0", "", core::fmt(agg.fixed[t]),
           core::fmt(cum)});
    int idx = 1;
    for (const auto& s : agg.segments[t]) {
      cum += s.width;
      w.row({std::to_string(t + 1), std::to_string(idx++), core::fmt(s.price),
             core::fmt(s.width), core::fmt(cum)});
    }
  }
}

inline void write_disaggregation_csv(const DisaggregationResult& res,
                                     const std::string& path) {
  core::CsvWriter w(path);
  w.row({"hour", "microgrid", "assigned_mw", "segment", "dx_mw"});
  const int H = res.assigned.empty() ? 0 : static_cast<int>(res.assigned[0].size());
  for (int t = 0; t < H; ++t)
    for (size_t m = 0; m < res.microgrids.size(); ++m) {
      if (res.dx[m][t].empty()) {
        w.row({std::to_string(t + 1), res.microgrids[m],
               core::fmt(res.assigned[m][t]), "", ""});
        continue;
      }
      for (size_t j = 0; j < res.dx[m][t].size(); ++j)
        w.row({std::to_string(t + 1), res.microgrids[m],
               core::fmt(res.assigned[m][t]), std::to_string(j + 1),
               core::fmt(res.dx[m][t][j])});
    }
}

}  // namespace distmarket::dmo
