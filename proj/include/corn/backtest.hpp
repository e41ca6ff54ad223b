#pragma once

#include <functional>
#include <vector>

#include "corn/logopt.hpp"
#include "corn/market.hpp"

namespace corn {

// Cumulative log-wealth after each period, kept in log domain throughout:
// multiplicative wealth overflows double well inside the horizons used here.
struct WealthTrajectory {
    std::vector<double> logs;  // logs[t] = log S_t; logs[0] = 0

    int periods() const { return static_cast<int>(logs.size()) - 1; }
    double log_wealth(int t) const { return logs[static_cast<std::size_t>(t)]; }
    double wealth(int t) const;  // exp(log S_t); may round to inf for long runs
    double growth(int t) const;  // (1/t) log S_t, t >= 1
    double final_log_wealth() const { return logs.back(); }
    double final_growth() const { return growth(periods()); }
};

// A strategy is a rule mapping (history, period) to the portfolio held over
// that period. It is handed the full sequence for convenience but must only
// read periods strictly before t; the causality test rebinds it to prefixes.
using DecideFn = std::function<Portfolio(const MarketSequence&, int)>;

struct StrategyRun {
    WealthTrajectory trajectory;
    std::vector<Portfolio> decisions;  // decision for period t at index t-1, if recorded
};

StrategyRun run_strategy(const MarketSequence& seq, const DecideFn& decide,
                         bool record_decisions = false);

// Constantly rebalanced portfolio.
DecideFn crp(Portfolio b);

// Best CRP in hindsight: log-optimal portfolio of the uniform measure over
// the realized market vectors.
Portfolio bcrp_oracle(const MarketSequence& seq, double tol = 1e-8);

// Uniform measure over all realized vectors of the sequence.
DiscreteMeasure realized_measure(const MarketSequence& seq);

double asset_log_wealth(const MarketSequence& seq, int asset);

// Asset with the highest final wealth; ties break to the lowest index.
int best_asset(const MarketSequence& seq);

}  // namespace corn
