#pragma once

#include <vector>

#include "corn/logopt.hpp"
#include "corn/market.hpp"
#include "corn/strategy.hpp"

namespace corn {

// Best asymptotic growth rate of any causal strategy on an i.i.d. market:
// the log-optimal growth of the single-period outcome measure.
double w_star_iid(const SyntheticMarketSpec& spec, double tol = 1e-10);

struct MarkovOracle {
    std::vector<double> occupation;     // long-run regime frequencies from regime 0
    std::vector<double> regime_growth;  // best conditional growth after each regime
    double w_star;                      // occupation-weighted average
};

// Regime-switching markets: emissions pin down the regime (supports must be
// pairwise disjoint, else NonIdentifiableRegimes), so the best causal player
// conditions on the previous regime and plays the log-optimal portfolio of
// the one-step-ahead emission mixture. Long-run frequencies come from power
// iteration on the half-lazy chain (T+I)/2, which converges even for
// periodic transition matrices.
MarkovOracle markov_oracle(const SyntheticMarketSpec& spec, double tol = 1e-10);

// Dispatch on spec.kind.
double w_star(const SyntheticMarketSpec& spec, double tol = 1e-10);

// Doubling checkpoints 100, 200, 400, ... capped at n, with n appended.
std::vector<int> checkpoint_schedule(int n);

struct ConvergenceCheckpoint {
    int t;
    double growth;  // mixture growth rate at t
    double bound;   // best-expert guarantee at t
    double gap;     // w_star - growth
};

struct ConvergenceReport {
    double w_star = 0.0;
    std::vector<ConvergenceCheckpoint> checkpoints;
    std::vector<ExpertParams> experts;
    std::vector<double> expert_growth;  // final growth rate per expert

    double final_gap() const;
};

// Generate n periods from the spec, run the pool, and measure how the
// mixture growth approaches the market's optimal rate.
ConvergenceReport convergence_experiment(const SyntheticMarketSpec& spec, int n,
                                         const PoolSpec& pool, const CornOptions& opts = {});

}  // namespace corn
