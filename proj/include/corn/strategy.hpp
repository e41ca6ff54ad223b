#pragma once

#include <span>
#include <vector>

#include "corn/backtest.hpp"
#include "corn/logopt.hpp"
#include "corn/market.hpp"

namespace corn {

struct ExpertParams {
    int omega;   // window length
    double rho;  // correlation threshold
    double q;    // prior mass of this expert in the mixture
};

// Finite expert grid: omega in 1..max_omega, rho = p / rho_levels for
// p = 0..rho_levels-1, uniform prior q = 1 / (max_omega * rho_levels).
struct PoolSpec {
    int max_omega = 2;
    int rho_levels = 5;

    std::vector<ExpertParams> experts() const;  // omega-major, rho ascending
};

enum class ExecMode { serial, parallel };

struct CornOptions {
    double tol = 1e-8;               // certificate tolerance for expert solves
    ExecMode mode = ExecMode::serial;
    bool record_decisions = false;   // keep per-expert portfolios (memory-heavy)
};

struct CornRun {
    std::vector<ExpertParams> experts;
    std::vector<WealthTrajectory> expert_trajectories;  // one per expert
    WealthTrajectory mixture;                           // log-domain q-mixture wealth
    std::vector<std::vector<Portfolio>> decisions;      // [expert][t-1] when recorded

    // Growth the mixture is guaranteed to reach by construction:
    // max over experts of (log S_t(expert) + log q) / t.
    double best_expert_bound(int t) const;
};

// Single expert's portfolio for period t: log-optimal portfolio of the
// empirical measure over correlation-matched history. Uniform while the
// window does not fit yet. Reference path, recomputed from scratch.
Portfolio expert_decide(const MarketSequence& seq, int t, int omega, double rho,
                        double tol = 1e-8);

// log of the q-weighted average of expert wealths, given per-expert
// cumulative log-wealths. logsumexp keeps the mixture >= every component.
double mixture_log_wealth(std::span<const ExpertParams> experts,
                          std::span<const double> expert_logs);

// Full pool over one sequence: every expert's trajectory plus the mixture.
// Serial and parallel modes produce bit-identical output.
CornRun corn_run(const MarketSequence& seq, const PoolSpec& pool,
                 const CornOptions& opts = {});

// The same mixture expressed as a single causal strategy: each period plays
// the wealth-weighted average of the expert portfolios. Stateful; cheap when
// called with consecutive periods, replays from scratch otherwise.
DecideFn mixture_strategy(const PoolSpec& pool, double tol = 1e-8);

}  // namespace corn
