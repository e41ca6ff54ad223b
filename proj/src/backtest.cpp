#include "corn/backtest.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace corn {

double WealthTrajectory::wealth(int t) const {
    return std::exp(logs[static_cast<std::size_t>(t)]);
}

double WealthTrajectory::growth(int t) const {
    if (t < 1) throw InvalidSpec("growth rate needs at least one period");
    return logs[static_cast<std::size_t>(t)] / static_cast<double>(t);
}

StrategyRun run_strategy(const MarketSequence& seq, const DecideFn& decide,
                         bool record_decisions) {
    StrategyRun run;
    run.trajectory.logs.reserve(static_cast<std::size_t>(seq.size()) + 1);
    run.trajectory.logs.push_back(0.0);
    if (record_decisions) run.decisions.reserve(static_cast<std::size_t>(seq.size()));
    double acc = 0.0;
    for (int t = 1; t <= seq.size(); ++t) {
        Portfolio b = decide(seq, t);
        try {
            validate_portfolio(b);
        } catch (const Error& e) {
            throw InvalidPortfolio(t, e.what());
        }
        if (b.dim() != seq.dim()) throw InvalidPortfolio(t, "portfolio/market dimension mismatch");
        const auto x = seq.period(t);
        double factor = 0.0;
        for (int j = 0; j < seq.dim(); ++j) {
            factor += b.weights[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
        }
        if (!(factor > 0.0)) throw NonPositiveWealth(factor);
        acc += std::log(factor);
        run.trajectory.logs.push_back(acc);
        if (record_decisions) run.decisions.push_back(std::move(b));
    }
    return run;
}

DecideFn crp(Portfolio b) {
    validate_portfolio(b);
    return [b = std::move(b)](const MarketSequence&, int) { return b; };
}

DiscreteMeasure realized_measure(const MarketSequence& seq) {
    if (seq.size() < 1) throw InvalidSpec("empty sequence has no realized measure");
    DiscreteMeasure m;
    m.atoms.reserve(static_cast<std::size_t>(seq.size()));
    m.weights.reserve(static_cast<std::size_t>(seq.size()));
    const double w = 1.0 / static_cast<double>(seq.size());
    for (int t = 1; t <= seq.size(); ++t) {
        m.atoms.push_back(MarketVector{std::vector<double>(seq.period(t).begin(),
                                                           seq.period(t).end())});
        m.weights.push_back(w);
    }
    return m;
}

Portfolio bcrp_oracle(const MarketSequence& seq, double tol) {
    return solve(realized_measure(seq), tol);
}

double asset_log_wealth(const MarketSequence& seq, int asset) {
    if (asset < 0 || asset >= seq.dim()) {
        throw InvalidSpec("asset index " + std::to_string(asset) + " out of range");
    }
    double acc = 0.0;
    for (int t = 1; t <= seq.size(); ++t) {
        acc += std::log(seq.period(t)[static_cast<std::size_t>(asset)]);
    }
    return acc;
}

int best_asset(const MarketSequence& seq) {
    int best = 0;
    double best_log = asset_log_wealth(seq, 0);
    for (int j = 1; j < seq.dim(); ++j) {
        const double lw = asset_log_wealth(seq, j);
        if (lw > best_log) {
            best_log = lw;
            best = j;
        }
    }
    return best;
}

}  // namespace corn
