#include "corn/consistency.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace corn {

namespace {

DiscreteMeasure outcome_measure(const std::vector<Outcome>& outcomes) {
    DiscreteMeasure m;
    for (const auto& o : outcomes) {
        m.atoms.push_back(o.value);
        m.weights.push_back(o.prob);
    }
    return m;
}

}  // namespace

double w_star_iid(const SyntheticMarketSpec& spec, double tol) {
    validate_spec(spec);
    if (spec.kind != MarketKind::iid_discrete) {
        throw InvalidSpec("i.i.d. growth oracle applied to a non-i.i.d. spec");
    }
    const auto m = outcome_measure(spec.regimes.front());
    return log_wealth(m, solve(m, tol));
}

MarkovOracle markov_oracle(const SyntheticMarketSpec& spec, double tol) {
    validate_spec(spec);
    if (spec.kind != MarketKind::markov_regime) {
        throw InvalidSpec("regime growth oracle applied to a non-regime spec");
    }
    const auto R = spec.regimes.size();
    for (std::size_t a = 0; a < R; ++a) {
        for (std::size_t b = a + 1; b < R; ++b) {
            for (const auto& oa : spec.regimes[a]) {
                for (const auto& ob : spec.regimes[b]) {
                    if (oa.value == ob.value) throw NonIdentifiableRegimes();
                }
            }
        }
    }

    // Long-run regime frequencies, started from the actual initial regime.
    // The half-lazy kernel (T+I)/2 shares the chain's occupation frequencies
    // and always mixes, so plain power iteration suffices.
    std::vector<double> pi(R, 0.0);
    pi[0] = 1.0;
    std::vector<double> next(R);
    constexpr int kMaxIter = 2'000'000;
    int iter = 0;
    for (; iter < kMaxIter; ++iter) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t r = 0; r < R; ++r) {
            const double half = 0.5 * pi[r];
            next[r] += half;
            for (std::size_t s = 0; s < R; ++s) next[s] += half * spec.transition[r][s];
        }
        double delta = 0.0;
        for (std::size_t r = 0; r < R; ++r) delta = std::max(delta, std::abs(next[r] - pi[r]));
        pi.swap(next);
        if (delta <= 1e-13) break;
    }
    if (iter == kMaxIter) throw Error("regime frequency iteration did not converge");

    MarkovOracle out;
    out.occupation = pi;
    out.regime_growth.resize(R);
    double w = 0.0;
    for (std::size_t r = 0; r < R; ++r) {
        DiscreteMeasure m;
        for (std::size_t s = 0; s < R; ++s) {
            const double ts = spec.transition[r][s];
            if (ts <= 0.0) continue;
            for (const auto& o : spec.regimes[s]) {
                m.atoms.push_back(o.value);
                m.weights.push_back(ts * o.prob);
            }
        }
        out.regime_growth[r] = log_wealth(m, solve(m, tol));
        w += pi[r] * out.regime_growth[r];
    }
    out.w_star = w;
    return out;
}

double w_star(const SyntheticMarketSpec& spec, double tol) {
    return spec.kind == MarketKind::iid_discrete ? w_star_iid(spec, tol)
                                                 : markov_oracle(spec, tol).w_star;
}

std::vector<int> checkpoint_schedule(int n) {
    if (n < 1) throw InvalidSpec("schedule needs at least one period");
    std::vector<int> out;
    for (int c = 100; c < n; c *= 2) out.push_back(c);
    out.push_back(n);
    return out;
}

double ConvergenceReport::final_gap() const {
    if (checkpoints.empty()) throw InvalidSpec("empty convergence report");
    return checkpoints.back().gap;
}

ConvergenceReport convergence_experiment(const SyntheticMarketSpec& spec, int n,
                                         const PoolSpec& pool, const CornOptions& opts) {
    if (n < 1) throw InvalidSpec("experiment needs at least one period");
    const MarketSequence seq = generate(spec, n);
    const CornRun run = corn_run(seq, pool, opts);
    ConvergenceReport report;
    report.w_star = w_star(spec);
    for (int t : checkpoint_schedule(n)) {
        ConvergenceCheckpoint c;
        c.t = t;
        c.growth = run.mixture.growth(t);
        c.bound = run.best_expert_bound(t);
        c.gap = report.w_star - c.growth;
        report.checkpoints.push_back(c);
    }
    report.experts = run.experts;
    for (const auto& tr : run.expert_trajectories) {
        report.expert_growth.push_back(tr.final_growth());
    }
    return report;
}

}  // namespace corn
