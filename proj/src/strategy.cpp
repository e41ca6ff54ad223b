#include "corn/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>

#include "corn/similarity.hpp"

namespace corn {

std::vector<ExpertParams> PoolSpec::experts() const {
    if (max_omega < 1) throw InvalidSpec("pool needs max_omega >= 1");
    if (rho_levels < 1) throw InvalidSpec("pool needs rho_levels >= 1");
    const double q = 1.0 / (static_cast<double>(max_omega) * rho_levels);
    std::vector<ExpertParams> out;
    out.reserve(static_cast<std::size_t>(max_omega) * static_cast<std::size_t>(rho_levels));
    for (int omega = 1; omega <= max_omega; ++omega) {
        for (int p = 0; p < rho_levels; ++p) {
            out.push_back(ExpertParams{omega, static_cast<double>(p) / rho_levels, q});
        }
    }
    return out;
}

Portfolio expert_decide(const MarketSequence& seq, int t, int omega, double rho, double tol) {
    if (omega < 1) throw InvalidSpec("window length must be >= 1");
    if (t < 1 || t > seq.size() + 1) {
        throw InvalidSpec("deciding for period " + std::to_string(t) + " outside history");
    }
    if (t < omega + 1) return Portfolio::uniform(seq.dim());
    return solve(empirical_measure_weights(seq, t, omega, rho), tol);
}

double mixture_log_wealth(std::span<const ExpertParams> experts,
                          std::span<const double> expert_logs) {
    if (experts.empty() || experts.size() != expert_logs.size()) {
        throw InvalidSpec("mixture needs one log-wealth per expert");
    }
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < experts.size(); ++e) {
        m = std::max(m, std::log(experts[e].q) + expert_logs[e]);
    }
    // Shifting by the max makes the dominant term exp(0) = 1, so the sum is
    // >= 1 and the result is >= every (log q + log S) term, floating point
    // included: the wealth guarantee survives rounding.
    double s = 0.0;
    for (std::size_t e = 0; e < experts.size(); ++e) {
        s += std::exp(std::log(experts[e].q) + expert_logs[e] - m);
    }
    return m + std::log(s);
}

double CornRun::best_expert_bound(int t) const {
    if (t < 1) throw InvalidSpec("bound needs t >= 1");
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < experts.size(); ++e) {
        best = std::max(best, (expert_trajectories[e].logs[static_cast<std::size_t>(t)] +
                               std::log(experts[e].q)) /
                                  static_cast<double>(t));
    }
    return best;
}

namespace {

// Past which distinct-value count coalescing duplicate vectors stops paying
// for itself and the empirical measure is built literally instead.
constexpr int kCoalesceLimit = 256;

double portfolio_factor(const Portfolio& b, std::span<const double> x) {
    double f = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) f += b.weights[j] * x[j];
    return f;
}

}  // namespace

CornRun corn_run(const MarketSequence& seq, const PoolSpec& pool, const CornOptions& opts) {
    if (!(opts.tol > 0.0)) throw InvalidSpec("solver tolerance must be positive");
    CornRun run;
    run.experts = pool.experts();
    const int E = static_cast<int>(run.experts.size());
    const int W = pool.max_omega;
    const int P = pool.rho_levels;
    const int n = seq.size();
    const int d = seq.dim();
    const int A = seq.distinct_count();
    const bool coalesce = A <= kCoalesceLimit;

    // Thresholds are the experts' own rho doubles, ascending; membership
    // tests below use the same r >= rho comparison as match_set.
    std::vector<double> rho(static_cast<std::size_t>(P));
    for (int p = 0; p < P; ++p) rho[static_cast<std::size_t>(p)] = run.experts[static_cast<std::size_t>(p)].rho;

    std::vector<WindowStatsCache> caches;
    caches.reserve(static_cast<std::size_t>(W));
    for (int w = 1; w <= W; ++w) caches.emplace_back(seq, w);

    std::vector<double> atom_flat;
    std::vector<int> atom_of;
    if (coalesce) {
        atom_flat.resize(static_cast<std::size_t>(A) * static_cast<std::size_t>(d));
        for (int a = 0; a < A; ++a) {
            const auto v = seq.distinct_atom(a);
            std::copy(v.begin(), v.end(),
                      atom_flat.begin() + static_cast<std::size_t>(a) * static_cast<std::size_t>(d));
        }
        atom_of.resize(static_cast<std::size_t>(n) + 1);
        for (int t = 1; t <= n; ++t) atom_of[static_cast<std::size_t>(t)] = seq.atom_id(t);
    }

    run.expert_trajectories.assign(static_cast<std::size_t>(E), WealthTrajectory{});
    for (auto& tr : run.expert_trajectories) {
        tr.logs.reserve(static_cast<std::size_t>(n) + 1);
        tr.logs.push_back(0.0);
    }
    std::vector<double> acc(static_cast<std::size_t>(E), 0.0);
    run.mixture.logs.reserve(static_cast<std::size_t>(n) + 1);
    run.mixture.logs.push_back(mixture_log_wealth(run.experts, acc));
    if (opts.record_decisions) run.decisions.assign(static_cast<std::size_t>(E), {});

    std::vector<double> r(static_cast<std::size_t>(n) + 1);
    // lists[p] holds candidates whose highest cleared threshold is p; level p
    // then matches the union of lists[p..P-1].
    std::vector<std::vector<int>> lists(static_cast<std::size_t>(P));
    std::vector<long> counts(coalesce ? static_cast<std::size_t>(A) : 0);
    std::vector<int> matched;
    std::vector<double> meas_atoms;
    std::vector<double> meas_w;
    std::vector<Portfolio> dec(static_cast<std::size_t>(E), Portfolio::uniform(d));
    const bool par = opts.mode == ExecMode::parallel;

    for (int t = 1; t <= n; ++t) {
        for (int w = 1; w <= W; ++w) {
            const auto& cache = caches[static_cast<std::size_t>(w) - 1];
            const int base = (w - 1) * P;
            if (t < w + 2) {  // no candidate window fits yet
                for (int p = 0; p < P; ++p) {
                    dec[static_cast<std::size_t>(base + p)] = Portfolio::uniform(d);
                }
                continue;
            }
            const int lo = w + 1;
            const int hi = t - 1;
            if (par) {
#pragma omp parallel for schedule(static)
                for (int i = lo; i <= hi; ++i) {
                    r[static_cast<std::size_t>(i)] = pearson_cached(seq, cache, t, i);
                }
            } else {
                for (int i = lo; i <= hi; ++i) {
                    r[static_cast<std::size_t>(i)] = pearson_cached(seq, cache, t, i);
                }
            }
            for (auto& l : lists) l.clear();
            for (int i = lo; i <= hi; ++i) {
                const double ri = r[static_cast<std::size_t>(i)];
                if (std::isnan(ri)) continue;
                int p = P - 1;
                while (p >= 0 && !(ri >= rho[static_cast<std::size_t>(p)])) --p;
                if (p >= 0) lists[static_cast<std::size_t>(p)].push_back(i);
            }
            if (coalesce) std::fill(counts.begin(), counts.end(), 0L);
            matched.clear();
            long k = 0;
            for (int p = P - 1; p >= 0; --p) {
                for (int i : lists[static_cast<std::size_t>(p)]) {
                    if (coalesce) {
                        ++counts[static_cast<std::size_t>(atom_of[static_cast<std::size_t>(i)])];
                    } else {
                        matched.push_back(i);
                    }
                    ++k;
                }
                auto& out = dec[static_cast<std::size_t>(base + p)];
                if (k == 0) {
                    out = Portfolio::uniform(d);
                    continue;
                }
                meas_atoms.clear();
                meas_w.clear();
                if (coalesce) {
                    for (int a = 0; a < A; ++a) {
                        const long c = counts[static_cast<std::size_t>(a)];
                        if (!c) continue;
                        const auto first =
                            atom_flat.begin() + static_cast<std::size_t>(a) * static_cast<std::size_t>(d);
                        meas_atoms.insert(meas_atoms.end(), first, first + d);
                        meas_w.push_back(static_cast<double>(c) / static_cast<double>(k));
                    }
                } else {
                    const double uw = 1.0 / static_cast<double>(k);
                    for (int i : matched) {
                        const auto x = seq.period(i);
                        meas_atoms.insert(meas_atoms.end(), x.begin(), x.end());
                        meas_w.push_back(uw);
                    }
                }
                out = solve_flat(meas_atoms, d, meas_w, opts.tol);
            }
        }
        const auto x = seq.period(t);
        for (int e = 0; e < E; ++e) {
            const double f = portfolio_factor(dec[static_cast<std::size_t>(e)], x);
            if (!(f > 0.0)) throw NonPositiveWealth(f);
            acc[static_cast<std::size_t>(e)] += std::log(f);
            run.expert_trajectories[static_cast<std::size_t>(e)].logs.push_back(
                acc[static_cast<std::size_t>(e)]);
            if (opts.record_decisions) {
                run.decisions[static_cast<std::size_t>(e)].push_back(dec[static_cast<std::size_t>(e)]);
            }
        }
        run.mixture.logs.push_back(mixture_log_wealth(run.experts, acc));
    }
    return run;
}

namespace {

struct MixtureState {
    std::vector<ExpertParams> experts;
    double tol;
    std::vector<double> logs;      // log S_{t-1} per expert
    std::vector<Portfolio> last;   // decisions made for period next_t - 1
    int next_t = 1;

    MixtureState(const PoolSpec& pool, double tol_)
        : experts(pool.experts()), tol(tol_), logs(experts.size(), 0.0) {}

    void reset() {
        std::fill(logs.begin(), logs.end(), 0.0);
        last.clear();
        next_t = 1;
    }

    Portfolio decide(const MarketSequence& seq, int t) {
        if (t < 1 || t > seq.size() + 1) {
            throw InvalidSpec("deciding for period " + std::to_string(t) + " outside history");
        }
        if (t != next_t) {  // out-of-order call: replay history up to t
            reset();
            for (int u = 1; u < t; ++u) (void)decide(seq, u);
        }
        if (t > 1) {  // realized factor of the previous period is now readable
            const auto x = seq.period(t - 1);
            for (std::size_t e = 0; e < experts.size(); ++e) {
                const double f = portfolio_factor(last[e], x);
                if (!(f > 0.0)) throw NonPositiveWealth(f);
                logs[e] += std::log(f);
            }
        }
        last.clear();
        for (const auto& ep : experts) {
            last.push_back(expert_decide(seq, t, ep.omega, ep.rho, tol));
        }
        double m = -std::numeric_limits<double>::infinity();
        for (std::size_t e = 0; e < experts.size(); ++e) {
            m = std::max(m, std::log(experts[e].q) + logs[e]);
        }
        std::vector<double> wts(experts.size());
        double total = 0.0;
        for (std::size_t e = 0; e < experts.size(); ++e) {
            wts[e] = std::exp(std::log(experts[e].q) + logs[e] - m);
            total += wts[e];
        }
        Portfolio b{std::vector<double>(static_cast<std::size_t>(seq.dim()), 0.0)};
        for (std::size_t e = 0; e < experts.size(); ++e) {
            const double we = wts[e] / total;
            for (std::size_t j = 0; j < b.weights.size(); ++j) {
                b.weights[j] += we * last[e].weights[j];
            }
        }
        double s = 0.0;
        for (double wj : b.weights) s += wj;
        for (auto& wj : b.weights) wj /= s;
        next_t = t + 1;
        return b;
    }
};

}  // namespace

DecideFn mixture_strategy(const PoolSpec& pool, double tol) {
    auto st = std::make_shared<MixtureState>(pool, tol);
    return [st](const MarketSequence& seq, int t) { return st->decide(seq, t); };
}

}  // namespace corn
