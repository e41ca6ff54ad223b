#include "corn/logopt.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

namespace corn {

Portfolio Portfolio::uniform(int d) {
    return Portfolio{std::vector<double>(static_cast<std::size_t>(d), 1.0 / d)};
}

void validate_portfolio(const Portfolio& b, double sum_tol) {
    if (b.dim() < 2) throw InvalidSpec("portfolio needs at least 2 assets");
    double total = 0.0;
    for (double w : b.weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw InvalidSpec("portfolio weight " + std::to_string(w) + " is negative");
        }
        total += w;
    }
    if (std::abs(total - 1.0) > sum_tol) {
        throw InvalidSpec("portfolio weights sum to " + std::to_string(total));
    }
}

void validate_measure(const DiscreteMeasure& m) {
    if (m.atoms.empty()) throw InvalidSpec("measure without atoms");
    if (m.atoms.size() != m.weights.size()) {
        throw InvalidSpec("measure atom/weight count mismatch");
    }
    const int d = m.dim();
    double total = 0.0;
    for (int k = 0; k < m.size(); ++k) {
        validate_market_vector(m.atoms[static_cast<std::size_t>(k)].values);
        if (m.atoms[static_cast<std::size_t>(k)].dim() != d) {
            throw DimensionMismatch("measure atoms have mixed dimensions");
        }
        const double w = m.weights[static_cast<std::size_t>(k)];
        if (!(w > 0.0)) throw InvalidSpec("measure weights must be positive");
        total += w;
    }
    // Tolerance scales with atom count: a uniform measure over k atoms carries
    // O(k) ulps of summation error by construction.
    const double tol = 1e-12 + static_cast<double>(m.size()) * 1e-15;
    if (std::abs(total - 1.0) > tol) {
        throw InvalidSpec("measure weights sum to " + std::to_string(total));
    }
}

namespace {

double dot(std::span<const double> b, std::span<const double> x) {
    double s = 0.0;
    for (std::size_t j = 0; j < b.size(); ++j) s += b[j] * x[j];
    return s;
}

double eval_flat(std::span<const double> atoms, int d, std::span<const double> weights,
                 std::span<const double> b) {
    double f = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        const double s = dot(b, atoms.subspan(k * static_cast<std::size_t>(d),
                                              static_cast<std::size_t>(d)));
        if (!(s > 0.0)) throw NonPositiveWealth(s);
        f += weights[k] * std::log(s);
    }
    return f;
}

// KKT coordinate sums g_j = sum_k w_k x_k[j] / <b, x_k>; returns max_j g_j - 1.
double kkt_sums(std::span<const double> atoms, int d, std::span<const double> weights,
                std::span<const double> b, std::span<double> g) {
    std::fill(g.begin(), g.end(), 0.0);
    for (std::size_t k = 0; k < weights.size(); ++k) {
        const auto x = atoms.subspan(k * static_cast<std::size_t>(d),
                                     static_cast<std::size_t>(d));
        const double s = dot(b, x);
        if (!(s > 0.0)) throw NonPositiveWealth(s);
        const double c = weights[k] / s;
        for (int j = 0; j < d; ++j) g[static_cast<std::size_t>(j)] += c * x[static_cast<std::size_t>(j)];
    }
    double gmax = g[0];
    for (int j = 1; j < d; ++j) gmax = std::max(gmax, g[static_cast<std::size_t>(j)]);
    return gmax - 1.0;
}

std::vector<double> flatten(const DiscreteMeasure& m) {
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(m.size()) * static_cast<std::size_t>(m.dim()));
    for (const auto& a : m.atoms) flat.insert(flat.end(), a.values.begin(), a.values.end());
    return flat;
}

}  // namespace

double log_wealth(const DiscreteMeasure& m, const Portfolio& b) {
    validate_measure(m);
    if (b.dim() != m.dim()) {
        throw DimensionMismatch("portfolio has " + std::to_string(b.dim()) +
                                " assets, measure has " + std::to_string(m.dim()));
    }
    const auto flat = flatten(m);
    return eval_flat(flat, m.dim(), m.weights, b.weights);
}

CertifyReport certify(const DiscreteMeasure& m, const Portfolio& b, double tol) {
    validate_measure(m);
    validate_portfolio(b);
    if (b.dim() != m.dim()) {
        throw DimensionMismatch("portfolio/measure dimension mismatch");
    }
    const auto flat = flatten(m);
    std::vector<double> g(static_cast<std::size_t>(m.dim()));
    const double gap = kkt_sums(flat, m.dim(), m.weights, b.weights, g);
    return CertifyReport{gap <= tol, gap};
}

Portfolio solve_flat(std::span<const double> atoms, int d, std::span<const double> weights,
                     double tol) {
    if (d < 2) throw DimensionMismatch("solver needs at least 2 assets");
    if (!(tol > 0.0)) throw InvalidSpec("solver tolerance must be positive");

    // Multiplicative reweighting b <- b * g(b): each asset's weight scales by
    // its expected relative return under the current portfolio. The objective
    // is non-decreasing along these steps and fixed points are exactly the
    // KKT points, so the loop exits on the certificate, not an iteration
    // count. Degenerate measures certify at the uniform start immediately.
    Portfolio b = Portfolio::uniform(d);
    std::vector<double> g(static_cast<std::size_t>(d));
    constexpr long kMaxIter = 20'000'000;
    for (long iter = 0; iter < kMaxIter; ++iter) {
        const double gap = kkt_sums(atoms, d, weights, b.weights, g);
        if (gap <= tol) return b;
        double total = 0.0;
        for (int j = 0; j < d; ++j) {
            auto& w = b.weights[static_cast<std::size_t>(j)];
            w *= g[static_cast<std::size_t>(j)];
            total += w;
        }
        for (auto& w : b.weights) w /= total;
    }
    throw Error("log-optimal solve did not reach tolerance " + std::to_string(tol));
}

Portfolio solve(const DiscreteMeasure& m, double tol) {
    validate_measure(m);
    const auto flat = flatten(m);
    return solve_flat(flat, m.dim(), m.weights, tol);
}

Portfolio oracle_solve(const DiscreteMeasure& m, double grid_step) {
    validate_measure(m);
    const int d = m.dim();
    if (d > 4) throw DimensionTooLarge(d);
    if (!(grid_step > 0.0)) throw InvalidSpec("grid step must be positive");
    const auto flat = flatten(m);

    const int cells = std::max(1, static_cast<int>(std::lround(1.0 / grid_step)));
    std::vector<double> b(static_cast<std::size_t>(d), 0.0);
    std::vector<double> best = b;
    double best_f = -std::numeric_limits<double>::infinity();

    // Full pass over compositions of `cells` into d nonnegative parts.
    std::vector<int> counts(static_cast<std::size_t>(d), 0);
    std::function<void(int, int)> visit = [&](int coord, int remaining) {
        if (coord == d - 1) {
            counts[static_cast<std::size_t>(coord)] = remaining;
            for (int j = 0; j < d; ++j) {
                b[static_cast<std::size_t>(j)] =
                    static_cast<double>(counts[static_cast<std::size_t>(j)]) / cells;
            }
            const double f = eval_flat(flat, d, m.weights, b);
            if (f > best_f) {
                best_f = f;
                best = b;
            }
            return;
        }
        for (int c = 0; c <= remaining; ++c) {
            counts[static_cast<std::size_t>(coord)] = c;
            visit(coord + 1, remaining - c);
        }
    };
    visit(0, cells);

    // Local refinement: pairwise mass transfers with a shrinking step.
    double step = grid_step;
    while (step > grid_step / 1024.0) {
        bool improved = false;
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
                if (i == j) continue;
                const double delta = std::min(step, best[static_cast<std::size_t>(j)]);
                if (delta <= 0.0) continue;
                std::vector<double> cand = best;
                cand[static_cast<std::size_t>(i)] += delta;
                cand[static_cast<std::size_t>(j)] -= delta;
                const double f = eval_flat(flat, d, m.weights, cand);
                if (f > best_f) {
                    best_f = f;
                    best = std::move(cand);
                    improved = true;
                }
            }
        }
        if (!improved) step /= 2.0;
    }

    return Portfolio{std::move(best)};
}

}  // namespace corn
