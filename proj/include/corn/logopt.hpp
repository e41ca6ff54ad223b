#pragma once

#include <span>
#include <vector>

#include "corn/errors.hpp"
#include "corn/market.hpp"

namespace corn {

/// Allocation on the d-simplex: nonnegative weights summing to 1 (within
/// 1e-9). Fraction of wealth held per asset, rebalanced every period.
struct Portfolio {
    std::vector<double> weights;

    int dim() const { return static_cast<int>(weights.size()); }
    static Portfolio uniform(int d);
    bool operator==(const Portfolio&) const = default;
};

/// Throws InvalidSpec if b is off the simplex.
void validate_portfolio(const Portfolio& b, double sum_tol = 1e-9);

/// Finitely supported probability measure on market vectors.
struct DiscreteMeasure {
    std::vector<MarketVector> atoms;
    std::vector<double> weights;

    int size() const { return static_cast<int>(atoms.size()); }
    int dim() const { return atoms.empty() ? 0 : atoms.front().dim(); }
};

/// Throws InvalidSpec unless atoms are valid market vectors of one dimension
/// and the positive weights sum to 1 within 1e-12.
void validate_measure(const DiscreteMeasure& m);

/// Expected log wealth sum_k w_k log<b, x_k>. Throws NonPositiveWealth if an
/// atom produces a non-positive wealth factor (impossible for valid inputs).
double log_wealth(const DiscreteMeasure& m, const Portfolio& b);

struct CertifyReport {
    bool optimal = false;
    double gap = 0.0;  // max_j sum_k w_k x_k[j] / <b,x_k>  minus 1
};

/// First-order optimality check for the concave program max E log<b,X>.
/// b is optimal iff every coordinate sum sum_k w_k x_k[j]/<b,x_k> is <= 1,
/// with equality on the support of b. The reported gap also bounds the
/// objective suboptimality: F(b*) - F(b) <= gap.
CertifyReport certify(const DiscreteMeasure& m, const Portfolio& b, double tol);

/// Log-optimal portfolio for m: maximizes sum_k w_k log<b, x_k> over the
/// simplex, iterating from the uniform portfolio until the certify gap is at
/// most tol. Deterministic given (m, tol). Degenerate measures (every
/// portfolio optimal) return the uniform portfolio.
Portfolio solve(const DiscreteMeasure& m, double tol = 1e-8);

/// Same solver on flat storage: `atoms` is u rows of d components. This is
/// the entry point hot paths use; solve() delegates here.
Portfolio solve_flat(std::span<const double> atoms, int d, std::span<const double> weights,
                     double tol);

/// Exhaustive simplex-grid search with local refinement. Ground truth for
/// tests; exponential in d, so d <= 4. Throws DimensionTooLarge.
Portfolio oracle_solve(const DiscreteMeasure& m, double grid_step);

}  // namespace corn
