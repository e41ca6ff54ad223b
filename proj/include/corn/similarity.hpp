#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "corn/logopt.hpp"
#include "corn/market.hpp"

namespace corn {

// Entry-wise statistics over a flattened window. Every correlation in the
// library funnels through these three helpers so that cached and uncached
// paths produce bit-identical results.
double entry_mean(std::span<const double> v);
double entry_sqdev(std::span<const double> v, double mean);
double entry_cross(std::span<const double> a, double mean_a,
                   std::span<const double> b, double mean_b);

// Flattened view of the omega periods strictly before period t, i.e. periods
// t-omega .. t-1 in row-major asset order. t may be seq.size()+1 (the window
// used to decide the not-yet-observed next period).
std::span<const double> window_span(const MarketSequence& seq, int t, int omega);

// Sample correlation of two equal-length entry vectors, clamped to [-1, 1].
// Undefined (nullopt) when either side has zero variance.
std::optional<double> pearson(std::span<const double> a, std::span<const double> b);

// Precomputed mean/sqdev for every window of a fixed width over one sequence.
class WindowStatsCache {
  public:
    WindowStatsCache(const MarketSequence& seq, int omega);

    int omega() const { return omega_; }
    // Stats of window_span(seq, t, omega); valid for omega+1 <= t <= size+1.
    double mean(int t) const { return mean_[static_cast<std::size_t>(t - omega_ - 1)]; }
    double sqdev(int t) const { return sqdev_[static_cast<std::size_t>(t - omega_ - 1)]; }

  private:
    int omega_;
    std::vector<double> mean_;
    std::vector<double> sqdev_;
};

// Correlation between the windows before periods t and i, using cached stats.
// NaN when undefined. Bit-identical to pearson() on the same spans.
double pearson_cached(const MarketSequence& seq, const WindowStatsCache& cache, int t, int i);

struct MatchCorrelation {
    int period;  // candidate i, omega < i < t
    double r;
};

// Defined correlations of the window before t against every candidate window.
std::vector<MatchCorrelation> match_correlations(const MarketSequence& seq, int t, int omega);

// Candidates whose correlation is defined and >= rho, ascending by period.
std::vector<int> match_set(const MarketSequence& seq, int t, int omega, double rho);

// Mean-square distance rule on a raw window pair: w matches target s when
// meansq(w - s) <= 2 * varpop(s) * (1 - rho), population-normalized both
// sides. Equals correlation-rule membership whenever w and s share entry
// mean and entry variance.
bool distance_match(std::span<const double> w, std::span<const double> s, double rho);

// Same selection expressed through mean-square distance: candidate window w
// matches target s when meansq(w - s) <= 2 * varpop(s) * (1 - rho). Agrees
// with match_set exactly when all windows share entry mean and variance.
std::vector<int> distance_match_set(const MarketSequence& seq, int t, int omega, double rho);

// Uniform measure over the vectors that followed matched windows; when the
// match set is empty, a single all-ones atom (hold cash in every asset).
DiscreteMeasure empirical_measure_weights(const MarketSequence& seq, int t, int omega,
                                          double rho);

}  // namespace corn
