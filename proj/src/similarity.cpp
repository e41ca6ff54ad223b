#include "corn/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace corn {

double entry_mean(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double entry_sqdev(std::span<const double> v, double mean) {
    double s = 0.0;
    for (double x : v) {
        const double dxv = x - mean;
        s += dxv * dxv;
    }
    return s;
}

double entry_cross(std::span<const double> a, double mean_a,
                   std::span<const double> b, double mean_b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += (a[i] - mean_a) * (b[i] - mean_b);
    }
    return s;
}

namespace {

void check_window_args(const MarketSequence& seq, int t, int omega) {
    if (omega < 1) throw InvalidSpec("window length must be >= 1");
    if (t < omega + 1) throw InsufficientHistory(t, omega);
    if (t > seq.size() + 1) {
        throw InvalidSpec("period " + std::to_string(t) + " beyond recorded history");
    }
}

void check_rho(double rho) {
    if (!(rho >= -1.0 && rho <= 1.0)) {
        throw InvalidSpec("correlation threshold " + std::to_string(rho) +
                          " outside [-1, 1]");
    }
}

double clamp_unit(double r) { return std::min(1.0, std::max(-1.0, r)); }

}  // namespace

std::span<const double> window_span(const MarketSequence& seq, int t, int omega) {
    check_window_args(seq, t, omega);
    const auto d = static_cast<std::size_t>(seq.dim());
    const auto start = static_cast<std::size_t>(t - 1 - omega) * d;
    return std::span<const double>(seq.flat()).subspan(start,
                                                       static_cast<std::size_t>(omega) * d);
}

std::optional<double> pearson(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DimensionMismatch("correlating unequal-length windows");
    if (a.empty()) throw InvalidSpec("correlating empty windows");
    const double ma = entry_mean(a);
    const double mb = entry_mean(b);
    const double sa = entry_sqdev(a, ma);
    const double sb = entry_sqdev(b, mb);
    if (sa == 0.0 || sb == 0.0) return std::nullopt;
    return clamp_unit(entry_cross(a, ma, b, mb) / std::sqrt(sa * sb));
}

WindowStatsCache::WindowStatsCache(const MarketSequence& seq, int omega) : omega_(omega) {
    if (omega < 1) throw InvalidSpec("window length must be >= 1");
    const int count = seq.size() + 1 - omega;  // windows before periods omega+1 .. size+1
    if (count <= 0) return;
    mean_.reserve(static_cast<std::size_t>(count));
    sqdev_.reserve(static_cast<std::size_t>(count));
    for (int t = omega + 1; t <= seq.size() + 1; ++t) {
        const auto w = window_span(seq, t, omega);
        const double m = entry_mean(w);
        mean_.push_back(m);
        sqdev_.push_back(entry_sqdev(w, m));
    }
}

double pearson_cached(const MarketSequence& seq, const WindowStatsCache& cache, int t, int i) {
    const int omega = cache.omega();
    const double sa = cache.sqdev(i);
    const double sb = cache.sqdev(t);
    if (sa == 0.0 || sb == 0.0) return std::numeric_limits<double>::quiet_NaN();
    const auto wi = window_span(seq, i, omega);
    const auto wt = window_span(seq, t, omega);
    return clamp_unit(entry_cross(wi, cache.mean(i), wt, cache.mean(t)) / std::sqrt(sa * sb));
}

std::vector<MatchCorrelation> match_correlations(const MarketSequence& seq, int t, int omega) {
    check_window_args(seq, t, omega);
    WindowStatsCache cache(seq, omega);
    std::vector<MatchCorrelation> out;
    for (int i = omega + 1; i < t; ++i) {
        const double r = pearson_cached(seq, cache, t, i);
        if (!std::isnan(r)) out.push_back(MatchCorrelation{i, r});
    }
    return out;
}

std::vector<int> match_set(const MarketSequence& seq, int t, int omega, double rho) {
    check_rho(rho);
    std::vector<int> out;
    for (const auto& [period, r] : match_correlations(seq, t, omega)) {
        if (r >= rho) out.push_back(period);
    }
    return out;
}

bool distance_match(std::span<const double> w, std::span<const double> s, double rho) {
    if (w.size() != s.size()) throw DimensionMismatch("comparing unequal-length windows");
    if (s.empty()) throw InvalidSpec("comparing empty windows");
    check_rho(rho);
    const double n = static_cast<double>(s.size());
    const double varpop = entry_sqdev(s, entry_mean(s)) / n;
    double acc = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        const double dv = w[k] - s[k];
        acc += dv * dv;
    }
    return acc / n <= 2.0 * varpop * (1.0 - rho);
}

std::vector<int> distance_match_set(const MarketSequence& seq, int t, int omega, double rho) {
    check_window_args(seq, t, omega);
    check_rho(rho);
    const auto s = window_span(seq, t, omega);
    std::vector<int> out;
    for (int i = omega + 1; i < t; ++i) {
        if (distance_match(window_span(seq, i, omega), s, rho)) out.push_back(i);
    }
    return out;
}

DiscreteMeasure empirical_measure_weights(const MarketSequence& seq, int t, int omega,
                                          double rho) {
    const auto ms = match_set(seq, t, omega, rho);
    DiscreteMeasure m;
    if (ms.empty()) {
        m.atoms.push_back(MarketVector{std::vector<double>(
            static_cast<std::size_t>(seq.dim()), 1.0)});
        m.weights.push_back(1.0);
        return m;
    }
    const double w = 1.0 / static_cast<double>(ms.size());
    for (int i : ms) {
        m.atoms.push_back(MarketVector{std::vector<double>(seq.period(i).begin(),
                                                           seq.period(i).end())});
        m.weights.push_back(w);
    }
    return m;
}

}  // namespace corn
