#include <algorithm>
#include <cmath>
#include <iterator>
#include <random>
#include <set>
#include <vector>

#include "doctest.h"

#include "corn/market.hpp"
#include "corn/similarity.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace corn;

namespace {

// Affinely rescale v to have the given entry mean and population variance.
std::vector<double> normalize_to(std::vector<double> v, double mean, double var) {
    const double m = entry_mean(v);
    double sq = 0.0;
    for (double x : v) sq += (x - m) * (x - m);
    const double sd = std::sqrt(sq / static_cast<double>(v.size()));
    REQUIRE(sd > 0.0);
    const double target_sd = std::sqrt(var);
    for (double& x : v) x = mean + (x - m) / sd * target_sd;
    return v;
}

}  // namespace

TEST_SUITE("similarity") {

    TEST_CASE("window spans address the right slice of history") {
        const MarketSequence seq = support::alternating(6);  // d = 2
        // Window before t=4, omega=2: periods 2 and 3 flattened.
        const auto w = window_span(seq, 4, 2);
        REQUIRE(w.size() == 4);
        CHECK(w[0] == 0.5);
        CHECK(w[1] == 2.0);
        CHECK(w[2] == 2.0);
        CHECK(w[3] == 0.5);
        // The decision window for the unseen period n+1 is legal.
        CHECK_NOTHROW(window_span(seq, 7, 3));
        CHECK_THROWS_AS(window_span(seq, 2, 2), InsufficientHistory);
        CHECK_THROWS_AS(window_span(seq, 8, 1), InvalidSpec);
    }

    TEST_CASE("correlation hand value") {
        const std::vector<double> a{1.0, 2.0, 3.0, 4.0};
        const std::vector<double> b{1.0, 3.0, 2.0, 4.0};
        const auto r = pearson(a, b);
        REQUIRE(r.has_value());
        CHECK(*r == doctest::Approx(0.8).epsilon(1e-15));
    }

    TEST_CASE("affine images correlate to one, within clamp") {
        const std::vector<double> a{0.98, 1.03, 1.01, 0.97, 1.05};
        std::vector<double> b;
        for (double x : a) b.push_back(2.5 * x - 1.0);
        const auto r = pearson(a, b);
        REQUIRE(r.has_value());
        CHECK(*r >= 1.0 - 1e-12);
        CHECK(*r <= 1.0);

        std::vector<double> c;
        for (double x : a) c.push_back(-0.5 * x + 2.0);
        const auto rn = pearson(a, c);
        REQUIRE(rn.has_value());
        CHECK(*rn <= -1.0 + 1e-12);
        CHECK(*rn >= -1.0);
    }

    TEST_CASE("constant windows have undefined correlation") {
        const std::vector<double> flat4{1.0, 1.0, 1.0, 1.0};
        const std::vector<double> moving{1.0, 1.1, 0.9, 1.2};
        CHECK_FALSE(pearson(flat4, moving).has_value());
        CHECK_FALSE(pearson(moving, flat4).has_value());
        CHECK_FALSE(pearson(flat4, flat4).has_value());
    }

    TEST_CASE("library correlation matches the textbook formula") {
        const MarketSequence seq = generate(support::sticky_spec(31), 60);
        for (const int omega : {1, 2, 3}) {
            for (int t = omega + 1; t <= seq.size() + 1; ++t) {
                for (int i = omega + 1; i < t; ++i) {
                    const auto got = pearson(window_span(seq, t, omega),
                                             window_span(seq, i, omega));
                    const double want = oracles::pearson_reference(
                        window_span(seq, t, omega), window_span(seq, i, omega));
                    if (std::isnan(want)) {
                        CHECK_FALSE(got.has_value());
                    } else {
                        REQUIRE(got.has_value());
                        CHECK(std::abs(*got - want) <= 1e-12);
                    }
                }
            }
        }
    }

    TEST_CASE("cached correlations are bit-identical to uncached ones") {
        const MarketSequence seq = generate(support::kelly_spec(7), 80);
        for (const int omega : {1, 2, 3}) {
            const WindowStatsCache cache(seq, omega);
            for (int t = omega + 2; t <= seq.size() + 1; ++t) {
                for (int i = omega + 1; i < t; ++i) {
                    const double cached = pearson_cached(seq, cache, t, i);
                    const auto plain = pearson(window_span(seq, t, omega),
                                               window_span(seq, i, omega));
                    if (plain.has_value()) {
                        CHECK(cached == *plain);  // exact: same kernels, same order
                    } else {
                        CHECK(std::isnan(cached));
                    }
                }
            }
        }
    }

    TEST_CASE("undefined correlations are dropped from the candidate list") {
        // Constant periods make every omega=1 window zero-variance in one spot.
        const MarketSequence seq({"x", "y"},
                                 {1.0, 1.0, 2.0, 0.5, 1.0, 1.0, 0.5, 2.0, 2.0, 0.5});
        const auto rs = match_correlations(seq, 6, 1);
        // Candidates are 2..5; windows are periods 1..4. Period 1 (1,1) and
        // period 3 (1,1) are constant, so candidates 2 and 4 are undefined.
        // The target window is period 5 = (2,0.5), fine.
        std::set<int> seen;
        for (const auto& mc : rs) seen.insert(mc.period);
        CHECK(seen == std::set<int>{3, 5});
    }

    TEST_CASE("alternating market match sets by hand") {
        const MarketSequence seq = support::alternating(12);
        // omega=1: window before t is period t-1. Candidates i share the
        // window value exactly when i and t have the same parity.
        CHECK(match_set(seq, 10, 1, 0.5) == std::vector<int>{2, 4, 6, 8});
        CHECK(match_set(seq, 9, 1, 0.5) == std::vector<int>{3, 5, 7});
        // Perfectly anticorrelated windows survive only at rho = -1.
        CHECK(match_set(seq, 10, 1, -1.0) == std::vector<int>{2, 3, 4, 5, 6, 7, 8, 9});
    }

    TEST_CASE("match rule equals the plain-loop reference") {
        const MarketSequence seq = generate(support::sticky_spec(11), 120);
        // Thresholds chosen away from any achievable correlation so float
        // noise cannot flip membership between the two implementations.
        for (const int omega : {1, 2, 3}) {
            for (const double rho : {-0.55, -0.15, 0.05, 0.35, 0.75}) {
                for (const int t : {omega + 2, 30, 77, seq.size(), seq.size() + 1}) {
                    CHECK(match_set(seq, t, omega, rho) ==
                          oracles::match_reference(seq, t, omega, rho));
                }
            }
        }
    }

    TEST_CASE("raising the threshold shrinks the match set") {
        const MarketSequence seq = generate(support::kelly_spec(3), 150);
        const std::vector<double> levels{-1.0, -0.6, -0.2, 0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
        for (const int omega : {1, 2}) {
            for (const int t : {40, 90, 151}) {
                std::vector<int> prev = match_set(seq, t, omega, levels.front());
                for (std::size_t k = 1; k < levels.size(); ++k) {
                    const std::vector<int> cur = match_set(seq, t, omega, levels[k]);
                    CHECK(std::includes(prev.begin(), prev.end(), cur.begin(), cur.end()));
                    prev = cur;
                }
            }
        }
        CHECK_THROWS_AS(match_set(seq, 40, 1, 1.5), InvalidSpec);
        CHECK_THROWS_AS(match_set(seq, 40, 1, -1.5), InvalidSpec);
    }

    TEST_CASE("distance rule equals correlation rule on variance-equalized windows") {
        // Build windows sharing entry mean 1.0 and population variance 4e-4,
        // then compare the raw-window predicates directly.
        std::mt19937_64 gen(2024);
        std::uniform_real_distribution<double> unif(-1.0, 1.0);
        const int len = 8;
        int checked = 0;
        for (int rep = 0; rep < 200; ++rep) {
            std::vector<double> s(len), w(len);
            for (auto& x : s) x = unif(gen);
            for (auto& x : w) x = unif(gen);
            s = normalize_to(std::move(s), 1.0, 4e-4);
            w = normalize_to(std::move(w), 1.0, 4e-4);
            for (double rho = 0.0; rho < 0.95; rho += 0.1) {
                const auto r = pearson(w, s);
                REQUIRE(r.has_value());
                if (std::abs(*r - rho) < 1e-9) continue;  // knife edge, skip
                CHECK(distance_match(w, s, rho) == (*r >= rho));
                ++checked;
            }
        }
        CHECK(checked >= 1900);
    }

    TEST_CASE("distance selection tracks correlation selection on calibrated noise") {
        // Windows over this market have nearly equal mean and variance, so the
        // two rules should rarely disagree even without exact normalization.
        SyntheticMarketSpec spec;
        spec.kind = MarketKind::iid_discrete;
        spec.regimes = {{{MarketVector{{1.02, 0.98}}, 0.4},
                         {MarketVector{{0.98, 1.02}}, 0.4},
                         {MarketVector{{1.01, 0.99}}, 0.2}}};
        spec.seed = 4242;
        const MarketSequence seq = generate(spec, 120);
        int sym_diff = 0;
        int union_size = 0;
        for (const int t : {40, 80, 121}) {
            for (const double rho : {0.0, 0.2, 0.4}) {
                const auto by_corr = match_set(seq, t, 2, rho);
                const auto by_dist = distance_match_set(seq, t, 2, rho);
                std::vector<int> diff;
                std::set_symmetric_difference(by_corr.begin(), by_corr.end(),
                                              by_dist.begin(), by_dist.end(),
                                              std::back_inserter(diff));
                std::vector<int> uni;
                std::set_union(by_corr.begin(), by_corr.end(), by_dist.begin(),
                               by_dist.end(), std::back_inserter(uni));
                sym_diff += static_cast<int>(diff.size());
                union_size += static_cast<int>(uni.size());
            }
        }
        REQUIRE(union_size > 0);
        CHECK(static_cast<double>(sym_diff) / static_cast<double>(union_size) <= 0.2);
    }

    TEST_CASE("matched history becomes a uniform measure, empty history holds cash") {
        const MarketSequence seq = support::alternating(12);
        const DiscreteMeasure m = empirical_measure_weights(seq, 10, 1, 0.5);
        // Matches {2,4,6,8} -> next vectors at those periods, weight 1/4 each.
        REQUIRE(m.size() == 4);
        for (const double w : m.weights) CHECK(w == 0.25);
        for (const auto& a : m.atoms) CHECK(a == seq.vector_at(2));

        // rho = 1 keeps only exactly-repeating windows; at t = omega+1 there
        // are no candidates at all, so the fallback fires.
        const DiscreteMeasure fallback = empirical_measure_weights(seq, 2, 1, 0.5);
        REQUIRE(fallback.size() == 1);
        CHECK(fallback.weights[0] == 1.0);
        CHECK(fallback.atoms[0] == MarketVector{{1.0, 1.0}});
    }
}
