#include <cmath>
#include <vector>

#include "doctest.h"

#include "corn/backtest.hpp"
#include "corn/market.hpp"
#include "corn/strategy.hpp"
#include "test_support.hpp"

using namespace corn;

TEST_SUITE("backtest") {

    TEST_CASE("trajectory accessors") {
        WealthTrajectory tr{{0.0, std::log(2.0), std::log(3.0)}};
        CHECK(tr.periods() == 2);
        CHECK(tr.log_wealth(0) == 0.0);
        CHECK(tr.wealth(1) == doctest::Approx(2.0).epsilon(1e-15));
        CHECK(tr.growth(2) == doctest::Approx(0.5 * std::log(3.0)).epsilon(1e-15));
        CHECK(tr.final_log_wealth() == std::log(3.0));
        CHECK(tr.final_growth() == tr.growth(2));
    }

    TEST_CASE("constant rebalancing wealth by hand") {
        const MarketSequence seq = support::alternating(4);
        const auto run = run_strategy(seq, crp(Portfolio{{0.5, 0.5}}), true);
        // Every period: 0.5*2 + 0.5*0.5 = 1.25.
        REQUIRE(run.trajectory.periods() == 4);
        for (int t = 1; t <= 4; ++t) {
            CHECK(run.trajectory.log_wealth(t) ==
                  doctest::Approx(t * std::log(1.25)).epsilon(1e-14));
        }
        REQUIRE(run.decisions.size() == 4);
        CHECK(run.decisions[2] == Portfolio{{0.5, 0.5}});

        // Holding only the first asset doubles and halves alternately.
        const auto first = run_strategy(seq, crp(Portfolio{{1.0, 0.0}}));
        CHECK(first.trajectory.final_log_wealth() == doctest::Approx(0.0).epsilon(1e-12));
    }

    TEST_CASE("cumulative logs are sums of per-period factors") {
        const MarketSequence seq = generate(support::sticky_spec(21), 500);
        const auto run = run_strategy(seq, crp(Portfolio{{0.3, 0.7}}));
        double acc = 0.0;
        for (int t = 1; t <= seq.size(); ++t) {
            const auto x = seq.period(t);
            acc += std::log(0.3 * x[0] + 0.7 * x[1]);
            CHECK(std::abs(run.trajectory.log_wealth(t) - acc) <= 1e-10 * t + 1e-12);
        }
    }

    TEST_CASE("strategies only read the past: prefix runs agree bitwise") {
        const MarketSequence full = generate(support::kelly_spec(13), 60);
        const int cut = 35;
        std::vector<double> head(full.flat().begin(),
                                 full.flat().begin() + cut * full.dim());
        const MarketSequence prefix(full.asset_names(), std::move(head));

        for (int t = 2; t <= cut; ++t) {
            const Portfolio on_full = expert_decide(full, t, 1, 0.2);
            const Portfolio on_prefix = expert_decide(prefix, t, 1, 0.2);
            CHECK(on_full == on_prefix);
        }

        const PoolSpec pool{2, 3};
        DecideFn mix_full = mixture_strategy(pool);
        DecideFn mix_prefix = mixture_strategy(pool);
        for (int t = 1; t <= cut; ++t) {
            CHECK(mix_full(full, t) == mix_prefix(prefix, t));
        }
    }

    TEST_CASE("rewriting the future leaves past decisions untouched") {
        const MarketSequence full = generate(support::kelly_spec(47), 60);
        const int cut = 30;
        std::vector<double> mutated(full.flat().begin(), full.flat().end());
        // Replace everything after the cut with a different market entirely.
        for (std::size_t i = static_cast<std::size_t>(cut * full.dim());
             i < mutated.size(); ++i) {
            mutated[i] = i % 2 == 0 ? 3.0 : 0.25;
        }
        const MarketSequence other(full.asset_names(), std::move(mutated));

        for (int t = 2; t <= cut; ++t) {
            CHECK(expert_decide(full, t, 2, 0.4) == expert_decide(other, t, 2, 0.4));
        }
        DecideFn mix_a = mixture_strategy(PoolSpec{2, 3});
        DecideFn mix_b = mixture_strategy(PoolSpec{2, 3});
        for (int t = 1; t <= cut; ++t) {
            CHECK(mix_a(full, t) == mix_b(other, t));
        }
    }

    TEST_CASE("invalid decisions are rejected with the offending period") {
        const MarketSequence seq = support::alternating(5);
        const DecideFn broken = [](const MarketSequence&, int t) {
            if (t == 3) return Portfolio{{0.9, 0.9}};
            return Portfolio::uniform(2);
        };
        try {
            run_strategy(seq, broken);
            CHECK(false);
        } catch (const InvalidPortfolio& e) {
            CHECK(e.period == 3);
        }

        const DecideFn wrong_dim = [](const MarketSequence&, int) {
            return Portfolio::uniform(3);
        };
        CHECK_THROWS_AS(run_strategy(seq, wrong_dim), InvalidPortfolio);
    }

    TEST_CASE("hindsight-optimal rebalancing dominates fixed portfolios") {
        const MarketSequence seq = generate(support::sticky_spec(8), 800);
        const Portfolio star = bcrp_oracle(seq);
        const double best = run_strategy(seq, crp(star)).trajectory.final_log_wealth();

        const double at_uniform =
            run_strategy(seq, crp(Portfolio::uniform(2))).trajectory.final_log_wealth();
        CHECK(best >= at_uniform - 1e-9);
        for (int j = 0; j < seq.dim(); ++j) {
            CHECK(best >= asset_log_wealth(seq, j) - 1e-9);
        }
    }

    TEST_CASE("hindsight optimum on the alternating market is the even split") {
        const MarketSequence seq = support::alternating(100);
        const Portfolio star = bcrp_oracle(seq, 1e-10);
        CHECK(std::abs(star.weights[0] - 0.5) <= 1e-5);
        const double growth =
            run_strategy(seq, crp(star)).trajectory.final_growth();
        CHECK(std::abs(growth - std::log(1.25)) <= 1e-9);
    }

    TEST_CASE("best asset maximizes final wealth, ties to the lowest index") {
        const MarketSequence seq({"a", "b"}, {1.0, 1.2, 1.0, 1.1, 1.0, 0.9});
        CHECK(best_asset(seq) == 1);
        CHECK(asset_log_wealth(seq, 1) ==
              doctest::Approx(std::log(1.2 * 1.1 * 0.9)).epsilon(1e-14));

        const MarketSequence tie = support::alternating(4);  // both end at 1.0
        CHECK(best_asset(tie) == 0);
    }

    TEST_CASE("realized measure is the uniform measure over the run") {
        const MarketSequence seq = support::alternating(7);
        const DiscreteMeasure m = realized_measure(seq);
        CHECK_NOTHROW(validate_measure(m));
        REQUIRE(m.size() == 7);
        for (const double w : m.weights) CHECK(w == doctest::Approx(1.0 / 7).epsilon(1e-15));
        CHECK(m.atoms[3] == seq.vector_at(4));
    }
}
