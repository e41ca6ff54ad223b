#include "corn/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "json.hpp"

#include "corn/backtest.hpp"
#include "corn/consistency.hpp"
#include "corn/logopt.hpp"
#include "corn/market.hpp"
#include "corn/similarity.hpp"
#include "corn/strategy.hpp"

namespace corn {

namespace {

// Shortest round-trippable decimal; also what keeps report files
// byte-identical across runs.
std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

struct Config {
    std::optional<SyntheticMarketSpec> spec;
    std::string csv;
    bool prices = false;

    int n = -1;
    PoolSpec pool;
    double tol = 1e-8;
    int jobs = 1;
    bool log2 = false;
    std::string out;
    double gap_threshold = 0.05;
    std::vector<std::uint64_t> seeds;
};

// Flag values; sentinels mark "not given" so config-file values survive.
struct Flags {
    std::string config, csv, out, pool;
    bool prices = false, log2 = false;
    int n = -1, jobs = -1;
    double tol = -1.0, gap_threshold = -1.0;
    std::vector<std::uint64_t> seeds;
};

SyntheticMarketSpec spec_from_json(const nlohmann::json& j) {
    SyntheticMarketSpec s;
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "iid_discrete") {
        s.kind = MarketKind::iid_discrete;
    } else if (kind == "markov_regime") {
        s.kind = MarketKind::markov_regime;
    } else {
        throw InvalidSpec("unknown market kind '" + kind + "'");
    }
    for (const auto& regime : j.at("regimes")) {
        std::vector<Outcome> outcomes;
        for (const auto& o : regime) {
            Outcome out;
            out.value.values = o.at("value").get<std::vector<double>>();
            out.prob = o.at("prob").get<double>();
            outcomes.push_back(std::move(out));
        }
        s.regimes.push_back(std::move(outcomes));
    }
    if (j.contains("transition")) {
        s.transition = j.at("transition").get<std::vector<std::vector<double>>>();
    }
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
    validate_spec(s);
    return s;
}

void apply_config_file(Config& c, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidSpec("cannot read config file '" + path + "'");
    const auto j = nlohmann::json::parse(in);
    if (j.contains("market")) c.spec = spec_from_json(j.at("market"));
    if (j.contains("csv")) c.csv = j.at("csv").get<std::string>();
    if (j.contains("prices")) c.prices = j.at("prices").get<bool>();
    if (j.contains("n")) c.n = j.at("n").get<int>();
    if (j.contains("pool")) {
        const auto& p = j.at("pool");
        if (p.contains("max_omega")) c.pool.max_omega = p.at("max_omega").get<int>();
        if (p.contains("rho_levels")) c.pool.rho_levels = p.at("rho_levels").get<int>();
    }
    if (j.contains("tol")) c.tol = j.at("tol").get<double>();
    if (j.contains("jobs")) c.jobs = j.at("jobs").get<int>();
    if (j.contains("log2")) c.log2 = j.at("log2").get<bool>();
    if (j.contains("out")) c.out = j.at("out").get<std::string>();
    if (j.contains("gap_threshold")) c.gap_threshold = j.at("gap_threshold").get<double>();
    if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
}

void parse_pool(const std::string& s, PoolSpec& pool) {
    int w = 0;
    int p = 0;
    char extra = 0;
    if (std::sscanf(s.c_str(), "%d,%d%c", &w, &p, &extra) != 2 || w < 1 || p < 1) {
        throw InvalidSpec("--pool wants W,P with positive integers, got '" + s + "'");
    }
    pool.max_omega = w;
    pool.rho_levels = p;
}

Config merge(const Flags& f) {
    Config c;
    if (!f.config.empty()) apply_config_file(c, f.config);
    if (!f.csv.empty()) c.csv = f.csv;
    if (f.prices) c.prices = true;
    if (f.log2) c.log2 = true;
    if (f.n >= 0) c.n = f.n;
    if (f.jobs >= 0) c.jobs = f.jobs;
    if (f.tol >= 0.0) c.tol = f.tol;
    if (f.gap_threshold >= 0.0) c.gap_threshold = f.gap_threshold;
    if (!f.out.empty()) c.out = f.out;
    if (!f.pool.empty()) parse_pool(f.pool, c.pool);
    if (!f.seeds.empty()) c.seeds = f.seeds;
    if (c.jobs < 1) throw InvalidSpec("--jobs must be >= 1");
    return c;
}

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream f(p);
    if (!f) throw Error("cannot write '" + p.string() + "'");
    return f;
}

MarketSequence make_sequence(const Config& c) {
    if (!c.csv.empty()) {
        if (c.spec) throw InvalidSpec("config gives both a csv and a synthetic market");
        MarketSequence m = load_csv(c.csv);
        return c.prices ? prices_to_relatives(m) : m;
    }
    if (!c.spec) throw InvalidSpec("no market: pass --csv or a config with a \"market\" entry");
    if (c.n < 1) throw InvalidSpec("synthetic markets need --n >= 1");
    return generate(*c.spec, c.n);
}

CornOptions options_of(const Config& c) {
    CornOptions o;
    o.tol = c.tol;
    o.mode = c.jobs >= 2 ? ExecMode::parallel : ExecMode::serial;
#ifdef _OPENMP
    if (c.jobs >= 2) omp_set_num_threads(c.jobs);
#endif
    return o;
}

void write_trajectory(const std::filesystem::path& p, const WealthTrajectory& tr) {
    auto f = open_out(p);
    f << "t,wealth,growth\n";
    for (int t = 1; t <= tr.periods(); ++t) {
        f << t << ',' << fmt(tr.wealth(t)) << ',' << fmt(tr.growth(t)) << '\n';
    }
}

int cmd_backtest(const Config& c) {
    if (!c.seeds.empty()) {
        if (c.seeds.size() > 1) throw InvalidSpec("backtest takes a single seed");
        if (!c.spec) throw InvalidSpec("--seed needs a synthetic market");
    }
    Config cfg = c;
    if (!c.seeds.empty()) cfg.spec->seed = c.seeds.front();

    const MarketSequence seq = make_sequence(cfg);
    const CornRun run = corn_run(seq, cfg.pool, options_of(cfg));
    const int n = seq.size();

    const auto ucrp = run_strategy(seq, crp(Portfolio::uniform(seq.dim())));
    const Portfolio bstar = bcrp_oracle(seq, cfg.tol);
    const auto bcrp_run = run_strategy(seq, crp(bstar));
    const int top_asset = best_asset(seq);
    WealthTrajectory top_tr;
    top_tr.logs.push_back(0.0);
    {
        double acc = 0.0;
        for (int t = 1; t <= n; ++t) {
            acc += std::log(seq.period(t)[static_cast<std::size_t>(top_asset)]);
            top_tr.logs.push_back(acc);
        }
    }

    // --log2 only rescales the printed growth numbers; files stay in nats.
    const double scale = cfg.log2 ? 1.0 / std::log(2.0) : 1.0;
    const char* unit = cfg.log2 ? "bits/period" : "nats/period";
    std::cout << "periods " << n << ", assets " << seq.dim() << ", experts "
              << run.experts.size() << "\n";
    std::cout << "mixture growth " << fmt(scale * run.mixture.final_growth()) << " " << unit
              << ", wealth " << fmt(run.mixture.wealth(n)) << "\n";
    std::cout << "best-expert guarantee " << fmt(scale * run.best_expert_bound(n)) << " "
              << unit << "\n";
    std::cout << "uniform-crp growth " << fmt(scale * ucrp.trajectory.final_growth()) << " "
              << unit << "\n";
    std::cout << "bcrp growth " << fmt(scale * bcrp_run.trajectory.final_growth()) << " "
              << unit << "\n";
    std::cout << "best asset " << seq.asset_names()[static_cast<std::size_t>(top_asset)]
              << ", growth " << fmt(scale * top_tr.growth(n)) << " " << unit << "\n";

    if (!cfg.out.empty()) {
        const std::filesystem::path dir(cfg.out);
        std::filesystem::create_directories(dir);

        write_trajectory(dir / "trajectory_mixture.csv", run.mixture);
        for (std::size_t e = 0; e < run.experts.size(); ++e) {
            write_trajectory(dir / ("trajectory_expert_" + std::to_string(e) + ".csv"),
                             run.expert_trajectories[e]);
        }
        write_trajectory(dir / "trajectory_ucrp.csv", ucrp.trajectory);
        write_trajectory(dir / "trajectory_bcrp.csv", bcrp_run.trajectory);
        write_trajectory(dir / "trajectory_best_asset.csv", top_tr);

        auto experts = open_out(dir / "experts.csv");
        experts << "expert,omega,rho,q,log_wealth,growth\n";
        for (std::size_t e = 0; e < run.experts.size(); ++e) {
            const auto& ep = run.experts[e];
            experts << e << ',' << ep.omega << ',' << fmt(ep.rho) << ',' << fmt(ep.q) << ','
                    << fmt(run.expert_trajectories[e].final_log_wealth()) << ','
                    << fmt(run.expert_trajectories[e].final_growth()) << '\n';
        }

        auto bcrp_f = open_out(dir / "bcrp.csv");
        bcrp_f << "asset,weight\n";
        for (int j = 0; j < seq.dim(); ++j) {
            bcrp_f << seq.asset_names()[static_cast<std::size_t>(j)] << ','
                   << fmt(bstar.weights[static_cast<std::size_t>(j)]) << '\n';
        }

        // Every computed number below is recomputable from the trajectory and
        // expert files; summary.csv holds no exclusive state.
        auto summary = open_out(dir / "summary.csv");
        summary << "key,value\n";
        summary << "periods," << n << '\n';
        summary << "assets," << seq.dim() << '\n';
        summary << "max_omega," << cfg.pool.max_omega << '\n';
        summary << "rho_levels," << cfg.pool.rho_levels << '\n';
        summary << "tol," << fmt(cfg.tol) << '\n';
        summary << "mixture_growth," << fmt(run.mixture.final_growth()) << '\n';
        summary << "mixture_wealth," << fmt(run.mixture.wealth(n)) << '\n';
        summary << "best_expert_bound," << fmt(run.best_expert_bound(n)) << '\n';
        summary << "ucrp_growth," << fmt(ucrp.trajectory.final_growth()) << '\n';
        summary << "bcrp_growth," << fmt(bcrp_run.trajectory.final_growth()) << '\n';
        summary << "best_asset," << seq.asset_names()[static_cast<std::size_t>(top_asset)]
                << '\n';
        summary << "best_asset_growth," << fmt(top_tr.growth(n)) << '\n';
    }
    return 0;
}

int cmd_consistency(const Config& c) {
    if (!c.csv.empty() || !c.spec) {
        throw InvalidSpec("consistency runs need a synthetic market with a known optimum");
    }
    if (c.n < 1000) {
        throw InvalidSpec("consistency verdicts need n >= 1000; got " + std::to_string(c.n));
    }
    std::vector<std::uint64_t> seeds = c.seeds;
    if (seeds.empty()) seeds.push_back(c.spec->seed);

    std::optional<std::filesystem::path> dir;
    if (!c.out.empty()) {
        dir = std::filesystem::path(c.out);
        std::filesystem::create_directories(*dir);
    }

    const double scale = c.log2 ? 1.0 / std::log(2.0) : 1.0;
    const char* unit = c.log2 ? "bits/period" : "nats/period";
    double max_gap = -std::numeric_limits<double>::infinity();
    for (const auto seed : seeds) {
        SyntheticMarketSpec spec = *c.spec;
        spec.seed = seed;
        const ConvergenceReport rep = convergence_experiment(spec, c.n, c.pool, options_of(c));
        std::cout << "seed " << seed << ": growth "
                  << fmt(scale * rep.checkpoints.back().growth) << " " << unit
                  << ", optimal rate " << fmt(scale * rep.w_star) << ", gap "
                  << fmt(scale * rep.final_gap()) << "\n";
        max_gap = std::max(max_gap, rep.final_gap());
        if (dir) {
            auto f = open_out(*dir / ("gaps_seed" + std::to_string(seed) + ".csv"));
            f << "checkpoint,W_t,w_star,gap,bound\n";
            for (const auto& cp : rep.checkpoints) {
                f << cp.t << ',' << fmt(cp.growth) << ',' << fmt(rep.w_star) << ','
                  << fmt(cp.gap) << ',' << fmt(cp.bound) << '\n';
            }
            auto ef = open_out(*dir / ("experts_seed" + std::to_string(seed) + ".csv"));
            ef << "expert,omega,rho,q,growth\n";
            for (std::size_t e = 0; e < rep.experts.size(); ++e) {
                ef << e << ',' << rep.experts[e].omega << ',' << fmt(rep.experts[e].rho) << ','
                   << fmt(rep.experts[e].q) << ',' << fmt(rep.expert_growth[e]) << '\n';
            }
        }
    }
    const bool pass = max_gap <= c.gap_threshold;
    std::cout << "verdict: " << (pass ? "PASS" : "FAIL") << " (max final gap " << fmt(max_gap)
              << (pass ? " <= " : " > ") << fmt(c.gap_threshold) << " nats/period)\n";
    return pass ? 0 : 3;
}

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

bool report(const char* name, bool ok, double ms) {
    std::cout << (ok ? "[ok]   " : "[FAIL] ") << name << " (" << fmt(ms) << " ms)\n";
    return ok;
}

bool selftest_solver() {
    const auto start = Clock::now();
    const std::vector<DiscreteMeasure> cases = {
        // double-or-half vs cash
        {{MarketVector{{1.0, 2.0}}, MarketVector{{1.0, 0.5}}}, {0.6, 0.4}},
        // three assets, no dominant one
        {{MarketVector{{1.1, 0.9, 1.0}}, MarketVector{{0.85, 1.2, 1.0}},
          MarketVector{{1.0, 1.0, 1.05}}},
         {0.5, 0.3, 0.2}},
        // single outcome: all-in the best asset
        {{MarketVector{{1.3, 0.7}}}, {1.0}},
        // degenerate: every portfolio is optimal
        {{MarketVector{{1.0, 1.0}}}, {1.0}},
    };
    bool ok = true;
    for (const auto& m : cases) {
        const Portfolio b = solve(m, 1e-10);
        const Portfolio ref = oracle_solve(m, m.dim() == 2 ? 1e-3 : 1e-2);
        const double got = log_wealth(m, b);
        const double want = log_wealth(m, ref);
        ok = ok && certify(m, b, 1e-10).optimal && got >= want - 1e-6;
    }
    return report("certified solves match the grid search", ok, ms_since(start));
}

bool selftest_match_rules() {
    const auto start = Clock::now();
    // Alternating market: all windows share entry mean and variance, the
    // regime where the correlation and distance selections provably agree.
    std::vector<double> flat;
    for (int t = 0; t < 40; ++t) {
        if (t % 2 == 0) {
            flat.insert(flat.end(), {2.0, 0.5});
        } else {
            flat.insert(flat.end(), {0.5, 2.0});
        }
    }
    const MarketSequence seq({"a", "b"}, flat);
    bool ok = true;
    for (int omega : {1, 2, 3}) {
        for (double rho : {0.0, 0.2, 0.4, 0.8}) {
            for (int t : {omega + 2, 17, 40}) {
                ok = ok && match_set(seq, t, omega, rho) == distance_match_set(seq, t, omega, rho);
            }
        }
    }
    return report("correlation and distance selections agree", ok, ms_since(start));
}

SyntheticMarketSpec selftest_spec() {
    SyntheticMarketSpec spec;
    spec.kind = MarketKind::markov_regime;
    spec.regimes = {
        {Outcome{MarketVector{{1.0, 1.25}}, 0.7}, Outcome{MarketVector{{1.0, 1.1}}, 0.3}},
        {Outcome{MarketVector{{1.0, 0.8}}, 0.6}, Outcome{MarketVector{{1.0, 0.9}}, 0.4}},
    };
    spec.transition = {{0.9, 0.1}, {0.2, 0.8}};
    spec.seed = 12;
    return spec;
}

bool selftest_generator() {
    const auto start = Clock::now();
    const auto spec = selftest_spec();
    const MarketSequence a = generate(spec, 500);
    const MarketSequence b = generate(spec, 500);
    bool ok = a.size() == b.size();
    for (int t = 1; ok && t <= a.size(); ++t) {
        ok = a.vector_at(t) == b.vector_at(t);
    }
    return report("generator is reproducible", ok, ms_since(start));
}

bool selftest_parallel() {
    const auto start = Clock::now();
    const MarketSequence seq = generate(selftest_spec(), 300);
    PoolSpec pool{2, 5};
    CornOptions serial;
    CornOptions parallel;
    parallel.mode = ExecMode::parallel;
    const CornRun a = corn_run(seq, pool, serial);
    const CornRun b = corn_run(seq, pool, parallel);
    bool ok = a.mixture.logs == b.mixture.logs;
    for (std::size_t e = 0; ok && e < a.expert_trajectories.size(); ++e) {
        ok = a.expert_trajectories[e].logs == b.expert_trajectories[e].logs;
    }
    return report("serial and parallel runs are bit-identical", ok, ms_since(start));
}

int cmd_selftest() {
    int passed = 0;
    int total = 0;
    for (bool ok : {selftest_solver(), selftest_match_rules(), selftest_generator(),
                    selftest_parallel()}) {
        ++total;
        passed += ok ? 1 : 0;
    }
    std::cout << "selftest: " << passed << "/" << total << " checks passed\n";
    return passed == total ? 0 : 3;
}

}  // namespace

int cli_run(const std::vector<std::string>& args) {
    CLI::App app{"correlation-driven nonparametric portfolio toolkit"};
    app.require_subcommand(1);

    Flags fl;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", fl.config, "JSON config file");
        sub->add_option("--n", fl.n, "periods to generate");
        sub->add_option("--pool", fl.pool, "expert grid W,P (window lengths x thresholds)");
        sub->add_option("--tol", fl.tol, "solver certificate tolerance");
        sub->add_option("--seed", fl.seeds, "generator seed(s), comma separated")
            ->delimiter(',');
        sub->add_option("--jobs", fl.jobs, "worker threads; >= 2 enables parallel scans");
        sub->add_flag("--log2", fl.log2, "print growth in bits/period instead of nats");
        sub->add_option("--out", fl.out, "directory for csv reports");
        return sub;
    };

    auto* bt = add_common(app.add_subcommand("backtest", "run the expert pool over a market"));
    bt->add_option("--csv", fl.csv, "relative-price csv (header, then one row per period)");
    bt->add_flag("--prices", fl.prices, "csv holds raw prices; convert to relatives");

    auto* cs = add_common(
        app.add_subcommand("consistency", "measure convergence to the optimal growth rate"));
    cs->add_option("--gap-threshold", fl.gap_threshold, "largest acceptable final gap");

    auto* st = app.add_subcommand("selftest", "cross-check the numerical kernels");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
        if (st->parsed()) return cmd_selftest();
        const Config cfg = merge(fl);
        if (bt->parsed()) return cmd_backtest(cfg);
        if (cs->parsed()) return cmd_consistency(cfg);
        return 1;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const InvalidSpec& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const NonIdentifiableRegimes& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: config: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace corn
