#include "corn/market.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

namespace corn {

void validate_market_vector(std::span<const double> v) {
    if (v.size() < 2) {
        throw InvalidSpec("market vectors need at least 2 assets, got " +
                          std::to_string(v.size()));
    }
    for (double x : v) {
        if (!(x > 0.0) || !std::isfinite(x)) {
            throw InvalidSpec("market vector component " + std::to_string(x) +
                              " is not strictly positive and finite");
        }
    }
}

MarketSequence::MarketSequence(std::vector<std::string> asset_names,
                               std::vector<double> flat_row_major)
    : names_(std::move(asset_names)), data_(std::move(flat_row_major)) {
    d_ = static_cast<int>(names_.size());
    if (d_ < 2) throw InvalidSpec("a market needs at least 2 assets");
    if (data_.empty() || data_.size() % static_cast<std::size_t>(d_) != 0) {
        throw InvalidSpec("flat data length is not a positive multiple of the asset count");
    }
    n_ = static_cast<int>(data_.size() / static_cast<std::size_t>(d_));
    for (int t = 1; t <= n_; ++t) validate_market_vector(period(t));

    // Pool identical period vectors. Exact comparison is intentional: discrete
    // generators emit bit-identical copies, continuous data stays distinct.
    std::map<std::span<const double>, int, decltype([](std::span<const double> a,
                                                       std::span<const double> b) {
                 return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
             })>
        seen;
    atom_ids_.reserve(static_cast<std::size_t>(n_));
    for (int t = 1; t <= n_; ++t) {
        auto [it, inserted] = seen.emplace(period(t), static_cast<int>(first_occurrence_.size()));
        if (inserted) first_occurrence_.push_back(t);
        atom_ids_.push_back(it->second);
    }
}

std::span<const double> MarketSequence::period(int t) const {
    return std::span<const double>(data_).subspan(
        static_cast<std::size_t>(t - 1) * static_cast<std::size_t>(d_),
        static_cast<std::size_t>(d_));
}

MarketVector MarketSequence::vector_at(int t) const {
    auto p = period(t);
    return MarketVector{std::vector<double>(p.begin(), p.end())};
}

std::span<const double> MarketSequence::distinct_atom(int id) const {
    return period(first_occurrence_[static_cast<std::size_t>(id)]);
}

int SyntheticMarketSpec::dim() const {
    if (regimes.empty() || regimes.front().empty()) return 0;
    return regimes.front().front().value.dim();
}

void validate_spec(const SyntheticMarketSpec& spec) {
    if (spec.regimes.empty()) throw InvalidSpec("no regimes");
    if (spec.kind == MarketKind::iid_discrete && spec.regimes.size() != 1) {
        throw InvalidSpec("iid_discrete takes exactly one regime");
    }
    const int d = spec.dim();
    if (d < 2) throw InvalidSpec("outcomes need at least 2 assets");
    for (const auto& regime : spec.regimes) {
        if (regime.empty()) throw InvalidSpec("regime without outcomes");
        double total = 0.0;
        for (const auto& o : regime) {
            validate_market_vector(o.value.values);
            if (o.value.dim() != d) throw InvalidSpec("outcome dimensions differ across regimes");
            if (!(o.prob > 0.0)) throw InvalidSpec("outcome probabilities must be positive");
            total += o.prob;
        }
        if (std::abs(total - 1.0) > 1e-12) {
            throw InvalidSpec("regime outcome probabilities sum to " + std::to_string(total));
        }
    }
    if (spec.kind == MarketKind::markov_regime) {
        const std::size_t r = spec.regimes.size();
        if (spec.transition.size() != r) throw InvalidSpec("transition matrix is not R x R");
        for (const auto& row : spec.transition) {
            if (row.size() != r) throw InvalidSpec("transition matrix is not R x R");
            double total = 0.0;
            for (double p : row) {
                if (p < 0.0 || !std::isfinite(p)) throw InvalidSpec("negative transition entry");
                total += p;
            }
            if (std::abs(total - 1.0) > 1e-12) {
                throw InvalidSpec("transition row sums to " + std::to_string(total));
            }
        }
    } else if (!spec.transition.empty()) {
        throw InvalidSpec("iid_discrete takes no transition matrix");
    }
}

namespace {

// 53-bit uniform in [0,1); keeps generated sequences reproducible across
// standard libraries, unlike std::uniform_real_distribution.
double uniform53(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t draw_index(std::mt19937_64& rng, std::span<const double> probs) {
    const double u = uniform53(rng);
    double cum = 0.0;
    for (std::size_t k = 0; k + 1 < probs.size(); ++k) {
        cum += probs[k];
        if (u < cum) return k;
    }
    return probs.size() - 1;
}

}  // namespace

MarketSequence generate(const SyntheticMarketSpec& spec, int n) {
    validate_spec(spec);
    if (n < 1) throw InvalidSpec("period count must be >= 1");
    const int d = spec.dim();

    std::vector<std::vector<double>> outcome_probs;
    outcome_probs.reserve(spec.regimes.size());
    for (const auto& regime : spec.regimes) {
        std::vector<double> p;
        p.reserve(regime.size());
        for (const auto& o : regime) p.push_back(o.prob);
        outcome_probs.push_back(std::move(p));
    }

    std::mt19937_64 rng(spec.seed);
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(d));

    std::size_t regime = 0;  // markov runs start in the first listed regime
    for (int t = 0; t < n; ++t) {
        const auto& outcomes = spec.regimes[regime];
        const std::size_t k = draw_index(rng, outcome_probs[regime]);
        const auto& v = outcomes[k].value.values;
        flat.insert(flat.end(), v.begin(), v.end());
        if (spec.kind == MarketKind::markov_regime) {
            regime = draw_index(rng, spec.transition[regime]);
        }
    }

    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(d));
    for (int j = 1; j <= d; ++j) names.push_back("asset" + std::to_string(j));
    return MarketSequence(std::move(names), std::move(flat));
}

namespace {

std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

MarketSequence load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw EmptyFile(path);

    std::string line;
    int line_no = 0;
    std::vector<std::string> names;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        for (auto& f : split_csv_row(line)) names.push_back(trim(f));
        break;
    }
    if (names.empty()) throw EmptyFile(path);
    if (names.size() < 2) throw MalformedRow(line_no, "header needs at least 2 asset names");
    const int d = static_cast<int>(names.size());

    std::vector<double> flat;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_row(line);
        if (static_cast<int>(fields.size()) != d) {
            throw MalformedRow(line_no, "expected " + std::to_string(d) + " columns, got " +
                                            std::to_string(fields.size()));
        }
        for (int j = 0; j < d; ++j) {
            const std::string f = trim(fields[static_cast<std::size_t>(j)]);
            char* end = nullptr;
            const double x = std::strtod(f.c_str(), &end);
            if (f.empty() || end != f.c_str() + f.size() || !std::isfinite(x)) {
                throw MalformedRow(line_no, "column " + std::to_string(j + 1) +
                                                ": '" + f + "' is not a finite decimal");
            }
            if (!(x > 0.0)) throw NonPositivePrice(line_no, j + 1);
            flat.push_back(x);
        }
    }
    if (flat.empty()) throw EmptyFile(path);
    return MarketSequence(std::move(names), std::move(flat));
}

MarketSequence prices_to_relatives(const MarketSequence& prices) {
    if (prices.size() < 2) throw EmptyFile("raw price data needs at least 2 rows");
    const int d = prices.dim();
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(prices.size() - 1) * static_cast<std::size_t>(d));
    for (int t = 2; t <= prices.size(); ++t) {
        const auto now = prices.period(t);
        const auto before = prices.period(t - 1);
        for (int j = 0; j < d; ++j) flat.push_back(now[j] / before[j]);
    }
    return MarketSequence(prices.asset_names(), std::move(flat));
}

double empirical_frequency(const MarketSequence& seq, const MarketVector& outcome, double tol) {
    if (outcome.dim() != seq.dim()) {
        throw DimensionMismatch("outcome has " + std::to_string(outcome.dim()) +
                                " assets, sequence has " + std::to_string(seq.dim()));
    }
    int hits = 0;
    for (int t = 1; t <= seq.size(); ++t) {
        const auto p = seq.period(t);
        bool match = true;
        for (int j = 0; j < seq.dim(); ++j) {
            if (std::abs(p[j] - outcome.values[static_cast<std::size_t>(j)]) > tol) {
                match = false;
                break;
            }
        }
        hits += match ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(seq.size());
}

}  // namespace corn
