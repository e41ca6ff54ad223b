#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "corn/errors.hpp"

namespace corn {

/// One period's relative-price vector: component j is asset j's price at the
/// end of the period divided by its price at the start. Components are
/// dimensionless, strictly positive and finite.
struct MarketVector {
    std::vector<double> values;

    int dim() const { return static_cast<int>(values.size()); }
    bool operator==(const MarketVector&) const = default;
};

/// Throws InvalidSpec unless every component is strictly positive and finite
/// and the dimension is at least 2.
void validate_market_vector(std::span<const double> v);

/// Immutable sequence of relative-price vectors over d >= 2 assets.
/// Periods are numbered 1..n everywhere in this library; the window that
/// informs the decision for period t covers periods t-omega..t-1.
class MarketSequence {
public:
    MarketSequence(std::vector<std::string> asset_names, std::vector<double> flat_row_major);

    int size() const { return n_; }
    int dim() const { return d_; }
    const std::vector<std::string>& asset_names() const { return names_; }

    std::span<const double> period(int t) const;  // 1-based, t in [1, n]
    MarketVector vector_at(int t) const;
    std::span<const double> flat() const { return data_; }

    /// Each period mapped to the id of its distinct value vector, ids assigned
    /// in first-occurrence order. Repeated outcomes (discrete markets) pool to
    /// the same id; on continuous data every period gets its own id.
    int atom_id(int t) const { return atom_ids_[static_cast<std::size_t>(t) - 1]; }
    int distinct_count() const { return static_cast<int>(first_occurrence_.size()); }
    std::span<const double> distinct_atom(int id) const;

private:
    int n_ = 0;
    int d_ = 0;
    std::vector<std::string> names_;
    std::vector<double> data_;
    std::vector<int> atom_ids_;         // per period, 0-based ids
    std::vector<int> first_occurrence_; // id -> first period (1-based) with that value
};

enum class MarketKind { iid_discrete, markov_regime };

/// One possible outcome of a regime together with its probability.
struct Outcome {
    MarketVector value;
    double prob = 0.0;
};

/// Synthetic stationary ergodic market with known structure. iid_discrete has
/// exactly one regime; markov_regime evolves over regimes by a row-stochastic
/// transition matrix, emitting one outcome per period from the current regime.
struct SyntheticMarketSpec {
    MarketKind kind = MarketKind::iid_discrete;
    std::vector<std::vector<Outcome>> regimes;
    std::vector<std::vector<double>> transition;  // markov_regime only
    std::uint64_t seed = 0;

    int dim() const;
};

/// Throws InvalidSpec if outcome probabilities or transition rows do not sum
/// to 1 within 1e-12, or any structural requirement fails.
void validate_spec(const SyntheticMarketSpec& spec);

/// Reads a relative-price CSV: header row of asset names, then one row of d
/// positive decimals per period. Throws EmptyFile, MalformedRow,
/// NonPositivePrice.
MarketSequence load_csv(const std::string& path);

/// Converts a raw price sequence (n+1 rows) into n relative-price periods,
/// dividing each row by its predecessor.
MarketSequence prices_to_relatives(const MarketSequence& prices);

/// Draws n periods from the spec. Deterministic function of (spec, n): the
/// generator is mt19937_64 seeded with spec.seed, uniforms are
/// (x >> 11) * 2^-53, outcomes are drawn by CDF inversion in listed order, and
/// markov runs consume one extra uniform per period for the regime transition.
MarketSequence generate(const SyntheticMarketSpec& spec, int n);

/// Fraction of periods whose vector matches `outcome` within component-wise
/// tolerance tol.
double empirical_frequency(const MarketSequence& seq, const MarketVector& outcome, double tol);

}  // namespace corn
