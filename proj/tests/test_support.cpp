#include "test_support.hpp"

#include <fstream>
#include <sstream>

namespace support {

corn::MarketSequence alternating(int n) {
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(n) * 2);
    for (int t = 0; t < n; ++t) {
        if (t % 2 == 0) {
            flat.insert(flat.end(), {2.0, 0.5});
        } else {
            flat.insert(flat.end(), {0.5, 2.0});
        }
    }
    return corn::MarketSequence({"a", "b"}, std::move(flat));
}

corn::SyntheticMarketSpec kelly_spec(std::uint64_t seed) {
    corn::SyntheticMarketSpec spec;
    spec.kind = corn::MarketKind::iid_discrete;
    spec.regimes = {{corn::Outcome{corn::MarketVector{{1.0, 2.0}}, 0.6},
                     corn::Outcome{corn::MarketVector{{1.0, 0.5}}, 0.4}}};
    spec.seed = seed;
    return spec;
}

corn::SyntheticMarketSpec alternating_spec(std::uint64_t seed) {
    corn::SyntheticMarketSpec spec;
    spec.kind = corn::MarketKind::markov_regime;
    spec.regimes = {{corn::Outcome{corn::MarketVector{{2.0, 0.5}}, 1.0}},
                    {corn::Outcome{corn::MarketVector{{0.5, 2.0}}, 1.0}}};
    spec.transition = {{0.0, 1.0}, {1.0, 0.0}};
    spec.seed = seed;
    return spec;
}

corn::SyntheticMarketSpec sticky_spec(std::uint64_t seed) {
    corn::SyntheticMarketSpec spec;
    spec.kind = corn::MarketKind::markov_regime;
    spec.regimes = {{corn::Outcome{corn::MarketVector{{1.0, 1.25}}, 1.0}},
                    {corn::Outcome{corn::MarketVector{{1.0, 0.8}}, 1.0}}};
    spec.transition = {{0.9, 0.1}, {0.1, 0.9}};
    spec.seed = seed;
    return spec;
}

std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("corn_tests_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream f(p, std::ios::binary);
    f << content;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace support
