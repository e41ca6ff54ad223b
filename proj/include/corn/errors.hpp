#pragma once

#include <stdexcept>
#include <string>

namespace corn {

// Base class for every error thrown by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// -- market ------------------------------------------------------------

struct EmptyFile : Error {
    explicit EmptyFile(const std::string& path)
        : Error("no data rows in '" + path + "'") {}
};

struct MalformedRow : Error {
    int line;
    MalformedRow(int line_, const std::string& what_)
        : Error("line " + std::to_string(line_) + ": " + what_), line(line_) {}
};

struct NonPositivePrice : Error {
    int line;
    int column;
    NonPositivePrice(int line_, int column_)
        : Error("line " + std::to_string(line_) + ", column " + std::to_string(column_) +
                ": relative price must be strictly positive and finite"),
          line(line_), column(column_) {}
};

struct InvalidSpec : Error {
    explicit InvalidSpec(const std::string& what_) : Error("invalid market spec: " + what_) {}
};

// -- similarity ---------------------------------------------------------

struct InsufficientHistory : Error {
    InsufficientHistory(int t, int omega)
        : Error("period " + std::to_string(t) + " has no full window of length " +
                std::to_string(omega) + " before it") {}
};

struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& what_) : Error(what_) {}
};

// -- logopt ---------------------------------------------------------------

struct NonPositiveWealth : Error {
    explicit NonPositiveWealth(double value)
        : Error("portfolio wealth factor " + std::to_string(value) +
                " is not strictly positive; inputs are corrupt") {}
};

struct DimensionTooLarge : Error {
    explicit DimensionTooLarge(int d)
        : Error("grid oracle supports at most 4 assets, got " + std::to_string(d)) {}
};

// -- backtest -------------------------------------------------------------

struct InvalidPortfolio : Error {
    int period;
    InvalidPortfolio(int period_, const std::string& what_)
        : Error("period " + std::to_string(period_) + ": " + what_), period(period_) {}
};

// -- consistency ------------------------------------------------------------

struct NonIdentifiableRegimes : Error {
    NonIdentifiableRegimes()
        : Error("regime outcome supports overlap; the one-step oracle needs "
                "distinct supports to read the regime off the last outcome") {}
};

}  // namespace corn
