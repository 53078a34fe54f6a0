#pragma once

#include <stdexcept>
#include <string>

namespace katok {

// All domain errors derive from Error and carry a short machine-readable tag
// plus a human-readable hint.
class Error : public std::runtime_error {
public:
    Error(std::string tag, const std::string& what) : std::runtime_error(tag + ": " + what), tag_(std::move(tag)) {}
    const std::string& tag() const { return tag_; }

private:
    std::string tag_;
};

struct InversionUnavailableError : Error {
    explicit InversionUnavailableError(const std::string& w) : Error("inversion-unavailable", w) {}
};
struct NotHyperbolicError : Error {
    explicit NotHyperbolicError(const std::string& w) : Error("not-hyperbolic", w) {}
};
struct DegenerateCocycleError : Error {
    explicit DegenerateCocycleError(const std::string& w) : Error("degenerate-cocycle", w) {}
};
struct ZeroExponentError : Error {
    explicit ZeroExponentError(const std::string& w) : Error("zero-exponent", w) {}
};
struct SeriesDivergenceError : Error {
    explicit SeriesDivergenceError(const std::string& w) : Error("series-divergence", w) {}
};
struct ChartTooSmallError : Error {
    explicit ChartTooSmallError(const std::string& w) : Error("chart-too-small", w) {}
};
struct NotAGraphError : Error {
    explicit NotAGraphError(const std::string& w) : Error("not-a-graph", w) {}
};
struct CoverFailureError : Error {
    explicit CoverFailureError(const std::string& w) : Error("cover-failure", w) {}
};
struct SelectionFailureError : Error {
    explicit SelectionFailureError(const std::string& w) : Error("selection-failure", w) {}
};
struct TooFineError : Error {
    explicit TooFineError(const std::string& w) : Error("too-fine", w) {}
};
struct OutOfRangeError : Error {
    explicit OutOfRangeError(const std::string& w) : Error("out-of-range", w) {}
};
struct EmptyBallError : Error {
    explicit EmptyBallError(const std::string& w) : Error("empty-ball", w) {}
};
struct AllDroppedError : Error {
    explicit AllDroppedError(const std::string& w) : Error("all-dropped", w) {}
};
struct EmptyBucketsError : Error {
    explicit EmptyBucketsError(const std::string& w) : Error("empty-buckets", w) {}
};
struct EmptySelectionError : Error {
    explicit EmptySelectionError(const std::string& w) : Error("empty-selection", w) {}
};
struct InsufficientSymbolsError : Error {
    explicit InsufficientSymbolsError(const std::string& w) : Error("insufficient-symbols", w) {}
};
struct ComponentOverlapError : Error {
    explicit ComponentOverlapError(const std::string& w) : Error("component-overlap", w) {}
};
struct StageFailureError : Error {
    explicit StageFailureError(const std::string& w) : Error("stage-failure", w) {}
};
struct ConfigError : Error {
    explicit ConfigError(const std::string& w) : Error("config-error", w) {}
};
struct IoFailureError : Error {
    explicit IoFailureError(const std::string& w) : Error("io-failure", w) {}
};

}  // namespace katok
