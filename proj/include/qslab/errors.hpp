#pragma once

#include <stdexcept>
#include <string>

namespace qslab {

// Raised when certified intervals fail to separate within the precision
// budget.  For quadratic angles the exact comparison path makes this
// unreachable; for digit-stream and continued-fraction angles it signals
// that the caller should raise the budget.
struct PrecisionExhausted : std::runtime_error {
    explicit PrecisionExhausted(const std::string& what) : std::runtime_error(what) {}
};

struct WindowTooSmall : std::runtime_error {
    explicit WindowTooSmall(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyOverlap : std::runtime_error {
    explicit EmptyOverlap(const std::string& what) : std::runtime_error(what) {}
};

struct CoreNotAdmissible : std::runtime_error {
    explicit CoreNotAdmissible(const std::string& what) : std::runtime_error(what) {}
};

// Tower construction could not reach the requested quality; carries the
// value that was achievable so the caller can pick a better angle/height.
struct EpsilonUnreachable : std::runtime_error {
    double achieved;
    EpsilonUnreachable(const std::string& what, double achieved_)
        : std::runtime_error(what), achieved(achieved_) {}
};

struct ArcBudgetExceeded : std::runtime_error {
    explicit ArcBudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

struct PreimageFailed : std::runtime_error {
    explicit PreimageFailed(const std::string& what) : std::runtime_error(what) {}
};

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qslab
