#pragma once

#include <stdexcept>
#include <string>

namespace levy {

/// Invalid input: a measure, triplet, cutoff or run configuration that breaks
/// an invariant. The message names the offending key or field.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The cutoff interval contains every jump, so there is no big-jump walk.
class ZeroBigJumpRate : public ConfigError {
public:
    ZeroBigJumpRate() : ConfigError("cutoff interval swallows every jump: Pi(I^c) = 0") {}
};

/// Quadrature or another numerical routine failed to reach its tolerance.
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& what, double lo, double hi)
        : std::runtime_error(what + " on [" + std::to_string(lo) + ", " + std::to_string(hi) + "]"),
          lo_(lo), hi_(hi) {}

    [[nodiscard]] double lo() const noexcept { return lo_; }
    [[nodiscard]] double hi() const noexcept { return hi_; }

private:
    double lo_;
    double hi_;
};

/// No two-sided exit happened before the configured time cap.
class HorizonExceeded : public std::runtime_error {
public:
    explicit HorizonExceeded(double cap)
        : std::runtime_error("no exit before time cap " + std::to_string(cap)), cap_(cap) {}

    [[nodiscard]] double cap() const noexcept { return cap_; }

private:
    double cap_;
};

}  // namespace levy
