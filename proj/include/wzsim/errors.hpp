#pragma once

#include <stdexcept>
#include <string>

namespace wzsim {

// Bad user-supplied value (negative time, non-divisor step count, ...).
class ArgumentError : public std::invalid_argument {
public:
    explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

// Objects that cannot be combined (space mismatch, grid mismatch, ...).
class StructuralError : public std::logic_error {
public:
    explicit StructuralError(const std::string& what) : std::logic_error(what) {}
};

// Numeric failure while integrating; carries the first bad time and the
// lattice seed of the offending path so studies can report (seed, t).
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& what, double time, unsigned long long seed)
        : std::runtime_error(what), time_(time), seed_(seed) {}

    double time() const { return time_; }
    unsigned long long seed() const { return seed_; }

private:
    double time_;
    unsigned long long seed_;
};

// Configuration / schema violation (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace wzsim
