#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace polya {

/// Argument outside the mathematical domain of a closed form or kernel.
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// A coordinate left the admissible region during simulation.
struct TenabilityBreach : std::runtime_error {
    TenabilityBreach(const std::string& what, int coordinate, double time)
        : std::runtime_error(what), coordinate(coordinate), time(time) {}
    int coordinate;
    double time;
};

/// Coordinate sum was nonpositive, so no master-clock rate exists.
struct RateUnderflow : std::runtime_error {
    explicit RateUnderflow(const std::string& what) : std::runtime_error(what) {}
};

/// A trajectory failed; carries enough context to reproduce it.
struct SimulationError : std::runtime_error {
    SimulationError(const std::string& what, std::uint64_t trajectory_index,
                    std::uint64_t event_count)
        : std::runtime_error(what),
          trajectory_index(trajectory_index),
          event_count(event_count) {}
    std::uint64_t trajectory_index;
    std::uint64_t event_count;
};

/// Scenario text could not be parsed.
struct ParseError : std::runtime_error {
    ParseError(const std::string& what, int line, int column)
        : std::runtime_error(what + " (line " + std::to_string(line) + ", column " +
                             std::to_string(column) + ")"),
          line(line),
          column(column) {}
    int line;
    int column;
};

/// Parsed scenario violates a structural invariant.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

struct InsufficientSamples : std::runtime_error {
    explicit InsufficientSamples(const std::string& what) : std::runtime_error(what) {}
};

/// Requested a limit law for a scheme that has none.
struct NoLimitSpec : std::runtime_error {
    explicit NoLimitSpec(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace polya
