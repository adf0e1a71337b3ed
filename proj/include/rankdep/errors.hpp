#pragma once

#include <stdexcept>
#include <string>

namespace rankdep {

/// Precondition violated by the caller (bad rank, malformed permutation, ...).
struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Exhaustive routine asked to run beyond its enumeration guard.
struct SizeError : std::length_error {
    using std::length_error::length_error;
};

/// Closed-form and structural results disagree; indicates a bug, not bad input.
struct InconsistencyError : std::logic_error {
    using std::logic_error::logic_error;
};

/// Malformed input file. `row` is 1-based (header = row 1), 0 when not row-specific.
struct DataError : std::runtime_error {
    DataError(const std::string& what, std::size_t row = 0)
        : std::runtime_error(row ? what + " (row " + std::to_string(row) + ")" : what), row{row} {}
    std::size_t row;
};

}  // namespace rankdep
