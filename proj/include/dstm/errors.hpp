// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace dstm {

/// Shape or length mismatch between operands.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// All-pairs enumeration would exceed the configured codeword guard.
struct EnumerationGuardError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A codeword difference was rank deficient where full rank is required.
struct RankDeficiencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Constellation design problem has no feasible point (e.g. hyperbola misses
/// every unit-power circle).
struct InfeasibleDesignError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Symbols produce a code matrix that is not quasi-unitary; carries the
/// offending off-block Gram coefficient.
struct QuasiUnitarityError : std::runtime_error {
    QuasiUnitarityError(const std::string& msg, double beta_value)
        : std::runtime_error(msg), beta(beta_value) {}
    double beta;
};

/// Invalid or unsupported simulation configuration.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// File parse or write failure.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace dstm
