// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dstm/linalg.hpp"

namespace dstm {

/// A constellation of M points z_k = x_k + j y_k lying on L = M/2 concentric
/// circles, with every point on the hyperbola x*y = nu. Feasible sets satisfy
///   (i)  x_k * y_k = nu for all k,
///   (ii) mean(x_k^2 + y_k^2) = 1  (equivalently sum r_i^2 = L),
/// and are scored by the max-min metric of objective().
struct ConstellationSet {
    std::vector<cplx> points;
    double nu = 0.0;
    std::vector<double> radii;  // one radius per circle; values may repeat

    int size() const { return static_cast<int>(points.size()); }
};

/// The analytic optimum for M = 4, nu = 0: the pair {+r1, -r1} on the x-axis
/// and {+j r2, -j r2} on the y-axis with r1 = sqrt(1/3), r2 = sqrt(5/3).
ConstellationSet closed_form_m4();

/// Max-min design metric: min over ordered pairs k != l of
/// [(x_k - x_l)^2 - (y_k - y_l)^2]^n_t. For even n_t this is >= 0.
/// Throws DimensionError on singleton sets.
double objective(const ConstellationSet& set, int n_t);

/// The n_t-free core of the objective: min over pairs of |dx^2 - dy^2|.
double min_delta_metric(const ConstellationSet& set);

/// Numerical max-min design for general even M >= 4. Multi-start local search
/// over the squared radii (constrained to sum to L) with the branch choice on
/// each circle (which antipodal intersection pair it contributes) enumerated
/// exhaustively. Deterministic for fixed arguments; per-start streams are
/// derived from (seed, start index).
/// Throws InfeasibleDesignError when the hyperbola misses the circles
/// (requires nu < 1/2), ConfigError for invalid M / starts.
ConstellationSet optimize(int m, double nu, int n_t, int starts, std::uint64_t seed);

struct CriteriaReport {
    double quasi_unitary_residual = 0.0;  // max_k |x_k y_k - nu|
    double power_residual = 0.0;          // |mean |z|^2 - 1|
    double radius_residual = 0.0;         // |sum r_i^2 - L| when radii known
    double metric = 0.0;                  // min |dx^2 - dy^2| over pairs
    bool distinct = true;
    bool quasi_unitary_ok = false;
    bool power_ok = false;
    bool performance_ok = false;  // metric strictly positive

    bool all_ok() const { return quasi_unitary_ok && power_ok && performance_ok && distinct; }
};

/// Evaluate the three design criteria with measured residuals. Never throws;
/// failures are carried in the report.
CriteriaReport check_criteria(const ConstellationSet& set, double tol = 1e-9);

/// Square M-QAM scaled to the requested mean symbol power (baseline
/// constellations for the differential O-STBC comparison).
ConstellationSet square_qam(int m, double mean_power);

/// Plain-text format: header "M nu", then M lines "x y", 17 significant digits.
void write_constellation(std::ostream& os, const ConstellationSet& set);
void write_constellation_file(const std::string& path, const ConstellationSet& set);
ConstellationSet read_constellation(std::istream& is);
ConstellationSet read_constellation_file(const std::string& path);

}  // namespace dstm
