// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dstm/constellation.hpp"
#include "dstm/linalg.hpp"

namespace dstm {

enum class CodeKind { ostbc, mdc_qostbc };

/// A linear space-time block code C = sum_i (c_i^R A_i + j c_i^I B_i) given by
/// K pairs of t_len x n_t dispersion matrices. For kind == ostbc the pairs
/// form an amicable orthogonal design with A_i A_i^H = gram_scale * I; for
/// kind == mdc_qostbc every codeword Gram has the two-block structure that
/// gram_decompose() recovers.
struct DispersionSet {
    CodeKind kind = CodeKind::ostbc;
    int n_t = 0;
    int t_len = 0;
    int k = 0;
    double gram_scale = 1.0;  // A_i A_i^H = gram_scale * I
    std::vector<ComplexMat> a_mats;
    std::vector<ComplexMat> b_mats;
};

using SymbolVector = std::vector<cplx>;

/// Alamouti 2x2 O-STBC, written so that A_1 = I (codeword [[c1,-c2*],[c2,c1*]]).
DispersionSet alamouti_set();

/// Square rate-3/4 O-STBC for four transmit antennas (A_1 = I convention).
DispersionSet ostbc_rate34_4tx();

/// Dispersion-matrix doubling that turns a K/2-symbol O-STBC for n_t/2
/// antennas into a K-symbol MDC-QOSTBC for n_t antennas, including the
/// 1/sqrt(K) power normalization. Rejects non-ostbc seeds.
DispersionSet mdc_map(const DispersionSet& seed);

/// C = sum_i (c_i^R A_i + j c_i^I B_i). Throws DimensionError on length mismatch.
ComplexMat assemble(const DispersionSet& set, const SymbolVector& s);

struct AmicabilityReport {
    bool pass = false;
    double scale = 0.0;         // the common c with A_i A_i^H = c I
    double max_residual = 0.0;  // worst violation across all three conditions
};

/// Verify the amicable-design conditions that make C C^H = (sum |c_i|^2) c I.
AmicabilityReport check_amicability(const DispersionSet& set, double tol = 1e-12);

struct GramDecomposition {
    double alpha = 0.0;
    double beta = 0.0;
    double residual = 0.0;  // Frobenius norm of the part outside the two-block form
};

/// Least-squares fit of C C^H to (alpha/K) I + (beta/K) [[0,I],[I,0]] for an
/// assembled MDC-QOSTBC codeword of the K-symbol code (the basis is
/// Frobenius-orthogonal, so the fit is exact projection). Throws
/// DimensionError for non-square input.
GramDecomposition gram_decompose(const ComplexMat& codeword, int k);

/// alpha = sum |c_i|^2 of the symbol vector.
double symbol_alpha(const SymbolVector& s);

/// beta = 2 sum_{i<=K/2} (-c_i^R c_i^I + c_{K/2+i}^R c_{K/2+i}^I); K must be even.
double symbol_beta(const SymbolVector& s);

inline constexpr long kEnumerationGuard = 100000;  // max |M|^K codewords for all-pairs ops

/// Minimum rank of U_k - U_l over all distinct codeword pairs, enumerating
/// every symbol assignment from the constellation. Throws
/// EnumerationGuardError past the guard and DimensionError when fewer than
/// two codewords exist.
int min_rank_all_pairs(const DispersionSet& set, const ConstellationSet& constellation);

/// Minimum over all distinct pairs of n_t * det((U_k-U_l)(U_k-U_l)^H)^(1/n_t),
/// by direct determinants. This is the oracle for the closed-form expression
/// in coding_gain_closed_form. Throws RankDeficiencyError when the minimizing
/// pair is rank deficient (reported distinctly from the enumeration guard).
double coding_gain_bruteforce(const DispersionSet& set, const ConstellationSet& constellation);

/// Closed form for MDC-QOSTBC codes: the minimum pairwise determinant equals
/// (1/K)^{n_t} * min_{k != l} |dx_kl^2 - dy_kl^2|^{n_t}, attained on
/// single-symbol differences, so the gain is (n_t/K) * min |dx^2 - dy^2|.
/// For O-STBC sets the analogous form uses the minimum squared Euclidean
/// distance. Validated against coding_gain_bruteforce in the test suite.
double coding_gain_closed_form(const DispersionSet& set, const ConstellationSet& constellation);

/// Plain-text dump: header fields, then one matrix per block as t_len rows of
/// "re im" pairs in row-major order (A_1..A_K then B_1..B_K).
std::string dump_dispersion(const DispersionSet& set);
void write_dispersion_file(const std::string& path, const DispersionSet& set);
DispersionSet parse_dispersion(std::istream& is);
DispersionSet parse_dispersion_file(const std::string& path);

}  // namespace dstm
