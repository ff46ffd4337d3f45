// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dstm/constellation.hpp"
#include "dstm/linalg.hpp"
#include "dstm/stbc.hpp"

namespace dstm {

/// Quasi-unitary information matrix U with U U^H = a_sq * I.
struct CodeMatrix {
    ComplexMat u;
    double a_sq = 1.0;
};

struct EncoderState {
    ComplexMat x_prev;       // last transmitted codeword X_{t-1}
    double a_prev_sq = 1.0;  // a_{t-1}^2
};

/// Start of transmission: X_0 = I (unitary reference), a_0^2 = 1.
EncoderState initial_encoder_state(int n_t);

struct DecoderState {
    ComplexMat r_prev;           // R_{t-1}
    double a_prev_sq_est = 1.0;  // estimate of a_{t-1}^2 (exact in genie mode)
    bool genie = false;
};

DecoderState initial_decoder_state(const ComplexMat& r0, bool genie = false);

/// U = assemble(set, s) with a_sq = sum|c_i|^2 / K for MDC sets (gram_scale
/// generally). Verifies quasi-unitarity; throws QuasiUnitarityError carrying
/// the offending beta when the symbols break the two-block Gram (e.g. plain
/// QAM on an MDC code).
CodeMatrix make_code_matrix(const DispersionSet& set, const SymbolVector& s);

struct EncodeResult {
    ComplexMat x_t;
    EncoderState next;
};

/// X_t = X_{t-1} U / a_{t-1}. Throws DimensionError / ConfigError on invalid state.
EncodeResult encode_step(const EncoderState& state, const CodeMatrix& u);

/// Decision metric of the near-optimal differential decoder,
///   tr[a^{-2} R_{t-1}^H R_{t-1} U U^H - 2 a^{-1} Re(R_t^H R_{t-1} U)],
/// evaluated literally with U U^H.
double codeword_metric(const ComplexMat& r_prev, const ComplexMat& r_t, double a_prev_sq,
                       const CodeMatrix& u);

/// Same metric with U U^H replaced by its quasi-unitary value a_u^2 I. Equal
/// to codeword_metric for any quasi-unitary U; both kept so the identity can
/// be asserted.
double codeword_metric_reduced(const ComplexMat& r_prev, const ComplexMat& r_t, double a_prev_sq,
                               const CodeMatrix& u);

struct ExhaustiveDecode {
    int index = 0;
    DecoderState next;
    long metric_evals = 0;
};

/// Argmin of codeword_metric over the codebook (lowest index wins ties).
/// State update: r_prev := r_t, a_prev_sq_est := decided a_sq, or the true
/// value when the state is in genie mode (true_a_sq must then be supplied).
ExhaustiveDecode decode_exhaustive(const DecoderState& state, const ComplexMat& r_t,
                                   const std::vector<CodeMatrix>& codebook,
                                   std::optional<double> true_a_sq = std::nullopt);

struct SymbolDecode {
    std::vector<int> indices;  // decided constellation index per symbol slot
    DecoderState next;
    long metric_evals = 0;  // K * M by construction
};

/// Single-symbol decoder: each c_i is detected independently through the
/// per-slot reduction of the codeword metric. Valid for any dispersion set
/// whose codeword Gram is (sum_i |c_i|^2 gram_scale) I — MDC-QOSTBC with a
/// constant-x*y constellation, and any O-STBC.
SymbolDecode decode_single_symbol(const DecoderState& state, const ComplexMat& r_t,
                                  const DispersionSet& set, const ConstellationSet& constellation,
                                  std::optional<double> true_a_sq = std::nullopt);

/// All |M|^K code matrices in lexicographic symbol-index order (slot 0 most
/// significant), so exhaustive indices map back to per-slot indices.
std::vector<CodeMatrix> build_codebook(const DispersionSet& set,
                                       const ConstellationSet& constellation);

SymbolVector symbols_from_indices(const ConstellationSet& constellation,
                                  const std::vector<int>& indices);

struct NoiseStats {
    double empirical_var = 0.0;  // per complex entry of the effective noise
    double analytic_var = 0.0;   // noise_var * (1 + a_u^2 / a_prev_sq)
};

/// Monte Carlo check of the effective differential noise
/// N_eff = -N_{t-1} U / a_{t-1} + N_t; for unitary U and a = 1 the variance
/// doubles (the classic 3 dB differential penalty).
NoiseStats effective_noise_stats(std::size_t n_trials, double noise_var, const CodeMatrix& u,
                                 double a_prev_sq, std::uint64_t seed, int n_r = 1);

}  // namespace dstm
