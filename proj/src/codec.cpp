// SPDX-License-Identifier: Apache-2.0

#include "dstm/codec.hpp"

#include <cmath>

#include "dstm/errors.hpp"
#include "dstm/rng.hpp"

namespace dstm {

EncoderState initial_encoder_state(int n_t) {
    return {ComplexMat::Identity(n_t, n_t), 1.0};
}

DecoderState initial_decoder_state(const ComplexMat& r0, bool genie) {
    return {r0, 1.0, genie};
}

CodeMatrix make_code_matrix(const DispersionSet& set, const SymbolVector& s) {
    CodeMatrix cm;
    cm.u = assemble(set, s);
    cm.a_sq = symbol_alpha(s) * set.gram_scale;
    if (cm.a_sq <= 0.0)
        throw QuasiUnitarityError("make_code_matrix: zero-energy symbol vector", 0.0);

    if (set.kind == CodeKind::mdc_qostbc) {
        const double beta = symbol_beta(s);
        if (std::abs(beta) > 1e-9)
            throw QuasiUnitarityError(
                "make_code_matrix: symbols violate the constant-x*y criterion, beta = " +
                    std::to_string(beta),
                beta);
    }

    const double res =
        (cm.u * cm.u.adjoint() - cm.a_sq * ComplexMat::Identity(set.n_t, set.n_t)).norm();
    if (res >= 1e-9)
        throw QuasiUnitarityError(
            "make_code_matrix: assembled matrix is not quasi-unitary (residual " +
                std::to_string(res) + ")",
            0.0);
    return cm;
}

EncodeResult encode_step(const EncoderState& state, const CodeMatrix& u) {
    if (state.a_prev_sq <= 0.0)
        throw ConfigError("encode_step: non-positive a_{t-1}^2");
    if (state.x_prev.cols() != u.u.rows())
        throw DimensionError("encode_step: dimension mismatch");
    EncodeResult out;
    out.x_t = state.x_prev * u.u / std::sqrt(state.a_prev_sq);
    out.next = {out.x_t, u.a_sq};
    return out;
}

double codeword_metric(const ComplexMat& r_prev, const ComplexMat& r_t, double a_prev_sq,
                       const CodeMatrix& u) {
    const double a = std::sqrt(a_prev_sq);
    const ComplexMat p = r_prev.adjoint() * r_prev;
    const double quad = (p * (u.u * u.u.adjoint())).real().trace() / a_prev_sq;
    const double lin = (r_t.adjoint() * r_prev * u.u).real().trace();
    return quad - 2.0 * lin / a;
}

double codeword_metric_reduced(const ComplexMat& r_prev, const ComplexMat& r_t, double a_prev_sq,
                               const CodeMatrix& u) {
    const double a = std::sqrt(a_prev_sq);
    const double quad = u.a_sq * r_prev.squaredNorm() / a_prev_sq;
    const double lin = (r_t.adjoint() * r_prev * u.u).real().trace();
    return quad - 2.0 * lin / a;
}

namespace {

double next_scale(const DecoderState& state, double decided_a_sq,
                  const std::optional<double>& true_a_sq) {
    if (state.genie) {
        if (!true_a_sq)
            throw ConfigError("decode: genie mode requires the true a_{t-1}^2");
        return *true_a_sq;
    }
    return decided_a_sq;
}

}  // namespace

ExhaustiveDecode decode_exhaustive(const DecoderState& state, const ComplexMat& r_t,
                                   const std::vector<CodeMatrix>& codebook,
                                   std::optional<double> true_a_sq) {
    if (codebook.empty()) throw ConfigError("decode_exhaustive: empty codebook");
    if (state.a_prev_sq_est <= 0.0)
        throw ConfigError("decode_exhaustive: non-positive scale estimate");

    ExhaustiveDecode out;
    double best = 0.0;
    for (std::size_t i = 0; i < codebook.size(); ++i) {
        const double m = codeword_metric(state.r_prev, r_t, state.a_prev_sq_est, codebook[i]);
        ++out.metric_evals;
        if (i == 0 || m < best) {
            best = m;
            out.index = static_cast<int>(i);
        }
    }
    out.next = state;
    out.next.r_prev = r_t;
    out.next.a_prev_sq_est = next_scale(state, codebook[out.index].a_sq, true_a_sq);
    return out;
}

SymbolDecode decode_single_symbol(const DecoderState& state, const ComplexMat& r_t,
                                  const DispersionSet& set, const ConstellationSet& constellation,
                                  std::optional<double> true_a_sq) {
    if (constellation.size() == 0) throw ConfigError("decode_single_symbol: empty constellation");
    if (state.a_prev_sq_est <= 0.0)
        throw ConfigError("decode_single_symbol: non-positive scale estimate");

    const double a_sq = state.a_prev_sq_est;
    const double a = std::sqrt(a_sq);
    // tr(R_{t-1}^H R_{t-1}) and Q = R_t^H R_{t-1}; each per-symbol metric is a
    // scalar function of them.
    const double p_tr = state.r_prev.squaredNorm();
    const ComplexMat q = r_t.adjoint() * state.r_prev;

    SymbolDecode out;
    out.indices.resize(set.k);
    SymbolVector decided(set.k);
    for (int i = 0; i < set.k; ++i) {
        const cplx ta = (q * set.a_mats[i]).trace();
        const cplx tb = (q * set.b_mats[i]).trace();
        int best_idx = 0;
        double best = 0.0;
        for (int c = 0; c < constellation.size(); ++c) {
            const cplx z = constellation.points[c];
            const double quad = std::norm(z) * set.gram_scale * p_tr / a_sq;
            const double lin = z.real() * ta.real() - z.imag() * tb.imag();
            const double m = quad - 2.0 * lin / a;
            ++out.metric_evals;
            if (c == 0 || m < best) {
                best = m;
                best_idx = c;
            }
        }
        out.indices[i] = best_idx;
        decided[i] = constellation.points[best_idx];
    }

    out.next = state;
    out.next.r_prev = r_t;
    out.next.a_prev_sq_est = next_scale(state, symbol_alpha(decided) * set.gram_scale, true_a_sq);
    return out;
}

std::vector<CodeMatrix> build_codebook(const DispersionSet& set,
                                       const ConstellationSet& constellation) {
    const int m = constellation.size();
    if (m < 1) throw ConfigError("build_codebook: empty constellation");
    double total_d = 1.0;
    for (int i = 0; i < set.k; ++i) total_d *= m;
    if (total_d > static_cast<double>(kEnumerationGuard))
        throw EnumerationGuardError("build_codebook: |M|^K = " + std::to_string(total_d) +
                                    " exceeds the guard");
    const long total = static_cast<long>(total_d);

    std::vector<CodeMatrix> book;
    book.reserve(total);
    std::vector<int> idx(set.k);
    for (long w = 0; w < total; ++w) {
        long rem = w;
        for (int i = set.k - 1; i >= 0; --i) {
            idx[i] = static_cast<int>(rem % m);
            rem /= m;
        }
        book.push_back(make_code_matrix(set, symbols_from_indices(constellation, idx)));
    }
    return book;
}

SymbolVector symbols_from_indices(const ConstellationSet& constellation,
                                  const std::vector<int>& indices) {
    SymbolVector s(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) s[i] = constellation.points[indices[i]];
    return s;
}

NoiseStats effective_noise_stats(std::size_t n_trials, double noise_var, const CodeMatrix& u,
                                 double a_prev_sq, std::uint64_t seed, int n_r) {
    if (a_prev_sq <= 0.0) throw ConfigError("effective_noise_stats: non-positive a^2");
    const int n_t = static_cast<int>(u.u.rows());
    const double a = std::sqrt(a_prev_sq);

    Rng rng(seed);
    double acc = 0.0;
    for (std::size_t t = 0; t < n_trials; ++t) {
        const ComplexMat n_prev = rng.cgaussian_mat(n_r, n_t, noise_var);
        const ComplexMat n_cur = rng.cgaussian_mat(n_r, n_t, noise_var);
        const ComplexMat eff = -n_prev * u.u / a + n_cur;
        acc += eff.squaredNorm() / (n_r * n_t);
    }

    NoiseStats stats;
    stats.empirical_var = n_trials ? acc / n_trials : 0.0;
    stats.analytic_var = noise_var * (1.0 + u.a_sq / a_prev_sq);
    return stats;
}

}  // namespace dstm
