// SPDX-License-Identifier: Apache-2.0

#include "dstm/verify.hpp"

#include <cmath>
#include <sstream>

#include "dstm/channel.hpp"
#include "dstm/codec.hpp"
#include "dstm/rng.hpp"
#include "dstm/stbc.hpp"

namespace dstm {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(3);
    os << v;
    return os.str();
}

VerifyItem amicability_item(const std::string& name, const DispersionSet& set) {
    const AmicabilityReport rep = check_amicability(set, 1e-12);
    return {name, rep.pass, "max residual " + fmt(rep.max_residual)};
}

VerifyItem construction_item() {
    const DispersionSet code = mdc_map(alamouti_set());
    const SymbolVector ones(4, cplx(1.0, 0.0));
    const ComplexMat c = assemble(code, ones);

    ComplexMat expect(4, 4);
    const cplx j(0, 1);
    expect << 1.0 + j, -1.0 + j, 0, 0,
              1.0 + j, 1.0 - j, 0, 0,
              0, 0, 1.0 + j, -1.0 + j,
              0, 0, 1.0 + j, 1.0 - j;
    expect *= 0.5;

    const double err = (c - expect).cwiseAbs().maxCoeff();
    return {"construction: doubled Alamouti codeword", err <= 1e-12, "max entry error " + fmt(err)};
}

VerifyItem gram_item(const std::string& name, const DispersionSet& set, std::uint64_t seed) {
    Rng rng(seed);
    double worst_res = 0.0, worst_mismatch = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        SymbolVector s(set.k);
        for (auto& c : s) c = rng.cgaussian(1.0);
        const ComplexMat cw = assemble(set, s);
        const GramDecomposition dec = gram_decompose(cw, set.k);
        worst_res = std::max(worst_res, dec.residual);
        worst_mismatch = std::max({worst_mismatch, std::abs(dec.alpha - symbol_alpha(s)),
                                   std::abs(dec.beta - symbol_beta(s))});
    }
    const bool pass = worst_res < 1e-10 && worst_mismatch < 1e-9;
    return {name, pass,
            "residual " + fmt(worst_res) + ", alpha/beta mismatch " + fmt(worst_mismatch)};
}

VerifyItem closed_form_item() {
    const ConstellationSet ref = closed_form_m4();
    const ConstellationSet opt = optimize(4, 0.0, 4, 12, 20250607);
    double err = 0.0;
    for (std::size_t i = 0; i < ref.radii.size(); ++i)
        err = std::max(err, std::abs(ref.radii[i] - opt.radii[i]));
    return {"design: closed-form M=4 optimum recovered", err < 1e-6, "radius error " + fmt(err)};
}

VerifyItem diversity_item() {
    const int r = min_rank_all_pairs(mdc_map(alamouti_set()), closed_form_m4());
    return {"diversity: full rank over all M1 codeword pairs", r == 4, "min rank " + fmt(r)};
}

VerifyItem decoder_item() {
    const DispersionSet set = mdc_map(alamouti_set());
    const ConstellationSet m1 = closed_form_m4();
    const auto codebook = build_codebook(set, m1);

    Rng rng(0xdec0de);
    long mismatches = 0;
    for (int frame = 0; frame < 25; ++frame) {
        const ComplexMat h = draw_channel(2, 4, rng);
        const double nvar = 0.05;
        EncoderState enc = initial_encoder_state(4);
        const ComplexMat r0 = h * enc.x_prev + rng.cgaussian_mat(2, 4, nvar);
        DecoderState dec_a = initial_decoder_state(r0);
        DecoderState dec_b = initial_decoder_state(r0);
        for (int b = 0; b < 8; ++b) {
            std::vector<int> idx(4);
            for (int& i : idx) i = rng.uniform_int(4);
            const CodeMatrix u = make_code_matrix(set, symbols_from_indices(m1, idx));
            const EncodeResult step = encode_step(enc, u);
            enc = step.next;
            const ComplexMat r_t = h * step.x_t + rng.cgaussian_mat(2, 4, nvar);

            const SymbolDecode ss = decode_single_symbol(dec_a, r_t, set, m1);
            const ExhaustiveDecode ex = decode_exhaustive(dec_b, r_t, codebook);
            dec_a = ss.next;
            dec_b = ex.next;

            long flat = 0;
            for (int i = 0; i < 4; ++i) flat = flat * 4 + ss.indices[i];
            if (flat != ex.index) ++mismatches;
        }
    }
    return {"decoder: single-symbol equals exhaustive", mismatches == 0,
            fmt(mismatches) + " mismatched blocks of 200"};
}

std::vector<VerifyItem> constellation_items(const std::string& label, const ConstellationSet& set) {
    std::vector<VerifyItem> items;
    const CriteriaReport rep = check_criteria(set, 1e-9);
    items.push_back({label + ": quasi-unitary criterion (x*y = nu)",
                     rep.quasi_unitary_ok,
                     "max |x*y - nu| = " + fmt(rep.quasi_unitary_residual)});
    items.push_back({label + ": power criterion (mean |z|^2 = 1)", rep.power_ok,
                     "residual " + fmt(std::max(rep.power_residual, rep.radius_residual))});
    items.push_back({label + ": performance criterion (min metric > 0)",
                     rep.performance_ok && rep.distinct, "min metric " + fmt(rep.metric)});

    // Quasi-unitary compatibility with the 4Tx code: worst-case beta over
    // symbol placements in paired slots.
    double worst_beta = 0.0;
    for (const cplx& zk : set.points)
        for (const cplx& zl : set.points) {
            const double beta = 2.0 * (-zk.real() * zk.imag() + zl.real() * zl.imag());
            if (std::abs(beta) > std::abs(worst_beta)) worst_beta = beta;
        }
    items.push_back({label + ": code matrix quasi-unitary (beta = 0)",
                     std::abs(worst_beta) <= 1e-9, "worst beta = " + fmt(worst_beta)});
    return items;
}

}  // namespace

VerifyReport run_verification(const std::optional<ConstellationSet>& external,
                              const std::string& external_name) {
    VerifyReport rep;
    rep.items.push_back(amicability_item("amicability: Alamouti seed", alamouti_set()));
    rep.items.push_back(amicability_item("amicability: rate-3/4 4Tx seed", ostbc_rate34_4tx()));
    rep.items.push_back(construction_item());
    rep.items.push_back(gram_item("gram form: 4Tx doubled code", mdc_map(alamouti_set()), 11));
    rep.items.push_back(gram_item("gram form: 8Tx doubled code", mdc_map(ostbc_rate34_4tx()), 12));
    rep.items.push_back(closed_form_item());
    rep.items.push_back(diversity_item());
    rep.items.push_back(decoder_item());
    for (auto& item : constellation_items("builtin M1", closed_form_m4())) rep.items.push_back(item);
    if (external) {
        const std::string label = external_name.empty() ? "file" : external_name;
        for (auto& item : constellation_items(label, *external)) rep.items.push_back(item);
    }
    return rep;
}

}  // namespace dstm
