// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dstm/channel.hpp"
#include "dstm/codec.hpp"
#include "dstm/errors.hpp"
#include "dstm/rng.hpp"

using namespace dstm;

namespace {

std::vector<int> random_indices(int k, int m, Rng& rng) {
    std::vector<int> idx(k);
    for (int& i : idx) i = rng.uniform_int(m);
    return idx;
}

long flatten(const std::vector<int>& idx, int m) {
    long f = 0;
    for (int i : idx) f = f * m + i;
    return f;
}

}  // namespace

TEST_CASE("code matrix scales") {
    const DispersionSet code = mdc_map(alamouti_set());
    const ConstellationSet m1 = closed_form_m4();
    const double r1 = m1.radii[0], r2 = m1.radii[1];

    CHECK(make_code_matrix(code, SymbolVector(4, cplx(r1, 0))).a_sq ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(make_code_matrix(code, SymbolVector(4, cplx(0, r2))).a_sq ==
          doctest::Approx(5.0 / 3.0).epsilon(1e-12));

    SUBCASE("plain QAM symbols are rejected with the offending beta") {
        try {
            make_code_matrix(code, {cplx(1, 1), 0, 0, 0});
            FAIL("expected QuasiUnitarityError");
        } catch (const QuasiUnitarityError& e) {
            CHECK(e.beta == doctest::Approx(-2.0));
        }
    }

    SUBCASE("O-STBC accepts any symbols") {
        const CodeMatrix u = make_code_matrix(ostbc_rate34_4tx(), {cplx(1, 1), cplx(0.3, -2), 0});
        CHECK(u.a_sq == doctest::Approx(2.0 + 4.09).epsilon(1e-12));
    }
}

TEST_CASE("differential encoding") {
    const DispersionSet ostbc = ostbc_rate34_4tx();

    SUBCASE("identity reference: X_1 = U") {
        const CodeMatrix u = make_code_matrix(ostbc, {cplx(0, 1), 0, 0});  // unitary, a^2 = 1
        EncoderState st = initial_encoder_state(4);
        const EncodeResult r = encode_step(st, u);
        CHECK(approx_equal(r.x_t, u.u, 1e-15));
        CHECK(r.next.a_prev_sq == doctest::Approx(1.0));
    }

    SUBCASE("chains of unitary code matrices stay unitary") {
        Rng rng(3);
        EncoderState st = initial_encoder_state(4);
        const double mag = 1.0 / std::sqrt(3.0);  // alpha = K |c|^2 = 1  =>  a^2 = 1
        for (int t = 0; t < 25; ++t) {
            SymbolVector s(3);
            for (auto& c : s) {
                const double ang = 6.283185307179586 * rng.uniform();
                c = cplx(mag * std::cos(ang), mag * std::sin(ang));
            }
            const EncodeResult r = encode_step(st, make_code_matrix(ostbc, s));
            st = r.next;
            CHECK((r.x_t * r.x_t.adjoint() - identity(4)).norm() < 1e-9);
        }
    }

    SUBCASE("long-run transmit power settles at one") {
        const DispersionSet code = mdc_map(alamouti_set());
        const ConstellationSet m1 = closed_form_m4();
        Rng rng(17);
        EncoderState st = initial_encoder_state(4);
        double acc = 0.0;
        const int n = 20000;
        for (int t = 0; t < n; ++t) {
            const auto idx = random_indices(4, 4, rng);
            const EncodeResult r =
                encode_step(st, make_code_matrix(code, symbols_from_indices(m1, idx)));
            st = r.next;
            acc += r.x_t.squaredNorm() / 4.0;
        }
        CHECK(acc / n == doctest::Approx(1.0).epsilon(0.02));
    }

    SUBCASE("invalid state rejected") {
        EncoderState st = initial_encoder_state(4);
        st.a_prev_sq = 0.0;
        CHECK_THROWS_AS(encode_step(st, make_code_matrix(ostbc, {cplx(1, 0), 0, 0})), ConfigError);
    }
}

TEST_CASE("scalar decoder metric by hand") {
    // 1x1 system, R_0 = 1, R_1 = 2, a = 1, codebook {2, -1}:
    // metric(2) = 4 - 8 = -4, metric(-1) = 1 + 4 = 5.
    ComplexMat r0(1, 1), r1(1, 1);
    r0 << cplx(1, 0);
    r1 << cplx(2, 0);
    CodeMatrix two{ComplexMat(1, 1), 4.0};
    two.u << cplx(2, 0);
    CodeMatrix minus_one{ComplexMat(1, 1), 1.0};
    minus_one.u << cplx(-1, 0);

    CHECK(codeword_metric(r0, r1, 1.0, two) == doctest::Approx(-4.0));
    CHECK(codeword_metric(r0, r1, 1.0, minus_one) == doctest::Approx(5.0));

    const DecoderState st = initial_decoder_state(r0);
    const ExhaustiveDecode d = decode_exhaustive(st, r1, {two, minus_one});
    CHECK(d.index == 0);
    CHECK(d.next.a_prev_sq_est == doctest::Approx(4.0));
}

TEST_CASE("noiseless round trips are exact") {
    const DispersionSet code = mdc_map(alamouti_set());
    const ConstellationSet m1 = closed_form_m4();
    Rng rng(23);
    const ComplexMat h = draw_channel(2, 4, rng);

    EncoderState enc = initial_encoder_state(4);
    DecoderState dec = initial_decoder_state(h * enc.x_prev);
    for (int t = 0; t < 40; ++t) {
        const auto idx = random_indices(4, 4, rng);
        const EncodeResult step =
            encode_step(enc, make_code_matrix(code, symbols_from_indices(m1, idx)));
        enc = step.next;
        const SymbolDecode out = decode_single_symbol(dec, h * step.x_t, code, m1);
        dec = out.next;
        CHECK(out.indices == idx);
    }
}

TEST_CASE("single-symbol decoding equals the exhaustive product search") {
    const DispersionSet code = mdc_map(alamouti_set());
    const ConstellationSet m1 = closed_form_m4();
    const auto codebook = build_codebook(code, m1);
    REQUIRE(codebook.size() == 256);

    Rng rng(0xfeed);
    int mismatches = 0;
    for (int frame = 0; frame < 40; ++frame) {
        const ComplexMat h = draw_channel(1, 4, rng);
        const double nvar = 0.1;
        EncoderState enc = initial_encoder_state(4);
        DecoderState da = initial_decoder_state(h * enc.x_prev + rng.cgaussian_mat(1, 4, nvar));
        DecoderState db = da;
        for (int t = 0; t < 12; ++t) {
            const auto idx = random_indices(4, 4, rng);
            const EncodeResult step =
                encode_step(enc, make_code_matrix(code, symbols_from_indices(m1, idx)));
            enc = step.next;
            const ComplexMat r_t = h * step.x_t + rng.cgaussian_mat(1, 4, nvar);

            const SymbolDecode ss = decode_single_symbol(da, r_t, code, m1);
            const ExhaustiveDecode ex = decode_exhaustive(db, r_t, codebook);
            da = ss.next;
            db = ex.next;
            if (flatten(ss.indices, 4) != ex.index) ++mismatches;
            CHECK(da.a_prev_sq_est == doctest::Approx(db.a_prev_sq_est));
        }
    }
    CHECK(mismatches == 0);
}

TEST_CASE("single-symbol decoding also covers the O-STBC baseline") {
    const DispersionSet ostbc = ostbc_rate34_4tx();
    const ConstellationSet qpsk = square_qam(4, 1.0 / 3.0);
    const auto codebook = build_codebook(ostbc, qpsk);
    REQUIRE(codebook.size() == 64);

    Rng rng(0xabba);
    for (int frame = 0; frame < 20; ++frame) {
        const ComplexMat h = draw_channel(1, 4, rng);
        EncoderState enc = initial_encoder_state(4);
        DecoderState da = initial_decoder_state(h * enc.x_prev + rng.cgaussian_mat(1, 4, 0.05));
        DecoderState db = da;
        for (int t = 0; t < 10; ++t) {
            const auto idx = random_indices(3, 4, rng);
            const EncodeResult step =
                encode_step(enc, make_code_matrix(ostbc, symbols_from_indices(qpsk, idx)));
            enc = step.next;
            const ComplexMat r_t = h * step.x_t + rng.cgaussian_mat(1, 4, 0.05);
            const SymbolDecode ss = decode_single_symbol(da, r_t, ostbc, qpsk);
            const ExhaustiveDecode ex = decode_exhaustive(db, r_t, codebook);
            da = ss.next;
            db = ex.next;
            CHECK(flatten(ss.indices, 4) == ex.index);
        }
    }
}

TEST_CASE("the two metric forms agree for quasi-unitary matrices") {
    const DispersionSet code = mdc_map(alamouti_set());
    const ConstellationSet m1 = closed_form_m4();
    Rng rng(55);
    for (int t = 0; t < 100; ++t) {
        const ComplexMat r_prev = rng.cgaussian_mat(2, 4, 1.0);
        const ComplexMat r_t = rng.cgaussian_mat(2, 4, 1.0);
        const double a_sq = 0.2 + rng.uniform();
        const CodeMatrix u = make_code_matrix(
            code, symbols_from_indices(m1, random_indices(4, 4, rng)));
        const double lit = codeword_metric(r_prev, r_t, a_sq, u);
        const double red = codeword_metric_reduced(r_prev, r_t, a_sq, u);
        CHECK(lit == doctest::Approx(red).epsilon(1e-10));
    }
}

TEST_CASE("common received-signal scale does not change decisions") {
    const DispersionSet code = mdc_map(alamouti_set());
    const ConstellationSet m1 = closed_form_m4();
    Rng rng(66);
    for (int t = 0; t < 50; ++t) {
        const ComplexMat r_prev = rng.cgaussian_mat(1, 4, 1.0);
        const ComplexMat r_t = rng.cgaussian_mat(1, 4, 1.0);
        DecoderState st = initial_decoder_state(r_prev);
        DecoderState st_scaled = initial_decoder_state(3.7 * r_prev);
        const SymbolDecode a = decode_single_symbol(st, r_t, code, m1);
        const SymbolDecode b = decode_single_symbol(st_scaled, 3.7 * r_t, code, m1);
        CHECK(a.indices == b.indices);
    }
}

TEST_CASE("decode bookkeeping") {
    const DispersionSet code = mdc_map(alamouti_set());
    const ConstellationSet m1 = closed_form_m4();
    Rng rng(8);
    const ComplexMat r_prev = rng.cgaussian_mat(1, 4, 1.0);
    const ComplexMat r_t = rng.cgaussian_mat(1, 4, 1.0);
    const DecoderState st = initial_decoder_state(r_prev);

    SUBCASE("evaluation counts: K*M for single-symbol, M^K for exhaustive") {
        const SymbolDecode ss = decode_single_symbol(st, r_t, code, m1);
        CHECK(ss.metric_evals == 16);
        const auto codebook = build_codebook(code, m1);
        const ExhaustiveDecode ex = decode_exhaustive(st, r_t, codebook);
        CHECK(ex.metric_evals == 256);
    }

    SUBCASE("single-entry codebook always decides 0") {
        const CodeMatrix only = make_code_matrix(code, symbols_from_indices(m1, {0, 1, 2, 3}));
        CHECK(decode_exhaustive(st, r_t, {only}).index == 0);
    }

    SUBCASE("empty codebook rejected") {
        CHECK_THROWS_AS(decode_exhaustive(st, r_t, {}), ConfigError);
    }

    SUBCASE("genie mode needs the true scale") {
        DecoderState genie = initial_decoder_state(r_prev, true);
        CHECK_THROWS_AS(decode_single_symbol(genie, r_t, code, m1), ConfigError);
        const SymbolDecode out = decode_single_symbol(genie, r_t, code, m1, 5.0 / 3.0);
        CHECK(out.next.a_prev_sq_est == doctest::Approx(5.0 / 3.0));
    }
}

TEST_CASE("scale tracking follows decisions exactly") {
    const DispersionSet code = mdc_map(alamouti_set());
    const ConstellationSet m1 = closed_form_m4();
    Rng rng(0x5ca1e);
    const ComplexMat h = draw_channel(1, 4, rng);
    const double nvar = 0.2;

    EncoderState enc = initial_encoder_state(4);
    const ComplexMat r0 = h * enc.x_prev + rng.cgaussian_mat(1, 4, nvar);
    DecoderState genie = initial_decoder_state(r0, true);
    DecoderState plain = initial_decoder_state(r0, false);

    for (int t = 0; t < 30; ++t) {
        const auto idx = random_indices(4, 4, rng);
        const CodeMatrix u = make_code_matrix(code, symbols_from_indices(m1, idx));
        const EncodeResult step = encode_step(enc, u);
        enc = step.next;
        const ComplexMat r_t = h * step.x_t + rng.cgaussian_mat(1, 4, nvar);

        const SymbolDecode g = decode_single_symbol(genie, r_t, code, m1, u.a_sq);
        genie = g.next;
        CHECK(genie.a_prev_sq_est == doctest::Approx(u.a_sq).epsilon(1e-12));

        const SymbolDecode p = decode_single_symbol(plain, r_t, code, m1);
        plain = p.next;
        const SymbolVector decided = symbols_from_indices(m1, p.indices);
        CHECK(plain.a_prev_sq_est == doctest::Approx(symbol_alpha(decided) / 4.0).epsilon(1e-12));
    }
}

TEST_CASE("effective differential noise doubles the channel noise") {
    const DispersionSet ostbc = ostbc_rate34_4tx();
    const CodeMatrix unitary = make_code_matrix(ostbc, {cplx(1, 0), 0, 0});

    SUBCASE("unitary code matrix, unit noise: the 3 dB penalty") {
        const NoiseStats st = effective_noise_stats(100000, 1.0, unitary, 1.0, 42, 2);
        CHECK(st.analytic_var == doctest::Approx(2.0));
        CHECK(st.empirical_var == doctest::Approx(2.0).epsilon(0.05));
    }

    SUBCASE("zero channel noise gives zero effective noise") {
        const NoiseStats st = effective_noise_stats(1000, 0.0, unitary, 1.0, 42);
        CHECK(st.empirical_var == 0.0);
    }

    SUBCASE("matched quasi-unitary scales keep the factor at two") {
        const DispersionSet code = mdc_map(alamouti_set());
        const ConstellationSet m1 = closed_form_m4();
        const CodeMatrix low = make_code_matrix(code, SymbolVector(4, cplx(m1.radii[0], 0)));
        REQUIRE(low.a_sq == doctest::Approx(1.0 / 3.0));
        const NoiseStats st = effective_noise_stats(100000, 1.0, low, 1.0 / 3.0, 43, 2);
        CHECK(st.analytic_var == doctest::Approx(2.0));
        CHECK(st.empirical_var == doctest::Approx(2.0).epsilon(0.05));
    }
}
