// SPDX-License-Identifier: Apache-2.0

#include "dstm/channel.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <thread>

#include "dstm/errors.hpp"

namespace dstm {

int FrameSpec::blocks(int t_len) const {
    if (t_len < 1) throw ConfigError("frame: invalid code length");
    if (symbols_per_antenna % t_len != 0)
        throw ConfigError("frame: " + std::to_string(symbols_per_antenna) +
                          " symbols per antenna not divisible by T = " + std::to_string(t_len));
    const int b = symbols_per_antenna / t_len;
    if (b < 2) throw ConfigError("frame: need the reference block plus at least one info block");
    return b;
}

int FrameSpec::info_blocks(int t_len) const { return blocks(t_len) - 1; }

int default_symbols_per_antenna(int t_len) {
    // 132 channel uses at T=4 (1 reference + 32 info blocks); T=8 keeps the
    // 16-info-block layout, which needs 136 to stay divisible.
    return t_len == 8 ? 136 : 132;
}

std::string scheme_name(Scheme s) {
    return s == Scheme::mdc_qostbc_dstm ? "mdc_qostbc_dstm" : "ostbc_dstm";
}

DispersionSet scheme_code(const SimConfig& cfg) {
    if (cfg.scheme == Scheme::mdc_qostbc_dstm) {
        if (cfg.n_t == 4) return mdc_map(alamouti_set());
        if (cfg.n_t == 8) return mdc_map(ostbc_rate34_4tx());
        throw ConfigError("unsupported combo: mdc_qostbc_dstm with n_t = " +
                          std::to_string(cfg.n_t) + " (supported: 4, 8)");
    }
    if (cfg.n_t == 4) return ostbc_rate34_4tx();
    throw ConfigError("unsupported combo: ostbc_dstm with n_t = " + std::to_string(cfg.n_t) +
                      " (supported: 4)");
}

double nominal_rate(const DispersionSet& set) {
    return static_cast<double>(set.k) / set.t_len;
}

ComplexMat draw_channel(int n_r, int n_t, Rng& rng) {
    return rng.cgaussian_mat(n_r, n_t, 1.0);
}

double noise_var_from_snr_db(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }

namespace {

struct FrameContext {
    DispersionSet set;
    int blocks = 0;
};

FrameContext make_context(const SimConfig& cfg) {
    FrameContext ctx;
    ctx.set = scheme_code(cfg);
    ctx.blocks = cfg.frame.blocks(ctx.set.t_len);
    if (cfg.constellation.size() < 2) throw ConfigError("simulation: constellation too small");
    if (cfg.snr_db.empty()) throw ConfigError("simulation: empty SNR list");
    if (cfg.min_frame_errors < 1) throw ConfigError("simulation: min_frame_errors must be >= 1");
    if (ctx.set.kind == CodeKind::mdc_qostbc) {
        // Reject constellations whose symbols could break quasi-unitarity up
        // front; worker threads must not hit make_code_matrix throws.
        double worst_beta = 0.0;
        for (const cplx& zk : cfg.constellation.points)
            for (const cplx& zl : cfg.constellation.points)
                worst_beta = std::max(
                    worst_beta,
                    std::abs(2.0 * (-zk.real() * zk.imag() + zl.real() * zl.imag())));
        if (worst_beta > 1e-9)
            throw ConfigError("simulation: constellation is not constant-x*y (worst beta " +
                              std::to_string(worst_beta) + ")");
    }
    return ctx;
}

FrameResult run_frame_impl(const FrameContext& ctx, const SimConfig& cfg, int snr_index,
                           long frame_index) {
    Rng rng(derive_seed(cfg.master_seed, static_cast<std::uint64_t>(snr_index),
                        static_cast<std::uint64_t>(frame_index)));
    const double nvar = noise_var_from_snr_db(cfg.snr_db[snr_index]);
    const int n_t = ctx.set.n_t;
    const int m = cfg.constellation.size();

    const ComplexMat h = draw_channel(cfg.n_r, n_t, rng);

    EncoderState enc = initial_encoder_state(n_t);
    const ComplexMat r0 = h * enc.x_prev + rng.cgaussian_mat(cfg.n_r, n_t, nvar);
    DecoderState dec = initial_decoder_state(r0, cfg.genie);

    FrameResult res;
    std::vector<int> tx_indices(ctx.set.k);
    for (int b = 1; b < ctx.blocks; ++b) {
        for (int& idx : tx_indices) idx = rng.uniform_int(m);
        const CodeMatrix u =
            make_code_matrix(ctx.set, symbols_from_indices(cfg.constellation, tx_indices));
        const EncodeResult step = encode_step(enc, u);
        enc = step.next;

        const ComplexMat r_t = h * step.x_t + rng.cgaussian_mat(cfg.n_r, n_t, nvar);
        SymbolDecode dec_out = decode_single_symbol(
            dec, r_t, ctx.set, cfg.constellation,
            cfg.genie ? std::optional<double>(u.a_sq) : std::nullopt);
        dec = dec_out.next;

        for (int i = 0; i < ctx.set.k; ++i) {
            ++res.info_symbols;
            if (dec_out.indices[i] != tx_indices[i]) ++res.symbol_errors;
        }
    }
    res.frame_error = res.symbol_errors > 0 ? 1 : 0;
    return res;
}

int workers_from_env() {
    if (const char* e = std::getenv("DSTM_WORKERS")) {
        const int w = std::atoi(e);
        if (w >= 1) return w;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
}

}  // namespace

FrameResult run_frame(const SimConfig& cfg, int snr_index, long frame_index) {
    if (snr_index < 0 || snr_index >= static_cast<int>(cfg.snr_db.size()))
        throw ConfigError("run_frame: SNR index out of range");
    return run_frame_impl(make_context(cfg), cfg, snr_index, frame_index);
}

std::vector<BlerPoint> run_sweep(const SimConfig& cfg) {
    const FrameContext ctx = make_context(cfg);
    const int workers = workers_from_env();

    std::vector<BlerPoint> points;
    points.reserve(cfg.snr_db.size());

    for (int si = 0; si < static_cast<int>(cfg.snr_db.size()); ++si) {
        const auto t0 = std::chrono::steady_clock::now();

        long scheduled = 0;
        long frames_run = 0;
        long errors = 0;
        bool stop = false;
        std::vector<FrameResult> batch_results;

        while (!stop && scheduled < cfg.max_frames) {
            const long batch =
                std::min(cfg.max_frames - scheduled, static_cast<long>(workers) * 512);
            batch_results.assign(batch, FrameResult{});

            // Any schedule gives identical results: every frame has its own
            // derived stream and only the in-order prefix below is counted.
            std::vector<std::thread> pool;
            pool.reserve(workers);
            for (int w = 0; w < workers; ++w) {
                pool.emplace_back([&, w]() {
                    for (long i = w; i < batch; i += workers)
                        batch_results[i] = run_frame_impl(ctx, cfg, si, scheduled + i);
                });
            }
            for (auto& th : pool) th.join();

            for (long i = 0; i < batch && !stop; ++i) {
                ++frames_run;
                errors += batch_results[i].frame_error;
                if (errors >= cfg.min_frame_errors) stop = true;
            }
            scheduled += batch;
        }

        BlerPoint pt;
        pt.snr_db = cfg.snr_db[si];
        pt.frames_run = frames_run;
        pt.frame_errors = errors;
        pt.bler = frames_run ? static_cast<double>(errors) / frames_run : 0.0;
        pt.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        points.push_back(pt);
    }
    return points;
}

CalibrationReport snr_calibration(const SimConfig& cfg, long n_blocks,
                                  std::optional<int> fixed_symbol_index) {
    const FrameContext ctx = make_context(cfg);
    Rng rng(derive_seed(cfg.master_seed, 0x5ca1ab1eULL, 0));
    const int m = cfg.constellation.size();

    EncoderState enc = initial_encoder_state(ctx.set.n_t);
    std::vector<int> idx(ctx.set.k);
    double acc = 0.0;
    for (long b = 0; b < n_blocks; ++b) {
        for (int& i : idx) i = fixed_symbol_index ? *fixed_symbol_index : rng.uniform_int(m);
        const CodeMatrix u =
            make_code_matrix(ctx.set, symbols_from_indices(cfg.constellation, idx));
        const EncodeResult step = encode_step(enc, u);
        enc = step.next;
        acc += step.x_t.squaredNorm() / ctx.set.t_len;
    }

    CalibrationReport rep;
    rep.mean_tx_power = n_blocks ? acc / n_blocks : 0.0;
    for (double snr : cfg.snr_db) {
        const double nvar = noise_var_from_snr_db(snr);
        double nacc = 0.0;
        const long trials = 20000;
        for (long t = 0; t < trials; ++t) nacc += std::norm(rng.cgaussian(nvar));
        rep.snr_db.push_back(snr);
        rep.noise_var_cfg.push_back(nvar);
        rep.noise_var.push_back(nacc / trials);
    }
    return rep;
}

double spectral_efficiency(const DispersionSet& set, const ConstellationSet& constellation) {
    return nominal_rate(set) * std::log2(static_cast<double>(constellation.size()));
}

double spectral_efficiency_adjusted(const DispersionSet& set,
                                    const ConstellationSet& constellation,
                                    const FrameSpec& frame) {
    const int blocks = frame.blocks(set.t_len);
    return spectral_efficiency(set, constellation) * (blocks - 1) / blocks;
}

void write_bler_csv_header(std::ostream& os) {
    os << "scheme,n_t,n_r,constellation,genie,snr_db,frames,frame_errors,bler,seed\n";
}

void write_bler_csv_rows(std::ostream& os, const SimConfig& cfg,
                         const std::vector<BlerPoint>& points) {
    char buf[160];
    for (const BlerPoint& p : points) {
        std::snprintf(buf, sizeof buf, "%s,%d,%d,%s,%d,%.10g,%ld,%ld,%.10g,%llu\n",
                      scheme_name(cfg.scheme).c_str(), cfg.n_t, cfg.n_r,
                      cfg.constellation_name.c_str(), cfg.genie ? 1 : 0, p.snr_db, p.frames_run,
                      p.frame_errors, p.bler,
                      static_cast<unsigned long long>(cfg.master_seed));
        os << buf;
    }
}

}  // namespace dstm
