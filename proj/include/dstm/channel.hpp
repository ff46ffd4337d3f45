// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dstm/codec.hpp"
#include "dstm/constellation.hpp"
#include "dstm/rng.hpp"
#include "dstm/stbc.hpp"

namespace dstm {

/// Frame layout: one reference block X_0 followed by info blocks, all within
/// symbols_per_antenna channel uses per antenna.
struct FrameSpec {
    int symbols_per_antenna = 132;

    int blocks(int t_len) const;       // symbols_per_antenna / t_len, validated
    int info_blocks(int t_len) const;  // blocks - 1
};

/// Default channel uses per antenna for a given code length: 132 at T=4; for
/// T=8 the nearest layout keeping 16 info blocks plus the reference is 136.
int default_symbols_per_antenna(int t_len);

enum class Scheme { mdc_qostbc_dstm, ostbc_dstm };

std::string scheme_name(Scheme s);

struct SimConfig {
    Scheme scheme = Scheme::mdc_qostbc_dstm;
    int n_t = 4;
    int n_r = 1;
    ConstellationSet constellation;
    std::string constellation_name = "m1";
    std::vector<double> snr_db;
    long min_frame_errors = 100;
    long max_frames = 2000000;
    std::uint64_t master_seed = 1;
    bool genie = false;
    FrameSpec frame{};
};

struct BlerPoint {
    double snr_db = 0.0;
    long frames_run = 0;
    long frame_errors = 0;
    double bler = 0.0;
    double wall_seconds = 0.0;
};

/// Dispersion set for the configured scheme/antenna combo:
/// mdc_qostbc_dstm with n_t = 4 or 8, ostbc_dstm with n_t = 4.
/// Throws ConfigError naming any unsupported combo.
DispersionSet scheme_code(const SimConfig& cfg);

/// Code rate K/T of the scheme (1 for the 4Tx MDC code, 3/4 for the others).
double nominal_rate(const DispersionSet& set);

/// i.i.d. CN(0,1) entries; one draw per frame (quasi-static fading).
ComplexMat draw_channel(int n_r, int n_t, Rng& rng);

/// SNR convention: total average transmit power across all antennas per
/// channel use is 1 (E a_t^2 = 1), and SNR = 1 / noise_var with noise_var the
/// per-receive-antenna complex noise variance.
double noise_var_from_snr_db(double snr_db);

struct FrameResult {
    int frame_error = 0;  // 1 if any info symbol was decided wrongly
    int symbol_errors = 0;
    int info_symbols = 0;
};

/// Simulate one frame: draw H once, send the unitary reference block and the
/// differentially encoded info blocks through R = H X + N, decode with the
/// single-symbol decoder, and compare symbol indices. The frame RNG stream is
/// derived from (master_seed, snr_index, frame_index).
FrameResult run_frame(const SimConfig& cfg, int snr_index, long frame_index);

/// For each SNR, run frames until min_frame_errors frame errors or max_frames
/// frames. Frames are scheduled on DSTM_WORKERS threads (default: hardware
/// concurrency), and results are identical for any worker count: every frame
/// has its own derived stream and the stopping frame is found by an in-order
/// scan of the accumulated results.
std::vector<BlerPoint> run_sweep(const SimConfig& cfg);

struct CalibrationReport {
    double mean_tx_power = 0.0;          // average tr(X X^H)/T per block
    std::vector<double> snr_db;          // echoed grid
    std::vector<double> noise_var;       // realized per-entry noise variance
    std::vector<double> noise_var_cfg;   // configured variance per SNR
};

/// Power discipline check: measures the transmitted power of an encoded
/// stream (uniform symbols by default, or a pathological fixed symbol) and
/// the realized noise variance for each configured SNR.
CalibrationReport snr_calibration(const SimConfig& cfg, long n_blocks = 20000,
                                  std::optional<int> fixed_symbol_index = std::nullopt);

/// Nominal spectral efficiency R log2(M) in bps/Hz.
double spectral_efficiency(const DispersionSet& set, const ConstellationSet& constellation);

/// The same adjusted for the reference-block overhead, R log2(M) * info/blocks.
double spectral_efficiency_adjusted(const DispersionSet& set,
                                    const ConstellationSet& constellation,
                                    const FrameSpec& frame);

/// CSV rows "scheme,n_t,n_r,constellation,genie,snr_db,frames,frame_errors,bler,seed".
void write_bler_csv_header(std::ostream& os);
void write_bler_csv_rows(std::ostream& os, const SimConfig& cfg,
                         const std::vector<BlerPoint>& points);

}  // namespace dstm
