// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: construct/inspect codes, design constellations,
// run BLER sweeps, and verify the library invariants.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dstm/channel.hpp"
#include "dstm/codec.hpp"
#include "dstm/constellation.hpp"
#include "dstm/errors.hpp"
#include "dstm/stbc.hpp"
#include "dstm/verify.hpp"

namespace {

constexpr const char* kVersion = "dstm 1.0.0";

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::vector<double> parse_snr_tokens(const std::vector<std::string>& tokens) {
    std::vector<double> out;
    for (const std::string& tok : tokens) {
        const auto c1 = tok.find(':');
        if (c1 == std::string::npos) {
            out.push_back(std::stod(tok));
            continue;
        }
        const auto c2 = tok.find(':', c1 + 1);
        if (c2 == std::string::npos)
            throw dstm::ConfigError("bad SNR range (want start:step:stop): " + tok);
        const double start = std::stod(tok.substr(0, c1));
        const double step = std::stod(tok.substr(c1 + 1, c2 - c1 - 1));
        const double stop = std::stod(tok.substr(c2 + 1));
        if (step <= 0.0) throw dstm::ConfigError("bad SNR range step: " + tok);
        for (double v = start; v <= stop + 1e-9; v += step) out.push_back(v);
    }
    if (out.empty()) throw dstm::ConfigError("empty SNR list");
    return out;
}

std::string stem_of(const std::string& path) {
    return std::filesystem::path(path).stem().string();
}

void print_criteria(const dstm::CriteriaReport& rep) {
    auto line = [](const char* name, bool ok, double residual) {
        std::printf("  %-34s %s  (residual %.3g)\n", name, ok ? "pass" : "FAIL", residual);
    };
    line("quasi-unitary criterion x*y = nu", rep.quasi_unitary_ok, rep.quasi_unitary_residual);
    line("power criterion mean |z|^2 = 1", rep.power_ok,
         std::max(rep.power_residual, rep.radius_residual));
    line("performance criterion min > 0", rep.performance_ok && rep.distinct, rep.metric);
}

void append_manifest(const std::string& csv_path, const nlohmann::json& config,
                     const std::string& started, const std::vector<std::string>& outputs) {
    nlohmann::json j;
    j["version"] = kVersion;
    j["config"] = config;
    j["started_utc"] = started;
    j["finished_utc"] = utc_timestamp();
    j["outputs"] = outputs;
    std::ofstream f(csv_path + ".manifest.jsonl", std::ios::app);
    if (!f) throw dstm::IoError("cannot write manifest for " + csv_path);
    f << j.dump() << "\n";
}

int cmd_design(int m, double nu, int ntx, int starts, std::uint64_t seed, const std::string& out) {
    const dstm::ConstellationSet set = dstm::optimize(m, nu, ntx, starts, seed);
    dstm::write_constellation_file(out, set);

    std::printf("wrote %s (M = %d, nu = %g)\n", out.c_str(), set.size(), set.nu);
    std::printf("objective (min [dx^2-dy^2]^%d) = %.12g\n", ntx, dstm::objective(set, ntx));
    std::printf("min |dx^2-dy^2|               = %.12g\n", dstm::min_delta_metric(set));
    print_criteria(dstm::check_criteria(set, 1e-9));
    return 0;
}

int cmd_gain_sweep(int m, const std::vector<double>& nu_grid, int ntx, int starts,
                   std::uint64_t seed, const std::string& out) {
    const std::string started = utc_timestamp();
    // Coding gain of the matching doubled code: (N_T/K) * min |dx^2-dy^2|
    // with K = 4 at four antennas and K = 6 at eight.
    const double gain_factor = ntx == 8 ? 8.0 / 6.0 : 1.0;

    std::ofstream f(out);
    if (!f) throw dstm::IoError("cannot open for write: " + out);
    f << "nu,min_metric,objective,coding_gain\n";
    std::ofstream plot(out + ".plot");
    plot << "nu coding_gain\n";

    for (double nu : nu_grid) {
        const dstm::ConstellationSet set = dstm::optimize(m, nu, ntx, starts, seed);
        const double metric = dstm::min_delta_metric(set);
        char buf[160];
        std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g\n", nu, metric,
                      dstm::objective(set, ntx), gain_factor * metric);
        f << buf;
        std::snprintf(buf, sizeof buf, "%.10g %.10g\n", nu, gain_factor * metric);
        plot << buf;
        std::printf("nu = %-6g  coding gain = %.8g\n", nu, gain_factor * metric);
    }

    nlohmann::json cfg{{"command", "gain-sweep"}, {"m", m},           {"nu_grid", nu_grid},
                       {"ntx", ntx},              {"starts", starts}, {"seed", seed}};
    append_manifest(out, cfg, started, {out, out + ".plot"});
    return 0;
}

int cmd_bler(const std::string& scheme, int ntx, int nrx, const std::string& constellation_file,
             const std::vector<std::string>& snr_tokens, bool genie, std::uint64_t seed,
             long min_frame_errors, long max_frames, int frame_symbols, const std::string& out) {
    const std::string started = utc_timestamp();

    dstm::SimConfig cfg;
    if (scheme == "mdc_qostbc_dstm")
        cfg.scheme = dstm::Scheme::mdc_qostbc_dstm;
    else if (scheme == "ostbc_dstm")
        cfg.scheme = dstm::Scheme::ostbc_dstm;
    else
        throw dstm::ConfigError("unknown scheme: " + scheme);
    cfg.n_t = ntx;
    cfg.n_r = nrx;
    cfg.constellation = dstm::read_constellation_file(constellation_file);
    cfg.constellation_name = stem_of(constellation_file);
    cfg.snr_db = parse_snr_tokens(snr_tokens);
    cfg.genie = genie;
    cfg.master_seed = seed;
    cfg.min_frame_errors = min_frame_errors;
    cfg.max_frames = max_frames;

    const dstm::DispersionSet code = dstm::scheme_code(cfg);
    cfg.frame.symbols_per_antenna =
        frame_symbols > 0 ? frame_symbols : dstm::default_symbols_per_antenna(code.t_len);

    // Power discipline: E(a_t^2) = 1 needs mean |c|^2 = 1 on the MDC codes
    // and 1/K on O-STBC (the 1/sqrt(K) scale sits in the symbols there).
    double mean_power = 0.0;
    for (const auto& z : cfg.constellation.points) mean_power += std::norm(z);
    mean_power /= cfg.constellation.size();
    const double want = cfg.scheme == dstm::Scheme::mdc_qostbc_dstm ? 1.0 : 1.0 / code.k;
    if (std::abs(mean_power - want) > 0.01 * want)
        throw dstm::ConfigError("constellation mean power " + std::to_string(mean_power) +
                                " breaks the E(a^2) = 1 discipline (want " +
                                std::to_string(want) + " for " + scheme + ")");
    if (cfg.scheme == dstm::Scheme::mdc_qostbc_dstm) {
        const auto crit = dstm::check_criteria(cfg.constellation, 1e-6);
        if (!crit.quasi_unitary_ok)
            throw dstm::ConfigError(
                "constellation is not on a constant-x*y hyperbola (residual " +
                std::to_string(crit.quasi_unitary_residual) +
                "); its code matrices would not be quasi-unitary");
    }

    const double se = dstm::spectral_efficiency(code, cfg.constellation);
    const double se_adj = dstm::spectral_efficiency_adjusted(code, cfg.constellation, cfg.frame);
    std::printf("%s, %dTx/%dRx, %s, %d SNR points, seed %llu%s\n", scheme.c_str(), ntx, nrx,
                cfg.constellation_name.c_str(), static_cast<int>(cfg.snr_db.size()),
                static_cast<unsigned long long>(seed), genie ? ", genie" : "");
    std::printf("spectral efficiency %.4g bps/Hz (%.4g with reference-block overhead)\n", se,
                se_adj);

    const std::vector<dstm::BlerPoint> points = dstm::run_sweep(cfg);

    const bool fresh = !std::filesystem::exists(out) || std::filesystem::file_size(out) == 0;
    std::ofstream f(out, std::ios::app);
    if (!f) throw dstm::IoError("cannot open for write: " + out);
    if (fresh) dstm::write_bler_csv_header(f);
    dstm::write_bler_csv_rows(f, cfg, points);
    f.close();

    std::ofstream plot(out + ".plot");
    plot << "snr_db bler\n";
    for (const auto& p : points) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.10g %.10g\n", p.snr_db, p.bler);
        plot << buf;
        std::printf("snr %6.2f dB  bler %.4g  (%ld frames, %ld errors, %.1f s)\n", p.snr_db,
                    p.bler, p.frames_run, p.frame_errors, p.wall_seconds);
    }

    nlohmann::json jcfg{{"command", "bler"},
                        {"scheme", scheme},
                        {"n_t", ntx},
                        {"n_r", nrx},
                        {"constellation_file", constellation_file},
                        {"constellation", cfg.constellation_name},
                        {"snr_db", cfg.snr_db},
                        {"genie", genie},
                        {"seed", seed},
                        {"min_frame_errors", min_frame_errors},
                        {"max_frames", max_frames},
                        {"symbols_per_antenna", cfg.frame.symbols_per_antenna},
                        {"spectral_efficiency", se},
                        {"spectral_efficiency_adjusted", se_adj}};
    append_manifest(out, jcfg, started, {out, out + ".plot"});
    return 0;
}

int cmd_verify(const std::string& constellation_file) {
    std::optional<dstm::ConstellationSet> external;
    std::string name;
    if (!constellation_file.empty()) {
        external = dstm::read_constellation_file(constellation_file);
        name = stem_of(constellation_file);
    }
    const dstm::VerifyReport rep = dstm::run_verification(external, name);
    for (const auto& item : rep.items)
        std::printf("%-48s %s  (%s)\n", item.name.c_str(), item.pass ? "pass" : "FAIL",
                    item.detail.c_str());
    std::printf("%s\n", rep.all_pass() ? "all checks passed" : "VERIFICATION FAILED");
    return rep.all_pass() ? 0 : 1;
}

int cmd_dump_code(const std::string& code, const std::string& out) {
    dstm::DispersionSet set;
    if (code == "alamouti")
        set = dstm::alamouti_set();
    else if (code == "ostbc4")
        set = dstm::ostbc_rate34_4tx();
    else if (code == "mdc4")
        set = dstm::mdc_map(dstm::alamouti_set());
    else if (code == "mdc8")
        set = dstm::mdc_map(dstm::ostbc_rate34_4tx());
    else
        throw dstm::ConfigError("unknown code: " + code +
                                " (choose alamouti, ostbc4, mdc4, mdc8)");
    if (out.empty()) {
        std::cout << dstm::dump_dispersion(set);
    } else {
        dstm::write_dispersion_file(out, set);
        std::printf("wrote %s (%s: n_t=%d, T=%d, K=%d)\n", out.c_str(), code.c_str(), set.n_t,
                    set.t_len, set.k);
    }
    return 0;
}

int cmd_qam(int m, double mean_power, const std::string& out) {
    const dstm::ConstellationSet set = dstm::square_qam(m, mean_power);
    dstm::write_constellation_file(out, set);
    std::printf("wrote %s (%d-QAM, mean power %.10g)\n", out.c_str(), m, mean_power);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Differential space-time modulation on MDC-QOSTBC: code construction,\n"
                 "constellation design, and Monte Carlo BLER simulation."};
    app.set_config("--config", "", "Config file (one key per line; flags take precedence)");
    app.require_subcommand(1);

    auto* design = app.add_subcommand("design", "Optimize a constellation set");
    int d_m = 4, d_ntx = 4, d_starts = 50;
    double d_nu = 0.0;
    std::uint64_t d_seed = 7;
    std::string d_out = "constellation.txt";
    design->add_option("--m", d_m, "Number of constellation points (even)");
    design->add_option("--nu", d_nu, "Hyperbola constant x*y = nu");
    design->add_option("--ntx", d_ntx, "Transmit antennas (metric exponent)");
    design->add_option("--starts", d_starts, "Random restarts");
    design->add_option("--seed", d_seed, "RNG seed");
    design->add_option("--out", d_out, "Output constellation file");

    auto* sweep = app.add_subcommand("gain-sweep", "Coding gain across a nu grid");
    int g_m = 4, g_ntx = 4, g_starts = 50;
    std::uint64_t g_seed = 7;
    std::vector<double> g_grid;
    std::string g_out = "gain_sweep.csv";
    sweep->add_option("--m", g_m, "Number of constellation points (even)");
    sweep->add_option("--nu-grid", g_grid, "List of nu values")->required();
    sweep->add_option("--ntx", g_ntx, "Transmit antennas (metric exponent)");
    sweep->add_option("--starts", g_starts, "Random restarts per nu");
    sweep->add_option("--seed", g_seed, "RNG seed");
    sweep->add_option("--out", g_out, "Output CSV");

    auto* bler = app.add_subcommand("bler", "Monte Carlo BLER sweep");
    std::string b_scheme = "mdc_qostbc_dstm", b_file, b_out = "bler.csv";
    int b_ntx = 4, b_nrx = 1, b_frame_symbols = 0;
    bool b_genie = false;
    std::uint64_t b_seed = 1;
    long b_min_err = 100, b_max_frames = 2000000;
    std::vector<std::string> b_snr;
    bler->add_option("--scheme", b_scheme, "mdc_qostbc_dstm or ostbc_dstm");
    bler->add_option("--ntx", b_ntx, "Transmit antennas");
    bler->add_option("--nrx", b_nrx, "Receive antennas");
    bler->add_option("--constellation-file", b_file, "Constellation file")->required();
    bler->add_option("--snr", b_snr, "SNR points in dB (values and/or start:step:stop)")
        ->required();
    bler->add_flag("--genie", b_genie, "Use the true a_{t-1} in the decoder");
    bler->add_option("--seed", b_seed, "Master seed");
    bler->add_option("--min-frame-errors", b_min_err, "Stop a point after this many frame errors");
    bler->add_option("--max-frames", b_max_frames, "Frame cap per point");
    bler->add_option("--frame-symbols", b_frame_symbols,
                     "Channel uses per antenna per frame (default 132; 136 at T=8)");
    bler->add_option("--out", b_out, "Output CSV");

    auto* verify = app.add_subcommand("verify", "Run the invariant battery");
    bool v_all = false;
    std::string v_file;
    verify->add_flag("--all", v_all, "Run every check (default)");
    verify->add_option("--constellation-file", v_file, "Also check this constellation file");

    auto* dump = app.add_subcommand("dump-code", "Dump a dispersion-matrix set");
    std::string k_code = "mdc4", k_out;
    dump->add_option("--code", k_code, "alamouti, ostbc4, mdc4, or mdc8");
    dump->add_option("--out", k_out, "Output file (stdout if omitted)");

    auto* qam = app.add_subcommand("qam", "Write a square QAM baseline constellation");
    int q_m = 16;
    double q_power = 1.0 / 3.0;
    std::string q_out = "qam16.txt";
    qam->add_option("--m", q_m, "QAM order (perfect square)");
    qam->add_option("--mean-power", q_power, "Mean symbol power (1/K for O-STBC DSTM)");
    qam->add_option("--out", q_out, "Output constellation file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (design->parsed()) return cmd_design(d_m, d_nu, d_ntx, d_starts, d_seed, d_out);
        if (sweep->parsed()) return cmd_gain_sweep(g_m, g_grid, g_ntx, g_starts, g_seed, g_out);
        if (bler->parsed())
            return cmd_bler(b_scheme, b_ntx, b_nrx, b_file, b_snr, b_genie, b_seed, b_min_err,
                            b_max_frames, b_frame_symbols, b_out);
        if (verify->parsed()) return cmd_verify(v_file);
        if (dump->parsed()) return cmd_dump_code(k_code, k_out);
        if (qam->parsed()) return cmd_qam(q_m, q_power, q_out);
    } catch (const dstm::QuasiUnitarityError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
