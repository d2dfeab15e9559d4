#pragma once

// Command implementations behind the verasel binary. Kept free of argument
// parsing so tests can drive them in-process; tools/verasel.cpp adds the
// CLI surface. Exit codes: 0 success/match, 1 usage or IO error,
// 2 verification mismatch, 3 degenerate epoch.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "verasel/report.hpp"
#include "verasel/validate.hpp"

namespace verasel::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitMismatch = 2;
inline constexpr int kExitDegenerate = 3;

namespace detail {

inline void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + path.string());
    out << content;
    if (!out) throw Error("failed writing: " + path.string());
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// Group CSV data lines by their leading epoch column.
inline std::map<std::uint64_t, std::vector<std::string>> group_by_epoch(
    const std::string& csv, std::size_t header_lines) {
    std::map<std::uint64_t, std::vector<std::string>> groups;
    std::istringstream in(csv);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        if (++lineno <= header_lines) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) throw Error("malformed csv line: " + line);
        groups[std::stoull(line.substr(0, comma))].push_back(line);
    }
    return groups;
}

inline std::vector<std::string> header_lines_of(const std::string& csv,
                                                std::size_t count) {
    std::vector<std::string> out;
    std::istringstream in(csv);
    std::string line;
    while (out.size() < count && std::getline(in, line)) out.push_back(line);
    return out;
}

/// Locate the first corrupt entry in a board file that fails its digest
/// check, so verification can name the offender.
inline std::string diagnose_board_file(const std::string& text) {
    std::istringstream in(text);
    std::string label;
    while (in >> label) {
        if (label == kBoardFileTag) {
            std::string backend_name;
            in >> backend_name;
            try {
                backend_by_name(backend_name);
            } catch (const Error&) {
                return "unknown backend in header";
            }
            continue;
        }
        if (label == "clock") {
            std::string epoch, phase;
            in >> epoch >> phase;
            continue;
        }
        if (label == "digest") {
            std::string rest;
            in >> rest;
            continue;
        }
        if (label != "entry") return "unrecognized record '" + label + "'";
        std::uint64_t seq = 0, epoch = 0;
        std::string kind_name, author_hex, payload_hex, sig_hex;
        if (!(in >> seq >> epoch >> kind_name >> author_hex >> payload_hex >> sig_hex)) {
            return "truncated entry record";
        }
        try {
            Bytes author = from_hex(author_hex);
            Bytes payload = from_hex(payload_hex);
            Bytes sig = from_hex(sig_hex);
            EntryKind kind = entry_kind_from_string(kind_name);
            // Backend name comes from the (already parsed) header; if the
            // header itself was corrupted we never get here.
            auto pos = text.find(' ');
            auto eol = text.find('\n');
            const auto& backend =
                backend_by_name(text.substr(pos + 1, eol - pos - 1));
            Bytes signed_bytes = entry_signed_bytes(epoch, kind, view(payload));
            if (!backend.verify_sig(view(author), view(signed_bytes), view(sig))) {
                return "entry signature check failed at sequence " +
                       std::to_string(seq) + " author " + author_hex;
            }
        } catch (const Error& e) {
            return "entry at sequence " + std::to_string(seq) + ": " + e.what();
        }
    }
    return "file-level corruption (header, clock, or digest line)";
}

}  // namespace detail

// --- keygen ------------------------------------------------------------------

struct KeygenOptions {
    std::filesystem::path out_dir;
    std::size_t count = 1;
    std::string backend = "ecvrf";
    std::optional<std::uint64_t> rng_seed;
    bool force = false;
};

inline int cmd_keygen(const KeygenOptions& opts, std::ostream& out,
                      std::ostream& err) {
    try {
        const CryptoBackend& backend = backend_by_name(opts.backend);
        std::filesystem::create_directories(opts.out_dir);
        for (std::size_t i = 0; i < opts.count; ++i) {
            std::ostringstream name;
            name << "key_" << std::setw(4) << std::setfill('0') << i << ".txt";
            auto path = opts.out_dir / name.str();
            if (std::filesystem::exists(path) && !opts.force) {
                err << "refusing to overwrite " << path.string()
                    << " (use --force)\n";
                return kExitUsage;
            }
            KeyPair kp;
            if (opts.rng_seed) {
                auto seed = DetRng::derive("verasel.keygen", *opts.rng_seed, i);
                kp = backend.keygen(ByteView(seed.data(), seed.size()));
            } else {
                kp = backend.keygen();
            }
            save_key_file(path, backend, kp);
            out << "wrote " << path.string() << '\n';
        }
        return kExitOk;
    } catch (const Error& e) {
        err << "keygen: " << e.what() << '\n';
        return kExitUsage;
    }
}

// --- simulate ----------------------------------------------------------------

struct SimulateOptions {
    std::filesystem::path config_path;
    std::filesystem::path out_dir;
    std::optional<std::filesystem::path> board_file;
    std::optional<std::string> backend_override;
    std::optional<std::uint64_t> rng_seed_override;
};

inline int cmd_simulate(const SimulateOptions& opts, std::ostream& out,
                        std::ostream& err) {
    try {
        RunConfig cfg = parse_config_file(opts.config_path);
        if (opts.backend_override) cfg.backend = *opts.backend_override;
        if (opts.rng_seed_override) cfg.rng_seed = *opts.rng_seed_override;

        ScenarioTranscript transcript = run_scenario(cfg.to_scenario());

        std::filesystem::create_directories(opts.out_dir);
        auto board_path =
            opts.board_file ? *opts.board_file : opts.out_dir / "board.txt";
        transcript.board.save(board_path);
        detail::write_file(opts.out_dir / "results.csv",
                           render_results_csv(cfg.tau, cfg.layers, cfg.backend,
                                              outputs_from_transcript(transcript)));
        detail::write_file(opts.out_dir / "seeds.csv",
                           render_seeds_csv(transcript.chain));
        detail::write_file(opts.out_dir / "summary.txt", render_summary(transcript));

        out << render_summary(transcript);
        out << "board: " << board_path.string() << '\n';
        if (transcript.genesis_failed || transcript.any_degenerate) {
            err << "degenerate epoch(s) present\n";
            return kExitDegenerate;
        }
        return kExitOk;
    } catch (const Error& e) {
        err << "simulate: " << e.what() << '\n';
        return kExitUsage;
    }
}

// --- verify ------------------------------------------------------------------

struct VerifyOptions {
    std::filesystem::path board_file;
    std::filesystem::path out_dir;  // holds results.csv and seeds.csv
    std::optional<std::uint64_t> epoch;
};

inline int cmd_verify(const VerifyOptions& opts, std::ostream& out,
                      std::ostream& err) {
    std::string board_text;
    std::string recorded_results, recorded_seeds;
    try {
        board_text = detail::read_file(opts.board_file);
        recorded_results = detail::read_file(opts.out_dir / "results.csv");
        recorded_seeds = detail::read_file(opts.out_dir / "seeds.csv");
    } catch (const Error& e) {
        err << "verify: " << e.what() << '\n';
        return kExitUsage;
    }

    // Run parameters come from the recorded results header:
    //   # verasel-results-v1 tau=<n/d> layers=<l> backend=<name>
    Fraction tau;
    std::uint32_t layers = 0;
    std::string backend_name;
    try {
        std::istringstream head(recorded_results);
        std::string hash_mark, tag, tau_kv, layers_kv, backend_kv;
        if (!(head >> hash_mark >> tag >> tau_kv >> layers_kv >> backend_kv) ||
            hash_mark != "#" || tag != "verasel-results-v1" ||
            tau_kv.rfind("tau=", 0) != 0 || layers_kv.rfind("layers=", 0) != 0 ||
            backend_kv.rfind("backend=", 0) != 0) {
            throw Error("results.csv: unrecognized header");
        }
        tau = Fraction::parse(tau_kv.substr(4));
        layers = static_cast<std::uint32_t>(std::stoul(layers_kv.substr(7)));
        backend_name = backend_kv.substr(8);
    } catch (const std::exception& e) {
        err << "verify: " << e.what() << '\n';
        return kExitMismatch;
    }

    Board board(mock_backend());
    try {
        board = Board::deserialize(board_text);
    } catch (const BoardError& e) {
        err << "verify: transcript corrupt: " << e.what() << '\n';
        err << "verify: " << detail::diagnose_board_file(board_text) << '\n';
        return kExitMismatch;
    }
    if (board.backend().name() != backend_name) {
        err << "verify: backend mismatch between transcript and results\n";
        return kExitMismatch;
    }

    try {
        Replay replay = replay_board(board, tau, layers);
        std::string computed_results =
            render_results_csv(tau, layers, backend_name, replay.epochs);
        std::string computed_seeds = render_seeds_csv(replay.chain);

        bool all_match = true;
        if (detail::header_lines_of(computed_results, 2) !=
                detail::header_lines_of(recorded_results, 2) ||
            detail::header_lines_of(computed_seeds, 2) !=
                detail::header_lines_of(recorded_seeds, 2)) {
            out << "header: mismatch\n";
            all_match = false;
        }

        auto computed_rows = detail::group_by_epoch(computed_results, 2);
        auto recorded_rows = detail::group_by_epoch(recorded_results, 2);
        auto computed_seed_rows = detail::group_by_epoch(computed_seeds, 2);
        auto recorded_seed_rows = detail::group_by_epoch(recorded_seeds, 2);

        std::set<std::uint64_t> epochs;
        for (const auto& [e, _] : computed_rows) epochs.insert(e);
        for (const auto& [e, _] : recorded_rows) epochs.insert(e);
        for (const auto& [e, _] : computed_seed_rows) epochs.insert(e);
        for (const auto& [e, _] : recorded_seed_rows) epochs.insert(e);

        for (auto e : epochs) {
            if (opts.epoch && *opts.epoch != e) continue;
            const bool rows_match = computed_rows[e] == recorded_rows[e] &&
                                    computed_seed_rows[e] == recorded_seed_rows[e];
            out << "epoch " << e << ": " << (rows_match ? "match" : "mismatch")
                << '\n';
            all_match = all_match && rows_match;
        }
        return all_match ? kExitOk : kExitMismatch;
    } catch (const std::exception& e) {
        err << "verify: replay failed: " << e.what() << '\n';
        return kExitMismatch;
    }
}

// --- validate ----------------------------------------------------------------

struct ValidateOptions {
    std::filesystem::path config_path;
    std::filesystem::path out_dir;
    std::optional<std::uint64_t> trials_a, trials_b;
    std::optional<double> alpha;
    std::optional<std::string> backend_override;
    std::optional<std::uint64_t> rng_seed_override;
};

inline std::string render_frequency_csv(const FrequencyProfile& profile,
                                        const std::vector<std::uint64_t>& weights) {
    std::ostringstream out;
    out << "node,weight,count,frequency\n";
    auto freqs = profile.frequencies();
    for (std::size_t i = 0; i < profile.counts.size(); ++i) {
        out << i << ',' << weights[i] << ',' << profile.counts[i] << ','
            << std::setprecision(10) << freqs[i] << '\n';
    }
    return out.str();
}

inline std::string render_cdf_csv(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    std::ostringstream out;
    out << "value,cdf\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
        out << std::setprecision(10) << values[i] << ','
            << static_cast<double>(i + 1) / static_cast<double>(values.size()) << '\n';
    }
    return out.str();
}

inline std::string render_ks_report(const ValidateReport& report, const RunConfig& cfg) {
    std::ostringstream out;
    out << "nodes: " << report.weights.size() << '\n'
        << "total_weight: " << report.total_weight << '\n'
        << "tau: " << cfg.tau.str() << '\n'
        << "trials_verasel: " << report.verasel_profile.trials << '\n'
        << "trials_oracle: " << report.oracle_profile.trials << '\n'
        << "alpha: " << cfg.alpha << '\n'
        << "ks_statistic: " << std::setprecision(6) << report.ks.statistic << '\n'
        << "ks_critical (n=" << report.ks.n << ", m=" << report.ks.m
        << "): " << report.ks.critical << '\n'
        << "ks_critical_reference (n=m=3000): " << report.reference_critical_3000
        << '\n'
        << "verdict: " << (report.ks.accept ? "accept" : "reject") << '\n';
    return out.str();
}

inline int cmd_validate(const ValidateOptions& opts, std::ostream& out,
                        std::ostream& err) {
    try {
        RunConfig cfg = parse_config_file(opts.config_path);
        if (opts.trials_a) cfg.trials_a = *opts.trials_a;
        if (opts.trials_b) cfg.trials_b = *opts.trials_b;
        if (opts.alpha) cfg.alpha = *opts.alpha;
        if (opts.backend_override) cfg.backend = *opts.backend_override;
        if (opts.rng_seed_override) cfg.rng_seed = *opts.rng_seed_override;

        ValidateReport report = run_validation(cfg);

        std::filesystem::create_directories(opts.out_dir);
        detail::write_file(opts.out_dir / "freq_verasel.csv",
                           render_frequency_csv(report.verasel_profile, report.weights));
        detail::write_file(opts.out_dir / "freq_oracle.csv",
                           render_frequency_csv(report.oracle_profile, report.weights));
        detail::write_file(opts.out_dir / "cdf_verasel.csv",
                           render_cdf_csv(report.verasel_profile.frequencies()));
        detail::write_file(opts.out_dir / "cdf_oracle.csv",
                           render_cdf_csv(report.oracle_profile.frequencies()));
        std::string ks_report = render_ks_report(report, cfg);
        detail::write_file(opts.out_dir / "ks_report.txt", ks_report);
        out << ks_report;
        return kExitOk;
    } catch (const Error& e) {
        err << "validate: " << e.what() << '\n';
        return kExitUsage;
    }
}

}  // namespace verasel::cli
