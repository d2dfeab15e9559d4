#pragma once

// The correctness-validation experiment: run the protocol's selection and
// the trusted-party oracle over the same node set, collect per-node
// selection frequencies, and compare the two frequency samples with a
// two-sample Kolmogorov-Smirnov test.

#include <cstdint>
#include <map>
#include <vector>

#include "verasel/config.hpp"
#include "verasel/protocol.hpp"
#include "verasel/stats.hpp"

namespace verasel {

struct ValidateReport {
    std::vector<std::uint64_t> weights;
    std::uint64_t total_weight = 0;
    FrequencyProfile verasel_profile;
    FrequencyProfile oracle_profile;
    KsResult ks;
    double reference_critical_3000 = 0.0;  // closed form at n = m = 3000
};

inline ValidateReport run_validation(const RunConfig& cfg) {
    if (cfg.trials_a == 0 || cfg.trials_b == 0) {
        throw Error("validate: both trial counts must be >= 1");
    }
    const CryptoBackend& backend = backend_by_name(cfg.backend);
    ValidateReport report;
    report.weights = cfg.resolve_weights();
    for (auto w : report.weights) report.total_weight += w;
    const std::size_t n = report.weights.size();

    std::vector<KeyPair> keys;
    keys.reserve(n);
    std::map<NodeId, std::uint32_t> index_of;
    for (std::size_t i = 0; i < n; ++i) {
        keys.push_back(scenario_keypair(backend, cfg.rng_seed, i));
        index_of[keys.back().public_key] = static_cast<std::uint32_t>(i);
    }

    report.verasel_profile = selection_frequencies(
        n, cfg.trials_a, [&](std::uint64_t trial) {
            auto seed = DetRng::derive("verasel.validate-seed", cfg.rng_seed, trial);
            ValidatedRoster roster = roster_from_keys(
                backend, keys, report.weights, ByteView(seed.data(), seed.size()));
            ActiveSet active = select_active_set(roster, cfg.tau);
            std::vector<std::uint32_t> indices;
            indices.reserve(active.selected.size());
            for (const auto& s : active.selected) indices.push_back(index_of.at(s.id));
            return indices;
        });

    DetRng oracle_rng(cfg.rng_seed ^ 0x9e3779b97f4a7c15ULL);
    report.oracle_profile = selection_frequencies(
        n, cfg.trials_b, [&](std::uint64_t) {
            return simple_weighted_select(report.weights, cfg.tau, oracle_rng);
        });

    report.ks = ks_two_sample(report.verasel_profile.frequencies(),
                              report.oracle_profile.frequencies(), cfg.alpha);
    report.reference_critical_3000 = ks_critical(3000, 3000, cfg.alpha);
    return report;
}

}  // namespace verasel
