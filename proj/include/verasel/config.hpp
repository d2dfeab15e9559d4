#pragma once

// Flat key=value scenario configuration. '#' starts a comment; unknown keys
// and malformed values fail with the offending line number.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "verasel/adversary.hpp"
#include "verasel/stats.hpp"

namespace verasel {

struct RunConfig {
    std::size_t nodes = 0;                      // parametric node count
    std::vector<std::uint64_t> weights;         // explicit list, if given
    std::optional<std::string> weights_csv;     // csv path, if given
    std::uint64_t epochs = 1;
    Fraction tau{1, 2};
    std::uint32_t layers = 1;
    std::string backend = "mock";
    std::uint64_t rng_seed = 0;
    int clients = 2;
    ProposerMode proposer_mode = ProposerMode::from_behavior;
    std::vector<std::pair<std::size_t, ScenarioNodeSpec>> behaviors;  // index -> profile
    double bandwidth_mu = 1.58;
    double bandwidth_sigma = 1.2;
    std::uint64_t trials_a = 3000;
    std::uint64_t trials_b = 3000;
    double alpha = 0.05;

    /// Materialize weights: explicit list, then CSV, then parametric.
    std::vector<std::uint64_t> resolve_weights() const {
        if (!weights.empty()) return weights;
        if (weights_csv) return load_bandwidths_csv(*weights_csv);
        if (nodes == 0) throw Error("config: need one of nodes, weights, weights_csv");
        DetRng rng(rng_seed);
        return sample_bandwidths_parametric(nodes, bandwidth_mu, bandwidth_sigma, rng);
    }

    ScenarioSpec to_scenario() const {
        ScenarioSpec spec;
        auto resolved = resolve_weights();
        spec.nodes.reserve(resolved.size());
        for (auto w : resolved) spec.nodes.push_back(ScenarioNodeSpec{w});
        for (const auto& [idx, profile] : behaviors) {
            if (idx >= spec.nodes.size()) {
                throw Error("config: behavior index " + std::to_string(idx) +
                            " out of range for " + std::to_string(spec.nodes.size()) +
                            " nodes");
            }
            spec.nodes[idx].behavior = profile.behavior;
            spec.nodes[idx].grind_attempts = profile.grind_attempts;
        }
        spec.epochs = epochs;
        spec.tau = tau;
        spec.layers = layers;
        spec.backend = backend;
        spec.rng_seed = rng_seed;
        spec.clients = clients;
        spec.proposer_mode = proposer_mode;
        return spec;
    }
};

namespace detail {

inline std::string trim(std::string_view s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] inline void config_error(const std::filesystem::path& path,
                                      std::size_t lineno, const std::string& why) {
    throw Error("config " + path.string() + ":" + std::to_string(lineno) + ": " + why);
}

}  // namespace detail

inline RunConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file: " + path.string());
    RunConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string text = detail::trim(line);
        if (text.empty()) continue;
        auto eq = text.find('=');
        if (eq == std::string::npos) {
            detail::config_error(path, lineno, "expected key = value");
        }
        std::string key = detail::trim(text.substr(0, eq));
        std::string value = detail::trim(text.substr(eq + 1));
        if (value.empty()) detail::config_error(path, lineno, "empty value for " + key);
        try {
            if (key == "nodes") {
                cfg.nodes = std::stoull(value);
            } else if (key == "weights") {
                std::stringstream ss(value);
                std::string item;
                cfg.weights.clear();
                while (std::getline(ss, item, ',')) {
                    std::uint64_t w = std::stoull(detail::trim(item));
                    if (w == 0) throw Error("weights must be >= 1");
                    cfg.weights.push_back(w);
                }
            } else if (key == "weights_csv") {
                cfg.weights_csv = value;
            } else if (key == "epochs") {
                cfg.epochs = std::stoull(value);
            } else if (key == "tau") {
                cfg.tau = Fraction::parse(value);
                if (!cfg.tau.valid()) throw Error("tau must be in (0, 1]");
            } else if (key == "layers") {
                cfg.layers = static_cast<std::uint32_t>(std::stoul(value));
                if (cfg.layers == 0) throw Error("layers must be >= 1");
            } else if (key == "backend") {
                backend_by_name(value);  // validates
                cfg.backend = value;
            } else if (key == "rng_seed") {
                cfg.rng_seed = std::stoull(value);
            } else if (key == "clients") {
                cfg.clients = std::stoi(value);
                if (cfg.clients < 1) throw Error("clients must be >= 1");
            } else if (key == "proposer") {
                if (value == "honest") cfg.proposer_mode = ProposerMode::from_behavior;
                else if (value == "never") cfg.proposer_mode = ProposerMode::never;
                else if (value == "corrupt") cfg.proposer_mode = ProposerMode::corrupt;
                else throw Error("proposer must be honest, never, or corrupt");
            } else if (key == "behavior") {
                // index:kind[:attempts]
                auto c1 = value.find(':');
                if (c1 == std::string::npos) throw Error("behavior needs index:kind");
                std::size_t idx = std::stoull(value.substr(0, c1));
                std::string rest = value.substr(c1 + 1);
                auto c2 = rest.find(':');
                ScenarioNodeSpec profile;
                if (c2 == std::string::npos) {
                    profile.behavior = behavior_from_string(rest);
                } else {
                    profile.behavior = behavior_from_string(rest.substr(0, c2));
                    profile.grind_attempts =
                        static_cast<std::uint32_t>(std::stoul(rest.substr(c2 + 1)));
                }
                cfg.behaviors.emplace_back(idx, profile);
            } else if (key == "bandwidth_mu") {
                cfg.bandwidth_mu = std::stod(value);
            } else if (key == "bandwidth_sigma") {
                cfg.bandwidth_sigma = std::stod(value);
            } else if (key == "trials_a") {
                cfg.trials_a = std::stoull(value);
            } else if (key == "trials_b") {
                cfg.trials_b = std::stoull(value);
            } else if (key == "alpha") {
                cfg.alpha = std::stod(value);
                if (cfg.alpha <= 0.0 || cfg.alpha >= 1.0) {
                    throw Error("alpha must be in (0, 1)");
                }
            } else {
                throw Error("unknown key '" + key + "'");
            }
        } catch (const std::logic_error&) {
            detail::config_error(path, lineno, "malformed value for " + key);
        } catch (const Error& e) {
            detail::config_error(path, lineno, e.what());
        }
    }
    return cfg;
}

}  // namespace verasel
