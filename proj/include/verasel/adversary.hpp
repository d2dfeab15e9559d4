#pragma once

// Misbehaving-node scenarios and grinding experiments. Scenarios drive the
// full multi-epoch protocol against a mix of behavior profiles and record
// everything needed for replay; the grinding harness measures what the
// post-before-seed phase ordering is protecting against.

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "verasel/protocol.hpp"
#include "verasel/rng.hpp"

namespace verasel {

struct ScenarioNodeSpec {
    std::uint64_t weight = 1;
    Behavior behavior = Behavior::honest;
    std::uint32_t grind_attempts = 0;
};

struct ScenarioSpec {
    std::vector<ScenarioNodeSpec> nodes;
    std::uint64_t epochs = 1;  // full epochs 1..epochs; epoch 0 is bootstrap
    Fraction tau{1, 2};
    std::uint32_t layers = 1;
    std::string backend = "mock";
    std::uint64_t rng_seed = 0;
    int clients = 2;
    ProposerMode proposer_mode = ProposerMode::from_behavior;
};

struct ScenarioTranscript {
    ScenarioSpec spec;
    std::vector<NodeAgent> agents;
    Board board;
    SeedChain chain;
    std::vector<EpochResult> epochs;  // index = epoch, starting at 0
    bool all_agree = true;
    bool any_degenerate = false;  // over full epochs (>= 1)
    bool genesis_failed = false;

    explicit ScenarioTranscript(const CryptoBackend& backend) : board(backend) {}
};

/// Deterministic per-node key material for a scenario.
inline KeyPair scenario_keypair(const CryptoBackend& backend, std::uint64_t rng_seed,
                                std::uint64_t index) {
    auto seed = DetRng::derive("verasel.node-key", rng_seed, index);
    return backend.keygen(ByteView(seed.data(), seed.size()));
}

/// End-to-end multi-epoch simulation: genesis commit/reveal, then
/// post/setup/select cycles for epochs 0..spec.epochs with at least two
/// independent clients per epoch.
inline ScenarioTranscript run_scenario(const ScenarioSpec& spec) {
    if (spec.nodes.empty()) throw Error("scenario: need at least one node");
    if (!spec.tau.valid()) throw Error("scenario: threshold must be in (0, 1]");
    if (spec.layers == 0) throw Error("scenario: layers must be >= 1");
    if (spec.clients < 1) throw Error("scenario: need at least one client");
    const CryptoBackend& backend = backend_by_name(spec.backend);

    ScenarioTranscript transcript(backend);
    transcript.spec = spec;
    transcript.board = Board::at_genesis(backend);

    for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
        if (spec.nodes[i].weight == 0) throw Error("scenario: weights must be >= 1");
        NodeAgent agent;
        agent.keys = scenario_keypair(backend, spec.rng_seed, i);
        agent.weight = spec.nodes[i].weight;
        agent.behavior = spec.nodes[i].behavior;
        agent.grind_attempts = spec.nodes[i].grind_attempts;
        transcript.agents.push_back(std::move(agent));
    }

    // Genesis: every node that participates at all joins the commit-and-reveal.
    std::vector<std::array<std::uint8_t, 32>> nonces(transcript.agents.size());
    for (std::size_t i = 0; i < transcript.agents.size(); ++i) {
        nonces[i] = DetRng::derive("verasel.genesis-nonce", spec.rng_seed, i);
        if (transcript.agents[i].behavior == Behavior::silent_post) continue;
        genesis_commit_post(backend, transcript.agents[i].keys,
                            ByteView(nonces[i].data(), 32), transcript.board);
    }
    transcript.board.advance_phase();
    for (std::size_t i = 0; i < transcript.agents.size(); ++i) {
        if (transcript.agents[i].behavior == Behavior::silent_post) continue;
        genesis_reveal_post(backend, transcript.agents[i].keys,
                            ByteView(nonces[i].data(), 32), transcript.board);
    }
    transcript.board.advance_phase();  // -> (0, post)

    try {
        transcript.chain.push(genesis_seed(transcript.board));
    } catch (const Error&) {
        transcript.genesis_failed = true;
        transcript.any_degenerate = true;
        return transcript;
    }

    std::optional<ValidatedRoster> prev_roster;
    for (std::uint64_t e = 0; e <= spec.epochs; ++e) {
        EpochResult result =
            run_epoch(backend, transcript.agents, transcript.board, transcript.chain, e,
                      spec.tau, spec.layers, spec.clients, prev_roster,
                      spec.proposer_mode);
        prev_roster = result.roster;
        if (e >= 1) {
            transcript.all_agree = transcript.all_agree && result.clients_agree;
            transcript.any_degenerate = transcript.any_degenerate || result.degenerate;
        }
        transcript.epochs.push_back(std::move(result));
    }
    return transcript;
}

// --- grinding ----------------------------------------------------------------

inline NodeId first_selected(const ValidatedRoster& roster) {
    detail::WeightedIndex index([&] {
        std::vector<std::uint64_t> w;
        for (const auto& m : roster.members) w.push_back(m.weight);
        return w;
    }());
    const std::uint64_t idx = draw_stream(roster, 1).mod(index.total());
    return roster.members[index.find(idx)].id;
}

struct GrindResult {
    std::optional<KeyPair> best_key;
    bool selected_round1 = false;
    std::uint64_t attempts_used = 0;
};

/// Try up to `attempts` keys against `grind_seed`, keeping the first that
/// wins round 1; report whether that key wins round 1 under `select_seed`.
/// With grind_seed == select_seed this measures the advantage the protocol's
/// phase ordering prevents; with an independent grind_seed it measures the
/// honest-order baseline.
inline GrindResult grind_keys(const CryptoBackend& backend,
                              const std::vector<KeyPair>& honest_keys,
                              const std::vector<std::uint64_t>& honest_weights,
                              std::uint64_t adversary_weight, ByteView grind_seed,
                              ByteView select_seed, std::uint64_t attempts,
                              std::uint64_t rng_seed) {
    GrindResult result;
    if (attempts == 0) return result;

    std::vector<KeyPair> keys = honest_keys;
    std::vector<std::uint64_t> weights = honest_weights;
    keys.emplace_back();
    weights.push_back(adversary_weight);

    for (std::uint64_t j = 0; j < attempts; ++j) {
        auto seed = DetRng::derive("verasel.grind-key", rng_seed, j);
        keys.back() = backend.keygen(ByteView(seed.data(), seed.size()));
        result.best_key = keys.back();
        result.attempts_used = j + 1;
        ValidatedRoster roster = roster_from_keys(backend, keys, weights, grind_seed);
        if (first_selected(roster) == keys.back().public_key) break;
    }

    keys.back() = *result.best_key;
    ValidatedRoster roster = roster_from_keys(backend, keys, weights, select_seed);
    result.selected_round1 = first_selected(roster) == keys.back().public_key;
    return result;
}

struct GrindingExperiment {
    std::uint64_t trials = 0;
    double expected = 0.0;          // w_adv / W
    double baseline_freq = 0.0;     // one fixed key, fresh seeds
    double honest_order_freq = 0.0; // k keys ground against a wrong seed guess
    double seed_known_freq = 0.0;   // k keys ground against the real seed
    double z_honest_vs_baseline = 0.0;  // two-proportion z statistic
};

inline double two_proportion_z(double successes_a, double trials_a,
                               double successes_b, double trials_b) {
    const double p_pool = (successes_a + successes_b) / (trials_a + trials_b);
    const double denom =
        std::sqrt(p_pool * (1.0 - p_pool) * (1.0 / trials_a + 1.0 / trials_b));
    if (denom == 0.0) return 0.0;
    return (successes_a / trials_a - successes_b / trials_b) / denom;
}

/// Monte Carlo over fresh epoch seeds: baseline (k = 1), honest-order
/// grinding (keys ground before the seed is known) and seed-known grinding
/// (phase ordering inverted).
inline GrindingExperiment run_grinding_experiment(
    const CryptoBackend& backend, const std::vector<std::uint64_t>& honest_weights,
    std::uint64_t adversary_weight, std::uint64_t attempts, std::uint64_t trials,
    std::uint64_t rng_seed) {
    std::vector<KeyPair> honest_keys;
    for (std::size_t i = 0; i < honest_weights.size(); ++i) {
        honest_keys.push_back(scenario_keypair(backend, rng_seed, i));
    }
    std::uint64_t total = adversary_weight;
    for (auto w : honest_weights) total += w;

    GrindingExperiment exp;
    exp.trials = trials;
    exp.expected = static_cast<double>(adversary_weight) / static_cast<double>(total);

    std::uint64_t baseline_hits = 0, honest_hits = 0, known_hits = 0;

    // Baseline key is fixed once, before any seed exists.
    KeyPair fixed_key;
    {
        auto seed = DetRng::derive("verasel.grind-key", rng_seed ^ 0x1, 0);
        fixed_key = backend.keygen(ByteView(seed.data(), seed.size()));
    }
    std::vector<KeyPair> keys = honest_keys;
    std::vector<std::uint64_t> weights = honest_weights;
    keys.push_back(fixed_key);
    weights.push_back(adversary_weight);

    for (std::uint64_t t = 0; t < trials; ++t) {
        auto epoch_seed = DetRng::derive("verasel.grind-epoch-seed", rng_seed, t);
        auto guess_seed = DetRng::derive("verasel.grind-guess-seed", rng_seed, t);
        ByteView seed_v(epoch_seed.data(), 32);
        ByteView guess_v(guess_seed.data(), 32);

        keys.back() = fixed_key;
        ValidatedRoster roster = roster_from_keys(backend, keys, weights, seed_v);
        if (first_selected(roster) == fixed_key.public_key) ++baseline_hits;

        GrindResult honest = grind_keys(backend, honest_keys, honest_weights,
                                        adversary_weight, guess_v, seed_v, attempts,
                                        rng_seed + t * 0x9e3779b97f4a7c15ULL);
        if (honest.selected_round1) ++honest_hits;

        GrindResult known = grind_keys(backend, honest_keys, honest_weights,
                                       adversary_weight, seed_v, seed_v, attempts,
                                       rng_seed + t * 0x9e3779b97f4a7c15ULL);
        if (known.selected_round1) ++known_hits;
    }

    const double t = static_cast<double>(trials);
    exp.baseline_freq = static_cast<double>(baseline_hits) / t;
    exp.honest_order_freq = static_cast<double>(honest_hits) / t;
    exp.seed_known_freq = static_cast<double>(known_hits) / t;
    exp.z_honest_vs_baseline =
        two_proportion_z(static_cast<double>(honest_hits), t,
                         static_cast<double>(baseline_hits), t);
    return exp;
}

}  // namespace verasel
