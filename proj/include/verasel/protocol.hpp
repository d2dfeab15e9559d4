#pragma once

// Node-agent behaviors for the post and setup phases, plus the epoch state
// machine that drives post -> setup -> select and has every client compute
// the active set independently from board data.

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "verasel/board.hpp"
#include "verasel/messages.hpp"
#include "verasel/roster.hpp"
#include "verasel/seedchain.hpp"
#include "verasel/selection.hpp"

namespace verasel {

/// Honest registration: p_i = (pk_i, w_i) signed. Takes effect next epoch.
inline std::uint64_t node_post(const CryptoBackend& backend, const KeyPair& keys,
                               std::uint64_t weight, Board& board,
                               std::uint64_t epoch) {
    if (weight == 0) throw Error("node_post: weight must be >= 1");
    NodePostMsg msg{keys.public_key, weight};
    Bytes payload = msg.encode();
    Signature sig =
        backend.sign(view(keys.secret_key),
                     view(entry_signed_bytes(epoch, EntryKind::post, view(payload))));
    return board.post_entry(epoch, EntryKind::post, keys.public_key,
                            std::move(payload), std::move(sig));
}

/// Honest commitment: r_i = (y_i, pi_i) signed, with (y, pi) = VRF(sk, seed).
inline std::uint64_t node_setup(const CryptoBackend& backend, const KeyPair& keys,
                                Board& board, std::uint64_t epoch, ByteView seed) {
    VrfOutput out = backend.vrf_prove(view(keys.secret_key), seed);
    CommitmentMsg msg{std::move(out.commitment_y), std::move(out.proof_pi)};
    Bytes payload = msg.encode();
    Signature sig = backend.sign(
        view(keys.secret_key),
        view(entry_signed_bytes(epoch, EntryKind::commit, view(payload))));
    return board.post_entry(epoch, EntryKind::commit, keys.public_key,
                            std::move(payload), std::move(sig));
}

enum class Behavior {
    honest,
    silent_post,     // never posts: invisible to every epoch
    silent_setup,    // posts but never commits
    bad_proof,       // commits with a corrupted proof
    bad_signature,   // commits with a corrupted signature
    grinder,         // honest in-protocol; used by the grinding experiments
};

inline std::string_view to_string(Behavior b) {
    switch (b) {
        case Behavior::honest: return "honest";
        case Behavior::silent_post: return "silent_post";
        case Behavior::silent_setup: return "silent_setup";
        case Behavior::bad_proof: return "bad_proof";
        case Behavior::bad_signature: return "bad_signature";
        case Behavior::grinder: return "grinder";
    }
    throw Error("unknown behavior");
}

inline Behavior behavior_from_string(std::string_view s) {
    if (s == "honest") return Behavior::honest;
    if (s == "silent_post") return Behavior::silent_post;
    if (s == "silent_setup") return Behavior::silent_setup;
    if (s == "bad_proof") return Behavior::bad_proof;
    if (s == "bad_signature") return Behavior::bad_signature;
    if (s == "grinder") return Behavior::grinder;
    throw Error("unknown behavior: " + std::string(s));
}

struct NodeAgent {
    KeyPair keys;
    std::uint64_t weight = 1;
    Behavior behavior = Behavior::honest;
    std::uint32_t grind_attempts = 0;
    bool registered = false;
    std::uint64_t registered_at = 0;  // epoch of the registration post
};

/// How the elected proposer acts; scenario-wide override for seed-chain
/// experiments, with the default derived from the proposer's own behavior.
enum class ProposerMode { from_behavior, never, corrupt };

struct EpochResult {
    std::uint64_t epoch = 0;
    SeedRecord seed;
    ValidatedRoster roster;
    std::vector<ActiveSet> client_sets;
    bool degenerate = false;
    bool clients_agree = true;
    std::vector<std::pair<NodeId, std::string>> board_rejections;
    double post_ms = 0.0;
    double max_prove_ms = 0.0;
    double max_select_ms = 0.0;
};

namespace detail {

inline double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                     t0)
        .count();
}

// Commit with a valid signature over a corrupted proof: the board accepts
// it, clients discard it in select step (a).
inline void commit_with_bad_proof(const CryptoBackend& backend, const KeyPair& keys,
                                  Board& board, std::uint64_t epoch, ByteView seed) {
    VrfOutput out = backend.vrf_prove(view(keys.secret_key), seed);
    out.proof_pi[0] ^= 0x01;
    CommitmentMsg msg{std::move(out.commitment_y), std::move(out.proof_pi)};
    Bytes payload = msg.encode();
    Signature sig = backend.sign(
        view(keys.secret_key),
        view(entry_signed_bytes(epoch, EntryKind::commit, view(payload))));
    board.post_entry(epoch, EntryKind::commit, keys.public_key, std::move(payload),
                     std::move(sig));
}

// Attempt a commit whose signature does not verify. The board refuses it.
inline void try_commit_with_bad_signature(const CryptoBackend& backend,
                                          const KeyPair& keys, Board& board,
                                          std::uint64_t epoch, ByteView seed,
                                          EpochResult& result) {
    VrfOutput out = backend.vrf_prove(view(keys.secret_key), seed);
    CommitmentMsg msg{std::move(out.commitment_y), std::move(out.proof_pi)};
    Bytes payload = msg.encode();
    Signature sig = backend.sign(
        view(keys.secret_key),
        view(entry_signed_bytes(epoch, EntryKind::commit, view(payload))));
    sig[0] ^= 0x01;
    try {
        board.post_entry(epoch, EntryKind::commit, keys.public_key, std::move(payload),
                         std::move(sig));
    } catch (const BoardError& e) {
        result.board_rejections.emplace_back(keys.public_key, e.what());
    }
}

inline void propose_with_corrupt_proof(const CryptoBackend& backend,
                                       const KeyPair& keys, ByteView seed_prev,
                                       std::uint64_t epoch, Board& board) {
    VrfOutput out =
        backend.vrf_prove(view(keys.secret_key), view(seed_input(seed_prev, epoch)));
    out.proof_pi[0] ^= 0x01;
    SeedProposalMsg msg{std::move(out.commitment_y), std::move(out.proof_pi)};
    Bytes payload = msg.encode();
    Signature sig = backend.sign(
        view(keys.secret_key),
        view(entry_signed_bytes(epoch, EntryKind::seed_proposal, view(payload))));
    board.post_entry(epoch, EntryKind::seed_proposal, keys.public_key,
                     std::move(payload), std::move(sig));
}

}  // namespace detail

/// Run one full epoch cycle. Expects the board clock at (epoch, post);
/// leaves it at (epoch + 1, post). For epoch 0 the chain must already hold
/// the genesis record; later epochs derive their seed here.
inline EpochResult run_epoch(const CryptoBackend& backend,
                             std::vector<NodeAgent>& agents, Board& board,
                             SeedChain& chain, std::uint64_t epoch, Fraction tau,
                             std::uint32_t layers, int clients,
                             std::optional<ValidatedRoster> prev_roster = std::nullopt,
                             ProposerMode proposer_mode = ProposerMode::from_behavior) {
    if (board.clock() != PhaseClock{epoch, Phase::post}) {
        throw Error("run_epoch: board clock is not at (epoch, post)");
    }
    if (clients < 1) throw Error("run_epoch: need at least one client");
    EpochResult result;
    result.epoch = epoch;

    // Post phase. Nodes register once; registration persists until
    // superseded, so later epochs post nothing by default.
    auto post_t0 = std::chrono::steady_clock::now();
    for (auto& agent : agents) {
        if (agent.registered || agent.behavior == Behavior::silent_post) continue;
        node_post(backend, agent.keys, agent.weight, board, epoch);
        agent.registered = true;
        agent.registered_at = epoch;
    }
    result.post_ms = detail::ms_since(post_t0);
    board.advance_phase();

    // Setup phase: seed first, then commitments against it.
    if (epoch == 0) {
        if (!chain.has(0)) throw Error("run_epoch: epoch 0 requires a genesis seed");
    } else {
        if (!prev_roster) {
            prev_roster =
                client_collect(board, epoch - 1, chain.at(epoch - 1).seed_view());
        }
        auto proposer = elect_proposer(*prev_roster);
        if (proposer) {
            for (auto& agent : agents) {
                if (agent.keys.public_key != *proposer) continue;
                ByteView prev_seed = chain.at(epoch - 1).seed_view();
                bool propose_honestly = false, propose_corrupt = false;
                switch (proposer_mode) {
                    case ProposerMode::never: break;
                    case ProposerMode::corrupt: propose_corrupt = true; break;
                    case ProposerMode::from_behavior:
                        if (agent.behavior == Behavior::honest ||
                            agent.behavior == Behavior::grinder) {
                            propose_honestly = true;
                        } else if (agent.behavior == Behavior::bad_proof) {
                            propose_corrupt = true;
                        }
                        break;
                }
                if (propose_honestly) {
                    propose_seed(backend, agent.keys, prev_seed, epoch, board);
                } else if (propose_corrupt) {
                    detail::propose_with_corrupt_proof(backend, agent.keys, prev_seed,
                                                       epoch, board);
                }
                break;
            }
        }
        chain.push(derive_seed(chain, board, epoch, *prev_roster));
    }
    result.seed = chain.at(epoch);

    // Registrations take effect the epoch after posting, so freshly posted
    // agents sit out this setup phase.
    for (auto& agent : agents) {
        if (!agent.registered || agent.registered_at >= epoch) continue;
        switch (agent.behavior) {
            case Behavior::honest:
            case Behavior::grinder: {
                auto t0 = std::chrono::steady_clock::now();
                node_setup(backend, agent.keys, board, epoch, result.seed.seed_view());
                result.max_prove_ms = std::max(result.max_prove_ms, detail::ms_since(t0));
                break;
            }
            case Behavior::silent_setup:
                break;
            case Behavior::bad_proof:
                detail::commit_with_bad_proof(backend, agent.keys, board, epoch,
                                              result.seed.seed_view());
                break;
            case Behavior::bad_signature:
                detail::try_commit_with_bad_signature(backend, agent.keys, board, epoch,
                                                      result.seed.seed_view(), result);
                break;
            case Behavior::silent_post:
                break;
        }
    }
    board.advance_phase();

    // Select phase: every client runs the same read-only pipeline.
    for (int c = 0; c < clients; ++c) {
        auto t0 = std::chrono::steady_clock::now();
        ValidatedRoster roster = client_collect(board, epoch, result.seed.seed_view());
        ActiveSet active;
        active.epoch = epoch;
        active.threshold = tau;
        if (roster.members.empty()) {
            result.degenerate = true;
        } else {
            active = assign_layers(select_active_set(roster, tau), roster, layers);
        }
        result.max_select_ms = std::max(result.max_select_ms, detail::ms_since(t0));
        if (c == 0) result.roster = roster;
        result.client_sets.push_back(std::move(active));
    }
    for (const auto& set : result.client_sets) {
        if (set.canonical_string() != result.client_sets.front().canonical_string()) {
            result.clients_agree = false;
        }
    }

    board.advance_phase();
    return result;
}

/// Roster built directly from keypairs and weights with honest commitments
/// over `seed`. The statistical validation arms use this to run thousands
/// of selection trials without board machinery.
inline ValidatedRoster roster_from_keys(const CryptoBackend& backend,
                                        const std::vector<KeyPair>& keys,
                                        const std::vector<std::uint64_t>& weights,
                                        ByteView seed, std::uint64_t epoch = 0) {
    if (keys.size() != weights.size()) {
        throw Error("roster_from_keys: keys/weights size mismatch");
    }
    ValidatedRoster roster;
    roster.epoch = epoch;
    roster.seed.assign(seed.begin(), seed.end());
    roster.members.resize(keys.size());
    detail::parallel_for(keys.size(), [&](std::size_t i) {
        VrfOutput out = backend.vrf_prove(view(keys[i].secret_key), seed);
        RosterMember m;
        m.id = keys[i].public_key;
        m.weight = weights[i];
        m.hash_int = hash_to_int(view(out.commitment_y));
        m.commitment_y = std::move(out.commitment_y);
        roster.members[i] = std::move(m);
    });
    std::sort(roster.members.begin(), roster.members.end(),
              [](const RosterMember& a, const RosterMember& b) {
                  if (a.hash_int != b.hash_int) return a.hash_int < b.hash_int;
                  return a.id < b.id;
              });
    return roster;
}

}  // namespace verasel
