#pragma once

// Per-epoch seed management: commit-and-reveal genesis, VRF proposer
// seeding with hash fallback, and proposer election by minimum commitment.
// Given a board transcript and seed_0, every party derives the identical
// seed for every epoch.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "verasel/board.hpp"
#include "verasel/messages.hpp"
#include "verasel/roster.hpp"

namespace verasel {

enum class SeedProvenance { genesis, vrf_proposed, fallback };

inline std::string_view to_string(SeedProvenance p) {
    switch (p) {
        case SeedProvenance::genesis: return "GENESIS";
        case SeedProvenance::vrf_proposed: return "VRF_PROPOSED";
        case SeedProvenance::fallback: return "FALLBACK";
    }
    throw Error("unknown seed provenance");
}

struct SeedRecord {
    std::uint64_t epoch = 0;
    std::array<std::uint8_t, 32> seed{};
    SeedProvenance provenance = SeedProvenance::fallback;
    NodeId proposer;      // vrf_proposed only
    Bytes proposal_y;     // vrf_proposed only
    Bytes proposal_pi;    // vrf_proposed only

    ByteView seed_view() const { return ByteView(seed.data(), seed.size()); }
};

class SeedChain {
public:
    /// Records must arrive in epoch order with no gaps.
    void push(SeedRecord record) {
        if (record.epoch != records_.size()) {
            throw Error("seed chain: expected epoch " + std::to_string(records_.size()) +
                        ", got " + std::to_string(record.epoch));
        }
        records_.push_back(std::move(record));
    }

    bool has(std::uint64_t epoch) const { return epoch < records_.size(); }

    const SeedRecord& at(std::uint64_t epoch) const {
        if (!has(epoch)) {
            throw Error("seed chain: no record for epoch " + std::to_string(epoch));
        }
        return records_[epoch];
    }

    std::uint64_t size() const { return records_.size(); }

private:
    std::vector<SeedRecord> records_;
};

/// VRF input for epoch e: seed_{e-1} || e.
inline Bytes seed_input(ByteView seed_prev, std::uint64_t epoch) {
    Bytes out(seed_prev.begin(), seed_prev.end());
    append_be64(out, epoch);
    return out;
}

/// Seeds are fixed-width 32 bytes on every provenance branch; longer VRF
/// outputs are digested down.
inline std::array<std::uint8_t, 32> vrf_output_to_seed(ByteView y) {
    if (y.size() == 32) {
        std::array<std::uint8_t, 32> out;
        std::memcpy(out.data(), y.data(), 32);
        return out;
    }
    return sha256(y).bytes;
}

// --- genesis (commit-and-reveal before epoch 0) ------------------------------

inline std::uint64_t genesis_commit_post(const CryptoBackend& backend,
                                         const KeyPair& keys, ByteView nonce,
                                         Board& board) {
    if (nonce.size() != 32) throw Error("genesis commit: nonce must be 32 bytes");
    GenesisCommitMsg msg{sha256(nonce)};
    Bytes payload = msg.encode();
    Signature sig = backend.sign(
        view(keys.secret_key),
        view(entry_signed_bytes(0, EntryKind::genesis_commit, view(payload))));
    return board.post_entry(0, EntryKind::genesis_commit, keys.public_key,
                            std::move(payload), std::move(sig));
}

inline std::uint64_t genesis_reveal_post(const CryptoBackend& backend,
                                         const KeyPair& keys, ByteView nonce,
                                         Board& board) {
    if (nonce.size() != 32) throw Error("genesis reveal: nonce must be 32 bytes");
    // Refuse locally unless a matching commitment is on the board.
    bool committed = false;
    for (const auto& e : board.read_epoch(0, EntryKind::genesis_commit)) {
        if (e.author != keys.public_key) continue;
        GenesisCommitMsg c = GenesisCommitMsg::decode(view(e.payload));
        if (c.nonce_hash == sha256(nonce)) committed = true;
        break;
    }
    if (!committed) {
        throw Error("genesis reveal: no matching commitment for this nonce");
    }
    GenesisRevealMsg msg{Bytes(nonce.begin(), nonce.end())};
    Bytes payload = msg.encode();
    Signature sig = backend.sign(
        view(keys.secret_key),
        view(entry_signed_bytes(0, EntryKind::genesis_reveal, view(payload))));
    return board.post_entry(0, EntryKind::genesis_reveal, keys.public_key,
                            std::move(payload), std::move(sig));
}

/// seed_0 = XOR of all correctly revealed nonces. Parties that committed but
/// failed to reveal (or revealed a non-matching nonce) are excluded.
inline SeedRecord genesis_seed(const Board& board) {
    std::map<NodeId, Hash256> commitments;
    for (const auto& e : board.read_epoch(0, EntryKind::genesis_commit)) {
        try {
            commitments[e.author] = GenesisCommitMsg::decode(view(e.payload)).nonce_hash;
        } catch (const Error&) {
            // Undecodable commitment: party simply never joins the XOR.
        }
    }
    std::array<std::uint8_t, 32> seed{};
    std::size_t valid = 0;
    for (const auto& e : board.read_epoch(0, EntryKind::genesis_reveal)) {
        auto it = commitments.find(e.author);
        if (it == commitments.end()) continue;
        Bytes nonce;
        try {
            nonce = GenesisRevealMsg::decode(view(e.payload)).nonce;
        } catch (const Error&) {
            continue;
        }
        if (nonce.size() != 32 || sha256(view(nonce)) != it->second) continue;
        for (std::size_t i = 0; i < 32; ++i) seed[i] ^= nonce[i];
        ++valid;
    }
    if (valid == 0) throw Error("genesis failure: zero valid reveals");
    SeedRecord r;
    r.epoch = 0;
    r.seed = seed;
    r.provenance = SeedProvenance::genesis;
    return r;
}

// --- per-epoch seeds ---------------------------------------------------------

/// §3.3 election: the member with the minimum commitment value in the
/// previous epoch's roster, i.e. its first element in sorted order.
inline std::optional<NodeId> elect_proposer(const ValidatedRoster& prev_roster) {
    if (prev_roster.members.empty()) return std::nullopt;
    return prev_roster.members.front().id;
}

/// Proposer posts (seed_e, pi_e) = VRF(sk_g, seed_{e-1} || e) during setup.
inline std::uint64_t propose_seed(const CryptoBackend& backend, const KeyPair& proposer,
                                  ByteView seed_prev, std::uint64_t epoch,
                                  Board& board) {
    VrfOutput out = backend.vrf_prove(view(proposer.secret_key),
                                      view(seed_input(seed_prev, epoch)));
    SeedProposalMsg msg{std::move(out.commitment_y), std::move(out.proof_pi)};
    Bytes payload = msg.encode();
    Signature sig = backend.sign(
        view(proposer.secret_key),
        view(entry_signed_bytes(epoch, EntryKind::seed_proposal, view(payload))));
    return board.post_entry(epoch, EntryKind::seed_proposal, proposer.public_key,
                            std::move(payload), std::move(sig));
}

/// A valid proposal from the elected proposer wins; anything else (no
/// proposal, corrupt proof, non-elected author) falls back to
/// seed_e = H(seed_{e-1} || e).
inline SeedRecord derive_seed(const SeedChain& chain, const Board& board,
                              std::uint64_t epoch,
                              const ValidatedRoster& prev_roster) {
    if (epoch == 0) throw Error("derive_seed: epoch 0 comes from genesis");
    const SeedRecord& prev = chain.at(epoch - 1);
    const CryptoBackend& backend = board.backend();

    SeedRecord r;
    r.epoch = epoch;

    auto proposer = elect_proposer(prev_roster);
    if (proposer) {
        Bytes input = seed_input(prev.seed_view(), epoch);
        for (const auto& e : board.read_epoch(epoch, EntryKind::seed_proposal)) {
            if (e.author != *proposer) continue;  // non-elected proposals are ignored
            try {
                SeedProposalMsg msg = SeedProposalMsg::decode(view(e.payload));
                Bytes signed_bytes =
                    entry_signed_bytes(e.epoch, EntryKind::seed_proposal, view(e.payload));
                if (!backend.verify_sig(view(e.author), view(signed_bytes),
                                        view(e.signature))) {
                    continue;
                }
                VrfOutput out{msg.vrf_y, msg.proof_pi};
                if (backend.vrf_verify(view(e.author), view(input), out) !=
                    VrfResult::valid) {
                    continue;
                }
                r.seed = vrf_output_to_seed(view(msg.vrf_y));
                r.provenance = SeedProvenance::vrf_proposed;
                r.proposer = *proposer;
                r.proposal_y = std::move(msg.vrf_y);
                r.proposal_pi = std::move(msg.proof_pi);
                return r;
            } catch (const Error&) {
                continue;  // undecodable proposal: treated as invalid
            }
        }
    }

    r.seed = sha256(view(seed_input(prev.seed_view(), epoch))).bytes;
    r.provenance = SeedProvenance::fallback;
    return r;
}

}  // namespace verasel
