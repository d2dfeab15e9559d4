#pragma once

// Client-side collection pipeline: turn board contents for an epoch into a
// validated, deterministically ordered roster, with machine-readable
// rejection reasons for everything that failed a check.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <map>
#include <optional>
#include <thread>
#include <vector>

#include "verasel/board.hpp"
#include "verasel/messages.hpp"

namespace verasel {

enum class RejectReason {
    bad_post_signature,
    bad_commit_signature,
    invalid_vrf,
    missing_post,
    missing_commitment,
    invalid_payload,
    invalid_weight,
};

inline std::string_view to_string(RejectReason r) {
    switch (r) {
        case RejectReason::bad_post_signature: return "BadPostSignature";
        case RejectReason::bad_commit_signature: return "BadCommitSignature";
        case RejectReason::invalid_vrf: return "InvalidVrf";
        case RejectReason::missing_post: return "MissingPost";
        case RejectReason::missing_commitment: return "MissingCommitment";
        case RejectReason::invalid_payload: return "InvalidPayload";
        case RejectReason::invalid_weight: return "InvalidWeight";
    }
    throw Error("unknown reject reason");
}

struct RosterMember {
    NodeId id;
    std::uint64_t weight = 0;
    Bytes commitment_y;
    Hash256 hash_int;  // hash_to_int(commitment_y), the sort key
};

struct ValidatedRoster {
    std::uint64_t epoch = 0;
    Bytes seed;
    std::vector<RosterMember> members;  // ascending (hash_int, id)
    std::vector<std::pair<NodeId, RejectReason>> rejected;  // ascending id

    std::uint64_t total_weight() const {
        std::uint64_t w = 0;
        for (const auto& m : members) w += m.weight;
        return w;
    }
};

namespace detail {

inline thread_local bool parallel_for_nested = false;

template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const unsigned hw = std::thread::hardware_concurrency();
    const std::size_t workers = std::min<std::size_t>(hw ? hw : 1, n);
    if (parallel_for_nested || workers <= 1 || n < 32) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            parallel_for_nested = true;
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace detail

/// Core validation over raw entry lists. posts: all POST entries from epochs
/// before `epoch` (latest per author wins); commits: COMMIT entries of
/// `epoch`. Pure function of its inputs.
inline ValidatedRoster validate_entries(const CryptoBackend& backend,
                                        const std::vector<BoardEntry>& posts,
                                        const std::vector<BoardEntry>& commits,
                                        std::uint64_t epoch, ByteView seed) {
    ValidatedRoster roster;
    roster.epoch = epoch;
    roster.seed.assign(seed.begin(), seed.end());

    // Latest registration per author. Entries arrive in sequence order, so
    // a plain overwrite implements "latest POST wins".
    std::map<NodeId, const BoardEntry*> latest_post;
    for (const auto& e : posts) latest_post[e.author] = &e;

    std::map<NodeId, const BoardEntry*> commit_of;
    for (const auto& e : commits) commit_of[e.author] = &e;

    struct Candidate {
        NodeId id;
        const BoardEntry* post;    // may be null
        const BoardEntry* commit;  // may be null
        std::uint64_t weight = 0;
        VrfOutput vrf;
        std::optional<RejectReason> reject;
    };
    std::vector<Candidate> candidates;
    for (const auto& [id, e] : latest_post) {
        auto it = commit_of.find(id);
        candidates.push_back(
            Candidate{id, e, it == commit_of.end() ? nullptr : it->second});
    }
    for (const auto& [id, e] : commit_of) {
        if (!latest_post.contains(id)) candidates.push_back(Candidate{id, nullptr, e});
    }

    // Structural checks first; they can throw on decode and are cheap.
    for (auto& c : candidates) {
        if (c.post == nullptr) {
            c.reject = RejectReason::missing_post;
            continue;
        }
        try {
            NodePostMsg msg = NodePostMsg::decode(view(c.post->payload));
            if (msg.public_key != c.id) {
                c.reject = RejectReason::invalid_payload;
                continue;
            }
            if (msg.weight == 0) {
                c.reject = RejectReason::invalid_weight;
                continue;
            }
            c.weight = msg.weight;
        } catch (const Error&) {
            c.reject = RejectReason::invalid_payload;
            continue;
        }
        if (c.commit == nullptr) {
            c.reject = RejectReason::missing_commitment;
            continue;
        }
        try {
            CommitmentMsg msg = CommitmentMsg::decode(view(c.commit->payload));
            c.vrf = VrfOutput{std::move(msg.commitment_y), std::move(msg.proof_pi)};
        } catch (const Error&) {
            c.reject = RejectReason::invalid_payload;
        }
    }

    // Signature and VRF checks dominate at scale; fan them out.
    detail::parallel_for(candidates.size(), [&](std::size_t i) {
        auto& c = candidates[i];
        if (c.reject) return;
        Bytes post_bytes =
            entry_signed_bytes(c.post->epoch, EntryKind::post, view(c.post->payload));
        if (!backend.verify_sig(view(c.id), view(post_bytes), view(c.post->signature))) {
            c.reject = RejectReason::bad_post_signature;
            return;
        }
        Bytes commit_bytes = entry_signed_bytes(c.commit->epoch, EntryKind::commit,
                                                view(c.commit->payload));
        if (!backend.verify_sig(view(c.id), view(commit_bytes),
                                view(c.commit->signature))) {
            c.reject = RejectReason::bad_commit_signature;
            return;
        }
        if (backend.vrf_verify(view(c.id), seed, c.vrf) != VrfResult::valid) {
            c.reject = RejectReason::invalid_vrf;
        }
    });

    for (auto& c : candidates) {
        if (c.reject) {
            roster.rejected.emplace_back(std::move(c.id), *c.reject);
        } else {
            RosterMember m;
            m.id = std::move(c.id);
            m.weight = c.weight;
            m.hash_int = hash_to_int(view(c.vrf.commitment_y));
            m.commitment_y = std::move(c.vrf.commitment_y);
            roster.members.push_back(std::move(m));
        }
    }

    std::sort(roster.members.begin(), roster.members.end(),
              [](const RosterMember& a, const RosterMember& b) {
                  if (a.hash_int != b.hash_int) return a.hash_int < b.hash_int;
                  return a.id < b.id;
              });
    std::sort(roster.rejected.begin(), roster.rejected.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return roster;
}

/// §3.2 select pre-steps and step (a): download, check signatures, verify
/// commitments, sort. Registrations take effect one epoch after posting.
inline ValidatedRoster client_collect(const Board& board, std::uint64_t epoch,
                                      ByteView seed) {
    return validate_entries(board.backend(),
                            board.read_kind_before(epoch, EntryKind::post),
                            board.read_epoch(epoch, EntryKind::commit), epoch, seed);
}

}  // namespace verasel
