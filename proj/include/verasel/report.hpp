#pragma once

// Deterministic rendering of run outputs (results and seeds CSV) and the
// board replay that recomputes them from a transcript alone. Simulation
// and verification share these renderers byte for byte: a transcript
// matches if and only if the replayed CSV content equals the recorded one.

#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "verasel/adversary.hpp"
#include "verasel/protocol.hpp"

namespace verasel {

struct EpochOutputs {
    std::uint64_t epoch = 0;
    SeedRecord seed;
    ValidatedRoster roster;
    ActiveSet active;
    bool degenerate = false;
};

inline constexpr std::string_view kResultsTag = "# verasel-results-v1";
inline constexpr std::string_view kSeedsTag = "# verasel-seeds-v1";

inline std::string render_results_csv(Fraction tau, std::uint32_t layers,
                                      std::string_view backend_name,
                                      const std::vector<EpochOutputs>& epochs) {
    std::ostringstream out;
    out << kResultsTag << " tau=" << tau.str() << " layers=" << layers
        << " backend=" << backend_name << '\n';
    out << "epoch,node_id,weight,selected,round,layer\n";
    for (const auto& ep : epochs) {
        std::map<NodeId, const SelectedNode*> chosen;
        for (const auto& s : ep.active.selected) chosen[s.id] = &s;
        std::map<NodeId, const RosterMember*> members;
        for (const auto& m : ep.roster.members) members[m.id] = &m;
        for (const auto& [id, m] : members) {
            out << ep.epoch << ',' << to_hex(view(id)) << ',' << m->weight << ',';
            auto it = chosen.find(id);
            if (it == chosen.end()) {
                out << "0,,";
            } else {
                out << "1," << it->second->round << ',' << ep.active.layer_of.at(id);
            }
            out << '\n';
        }
    }
    return out.str();
}

inline std::string render_seeds_csv(const SeedChain& chain) {
    std::ostringstream out;
    out << kSeedsTag << '\n';
    out << "epoch,seed,provenance,proposer\n";
    for (std::uint64_t e = 0; e < chain.size(); ++e) {
        const SeedRecord& r = chain.at(e);
        out << e << ',' << to_hex(ByteView(r.seed.data(), r.seed.size())) << ','
            << to_string(r.provenance) << ',';
        if (r.provenance == SeedProvenance::vrf_proposed) {
            out << to_hex(view(r.proposer));
        } else {
            out << '-';
        }
        out << '\n';
    }
    return out.str();
}

inline std::vector<EpochOutputs> outputs_from_transcript(
    const ScenarioTranscript& transcript) {
    std::vector<EpochOutputs> out;
    for (const auto& ep : transcript.epochs) {
        if (ep.epoch == 0) continue;  // bootstrap epoch has no candidates
        EpochOutputs o;
        o.epoch = ep.epoch;
        o.seed = ep.seed;
        o.roster = ep.roster;
        if (!ep.client_sets.empty()) o.active = ep.client_sets.front();
        o.degenerate = ep.degenerate;
        out.push_back(std::move(o));
    }
    return out;
}

struct Replay {
    SeedChain chain;
    std::vector<EpochOutputs> epochs;  // full epochs only (>= 1)
};

/// Independently recompute every epoch's seed, roster, and active set from
/// a board transcript. Epochs whose select phase has not completed on the
/// transcript's clock are not replayed.
inline Replay replay_board(const Board& board, Fraction tau, std::uint32_t layers) {
    Replay replay;
    const PhaseClock clock = board.clock();
    // An epoch is complete once the clock has moved past its select phase.
    const std::uint64_t completed_epochs =
        clock.phase == Phase::post ? clock.epoch : clock.epoch + 1;
    if (completed_epochs == 0) return replay;

    replay.chain.push(genesis_seed(board));
    ValidatedRoster prev_roster =
        client_collect(board, 0, replay.chain.at(0).seed_view());

    for (std::uint64_t e = 1; e < completed_epochs; ++e) {
        replay.chain.push(derive_seed(replay.chain, board, e, prev_roster));
        EpochOutputs o;
        o.epoch = e;
        o.seed = replay.chain.at(e);
        o.roster = client_collect(board, e, o.seed.seed_view());
        if (o.roster.members.empty()) {
            o.degenerate = true;
            o.active.epoch = e;
            o.active.threshold = tau;
        } else {
            o.active = assign_layers(select_active_set(o.roster, tau), o.roster, layers);
        }
        prev_roster = o.roster;
        replay.epochs.push_back(std::move(o));
    }
    return replay;
}

/// Human-readable run summary. Timing values are wall-clock and therefore
/// excluded from verification.
inline std::string render_summary(const ScenarioTranscript& t) {
    std::ostringstream out;
    out << "scenario: nodes=" << t.agents.size() << " epochs=" << t.spec.epochs
        << " tau=" << t.spec.tau.str() << " layers=" << t.spec.layers
        << " backend=" << t.spec.backend << " clients=" << t.spec.clients
        << " rng_seed=" << t.spec.rng_seed << '\n';
    if (t.genesis_failed) {
        out << "genesis: FAILED (zero valid reveals)\n";
        return out.str();
    }
    out << "client_agreement: " << (t.all_agree ? "true" : "false") << '\n';
    out << "degenerate_epochs: " << (t.any_degenerate ? "present" : "none") << '\n';
    for (const auto& ep : t.epochs) {
        out << "epoch " << ep.epoch << ": members=" << ep.roster.members.size()
            << " rejected=" << ep.roster.rejected.size()
            << " selected=" << (ep.client_sets.empty() ? 0 : ep.client_sets[0].selected.size())
            << " agree=" << (ep.clients_agree ? "true" : "false")
            << " post_ms=" << ep.post_ms
            << " max_prove_ms=" << ep.max_prove_ms
            << " max_select_ms=" << ep.max_select_ms << '\n';
        for (const auto& [id, reason] : ep.roster.rejected) {
            out << "  rejected " << to_hex(view(id)) << ' ' << to_string(reason) << '\n';
        }
        for (const auto& [id, why] : ep.board_rejections) {
            out << "  board_refused " << to_hex(view(id)) << ' ' << why << '\n';
        }
    }
    return out.str();
}

}  // namespace verasel
