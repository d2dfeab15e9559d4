#pragma once

// Append-only, phase-gated, signed message store. Entries are immutable
// once appended and carry board-assigned consecutive sequence numbers.
// The board is a single trusted process-local component; writers must be
// externally serialized, readers are safe concurrently.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "verasel/bytes.hpp"
#include "verasel/crypto.hpp"

namespace verasel {

enum class EntryKind : std::uint8_t {
    post = 0,
    commit = 1,
    seed_proposal = 2,
    genesis_commit = 3,
    genesis_reveal = 4,
};

enum class Phase : std::uint8_t {
    genesis_commit = 0,
    genesis_reveal = 1,
    post = 2,
    setup = 3,
    select = 4,
};

inline std::string_view to_string(EntryKind k) {
    switch (k) {
        case EntryKind::post: return "POST";
        case EntryKind::commit: return "COMMIT";
        case EntryKind::seed_proposal: return "SEED_PROPOSAL";
        case EntryKind::genesis_commit: return "GENESIS_COMMIT";
        case EntryKind::genesis_reveal: return "GENESIS_REVEAL";
    }
    throw Error("unknown entry kind");
}

inline std::string_view to_string(Phase p) {
    switch (p) {
        case Phase::genesis_commit: return "genesis_commit";
        case Phase::genesis_reveal: return "genesis_reveal";
        case Phase::post: return "post";
        case Phase::setup: return "setup";
        case Phase::select: return "select";
    }
    throw Error("unknown phase");
}

inline EntryKind entry_kind_from_string(std::string_view s) {
    if (s == "POST") return EntryKind::post;
    if (s == "COMMIT") return EntryKind::commit;
    if (s == "SEED_PROPOSAL") return EntryKind::seed_proposal;
    if (s == "GENESIS_COMMIT") return EntryKind::genesis_commit;
    if (s == "GENESIS_REVEAL") return EntryKind::genesis_reveal;
    throw Error("unknown entry kind: " + std::string(s));
}

inline Phase phase_from_string(std::string_view s) {
    if (s == "genesis_commit") return Phase::genesis_commit;
    if (s == "genesis_reveal") return Phase::genesis_reveal;
    if (s == "post") return Phase::post;
    if (s == "setup") return Phase::setup;
    if (s == "select") return Phase::select;
    throw Error("unknown phase: " + std::string(s));
}

struct BoardEntry {
    std::uint64_t epoch = 0;
    EntryKind kind = EntryKind::post;
    NodeId author;
    Bytes payload;
    Signature signature;
    std::uint64_t sequence = 0;
};

/// Bytes covered by an entry's signature: epoch || kind || payload.
inline Bytes entry_signed_bytes(std::uint64_t epoch, EntryKind kind, ByteView payload) {
    Bytes out;
    append_be64(out, epoch);
    out.push_back(static_cast<std::uint8_t>(kind));
    append(out, payload);
    return out;
}

struct PhaseClock {
    std::uint64_t epoch = 0;
    Phase phase = Phase::post;

    bool operator==(const PhaseClock&) const = default;
};

enum class BoardErrorCode {
    bad_signature,
    duplicate_entry,
    phase_violation,
    io,
    format,
    corrupt,
};

class BoardError : public Error {
public:
    BoardError(BoardErrorCode code, const std::string& what)
        : Error(what), code_(code) {}

    BoardErrorCode code() const { return code_; }

private:
    BoardErrorCode code_;
};

inline constexpr std::string_view kBoardFileTag = "verasel-board-v1";

class Board {
public:
    explicit Board(const CryptoBackend& backend) : backend_(&backend) {}

    /// A board whose clock starts in the pre-epoch-0 genesis commit window.
    static Board at_genesis(const CryptoBackend& backend) {
        Board b(backend);
        b.clock_ = PhaseClock{0, Phase::genesis_commit};
        return b;
    }

    const CryptoBackend& backend() const { return *backend_; }
    PhaseClock clock() const { return clock_; }
    const std::vector<BoardEntry>& entries() const { return entries_; }

    static bool kind_admissible(EntryKind kind, Phase phase) {
        switch (phase) {
            case Phase::genesis_commit: return kind == EntryKind::genesis_commit;
            case Phase::genesis_reveal: return kind == EntryKind::genesis_reveal;
            case Phase::post: return kind == EntryKind::post;
            case Phase::setup:
                return kind == EntryKind::commit || kind == EntryKind::seed_proposal;
            case Phase::select: return false;
        }
        return false;
    }

    /// Append a signed entry; returns the assigned sequence number.
    std::uint64_t post_entry(std::uint64_t epoch, EntryKind kind, NodeId author,
                             Bytes payload, Signature signature) {
        if (epoch != clock_.epoch || !kind_admissible(kind, clock_.phase)) {
            throw BoardError(BoardErrorCode::phase_violation,
                             std::string(to_string(kind)) + " not admissible at epoch " +
                                 std::to_string(clock_.epoch) + " phase " +
                                 std::string(to_string(clock_.phase)));
        }
        Bytes signed_bytes = entry_signed_bytes(epoch, kind, view(payload));
        if (!backend_->verify_sig(view(author), view(signed_bytes), view(signature))) {
            throw BoardError(BoardErrorCode::bad_signature,
                             "entry signature does not verify against author key");
        }
        auto key = std::make_tuple(epoch, static_cast<std::uint8_t>(kind), author);
        if (seen_.contains(key)) {
            throw BoardError(BoardErrorCode::duplicate_entry,
                             "author already posted " + std::string(to_string(kind)) +
                                 " in epoch " + std::to_string(epoch));
        }
        BoardEntry e{epoch, kind, std::move(author), std::move(payload),
                     std::move(signature), entries_.size()};
        seen_.insert(std::move(key));
        entries_.push_back(std::move(e));
        return entries_.back().sequence;
    }

    /// All entries for (epoch, kind), in sequence order.
    std::vector<BoardEntry> read_epoch(std::uint64_t epoch, EntryKind kind) const {
        std::vector<BoardEntry> out;
        for (const auto& e : entries_) {
            if (e.epoch == epoch && e.kind == kind) out.push_back(e);
        }
        return out;
    }

    /// All entries of a kind with epoch < epoch_exclusive, in sequence order.
    std::vector<BoardEntry> read_kind_before(std::uint64_t epoch_exclusive,
                                             EntryKind kind) const {
        std::vector<BoardEntry> out;
        for (const auto& e : entries_) {
            if (e.kind == kind && e.epoch < epoch_exclusive) out.push_back(e);
        }
        return out;
    }

    PhaseClock advance_phase() {
        switch (clock_.phase) {
            case Phase::genesis_commit: clock_.phase = Phase::genesis_reveal; break;
            case Phase::genesis_reveal: clock_.phase = Phase::post; break;
            case Phase::post: clock_.phase = Phase::setup; break;
            case Phase::setup: clock_.phase = Phase::select; break;
            case Phase::select:
                clock_.epoch += 1;
                clock_.phase = Phase::post;
                break;
        }
        return clock_;
    }

    // -- persistence --------------------------------------------------------
    //
    //   verasel-board-v1 <backend>
    //   clock <epoch> <phase>
    //   entry <seq> <epoch> <kind> <author-hex> <payload-hex> <sig-hex>
    //   digest <sha256-hex of all preceding bytes>

    std::string serialize() const {
        std::ostringstream out;
        out << kBoardFileTag << ' ' << backend_->name() << '\n';
        out << "clock " << clock_.epoch << ' ' << to_string(clock_.phase) << '\n';
        for (const auto& e : entries_) {
            out << "entry " << e.sequence << ' ' << e.epoch << ' ' << to_string(e.kind)
                << ' ' << to_hex(view(e.author)) << ' ' << to_hex(view(e.payload))
                << ' ' << to_hex(view(e.signature)) << '\n';
        }
        std::string body = out.str();
        Hash256 digest = sha256(view(body));
        return body + "digest " + digest.hex() + "\n";
    }

    void save(const std::filesystem::path& path) const {
        std::ofstream out(path, std::ios::trunc | std::ios::binary);
        if (!out) {
            throw BoardError(BoardErrorCode::io,
                             "cannot open board file for writing: " + path.string());
        }
        out << serialize();
        if (!out) {
            throw BoardError(BoardErrorCode::io, "failed writing board file: " + path.string());
        }
    }

    static Board deserialize(std::string_view text) {
        // The digest line covers every preceding byte, so any corruption in
        // the file body is caught before entries are interpreted.
        auto digest_pos = text.rfind("digest ");
        if (digest_pos == std::string_view::npos ||
            (digest_pos != 0 && text[digest_pos - 1] != '\n')) {
            throw BoardError(BoardErrorCode::format, "board file: missing digest line");
        }
        std::string_view body = text.substr(0, digest_pos);
        std::string_view digest_line = text.substr(digest_pos);
        std::string expected = "digest " + sha256(view(body)).hex() + "\n";
        if (digest_line != expected) {
            throw BoardError(BoardErrorCode::corrupt, "board file: digest mismatch");
        }

        std::istringstream in{std::string(body)};
        std::string tag, backend_name;
        if (!(in >> tag >> backend_name) || tag != kBoardFileTag) {
            throw BoardError(BoardErrorCode::format, "board file: bad header");
        }
        Board board(backend_by_name(backend_name));

        std::string label;
        std::uint64_t clock_epoch = 0;
        std::string phase_name;
        if (!(in >> label >> clock_epoch >> phase_name) || label != "clock") {
            throw BoardError(BoardErrorCode::format, "board file: bad clock line");
        }
        board.clock_ = PhaseClock{clock_epoch, phase_from_string(phase_name)};

        while (in >> label) {
            if (label != "entry") {
                throw BoardError(BoardErrorCode::format,
                                 "board file: unexpected record '" + label + "'");
            }
            std::uint64_t seq = 0, epoch = 0;
            std::string kind_name, author_hex, payload_hex, sig_hex;
            if (!(in >> seq >> epoch >> kind_name >> author_hex >> payload_hex >> sig_hex)) {
                throw BoardError(BoardErrorCode::format, "board file: truncated entry");
            }
            if (seq != board.entries_.size()) {
                throw BoardError(BoardErrorCode::corrupt,
                                 "board file: non-consecutive sequence " + std::to_string(seq));
            }
            BoardEntry e{epoch, entry_kind_from_string(kind_name), from_hex(author_hex),
                         from_hex(payload_hex), from_hex(sig_hex), seq};
            Bytes signed_bytes = entry_signed_bytes(e.epoch, e.kind, view(e.payload));
            if (!board.backend_->verify_sig(view(e.author), view(signed_bytes),
                                            view(e.signature))) {
                throw BoardError(BoardErrorCode::corrupt,
                                 "board file: signature check failed at sequence " +
                                     std::to_string(seq) + " author " + to_hex(view(e.author)));
            }
            auto key = std::make_tuple(e.epoch, static_cast<std::uint8_t>(e.kind), e.author);
            if (!board.seen_.insert(key).second) {
                throw BoardError(BoardErrorCode::corrupt,
                                 "board file: duplicate entry at sequence " + std::to_string(seq));
            }
            board.entries_.push_back(std::move(e));
        }
        return board;
    }

    static Board load(const std::filesystem::path& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw BoardError(BoardErrorCode::io, "cannot open board file: " + path.string());
        std::ostringstream buf;
        buf << in.rdbuf();
        return deserialize(buf.str());
    }

private:
    const CryptoBackend* backend_;
    std::vector<BoardEntry> entries_;
    PhaseClock clock_{0, Phase::post};
    std::set<std::tuple<std::uint64_t, std::uint8_t, NodeId>> seen_;
};

}  // namespace verasel
