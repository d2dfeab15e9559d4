#include <catch2/catch_amalgamated.hpp>

#include "verasel/protocol.hpp"
#include "verasel/rng.hpp"
#include "verasel/seedchain.hpp"

using namespace verasel;

namespace {

const CryptoBackend& B() { return mock_backend(); }

KeyPair key_n(std::uint64_t i) {
    auto seed = DetRng::derive("seedchain-test-key", 0, i);
    return B().keygen(ByteView(seed.data(), 32));
}

std::array<std::uint8_t, 32> nonce_n(std::uint64_t i) {
    return DetRng::derive("seedchain-test-nonce", 0, i);
}

}  // namespace

TEST_CASE("genesis commit and reveal round trip") {
    crypto_init();
    Board board = Board::at_genesis(B());
    KeyPair a = key_n(1), b = key_n(2);
    auto na = nonce_n(1), nb = nonce_n(2);

    genesis_commit_post(B(), a, ByteView(na.data(), 32), board);
    genesis_commit_post(B(), b, ByteView(nb.data(), 32), board);
    board.advance_phase();  // reveal window
    genesis_reveal_post(B(), a, ByteView(na.data(), 32), board);
    genesis_reveal_post(B(), b, ByteView(nb.data(), 32), board);
    board.advance_phase();  // post(0); reveal window closed

    SeedRecord r = genesis_seed(board);
    CHECK(r.epoch == 0);
    CHECK(r.provenance == SeedProvenance::genesis);
    for (std::size_t i = 0; i < 32; ++i) {
        CHECK(r.seed[i] == (na[i] ^ nb[i]));
    }
}

TEST_CASE("reveal must match the committed hash and follow a commit") {
    Board board = Board::at_genesis(B());
    KeyPair a = key_n(1);
    auto na = nonce_n(1), other = nonce_n(9);

    // Reveal before any commit: locally refused.
    board.advance_phase();
    CHECK_THROWS_AS(genesis_reveal_post(B(), a, ByteView(na.data(), 32), board), Error);

    Board board2 = Board::at_genesis(B());
    genesis_commit_post(B(), a, ByteView(na.data(), 32), board2);
    board2.advance_phase();
    // Non-matching nonce: locally refused.
    CHECK_THROWS_AS(genesis_reveal_post(B(), a, ByteView(other.data(), 32), board2),
                    Error);
    genesis_reveal_post(B(), a, ByteView(na.data(), 32), board2);
    board2.advance_phase();

    SeedRecord r = genesis_seed(board2);
    for (std::size_t i = 0; i < 32; ++i) CHECK(r.seed[i] == na[i]);
}

TEST_CASE("genesis excludes non-revealers; identical nonces cancel") {
    Board board = Board::at_genesis(B());
    KeyPair a = key_n(1), b = key_n(2), c = key_n(3);
    auto n = nonce_n(7);

    // a and b commit the same nonce; c commits but never reveals.
    genesis_commit_post(B(), a, ByteView(n.data(), 32), board);
    genesis_commit_post(B(), b, ByteView(n.data(), 32), board);
    genesis_commit_post(B(), c, ByteView(nonce_n(3).data(), 32), board);
    board.advance_phase();
    genesis_reveal_post(B(), a, ByteView(n.data(), 32), board);
    genesis_reveal_post(B(), b, ByteView(n.data(), 32), board);
    board.advance_phase();

    // XOR cancellation is documented behavior, not prevented.
    SeedRecord r = genesis_seed(board);
    for (auto byte : r.seed) CHECK(byte == 0);
}

TEST_CASE("genesis with zero valid reveals fails") {
    Board board = Board::at_genesis(B());
    KeyPair a = key_n(1);
    genesis_commit_post(B(), a, ByteView(nonce_n(1).data(), 32), board);
    board.advance_phase();
    board.advance_phase();
    CHECK_THROWS_AS(genesis_seed(board), Error);
}

TEST_CASE("proposer election takes the minimum commitment") {
    ValidatedRoster roster;
    CHECK_FALSE(elect_proposer(roster).has_value());

    RosterMember m1, m2;
    m1.id = NodeId(32, 0x01);
    m1.hash_int.bytes[0] = 5;
    m2.id = NodeId(32, 0x02);
    m2.hash_int.bytes[0] = 9;
    roster.members = {m1, m2};  // already sorted
    CHECK(*elect_proposer(roster) == m1.id);

    roster.members = {m1};
    CHECK(*elect_proposer(roster) == m1.id);
}

TEST_CASE("derive_seed prefers a valid proposal and falls back otherwise") {
    KeyPair g = key_n(1);
    std::array<std::uint8_t, 32> seed0 = DetRng::derive("chain-seed0", 3, 0);

    SeedChain chain;
    SeedRecord r0;
    r0.epoch = 0;
    r0.seed = seed0;
    r0.provenance = SeedProvenance::genesis;
    chain.push(r0);

    ValidatedRoster prev;
    RosterMember m;
    m.id = g.public_key;
    m.weight = 5;
    VrfOutput out = B().vrf_prove(view(g.secret_key), view("whatever"));
    m.commitment_y = out.commitment_y;
    m.hash_int = hash_to_int(view(out.commitment_y));
    prev.members = {m};

    SECTION("valid proposal becomes VRF_PROPOSED") {
        Board board(B());
        board.advance_phase();  // setup(0) -- wrong epoch for a proposal at 1
        board.advance_phase();
        board.advance_phase();  // post(1)
        board.advance_phase();  // setup(1)
        propose_seed(B(), g, ByteView(seed0.data(), 32), 1, board);
        SeedRecord r1 = derive_seed(chain, board, 1, prev);
        CHECK(r1.provenance == SeedProvenance::vrf_proposed);
        CHECK(r1.proposer == g.public_key);
        // Mock output is 32 bytes, so the seed is the VRF output itself.
        VrfOutput expected = B().vrf_prove(
            view(g.secret_key), view(seed_input(ByteView(seed0.data(), 32), 1)));
        CHECK(Bytes(r1.seed.begin(), r1.seed.end()) == expected.commitment_y);
    }

    SECTION("no proposal falls back to H(seed || e)") {
        Board board(B());
        SeedRecord r1 = derive_seed(chain, board, 1, prev);
        CHECK(r1.provenance == SeedProvenance::fallback);
        Hash256 expected = sha256(view(seed_input(ByteView(seed0.data(), 32), 1)));
        CHECK(std::equal(r1.seed.begin(), r1.seed.end(), expected.bytes.begin()));
    }

    SECTION("corrupted proposal proof falls back") {
        Board board(B());
        for (int i = 0; i < 4; ++i) board.advance_phase();  // setup(1)
        VrfOutput o = B().vrf_prove(view(g.secret_key),
                                    view(seed_input(ByteView(seed0.data(), 32), 1)));
        o.proof_pi[0] ^= 1;
        SeedProposalMsg msg{o.commitment_y, o.proof_pi};
        Bytes payload = msg.encode();
        Signature sig = B().sign(
            view(g.secret_key),
            view(entry_signed_bytes(1, EntryKind::seed_proposal, view(payload))));
        board.post_entry(1, EntryKind::seed_proposal, g.public_key, payload, sig);

        SeedRecord r1 = derive_seed(chain, board, 1, prev);
        CHECK(r1.provenance == SeedProvenance::fallback);
    }

    SECTION("non-elected proposals are ignored") {
        Board board(B());
        for (int i = 0; i < 4; ++i) board.advance_phase();  // setup(1)
        KeyPair imposter = key_n(8);
        propose_seed(B(), imposter, ByteView(seed0.data(), 32), 1, board);
        SeedRecord r1 = derive_seed(chain, board, 1, prev);
        CHECK(r1.provenance == SeedProvenance::fallback);
    }

    SECTION("proposal bound to the wrong epoch encoding fails verification") {
        Board board(B());
        for (int i = 0; i < 4; ++i) board.advance_phase();  // setup(1)
        // Proposer signs an output for epoch 2's input but posts it at epoch 1.
        VrfOutput o = B().vrf_prove(view(g.secret_key),
                                    view(seed_input(ByteView(seed0.data(), 32), 2)));
        SeedProposalMsg msg{o.commitment_y, o.proof_pi};
        Bytes payload = msg.encode();
        Signature sig = B().sign(
            view(g.secret_key),
            view(entry_signed_bytes(1, EntryKind::seed_proposal, view(payload))));
        board.post_entry(1, EntryKind::seed_proposal, g.public_key, payload, sig);
        SeedRecord r1 = derive_seed(chain, board, 1, prev);
        CHECK(r1.provenance == SeedProvenance::fallback);
    }

    SECTION("missing predecessor record") {
        Board board(B());
        CHECK_THROWS_AS(derive_seed(chain, board, 5, prev), Error);
    }
}

TEST_CASE("seed chain rejects gaps and keeps 32-byte seeds") {
    SeedChain chain;
    SeedRecord r0;
    r0.epoch = 0;
    chain.push(r0);
    SeedRecord r2;
    r2.epoch = 2;
    CHECK_THROWS_AS(chain.push(r2), Error);

    CHECK(vrf_output_to_seed(view(Bytes(32, 0x07)))[0] == 0x07);
    Bytes long_y(64, 0x07);
    auto digested = vrf_output_to_seed(view(long_y));
    CHECK(Bytes(digested.begin(), digested.end()) !=
          Bytes(long_y.begin(), long_y.begin() + 32));
    CHECK(digested == sha256(view(long_y)).bytes);
}
