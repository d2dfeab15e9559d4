#pragma once

// Canonical byte encodings for the protocol messages. Every party must
// sign and hash identical bytes, so the encoding is fixed: fields appear
// in declaration order, each prefixed with its 8-byte big-endian length;
// integer fields encode as 8-byte big-endian values.

#include <cstdint>

#include "verasel/bytes.hpp"
#include "verasel/crypto.hpp"

namespace verasel {

namespace codec {

inline void put_field(Bytes& out, ByteView field) {
    append_be64(out, field.size());
    append(out, field);
}

inline void put_field(Bytes& out, std::uint64_t v) {
    append_be64(out, 8);
    append_be64(out, v);
}

class Reader {
public:
    explicit Reader(ByteView data) : data_(data) {}

    Bytes bytes_field() {
        std::uint64_t len = read_be64(remaining());
        pos_ += 8;
        if (len > remaining().size()) throw Error("payload decode: truncated field");
        Bytes out(data_.begin() + static_cast<std::ptrdiff_t>(pos_),
                  data_.begin() + static_cast<std::ptrdiff_t>(pos_ + len));
        pos_ += len;
        return out;
    }

    std::uint64_t int_field() {
        Bytes raw = bytes_field();
        if (raw.size() != 8) throw Error("payload decode: bad integer width");
        return read_be64(view(raw));
    }

    void expect_end() const {
        if (pos_ != data_.size()) throw Error("payload decode: trailing bytes");
    }

private:
    ByteView remaining() const { return data_.subspan(pos_); }

    ByteView data_;
    std::size_t pos_ = 0;
};

}  // namespace codec

/// The paper's p_i: a node's registration of its key and weight.
struct NodePostMsg {
    Bytes public_key;
    std::uint64_t weight = 0;

    Bytes encode() const {
        Bytes out;
        codec::put_field(out, view(public_key));
        codec::put_field(out, weight);
        return out;
    }

    static NodePostMsg decode(ByteView payload) {
        codec::Reader r(payload);
        NodePostMsg m;
        m.public_key = r.bytes_field();
        m.weight = r.int_field();
        r.expect_end();
        return m;
    }
};

/// The paper's r_i: a node's VRF commitment and proof for the epoch seed.
struct CommitmentMsg {
    Bytes commitment_y;
    Bytes proof_pi;

    Bytes encode() const {
        Bytes out;
        codec::put_field(out, view(commitment_y));
        codec::put_field(out, view(proof_pi));
        return out;
    }

    static CommitmentMsg decode(ByteView payload) {
        codec::Reader r(payload);
        CommitmentMsg m;
        m.commitment_y = r.bytes_field();
        m.proof_pi = r.bytes_field();
        r.expect_end();
        return m;
    }
};

/// Proposer's VRF output over seed_{e-1} || e. Same shape as a commitment.
struct SeedProposalMsg {
    Bytes vrf_y;
    Bytes proof_pi;

    Bytes encode() const {
        Bytes out;
        codec::put_field(out, view(vrf_y));
        codec::put_field(out, view(proof_pi));
        return out;
    }

    static SeedProposalMsg decode(ByteView payload) {
        codec::Reader r(payload);
        SeedProposalMsg m;
        m.vrf_y = r.bytes_field();
        m.proof_pi = r.bytes_field();
        r.expect_end();
        return m;
    }
};

struct GenesisCommitMsg {
    Hash256 nonce_hash;

    Bytes encode() const {
        Bytes out;
        codec::put_field(out, nonce_hash.view());
        return out;
    }

    static GenesisCommitMsg decode(ByteView payload) {
        codec::Reader r(payload);
        Bytes raw = r.bytes_field();
        r.expect_end();
        if (raw.size() != 32) throw Error("genesis commit: hash must be 32 bytes");
        GenesisCommitMsg m;
        std::memcpy(m.nonce_hash.bytes.data(), raw.data(), 32);
        return m;
    }
};

struct GenesisRevealMsg {
    Bytes nonce;

    Bytes encode() const {
        Bytes out;
        codec::put_field(out, view(nonce));
        return out;
    }

    static GenesisRevealMsg decode(ByteView payload) {
        codec::Reader r(payload);
        GenesisRevealMsg m;
        m.nonce = r.bytes_field();
        r.expect_end();
        return m;
    }
};

}  // namespace verasel
