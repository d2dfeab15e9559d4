#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "verasel/bytes.hpp"

using namespace verasel;

TEST_CASE("hex round trip and rejection") {
    crypto_init();
    Bytes b = {0x00, 0x1f, 0xab, 0xff};
    CHECK(to_hex(view(b)) == "001fabff");
    CHECK(from_hex("001fabff") == b);
    CHECK(from_hex("001FABFF") == b);
    CHECK_THROWS_AS(from_hex("abc"), Error);
    CHECK_THROWS_AS(from_hex("zz"), Error);
    CHECK(from_hex("").empty());
}

TEST_CASE("be64 encoding") {
    auto enc = be64(0x0102030405060708ULL);
    CHECK(to_hex(ByteView(enc.data(), 8)) == "0102030405060708");
    CHECK(read_be64(ByteView(enc.data(), 8)) == 0x0102030405060708ULL);
    Bytes short_buf = {1, 2, 3};
    CHECK_THROWS_AS(read_be64(view(short_buf)), Error);

    Bytes out;
    append_be64(out, 1);
    append_be64(out, 256);
    CHECK(to_hex(view(out)) == "00000000000000010000000000000100");
}

TEST_CASE("sha256 known vectors") {
    CHECK(sha256(view("")).hex() ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256(view("abc")).hex() ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    // Multi-part hashing equals hashing the concatenation.
    CHECK(sha256({view("a"), view("bc")}) == sha256(view("abc")));
}

TEST_CASE("Hash256 ordering is numeric") {
    Hash256 a, b;
    a.bytes[0] = 1;
    b.bytes[0] = 2;
    CHECK(a < b);
    b.bytes[0] = 1;
    b.bytes[31] = 1;
    CHECK(a < b);
    CHECK(a == a);
}

TEST_CASE("Hash256 modulo") {
    Hash256 h = sha256(view("abc"));
    CHECK(h.mod(1) == 0);
    // mod 2^8 and 2^16 are the trailing bytes
    CHECK(h.mod(256) == h.bytes[31]);
    CHECK(h.mod(65536) == (static_cast<std::uint64_t>(h.bytes[30]) << 8 | h.bytes[31]));
    CHECK_THROWS_AS(h.mod(0), Error);

    // Values that fit in 128 bits agree with direct arithmetic.
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        Hash256 v{};
        unsigned __int128 ref = 0;
        for (int j = 16; j < 32; ++j) {
            v.bytes[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(rng());
            ref = (ref << 8) | v.bytes[static_cast<std::size_t>(j)];
        }
        std::uint64_t m = rng() % 100000 + 1;
        CHECK(v.mod(m) == static_cast<std::uint64_t>(ref % m));
    }
}

TEST_CASE("concat helpers") {
    Bytes out = concat({view("ab"), view(""), view("cd")});
    CHECK(to_bytes("abcd") == out);
}
