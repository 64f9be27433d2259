#include "cyres/sha256.hpp"

#include <doctest.h>

#include <string>

using namespace cyres;

// FIPS 180-4 test vectors.

TEST_CASE("sha256 of the empty string") {
    CHECK(to_hex(sha256("")) ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("sha256 of abc") {
    CHECK(to_hex(sha256("abc")) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("sha256 of the two-block NIST message") {
    CHECK(to_hex(sha256("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq")) ==
          "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
}

TEST_CASE("sha256 of one million 'a' characters") {
    Sha256 ctx;
    const std::string chunk(1000, 'a');
    for (int i = 0; i < 1000; ++i) {
        ctx.update(chunk);
    }
    CHECK(to_hex(ctx.finish()) ==
          "cdc76e5c9914fb9281a1c7e284d73e67f1809a48a497200e046d39ccc7112cd0");
}

TEST_CASE("hex round trip") {
    const Digest d = sha256("abc");
    CHECK(digest_from_hex(to_hex(d)) == d);
    CHECK_THROWS(digest_from_hex("zz"));
    const std::string bad(63, '0');
    CHECK_THROWS(digest_from_hex(bad + "g"));
}
