#include "cyres/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace cyres;

// Draw sequences are part of the reproducibility contract: the frozen values
// below were cross-checked against an independent reimplementation of
// splitmix64 / xoshiro256++ and must never change.

TEST_CASE("splitmix64 matches the reference sequence from state 0") {
    std::uint64_t state = 0;
    CHECK(splitmix64_next(state) == 0xe220a8397b1dcdafull);
    CHECK(splitmix64_next(state) == 0x6e789e6aa1b965f4ull);
    CHECK(splitmix64_next(state) == 0x06c45d188009454full);
}

TEST_CASE("fnv1a64 label hashing is stable") {
    CHECK(fnv1a64("propagation") == 1921637816648536993ull);
    CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
}

TEST_CASE("derived stream output is stable across builds") {
    RngStream s = RngStream::derive(42, "propagation");
    CHECK(s.next_u64() == 10182758860493951786ull);
    CHECK(s.next_u64() == 16945750230716145322ull);
    CHECK(s.next_u64() == 17259658703335252321ull);
    CHECK(s.next_u64() == 7859366552894689461ull);

    RngStream d = RngStream::derive(42, "detection");
    CHECK(d.next_u64() == 2449653264814062842ull);
    CHECK(d.next_u64() == 11673196166247215498ull);
}

TEST_CASE("uniform01 is the fixed 53-bit mapping") {
    RngStream s = RngStream::derive(42, "propagation");
    CHECK(s.uniform01() == 0.55200846392217806);
    CHECK(s.uniform01() == 0.91863096072695904);
    RngStream t = RngStream::derive(42, "propagation");
    for (int i = 0; i < 1000; ++i) {
        const double u = t.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("exponential draws are inverse-CDF on uniform01") {
    RngStream s = RngStream::derive(7, "understanding/worm-a");
    CHECK(s.exponential(0.5) == 9.6715271461699732);
    CHECK(s.exponential(0.5) == 0.4373067954995134);

    // Same (seed, label) => same draw, independent of draws on other streams.
    RngStream a = RngStream::derive(7, "understanding/worm-a");
    RngStream other = RngStream::derive(7, "propagation");
    other.next_u64();
    other.next_u64();
    CHECK(a.exponential(0.5) == 9.6715271461699732);
}

TEST_CASE("streams with different labels are decoupled") {
    RngStream a1 = RngStream::derive(1234, "propagation");
    RngStream b1 = RngStream::derive(1234, "detection");
    std::vector<std::uint64_t> b_alone;
    for (int i = 0; i < 8; ++i) {
        b_alone.push_back(b1.next_u64());
    }

    // Interleaving draws on stream a must not change what b produces.
    RngStream a2 = RngStream::derive(1234, "propagation");
    RngStream b2 = RngStream::derive(1234, "detection");
    for (int i = 0; i < 8; ++i) {
        (void)a2.next_u64();
        CHECK(b2.next_u64() == b_alone[static_cast<std::size_t>(i)]);
    }
    (void)a1;
}

TEST_CASE("uniform_below is unbiased at the boundaries and in range") {
    RngStream s = RngStream::derive(99, "propagation");
    for (int i = 0; i < 2000; ++i) {
        CHECK(s.uniform_below(7) < 7);
    }
    CHECK(s.uniform_below(1) == 0);

    // Exponential mean sanity (Monte Carlo, loose bound).
    RngStream e = RngStream::derive(99, "detection");
    double sum = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        sum += e.exponential(2.0);
    }
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.05));
}
