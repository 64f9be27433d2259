#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace cyres {

/// FNV-1a over the bytes of `s`. Used to turn stream labels into seed material.
std::uint64_t fnv1a64(std::string_view s);

/// One step of the splitmix64 sequence; advances `state` and returns the output.
std::uint64_t splitmix64_next(std::uint64_t& state);

/// Deterministic random stream (xoshiro256++ core, splitmix64 seeding).
///
/// Streams are derived from a master seed and a textual label. The same
/// (seed, label, draw index) triple yields the same value on every platform:
/// all draws are built from 64-bit integer arithmetic plus a fixed
/// bits-to-double mapping, never from libc or libstdc++ distributions.
///
/// Each stochastic subsystem of a run owns its own labelled stream, so
/// reconfiguring one subsystem cannot perturb another's draw sequence.
class RngStream {
public:
    RngStream() = default;

    static RngStream derive(std::uint64_t master_seed, std::string_view label);

    std::uint64_t next_u64();

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01();

    /// Uniform integer in [0, n), n > 0. Lemire multiply-shift with rejection.
    std::uint64_t uniform_below(std::uint64_t n);

    /// Exponential variate with the given rate (inverse CDF on uniform01).
    /// rate must be > 0.
    double exponential(double rate);

    const std::string& label() const { return label_; }

private:
    std::array<std::uint64_t, 4> state_{0x9E3779B97F4A7C15ull, 0xBF58476D1CE4E5B9ull,
                                        0x94D049BB133111EBull, 0x2545F4914F6CDD1Dull};
    std::string label_;
};

} // namespace cyres
