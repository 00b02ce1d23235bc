#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ril {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// One independent stream per (seed, stream_id). The engine is mt19937_64 whose
// output sequence is fixed by the standard; the seeding goes through seed_seq
// fed with splitmix64 words so nearby ids give unrelated states.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_(stream_id) {
        std::uint64_t s = seed ^ 0x6a09e667f3bcc909ull;
        std::uint64_t t = stream_id ^ 0xbb67ae8584caa73bull;
        std::uint64_t w[4] = {splitmix64(s), splitmix64(t), splitmix64(s), splitmix64(t)};
        std::seed_seq seq{static_cast<std::uint32_t>(w[0]), static_cast<std::uint32_t>(w[0] >> 32),
                          static_cast<std::uint32_t>(w[1]), static_cast<std::uint32_t>(w[1] >> 32),
                          static_cast<std::uint32_t>(w[2]), static_cast<std::uint32_t>(w[2] >> 32),
                          static_cast<std::uint32_t>(w[3]), static_cast<std::uint32_t>(w[3] >> 32)};
        eng_.seed(seq);
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_; }

    std::uint64_t next() { return eng_(); }

    // uniform on (0, 1], 53 random bits
    double uniform() { return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53; }

    double exponential(double rate = 1.0) { return -std::log(uniform()) / rate; }

    // unbiased integer in [0, n) by rejection
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t lim = (~std::uint64_t{0}) - (~std::uint64_t{0}) % n;
        std::uint64_t x;
        do x = eng_();
        while (x >= lim);
        return x % n;
    }

    long long poisson(double mean) {
        if (mean <= 0.0) return 0;
        std::poisson_distribution<long long> dist(mean);
        return dist(eng_);
    }

    std::mt19937_64& engine() { return eng_; }

private:
    std::uint64_t seed_, stream_;
    std::mt19937_64 eng_;
};

}  // namespace ril
