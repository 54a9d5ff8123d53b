// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <span>

namespace pace {

using cplx = std::complex<double>;

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Counter-based stream seeding: the derived seed depends only on the master
// seed and the stream coordinates, never on execution order.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t s = master;
    std::uint64_t h = splitmix64(s);
    s ^= a + 0x9e3779b97f4a7c15ULL;
    h ^= splitmix64(s);
    s ^= b + 0xd1b54a32d192ed03ULL;
    h ^= splitmix64(s);
    s ^= c + 0x8bb84b93962eacc9ULL;
    h ^= splitmix64(s);
    return h;
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(expand(seed)) {}

    double gauss() { return normal_(eng_); }

    // CN(0,1): independent real/imag parts of variance 1/2 each.
    cplx cgauss() {
        const double re = normal_(eng_);
        const double im = normal_(eng_);
        return {re * inv_sqrt2, im * inv_sqrt2};
    }

    void fill_cgauss(std::span<cplx> out) {
        for (auto& z : out) z = cgauss();
    }

    double uniform() { return uni_(eng_); }
    std::uint64_t u64() { return eng_(); }

  private:
    static std::mt19937_64 expand(std::uint64_t seed) {
        std::uint64_t s = seed;
        std::seed_seq seq{splitmix64(s), splitmix64(s), splitmix64(s), splitmix64(s)};
        return std::mt19937_64(seq);
    }
    static constexpr double inv_sqrt2 = 0.7071067811865475244;
    std::mt19937_64 eng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uni_{0.0, 1.0};
};

} // namespace pace
