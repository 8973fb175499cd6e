#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace ldp {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// xoshiro256++ with a splitmix64-derived state. Streams are a pure function
// of (seed, stream); replicate i of a run gets stream i, so results do not
// depend on how replicates are assigned to workers.
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t sm = seed ^ (0xA3EC647659359ACDull * (stream + 1));
        for (auto& w : s_) w = splitmix64_next(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal via the Marsaglia polar method; the spare deviate is
    // cached inside the stream.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        has_spare_ = true;
        return u * m;
    }

    // One fair bit, served from a buffered word.
    bool coin() {
        if (bits_left_ == 0) {
            bit_buf_ = next_u64();
            bits_left_ = 64;
        }
        const bool b = bit_buf_ & 1u;
        bit_buf_ >>= 1;
        --bits_left_;
        return b;
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::array<std::uint64_t, 4> s_{};
    double spare_ = 0.0;
    bool has_spare_ = false;
    std::uint64_t bit_buf_ = 0;
    int bits_left_ = 0;
};

}  // namespace ldp
