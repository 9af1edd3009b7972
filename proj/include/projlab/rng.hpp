#pragma once

#include <cmath>
#include <cstdint>

namespace projlab {

// SplitMix64 finalizer (Steele/Lea/Flood), used for stream-id derivation.
inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Counter-based stream built on Philox4x32-10 (Salmon et al., "Parallel
// random numbers: as easy as 1, 2, 3", SC 2011). The key is the master seed,
// the high counter words carry the stream id, the low words count blocks.
// Identical (master_seed, stream_id) replays the same sequence bit for bit,
// and distinct stream ids give statistically independent streams.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
        : master_seed_(master_seed), stream_id_(stream_id) {
        key_[0] = static_cast<std::uint32_t>(master_seed);
        key_[1] = static_cast<std::uint32_t>(master_seed >> 32);
    }

    std::uint64_t masterSeed() const { return master_seed_; }
    std::uint64_t streamId() const { return stream_id_; }

    // A stream for an independent task, e.g. one Monte Carlo chunk or trial.
    RngStream substream(std::uint64_t salt) const {
        return RngStream(master_seed_, splitmix64(splitmix64(stream_id_) + salt));
    }

    std::uint64_t nextU64() {
        if (buffered_) {
            buffered_ = false;
            return buffer_;
        }
        std::uint32_t out[4];
        philoxBlock(out);
        ++block_;
        buffer_ = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
        buffered_ = true;
        return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(nextU64() >> 11) * 0x1.0p-53; }

    // Standard normal by Marsaglia's polar rejection; the second variate of
    // each accepted pair is cached, so copies of the stream replay it too.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double scale = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * scale;
        have_spare_ = true;
        return u * scale;
    }

private:
    void philoxBlock(std::uint32_t out[4]) const {
        std::uint32_t c0 = static_cast<std::uint32_t>(block_);
        std::uint32_t c1 = static_cast<std::uint32_t>(block_ >> 32);
        std::uint32_t c2 = static_cast<std::uint32_t>(stream_id_);
        std::uint32_t c3 = static_cast<std::uint32_t>(stream_id_ >> 32);
        std::uint32_t k0 = key_[0], k1 = key_[1];
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = 0xD2511F53ULL * c0;
            const std::uint64_t p1 = 0xCD9E8D57ULL * c2;
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            const std::uint32_t n0 = hi1 ^ c1 ^ k0;
            const std::uint32_t n1 = lo1;
            const std::uint32_t n2 = hi0 ^ c3 ^ k1;
            const std::uint32_t n3 = lo0;
            c0 = n0; c1 = n1; c2 = n2; c3 = n3;
            k0 += 0x9E3779B9U;
            k1 += 0xBB67AE85U;
        }
        out[0] = c0; out[1] = c1; out[2] = c2; out[3] = c3;
    }

    std::uint64_t master_seed_;
    std::uint64_t stream_id_;
    std::uint32_t key_[2];
    std::uint64_t block_ = 0;
    std::uint64_t buffer_ = 0;
    bool buffered_ = false;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

inline double sampleStandardNormal(RngStream& stream) { return stream.normal(); }

}  // namespace projlab
