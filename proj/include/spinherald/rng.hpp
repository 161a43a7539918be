#pragma once

// Counter-based random streams: every (seed, record, substream) triple opens
// an independent deterministic stream, so records can be generated in any
// order with identical results.

#include <cmath>
#include <cstdint>

namespace spinherald {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class RandomStream {
  public:
    RandomStream(std::uint64_t seed, std::uint64_t record, std::uint64_t substream) {
        std::uint64_t s = seed;
        state_ = splitmix64(s) ^ (record * 0xd1342543de82ef95ULL) ^
                 (substream * 0xaf251af3b0f025b5ULL);
        splitmix64(state_);  // decorrelate nearby counters
    }

    std::uint64_t next_u64() { return splitmix64(state_); }

    // Uniform in (0, 1).
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; second value cached.
    double gaussian() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double u1 = uniform(), u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

  private:
    std::uint64_t state_ = 0;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace spinherald
