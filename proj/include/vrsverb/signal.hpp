// Sample buffers and seeded noise streams.
#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace vrsverb {

// Mono sample buffer. Audio paths run in single precision; estimators and
// filter state accumulate in double.
using Signal = std::vector<float>;

// Deterministic seed derivation for per-stream RNGs (splitmix64 finalizer).
inline uint64_t mix_seed(uint64_t seed, uint64_t stream) {
    uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Gaussian noise stream with explicit Box-Muller so the sample sequence is
// fixed by the seed alone, independent of the standard library.
class GaussianNoise {
public:
    explicit GaussianNoise(uint64_t seed) : rng_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        have_spare_ = true;
        return u * m;
    }

    void fill(float* dst, size_t n, double gain = 1.0) {
        for (size_t i = 0; i < n; ++i) dst[i] = static_cast<float>(gain * next());
    }

private:
    double uniform() {
        // 53-bit mantissa uniform in (0,1)
        return (static_cast<double>(rng_() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    }

    std::mt19937_64 rng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

inline double signal_energy(const Signal& s) {
    double e = 0.0;
    for (float v : s) e += static_cast<double>(v) * v;
    return e;
}

inline double signal_rms(const Signal& s) {
    return s.empty() ? 0.0 : std::sqrt(signal_energy(s) / static_cast<double>(s.size()));
}

}  // namespace vrsverb
