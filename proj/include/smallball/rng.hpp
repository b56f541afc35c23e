#pragma once

#include <cstdint>
#include <random>

namespace smallball {

/// splitmix64 step; used to derive independent per-chunk seeds so Monte
/// Carlo results are identical under any thread partition.
std::uint64_t splitmix64(std::uint64_t& state);

/// Seed for chunk `chunk` of the stream identified by `seed`.
std::uint64_t chunk_seed(std::uint64_t seed, std::uint64_t chunk);

/// Standard normal draws from an explicitly specified pipeline
/// (mt19937_64 -> 53-bit uniforms in (0,1] -> Box-Muller), so a seed
/// pins the entire stream independent of library internals.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    double uniform01() {
        // (0, 1]: zero never appears, so the log above is safe.
        return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    }

    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace smallball
