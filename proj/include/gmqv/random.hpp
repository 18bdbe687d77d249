#pragma once

#include <cstdint>
#include <random>

namespace gmqv {

/// Reproducible standard-normal stream identified by (seed, stream).
///
/// The engine is std::mt19937_64 seeded through std::seed_seq with the four
/// 32-bit halves of seed and stream; both are fully specified by the standard.
/// Uniforms take the top 53 bits of one engine draw, giving a value in [0, 1).
/// Normals use Marsaglia's polar method: pairs (u, v) uniform on (-1, 1)^2 are
/// drawn until 0 < s = u^2 + v^2 < 1, then u m and v m with
/// m = sqrt(-2 ln(s) / s) are returned in that order, the second one cached.
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t stream);

    double uniform();
    double normal();

    std::uint64_t uniforms_consumed() const { return uniforms_; }

private:
    std::mt19937_64 engine_;
    double cached_ = 0.0;
    bool has_cached_ = false;
    std::uint64_t uniforms_ = 0;
};

}  // namespace gmqv
