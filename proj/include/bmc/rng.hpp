#ifndef BMC_RNG_HPP
#define BMC_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

#include "bmc/tree_index.hpp"

namespace bmc {

namespace detail {
inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}
}  // namespace detail

/// Stateless hash of a 64-bit value, used to derive replicate seeds.
inline constexpr std::uint64_t hash_u64(std::uint64_t x) {
    return detail::mix64(x + detail::kGolden);
}

/// Counter-based random stream: the i-th output is a pure function of
/// (key, i), so draws are reproducible independent of evaluation order
/// and thread schedule.  Streams are keyed by (seed, stream id, tag);
/// simulation uses one stream per tree node.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t tag = 0)
        : key_(detail::mix64(detail::mix64(seed + detail::kGolden * (tag + 1)) ^
                             (stream * 0xD1B54A32D192ED03ull))) {}

    std::uint64_t next_u64() {
        return detail::mix64(key_ + (++counter_) * detail::kGolden);
    }

    /// Uniform draw strictly inside (0, 1); safe as a log argument.
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Pair of independent standard normals (Box-Muller; rejection-free so
    /// the draw count per node is fixed).
    std::pair<double, double> next_normal_pair() {
        double u1 = next_uniform();
        double u2 = next_uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(theta), r * std::sin(theta)};
    }

    double next_normal() { return next_normal_pair().first; }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Stream for the draw that generates the children pair of node u.
inline CounterRng node_stream(std::uint64_t seed, NodeId u) {
    return CounterRng(seed, u, /*tag=*/1);
}

/// Stream for the root draw from the initial distribution.
inline CounterRng root_stream(std::uint64_t seed) {
    return CounterRng(seed, 0, /*tag=*/2);
}

}  // namespace bmc

#endif  // BMC_RNG_HPP
