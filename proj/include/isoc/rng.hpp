#pragma once

#include <array>
#include <cstdint>

#include <Eigen/Dense>

namespace isoc {

// Philox-4x32-10 counter-based generator (Salmon et al., SC'11).
// Stateless: every 128-bit counter maps to an independent 128-bit block
// under a 64-bit key, which makes per-sample streams reproducible and
// independent of evaluation order and worker count.
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter block(Counter counter, Key key);
};

// Stream of standard normal deviates addressed by (seed, sample, step,
// channel). Consecutive draws advance an internal block counter, so a
// stream may produce any number of values without touching its siblings.
// Normals come from Box-Muller applied to (u32 + 0.5) * 2^-32 uniforms.
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint32_t sample, std::uint32_t step, std::uint32_t channel)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          sample_(sample), step_(step), channel_(channel) {}

    double next();

    void fill(Eigen::Ref<Eigen::VectorXd> out) {
        for (Eigen::Index i = 0; i < out.size(); ++i)
            out[i] = next();
    }

private:
    Philox4x32::Key key_;
    std::uint32_t sample_, step_, channel_;
    std::uint32_t block_ = 0;
    std::array<double, 4> buffer_{};
    int available_ = 0;
};

// Channel tags keep the per-(sample, step) streams for the different
// noise sources disjoint.
namespace rng_channel {
inline constexpr std::uint32_t initial_state = 0;
inline constexpr std::uint32_t process = 1;
inline constexpr std::uint32_t observation = 2;
inline constexpr std::uint32_t control_dependent = 3;
inline constexpr std::uint32_t state_dependent = 4;
inline constexpr std::uint32_t internal_model = 5;
} // namespace rng_channel

} // namespace isoc
