#include "isoc/rng.hpp"

#include <cmath>
#include <numbers>

namespace isoc {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mul_hilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

inline Philox4x32::Counter round_once(const Philox4x32::Counter& c, const Philox4x32::Key& k) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mul_hilo(kMul0, c[0], hi0, lo0);
    mul_hilo(kMul1, c[2], hi1, lo1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

inline double to_unit_open(std::uint32_t x) {
    return (static_cast<double>(x) + 0.5) * 0x1p-32;
}

} // namespace

Philox4x32::Counter Philox4x32::block(Counter counter, Key key) {
    counter = round_once(counter, key);
    for (int r = 1; r < 10; ++r) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
        counter = round_once(counter, key);
    }
    return counter;
}

double NormalStream::next() {
    if (available_ == 0) {
        const auto words = Philox4x32::block({sample_, step_, channel_, block_++}, key_);
        const double u0 = to_unit_open(words[0]);
        const double u1 = to_unit_open(words[1]);
        const double u2 = to_unit_open(words[2]);
        const double u3 = to_unit_open(words[3]);
        const double r0 = std::sqrt(-2.0 * std::log(u0));
        const double r1 = std::sqrt(-2.0 * std::log(u2));
        buffer_[0] = r0 * std::cos(2.0 * std::numbers::pi * u1);
        buffer_[1] = r0 * std::sin(2.0 * std::numbers::pi * u1);
        buffer_[2] = r1 * std::cos(2.0 * std::numbers::pi * u3);
        buffer_[3] = r1 * std::sin(2.0 * std::numbers::pi * u3);
        available_ = 4;
    }
    return buffer_[4 - available_--];
}

} // namespace isoc
