#include "hermest/rng.hpp"

#include <cmath>

namespace hermest {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void round_once(std::array<std::uint32_t, 4>& c, std::uint32_t k0, std::uint32_t k1) {
    std::uint64_t p0 = std::uint64_t(kM0) * c[0];
    std::uint64_t p1 = std::uint64_t(kM1) * c[2];
    std::uint32_t hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
    std::uint32_t hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
    c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32_10(const std::array<std::uint32_t, 4>& counter,
                                           const std::array<std::uint32_t, 2>& key) {
    std::array<std::uint32_t, 4> c = counter;
    std::uint32_t k0 = key[0], k1 = key[1];
    for (int r = 0; r < 10; ++r) {
        round_once(c, k0, k1);
        k0 += kW0;
        k1 += kW1;
    }
    return c;
}

RandomStream::RandomStream(std::uint64_t seed, std::uint32_t replication, std::uint32_t stream)
    : key_{std::uint32_t(seed), std::uint32_t(seed >> 32)}, rep_(replication), stream_(stream) {}

void RandomStream::refill() {
    std::array<std::uint32_t, 4> counter = {std::uint32_t(block_), std::uint32_t(block_ >> 32),
                                            rep_, stream_};
    buf_ = philox4x32_10(counter, key_);
    ++block_;
    buf_pos_ = 0;
}

std::uint64_t RandomStream::next_u64() {
    if (buf_pos_ > 2) refill();
    std::uint64_t lo = buf_[std::size_t(buf_pos_)];
    std::uint64_t hi = buf_[std::size_t(buf_pos_ + 1)];
    buf_pos_ += 2;
    return (hi << 32) | lo;
}

double RandomStream::next_uniform() {
    // 53-bit mantissa, shifted into (0, 1): never returns 0 or 1 exactly.
    std::uint64_t bits = next_u64();
    return double(bits >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

double RandomStream::next_normal() {
    if (have_cached_) {
        have_cached_ = false;
        return cached_normal_;
    }
    double u1 = next_uniform();
    double u2 = next_uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    cached_normal_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
}

void RandomStream::fill_normals(std::vector<double>& out) { fill_normals(out.data(), out.size()); }

void RandomStream::fill_normals(double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = next_normal();
}

}  // namespace hermest
