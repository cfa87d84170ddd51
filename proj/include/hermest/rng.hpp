#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace hermest {

// Philox4x32-10 counter-based generator block function.
std::array<std::uint32_t, 4> philox4x32_10(const std::array<std::uint32_t, 4>& counter,
                                           const std::array<std::uint32_t, 2>& key);

// Deterministic random stream keyed by (seed, replication, stream). Distinct
// keys give statistically independent streams; the same key always reproduces
// the same sequence. Counter layout: (block_lo, block_hi, replication, stream)
// with key = (seed_lo, seed_hi).
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint32_t replication, std::uint32_t stream);

    // Uniform on (0, 1), 53-bit resolution, never exactly 0 or 1.
    double next_uniform();

    // Standard normal via Box-Muller.
    double next_normal();

    void fill_normals(std::vector<double>& out);
    void fill_normals(double* out, std::size_t n);

private:
    void refill();
    std::uint64_t next_u64();

    std::array<std::uint32_t, 2> key_;
    std::uint32_t rep_, stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int buf_pos_ = 4;  // consumed
    double cached_normal_ = 0;
    bool have_cached_ = false;
};

}  // namespace hermest
