#pragma once

#include <cstddef>
#include <vector>

#include "hermest/rng.hpp"

namespace hermest {

// Autocovariance of fractional Gaussian noise at lag k:
// r(k) = 1/2 (|k+1|^(2H0) - 2|k|^(2H0) + |k-1|^(2H0)).
double fgn_autocovariance(double H0, double k);

// One-shot draw of a length-n fractional Gaussian noise sequence (stream 0,
// replication 0). For repeated draws construct an FgnGenerator once instead.
std::vector<double> generate_fgn(double H0, std::size_t n, std::uint64_t seed);

// Exact stationary Gaussian sequence generator by circulant embedding.
// Construction (eigenvalue FFT) happens once; sample() is const and safe to
// call concurrently with distinct streams. Negative circulant eigenvalues are
// clipped to zero; values below -1e-9 additionally set clip_warning().
class FgnGenerator {
public:
    FgnGenerator(double H0, std::size_t n);

    // Writes n values with autocovariance r(k); deterministic in the stream key.
    void sample(RandomStream& rs, std::vector<double>& out) const;

    std::size_t length() const { return n_; }
    std::size_t embedding_size() const { return m_; }
    double H0() const { return H0_; }
    double min_eigenvalue() const { return min_eig_; }
    bool clip_warning() const { return clip_warning_; }

private:
    double H0_ = 0;
    std::size_t n_ = 0;
    std::size_t m_ = 0;            // circulant size, power of two >= 2n
    std::vector<double> coef_;     // sqrt(lambda_k / m) scalings, k = 0..m/2
    double min_eig_ = 0;
    bool clip_warning_ = false;
};

}  // namespace hermest
