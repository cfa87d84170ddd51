#include "hermest/fgn.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>

#include "hermest/errors.hpp"

namespace hermest {

namespace {

// FFTW planning is not thread-safe; execution of a plan on its own arrays is.
// All plan create/destroy calls go through this guard.
struct PlanGuard {
    fftw_plan plan = nullptr;
    ~PlanGuard() {
        if (plan) {
#ifdef _OPENMP
#pragma omp critical(hermest_fftw)
#endif
            fftw_destroy_plan(plan);
        }
    }
};

}  // namespace

double fgn_autocovariance(double H0, double k) {
    double a = std::fabs(k);
    double twoH = 2.0 * H0;
    return 0.5 * (std::pow(a + 1.0, twoH) - 2.0 * std::pow(a, twoH) +
                  std::pow(std::fabs(a - 1.0), twoH));
}

FgnGenerator::FgnGenerator(double H0, std::size_t n) : H0_(H0), n_(n) {
    if (!(H0 > 0.0 && H0 < 1.0)) throw validation_error("fgn: H0 must lie in (0, 1)");
    if (n == 0) throw validation_error("fgn: length must be positive");
    m_ = 1;
    while (m_ < 2 * n) m_ <<= 1;

    // First row of the circulant embedding of the covariance.
    std::vector<double> row(m_);
    for (std::size_t j = 0; j <= m_ / 2; ++j) row[j] = fgn_autocovariance(H0, double(j));
    for (std::size_t j = m_ / 2 + 1; j < m_; ++j) row[j] = row[m_ - j];

    // Circulant eigenvalues = real part of the DFT of the (symmetric) row.
    std::vector<double> spec(2 * (m_ / 2 + 1));
    PlanGuard g;
#ifdef _OPENMP
#pragma omp critical(hermest_fftw)
#endif
    g.plan = fftw_plan_dft_r2c_1d(int(m_), row.data(),
                                  reinterpret_cast<fftw_complex*>(spec.data()),
                                  FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!g.plan) throw runtime_failure("fgn: FFT planning failed");
    fftw_execute(g.plan);

    coef_.resize(m_ / 2 + 1);
    min_eig_ = spec[0];
    for (std::size_t k = 0; k <= m_ / 2; ++k) {
        double lam = spec[2 * k];
        min_eig_ = std::min(min_eig_, lam);
        if (lam < 0) {
            if (lam < -1e-9) clip_warning_ = true;
            lam = 0;
        }
        double denom = (k == 0 || k == m_ / 2) ? double(m_) : 2.0 * double(m_);
        coef_[k] = std::sqrt(lam / denom);
    }
}

void FgnGenerator::sample(RandomStream& rs, std::vector<double>& out) const {
    const std::size_t half = m_ / 2;
    std::vector<double> spec(2 * (half + 1), 0.0);
    // Hermitian synthesis: independent normals weighted by sqrt(lambda/m)
    // (real bins) and sqrt(lambda/2m) (complex bins).
    spec[0] = coef_[0] * rs.next_normal();
    spec[2 * half] = coef_[half] * rs.next_normal();
    for (std::size_t k = 1; k < half; ++k) {
        spec[2 * k] = coef_[k] * rs.next_normal();
        spec[2 * k + 1] = coef_[k] * rs.next_normal();
    }

    std::vector<double> time(m_);
    PlanGuard g;
#ifdef _OPENMP
#pragma omp critical(hermest_fftw)
#endif
    g.plan = fftw_plan_dft_c2r_1d(int(m_), reinterpret_cast<fftw_complex*>(spec.data()),
                                  time.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!g.plan) throw runtime_failure("fgn: FFT planning failed");
    fftw_execute(g.plan);

    out.assign(time.begin(), time.begin() + std::ptrdiff_t(n_));
}

std::vector<double> generate_fgn(double H0, std::size_t n, std::uint64_t seed) {
    FgnGenerator gen(H0, n);
    RandomStream rs(seed, 0, 0);
    std::vector<double> out;
    gen.sample(rs, out);
    return out;
}

}  // namespace hermest
