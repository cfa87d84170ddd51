#pragma once

#include <cstdint>
#include <vector>

#include "hermest/hermite_sim.hpp"
#include "hermest/wavelet.hpp"

namespace hermest {

// Multiscale coefficient layout: N dyadic level, 0 < gamma < beta < 1 position
// sparsity exponents, d number of scales M = 1..d.
struct IndexParams {
    int N = 12;
    double beta = 0.6;
    double gamma = 0.55;
    int d = 3;

    void validate() const;  // throws validation_error
    int nb() const;         // floor(N^beta)
    int ng() const;         // floor(N^gamma)
};

struct IndexSets {
    long long l_full_max = 0;           // positions run over [1, l_full_max]
    std::vector<long long> l_gamma;     // sparse subset [1, min(l_full_max, 2^ng)]
};

IndexSets index_sets(const IndexParams& p);

// Position of coefficient l: e_l = l * 2^(nb - N) (exact dyadic value).
double grid_point(long long ell, const IndexParams& p);

// Riemann-sum wavelet coefficient at scale M and position l with R quadrature
// nodes: sqrt(1/(M 2^N)) * (1/R) * sum_{k=1..R} psi(k/R) Z(e_l + (k/R)/(M 2^N)).
// Path values are looked up by nearest-grid-node snapping.
double discrete_coefficient(const ProcessPath& path, const WaveletSpec& spec,
                            long long ell, int M, const IndexParams& p, int R);

// Same formula with a finer node count; reference for the discretization
// residual t = discrete - quadrature.
double quadrature_coefficient(const ProcessPath& path, const WaveletSpec& spec,
                              long long ell, int M, const IndexParams& p, int R_fine);

// General c(a, k) Riemann coefficient: sqrt(a) * (1/R) sum psi(j/R) Z(a(j/R + k)).
double scale_coefficient(const ProcessPath& path, const WaveletSpec& spec,
                         double a, double k, int R);

struct CoefficientSet {
    IndexParams params;
    int R = 0;
    std::vector<long long> ells;          // the sparse position set
    std::vector<std::vector<double>> e;   // e[M-1][i] for ells[i], M = 1..d
};

// All coefficients for M = 1..d, l in the sparse set (parallel extraction,
// deterministic layout).
CoefficientSet collect_coefficients(const ProcessPath& path, const WaveletSpec& spec,
                                    const IndexParams& p, int R);
// Serial reference of the same computation (kept for equivalence tests).
CoefficientSet collect_coefficients_serial(const ProcessPath& path, const WaveletSpec& spec,
                                           const IndexParams& p, int R);

// Mean of squared coefficients at scale M; throws on an all-zero set.
double shat(const CoefficientSet& coeffs, int M);

// Oracle-normalized centered sum (uses the true H):
// (1/sqrt(card)) * sum [ E^2 / ((M 2^N)^-(2H+1) cpsi) - 1 ].
double vhat(const CoefficientSet& coeffs, int M, double true_H, double cpsi);

// Minimal uniform path grid covering all coefficient times for M <= d:
// step = 1/(R d 2^N), horizon = e_max + 2^-N.
struct ResourcePlan {
    std::size_t n = 0;      // grid intervals; path stores n+1 values
    double step = 0;
    double horizon = 0;
    std::size_t path_bytes = 0;
};

ResourcePlan plan_resources(const IndexParams& p, int R, int d);

}  // namespace hermest
