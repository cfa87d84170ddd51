#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hermest/hermite_sim.hpp"
#include "hermest/wavelet.hpp"

namespace hermest {

struct EstimationResult {
    double hhat = 0;
    std::vector<double> shat;       // input echo
    int N = 0;
    int d = 0;
    std::vector<double> residuals;  // log shat_M - fitted
};

// Ordinary-least-squares fit of log shat_M on log M over M = 1..d;
// Hhat = -slope/2 - 1/2. Rejects d < 2 or any shat <= 0.
EstimationResult estimate_hurst(const std::vector<double>& shat_values, int N, int d);

struct KMatrix {
    enum class Provenance { analytic_q1, monte_carlo };
    int d = 0;
    std::vector<double> k;   // row-major d x d, symmetric
    std::vector<double> se;  // entrywise standard errors (Monte Carlo only)
    Provenance provenance = Provenance::analytic_q1;

    double at(int i, int j) const { return k[std::size_t(i) * d + j]; }
    double kpsih() const { return at(0, 0); }  // common diagonal value
};

// Gaussian-case covariance matrix of the scale vector: diagonal 2 (Isserlis),
// K_{M1,M2} = 2 (M1 M2)^(2H+1) Cov(c(1/M1,0), c(1/M2,0))^2 / C_psi(H)^2.
KMatrix kmatrix_analytic_q1(const WaveletSpec& spec, double H, int d);

// Monte Carlo moments of fine-quadrature coefficients c(1/M, 0) on simulated
// paths over [0,1]; diagonal pooled across scales (they share one law).
KMatrix kmatrix_montecarlo(const ModelParams& params, const WaveletSpec& spec, int d,
                           int replications, std::uint64_t seed, int R_quad = 1024,
                           int inner_factor = 64);

// Asymptotic estimator variance: with L the d x 2 design matrix with rows
// (log M, 1) and G = (L^T L)^-1, sigma^2 = 1/4 * (G L^T K L G)[slope,slope].
double asymptotic_sigma2(const KMatrix& K, int d);

}  // namespace hermest
