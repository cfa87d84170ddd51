#include "hermest/estimator.hpp"

#include <cmath>

#include "hermest/errors.hpp"
#include "hermest/variation.hpp"

namespace hermest {

namespace {

long long lcm_upto(int d) {
    auto gcd = [](long long a, long long b) {
        while (b) {
            long long t = a % b;
            a = b;
            b = t;
        }
        return a;
    };
    long long l = 1;
    for (int m = 2; m <= d; ++m) l = l / gcd(l, m) * m;
    return l;
}

}  // namespace

EstimationResult estimate_hurst(const std::vector<double>& shat_values, int N, int d) {
    if (d < 2) throw validation_error("estimate: at least two scales required");
    if (int(shat_values.size()) != d)
        throw validation_error("estimate: shat vector must have d entries");
    for (double s : shat_values)
        if (!(s > 0) || !std::isfinite(s))
            throw validation_error("estimate: shat values must be positive and finite");

    std::vector<double> x(static_cast<std::size_t>(d)), y(static_cast<std::size_t>(d));
    double mx = 0, my = 0;
    for (int m = 1; m <= d; ++m) {
        x[std::size_t(m - 1)] = std::log(double(m));
        y[std::size_t(m - 1)] = std::log(shat_values[std::size_t(m - 1)]);
        mx += x[std::size_t(m - 1)];
        my += y[std::size_t(m - 1)];
    }
    mx /= d;
    my /= d;
    double sxx = 0, sxy = 0;
    for (int i = 0; i < d; ++i) {
        double dx = x[std::size_t(i)] - mx;
        sxx += dx * dx;
        sxy += dx * (y[std::size_t(i)] - my);
    }
    double slope = sxy / sxx;
    double intercept = my - slope * mx;

    EstimationResult r;
    r.hhat = -slope / 2.0 - 0.5;
    r.shat = shat_values;
    r.N = N;
    r.d = d;
    r.residuals.resize(std::size_t(d));
    for (int i = 0; i < d; ++i)
        r.residuals[std::size_t(i)] = y[std::size_t(i)] - (intercept + slope * x[std::size_t(i)]);
    return r;
}

KMatrix kmatrix_analytic_q1(const WaveletSpec& spec, double H, int d) {
    if (d < 2 || d > 8) throw validation_error("kmatrix: d must lie in [2, 8]");
    KMatrix K;
    K.d = d;
    K.provenance = KMatrix::Provenance::analytic_q1;
    K.k.assign(std::size_t(d) * std::size_t(d), 0.0);
    double cpsi = compute_cpsi(spec, H, 256).cpsi;
    for (int i = 0; i < d; ++i) K.k[std::size_t(i) * std::size_t(d) + std::size_t(i)] = 2.0;
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            double m1 = double(i + 1), m2 = double(j + 1);
            double cov = cross_scale_covariance(spec, H, 1.0 / m1, 1.0 / m2);
            double v = 2.0 * std::pow(m1 * m2, 2.0 * H + 1.0) * cov * cov / (cpsi * cpsi);
            K.k[std::size_t(i) * std::size_t(d) + std::size_t(j)] = v;
            K.k[std::size_t(j) * std::size_t(d) + std::size_t(i)] = v;
        }
    return K;
}

KMatrix kmatrix_montecarlo(const ModelParams& params, const WaveletSpec& spec, int d,
                           int replications, std::uint64_t seed, int R_quad,
                           int inner_factor) {
    params.validate();
    if (d < 2 || d > 8) throw validation_error("kmatrix: d must lie in [2, 8]");
    if (replications < 16) throw validation_error("kmatrix: at least 16 replications required");
    if (R_quad < 64) throw validation_error("kmatrix: R_quad must be >= 64");

    // One path per replication on [0, 1]; the node times j/(R M) all land on
    // the common grid with lcm(1..d) points per quadrature step.
    const std::size_t n = std::size_t(R_quad) * std::size_t(lcm_upto(d));
    const double step = 1.0 / double(n);
    const double H = params.hurst;
    const double cpsi = compute_cpsi(spec, H, 256).cpsi;

    std::vector<std::vector<double>> usq(std::size_t(replications),
                                         std::vector<double>(std::size_t(d), 0.0));
    if (params.q == 1) {
        FbmEngine eng(H, n, step);
#pragma omp parallel for
        for (int r = 0; r < replications; ++r) {
            ProcessPath path = eng.simulate(seed, std::uint32_t(r));
            for (int m = 1; m <= d; ++m) {
                double c = scale_coefficient(path, spec, 1.0 / m, 0.0, R_quad);
                double ea2 = std::pow(1.0 / m, 2.0 * H + 1.0) * cpsi;
                usq[std::size_t(r)][std::size_t(m - 1)] = c * c / ea2;
            }
        }
    } else {
        NcltEngine eng(params, n, step, inner_factor);
#pragma omp parallel for
        for (int r = 0; r < replications; ++r) {
            ProcessPath path = eng.simulate(seed, std::uint32_t(r));
            for (int m = 1; m <= d; ++m) {
                double c = scale_coefficient(path, spec, 1.0 / m, 0.0, R_quad);
                double ea2 = std::pow(1.0 / m, 2.0 * H + 1.0) * cpsi;
                usq[std::size_t(r)][std::size_t(m - 1)] = c * c / ea2;
            }
        }
    }

    std::vector<double> mean(std::size_t(d), 0.0);
    for (int r = 0; r < replications; ++r)
        for (int m = 0; m < d; ++m) mean[std::size_t(m)] += usq[std::size_t(r)][std::size_t(m)];
    for (int m = 0; m < d; ++m) mean[std::size_t(m)] /= replications;

    KMatrix K;
    K.d = d;
    K.provenance = KMatrix::Provenance::monte_carlo;
    K.k.assign(std::size_t(d) * std::size_t(d), 0.0);
    K.se.assign(std::size_t(d) * std::size_t(d), 0.0);
    const double nr = double(replications);
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
            double acc = 0, acc2 = 0;
            for (int r = 0; r < replications; ++r) {
                double t = (usq[std::size_t(r)][std::size_t(i)] - mean[std::size_t(i)]) *
                           (usq[std::size_t(r)][std::size_t(j)] - mean[std::size_t(j)]);
                acc += t;
                acc2 += t * t;
            }
            double cov = acc / (nr - 1.0);
            double var_t = (acc2 - acc * acc / nr) / (nr - 1.0);
            double se = std::sqrt(var_t / nr);
            K.k[std::size_t(i) * std::size_t(d) + std::size_t(j)] = cov;
            K.k[std::size_t(j) * std::size_t(d) + std::size_t(i)] = cov;
            K.se[std::size_t(i) * std::size_t(d) + std::size_t(j)] = se;
            K.se[std::size_t(j) * std::size_t(d) + std::size_t(i)] = se;
        }

    // The standardized squares share one marginal law across scales: pool the
    // diagonal (plain average) and propagate the averaged per-term series SE.
    double diag = 0;
    for (int m = 0; m < d; ++m) diag += K.at(m, m);
    diag /= d;
    double acc = 0, acc2 = 0;
    for (int r = 0; r < replications; ++r) {
        double t = 0;
        for (int m = 0; m < d; ++m) {
            double u = usq[std::size_t(r)][std::size_t(m)] - mean[std::size_t(m)];
            t += u * u;
        }
        t /= d;
        acc += t;
        acc2 += t * t;
    }
    double var_t = (acc2 - acc * acc / nr) / (nr - 1.0);
    double diag_se = std::sqrt(var_t / nr);
    for (int m = 0; m < d; ++m) {
        K.k[std::size_t(m) * std::size_t(d) + std::size_t(m)] = diag;
        K.se[std::size_t(m) * std::size_t(d) + std::size_t(m)] = diag_se;
    }
    return K;
}

double asymptotic_sigma2(const KMatrix& K, int d) {
    if (d < 2) throw validation_error("sigma2: at least two scales required");
    if (K.d != d || int(K.k.size()) != d * d)
        throw validation_error("sigma2: K matrix does not match d");
    // Design L (d x 2) with rows (log M, 1); slope coordinate is column 0.
    std::vector<double> lx(static_cast<std::size_t>(d));
    for (int m = 1; m <= d; ++m) lx[std::size_t(m - 1)] = std::log(double(m));
    double ltl00 = 0, ltl01 = 0, ltl11 = double(d);
    for (int i = 0; i < d; ++i) {
        ltl00 += lx[std::size_t(i)] * lx[std::size_t(i)];
        ltl01 += lx[std::size_t(i)];
    }
    double det = ltl00 * ltl11 - ltl01 * ltl01;
    if (!(std::fabs(det) > 1e-14)) throw runtime_failure("sigma2: singular design matrix");
    double g00 = ltl11 / det, g01 = -ltl01 / det, g11 = ltl00 / det;

    // A = L^T K L (2 x 2)
    double a00 = 0, a01 = 0, a10 = 0, a11 = 0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            double kij = K.at(i, j);
            a00 += lx[std::size_t(i)] * kij * lx[std::size_t(j)];
            a01 += lx[std::size_t(i)] * kij;
            a10 += kij * lx[std::size_t(j)];
            a11 += kij;
        }
    // (G A G)[0,0] with symmetric G
    double b00 = g00 * a00 + g01 * a10;  // first row of G*A
    double b01 = g00 * a01 + g01 * a11;
    double m00 = b00 * g00 + b01 * g01;
    (void)g11;
    return 0.25 * m00;
}

}  // namespace hermest
