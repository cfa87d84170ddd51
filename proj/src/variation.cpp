#include "hermest/variation.hpp"

#include <cmath>

#include "hermest/errors.hpp"

namespace hermest {

namespace {

int floor_pow(int N, double expo) {
    return int(std::floor(std::pow(double(N), expo) + 1e-9));
}

// Nearest-node path lookup; the collection grid is chosen so that most lookup
// times land exactly on nodes (snapping error at most step/2 otherwise).
double path_value(const ProcessPath& path, double t) {
    auto idx = std::llround(t / path.step);
    if (idx < 0 || std::size_t(idx) >= path.values.size())
        throw validation_error("coefficient time outside the simulated horizon");
    return path.values[std::size_t(idx)];
}

double riemann_coefficient(const ProcessPath& path, const WaveletSpec& spec, double a,
                           double k, int R) {
    if (R < 1) throw validation_error("coefficient node count R must be >= 1");
    double s = 0;
    for (int j = 1; j <= R; ++j) {
        double x = double(j) / double(R);
        double psi = eval_wavelet(spec, x);
        if (psi == 0.0) continue;
        s += psi * path_value(path, a * (x + k));
    }
    return std::sqrt(a) * s / double(R);
}

}  // namespace

void IndexParams::validate() const {
    if (N < 4 || N > 30) throw validation_error("index: N must lie in [4, 30]");
    if (!(gamma > 0 && gamma < beta && beta < 1))
        throw validation_error("index: exponents must satisfy 0 < gamma < beta < 1");
    if (d < 1 || d > 8) throw validation_error("index: d must lie in [1, 8]");
}

int IndexParams::nb() const { return floor_pow(N, beta); }
int IndexParams::ng() const { return floor_pow(N, gamma); }

IndexSets index_sets(const IndexParams& p) {
    p.validate();
    IndexSets s;
    s.l_full_max = 1LL << (p.N - p.nb());
    long long sparse_max = std::min(s.l_full_max, 1LL << p.ng());
    s.l_gamma.reserve(std::size_t(sparse_max));
    for (long long l = 1; l <= sparse_max; ++l) s.l_gamma.push_back(l);
    return s;
}

double grid_point(long long ell, const IndexParams& p) {
    return double(ell) * std::ldexp(1.0, p.nb() - p.N);
}

double discrete_coefficient(const ProcessPath& path, const WaveletSpec& spec, long long ell,
                            int M, const IndexParams& p, int R) {
    if (M < 1) throw validation_error("coefficient scale index M must be >= 1");
    double a = 1.0 / (double(M) * std::ldexp(1.0, p.N));
    double k = double(ell) * std::ldexp(1.0, p.nb()) * double(M);  // e_l / a, an exact integer
    return riemann_coefficient(path, spec, a, k, R);
}

double quadrature_coefficient(const ProcessPath& path, const WaveletSpec& spec, long long ell,
                              int M, const IndexParams& p, int R_fine) {
    return discrete_coefficient(path, spec, ell, M, p, R_fine);
}

double scale_coefficient(const ProcessPath& path, const WaveletSpec& spec, double a, double k,
                         int R) {
    if (!(a > 0)) throw validation_error("coefficient scale a must be positive");
    return riemann_coefficient(path, spec, a, k, R);
}

CoefficientSet collect_coefficients(const ProcessPath& path, const WaveletSpec& spec,
                                    const IndexParams& p, int R) {
    p.validate();
    IndexSets sets = index_sets(p);
    CoefficientSet out;
    out.params = p;
    out.R = R;
    out.ells = sets.l_gamma;
    out.e.assign(std::size_t(p.d), std::vector<double>(out.ells.size(), 0.0));
    const long long stride = static_cast<long long>(out.ells.size());
    const long long count = static_cast<long long>(p.d) * stride;
#pragma omp parallel for
    for (long long idx = 0; idx < count; ++idx) {
        int M = int(idx / stride) + 1;
        std::size_t i = std::size_t(idx % stride);
        out.e[std::size_t(M - 1)][i] = discrete_coefficient(path, spec, out.ells[i], M, p, R);
    }
    return out;
}

CoefficientSet collect_coefficients_serial(const ProcessPath& path, const WaveletSpec& spec,
                                           const IndexParams& p, int R) {
    p.validate();
    IndexSets sets = index_sets(p);
    CoefficientSet out;
    out.params = p;
    out.R = R;
    out.ells = sets.l_gamma;
    out.e.assign(std::size_t(p.d), std::vector<double>(out.ells.size(), 0.0));
    for (int M = 1; M <= p.d; ++M)
        for (std::size_t i = 0; i < out.ells.size(); ++i)
            out.e[std::size_t(M - 1)][i] = discrete_coefficient(path, spec, out.ells[i], M, p, R);
    return out;
}

double shat(const CoefficientSet& coeffs, int M) {
    if (M < 1 || std::size_t(M) > coeffs.e.size())
        throw validation_error("shat: scale index M out of range");
    const std::vector<double>& row = coeffs.e[std::size_t(M - 1)];
    if (row.empty()) throw validation_error("shat: empty coefficient set");
    double s = 0;
    bool any = false;
    for (double v : row) {
        s += v * v;
        any = any || v != 0.0;
    }
    if (!any) throw runtime_failure("shat: all coefficients are zero (degenerate path)");
    return s / double(row.size());
}

double vhat(const CoefficientSet& coeffs, int M, double true_H, double cpsi) {
    if (M < 1 || std::size_t(M) > coeffs.e.size())
        throw validation_error("vhat: scale index M out of range");
    if (!(cpsi > 0)) throw validation_error("vhat: cpsi must be positive");
    const std::vector<double>& row = coeffs.e[std::size_t(M - 1)];
    if (row.empty()) throw validation_error("vhat: empty coefficient set");
    const double scale = double(M) * std::ldexp(1.0, coeffs.params.N);
    const double ea2 = std::pow(scale, -(2.0 * true_H + 1.0)) * cpsi;
    double s = 0;
    for (double v : row) s += v * v / ea2 - 1.0;
    return s / std::sqrt(double(row.size()));
}

ResourcePlan plan_resources(const IndexParams& p, int R, int d) {
    p.validate();
    if (R < 1) throw validation_error("plan: R must be >= 1");
    if (d < 1) throw validation_error("plan: d must be >= 1");
    IndexSets sets = index_sets(p);
    long long lmax = sets.l_gamma.back();
    ResourcePlan plan;
    // horizon / step = R d (lmax 2^nb + 1) exactly; integer arithmetic avoids
    // a ceil on the rounded quotient.
    plan.n = std::size_t(R) * std::size_t(d) * (std::size_t(lmax) * (std::size_t(1) << p.nb()) + 1);
    plan.step = 1.0 / (double(R) * double(d) * std::ldexp(1.0, p.N));
    plan.horizon = double(plan.n) * plan.step;
    plan.path_bytes = (plan.n + 1) * sizeof(double);
    return plan;
}

}  // namespace hermest
