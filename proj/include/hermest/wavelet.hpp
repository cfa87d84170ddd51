#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace hermest {

enum class WaveletKind { poly, haar, daubechies, tabulated };

enum class QuadScheme { gauss, clenshaw_curtis };

// Analyzing function supported on [0, 1]. Analytic kinds (poly, haar) evaluate
// in closed form; daubechies/tabulated kinds evaluate by linear interpolation
// of a uniform table over [0, 1] (any node count; daubechies tables keep every
// cascade node, (2 order - 1) 2^resolution_log2 + 1 of them).
struct WaveletSpec {
    WaveletKind kind = WaveletKind::poly;
    int vanishing_moments = 1;  // Q
    int daub_order = 0;
    int resolution_log2 = 12;
    std::vector<double> table;  // 2^resolution_log2 + 1 values on [0,1]
    std::string name;
};

// Default analytic wavelet: psi(x) = kappa * x^2 (1-x)^2 (1-2x) on [0,1],
// kappa = 3*sqrt(770) so that the L2 norm is 1. One vanishing moment, C^1.
WaveletSpec make_poly(int resolution_log2 = 12);

// Haar step (+1 on [0,1/2], -1 on (1/2,1]). Oracle wavelet only: it is not
// continuously differentiable, which the estimator's theory assumes.
WaveletSpec make_haar(int resolution_log2 = 12);

// Daubechies wavelet of the given order (2..10), tabulated by the exact dyadic
// cascade at `levels` refinement levels and compressed onto [0,1]. The table
// keeps every cascade node; vanishing_moments = order.
WaveletSpec build_daubechies(int order, int levels);

// Parse "poly", "haar" or "db<order>"; resolution_log2 <= 0 selects the
// family default (db2 -> 16, db3 -> 14, other db -> 12, else 12).
WaveletSpec make_wavelet(const std::string& name, int resolution_log2 = 0);

// Point evaluation; returns 0 outside [0,1]. Total function.
double eval_wavelet(const WaveletSpec& spec, double x);

// Integral of x^p * psi(x) over [0,1] by composite quadrature at the spec's
// resolution (exact for the tabulated interpolant and for analytic kinds).
double wavelet_moment(const WaveletSpec& spec, int p);

struct MomentReport {
    std::vector<double> moments;  // |integral x^p psi| for p = 0..p_max
    bool pass = false;
    int first_fail = -1;  // smallest p < Q with |moment| > tol, or -1
};

// Checks the vanishing moments p < Q against tol; moments up to p_max reported.
MomentReport verify_vanishing_moments(const WaveletSpec& spec, int p_max, double tol);

struct WaveletConstant {
    double hurst = 0;
    double cpsi = 0;
    double quadrature_error = 0;  // |value(resolution) - value(resolution/2)|
};

// C_psi(H) = -1/2 * II psi(x) psi(y) |x-y|^(2H) dx dy, by composite 2-D
// quadrature with `resolution` cells per axis (>= 8) and recursive subcell
// refinement along the diagonal. Throws if the result is not positive.
WaveletConstant compute_cpsi(const WaveletSpec& spec, double H, int resolution,
                             QuadScheme scheme = QuadScheme::gauss);

// E[c(a,0) c(b,0)] = -1/2 sqrt(ab) II psi(x) psi(y) |ax-by|^(2H) dx dy.
// Symmetric in (a, b); cross_scale_covariance(spec,H,a,a) = a^(2H+1) C_psi(H).
double cross_scale_covariance(const WaveletSpec& spec, double H, double a, double b);

// Integral of psi over [s, 1] (0 for s >= 1, and equal to the full integral,
// i.e. ~0 by the vanishing moment, for s <= 0). Exact for analytic kinds,
// exact for the interpolant of tabulated kinds.
double integral_psi_tail(const WaveletSpec& spec, double s);

// CSV export of the tabulation (columns: x, psi).
void export_table_csv(const WaveletSpec& spec, std::ostream& os);

// Daubechies scaling filters (order 2..10), sum h = sqrt(2).
const std::vector<double>& daubechies_filter(int order);

}  // namespace hermest
