#pragma once

#include <functional>
#include <vector>

namespace hermest::quad {

// Nodes and weights on [-1, 1].
struct Rule {
    std::vector<double> x;
    std::vector<double> w;
};

// Gauss-Legendre rule with n nodes (Newton iteration on Legendre polynomials).
Rule gauss_legendre(int n);

// Clenshaw-Curtis rule with n nodes (n >= 2, closed, Chebyshev points).
Rule clenshaw_curtis(int n);

// Integral of f over [a, b] with a single application of the rule.
double integrate_cell(const Rule& rule, const std::function<double(double)>& f,
                      double a, double b);

// Composite integral over [a, b] split into `cells` equal cells.
double integrate_composite(const Rule& rule, const std::function<double(double)>& f,
                           double a, double b, int cells);

// Composite 2-D integral of f over [0,1]^2 on cells_per_axis^2 equal cells,
// recursively subdividing (up to max_depth extra levels) every cell that meets
// the line sa*x = sb*y, where the integrand's derivative is unbounded.
double integrate2d_line_refined(const std::function<double(double, double)>& f,
                                double sa, double sb, const Rule& rule,
                                int cells_per_axis, int max_depth);

}  // namespace hermest::quad
