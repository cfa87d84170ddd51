#include "hermest/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace hermest::quad {

Rule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n >= 1 required");
    Rule r;
    r.x.resize(n);
    r.w.resize(n);
    const double pi = std::acos(-1.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double p1 = 0;
        for (int it = 0; it < 100; ++it) {
            // Legendre recurrence for P_n(x) and P_{n-1}(x).
            double p0 = 1.0, pm = 0.0;
            for (int j = 0; j < n; ++j) {
                double pn = ((2.0 * j + 1.0) * x * p0 - j * pm) / (j + 1.0);
                pm = p0;
                p0 = pn;
            }
            p1 = n * (x * p0 - pm) / (x * x - 1.0);  // derivative
            double dx = p0 / p1;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        r.x[i] = -x;
        r.x[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * p1 * p1);
        r.w[i] = w;
        r.w[n - 1 - i] = w;
    }
    return r;
}

Rule clenshaw_curtis(int n) {
    if (n < 2) throw std::invalid_argument("clenshaw_curtis: n >= 2 required");
    const int N = n - 1;
    const double pi = std::acos(-1.0);
    Rule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int k = 0; k <= N; ++k) {
        double theta = pi * k / N;
        r.x[k] = -std::cos(theta);  // ascending
        double ck = (k == 0 || k == N) ? 0.5 : 1.0;
        double s = 1.0;
        for (int m = 2; m <= N; m += 2) {
            double im = 2.0 / (1.0 - double(m) * m);
            double half = (m == N) ? 0.5 : 1.0;
            s += half * im * std::cos(m * theta);
        }
        r.w[k] = 2.0 * ck * s / N;
    }
    return r;
}

double integrate_cell(const Rule& rule, const std::function<double(double)>& f,
                      double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0;
    for (std::size_t i = 0; i < rule.x.size(); ++i) s += rule.w[i] * f(c + h * rule.x[i]);
    return s * h;
}

double integrate_composite(const Rule& rule, const std::function<double(double)>& f,
                           double a, double b, int cells) {
    if (cells < 1) throw std::invalid_argument("integrate_composite: cells >= 1");
    double s = 0;
    const double h = (b - a) / cells;
    for (int c = 0; c < cells; ++c) s += integrate_cell(rule, f, a + c * h, a + (c + 1) * h);
    return s;
}

namespace {

double tensor_cell(const std::function<double(double, double)>& f, const Rule& rule,
                   double x0, double x1, double y0, double y1) {
    const double cx = 0.5 * (x0 + x1), hx = 0.5 * (x1 - x0);
    const double cy = 0.5 * (y0 + y1), hy = 0.5 * (y1 - y0);
    double s = 0;
    for (std::size_t i = 0; i < rule.x.size(); ++i) {
        const double xi = cx + hx * rule.x[i];
        double row = 0;
        for (std::size_t j = 0; j < rule.x.size(); ++j)
            row += rule.w[j] * f(xi, cy + hy * rule.x[j]);
        s += rule.w[i] * row;
    }
    return s * hx * hy;
}

bool meets_line(double sa, double sb, double x0, double x1, double y0, double y1) {
    // The line sa*x = sb*y crosses the cell iff the scaled intervals overlap.
    return sa * x0 <= sb * y1 && sb * y0 <= sa * x1;
}

double refine_cell(const std::function<double(double, double)>& f, double sa, double sb,
                   const Rule& rule, double x0, double x1, double y0, double y1, int depth) {
    if (depth <= 0 || !meets_line(sa, sb, x0, x1, y0, y1))
        return tensor_cell(f, rule, x0, x1, y0, y1);
    const double xm = 0.5 * (x0 + x1), ym = 0.5 * (y0 + y1);
    double s = 0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const double ax = i ? xm : x0, bx = i ? x1 : xm;
            const double ay = j ? ym : y0, by = j ? y1 : ym;
            if (meets_line(sa, sb, ax, bx, ay, by))
                s += refine_cell(f, sa, sb, rule, ax, bx, ay, by, depth - 1);
            else
                s += tensor_cell(f, rule, ax, bx, ay, by);
        }
    return s;
}

}  // namespace

double integrate2d_line_refined(const std::function<double(double, double)>& f,
                                double sa, double sb, const Rule& rule,
                                int cells_per_axis, int max_depth) {
    if (cells_per_axis < 1) throw std::invalid_argument("integrate2d: cells >= 1");
    const double h = 1.0 / cells_per_axis;
    double s = 0;
    for (int i = 0; i < cells_per_axis; ++i)
        for (int j = 0; j < cells_per_axis; ++j)
            s += refine_cell(f, sa, sb, rule, i * h, (i + 1) * h, j * h, (j + 1) * h, max_depth);
    return s;
}

}  // namespace hermest::quad
