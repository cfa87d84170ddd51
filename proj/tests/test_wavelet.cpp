#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "hermest/errors.hpp"
#include "hermest/quadrature.hpp"
#include "hermest/wavelet.hpp"

using hermest::compute_cpsi;
using hermest::cross_scale_covariance;
using hermest::eval_wavelet;
using hermest::integral_psi_tail;
using hermest::make_wavelet;
using hermest::QuadScheme;
using hermest::validation_error;
using hermest::verify_vanishing_moments;
using hermest::wavelet_moment;
using hermest::WaveletSpec;

namespace {

double l2_norm_sq(const WaveletSpec& spec) {
    const auto rule = hermest::quad::gauss_legendre(16);
    return hermest::quad::integrate_composite(
        rule, [&](double x) { double v = eval_wavelet(spec, x); return v * v; }, 0.0,
        1.0, 4096);
}

}  // namespace

TEST_CASE("polynomial bump wavelet: closed-form values") {
    const WaveletSpec poly = make_wavelet("poly");
    const double kappa = 3.0 * std::sqrt(770.0);

    CHECK(eval_wavelet(poly, 0.0) == 0.0);
    CHECK(eval_wavelet(poly, 1.0) == 0.0);
    CHECK(eval_wavelet(poly, -0.3) == 0.0);
    CHECK(eval_wavelet(poly, 1.7) == 0.0);
    CHECK(std::abs(eval_wavelet(poly, 0.25) - kappa * 0.017578125) < 1e-13);
    // Antisymmetry about 1/2.
    for (double x : {0.1, 0.2, 0.35, 0.45})
        CHECK(std::abs(eval_wavelet(poly, x) + eval_wavelet(poly, 1.0 - x)) < 1e-12);

    CHECK(std::abs(wavelet_moment(poly, 0)) < 1e-12);
    // m1 = kappa * integral x^3 (1-x)^2 (1-2x) dx = kappa * (-1/420).
    CHECK(std::abs(wavelet_moment(poly, 1) + std::sqrt(770.0) / 140.0) < 1e-12);
    CHECK(std::abs(l2_norm_sq(poly) - 1.0) < 1e-12);

    const auto report = verify_vanishing_moments(poly, 2, 1e-10);
    CHECK(report.pass);
    CHECK(report.first_fail == -1);
}

TEST_CASE("haar wavelet: closed-form values") {
    const WaveletSpec haar = make_wavelet("haar");
    CHECK(eval_wavelet(haar, 0.3) == 1.0);
    CHECK(eval_wavelet(haar, 0.5) == 1.0);
    CHECK(eval_wavelet(haar, 0.7) == -1.0);
    CHECK(std::abs(wavelet_moment(haar, 0)) < 1e-14);
    CHECK(std::abs(wavelet_moment(haar, 1) + 0.25) < 1e-12);
    CHECK(std::abs(l2_norm_sq(haar) - 1.0) < 1e-12);
}

TEST_CASE("tail integral of psi matches direct quadrature") {
    const auto rule = hermest::quad::gauss_legendre(16);
    // Integrate [s, 1] in pieces split at 1/2 so the haar jump sits on a cell
    // boundary and the rule converges at full order.
    auto direct = [&](const WaveletSpec& spec, double s) {
        auto f = [&](double x) { return eval_wavelet(spec, x); };
        if (s < 0.5)
            return hermest::quad::integrate_composite(rule, f, s, 0.5, 2048) +
                   hermest::quad::integrate_composite(rule, f, 0.5, 1.0, 2048);
        return hermest::quad::integrate_composite(rule, f, s, 1.0, 2048);
    };
    for (const char* name : {"poly", "haar"}) {
        const WaveletSpec spec = make_wavelet(name);
        for (double s : {0.0, 0.1, 0.25, 0.5, 0.52, 0.8, 1.0})
            CHECK(std::abs(integral_psi_tail(spec, s) - direct(spec, s)) < 1e-12);
        CHECK(integral_psi_tail(spec, 1.2) == 0.0);
        CHECK(std::abs(integral_psi_tail(spec, -0.5)) < 1e-12);
    }
    // Closed forms for the analytic families.
    const WaveletSpec poly = make_wavelet("poly");
    CHECK(std::abs(integral_psi_tail(poly, 0.5) + std::sqrt(770.0) / 64.0) < 1e-13);
    const WaveletSpec haar = make_wavelet("haar");
    CHECK(std::abs(integral_psi_tail(haar, 0.5) + 0.5) < 1e-15);
    CHECK(std::abs(integral_psi_tail(haar, 0.25) + 0.25) < 1e-15);

    // Tabulated family: the full tail equals the moment integral computed by
    // an independent per-segment rule, and partial segments integrate the
    // linear interpolant exactly.
    const WaveletSpec db2 = make_wavelet("db2");
    CHECK(std::abs(integral_psi_tail(db2, 0.0) - wavelet_moment(db2, 0)) < 1e-10);
    const double h = 1.0 / double(db2.table.size() - 1);
    const double s0 = 10.25 * h, s1 = 10.75 * h;  // interior of one segment
    const double trapezoid =
        (s1 - s0) * 0.5 * (eval_wavelet(db2, s0) + eval_wavelet(db2, s1));
    CHECK(std::abs((integral_psi_tail(db2, s0) - integral_psi_tail(db2, s1)) -
                   trapezoid) < 1e-14);
}

TEST_CASE("variance constant: frozen oracle values") {
    const WaveletSpec poly = make_wavelet("poly");
    const WaveletSpec haar = make_wavelet("haar");

    // haar at H = 1/2 has the closed form 1/12.
    const auto haar_half = compute_cpsi(haar, 0.5, 128);
    CHECK(std::abs(haar_half.cpsi - 1.0 / 12.0) < 1e-10);
    // poly at H = 1/2 has the closed form 5/78.
    const auto poly_half = compute_cpsi(poly, 0.5, 128);
    CHECK(std::abs(poly_half.cpsi - 5.0 / 78.0) < 1e-10);

    // Frozen against an independent high-precision evaluation.
    struct Case { double H, want; };
    const Case poly_cases[] = {
        {0.6, 0.059292332259166},
        {0.7, 0.054039104852572},
        {0.75, 0.051404617079681},
        {0.9, 0.043860722113232},
    };
    for (const auto& c : poly_cases) {
        const auto got = compute_cpsi(poly, c.H, 128);
        CHECK(std::abs(got.cpsi - c.want) < 1e-9);
        CHECK(got.cpsi > 0.0);
        CHECK(got.quadrature_error < 1e-7);
    }
    const Case haar_cases[] = {
        {0.6, 0.080216579311848},
        {0.7, 0.076111624800570},
        {0.75, 0.073879612503633},
        {0.9, 0.066994869478455},
    };
    for (const auto& c : haar_cases) {
        const auto got = compute_cpsi(haar, c.H, 128);
        CHECK(std::abs(got.cpsi - c.want) < 1e-9);
    }
}

TEST_CASE("variance constant: scheme agreement and argument checks") {
    const WaveletSpec poly = make_wavelet("poly");
    const auto gl = compute_cpsi(poly, 0.7, 128, QuadScheme::gauss);
    const auto cc = compute_cpsi(poly, 0.7, 128, QuadScheme::clenshaw_curtis);
    CHECK(std::abs(gl.cpsi - cc.cpsi) < 1e-10);

    CHECK_THROWS_AS(compute_cpsi(poly, 0.4, 128), validation_error);
    CHECK_THROWS_AS(compute_cpsi(poly, 1.0, 128), validation_error);
    CHECK_THROWS_AS(compute_cpsi(poly, 0.7, 4), validation_error);
}

TEST_CASE("cross-scale covariance: symmetry, diagonal consistency, frozen values") {
    const WaveletSpec poly = make_wavelet("poly");
    const double H = 0.7;
    const auto c = compute_cpsi(poly, H, 256);

    const double c11 = cross_scale_covariance(poly, H, 1.0, 1.0);
    CHECK(std::abs(c11 - c.cpsi) < 1e-9);
    const double c_half = cross_scale_covariance(poly, H, 0.5, 0.5);
    CHECK(std::abs(c_half - std::pow(0.5, 2 * H + 1) * c.cpsi) < 1e-9);

    CHECK(cross_scale_covariance(poly, H, 1.0, 0.5) ==
          cross_scale_covariance(poly, H, 0.5, 1.0));

    CHECK(std::abs(cross_scale_covariance(poly, H, 1.0, 0.5) -
                   0.014395127283028) < 1e-9);
    CHECK(std::abs(cross_scale_covariance(poly, H, 1.0, 1.0 / 3.0) -
                   0.005766049380155) < 1e-9);
    CHECK(std::abs(cross_scale_covariance(poly, H, 0.5, 1.0 / 3.0) -
                   0.005152861770899) < 1e-9);
}

TEST_CASE("compactly supported orthonormal families from the cascade") {
    for (int order : {2, 3, 4}) {
        const WaveletSpec spec = make_wavelet("db" + std::to_string(order));
        CHECK(spec.vanishing_moments == order);
        // Table covers the whole natural support [0, 2*order - 1] at dyadic
        // spacing; every node is kept so the sum rules hold exactly.
        CHECK(spec.table.size() == std::size_t(2 * order - 1) *
                                           (std::size_t(1) << spec.resolution_log2) +
                                       1);
        const auto report = verify_vanishing_moments(spec, order - 1, 1e-6);
        CHECK(report.pass);
        CHECK(std::abs(l2_norm_sq(spec) - 1.0) < 2e-5);
    }
}

TEST_CASE("cascade refinement keeps coarse-level values") {
    // One more refinement level only inserts midpoints: values shared between
    // the two tabulations differ by a single global normalization ratio.
    const WaveletSpec coarse = hermest::build_daubechies(2, 8);
    const WaveletSpec fine = hermest::build_daubechies(2, 9);
    REQUIRE(fine.table.size() == 2 * coarse.table.size() - 1);
    double ratio = 0;
    for (std::size_t k = 0; k < coarse.table.size(); ++k) {
        if (std::abs(coarse.table[k]) < 1e-8) continue;
        const double r = fine.table[2 * k] / coarse.table[k];
        if (ratio == 0) ratio = r;
        CHECK(std::abs(r - ratio) < 1e-12);
    }
    CHECK(std::abs(ratio - 1.0) < 5e-3);
}

TEST_CASE("wavelet names parse with family defaults") {
    CHECK(make_wavelet("db2").resolution_log2 == 16);
    CHECK(make_wavelet("db3").resolution_log2 == 14);
    CHECK(make_wavelet("db4").resolution_log2 == 12);
    CHECK(make_wavelet("db3", 10).resolution_log2 == 10);
    CHECK(make_wavelet("poly").name == "poly");

    CHECK_THROWS_AS(make_wavelet("unknown"), validation_error);
    CHECK_THROWS_AS(make_wavelet("db1"), validation_error);
    CHECK_THROWS_AS(make_wavelet("dbx"), validation_error);
    CHECK_THROWS_AS(make_wavelet("db3", 99), validation_error);
}

TEST_CASE("tabulation export is a two-column CSV") {
    const WaveletSpec spec = make_wavelet("db2", 6);
    std::ostringstream os;
    hermest::export_table_csv(spec, os);
    const std::string text = os.str();
    CHECK(text.rfind("x,psi\n", 0) == 0);
    std::size_t lines = 0;
    for (char ch : text)
        if (ch == '\n') ++lines;
    CHECK(lines == spec.table.size() + 1);
}
