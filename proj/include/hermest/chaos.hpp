#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "hermest/hermite_sim.hpp"
#include "hermest/wavelet.hpp"

namespace hermest {

// Uniform cell grid over (-T0, t_max] carrying i.i.d. N(0, delta) Brownian
// increments; the multiple integral is discretized as an off-diagonal simple-
// function sum over these cells.
struct ChaosGrid {
    double T0 = 0;
    double t_max = 0;
    std::size_t cells = 0;
    double delta = 0;
    // Estimated share of the kernel's second-moment mass lost below -T0,
    // relative to the total (reported, and warned about when > 1e-3).
    double truncation_excess = 0;
};

// Builds the grid; T0 <= 0 selects the smallest T0 = (2^k - 1) t_max whose
// estimated truncation excess is below 1e-3, capped so the cells keep
// resolving the kernel (total width at most cells/32 per unit, and at most
// 1023 t_max); the residual excess is reported. q must be 1 or 2.
ChaosGrid make_chaos_grid(const ModelParams& params, double t_max, std::size_t cells,
                          double T0 = 0);

// Known closed form for the q = 1 normalization: c^2 = H(2H-1)/B(2-2H, H-1/2).
double cqh_closed_form_q1(double H);

// Discretized symmetric kernel of one chaos integral on the grid cells.
// q = 1 stores a vector, q = 2 a dense symmetric matrix (row-major).
struct ChaosKernel {
    int q = 1;
    std::size_t cells = 0;
    double delta = 0;
    std::vector<double> a;  // cells (q=1) or cells*cells (q=2) cell averages

    // q! * ||kernel||^2 over off-diagonal tuples (the deterministic variance
    // of the evaluated integral).
    double second_moment() const;
    // Same, restricted to tuples with all (inside) / not all (outside) indices
    // in [lo, cells).
    double second_moment_inside(std::size_t lo) const;
    double second_moment_outside(std::size_t lo) const;

    // Off-diagonal simple-function sum against increments W (length cells).
    double evaluate(const std::vector<double>& W) const;
    double evaluate_inside(const std::vector<double>& W, std::size_t lo) const;
    double evaluate_outside(const std::vector<double>& W, std::size_t lo) const;
};

struct ChaosDecomposition {
    double tilde = 0;
    double check = 0;
    double total = 0;
};

class ChaosEngine {
public:
    ChaosEngine(const ModelParams& params, const ChaosGrid& grid);

    const ChaosGrid& grid() const { return grid_; }
    const ModelParams& params() const { return params_; }
    // Normalization calibrated so that the deterministic second moment of the
    // discretized Z_1 equals 1 on this grid.
    double cqh() const { return cqh_; }

    // Brownian cell increments for one replication (length = cells).
    std::vector<double> draw_increments(std::uint64_t seed, std::uint32_t replication) const;

    // Kernel of Z_t (includes the c_qH factor). t in (0, t_max].
    ChaosKernel time_kernel(double t) const;

    // Kernel of the wavelet coefficient c(a,k) = sqrt(a) I psi(x) Z_{a(x+k)} dx
    // (includes c_qH and sqrt(a)). Requires a(k+1) <= t_max.
    ChaosKernel coefficient_kernel(const WaveletSpec& spec, double a, long long k) const;

    // First grid cell of the region (a(k-M), a(k+1)) used by the tilde part.
    std::size_t tilde_low_cell(double a, long long k, double M) const;

    // Tilde part (all integration variables in the window), check part
    // (complement), and independently accumulated total.
    ChaosDecomposition decompose(const ChaosKernel& kernel, std::size_t tilde_lo,
                                 const std::vector<double>& W) const;

    // Path sampling at fixed times (each in [0, t_max]).
    void prepare_times(const std::vector<double>& t_list);
    std::vector<double> sample_path(std::uint64_t seed, std::uint32_t replication) const;
    double deterministic_second_moment(double t) const;

private:
    struct Panel {  // u-integration segment (Gauss nodes inside one grid cell)
        std::size_t cell;
        std::array<double, 8> u, w;
    };
    std::vector<Panel> build_panels(double lo, double hi) const;
    void accumulate_kernel(ChaosKernel& k, double u, double w) const;

    ModelParams params_;
    ChaosGrid grid_;
    double alpha_ = 0;
    double cqh_ = 1;
    std::vector<double> times_;        // prepared, as given
    std::vector<std::size_t> order_;   // ascending order of times_
    std::vector<Panel> panels_;        // segments covering (0, max t], split at times
    std::vector<std::size_t> cuts_;    // per sorted time: leading panel count
};

// Spec-surface helpers (single replication, id 0).
std::vector<double> simulate_chaos_grid(const ModelParams& params, const ChaosGrid& grid,
                                        const std::vector<double>& t_list, std::uint64_t seed);
double normalize_cqh(const ModelParams& params, const ChaosGrid& grid);
ChaosDecomposition decompose_coefficient(const ModelParams& params, const ChaosGrid& grid,
                                         const WaveletSpec& spec, double a, long long k,
                                         double M, std::uint64_t seed);

}  // namespace hermest
