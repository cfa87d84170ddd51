#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "hermest/fgn.hpp"

namespace hermest {

enum class Backend { exact_fbm, nclt, chaos_grid };

std::string backend_name(Backend b);
Backend parse_backend(const std::string& name);

struct ModelParams {
    int q = 1;            // Hermite rank
    double hurst = 0.7;   // H in (1/2, 1)
    double c_qh = 0;      // chaos-backend normalization, calibrated when used

    void validate() const;  // throws validation_error
};

// Sampled trajectory on a uniform grid: values[j] = Z(j * step), j = 0..n.
struct ProcessPath {
    ModelParams params;
    double step = 0;
    std::vector<double> values;  // length n+1, values[0] = 0
    Backend backend = Backend::exact_fbm;
    std::uint64_t seed = 0;

    double horizon() const { return step * double(values.size() - 1); }
};

// The renormalized Hermite polynomial H_q(x) = He_q(x) / q! where He_q is
// the probabilists' polynomial (He_1 = x, He_2 = x^2 - 1, ...).
double hermite_poly(int q, double x);
double hermite_he(int q, double x);

// Exact variance of S_m = sum_{i=1..m} He_q(X_i) for X fGn with Hurst H0:
// q! * sum_{|k| < m} (m - |k|) r(k)^q. Used to calibrate the partial-sum backend.
double nclt_exact_variance(int q, double H0, std::size_t m);

// Reusable engine: one circulant embedding, many replications.
class FbmEngine {
public:
    FbmEngine(double H, std::size_t n, double step);
    ProcessPath simulate(std::uint64_t seed, std::uint32_t replication) const;
    std::size_t n() const { return n_; }
    const FgnGenerator& fgn() const { return fgn_; }

private:
    double H_, step_;
    std::size_t n_;
    FgnGenerator fgn_;
};

class NcltEngine {
public:
    NcltEngine(const ModelParams& params, std::size_t n, double step, int inner_factor);
    ProcessPath simulate(std::uint64_t seed, std::uint32_t replication) const;
    std::size_t fgn_length() const { return m_total_; }
    double H0() const { return H0_; }
    const FgnGenerator& fgn() const { return fgn_; }

private:
    ModelParams params_;
    std::size_t n_;
    double step_;
    int inner_;
    std::size_t m_total_;
    double H0_;
    double norm_;  // 1 / sqrt(Var S_{m_total})
    FgnGenerator fgn_;
};

// One-shot helpers matching the CLI surface (replication id 0).
ProcessPath simulate_fbm_exact(double H, std::size_t n, double step, std::uint64_t seed);
ProcessPath simulate_hermite_nclt(const ModelParams& params, std::size_t n, double step,
                                  int inner_factor, std::uint64_t seed);

// Binary path format "HERM1" (see io.cpp for the layout).
void write_path(const ProcessPath& path, const std::string& file);
ProcessPath read_path(const std::string& file);

}  // namespace hermest
