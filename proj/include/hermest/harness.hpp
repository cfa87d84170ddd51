#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hermest/estimator.hpp"
#include "hermest/variation.hpp"

namespace hermest {

struct ExperimentConfig {
    ModelParams model;
    IndexParams index;
    std::string wavelet = "poly";
    int wavelet_res = 0;                 // 0 = family default
    std::optional<Backend> backend;      // default: exact_fbm for q=1, nclt otherwise
    int replications = 100;
    std::uint64_t base_seed = 1;
    int R = 0;                           // quadrature nodes, 0 = 2^N
    int inner_factor = 64;               // partial-sum backend
    std::size_t memory_ceiling_bytes = 0;  // 0 = environment/default
    int threads = 0;                     // 0 = runtime default

    Backend effective_backend() const;
    int effective_R() const;
    void validate() const;
};

struct RepOutcome {
    double hhat = 0;
    std::vector<double> shat;
    std::vector<double> vhat;
    bool ok = false;
    std::string error;
};

struct MonteCarloReport {
    ExperimentConfig config;
    std::size_t card = 0;            // sparse position count
    double cpsi = 0;
    double sigma2 = 0;               // 0 when unavailable (q >= 2)
    std::string sigma2_provenance;   // "analytic-q1" or ""
    std::vector<RepOutcome> reps;
    // Aggregates over successful replications:
    double mean_hhat = 0, sd_hhat = 0, bias = 0, rmse = 0;
    std::vector<double> std_errors;          // sqrt(card) (H - hhat) / sigma
    double ks_std_normal = -1;               // vs N(0,1); -1 when sigma2 unavailable
    std::vector<double> ks_vhat;             // per scale M vs N(0, K_psi_H), q=1 only
    double coverage95 = -1;
    int failed = 0;
};

// Memory ceiling in bytes: HERMEST_MEMORY_LIMIT_MB (default 4096 MB).
std::size_t memory_ceiling_bytes();

// Work plan shared by all replications (wavelet tables, engines, fgn setup).
class PreparedExperiment;

MonteCarloReport run_experiment(const ExperimentConfig& config);
// Serial reference of the replication loop (kept for equivalence tests).
MonteCarloReport run_experiment_serial(const ExperimentConfig& config);

// One replication; exposed for determinism tests.
RepOutcome run_replication(const ExperimentConfig& config, std::uint32_t rep_id);

// Kolmogorov-Smirnov sup-distance between the sample and N(mean, variance).
double ks_normality(std::vector<double> samples, double mean, double variance);

// Fraction of |hhat - H| <= z_level * sqrt(sigma2 / card).
double coverage(const std::vector<double>& hhat_samples, double true_H, double sigma2,
                double card, double level);

// Standard normal CDF and quantile.
double normal_cdf(double x);
double normal_quantile(double p);

// Deterministic JSON serialization (no wall-clock content).
std::string report_to_json(const MonteCarloReport& report);
void write_samples_csv(const MonteCarloReport& report, const std::string& file);

}  // namespace hermest
