#include "hermest/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <nlohmann/json.hpp>

#include "hermest/chaos.hpp"
#include "hermest/errors.hpp"
#include "hermest/io.hpp"

namespace hermest {

Backend ExperimentConfig::effective_backend() const {
    if (backend) return *backend;
    return model.q == 1 ? Backend::exact_fbm : Backend::nclt;
}

int ExperimentConfig::effective_R() const { return R > 0 ? R : (1 << index.N); }

void ExperimentConfig::validate() const {
    model.validate();
    index.validate();
    if (replications < 1) throw validation_error("experiment: replications must be >= 1");
    if (R < 0) throw validation_error("experiment: R must be >= 0 (0 selects 2^N)");
    if (inner_factor < 1) throw validation_error("experiment: inner factor must be >= 1");
    if (threads < 0) throw validation_error("experiment: threads must be >= 0");
    if (effective_backend() == Backend::exact_fbm && model.q != 1)
        throw validation_error("experiment: the exact fBm backend requires q = 1");
}

std::size_t memory_ceiling_bytes() {
    const char* env = std::getenv("HERMEST_MEMORY_LIMIT_MB");
    std::size_t mb = 4096;
    if (env && *env) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0' && v > 0) mb = std::size_t(v);
    }
    return mb * std::size_t(1024) * std::size_t(1024);
}

namespace {

struct Prepared {
    ExperimentConfig cfg;
    WaveletSpec spec;
    ResourcePlan plan;
    std::size_t card = 0;
    double cpsi = 0;
    Backend backend = Backend::exact_fbm;
    int R = 0;
    std::unique_ptr<FbmEngine> fbm;
    std::unique_ptr<NcltEngine> nclt;
    std::unique_ptr<ChaosEngine> chaos;
};

Prepared prepare(const ExperimentConfig& cfg) {
    cfg.validate();
    Prepared p;
    p.cfg = cfg;
    p.backend = cfg.effective_backend();
    p.R = cfg.effective_R();
    p.spec = make_wavelet(cfg.wavelet, cfg.wavelet_res);
    p.plan = plan_resources(cfg.index, p.R, cfg.index.d);
    p.card = index_sets(cfg.index).l_gamma.size();
    p.cpsi = compute_cpsi(p.spec, cfg.model.hurst, 256).cpsi;

    // Working-set estimate: path plus the generator's transform buffers
    // (embedding of size <= 4 fGn points, a few arrays wide).
    std::size_t fgn_points = p.plan.n;
    if (p.backend == Backend::nclt) fgn_points *= std::size_t(cfg.inner_factor);
    std::size_t estimate = 10 * sizeof(double) * (fgn_points + p.plan.n + 1);
    std::size_t ceiling =
        cfg.memory_ceiling_bytes ? cfg.memory_ceiling_bytes : memory_ceiling_bytes();
    if (estimate > ceiling) {
        std::ostringstream os;
        os << "experiment needs an estimated " << estimate / (1024 * 1024)
           << " MB but the ceiling is " << ceiling / (1024 * 1024)
           << " MB; reduce N or R, or raise HERMEST_MEMORY_LIMIT_MB";
        throw validation_error(os.str());
    }

    switch (p.backend) {
        case Backend::exact_fbm:
            p.fbm = std::make_unique<FbmEngine>(cfg.model.hurst, p.plan.n, p.plan.step);
            break;
        case Backend::nclt:
            p.nclt = std::make_unique<NcltEngine>(cfg.model, p.plan.n, p.plan.step,
                                                  cfg.inner_factor);
            break;
        case Backend::chaos_grid: {
            ChaosGrid grid = make_chaos_grid(cfg.model, p.plan.horizon, 2048);
            p.chaos = std::make_unique<ChaosEngine>(cfg.model, grid);
            std::vector<double> times(p.plan.n + 1);
            for (std::size_t j = 0; j <= p.plan.n; ++j) times[j] = double(j) * p.plan.step;
            p.chaos->prepare_times(times);
            break;
        }
    }
    return p;
}

RepOutcome replicate(const Prepared& p, std::uint32_t rep_id) {
    RepOutcome out;
    try {
        ProcessPath path;
        switch (p.backend) {
            case Backend::exact_fbm: path = p.fbm->simulate(p.cfg.base_seed, rep_id); break;
            case Backend::nclt: path = p.nclt->simulate(p.cfg.base_seed, rep_id); break;
            case Backend::chaos_grid: {
                path.params = p.chaos->params();
                path.step = p.plan.step;
                path.backend = Backend::chaos_grid;
                path.seed = p.cfg.base_seed;
                path.values = p.chaos->sample_path(p.cfg.base_seed, rep_id);
                break;
            }
        }
        CoefficientSet coeffs = collect_coefficients(path, p.spec, p.cfg.index, p.R);
        std::vector<double> s(std::size_t(p.cfg.index.d));
        for (int M = 1; M <= p.cfg.index.d; ++M) s[std::size_t(M - 1)] = shat(coeffs, M);
        EstimationResult est = estimate_hurst(s, p.cfg.index.N, p.cfg.index.d);
        out.hhat = est.hhat;
        out.shat = s;
        out.vhat.resize(std::size_t(p.cfg.index.d));
        for (int M = 1; M <= p.cfg.index.d; ++M)
            out.vhat[std::size_t(M - 1)] = vhat(coeffs, M, p.cfg.model.hurst, p.cpsi);
        out.ok = true;
    } catch (const std::exception& e) {
        out.ok = false;
        out.error = e.what();
    }
    return out;
}

MonteCarloReport finalize(const Prepared& p, std::vector<RepOutcome> reps) {
    MonteCarloReport rep;
    rep.config = p.cfg;
    rep.card = p.card;
    rep.cpsi = p.cpsi;
    rep.reps = std::move(reps);

    if (p.cfg.model.q == 1) {
        KMatrix K = kmatrix_analytic_q1(p.spec, p.cfg.model.hurst, p.cfg.index.d);
        rep.sigma2 = asymptotic_sigma2(K, p.cfg.index.d);
        rep.sigma2_provenance = "analytic-q1";
    }

    std::vector<double> hh;
    std::vector<std::vector<double>> vh(std::size_t(p.cfg.index.d));
    for (const RepOutcome& r : rep.reps) {
        if (!r.ok) {
            ++rep.failed;
            continue;
        }
        hh.push_back(r.hhat);
        for (int M = 0; M < p.cfg.index.d; ++M)
            vh[std::size_t(M)].push_back(r.vhat[std::size_t(M)]);
    }
    if (!hh.empty()) {
        double m = 0;
        for (double v : hh) m += v;
        m /= double(hh.size());
        double s2 = 0, mse = 0;
        for (double v : hh) {
            s2 += (v - m) * (v - m);
            mse += (v - p.cfg.model.hurst) * (v - p.cfg.model.hurst);
        }
        rep.mean_hhat = m;
        rep.sd_hhat = hh.size() > 1 ? std::sqrt(s2 / double(hh.size() - 1)) : 0.0;
        rep.bias = m - p.cfg.model.hurst;
        rep.rmse = std::sqrt(mse / double(hh.size()));

        if (rep.sigma2 > 0) {
            double scale = std::sqrt(double(p.card) / rep.sigma2);
            for (double v : hh) rep.std_errors.push_back(scale * (v - p.cfg.model.hurst));
            rep.ks_std_normal = ks_normality(rep.std_errors, 0.0, 1.0);
            rep.coverage95 = coverage(hh, p.cfg.model.hurst, rep.sigma2, double(p.card), 0.95);
            double kdiag = 2.0;  // Gaussian-case variance of the normalized variation
            for (int M = 0; M < p.cfg.index.d; ++M)
                rep.ks_vhat.push_back(ks_normality(vh[std::size_t(M)], 0.0, kdiag));
        }
    }
    return rep;
}

MonteCarloReport run_impl(const ExperimentConfig& config, bool parallel) {
    Prepared p = prepare(config);
#ifdef _OPENMP
    if (config.threads > 0) omp_set_num_threads(config.threads);
#endif
    std::vector<RepOutcome> reps(std::size_t(config.replications));
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int r = 0; r < config.replications; ++r)
            reps[std::size_t(r)] = replicate(p, std::uint32_t(r));
    } else {
        for (int r = 0; r < config.replications; ++r)
            reps[std::size_t(r)] = replicate(p, std::uint32_t(r));
    }
    return finalize(p, std::move(reps));
}

}  // namespace

MonteCarloReport run_experiment(const ExperimentConfig& config) {
    return run_impl(config, true);
}

MonteCarloReport run_experiment_serial(const ExperimentConfig& config) {
    return run_impl(config, false);
}

RepOutcome run_replication(const ExperimentConfig& config, std::uint32_t rep_id) {
    Prepared p = prepare(config);
    return replicate(p, rep_id);
}

double ks_normality(std::vector<double> samples, double mean, double variance) {
    if (samples.empty()) throw validation_error("ks: empty sample");
    if (!(variance > 0)) throw validation_error("ks: variance must be positive");
    std::sort(samples.begin(), samples.end());
    const double sd = std::sqrt(variance);
    const double n = double(samples.size());
    double d = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double f = normal_cdf((samples[i] - mean) / sd);
        d = std::max(d, std::max(double(i + 1) / n - f, f - double(i) / n));
    }
    return d;
}

double coverage(const std::vector<double>& hhat_samples, double true_H, double sigma2,
                double card, double level) {
    if (hhat_samples.empty()) throw validation_error("coverage: empty sample");
    if (!(sigma2 > 0) || !(card > 0))
        throw validation_error("coverage: sigma2 and card must be positive");
    if (!(level > 0 && level < 1)) throw validation_error("coverage: level must lie in (0,1)");
    double z = normal_quantile(0.5 + level / 2.0);
    double half_width = z * std::sqrt(sigma2 / card);
    std::size_t hits = 0;
    for (double h : hhat_samples)
        if (std::fabs(h - true_H) <= half_width) ++hits;
    return double(hits) / double(hhat_samples.size());
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
    if (!(p > 0 && p < 1)) throw validation_error("quantile: p must lie in (0, 1)");
    // Rational initial guess (Acklam), then two Newton corrections.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00, 2.938163982698783e+00};
    static const double dd[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425, phigh = 1 - plow;
    double x;
    if (p < plow) {
        double q = std::sqrt(-2 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1);
    } else if (p <= phigh) {
        double q = p - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
    } else {
        double q = std::sqrt(-2 * std::log(1 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1);
    }
    for (int it = 0; it < 2; ++it) {
        double e = normal_cdf(x) - p;
        double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
        x -= e / pdf;
    }
    return x;
}

std::string report_to_json(const MonteCarloReport& report) {
    nlohmann::ordered_json j;
    j["tool"] = kToolName;
    j["version"] = kToolVersion;
    nlohmann::ordered_json cfg;
    cfg["q"] = report.config.model.q;
    cfg["hurst"] = report.config.model.hurst;
    cfg["N"] = report.config.index.N;
    cfg["beta"] = report.config.index.beta;
    cfg["gamma"] = report.config.index.gamma;
    cfg["d"] = report.config.index.d;
    cfg["wavelet"] = report.config.wavelet;
    cfg["backend"] = backend_name(report.config.effective_backend());
    cfg["replications"] = report.config.replications;
    cfg["seed"] = report.config.base_seed;
    cfg["R"] = report.config.effective_R();
    cfg["inner_factor"] = report.config.inner_factor;
    j["config"] = cfg;
    j["card"] = report.card;
    j["cpsi"] = report.cpsi;
    if (report.sigma2 > 0) {
        j["sigma2"] = report.sigma2;
        j["sigma2_provenance"] = report.sigma2_provenance;
    }
    j["mean_hhat"] = report.mean_hhat;
    j["sd_hhat"] = report.sd_hhat;
    j["bias"] = report.bias;
    j["rmse"] = report.rmse;
    if (report.ks_std_normal >= 0) j["ks_std_normal"] = report.ks_std_normal;
    if (!report.ks_vhat.empty()) j["ks_vhat"] = report.ks_vhat;
    if (report.coverage95 >= 0) j["coverage95"] = report.coverage95;
    j["failed"] = report.failed;
    return j.dump(2) + "\n";
}

void write_samples_csv(const MonteCarloReport& report, const std::string& file) {
    std::ostringstream os;
    os << "rep_id,hhat";
    int d = report.config.index.d;
    for (int M = 1; M <= d; ++M) os << ",vhat_M" << M;
    os << "\n";
    char buf[64];
    for (std::size_t r = 0; r < report.reps.size(); ++r) {
        const RepOutcome& rep = report.reps[r];
        if (!rep.ok) continue;
        os << r;
        std::snprintf(buf, sizeof buf, ",%.17g", rep.hhat);
        os << buf;
        for (int M = 0; M < d; ++M) {
            std::snprintf(buf, sizeof buf, ",%.17g", rep.vhat[std::size_t(M)]);
            os << buf;
        }
        os << "\n";
    }
    write_text_file(file, os.str());
}

}  // namespace hermest
