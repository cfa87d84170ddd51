// hermest command-line tool: simulate / coeffs / estimate / kmatrix / validate
// plus plan, wavelet and replay utilities. Every file-producing run writes
// <out>.manifest.json with the verbatim argv so outputs can be regenerated.

#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hermest/chaos.hpp"
#include "hermest/errors.hpp"
#include "hermest/estimator.hpp"
#include "hermest/harness.hpp"
#include "hermest/hermite_sim.hpp"
#include "hermest/io.hpp"
#include "hermest/variation.hpp"
#include "hermest/wavelet.hpp"

namespace {

using hermest::validation_error;
using json = nlohmann::ordered_json;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void set_threads(int threads) {
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)threads;
#endif
}

double mib(double bytes) { return bytes / (1024.0 * 1024.0); }

// Refuses up front when an estimated allocation would blow the ceiling.
void check_memory(double estimated_bytes, const char* what) {
    const double ceiling = double(hermest::memory_ceiling_bytes());
    if (estimated_bytes > ceiling) {
        char buf[256];
        std::snprintf(buf, sizeof(buf),
                      "%s needs ~%.1f MiB but the memory ceiling is %.1f MiB "
                      "(deficit %.1f MiB); reduce the size or raise HERMEST_MEMORY_LIMIT_MB",
                      what, mib(estimated_bytes), mib(ceiling),
                      mib(estimated_bytes - ceiling));
        throw validation_error(buf);
    }
}

std::size_t pow2_at_least(std::size_t v) {
    std::size_t m = 1;
    while (m < v) m <<= 1;
    return m;
}

double simulate_bytes_estimate(hermest::Backend backend, std::size_t n, int q, int inner,
                               int cells) {
    const double pts = double(n) + 1.0;
    switch (backend) {
        case hermest::Backend::exact_fbm: {
            const double m = double(pow2_at_least(2 * std::max<std::size_t>(n, 1)));
            return 8.0 * (4.0 * m + 2.0 * pts);
        }
        case hermest::Backend::nclt: {
            const double mt = double(n) * double(inner);
            const double m2 = double(pow2_at_least(std::size_t(2.0 * mt) + 2));
            return 8.0 * (4.0 * m2 + mt + 2.0 * pts);
        }
        case hermest::Backend::chaos_grid:
            return 8.0 * (double(cells) * (q == 2 ? 4.0 : 2.0) + 6.0 * pts);
    }
    return 0;
}

void warn_if_clipped(const hermest::FgnGenerator& fgn) {
    if (fgn.clip_warning())
        std::fprintf(stderr,
                     "warning: circulant embedding clipped a negative eigenvalue "
                     "(min %.3e); samples remain usable but are approximate\n",
                     fgn.min_eigenvalue());
}

struct CommonIndexFlags {
    int N = 12;
    double beta = 0.6;
    double gamma = 0.55;
    int d = 3;
    int R = 0;  // 0 = 2^N quadrature nodes

    hermest::IndexParams params() const {
        hermest::IndexParams p;
        p.N = N;
        p.beta = beta;
        p.gamma = gamma;
        p.d = d;
        return p;
    }
    int effective_R() const { return R > 0 ? R : (1 << N); }
};

void add_index_flags(CLI::App* cmd, CommonIndexFlags& f, bool required) {
    auto* n = cmd->add_option("--N", f.N, "dyadic level N");
    cmd->add_option("--beta", f.beta, "position exponent beta in (0,1)");
    cmd->add_option("--gamma", f.gamma, "sparsity exponent gamma in (0,beta)");
    cmd->add_option("--d", f.d, "number of scales M = 1..d");
    cmd->add_option("--R", f.R, "quadrature nodes per coefficient (0 = 2^N)");
    if (required) n->required();
}

json plan_to_json(const hermest::IndexParams& p, int R, const hermest::ResourcePlan& plan,
                  std::size_t card, long long l_full_max) {
    json j;
    j["N"] = p.N;
    j["beta"] = p.beta;
    j["gamma"] = p.gamma;
    j["d"] = p.d;
    j["R"] = R;
    j["nb"] = p.nb();
    j["ng"] = p.ng();
    j["positions_full"] = l_full_max;
    j["positions_sparse"] = card;
    j["n"] = plan.n;
    j["step"] = plan.step;
    j["horizon"] = plan.horizon;
    j["path_bytes"] = plan.path_bytes;
    return j;
}

void emit_json(const json& j, const std::string& out,
               const std::vector<std::string>& argv) {
    const std::string text = j.dump(2) + "\n";
    if (out.empty()) {
        std::fputs(text.c_str(), stdout);
    } else {
        hermest::write_text_file(out, text);
        hermest::write_manifest(out, argv, {out});
        std::printf("wrote %s\n", out.c_str());
    }
}

// ---------------------------------------------------------------------------
// simulate

int cmd_simulate(const std::vector<std::string>& argv, int q, double hurst,
                 const std::string& backend_name, std::uint64_t n_opt, double step_opt,
                 std::uint64_t seed, const std::string& out, int inner, int cells,
                 double t0, const CommonIndexFlags& idx, bool idx_given) {
    const hermest::Backend backend = hermest::parse_backend(backend_name);
    hermest::ModelParams model;
    model.q = q;
    model.hurst = hurst;
    model.validate();
    if (backend == hermest::Backend::exact_fbm && q != 1)
        throw validation_error("backend fbm is exact only for q = 1; use nclt or chaos");

    std::uint64_t n = n_opt;
    double step = step_opt;
    if (idx_given) {
        const hermest::IndexParams p = idx.params();
        p.validate();
        const hermest::ResourcePlan plan =
            hermest::plan_resources(p, idx.effective_R(), p.d);
        std::printf("plan: n=%zu step=%s horizon=%s path_mib=%.3f\n", plan.n,
                    fmt17(plan.step).c_str(), fmt17(plan.horizon).c_str(),
                    mib(double(plan.path_bytes)));
        if (n == 0) {
            n = plan.n;
        } else if (n < plan.n) {
            throw validation_error("requested --n " + std::to_string(n) +
                                   " under-resolves the index plan (needs n >= " +
                                   std::to_string(plan.n) + ")");
        }
        if (step <= 0) {
            step = plan.step;
        } else if (step > plan.step * (1 + 1e-12)) {
            throw validation_error("requested --step " + fmt17(step) +
                                   " is coarser than the plan step " + fmt17(plan.step));
        }
    }
    if (n == 0) throw validation_error("simulate: --n is required (or pass --N for a plan)");
    if (step <= 0) step = 1.0 / double(n);

    check_memory(simulate_bytes_estimate(backend, n, q, inner, cells), "simulate");

    hermest::ProcessPath path;
    switch (backend) {
        case hermest::Backend::exact_fbm: {
            hermest::FbmEngine engine(hurst, n, step);
            path = engine.simulate(seed, 0);
            warn_if_clipped(engine.fgn());
            break;
        }
        case hermest::Backend::nclt: {
            hermest::NcltEngine engine(model, n, step, inner);
            path = engine.simulate(seed, 0);
            warn_if_clipped(engine.fgn());
            break;
        }
        case hermest::Backend::chaos_grid: {
            const double horizon = step * double(n);
            const hermest::ChaosGrid grid =
                hermest::make_chaos_grid(model, horizon, cells, t0);
            std::vector<double> times(n + 1);
            for (std::size_t j = 0; j <= n; ++j) times[j] = step * double(j);
            path.params = model;
            path.step = step;
            path.backend = backend;
            path.seed = seed;
            path.values = hermest::simulate_chaos_grid(model, grid, times, seed);
            break;
        }
    }
    hermest::write_path(path, out);
    hermest::write_manifest(out, argv, {out});
    std::printf("wrote %s: q=%d hurst=%s backend=%s n=%zu step=%s seed=%" PRIu64 "\n",
                out.c_str(), q, fmt17(hurst).c_str(),
                hermest::backend_name(backend).c_str(), std::size_t(n),
                fmt17(step).c_str(), seed);
    return 0;
}

// ---------------------------------------------------------------------------
// coeffs / estimate shared path loading

hermest::CoefficientSet load_and_collect(const std::string& input,
                                         const CommonIndexFlags& idx,
                                         const hermest::WaveletSpec& spec,
                                         hermest::ProcessPath& path_out) {
    path_out = hermest::read_path(input);
    const hermest::IndexParams p = idx.params();
    p.validate();
    const int R = idx.effective_R();
    const hermest::ResourcePlan plan = hermest::plan_resources(p, R, p.d);
    if (path_out.step > plan.step * (1 + 1e-9))
        throw validation_error("path grid too coarse: step " + fmt17(path_out.step) +
                               " exceeds the required " + fmt17(plan.step) +
                               " for N=" + std::to_string(p.N) + ", R=" + std::to_string(R));
    if (path_out.horizon() < plan.horizon - 1e-12)
        throw validation_error("path too short: horizon " + fmt17(path_out.horizon()) +
                               " < required " + fmt17(plan.horizon));
    return hermest::collect_coefficients(path_out, spec, p, R);
}

int cmd_coeffs(const std::vector<std::string>& argv, const std::string& input,
               const CommonIndexFlags& idx, const std::string& wavelet, int wavelet_res,
               const std::string& out, const std::string& shat_out) {
    const hermest::WaveletSpec spec = hermest::make_wavelet(wavelet, wavelet_res);
    hermest::ProcessPath path;
    const hermest::CoefficientSet coeffs = load_and_collect(input, idx, spec, path);

    std::ostringstream csv;
    csv << "M,ell,e_point,E_value\n";
    for (int M = 1; M <= coeffs.params.d; ++M)
        for (std::size_t i = 0; i < coeffs.ells.size(); ++i)
            csv << M << ',' << coeffs.ells[i] << ','
                << fmt17(hermest::grid_point(coeffs.ells[i], coeffs.params)) << ','
                << fmt17(coeffs.e[std::size_t(M) - 1][i]) << '\n';
    hermest::write_text_file(out, csv.str());

    std::vector<std::string> outputs{out};
    if (!shat_out.empty()) {
        std::ostringstream tab;
        tab << "M,shat,count\n";
        for (int M = 1; M <= coeffs.params.d; ++M)
            tab << M << ',' << fmt17(hermest::shat(coeffs, M)) << ','
                << coeffs.ells.size() << '\n';
        hermest::write_text_file(shat_out, tab.str());
        outputs.push_back(shat_out);
    }
    hermest::write_manifest(out, argv, outputs);
    std::printf("wrote %s (%d scales x %zu positions)\n", out.c_str(), coeffs.params.d,
                coeffs.ells.size());
    return 0;
}

int cmd_estimate(const std::vector<std::string>& argv, const std::string& input,
                 const CommonIndexFlags& idx, const std::string& wavelet, int wavelet_res,
                 const std::string& out) {
    const hermest::WaveletSpec spec = hermest::make_wavelet(wavelet, wavelet_res);
    hermest::ProcessPath path;
    const hermest::CoefficientSet coeffs = load_and_collect(input, idx, spec, path);

    std::vector<double> shat_values(std::size_t(coeffs.params.d));
    for (int M = 1; M <= coeffs.params.d; ++M)
        shat_values[std::size_t(M) - 1] = hermest::shat(coeffs, M);
    const hermest::EstimationResult res =
        hermest::estimate_hurst(shat_values, coeffs.params.N, coeffs.params.d);

    json j;
    j["hhat"] = res.hhat;
    j["shat"] = res.shat;
    j["N"] = coeffs.params.N;
    j["beta"] = coeffs.params.beta;
    j["gamma"] = coeffs.params.gamma;
    j["d"] = coeffs.params.d;
    j["wavelet"] = spec.name;
    // Plug-in asymptotic variance: available in the Gaussian case when the
    // estimate lands inside the admissible H range.
    if (path.params.q == 1 && res.hhat > 0.505 && res.hhat < 0.995) {
        const hermest::KMatrix K =
            hermest::kmatrix_analytic_q1(spec, res.hhat, coeffs.params.d);
        j["sigma2"] = hermest::asymptotic_sigma2(K, coeffs.params.d);
        j["k_provenance"] = "analytic-q1";
    }
    emit_json(j, out, argv);
    if (!out.empty()) std::printf("hhat = %s\n", fmt17(res.hhat).c_str());
    return 0;
}

// ---------------------------------------------------------------------------
// kmatrix

int cmd_kmatrix(const std::vector<std::string>& argv, int q, double hurst, int d, int reps,
                std::uint64_t seed, const std::string& wavelet, int wavelet_res,
                const std::string& method, int R_quad, int inner, const std::string& out) {
    const hermest::WaveletSpec spec = hermest::make_wavelet(wavelet, wavelet_res);
    hermest::ModelParams model;
    model.q = q;
    model.hurst = hurst;
    model.validate();

    hermest::KMatrix K;
    if (method == "analytic") {
        if (q != 1) throw validation_error("analytic K matrix is available only for q = 1");
        K = hermest::kmatrix_analytic_q1(spec, hurst, d);
    } else if (method == "mc") {
        K = hermest::kmatrix_montecarlo(model, spec, d, reps, seed, R_quad, inner);
    } else {
        throw validation_error("unknown kmatrix method '" + method + "' (mc or analytic)");
    }

    json j;
    j["q"] = q;
    j["hurst"] = hurst;
    j["d"] = d;
    j["wavelet"] = spec.name;
    j["provenance"] =
        K.provenance == hermest::KMatrix::Provenance::analytic_q1 ? "analytic-q1" : "monte-carlo";
    if (method == "mc") {
        j["replications"] = reps;
        j["R"] = R_quad;
    }
    json rows = json::array();
    for (int i = 0; i < d; ++i) {
        json row = json::array();
        for (int c = 0; c < d; ++c) row.push_back(K.at(i, c));
        rows.push_back(row);
    }
    j["k"] = rows;
    if (!K.se.empty()) {
        json serr = json::array();
        for (int i = 0; i < d; ++i) {
            json row = json::array();
            for (int c = 0; c < d; ++c) row.push_back(K.se[std::size_t(i) * d + c]);
            serr.push_back(row);
        }
        j["se"] = serr;
    }
    j["sigma2"] = hermest::asymptotic_sigma2(K, d);
    emit_json(j, out, argv);
    return 0;
}

// ---------------------------------------------------------------------------
// validate

int cmd_validate(const std::vector<std::string>& argv, int q, double hurst,
                 const CommonIndexFlags& idx, int reps, std::uint64_t seed,
                 const std::string& backend_name, const std::string& wavelet,
                 int wavelet_res, int inner, int threads, const std::string& out,
                 const std::string& samples_out) {
    hermest::ExperimentConfig config;
    config.model.q = q;
    config.model.hurst = hurst;
    config.index = idx.params();
    config.wavelet = wavelet;
    config.wavelet_res = wavelet_res;
    if (!backend_name.empty()) config.backend = hermest::parse_backend(backend_name);
    config.replications = reps;
    config.base_seed = seed;
    config.R = idx.R;
    config.inner_factor = inner;
    config.threads = threads;
    config.validate();

    const hermest::MonteCarloReport report = hermest::run_experiment(config);
    const std::string text = hermest::report_to_json(report);

    std::vector<std::string> outputs;
    if (!out.empty()) {
        hermest::write_text_file(out, text);
        outputs.push_back(out);
    }
    if (!samples_out.empty()) {
        hermest::write_samples_csv(report, samples_out);
        outputs.push_back(samples_out);
    }
    if (outputs.empty()) {
        std::fputs(text.c_str(), stdout);
    } else {
        hermest::write_manifest(outputs.front(), argv, outputs);
        for (const std::string& f : outputs) std::printf("wrote %s\n", f.c_str());
        std::printf("mean_hhat = %s (over %d replications, %d failed)\n",
                    fmt17(report.mean_hhat).c_str(),
                    config.replications - report.failed, report.failed);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// plan / wavelet / replay

int cmd_plan(const std::vector<std::string>& argv, const CommonIndexFlags& idx,
             const std::string& out) {
    const hermest::IndexParams p = idx.params();
    p.validate();
    const int R = idx.effective_R();
    const hermest::ResourcePlan plan = hermest::plan_resources(p, R, p.d);
    check_memory(double(plan.path_bytes), "plan");
    const hermest::IndexSets sets = hermest::index_sets(p);
    emit_json(plan_to_json(p, R, plan, sets.l_gamma.size(), sets.l_full_max), out, argv);
    return 0;
}

int cmd_wavelet(const std::vector<std::string>& argv, const std::string& wavelet,
                int wavelet_res, double hurst, int cpsi_res, const std::string& scheme,
                const std::string& out) {
    const hermest::WaveletSpec spec = hermest::make_wavelet(wavelet, wavelet_res);
    const int p_max = std::max(spec.vanishing_moments, 3);
    const hermest::MomentReport report =
        hermest::verify_vanishing_moments(spec, p_max, 1e-6);

    json j;
    j["name"] = spec.name;
    j["vanishing_moments"] = spec.vanishing_moments;
    j["resolution_log2"] = spec.resolution_log2;
    j["tabulated_nodes"] = spec.table.size();
    j["moments"] = report.moments;
    j["moments_pass"] = report.pass;
    if (hurst > 0) {
        const hermest::QuadScheme qs = scheme == "cc" ? hermest::QuadScheme::clenshaw_curtis
                                                      : hermest::QuadScheme::gauss;
        const hermest::WaveletConstant c = hermest::compute_cpsi(spec, hurst, cpsi_res, qs);
        j["hurst"] = hurst;
        j["cpsi"] = c.cpsi;
        j["cpsi_quadrature_error"] = c.quadrature_error;
    }
    if (!out.empty()) {
        std::ostringstream csv;
        hermest::export_table_csv(spec, csv);
        hermest::write_text_file(out, csv.str());
        hermest::write_manifest(out, argv, {out});
        j["table_csv"] = out;
    }
    std::fputs((j.dump(2) + "\n").c_str(), stdout);
    return 0;
}

int run(const std::vector<std::string>& argv);

int cmd_replay(const std::string& manifest) {
    const std::vector<std::string> stored = hermest::read_manifest_argv(manifest);
    if (stored.size() < 2)
        throw validation_error("manifest argv is too short to replay");
    for (const std::string& a : stored)
        if (a == "replay") throw validation_error("refusing to replay a replay manifest");
    std::string joined;
    for (std::size_t i = 1; i < stored.size(); ++i) {
        if (i > 1) joined += ' ';
        joined += stored[i];
    }
    std::fprintf(stderr, "replaying: %s\n", joined.c_str());
    return run(stored);
}

// ---------------------------------------------------------------------------

int run(const std::vector<std::string>& argv) {
    CLI::App app{"Hermite-process simulation and wavelet-variation Hurst estimation"};
    app.set_version_flag("--version", hermest::kToolVersion);
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "sample a process path to a binary file");
    int sim_q = 1;
    double sim_h = 0.7;
    std::string sim_backend = "fbm";
    std::uint64_t sim_n = 0;
    double sim_step = 0;
    std::uint64_t sim_seed = 1;
    std::string sim_out;
    int sim_inner = 64, sim_cells = 2048, sim_threads = 0;
    double sim_t0 = 0;
    CommonIndexFlags sim_idx;
    sim->add_option("--q", sim_q, "Hermite rank");
    sim->add_option("--hurst", sim_h, "Hurst parameter in (0.5,1)")->required();
    sim->add_option("--backend", sim_backend, "fbm | nclt | chaos");
    sim->add_option("--n", sim_n, "grid intervals (path stores n+1 values)");
    sim->add_option("--step", sim_step, "grid spacing (default 1/n, or the plan step)");
    sim->add_option("--seed", sim_seed, "random seed");
    sim->add_option("--out", sim_out, "output path file")->required();
    sim->add_option("--inner-factor", sim_inner, "partial-sum points per grid step (nclt)");
    sim->add_option("--cells", sim_cells, "kernel grid cells (chaos)");
    sim->add_option("--t0", sim_t0, "kernel truncation depth (chaos, 0 = auto)");
    sim->add_option("--threads", sim_threads, "OpenMP thread cap (0 = default)");
    auto* sim_N = sim->add_option("--N", sim_idx.N, "dyadic level: print the resource plan");
    sim->add_option("--beta", sim_idx.beta, "plan position exponent");
    sim->add_option("--gamma", sim_idx.gamma, "plan sparsity exponent");
    sim->add_option("--d", sim_idx.d, "plan scale count");
    sim->add_option("--R", sim_idx.R, "plan quadrature nodes (0 = 2^N)");

    // coeffs
    auto* cof = app.add_subcommand("coeffs", "extract wavelet coefficients from a path file");
    std::string cof_in, cof_out, cof_shat, cof_wavelet = "poly";
    int cof_res = 0, cof_threads = 0;
    CommonIndexFlags cof_idx;
    cof->add_option("--input", cof_in, "binary path file")->required();
    add_index_flags(cof, cof_idx, true);
    cof->add_option("--wavelet", cof_wavelet, "poly | haar | db<order>");
    cof->add_option("--wavelet-res", cof_res, "tabulation resolution log2 (db families)");
    cof->add_option("--out", cof_out, "coefficient CSV (M,ell,e_point,E_value)")->required();
    cof->add_option("--shat-out", cof_shat, "per-scale mean-square CSV (M,shat,count)");
    cof->add_option("--threads", cof_threads, "OpenMP thread cap (0 = default)");

    // estimate
    auto* est = app.add_subcommand("estimate", "estimate the Hurst parameter from a path file");
    std::string est_in, est_out, est_wavelet = "poly";
    int est_res = 0, est_threads = 0;
    CommonIndexFlags est_idx;
    est->add_option("--input", est_in, "binary path file")->required();
    add_index_flags(est, est_idx, true);
    est->add_option("--wavelet", est_wavelet, "poly | haar | db<order>");
    est->add_option("--wavelet-res", est_res, "tabulation resolution log2 (db families)");
    est->add_option("--out", est_out, "result JSON (stdout when omitted)");
    est->add_option("--threads", est_threads, "OpenMP thread cap (0 = default)");

    // kmatrix
    auto* km = app.add_subcommand("kmatrix", "scale covariance matrix (Monte Carlo or analytic)");
    int km_q = 1, km_d = 3, km_reps = 10000, km_R = 1024, km_inner = 64, km_res = 0,
        km_threads = 0;
    double km_h = 0.7;
    std::uint64_t km_seed = 1;
    std::string km_out, km_wavelet = "poly", km_method = "mc";
    km->add_option("--q", km_q, "Hermite rank");
    km->add_option("--hurst", km_h, "Hurst parameter in (0.5,1)")->required();
    km->add_option("--d", km_d, "number of scales");
    km->add_option("--reps", km_reps, "Monte Carlo replications");
    km->add_option("--seed", km_seed, "random seed");
    km->add_option("--wavelet", km_wavelet, "poly | haar | db<order>");
    km->add_option("--wavelet-res", km_res, "tabulation resolution log2");
    km->add_option("--method", km_method, "mc | analytic");
    km->add_option("--R", km_R, "quadrature nodes per coefficient (mc)");
    km->add_option("--inner-factor", km_inner, "partial-sum points per grid step (q >= 2)");
    km->add_option("--out", km_out, "output JSON (stdout when omitted)");
    km->add_option("--threads", km_threads, "OpenMP thread cap (0 = default)");

    // validate
    auto* val = app.add_subcommand("validate", "Monte Carlo study of the estimator");
    int val_q = 1, val_reps = 100, val_inner = 64, val_res = 0, val_threads = 0;
    double val_h = 0.7;
    std::uint64_t val_seed = 1;
    std::string val_backend, val_wavelet = "poly", val_out, val_samples;
    CommonIndexFlags val_idx;
    val->add_option("--q", val_q, "Hermite rank");
    val->add_option("--hurst", val_h, "true Hurst parameter")->required();
    add_index_flags(val, val_idx, true);
    val->add_option("--reps", val_reps, "replications");
    val->add_option("--seed", val_seed, "base seed");
    val->add_option("--backend", val_backend, "fbm | nclt | chaos (default by q)");
    val->add_option("--wavelet", val_wavelet, "poly | haar | db<order>");
    val->add_option("--wavelet-res", val_res, "tabulation resolution log2");
    val->add_option("--inner-factor", val_inner, "partial-sum points per grid step");
    val->add_option("--threads", val_threads, "OpenMP thread cap (0 = default)");
    val->add_option("--out", val_out, "report JSON (stdout when omitted)");
    val->add_option("--emit-samples", val_samples, "per-replication CSV (rep_id,hhat,vhat_M*)");

    // plan
    auto* pln = app.add_subcommand("plan", "resource plan for an index configuration");
    std::string pln_out;
    CommonIndexFlags pln_idx;
    add_index_flags(pln, pln_idx, true);
    pln->add_option("--out", pln_out, "plan JSON (stdout when omitted)");

    // wavelet
    auto* wav = app.add_subcommand("wavelet", "inspect a wavelet; export its tabulation");
    std::string wav_name = "poly", wav_out, wav_scheme = "gauss";
    int wav_res = 0, wav_cpsi_res = 256;
    double wav_h = 0;
    wav->add_option("--wavelet", wav_name, "poly | haar | db<order>");
    wav->add_option("--wavelet-res", wav_res, "tabulation resolution log2");
    wav->add_option("--hurst", wav_h, "also report the variance constant at this H");
    wav->add_option("--cpsi-res", wav_cpsi_res, "quadrature cells per axis");
    wav->add_option("--scheme", wav_scheme, "gauss | cc");
    wav->add_option("--out", wav_out, "tabulation CSV (x,psi)");

    // replay
    auto* rep = app.add_subcommand("replay", "re-run the command stored in a manifest");
    std::string rep_manifest;
    rep->add_option("manifest", rep_manifest, "manifest JSON file")->required();

    try {
        std::vector<const char*> ptrs;
        ptrs.reserve(argv.size());
        for (const std::string& a : argv) ptrs.push_back(a.c_str());
        app.parse(int(ptrs.size()), ptrs.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "error: usage: %s\n", e.what());
        return 2;
    }

    if (sim->parsed()) {
        set_threads(sim_threads);
        return cmd_simulate(argv, sim_q, sim_h, sim_backend, sim_n, sim_step, sim_seed,
                            sim_out, sim_inner, sim_cells, sim_t0, sim_idx,
                            sim_N->count() > 0);
    }
    if (cof->parsed()) {
        set_threads(cof_threads);
        return cmd_coeffs(argv, cof_in, cof_idx, cof_wavelet, cof_res, cof_out, cof_shat);
    }
    if (est->parsed()) {
        set_threads(est_threads);
        return cmd_estimate(argv, est_in, est_idx, est_wavelet, est_res, est_out);
    }
    if (km->parsed()) {
        set_threads(km_threads);
        return cmd_kmatrix(argv, km_q, km_h, km_d, km_reps, km_seed, km_wavelet, km_res,
                           km_method, km_R, km_inner, km_out);
    }
    if (val->parsed())
        return cmd_validate(argv, val_q, val_h, val_idx, val_reps, val_seed, val_backend,
                            val_wavelet, val_res, val_inner, val_threads, val_out,
                            val_samples);
    if (pln->parsed()) return cmd_plan(argv, pln_idx, pln_out);
    if (wav->parsed())
        return cmd_wavelet(argv, wav_name, wav_res, wav_h, wav_cpsi_res, wav_scheme, wav_out);
    if (rep->parsed()) return cmd_replay(rep_manifest);
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    try {
        return run(args);
    } catch (const hermest::validation_error& e) {
        std::fprintf(stderr, "error: validation: %s\n", e.what());
        return 3;
    } catch (const hermest::runtime_failure& e) {
        std::fprintf(stderr, "error: runtime: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: runtime: %s\n", e.what());
        return 1;
    }
}
