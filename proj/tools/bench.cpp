// Benchmark comparing the OpenMP-parallel kernels against their serial
// reference implementations, verifying that both produce identical bytes.
// `--quick` shrinks the workload for smoke runs.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "hermest/harness.hpp"
#include "hermest/hermite_sim.hpp"
#include "hermest/variation.hpp"
#include "hermest/wavelet.hpp"

namespace {

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch())
        .count();
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return false;
    return a.empty() ||
           std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

bool coeffs_equal(const hermest::CoefficientSet& a, const hermest::CoefficientSet& b) {
    if (a.e.size() != b.e.size()) return false;
    for (std::size_t m = 0; m < a.e.size(); ++m)
        if (!same_bits(a.e[m], b.e[m])) return false;
    return true;
}

void print_row(const char* name, double serial_ms, double parallel_ms, bool match) {
    std::printf("%-28s %10.1f ms %10.1f ms   %5.2fx   %s\n", name, serial_ms,
                parallel_ms, serial_ms / parallel_ms, match ? "identical" : "MISMATCH");
}

int bench_coefficients(bool quick) {
    hermest::IndexParams p;
    p.N = quick ? 10 : 12;
    p.beta = 0.6;
    p.gamma = 0.55;
    p.d = 4;
    const int R = quick ? (1 << 11) : (1 << 13);
    const hermest::WaveletSpec spec = hermest::make_wavelet("poly");
    const hermest::ResourcePlan plan = hermest::plan_resources(p, R, p.d);

    hermest::FbmEngine engine(0.7, plan.n, plan.step);
    const hermest::ProcessPath path = engine.simulate(42, 0);

    const int rounds = quick ? 3 : 8;
    double t0 = now_ms();
    hermest::CoefficientSet serial;
    for (int i = 0; i < rounds; ++i)
        serial = hermest::collect_coefficients_serial(path, spec, p, R);
    const double serial_ms = (now_ms() - t0) / rounds;

    t0 = now_ms();
    hermest::CoefficientSet parallel;
    for (int i = 0; i < rounds; ++i)
        parallel = hermest::collect_coefficients(path, spec, p, R);
    const double parallel_ms = (now_ms() - t0) / rounds;

    const bool match = coeffs_equal(serial, parallel);
    print_row("coefficient extraction", serial_ms, parallel_ms, match);
    return match ? 0 : 1;
}

bool reports_equal(const hermest::MonteCarloReport& a, const hermest::MonteCarloReport& b) {
    if (a.reps.size() != b.reps.size()) return false;
    for (std::size_t i = 0; i < a.reps.size(); ++i) {
        if (a.reps[i].hhat != b.reps[i].hhat) return false;
        if (!same_bits(a.reps[i].shat, b.reps[i].shat)) return false;
        if (!same_bits(a.reps[i].vhat, b.reps[i].vhat)) return false;
    }
    return a.mean_hhat == b.mean_hhat && a.sd_hhat == b.sd_hhat;
}

int bench_experiment(bool quick) {
    hermest::ExperimentConfig config;
    config.model.q = 1;
    config.model.hurst = 0.7;
    config.index.N = quick ? 9 : 11;
    config.index.beta = 0.6;
    config.index.gamma = 0.55;
    config.index.d = 3;
    config.replications = quick ? 12 : 48;
    config.base_seed = 20250801;

    double t0 = now_ms();
    const hermest::MonteCarloReport serial = hermest::run_experiment_serial(config);
    const double serial_ms = now_ms() - t0;

    t0 = now_ms();
    const hermest::MonteCarloReport parallel = hermest::run_experiment(config);
    const double parallel_ms = now_ms() - t0;

    const bool match = reports_equal(serial, parallel);
    print_row("replication loop", serial_ms, parallel_ms, match);
    return match ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    bool quick = false;
    for (int i = 1; i < argc; ++i)
        if (std::string(argv[i]) == "--quick") quick = true;

#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP disabled (serial build)\n");
#endif
    std::printf("%-28s %13s %13s %8s   %s\n", "kernel", "serial", "parallel", "speedup",
                "outputs");

    int rc = 0;
    rc |= bench_coefficients(quick);
    rc |= bench_experiment(quick);
    return rc;
}
