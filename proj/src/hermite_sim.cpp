#include "hermest/hermite_sim.hpp"

#include <cmath>

#include "hermest/errors.hpp"

namespace hermest {

std::string backend_name(Backend b) {
    switch (b) {
        case Backend::exact_fbm: return "fbm";
        case Backend::nclt: return "nclt";
        default: return "chaos";
    }
}

Backend parse_backend(const std::string& name) {
    if (name == "fbm") return Backend::exact_fbm;
    if (name == "nclt") return Backend::nclt;
    if (name == "chaos") return Backend::chaos_grid;
    throw validation_error("unknown backend '" + name + "' (expected fbm, nclt or chaos)");
}

void ModelParams::validate() const {
    if (q < 1 || q > 8) throw validation_error("model: q must be an integer in [1, 8]");
    if (!(hurst > 0.5 && hurst < 1.0))
        throw validation_error("model: hurst must lie in (0.5, 1)");
    if (!(c_qh >= 0.0) || !std::isfinite(c_qh))
        throw validation_error("model: c_qh must be finite and non-negative");
}

double hermite_he(int q, double x) {
    if (q < 0) throw validation_error("hermite_he: order must be >= 0");
    if (q == 0) return 1.0;
    double prev = 1.0, cur = x;
    for (int k = 1; k < q; ++k) {
        double next = x * cur - double(k) * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

double hermite_poly(int q, double x) {
    double fact = 1.0;
    for (int k = 2; k <= q; ++k) fact *= double(k);
    return hermite_he(q, x) / fact;
}

double nclt_exact_variance(int q, double H0, std::size_t m) {
    if (q < 1) throw validation_error("nclt_exact_variance: q must be >= 1");
    if (m == 0) return 0.0;
    double fact = 1.0;
    for (int k = 2; k <= q; ++k) fact *= double(k);
    // q! * sum_{|k| < m} (m - |k|) r(k)^q, exploiting r(k) = r(-k).
    double total = double(m);  // k = 0 term, r(0) = 1
    for (std::size_t k = 1; k < m; ++k) {
        double rk = fgn_autocovariance(H0, double(k));
        double rq = rk;
        for (int j = 1; j < q; ++j) rq *= rk;
        total += 2.0 * double(m - k) * rq;
    }
    return fact * total;
}

FbmEngine::FbmEngine(double H, std::size_t n, double step)
    : H_(H), step_(step), n_(n), fgn_(H, n) {
    if (!(step > 0)) throw validation_error("simulate: step must be positive");
}

ProcessPath FbmEngine::simulate(std::uint64_t seed, std::uint32_t replication) const {
    RandomStream rs(seed, replication, 0);
    std::vector<double> noise;
    fgn_.sample(rs, noise);
    ProcessPath p;
    p.params.q = 1;
    p.params.hurst = H_;
    p.step = step_;
    p.backend = Backend::exact_fbm;
    p.seed = seed;
    p.values.resize(n_ + 1);
    p.values[0] = 0.0;
    const double scale = std::pow(step_, H_);  // unit-lag fGn to step-lag increments
    double acc = 0;
    for (std::size_t i = 0; i < n_; ++i) {
        acc += noise[i];
        p.values[i + 1] = scale * acc;
    }
    return p;
}

NcltEngine::NcltEngine(const ModelParams& params, std::size_t n, double step, int inner_factor)
    : params_(params),
      n_(n),
      step_(step),
      inner_(inner_factor),
      m_total_(n * std::size_t(inner_factor)),
      H0_(1.0 + (params.hurst - 1.0) / double(params.q)),
      norm_(0),
      fgn_(H0_, n * std::size_t(inner_factor)) {
    params_.validate();
    if (!(step > 0)) throw validation_error("simulate: step must be positive");
    if (n == 0) throw validation_error("simulate: n must be positive");
    if (inner_factor < 1) throw validation_error("simulate: inner factor must be >= 1");
    double var = nclt_exact_variance(params_.q, H0_, m_total_);
    if (!(var > 0)) throw runtime_failure("nclt: degenerate partial-sum variance");
    norm_ = 1.0 / std::sqrt(var);
}

ProcessPath NcltEngine::simulate(std::uint64_t seed, std::uint32_t replication) const {
    RandomStream rs(seed, replication, 0);
    std::vector<double> noise;
    fgn_.sample(rs, noise);
    ProcessPath p;
    p.params = params_;
    p.step = step_;
    p.backend = Backend::nclt;
    p.seed = seed;
    p.values.resize(n_ + 1);
    p.values[0] = 0.0;
    // Z(j step) = T^H * S_{j*inner} / sqrt(Var S_{m}), the self-similar rescaling
    // of the Hermite partial-sum limit from [0,1] to [0, T].
    const double horizon_scale = std::pow(double(n_) * step_, params_.hurst) * norm_;
    const int q = params_.q;
    double s = 0;
    std::size_t idx = 0;
    for (std::size_t j = 1; j <= n_; ++j) {
        for (int i = 0; i < inner_; ++i) s += hermite_he(q, noise[idx++]);
        p.values[j] = horizon_scale * s;
    }
    return p;
}

ProcessPath simulate_fbm_exact(double H, std::size_t n, double step, std::uint64_t seed) {
    return FbmEngine(H, n, step).simulate(seed, 0);
}

ProcessPath simulate_hermite_nclt(const ModelParams& params, std::size_t n, double step,
                                  int inner_factor, std::uint64_t seed) {
    return NcltEngine(params, n, step, inner_factor).simulate(seed, 0);
}

}  // namespace hermest
