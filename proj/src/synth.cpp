#include "stackreg/synth.hpp"

#include <cmath>
#include <string>

#include "stackreg/rng.hpp"

namespace stackreg {

void SynthConfig::validate() const {
    if (n_samples < 2) throw Error(ErrorKind::Config, "synth: n_samples must be >= 2");
    if (n_clusters < 1) throw Error(ErrorKind::Config, "synth: n_clusters must be >= 1");
    if (models_per_cluster < 1) {
        throw Error(ErrorKind::Config, "synth: models_per_cluster must be >= 1");
    }
    if (!(noise >= 0.0) || !std::isfinite(noise)) {
        throw Error(ErrorKind::Config, "synth: noise must be finite and >= 0");
    }
    if (!(rho_within > 0.0 && rho_within <= 1.0)) {
        throw Error(ErrorKind::Config, "synth: rho_within must lie in (0, 1]");
    }
    if (!(target_sd > 0.0) || !std::isfinite(target_sd) || !std::isfinite(target_mean)) {
        throw Error(ErrorKind::Config, "synth: target_sd must be finite and > 0");
    }
    if (!(cluster_noise_spread >= 0.0) || !(heteroscedasticity >= 0.0)) {
        throw Error(ErrorKind::Config, "synth: spread and heteroscedasticity must be >= 0");
    }
    if (!(tail_shrinkage >= 0.0 && tail_shrinkage < 1.0)) {
        throw Error(ErrorKind::Config, "synth: tail_shrinkage must lie in [0, 1)");
    }
}

SynthConfig SynthConfig::benchmark(std::uint64_t seed) {
    SynthConfig c;
    c.n_samples = 5000;
    c.n_clusters = 4;
    c.models_per_cluster = 5;
    c.noise = 0.3;
    c.rho_within = 0.9999;
    c.seed = seed;
    c.cluster_noise_spread = 1.0;
    c.heteroscedasticity = 0.5;
    c.tail_shrinkage = 0.5;
    return c;
}

SynthData synthesize(const SynthConfig& cfg) {
    cfg.validate();
    const std::size_t n = cfg.n_samples;
    const std::size_t C = cfg.n_clusters;
    const std::size_t M = cfg.models_per_cluster;

    SynthData out;
    out.target.resize(n);
    std::vector<double> z(n);
    Rng target_rng(derive_seed(cfg.seed, 0));
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = target_rng.normal();
        out.target[i] = cfg.target_mean + cfg.target_sd * z[i];
    }

    std::vector<double> signal(out.target);
    std::vector<double> scale(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = std::fabs(z[i]);
        if (cfg.tail_shrinkage > 0.0) {
            signal[i] = cfg.target_mean + cfg.target_sd * z[i] * (1.0 - cfg.tail_shrinkage * a / (1.0 + a));
        }
        scale[i] = 1.0 + cfg.heteroscedasticity * a;
    }

    const double private_ratio = std::sqrt((1.0 - cfg.rho_within) / cfg.rho_within);
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;
    names.reserve(C * M);
    columns.reserve(C * M);
    std::vector<double> shared(n);
    for (std::size_t c = 0; c < C; ++c) {
        const double spread = C > 1 ? static_cast<double>(c) / static_cast<double>(C - 1) : 0.0;
        const double shared_sd = cfg.noise * cfg.target_sd * (1.0 + cfg.cluster_noise_spread * spread);
        const double private_sd = shared_sd * private_ratio;
        Rng shared_rng(derive_seed(cfg.seed, 1, c));
        for (std::size_t i = 0; i < n; ++i) shared[i] = shared_sd * scale[i] * shared_rng.normal();
        for (std::size_t m = 0; m < M; ++m) {
            Rng private_rng(derive_seed(cfg.seed, 2, c * M + m));
            std::vector<double> col(n);
            for (std::size_t i = 0; i < n; ++i) {
                col[i] = signal[i] + shared[i] + private_sd * scale[i] * private_rng.normal();
            }
            names.push_back("c" + std::to_string(c) + "_m" + std::to_string(m));
            columns.push_back(std::move(col));
            out.cluster_of.push_back(c);
        }
    }
    out.predictions = PredictionMatrix(std::move(names), columns);
    return out;
}

}  // namespace stackreg
