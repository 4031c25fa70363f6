#pragma once
// Synthetic clustered prediction pools: a Gaussian target and base-model
// columns built as target + cluster-shared error + model-private error.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "stackreg/core.hpp"

namespace stackreg {

struct SynthConfig {
    std::size_t n_samples = 1000;
    std::size_t n_clusters = 3;
    std::size_t models_per_cluster = 4;
    /// Standard deviation of the cluster-shared error.
    double noise = 0.3;
    /// Correlation between the errors of two models in the same cluster,
    /// in (0, 1]. The private error variance is noise^2 (1 - rho) / rho.
    double rho_within = 0.9;
    std::uint64_t seed = 42;

    double target_mean = 0.0;
    double target_sd = 1.0;
    /// Cluster c's shared sd is noise * (1 + spread * c / (C - 1)).
    double cluster_noise_spread = 0.0;
    /// Error sd on row i is scaled by 1 + heteroscedasticity * |z_i|, z the standardized target.
    double heteroscedasticity = 0.0;
    /// Every model sees target_mean + sd * z (1 - shrink |z| / (1 + |z|)) instead of y.
    double tail_shrinkage = 0.0;

    /// Throws Config for invalid sizes or parameters.
    void validate() const;

    /// The end-to-end benchmark: 5000 rows, 4 clusters of 5 near-duplicate models, unequal
    /// cluster quality, row-dependent error scale and shrunken tails.
    static SynthConfig benchmark(std::uint64_t seed);
};

struct SynthData {
    std::vector<double> target;
    PredictionMatrix predictions;  // columns "c<cluster>_m<model>", cluster-major
    std::vector<std::size_t> cluster_of;
};

SynthData synthesize(const SynthConfig& cfg);

}  // namespace stackreg
