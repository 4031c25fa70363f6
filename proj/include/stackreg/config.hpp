#pragma once
// JSON configuration files mirroring PipelineConfig.

#include <string>

#include "json.hpp"
#include "stackreg/pipeline.hpp"

namespace stackreg {

/// Applies the keys of `doc` on top of `base`. Unknown keys anywhere in the
/// document are rejected with a Config error naming the offending path.
///
/// Recognized keys: folds, seed, n_bins, inner_folds, tau_corr, tau_mse
/// (number or null for the target-relative default), tau_var, meta_learners,
/// baselines, reference_method, alpha, bootstrap_resamples, ci_level,
/// error_bins, regularization_paths, hill_climb {max_steps, patience},
/// solver {tol, max_iter}, grid {ridge_lambdas, lasso_lambdas, alphas} where
/// a lambda axis is a list or {"log10_min", "log10_max", "count"},
/// stages {variance_pruning, dedup, statistics, interactions, blending}.
PipelineConfig config_from_json(const nlohmann::json& doc, PipelineConfig base = {});

PipelineConfig load_config_file(const std::string& path, PipelineConfig base = {});

/// The full effective configuration, in the same schema config_from_json reads.
nlohmann::json config_to_json(const PipelineConfig& cfg);

}  // namespace stackreg
