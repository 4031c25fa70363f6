#include "stackreg/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "stackreg/config.hpp"
#include "stackreg/csv.hpp"

namespace stackreg {

using nlohmann::json;

namespace {

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json metrics_json(const MetricReport& m) {
    return {{"rmse", m.rmse}, {"mae", m.mae}, {"r_squared", m.r_squared}, {"pearson", m.pearson}};
}

json penalty_json(const PenaltySpec& p) {
    json j{{"kind", std::string(to_string(p.kind))}, {"lambda", p.lambda}};
    if (p.kind == PenaltyKind::ElasticNet) j["alpha"] = p.alpha;
    return j;
}

double reduction_percent(double before, double after) {
    if (!std::isfinite(before) || before == 0.0) return 0.0;
    return 100.0 * (before - after) / before;
}

std::string fixed(double v, int prec) {
    if (!std::isfinite(v)) return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    return buf;
}

std::string pad(const std::string& s, std::size_t w, bool left = true) {
    if (s.size() >= w) return s;
    return left ? s + std::string(w - s.size(), ' ') : std::string(w - s.size(), ' ') + s;
}

std::string p_text(double p) {
    char buf[32];
    if (p < 1e-4) std::snprintf(buf, sizeof buf, "%.2e", p);
    else std::snprintf(buf, sizeof buf, "%.4f", p);
    return buf;
}

}  // namespace

json selection_to_json(const SelectionResult& sel, const std::vector<std::string>& variance_pruned) {
    json removals = json::array();
    for (const auto& r : sel.removals) {
        removals.push_back({{"removed", r.removed},
                            {"kept", r.kept},
                            {"rho", r.rho},
                            {"mse_between", r.mse_between},
                            {"delta_rmse", r.delta_rmse}});
    }
    return {{"variance_pruned", variance_pruned},
            {"retained", sel.retained_names},
            {"k_eff", sel.k_eff},
            {"tau_mse_used", number_or_null(sel.tau_mse_used)},
            {"removals", removals},
            {"conditioning",
             {{"kappa_before", number_or_null(sel.kappa_before)},
              {"kappa_after", number_or_null(sel.kappa_after)},
              {"kappa_reduction_percent", reduction_percent(sel.kappa_before, sel.kappa_after)},
              {"eff_rank_before", sel.eff_rank_before},
              {"eff_rank_after", sel.eff_rank_after}}}};
}

json report_to_json(const RunReport& rep) {
    json j;
    j["schema_version"] = kReportSchemaVersion;
    j["config"] = config_to_json(rep.config);
    j["data"] = {{"n_samples", rep.n_samples}, {"n_models", rep.n_models}};

    std::vector<std::size_t> sizes;
    for (int l = 0; l < rep.folds.n_folds(); ++l) sizes.push_back(rep.folds.members(l).size());
    j["folds"] = {{"n_folds", rep.folds.n_folds()}, {"sizes", sizes}};

    j["selection"] = selection_to_json(rep.selection, rep.variance_pruned);
    j["design_columns"] = rep.design_columns;

    json methods = json::array();
    for (const auto& m : rep.methods) {
        json e{{"name", m.name},
               {"family", m.family},
               {"detail", m.detail},
               {"n_models", m.n_models},
               {"metrics", metrics_json(m.metrics)},
               {"ci",
                {{"lo", m.ci.lo},
                 {"hi", m.ci.hi},
                 {"level", m.ci.level},
                 {"n_resamples", m.ci.n_resamples}}},
               {"per_fold_rmse", m.per_fold_rmse},
               {"fold_mean", m.consistency.mean},
               {"fold_std", m.consistency.std},
               {"cv_percent", m.consistency.cv_percent}};
        if (m.sparsity) e["sparsity"] = *m.sparsity;
        if (m.comparison) {
            const auto& c = *m.comparison;
            e["comparison"] = {{"reference", c.method_b},
                               {"t_stat", number_or_null(c.t_stat)},
                               {"p_value", c.p_value},
                               {"bonferroni_alpha", c.bonferroni_alpha},
                               {"significant", c.significant},
                               {"exact_difference", c.exact_difference},
                               {"stars", significance_stars(c.p_value)}};
        }
        methods.push_back(std::move(e));
    }
    j["methods"] = methods;

    json metas = json::array();
    for (const auto& m : rep.meta) {
        json fold_pen = json::array();
        for (const auto& p : m.fit.fold_penalty) fold_pen.push_back(penalty_json(p));
        json rows = json::array();
        for (const auto& r : m.weights.rows) {
            rows.push_back({{"feature", r.feature}, {"type", r.type}, {"mean_weight", r.mean_weight}});
        }
        metas.push_back(
            {{"name", m.name},
             {"penalty", penalty_json(m.fit.penalty)},
             {"fold_penalties", fold_pen},
             {"intercept", m.fit.intercept},
             {"fit_calls", m.fit.fit_calls},
             {"nonconverged_fits", m.fit.nonconverged_fits},
             {"sparsity", m.fit.sparsity},
             {"weights",
              {{"gini", m.weights.gini},
               {"mean_abs_base", m.weights.mean_abs_base},
               {"mean_abs_statistical", m.weights.mean_abs_statistical},
               {"mean_abs_interaction", m.weights.mean_abs_interaction},
               {"weight_rmse_corr",
                m.weights.weight_rmse_corr ? json(*m.weights.weight_rmse_corr) : json(nullptr)},
               {"features", rows}}}});
    }
    j["meta_learners"] = metas;
    j["gini_definition"] = "sum_ij |x_i - x_j| / (2 n^2 mean(x)), x = |standardized weights|";

    if (rep.blend) {
        j["blend"] = {{"members", rep.blend->member_names},
                      {"risks", rep.blend->risks},
                      {"weights", rep.blend->weights},
                      {"perfect_member", rep.blend->perfect_member ? json(*rep.blend->perfect_member)
                                                                   : json(nullptr)}};
    } else {
        j["blend"] = nullptr;
    }
    j["final_method"] = rep.final_method;
    j["final_metrics"] = metrics_json(rep.final_result().metrics);
    j["total_fit_calls"] = rep.total_fit_calls;
    return j;
}

std::string report_to_text(const RunReport& rep) {
    std::ostringstream o;
    o << "Stacking report: " << rep.n_samples << " samples, " << rep.n_models << " models, "
      << rep.config.folds << " folds, seed " << rep.config.seed << "\n\n";

    const auto& s = rep.selection;
    o << "Selection: " << rep.variance_pruned.size() << " pruned by variance, "
      << s.removals.size() << " removed as redundant, K_eff = " << s.k_eff << "\n";
    o << "Conditioning: kappa " << fixed(s.kappa_before, 2) << " -> " << fixed(s.kappa_after, 2)
      << " (" << fixed(reduction_percent(s.kappa_before, s.kappa_after), 1)
      << "% reduction), effective rank " << fixed(s.eff_rank_before, 3) << " -> "
      << fixed(s.eff_rank_after, 3) << "\n\n";

    const std::vector<std::string> head{"method", "rmse", "ci_lo", "ci_hi", "mae", "r2",
                                        "pearson", "cv%", "p", "", "detail"};
    std::vector<std::vector<std::string>> rows;
    for (const auto& m : rep.methods) {
        std::string p = "-", stars;
        if (m.comparison) {
            p = p_text(m.comparison->p_value);
            stars = significance_stars(m.comparison->p_value);
        } else if (m.name == rep.config.reference_method) {
            p = "ref";
        }
        rows.push_back({m.name, fixed(m.metrics.rmse, 5), fixed(m.ci.lo, 5), fixed(m.ci.hi, 5),
                        fixed(m.metrics.mae, 5), fixed(m.metrics.r_squared, 4),
                        fixed(m.metrics.pearson, 4), fixed(m.consistency.cv_percent, 2), p, stars,
                        m.detail});
    }
    std::vector<std::size_t> w(head.size());
    for (std::size_t c = 0; c < head.size(); ++c) {
        w[c] = head[c].size();
        for (const auto& r : rows) w[c] = std::max(w[c], r[c].size());
    }
    auto emit = [&](const std::vector<std::string>& r) {
        std::string line;
        for (std::size_t c = 0; c < r.size(); ++c) {
            const bool left = c == 0 || c + 1 == r.size() || c == 9;
            line += pad(r[c], w[c], left);
            if (c + 1 < r.size()) line += "  ";
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        o << line << "\n";
    };
    emit(head);
    for (const auto& r : rows) emit(r);
    if (!rep.methods.empty() && rep.methods.front().comparison) {
        o << "\np: paired two-tailed t-test on per-fold RMSE vs " << rep.config.reference_method
          << ", Bonferroni threshold " << p_text(rep.methods.front().comparison->bonferroni_alpha)
          << "\n";
    }

    if (rep.blend) {
        o << "\nBlend weights:";
        for (std::size_t m = 0; m < rep.blend->member_names.size(); ++m) {
            o << " " << rep.blend->member_names[m] << "=" << fixed(rep.blend->weights[m], 4);
        }
        o << "\n";
    }
    for (const auto& m : rep.meta) {
        o << "\n" << m.name << " (gini " << fixed(m.weights.gini, 3) << "), top features:\n";
        const std::size_t top = std::min<std::size_t>(10, m.weights.rows.size());
        for (std::size_t i = 0; i < top; ++i) {
            const auto& r = m.weights.rows[i];
            o << "  " << pad(r.feature, 24) << pad(r.type, 12) << fixed(r.mean_weight, 5) << "\n";
        }
    }
    o << "\nFinal method: " << rep.final_method << ", OOF RMSE "
      << fixed(rep.final_result().metrics.rmse, 6) << "\n";
    return o.str();
}

std::string selection_log_csv(const SelectionResult& sel) {
    std::ostringstream o;
    o << "removed,kept,rho,mse_between,delta_rmse\n";
    for (const auto& r : sel.removals) {
        o << csv_field(r.removed) << ',' << csv_field(r.kept) << ',' << format_double(r.rho) << ','
          << format_double(r.mse_between) << ',' << format_double(r.delta_rmse) << '\n';
    }
    return o.str();
}

std::string fold_traces_csv(const RunReport& rep) {
    std::ostringstream o;
    o << "method,fold,rmse,lambda,alpha\n";
    for (const auto& m : rep.methods) {
        const MetaLearnerResult* meta = nullptr;
        for (const auto& x : rep.meta) {
            if (x.name == m.name) meta = &x;
        }
        for (std::size_t l = 0; l < m.per_fold_rmse.size(); ++l) {
            o << csv_field(m.name) << ',' << l << ',' << format_double(m.per_fold_rmse[l]) << ',';
            if (meta) {
                const auto& p = meta->fit.fold_penalty[l];
                o << format_double(p.lambda) << ',';
                if (p.kind == PenaltyKind::ElasticNet) o << format_double(p.alpha);
            } else {
                o << ',';
            }
            o << '\n';
        }
    }
    return o.str();
}

std::string blend_weights_csv(const RunReport& rep) {
    std::ostringstream o;
    o << "member,risk,weight\n";
    if (rep.blend) {
        for (std::size_t m = 0; m < rep.blend->member_names.size(); ++m) {
            o << csv_field(rep.blend->member_names[m]) << ',' << format_double(rep.blend->risks[m])
              << ',' << format_double(rep.blend->weights[m]) << '\n';
        }
    }
    return o.str();
}

std::string regularization_path_csv(const RunReport& rep) {
    std::ostringstream o;
    o << "method,lambda,alpha,mean_rmse,std_rmse,nonzero_fraction\n";
    for (const auto& m : rep.meta) {
        for (const auto& p : m.path) {
            o << csv_field(m.name) << ',' << format_double(p.penalty.lambda) << ',';
            if (p.penalty.kind == PenaltyKind::ElasticNet) o << format_double(p.penalty.alpha);
            o << ',' << format_double(p.mean_rmse) << ',' << format_double(p.std_rmse) << ','
              << format_double(p.nonzero_fraction) << '\n';
        }
    }
    return o.str();
}

std::string error_bins_csv(const std::vector<ErrorBin>& bins) {
    std::ostringstream o;
    o << "bin,target_lo,target_hi,count,mean_target,mean_prediction,mean_error,rmse\n";
    for (const auto& b : bins) {
        o << b.bin << ',' << format_double(b.target_lo) << ',' << format_double(b.target_hi) << ','
          << b.count << ',' << format_double(b.mean_target) << ',' << format_double(b.mean_prediction)
          << ',' << format_double(b.mean_error) << ',' << format_double(b.rmse) << '\n';
    }
    return o.str();
}

json timings_to_json(const RunReport& rep) {
    json stages = json::array();
    double total = 0.0;
    for (const auto& [name, secs] : rep.timings) {
        stages.push_back({{"stage", name}, {"seconds", secs}});
        total += secs;
    }
    return {{"stages", stages}, {"total_seconds", total}, {"fit_calls", rep.total_fit_calls}};
}

json ablation_to_json(const std::vector<AblationRow>& rows, const PipelineConfig& cfg) {
    json arr = json::array();
    for (const auto& r : rows) {
        arr.push_back({{"configuration", r.configuration},
                       {"metrics", metrics_json(r.metrics)},
                       {"delta_rmse", r.delta_rmse},
                       {"n_models", r.n_models},
                       {"n_features", r.n_features}});
    }
    return {{"schema_version", kReportSchemaVersion}, {"config", config_to_json(cfg)}, {"rows", arr}};
}

std::string ablation_to_text(const std::vector<AblationRow>& rows) {
    std::ostringstream o;
    o << pad("configuration", 22) << pad("rmse", 10, false) << pad("delta", 11, false)
      << pad("models", 8, false) << pad("features", 10, false) << "\n";
    for (const auto& r : rows) {
        o << pad(r.configuration, 22) << pad(fixed(r.metrics.rmse, 5), 10, false)
          << pad((r.delta_rmse > 0 ? "+" : "") + fixed(r.delta_rmse, 5), 11, false)
          << pad(std::to_string(r.n_models), 8, false) << pad(std::to_string(r.n_features), 10, false)
          << "\n";
    }
    return o.str();
}

std::string ablation_csv(const std::vector<AblationRow>& rows) {
    std::ostringstream o;
    o << "configuration,rmse,mae,r_squared,pearson,delta_rmse,n_models,n_features\n";
    for (const auto& r : rows) {
        o << csv_field(r.configuration) << ',' << format_double(r.metrics.rmse) << ','
          << format_double(r.metrics.mae) << ',' << format_double(r.metrics.r_squared) << ','
          << format_double(r.metrics.pearson) << ',' << format_double(r.delta_rmse) << ','
          << r.n_models << ',' << r.n_features << '\n';
    }
    return o.str();
}

}  // namespace stackreg
