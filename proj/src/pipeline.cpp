#include "stackreg/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>

#include "stackreg/rng.hpp"

namespace stackreg {

// ---------------------------------------------------------------------------
// configuration

const std::vector<std::string>& BaselineSet::all_names() {
    static const std::vector<std::string> names{"uniform_average", "weighted_average",
                                                "best_single", "hill_climbing", "ridge_stack"};
    return names;
}

BaselineSet BaselineSet::from_names(const std::vector<std::string>& names) {
    BaselineSet b{false, false, false, false, false};
    for (const auto& n : names) {
        if (n == "uniform_average") b.uniform_average = true;
        else if (n == "weighted_average") b.weighted_average = true;
        else if (n == "best_single") b.best_single = true;
        else if (n == "hill_climbing") b.hill_climbing = true;
        else if (n == "ridge_stack") b.ridge_stack = true;
        else throw Error(ErrorKind::Config, "unknown baseline '" + n + "'");
    }
    return b;
}

std::vector<std::string> BaselineSet::enabled_names() const {
    const bool on[] = {uniform_average, weighted_average, best_single, hill_climbing, ridge_stack};
    std::vector<std::string> out;
    for (std::size_t i = 0; i < all_names().size(); ++i) {
        if (on[i]) out.push_back(all_names()[i]);
    }
    return out;
}

bool BaselineSet::any() const {
    return uniform_average || weighted_average || best_single || hill_climbing || ridge_stack;
}

void PipelineConfig::validate() const {
    auto fail = [](const std::string& m) { throw Error(ErrorKind::Config, m); };
    if (folds < 2) fail("folds must be >= 2");
    if (inner_folds < 2) fail("inner_folds must be >= 2");
    if (n_bins < 0) fail("n_bins must be >= 0");
    redundancy.validate();
    if (meta_learners.empty()) fail("at least one meta-learner is required");
    std::set<PenaltyKind> seen(meta_learners.begin(), meta_learners.end());
    if (seen.size() != meta_learners.size()) fail("meta-learners listed twice");
    for (auto k : meta_learners) {
        if (grid.candidates(k).empty()) fail(std::string("empty grid for ") + std::string(to_string(k)));
    }
    if (baselines.ridge_stack && grid.ridge_lambdas.empty()) fail("empty ridge grid");
    for (const auto& v : {grid.ridge_lambdas, grid.lasso_lambdas}) {
        for (double l : v) {
            if (!(l >= 0.0) || !std::isfinite(l)) fail("grid lambdas must be finite and >= 0");
        }
    }
    for (double a : grid.alphas) {
        if (!(a >= 0.0 && a <= 1.0)) fail("grid alphas must lie in [0, 1]");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) fail("alpha must lie in (0, 1)");
    if (bootstrap_resamples < 100) fail("bootstrap_resamples must be >= 100");
    if (!(ci_level > 0.0 && ci_level < 1.0)) fail("ci_level must lie in (0, 1)");
    if (error_bins < 1) fail("error_bins must be >= 1");
    if (!(cd.tol > 0.0)) fail("cd tol must be > 0");
    if (cd.max_iter < 1) fail("cd max_iter must be >= 1");
    if (hill_climb.max_steps < 1) fail("hill_climb max_steps must be >= 1");
}

const MethodResult& RunReport::method(const std::string& name) const {
    for (const auto& m : methods) {
        if (m.name == name) return m;
    }
    throw Error(ErrorKind::Config, "no method named '" + name + "' in report");
}

// ---------------------------------------------------------------------------
// diagnostics

double gini_coefficient(std::span<const double> values) {
    if (values.empty()) return 0.0;
    const double n = static_cast<double>(values.size());
    double total = 0.0;
    for (double v : values) total += std::fabs(v);
    if (total == 0.0) return 0.0;
    // sum_ij |x_i - x_j| via the sorted form 2 * sum_i (2i - n + 1) x_(i).
    std::vector<double> x(values.size());
    std::transform(values.begin(), values.end(), x.begin(), [](double v) { return std::fabs(v); });
    std::sort(x.begin(), x.end());
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        s += (2.0 * static_cast<double>(i) - n + 1.0) * x[i];
    }
    const double mean_abs_diff_sum = 2.0 * s;
    return mean_abs_diff_sum / (2.0 * n * n * (total / n));
}

WeightReport weight_report(const FitResult& fit, const MetaDesign& design,
                           std::span<const double> base_rmse) {
    const std::size_t d = design.column_names.size();
    require_same_length(fit.weights.size(), d, "fit weights vs design columns");
    require_same_length(base_rmse.size(), design.n_base, "base rmse vs base columns");

    WeightReport r;
    double sum_b = 0.0, sum_s = 0.0, sum_i = 0.0;
    std::size_t nb = 0, ns = 0, ni = 0;
    for (std::size_t j = 0; j < d; ++j) {
        WeightRow row{design.column_names[j], "base", fit.weights[j]};
        const double a = std::fabs(row.mean_weight);
        if (j < design.n_base) {
            sum_b += a;
            ++nb;
        } else if (row.feature == kMetaFeatureNames[4] || row.feature == kMetaFeatureNames[5]) {
            row.type = "interaction";
            sum_i += a;
            ++ni;
        } else {
            row.type = "statistical";
            sum_s += a;
            ++ns;
        }
        r.rows.push_back(std::move(row));
    }
    std::stable_sort(r.rows.begin(), r.rows.end(), [](const WeightRow& a, const WeightRow& b) {
        const double x = std::fabs(a.mean_weight), y = std::fabs(b.mean_weight);
        if (x != y) return x > y;
        return a.feature < b.feature;
    });
    r.mean_abs_base = nb ? sum_b / static_cast<double>(nb) : 0.0;
    r.mean_abs_statistical = ns ? sum_s / static_cast<double>(ns) : 0.0;
    r.mean_abs_interaction = ni ? sum_i / static_cast<double>(ni) : 0.0;
    r.gini = gini_coefficient(fit.weights);

    if (design.n_base >= 2) {
        std::vector<double> mags(design.n_base);
        for (std::size_t j = 0; j < design.n_base; ++j) mags[j] = std::fabs(fit.weights[j]);
        const bool varies = std::any_of(mags.begin(), mags.end(), [&](double v) { return v != mags[0]; }) &&
                            std::any_of(base_rmse.begin(), base_rmse.end(),
                                        [&](double v) { return v != base_rmse[0]; });
        if (varies) r.weight_rmse_corr = pearson(mags, base_rmse);
    }
    return r;
}

std::vector<ErrorBin> prediction_error_bins(std::span<const double> pred,
                                            std::span<const double> target, int n_bins) {
    require_same_length(pred.size(), target.size(), "predictions vs target");
    if (n_bins < 1) throw Error(ErrorKind::Config, "error bins must be >= 1");
    const std::size_t n = target.size();
    if (n == 0) return {};
    const std::size_t B = std::min<std::size_t>(static_cast<std::size_t>(n_bins), n);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return target[a] < target[b]; });
    std::vector<ErrorBin> bins(B);
    for (std::size_t b = 0; b < B; ++b) {
        const std::size_t lo = b * n / B, hi = (b + 1) * n / B;
        ErrorBin& e = bins[b];
        e.bin = static_cast<int>(b);
        e.count = hi - lo;
        e.target_lo = target[order[lo]];
        e.target_hi = target[order[hi - 1]];
        double st = 0.0, sp = 0.0, se = 0.0, ss = 0.0;
        for (std::size_t r = lo; r < hi; ++r) {
            const std::size_t i = order[r];
            const double err = pred[i] - target[i];
            st += target[i];
            sp += pred[i];
            se += err;
            ss += err * err;
        }
        const double c = static_cast<double>(e.count);
        e.mean_target = st / c;
        e.mean_prediction = sp / c;
        e.mean_error = se / c;
        e.rmse = std::sqrt(ss / c);
    }
    return bins;
}

// ---------------------------------------------------------------------------
// stages

namespace {

using Clock = std::chrono::steady_clock;

class StageRunner {
public:
    explicit StageRunner(std::vector<std::pair<std::string, double>>* timings) : timings_(timings) {}

    template <typename F>
    auto operator()(const char* stage, F&& f) {
        const auto t0 = Clock::now();
        try {
            if constexpr (std::is_void_v<decltype(f())>) {
                f();
                record(stage, t0);
            } else {
                auto r = f();
                record(stage, t0);
                return r;
            }
        } catch (const Error& e) {
            throw Error(e.kind(), std::string("stage '") + stage + "': " + e.what());
        }
    }

private:
    void record(const char* stage, Clock::time_point t0) {
        if (timings_ == nullptr) return;
        const double s = std::chrono::duration<double>(Clock::now() - t0).count();
        for (auto& [name, secs] : *timings_) {
            if (name == stage) {
                secs += s;
                return;
            }
        }
        timings_->emplace_back(stage, s);
    }

    std::vector<std::pair<std::string, double>>* timings_;
};

std::string fmt_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string penalty_summary(const PenaltySpec& p) {
    std::string s = "lambda=" + fmt_g(p.lambda);
    if (p.kind == PenaltyKind::ElasticNet) s += " alpha=" + fmt_g(p.alpha);
    return s;
}

std::string meta_name(PenaltyKind k) { return "meta_" + std::string(to_string(k)); }

std::vector<double> fold_rmse(std::span<const double> pred, std::span<const double> y,
                              const FoldAssignment& folds) {
    std::vector<double> out;
    for (int l = 0; l < folds.n_folds(); ++l) {
        const auto rows = folds.members(l);
        double ss = 0.0;
        for (auto i : rows) ss += (pred[i] - y[i]) * (pred[i] - y[i]);
        out.push_back(std::sqrt(ss / static_cast<double>(rows.size())));
    }
    return out;
}

std::vector<double> combine(const PredictionMatrix& pool, std::span<const double> weights) {
    std::vector<double> out(pool.n_rows(), 0.0);
    for (std::size_t k = 0; k < pool.n_models(); ++k) {
        if (weights[k] == 0.0) continue;
        const auto c = pool.column(k);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += weights[k] * c[i];
    }
    return out;
}

// Picks the reference's columns from `test` by name. With `exact`, extra test
// columns are an error too.
PredictionMatrix align_test(const PredictionMatrix& test, const PredictionMatrix& reference,
                            bool exact) {
    std::vector<std::size_t> idx;
    for (const auto& name : reference.names()) {
        try {
            idx.push_back(test.index_of(name));
        } catch (const Error&) {
            throw Error(ErrorKind::Dimension, "test predictions lack model '" + name + "'");
        }
    }
    if (exact && test.n_models() != reference.n_models()) {
        throw Error(ErrorKind::Dimension, "test predictions have " +
                                              std::to_string(test.n_models()) + " models, expected " +
                                              std::to_string(reference.n_models()));
    }
    return test.select_models(idx);
}

// Everything up to and including the blend; shared by run() and ablate().
struct CoreResult {
    std::vector<std::string> variance_pruned;
    SelectionResult selection;
    MetaDesign design;
    std::vector<MetaLearnerResult> meta;
    std::vector<std::optional<std::vector<double>>> meta_test;
    std::optional<BlendResult> blend;
    std::string final_method;
    std::vector<double> final_pred;
    std::optional<std::vector<double>> final_test;
};

CoreResult run_core(const PredictionMatrix& oof, const TargetVector& target,
                    const PipelineConfig& cfg, const FoldAssignment& folds,
                    const PredictionMatrix* test, StageRunner& stage) {
    CoreResult out;
    const auto y = target.values();

    PredictionMatrix pool = oof;
    std::optional<PredictionMatrix> test_pool;
    if (test != nullptr) test_pool = *test;
    if (cfg.variance_pruning) {
        stage("variance_pruning", [&] {
            auto vp = variance_prune(oof, cfg.redundancy.tau_var);
            out.variance_pruned = std::move(vp.removed);
            pool = std::move(vp.kept);
        });
    }

    stage("projection", [&] {
        out.selection = cfg.dedup ? project(pool, target, cfg.redundancy) : keep_all(pool, target);
    });
    const PredictionMatrix retained = pool.select_models(out.selection.retained);

    std::optional<MetaDesign> test_design;
    stage("augmentation", [&] {
        out.design = augment(retained, cfg.features);
        if (test_pool) test_design = augment(align_test(*test_pool, retained, false), cfg.features);
    });

    std::vector<double> base_rmse;
    for (auto k : out.selection.retained) base_rmse.push_back(out.selection.model_rmse[k]);

    NestedCvOptions opts;
    opts.inner_folds = cfg.inner_folds;
    opts.seed = cfg.seed;
    opts.cd = cfg.cd;
    stage("meta_learning", [&] {
        for (auto kind : cfg.meta_learners) {
            MetaLearnerResult m;
            m.name = meta_name(kind);
            m.fit = nested_cv_fit(out.design.matrix, y, folds, kind, cfg.grid, opts);
            m.weights = weight_report(m.fit, out.design, base_rmse);
            out.meta.push_back(std::move(m));
        }
    });
    if (cfg.regularization_paths) {
        stage("regularization_path", [&] {
            for (std::size_t i = 0; i < out.meta.size(); ++i) {
                out.meta[i].path = regularization_path(out.design.matrix, y, folds,
                                                       cfg.meta_learners[i], cfg.grid, cfg.cd);
            }
        });
    }

    auto& meta_test = out.meta_test;
    meta_test.resize(out.meta.size());
    if (test_design) {
        for (std::size_t i = 0; i < out.meta.size(); ++i) {
            meta_test[i] = out.meta[i].fit.predict(test_design->matrix);
        }
    }

    if (cfg.blending) {
        stage("blending", [&] {
            std::vector<BlendMember> members;
            for (std::size_t i = 0; i < out.meta.size(); ++i) {
                members.push_back({out.meta[i].name, out.meta[i].fit.oof_pred, meta_test[i]});
            }
            out.blend = blend(members, y);
        });
        out.final_method = "blend";
        out.final_pred = out.blend->final_pred;
        out.final_test = out.blend->final_test_pred;
    } else {
        out.final_method = out.meta.front().name;
        out.final_pred = out.meta.front().fit.oof_pred;
        out.final_test = meta_test.front();
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// run

RunReport run(const PredictionMatrix& oof, const TargetVector& target, const PipelineConfig& cfg,
              const PredictionMatrix* test) {
    cfg.validate();
    if (oof.n_models() == 0) throw Error(ErrorKind::Selection, "empty model pool");
    require_same_length(oof.n_rows(), target.size(), "predictions vs target");
    std::optional<PredictionMatrix> test_aligned;
    if (test != nullptr) test_aligned = align_test(*test, oof, true);
    const PredictionMatrix* test_ptr = test_aligned ? &*test_aligned : nullptr;

    RunReport rep;
    rep.config = cfg;
    rep.n_samples = oof.n_rows();
    rep.n_models = oof.n_models();
    StageRunner stage(&rep.timings);
    const auto y = target.values();

    rep.folds = stage("folds", [&] {
        return stratified_partition(y, cfg.folds, cfg.effective_bins(), cfg.seed);
    });

    CoreResult core = run_core(oof, target, cfg, rep.folds, test_ptr, stage);
    rep.variance_pruned = std::move(core.variance_pruned);
    rep.selection = std::move(core.selection);
    rep.design_columns = core.design.column_names;
    rep.final_method = core.final_method;

    // Baselines on the raw pool.
    stage("baselines", [&] {
        const auto& b = cfg.baselines;
        auto add = [&](std::string name, std::string detail, std::size_t n_models,
                       std::vector<double> pred, std::optional<std::vector<double>> tpred) {
            MethodResult m;
            m.name = std::move(name);
            m.family = "baseline";
            m.detail = std::move(detail);
            m.n_models = n_models;
            m.oof_pred = std::move(pred);
            m.test_pred = std::move(tpred);
            rep.methods.push_back(std::move(m));
        };
        if (b.uniform_average) {
            std::optional<std::vector<double>> t;
            if (test_ptr) t = uniform_average(*test_ptr);
            add("uniform_average", std::to_string(oof.n_models()) + " models", oof.n_models(),
                uniform_average(oof), std::move(t));
        }
        if (b.weighted_average) {
            auto wa = weighted_average(oof, y);
            std::optional<std::vector<double>> t;
            if (test_ptr) t = combine(*test_ptr, wa.weights);
            add("weighted_average", std::to_string(oof.n_models()) + " models", oof.n_models(),
                std::move(wa.prediction), std::move(t));
        }
        if (b.best_single) {
            const auto [name, metrics] = best_single(oof, y);
            const auto col = oof.column(oof.index_of(name));
            std::optional<std::vector<double>> t;
            if (test_ptr) {
                const auto tc = test_ptr->column(test_ptr->index_of(name));
                t.emplace(tc.begin(), tc.end());
            }
            add("best_single", name, 1, std::vector<double>(col.begin(), col.end()), std::move(t));
        }
        if (b.hill_climbing) {
            auto hc = hill_climb(oof, y, cfg.hill_climb);
            const auto w = hc.weights();
            const auto distinct = static_cast<std::size_t>(
                std::count_if(hc.counts.begin(), hc.counts.end(), [](std::size_t c) { return c > 0; }));
            std::optional<std::vector<double>> t;
            if (test_ptr) t = combine(*test_ptr, w);
            add("hill_climbing",
                std::to_string(distinct) + " models, " + std::to_string(hc.history.size()) + " steps",
                distinct, std::move(hc.current_pred), std::move(t));
        }
        if (b.ridge_stack) {
            NestedCvOptions opts;
            opts.inner_folds = cfg.inner_folds;
            opts.seed = cfg.seed;
            opts.cd = cfg.cd;
            FitResult fit = linear_stack(oof, y, rep.folds, cfg.grid, opts);
            rep.total_fit_calls += fit.fit_calls;
            std::optional<std::vector<double>> t;
            if (test_ptr) t = fit.predict(test_ptr->matrix());
            add("ridge_stack", penalty_summary(fit.penalty), oof.n_models(), std::move(fit.oof_pred),
                std::move(t));
        }
    });

    for (std::size_t i = 0; i < core.meta.size(); ++i) {
        const auto& m = core.meta[i];
        MethodResult r;
        r.name = m.name;
        r.family = "meta";
        r.detail = penalty_summary(m.fit.penalty);
        r.n_models = core.design.column_names.size();
        r.sparsity = m.fit.sparsity;
        r.oof_pred = m.fit.oof_pred;
        r.test_pred = core.meta_test[i];
        rep.total_fit_calls += m.fit.fit_calls;
        rep.methods.push_back(std::move(r));
    }
    rep.meta = std::move(core.meta);
    if (core.blend) {
        MethodResult r;
        r.name = "blend";
        r.family = "blend";
        r.detail = std::to_string(core.blend->member_names.size()) + " meta-learners";
        r.n_models = core.blend->member_names.size();
        r.oof_pred = core.blend->final_pred;
        r.test_pred = core.blend->final_test_pred;
        rep.methods.push_back(std::move(r));
        rep.blend = std::move(core.blend);
    }

    stage("evaluation", [&] {
        for (std::size_t i = 0; i < rep.methods.size(); ++i) {
            auto& m = rep.methods[i];
            m.metrics = evaluate(m.oof_pred, y);
            m.per_fold_rmse = fold_rmse(m.oof_pred, y, rep.folds);
            m.consistency = fold_consistency(m.per_fold_rmse);
            std::vector<double> err(y.size());
            for (std::size_t r = 0; r < y.size(); ++r) err[r] = m.oof_pred[r] - y[r];
            m.ci = bootstrap_rmse_ci(err, cfg.bootstrap_resamples, cfg.ci_level,
                                     derive_seed(cfg.seed, 0xc1, i));
        }
        const auto ref = std::find_if(rep.methods.begin(), rep.methods.end(), [&](const MethodResult& m) {
            return m.name == cfg.reference_method;
        });
        if (ref != rep.methods.end() && rep.methods.size() > 1) {
            const std::size_t n_cmp = rep.methods.size() - 1;
            for (auto& m : rep.methods) {
                if (m.name == ref->name) continue;
                m.comparison = compare_methods(m.name, m.per_fold_rmse, ref->name, ref->per_fold_rmse,
                                               n_cmp, cfg.alpha);
            }
        }
        rep.error_bins = prediction_error_bins(rep.method(rep.final_method).oof_pred, y, cfg.error_bins);
    });
    return rep;
}

// ---------------------------------------------------------------------------
// ablate

std::vector<AblationRow> ablate(const PredictionMatrix& oof, const TargetVector& target,
                                const PipelineConfig& cfg) {
    cfg.validate();
    if (oof.n_models() == 0) throw Error(ErrorKind::Selection, "empty model pool");
    require_same_length(oof.n_rows(), target.size(), "predictions vs target");
    const auto y = target.values();
    StageRunner stage(nullptr);
    const FoldAssignment folds = stage("folds", [&] {
        return stratified_partition(y, cfg.folds, cfg.effective_bins(), cfg.seed);
    });

    PipelineConfig c = cfg;
    c.variance_pruning = false;
    c.dedup = false;
    c.features = {false, false};
    c.meta_learners = {PenaltyKind::Ridge};
    c.blending = false;
    c.regularization_paths = false;

    std::vector<AblationRow> rows;
    auto eval_row = [&](const std::string& name) {
        CoreResult core = run_core(oof, target, c, folds, nullptr, stage);
        AblationRow row;
        row.configuration = name;
        row.metrics = evaluate(core.final_pred, y);
        row.n_models = core.selection.k_eff;
        row.n_features = core.design.column_names.size();
        row.delta_rmse = rows.empty() ? 0.0 : row.metrics.rmse - rows.back().metrics.rmse;
        rows.push_back(std::move(row));
    };

    eval_row("baseline_ridge_stack");
    c.dedup = true;
    eval_row("+dedup");
    c.variance_pruning = true;
    eval_row("+variance_pruning");
    c.features.statistics = true;
    eval_row("+statistics");
    c.features.interactions = true;
    eval_row("+interactions");
    c.meta_learners = cfg.meta_learners;
    c.blending = true;
    eval_row("+blending");
    return rows;
}

}  // namespace stackreg
