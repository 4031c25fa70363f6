#include "stackreg/config.hpp"

#include <fstream>
#include <initializer_list>
#include <limits>

namespace stackreg {

using nlohmann::json;

namespace {

[[noreturn]] void config_fail(const std::string& path, const std::string& msg) {
    throw Error(ErrorKind::Config, "config " + path + ": " + msg);
}

void require_object(const json& j, const std::string& path,
                    std::initializer_list<const char*> allowed) {
    if (!j.is_object()) config_fail(path, "expected an object");
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) config_fail(path.empty() ? key : path + "." + key, "unknown key");
    }
}

double get_number(const json& j, const std::string& path) {
    if (!j.is_number()) config_fail(path, "expected a number");
    return j.get<double>();
}

long long get_integer(const json& j, const std::string& path) {
    if (!j.is_number_integer()) config_fail(path, "expected an integer");
    return j.get<long long>();
}

int get_int(const json& j, const std::string& path) {
    const long long v = get_integer(j, path);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
        config_fail(path, "integer out of range");
    }
    return static_cast<int>(v);
}

bool get_bool(const json& j, const std::string& path) {
    if (!j.is_boolean()) config_fail(path, "expected true or false");
    return j.get<bool>();
}

std::string get_string(const json& j, const std::string& path) {
    if (!j.is_string()) config_fail(path, "expected a string");
    return j.get<std::string>();
}

std::vector<std::string> get_strings(const json& j, const std::string& path) {
    if (!j.is_array()) config_fail(path, "expected a list of strings");
    std::vector<std::string> out;
    for (const auto& e : j) out.push_back(get_string(e, path + "[]"));
    return out;
}

std::vector<double> get_axis(const json& j, const std::string& path) {
    if (j.is_array()) {
        std::vector<double> out;
        for (const auto& e : j) out.push_back(get_number(e, path + "[]"));
        return out;
    }
    require_object(j, path, {"log10_min", "log10_max", "count"});
    if (!j.contains("log10_min") || !j.contains("log10_max") || !j.contains("count")) {
        config_fail(path, "needs log10_min, log10_max and count");
    }
    const long long count = get_integer(j.at("count"), path + ".count");
    if (count < 1) config_fail(path + ".count", "must be >= 1");
    return logspace(get_number(j.at("log10_min"), path + ".log10_min"),
                    get_number(j.at("log10_max"), path + ".log10_max"),
                    static_cast<std::size_t>(count));
}

}  // namespace

PipelineConfig config_from_json(const json& doc, PipelineConfig cfg) {
    require_object(doc, "",
                   {"folds", "seed", "n_bins", "inner_folds", "tau_corr", "tau_mse", "tau_var",
                    "meta_learners", "baselines", "reference_method", "alpha",
                    "bootstrap_resamples", "ci_level", "error_bins", "regularization_paths",
                    "hill_climb", "solver", "grid", "stages"});
    for (const auto& [key, v] : doc.items()) {
        if (key == "folds") cfg.folds = get_int(v, key);
        else if (key == "seed") {
            if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
                config_fail(key, "expected a nonnegative integer");
            }
            cfg.seed = v.get<std::uint64_t>();
        } else if (key == "n_bins") cfg.n_bins = get_int(v, key);
        else if (key == "inner_folds") cfg.inner_folds = get_int(v, key);
        else if (key == "tau_corr") cfg.redundancy.tau_corr = get_number(v, key);
        else if (key == "tau_mse") {
            if (v.is_null()) cfg.redundancy.tau_mse.reset();
            else cfg.redundancy.tau_mse = get_number(v, key);
        } else if (key == "tau_var") cfg.redundancy.tau_var = get_number(v, key);
        else if (key == "meta_learners") {
            cfg.meta_learners.clear();
            for (const auto& s : get_strings(v, key)) cfg.meta_learners.push_back(parse_penalty_kind(s));
        } else if (key == "baselines") cfg.baselines = BaselineSet::from_names(get_strings(v, key));
        else if (key == "reference_method") cfg.reference_method = get_string(v, key);
        else if (key == "alpha") cfg.alpha = get_number(v, key);
        else if (key == "bootstrap_resamples") cfg.bootstrap_resamples = get_int(v, key);
        else if (key == "ci_level") cfg.ci_level = get_number(v, key);
        else if (key == "error_bins") cfg.error_bins = get_int(v, key);
        else if (key == "regularization_paths") cfg.regularization_paths = get_bool(v, key);
        else if (key == "hill_climb") {
            require_object(v, key, {"max_steps", "patience"});
            if (v.contains("max_steps")) {
                const long long s = get_integer(v.at("max_steps"), "hill_climb.max_steps");
                if (s < 1) config_fail("hill_climb.max_steps", "must be >= 1");
                cfg.hill_climb.max_steps = static_cast<std::size_t>(s);
            }
            if (v.contains("patience")) {
                const long long p = get_integer(v.at("patience"), "hill_climb.patience");
                if (p < 0) config_fail("hill_climb.patience", "must be >= 0");
                cfg.hill_climb.patience = static_cast<std::size_t>(p);
            }
        } else if (key == "solver") {
            require_object(v, key, {"tol", "max_iter"});
            if (v.contains("tol")) cfg.cd.tol = get_number(v.at("tol"), "solver.tol");
            if (v.contains("max_iter")) cfg.cd.max_iter = get_int(v.at("max_iter"), "solver.max_iter");
        } else if (key == "grid") {
            require_object(v, key, {"ridge_lambdas", "lasso_lambdas", "alphas"});
            if (v.contains("ridge_lambdas")) {
                cfg.grid.ridge_lambdas = get_axis(v.at("ridge_lambdas"), "grid.ridge_lambdas");
            }
            if (v.contains("lasso_lambdas")) {
                cfg.grid.lasso_lambdas = get_axis(v.at("lasso_lambdas"), "grid.lasso_lambdas");
            }
            if (v.contains("alphas")) {
                cfg.grid.alphas.clear();
                if (!v.at("alphas").is_array()) config_fail("grid.alphas", "expected a list");
                for (const auto& a : v.at("alphas")) cfg.grid.alphas.push_back(get_number(a, "grid.alphas[]"));
            }
        } else if (key == "stages") {
            require_object(v, key, {"variance_pruning", "dedup", "statistics", "interactions", "blending"});
            for (const auto& [s, b] : v.items()) {
                const bool on = get_bool(b, "stages." + s);
                if (s == "variance_pruning") cfg.variance_pruning = on;
                else if (s == "dedup") cfg.dedup = on;
                else if (s == "statistics") cfg.features.statistics = on;
                else if (s == "interactions") cfg.features.interactions = on;
                else cfg.blending = on;
            }
        }
    }
    cfg.validate();
    return cfg;
}

PipelineConfig load_config_file(const std::string& path, PipelineConfig base) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Config, "cannot open config '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Config, "config '" + path + "' is not valid JSON: " + e.what());
    }
    return config_from_json(doc, std::move(base));
}

json config_to_json(const PipelineConfig& cfg) {
    json j;
    j["folds"] = cfg.folds;
    j["seed"] = cfg.seed;
    j["n_bins"] = cfg.n_bins;
    j["inner_folds"] = cfg.inner_folds;
    j["tau_corr"] = cfg.redundancy.tau_corr;
    j["tau_mse"] = cfg.redundancy.tau_mse ? json(*cfg.redundancy.tau_mse) : json(nullptr);
    j["tau_var"] = cfg.redundancy.tau_var;
    json metas = json::array();
    for (auto k : cfg.meta_learners) metas.push_back(std::string(to_string(k)));
    j["meta_learners"] = metas;
    j["baselines"] = cfg.baselines.enabled_names();
    j["reference_method"] = cfg.reference_method;
    j["alpha"] = cfg.alpha;
    j["bootstrap_resamples"] = cfg.bootstrap_resamples;
    j["ci_level"] = cfg.ci_level;
    j["error_bins"] = cfg.error_bins;
    j["regularization_paths"] = cfg.regularization_paths;
    j["hill_climb"] = {{"max_steps", cfg.hill_climb.max_steps}, {"patience", cfg.hill_climb.patience}};
    j["solver"] = {{"tol", cfg.cd.tol}, {"max_iter", cfg.cd.max_iter}};
    j["grid"] = {{"ridge_lambdas", cfg.grid.ridge_lambdas},
                 {"lasso_lambdas", cfg.grid.lasso_lambdas},
                 {"alphas", cfg.grid.alphas}};
    j["stages"] = {{"variance_pruning", cfg.variance_pruning},
                   {"dedup", cfg.dedup},
                   {"statistics", cfg.features.statistics},
                   {"interactions", cfg.features.interactions},
                   {"blending", cfg.blending}};
    return j;
}

}  // namespace stackreg
