#include "stackreg/oof.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "stackreg/kernels.hpp"
#include "stackreg/rng.hpp"
#include "stackreg/solvers.hpp"

namespace stackreg {

// ---------------------------------------------------------------------------
// built-in predictors

std::unique_ptr<BasePredictor> ConstantMeanPredictor::clone() const {
    return std::make_unique<ConstantMeanPredictor>(name_);
}

void ConstantMeanPredictor::fit(const Matrix&, std::span<const double> target, std::uint64_t) {
    value_ = mean(target);
}

std::vector<double> ConstantMeanPredictor::predict(const Matrix& features) const {
    return std::vector<double>(features.rows(), value_);
}

UnivariatePredictor::UnivariatePredictor(std::size_t feature, std::string name)
    : feature_(feature),
      name_(name.empty() ? "ols_x" + std::to_string(feature) : std::move(name)) {}

std::unique_ptr<BasePredictor> UnivariatePredictor::clone() const {
    return std::make_unique<UnivariatePredictor>(feature_, name_);
}

void UnivariatePredictor::fit(const Matrix& features, std::span<const double> target,
                              std::uint64_t) {
    if (feature_ >= features.cols()) {
        throw Error(ErrorKind::Dimension, name_ + ": feature index out of range");
    }
    const auto x = features.col(feature_);
    const double mx = mean(x);
    const double my = mean(target);
    const double sxx = kernels::centered_dot(x, mx, x, mx);
    const double sxy = kernels::centered_dot(x, mx, target, my);
    slope_ = sxx > 0.0 ? sxy / sxx : 0.0;
    intercept_ = my - slope_ * mx;
}

std::vector<double> UnivariatePredictor::predict(const Matrix& features) const {
    std::vector<double> out(features.rows(), intercept_);
    kernels::axpy(slope_, features.col(feature_), out);
    return out;
}

RidgePredictor::RidgePredictor(double lambda, std::string name)
    : lambda_(lambda), name_(name.empty() ? "ridge_" + std::to_string(lambda) : std::move(name)) {}

std::unique_ptr<BasePredictor> RidgePredictor::clone() const {
    return std::make_unique<RidgePredictor>(lambda_, name_);
}

void RidgePredictor::fit(const Matrix& features, std::span<const double> target, std::uint64_t) {
    LinearModel m = fit_ridge(features, target, lambda_);
    weights_ = std::move(m.weights);
    intercept_ = m.intercept;
}

std::vector<double> RidgePredictor::predict(const Matrix& features) const {
    return LinearModel{weights_, intercept_}.predict(features);
}

KnnPredictor::KnnPredictor(std::size_t k, std::string name)
    : k_(k), name_(name.empty() ? "knn_" + std::to_string(k) : std::move(name)) {}

std::unique_ptr<BasePredictor> KnnPredictor::clone() const {
    return std::make_unique<KnnPredictor>(k_, name_);
}

void KnnPredictor::fit(const Matrix& features, std::span<const double> target, std::uint64_t) {
    if (k_ == 0) throw Error(ErrorKind::Config, name_ + ": k must be >= 1");
    train_x_ = features;
    train_y_.assign(target.begin(), target.end());
}

std::vector<double> KnnPredictor::predict(const Matrix& features) const {
    const std::size_t n = train_x_.rows();
    const std::size_t k = std::min(k_, n);
    std::vector<double> out(features.rows());
    std::vector<std::pair<double, std::size_t>> dist(n);
    for (std::size_t r = 0; r < features.rows(); ++r) {
        for (std::size_t i = 0; i < n; ++i) {
            double d2 = 0.0;
            for (std::size_t c = 0; c < features.cols(); ++c) {
                const double diff = features(r, c) - train_x_(i, c);
                d2 += diff * diff;
            }
            dist[i] = {d2, i};
        }
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
        double s = 0.0;
        for (std::size_t j = 0; j < k; ++j) s += train_y_[dist[j].second];
        out[r] = s / static_cast<double>(k);
    }
    return out;
}

// ---------------------------------------------------------------------------
// build_oof

namespace {

std::vector<double> checked_predict(const BasePredictor& p, const Matrix& x, std::size_t rows) {
    auto pred = p.predict(x);
    if (pred.size() != rows) {
        throw Error(ErrorKind::Dimension, "returned " + std::to_string(pred.size()) +
                                              " predictions for " + std::to_string(rows) + " rows");
    }
    require_finite(pred, "predictions");
    return pred;
}

}  // namespace

OofBundle build_oof(const Matrix& features, std::span<const double> target,
                    const PredictorList& predictors, const FoldAssignment& folds,
                    std::uint64_t seed, const Matrix* test_features) {
    if (predictors.empty()) throw Error(ErrorKind::Selection, "build_oof: no predictors");
    require_same_length(features.rows(), target.size(), "features vs target");
    require_same_length(folds.n_samples(), target.size(), "fold assignment vs target");
    require_finite(target, "target");

    const std::size_t n = target.size();
    const std::size_t K = predictors.size();
    OofBundle out;
    std::vector<std::string> names;
    for (const auto& p : predictors) names.push_back(p->name());
    Matrix oof(n, K, std::numeric_limits<double>::quiet_NaN());

    for (int l = 0; l < folds.n_folds(); ++l) {
        const auto train = folds.complement(l);
        const auto val = folds.members(l);
        const Matrix x_train = features.select_rows(train);
        const Matrix x_val = features.select_rows(val);
        std::vector<double> y_train(train.size());
        for (std::size_t i = 0; i < train.size(); ++i) y_train[i] = target[train[i]];

        for (std::size_t k = 0; k < K; ++k) {
            try {
                auto model = predictors[k]->clone();
                model->fit(x_train, y_train, derive_seed(seed, static_cast<std::uint64_t>(l), k));
                ++out.fold_fit_calls;
                const auto pred = checked_predict(*model, x_val, val.size());
                auto col = oof.col(k);
                for (std::size_t i = 0; i < val.size(); ++i) col[val[i]] = pred[i];
            } catch (const std::exception& e) {
                throw Error(ErrorKind::Predictor, "model '" + names[k] + "' failed on fold " +
                                                      std::to_string(l) + ": " + e.what());
            }
        }
    }

    out.per_model_rmse.resize(K);
    for (std::size_t k = 0; k < K; ++k) out.per_model_rmse[k] = rmse(oof.col(k), target);

    if (test_features != nullptr) {
        require_same_length(test_features->cols(), features.cols(), "test feature columns");
        Matrix test(test_features->rows(), K);
        for (std::size_t k = 0; k < K; ++k) {
            try {
                auto model = predictors[k]->clone();
                model->fit(features, target, derive_seed(seed, 0xffffffffULL, k));
                ++out.test_fit_calls;
                const auto pred = checked_predict(*model, *test_features, test_features->rows());
                std::copy(pred.begin(), pred.end(), test.col(k).begin());
            } catch (const std::exception& e) {
                throw Error(ErrorKind::Predictor, "model '" + names[k] +
                                                      "' failed on the full-data refit: " +
                                                      e.what());
            }
        }
        out.test = PredictionMatrix(names, std::move(test));
    }
    out.oof = PredictionMatrix(std::move(names), std::move(oof));
    return out;
}

}  // namespace stackreg
