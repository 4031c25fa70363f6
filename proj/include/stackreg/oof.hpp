#pragma once
// Out-of-fold prediction construction over pluggable base predictors.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stackreg/core.hpp"
#include "stackreg/folds.hpp"

namespace stackreg {

/// A base model f_k. Implementations must be deterministic given the seed
/// passed to fit().
class BasePredictor {
public:
    virtual ~BasePredictor() = default;

    virtual std::string name() const = 0;
    /// A fresh, unfitted copy with the same hyperparameters.
    virtual std::unique_ptr<BasePredictor> clone() const = 0;
    virtual void fit(const Matrix& features, std::span<const double> target,
                     std::uint64_t seed) = 0;
    virtual std::vector<double> predict(const Matrix& features) const = 0;
};

using PredictorList = std::vector<std::unique_ptr<BasePredictor>>;

/// Predicts the training-target mean.
class ConstantMeanPredictor final : public BasePredictor {
public:
    explicit ConstantMeanPredictor(std::string name = "mean") : name_(std::move(name)) {}
    std::string name() const override { return name_; }
    std::unique_ptr<BasePredictor> clone() const override;
    void fit(const Matrix& features, std::span<const double> target, std::uint64_t seed) override;
    std::vector<double> predict(const Matrix& features) const override;

private:
    std::string name_;
    double value_ = 0.0;
};

/// Simple least squares on a single feature column.
class UnivariatePredictor final : public BasePredictor {
public:
    explicit UnivariatePredictor(std::size_t feature, std::string name = {});
    std::string name() const override { return name_; }
    std::unique_ptr<BasePredictor> clone() const override;
    void fit(const Matrix& features, std::span<const double> target, std::uint64_t seed) override;
    std::vector<double> predict(const Matrix& features) const override;

private:
    std::size_t feature_;
    std::string name_;
    double slope_ = 0.0;
    double intercept_ = 0.0;
};

/// Ridge regression on all features with a fixed lambda.
class RidgePredictor final : public BasePredictor {
public:
    explicit RidgePredictor(double lambda, std::string name = {});
    std::string name() const override { return name_; }
    std::unique_ptr<BasePredictor> clone() const override;
    void fit(const Matrix& features, std::span<const double> target, std::uint64_t seed) override;
    std::vector<double> predict(const Matrix& features) const override;

private:
    double lambda_;
    std::string name_;
    std::vector<double> weights_;
    double intercept_ = 0.0;
};

/// Mean target of the k nearest training rows (Euclidean; ties by row index).
class KnnPredictor final : public BasePredictor {
public:
    explicit KnnPredictor(std::size_t k, std::string name = {});
    std::string name() const override { return name_; }
    std::unique_ptr<BasePredictor> clone() const override;
    void fit(const Matrix& features, std::span<const double> target, std::uint64_t seed) override;
    std::vector<double> predict(const Matrix& features) const override;

private:
    std::size_t k_;
    std::string name_;
    Matrix train_x_;
    std::vector<double> train_y_;
};

struct OofBundle {
    PredictionMatrix oof;
    std::optional<PredictionMatrix> test;
    std::vector<double> per_model_rmse;
    std::size_t fold_fit_calls = 0;  // L * K
    std::size_t test_fit_calls = 0;  // K when test features were given
};

/// For each fold l and predictor k, fits a clone of k on rows outside l and
/// writes its predictions for rows in l. If test features are supplied each
/// predictor is additionally refit once on all rows to produce test columns.
/// Any fit failure aborts with a Predictor error naming model and fold.
OofBundle build_oof(const Matrix& features, std::span<const double> target,
                    const PredictorList& predictors, const FoldAssignment& folds,
                    std::uint64_t seed = 42, const Matrix* test_features = nullptr);

}  // namespace stackreg
