#pragma once
// Foundational value types and evaluation metrics.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace stackreg {

enum class ErrorKind {
    Dimension,   // shape mismatch
    Input,       // non-finite or otherwise invalid values
    Degenerate,  // constant vectors where variation is required
    Selection,   // empty model pool after filtering
    Partition,   // fold construction impossible
    Singular,    // linear system without a unique solution
    Predictor,   // base predictor failed to fit
    Config,      // invalid configuration
    Parse,       // malformed input file
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Dense column-major matrix. Columns are contiguous, which matches how
/// prediction pools and design matrices are consumed (per-model scans).
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix from_columns(const std::vector<std::vector<double>>& columns);
    static Matrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[c * rows_ + r]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[c * rows_ + r]; }

    std::span<double> col(std::size_t c) noexcept { return {data_.data() + c * rows_, rows_}; }
    std::span<const double> col(std::size_t c) const noexcept {
        return {data_.data() + c * rows_, rows_};
    }

    std::vector<double> row(std::size_t r) const;

    Matrix select_rows(std::span<const std::size_t> idx) const;
    Matrix select_cols(std::span<const std::size_t> idx) const;

    const std::vector<double>& data() const noexcept { return data_; }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Regression target y. Entries finite, at least two samples.
class TargetVector {
public:
    TargetVector(std::vector<double> values, std::string name = "target");

    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    const std::string& name() const noexcept { return name_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }

private:
    std::vector<double> values_;
    std::string name_;
};

/// N x K base-model predictions with unique model names; all entries finite.
class PredictionMatrix {
public:
    PredictionMatrix() = default;
    PredictionMatrix(std::vector<std::string> names, Matrix values);
    PredictionMatrix(std::vector<std::string> names, const std::vector<std::vector<double>>& columns);

    std::size_t n_rows() const noexcept { return values_.rows(); }
    std::size_t n_models() const noexcept { return values_.cols(); }
    const std::vector<std::string>& names() const noexcept { return names_; }
    const std::string& name(std::size_t k) const { return names_.at(k); }
    std::span<const double> column(std::size_t k) const noexcept { return values_.col(k); }
    const Matrix& matrix() const noexcept { return values_; }

    /// Index of a model by name; throws Dimension error if absent.
    std::size_t index_of(std::string_view name) const;

    PredictionMatrix select_models(std::span<const std::size_t> idx) const;
    PredictionMatrix select_rows(std::span<const std::size_t> idx) const;

    friend bool operator==(const PredictionMatrix&, const PredictionMatrix&) = default;

private:
    std::vector<std::string> names_;
    Matrix values_;
};

struct MetricReport {
    double rmse = 0.0;
    double mae = 0.0;
    double r_squared = 0.0;
    double pearson = 0.0;
};

double rmse(std::span<const double> pred, std::span<const double> target);
double mae(std::span<const double> pred, std::span<const double> target);
/// 1 - SSE/SST. Throws Degenerate for a constant target.
double r_squared(std::span<const double> pred, std::span<const double> target);
/// Throws Degenerate if either input is constant.
double pearson(std::span<const double> a, std::span<const double> b);

/// All four metrics. Pearson is reported as 0 when the prediction is constant.
MetricReport evaluate(std::span<const double> pred, std::span<const double> target);

// Small helpers shared by the modules below.
double mean(std::span<const double> v);
/// Population variance (divides by N).
double variance(std::span<const double> v);
void require_finite(std::span<const double> v, std::string_view what);
void require_same_length(std::size_t a, std::size_t b, std::string_view what);

}  // namespace stackreg
