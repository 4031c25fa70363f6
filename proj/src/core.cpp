#include "stackreg/core.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "stackreg/kernels.hpp"
#include "stackreg/rng.hpp"

namespace stackreg {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Dimension: return "dimension";
        case ErrorKind::Input: return "input";
        case ErrorKind::Degenerate: return "degenerate";
        case ErrorKind::Selection: return "selection";
        case ErrorKind::Partition: return "partition";
        case ErrorKind::Singular: return "singular";
        case ErrorKind::Predictor: return "predictor";
        case ErrorKind::Config: return "config";
        case ErrorKind::Parse: return "parse";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// Matrix

Matrix Matrix::from_columns(const std::vector<std::vector<double>>& columns) {
    const std::size_t cols = columns.size();
    const std::size_t rows = cols == 0 ? 0 : columns.front().size();
    Matrix m(rows, cols);
    for (std::size_t c = 0; c < cols; ++c) {
        if (columns[c].size() != rows) {
            throw Error(ErrorKind::Dimension, "column " + std::to_string(c) + " has " +
                                                  std::to_string(columns[c].size()) +
                                                  " rows, expected " + std::to_string(rows));
        }
        std::copy(columns[c].begin(), columns[c].end(), m.col(c).begin());
    }
    return m;
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
    const std::size_t n = rows.size();
    const std::size_t cols = n == 0 ? 0 : rows.front().size();
    Matrix m(n, cols);
    for (std::size_t r = 0; r < n; ++r) {
        if (rows[r].size() != cols) {
            throw Error(ErrorKind::Dimension, "ragged row " + std::to_string(r));
        }
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
    }
    return m;
}

std::vector<double> Matrix::row(std::size_t r) const {
    std::vector<double> out(cols_);
    for (std::size_t c = 0; c < cols_; ++c) out[c] = (*this)(r, c);
    return out;
}

Matrix Matrix::select_rows(std::span<const std::size_t> idx) const {
    Matrix out(idx.size(), cols_);
    for (std::size_t c = 0; c < cols_; ++c) {
        const auto src = col(c);
        auto dst = out.col(c);
        for (std::size_t i = 0; i < idx.size(); ++i) dst[i] = src[idx[i]];
    }
    return out;
}

Matrix Matrix::select_cols(std::span<const std::size_t> idx) const {
    Matrix out(rows_, idx.size());
    for (std::size_t j = 0; j < idx.size(); ++j) {
        const auto src = col(idx[j]);
        std::copy(src.begin(), src.end(), out.col(j).begin());
    }
    return out;
}

// ---------------------------------------------------------------------------
// TargetVector / PredictionMatrix

TargetVector::TargetVector(std::vector<double> values, std::string name)
    : values_(std::move(values)), name_(std::move(name)) {
    if (values_.size() < 2) {
        throw Error(ErrorKind::Dimension, "target needs at least 2 samples");
    }
    require_finite(values_, "target");
}

PredictionMatrix::PredictionMatrix(std::vector<std::string> names, Matrix values)
    : names_(std::move(names)), values_(std::move(values)) {
    if (names_.size() != values_.cols()) {
        throw Error(ErrorKind::Dimension, "prediction matrix has " +
                                              std::to_string(values_.cols()) + " columns but " +
                                              std::to_string(names_.size()) + " names");
    }
    std::set<std::string_view> seen;
    for (const auto& n : names_) {
        if (!seen.insert(n).second) {
            throw Error(ErrorKind::Input, "duplicate model name '" + n + "'");
        }
    }
    for (std::size_t k = 0; k < values_.cols(); ++k) {
        require_finite(values_.col(k), "predictions of '" + names_[k] + "'");
    }
}

PredictionMatrix::PredictionMatrix(std::vector<std::string> names,
                                   const std::vector<std::vector<double>>& columns)
    : PredictionMatrix(std::move(names), Matrix::from_columns(columns)) {}

std::size_t PredictionMatrix::index_of(std::string_view name) const {
    const auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) {
        throw Error(ErrorKind::Dimension, "no model named '" + std::string(name) + "'");
    }
    return static_cast<std::size_t>(it - names_.begin());
}

PredictionMatrix PredictionMatrix::select_models(std::span<const std::size_t> idx) const {
    std::vector<std::string> names;
    names.reserve(idx.size());
    for (auto k : idx) names.push_back(names_.at(k));
    return {std::move(names), values_.select_cols(idx)};
}

PredictionMatrix PredictionMatrix::select_rows(std::span<const std::size_t> idx) const {
    return {names_, values_.select_rows(idx)};
}

// ---------------------------------------------------------------------------
// helpers

void require_finite(std::span<const double> v, std::string_view what) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i])) {
            throw Error(ErrorKind::Input, std::string(what) + ": non-finite value at index " +
                                              std::to_string(i));
        }
    }
}

void require_same_length(std::size_t a, std::size_t b, std::string_view what) {
    if (a != b) {
        throw Error(ErrorKind::Dimension, std::string(what) + ": length mismatch (" +
                                              std::to_string(a) + " vs " + std::to_string(b) +
                                              ")");
    }
}

double mean(std::span<const double> v) {
    if (v.empty()) throw Error(ErrorKind::Dimension, "mean of empty vector");
    return kernels::sum(v) / static_cast<double>(v.size());
}

double variance(std::span<const double> v) {
    const double m = mean(v);
    return kernels::centered_dot(v, m, v, m) / static_cast<double>(v.size());
}

namespace {

void check_pair(std::span<const double> pred, std::span<const double> target,
                std::string_view what) {
    require_same_length(pred.size(), target.size(), what);
    if (pred.empty()) throw Error(ErrorKind::Dimension, std::string(what) + ": empty input");
    require_finite(pred, what);
    require_finite(target, what);
}

// Centered sum of squares; exact zero or rounding-level values count as constant.
bool is_constant(std::span<const double> v, double m, double ss) {
    double scale = std::fabs(m);
    for (double x : v) scale = std::max(scale, std::fabs(x));
    const double floor = static_cast<double>(v.size()) * (1e-14 * scale) * (1e-14 * scale);
    return !(ss > floor);
}

}  // namespace

double rmse(std::span<const double> pred, std::span<const double> target) {
    check_pair(pred, target, "rmse");
    return std::sqrt(kernels::squared_distance(pred, target) / static_cast<double>(pred.size()));
}

double mae(std::span<const double> pred, std::span<const double> target) {
    check_pair(pred, target, "mae");
    return kernels::abs_distance(pred, target) / static_cast<double>(pred.size());
}

double r_squared(std::span<const double> pred, std::span<const double> target) {
    check_pair(pred, target, "r_squared");
    const double my = mean(target);
    const double sst = kernels::centered_dot(target, my, target, my);
    if (is_constant(target, my, sst)) {
        throw Error(ErrorKind::Degenerate, "r_squared: constant target");
    }
    return 1.0 - kernels::squared_distance(pred, target) / sst;
}

double pearson(std::span<const double> a, std::span<const double> b) {
    check_pair(a, b, "pearson");
    const double ma = mean(a);
    const double mb = mean(b);
    const double saa = kernels::centered_dot(a, ma, a, ma);
    const double sbb = kernels::centered_dot(b, mb, b, mb);
    if (is_constant(a, ma, saa) || is_constant(b, mb, sbb)) {
        throw Error(ErrorKind::Degenerate, "pearson: constant input");
    }
    const double r = kernels::centered_dot(a, ma, b, mb) / std::sqrt(saa * sbb);
    return std::clamp(r, -1.0, 1.0);
}

MetricReport evaluate(std::span<const double> pred, std::span<const double> target) {
    MetricReport m;
    m.rmse = rmse(pred, target);
    m.mae = mae(pred, target);
    m.r_squared = r_squared(pred, target);
    try {
        m.pearson = pearson(pred, target);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Degenerate) throw;
        m.pearson = 0.0;
    }
    return m;
}

// ---------------------------------------------------------------------------
// Rng

std::size_t Rng::below(std::size_t n) {
    const std::uint64_t bound = n;
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return static_cast<std::size_t>(x % bound);
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
}

}  // namespace stackreg
