#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "stackreg/core.hpp"

namespace stackreg {

/// Names of the engineered columns, in the order they are appended.
inline constexpr std::array<std::string_view, 6> kMetaFeatureNames{
    "mean", "std", "median", "range", "mean_std_interaction", "range_std_interaction"};

/// Which engineered columns to append. The full design uses both groups;
/// the cumulative ablation switches them on one at a time.
struct MetaFeatureSet {
    bool statistics = true;    // mean, std, median, range
    bool interactions = true;  // mean*std, range*std
};

struct MetaDesign {
    Matrix matrix;  // N x (K_eff + engineered)
    std::vector<std::string> column_names;
    std::size_t n_base = 0;  // leading raw prediction columns
};

/// Appends per-row ensemble statistics over the retained predictions:
/// mean, population std (divides by K_eff), median (midpoint for even K_eff),
/// max - min range, mean*std and range*std. Throws Selection for an empty pool.
MetaDesign augment(const PredictionMatrix& retained, MetaFeatureSet features = {});

}  // namespace stackreg
