#include "stackreg/metafeatures.hpp"

#include <algorithm>
#include <cmath>

namespace stackreg {

MetaDesign augment(const PredictionMatrix& retained, MetaFeatureSet features) {
    const std::size_t K = retained.n_models();
    if (K == 0) throw Error(ErrorKind::Selection, "augment: no retained models");
    const std::size_t n = retained.n_rows();
    const std::size_t extra = (features.statistics ? 4 : 0) + (features.interactions ? 2 : 0);

    MetaDesign out;
    out.n_base = K;
    out.matrix = Matrix(n, K + extra);
    out.column_names = retained.names();
    for (std::size_t k = 0; k < K; ++k) {
        const auto src = retained.column(k);
        std::copy(src.begin(), src.end(), out.matrix.col(k).begin());
    }
    if (extra == 0) return out;

    std::vector<std::size_t> slots;
    if (features.statistics) {
        for (std::size_t f = 0; f < 4; ++f) slots.push_back(f);
    }
    if (features.interactions) {
        slots.push_back(4);
        slots.push_back(5);
    }
    for (auto f : slots) out.column_names.emplace_back(kMetaFeatureNames[f]);

    const double inv_k = 1.0 / static_cast<double>(K);
    std::vector<double> row(K);
    std::array<double, 6> v{};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < K; ++k) row[k] = retained.column(k)[i];
        const auto [lo, hi] = std::minmax_element(row.begin(), row.end());
        const double range = *hi - *lo;
        double mu = row[0];
        double sigma = 0.0;
        // Identical entries: keep mean exact and std exactly zero.
        if (range > 0.0) {
            double s = 0.0;
            for (double x : row) s += x;
            mu = s * inv_k;
            double ss = 0.0;
            for (double x : row) ss += (x - mu) * (x - mu);
            sigma = std::sqrt(ss * inv_k);
        }

        std::sort(row.begin(), row.end());
        const double median = (K % 2 == 1) ? row[K / 2] : 0.5 * (row[K / 2 - 1] + row[K / 2]);

        v = {mu, sigma, median, range, mu * sigma, range * sigma};
        for (std::size_t c = 0; c < slots.size(); ++c) out.matrix(i, K + c) = v[slots[c]];
    }
    return out;
}

}  // namespace stackreg
