#include "stackreg/folds.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "stackreg/core.hpp"
#include "stackreg/rng.hpp"

namespace stackreg {

FoldAssignment::FoldAssignment(std::vector<int> fold_of, int n_folds)
    : fold_of_(std::move(fold_of)), n_folds_(n_folds) {
    if (n_folds_ < 2) throw Error(ErrorKind::Partition, "need at least 2 folds");
    std::vector<std::size_t> counts(static_cast<std::size_t>(n_folds_), 0);
    for (int f : fold_of_) {
        if (f < 0 || f >= n_folds_) {
            throw Error(ErrorKind::Partition, "fold index " + std::to_string(f) + " out of range");
        }
        ++counts[static_cast<std::size_t>(f)];
    }
    for (int f = 0; f < n_folds_; ++f) {
        if (counts[static_cast<std::size_t>(f)] == 0) {
            throw Error(ErrorKind::Partition, "fold " + std::to_string(f) + " is empty");
        }
    }
}

std::vector<std::size_t> FoldAssignment::members(int f) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold_of_.size(); ++i) {
        if (fold_of_[i] == f) out.push_back(i);
    }
    return out;
}

std::vector<std::size_t> FoldAssignment::complement(int f) const {
    std::vector<std::size_t> out;
    out.reserve(fold_of_.size());
    for (std::size_t i = 0; i < fold_of_.size(); ++i) {
        if (fold_of_[i] != f) out.push_back(i);
    }
    return out;
}

FoldAssignment stratified_partition(std::span<const double> target, int n_folds, int n_bins,
                                    std::uint64_t seed) {
    const std::size_t n = target.size();
    if (n_folds < 2) throw Error(ErrorKind::Partition, "need at least 2 folds");
    if (n_bins < 1) throw Error(ErrorKind::Partition, "need at least 1 stratification bin");
    if (n < static_cast<std::size_t>(n_folds)) {
        throw Error(ErrorKind::Partition, "cannot split " + std::to_string(n) + " samples into " +
                                              std::to_string(n_folds) + " folds");
    }
    require_finite(target, "stratification target");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return target[a] < target[b]; });

    const std::size_t bins = std::min<std::size_t>(static_cast<std::size_t>(n_bins), n);
    Rng rng(seed);
    std::vector<int> fold_of(n, -1);
    std::size_t deal = 0;
    for (std::size_t b = 0; b < bins; ++b) {
        const std::size_t lo = b * n / bins;
        const std::size_t hi = (b + 1) * n / bins;
        std::span<std::size_t> bin{order.data() + lo, hi - lo};
        rng.shuffle(bin);
        for (std::size_t idx : bin) {
            fold_of[idx] = static_cast<int>(deal % static_cast<std::size_t>(n_folds));
            ++deal;
        }
    }
    return {std::move(fold_of), n_folds};
}

FoldAssignment random_partition(std::size_t n, int n_folds, std::uint64_t seed) {
    if (n_folds < 2) throw Error(ErrorKind::Partition, "need at least 2 folds");
    if (n < static_cast<std::size_t>(n_folds)) {
        throw Error(ErrorKind::Partition, "cannot split " + std::to_string(n) + " samples into " +
                                              std::to_string(n_folds) + " folds");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(std::span<std::size_t>(order));
    std::vector<int> fold_of(n);
    for (std::size_t pos = 0; pos < n; ++pos) {
        fold_of[order[pos]] = static_cast<int>(pos % static_cast<std::size_t>(n_folds));
    }
    return {std::move(fold_of), n_folds};
}

}  // namespace stackreg
