#pragma once
// K-fold assignment for continuous targets.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace stackreg {

class FoldAssignment {
public:
    FoldAssignment() = default;
    /// Validates that every fold index is in [0, n_folds) and every fold is nonempty.
    FoldAssignment(std::vector<int> fold_of, int n_folds);

    int n_folds() const noexcept { return n_folds_; }
    std::size_t n_samples() const noexcept { return fold_of_.size(); }
    int fold_of(std::size_t i) const noexcept { return fold_of_[i]; }
    const std::vector<int>& assignment() const noexcept { return fold_of_; }

    /// Row indices in fold f (ascending).
    std::vector<std::size_t> members(int f) const;
    /// Row indices not in fold f (ascending).
    std::vector<std::size_t> complement(int f) const;

    friend bool operator==(const FoldAssignment&, const FoldAssignment&) = default;

private:
    std::vector<int> fold_of_;
    int n_folds_ = 0;
};

/// Quantile-binned stratification: rows are sorted by target and cut into
/// n_bins equal-count bins; each bin is shuffled with the seed and dealt
/// round-robin into folds, continuing the deal position across bins so that
/// overall fold sizes also differ by at most one.
FoldAssignment stratified_partition(std::span<const double> target, int n_folds, int n_bins,
                                    std::uint64_t seed);

/// Unstratified seeded split of n rows into n_folds (shuffle then deal).
FoldAssignment random_partition(std::size_t n, int n_folds, std::uint64_t seed);

}  // namespace stackreg
