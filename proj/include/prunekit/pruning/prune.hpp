#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>

#include "prunekit/core/types.hpp"

namespace prunekit {

using LabelMap = std::map<std::string, int, std::less<>>;

/// How many samples to remove: floor(fraction * n), or an exact count.
class Budget {
public:
    static Budget fraction(double f);
    static Budget count(std::size_t c);

    /// Total removals for a universe of n ids; throws if not below n.
    std::size_t total(std::size_t n) const;
    /// Fraction recorded in the manifest policy.
    double as_fraction(std::size_t n) const;
    bool is_count() const { return count_.has_value(); }

private:
    double fraction_ = 0.0;
    std::optional<std::size_t> count_;
};

/// Removes the lowest (keep_high) or highest (keep_low) scores; ties go to the
/// lexicographically smaller id first.
PruneManifest prune_by_score(const ScoreTable& scores, Budget budget, Direction direction);

/// Ranks within each class. Every class first loses floor(share); remaining
/// removals go one per class by descending fractional remainder, ties to the
/// lower class index.
PruneManifest prune_balanced(const ScoreTable& scores, const LabelMap& labels, Budget budget,
                             Direction direction);

/// Seeded uniform removal. Ids are sorted first, so the result depends only
/// on the id set, the budget and the seed.
PruneManifest prune_random(std::span<const std::string> ids, const LabelMap* labels, Budget budget,
                           std::uint64_t seed, bool balanced);

/// |a.removed ∩ b.removed| / |a.removed| for manifests over one universe with
/// equally sized removed sets. Defined as 1 when nothing was removed.
double overlap(const PruneManifest& a, const PruneManifest& b);

/// Per-class removal counts for the balanced rule, indexed like `class_sizes`.
std::vector<std::size_t> balanced_quotas(std::span<const std::size_t> class_sizes, Budget budget);

}  // namespace prunekit
