#include "prunekit/pruning/prune.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_set>

#include "prunekit/error.hpp"
#include "prunekit/rng.hpp"

namespace prunekit {

namespace {

struct Ranked {
    std::string_view id;
    double score;
};

// Removal order: the first entries are removed first.
void rank_for_removal(std::vector<Ranked>& items, Direction direction) {
    std::sort(items.begin(), items.end(), [direction](const Ranked& a, const Ranked& b) {
        if (a.score != b.score) return direction == Direction::keep_high ? a.score < b.score : a.score > b.score;
        return a.id < b.id;
    });
}

// `removed` may view into `universe`, so ids are copied, not moved.
PruneManifest make_manifest(const std::vector<std::string>& universe,
                            const std::unordered_set<std::string_view>& removed, PrunePolicy policy) {
    std::vector<std::string_view> order(universe.begin(), universe.end());
    std::sort(order.begin(), order.end());
    PruneManifest m;
    for (auto id : order) (removed.count(id) ? m.removed : m.kept).emplace_back(id);
    policy.removed_count = m.removed.size();
    m.policy = policy;
    return m;
}

PrunePolicy base_policy(Budget budget, std::size_t n, Direction direction) {
    PrunePolicy p;
    p.fraction = budget.as_fraction(n);
    p.direction = direction;
    return p;
}

}  // namespace

Budget Budget::fraction(double f) {
    if (!(f >= 0.0 && f < 1.0)) throw ValidationError("pruning fraction must lie in [0, 1), got " + std::to_string(f));
    Budget b;
    b.fraction_ = f;
    return b;
}

Budget Budget::count(std::size_t c) {
    Budget b;
    b.count_ = c;
    return b;
}

std::size_t Budget::total(std::size_t n) const {
    if (count_) {
        if (*count_ > 0 && *count_ >= n)
            throw ValidationError("cannot remove " + std::to_string(*count_) + " of " + std::to_string(n) + " samples");
        return *count_;
    }
    return static_cast<std::size_t>(std::floor(fraction_ * static_cast<double>(n)));
}

double Budget::as_fraction(std::size_t n) const {
    if (count_) return n == 0 ? 0.0 : static_cast<double>(*count_) / static_cast<double>(n);
    return fraction_;
}

std::vector<std::size_t> balanced_quotas(std::span<const std::size_t> class_sizes, Budget budget) {
    const std::size_t n = std::accumulate(class_sizes.begin(), class_sizes.end(), std::size_t{0});
    if (n == 0) return std::vector<std::size_t>(class_sizes.size(), 0);
    const std::size_t total = budget.total(n);
    std::vector<std::size_t> quota(class_sizes.size());
    std::vector<double> remainder(class_sizes.size());
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < class_sizes.size(); ++c) {
        if (budget.is_count()) {
            // exact integer shares total * n_c / n
            quota[c] = total * class_sizes[c] / n;
            remainder[c] = static_cast<double>(total * class_sizes[c] % n) / static_cast<double>(n);
        } else {
            const double share = budget.as_fraction(n) * static_cast<double>(class_sizes[c]);
            quota[c] = static_cast<std::size_t>(std::floor(share));
            remainder[c] = share - static_cast<double>(quota[c]);
        }
        assigned += quota[c];
    }
    std::vector<std::size_t> order(class_sizes.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    for (std::size_t i = 0; assigned < total; i = (i + 1) % order.size()) {
        const std::size_t c = order[i];
        if (quota[c] < class_sizes[c]) {
            ++quota[c];
            ++assigned;
        }
    }
    return quota;
}

PruneManifest prune_by_score(const ScoreTable& scores, Budget budget, Direction direction) {
    if (scores.empty()) throw ValidationError("cannot prune an empty score table");
    const std::size_t total = budget.total(scores.size());
    std::vector<Ranked> items;
    for (const auto& e : scores.entries()) items.push_back({e.id, e.score});
    rank_for_removal(items, direction);
    std::unordered_set<std::string_view> removed;
    for (std::size_t i = 0; i < total; ++i) removed.insert(items[i].id);
    auto policy = base_policy(budget, scores.size(), direction);
    policy.metric = scores.metric();
    return make_manifest(scores.ids(), removed, policy);
}

PruneManifest prune_balanced(const ScoreTable& scores, const LabelMap& labels, Budget budget, Direction direction) {
    if (scores.empty()) throw ValidationError("cannot prune an empty score table");
    std::map<int, std::vector<Ranked>> by_class;
    for (const auto& e : scores.entries()) {
        auto it = labels.find(e.id);
        if (it == labels.end()) throw ValidationError("missing label for id '" + e.id + "'");
        by_class[it->second].push_back({e.id, e.score});
    }
    std::vector<std::size_t> sizes;
    for (const auto& [label, items] : by_class) sizes.push_back(items.size());
    const auto quota = balanced_quotas(sizes, budget);
    std::unordered_set<std::string_view> removed;
    std::size_t c = 0;
    for (auto& [label, items] : by_class) {
        rank_for_removal(items, direction);
        for (std::size_t i = 0; i < quota[c]; ++i) removed.insert(items[i].id);
        ++c;
    }
    auto policy = base_policy(budget, scores.size(), direction);
    policy.balanced = true;
    policy.metric = scores.metric();
    return make_manifest(scores.ids(), removed, policy);
}

PruneManifest prune_random(std::span<const std::string> ids, const LabelMap* labels, Budget budget,
                           std::uint64_t seed, bool balanced) {
    std::vector<std::string> sorted(ids.begin(), ids.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw ValidationError("duplicate id in random pruning input");
    if (balanced && !labels) throw ValidationError("balanced random pruning requires labels");

    Rng rng(seed);
    std::unordered_set<std::string_view> removed;
    if (balanced) {
        std::map<int, std::vector<std::string_view>> by_class;
        for (const auto& id : sorted) {
            auto it = labels->find(id);
            if (it == labels->end()) throw ValidationError("missing label for id '" + id + "'");
            by_class[it->second].push_back(id);
        }
        std::vector<std::size_t> sizes;
        for (const auto& [label, members] : by_class) sizes.push_back(members.size());
        const auto quota = balanced_quotas(sizes, budget);
        std::size_t c = 0;
        for (auto& [label, members] : by_class) {
            rng.shuffle(std::span(members));
            removed.insert(members.begin(), members.begin() + static_cast<std::ptrdiff_t>(quota[c++]));
        }
    } else {
        const std::size_t total = budget.total(sorted.size());
        std::vector<std::string_view> order(sorted.begin(), sorted.end());
        rng.shuffle(std::span(order));
        removed.insert(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(total));
    }
    auto policy = base_policy(budget, sorted.size(), Direction::keep_high);
    policy.balanced = balanced;
    policy.random = true;
    policy.seed = seed;
    return make_manifest(sorted, removed, policy);
}

double overlap(const PruneManifest& a, const PruneManifest& b) {
    auto universe = [](const PruneManifest& m) {
        std::vector<std::string_view> u(m.kept.begin(), m.kept.end());
        u.insert(u.end(), m.removed.begin(), m.removed.end());
        std::sort(u.begin(), u.end());
        return u;
    };
    if (universe(a) != universe(b)) throw ValidationError("manifests cover different id universes");
    if (a.removed.size() != b.removed.size())
        throw ValidationError("removed sets differ in size: " + std::to_string(a.removed.size()) + " vs " +
                              std::to_string(b.removed.size()));
    if (a.removed.empty()) return 1.0;
    const std::unordered_set<std::string_view> in_b(b.removed.begin(), b.removed.end());
    const auto shared = std::count_if(a.removed.begin(), a.removed.end(),
                                      [&](const std::string& id) { return in_b.count(id) > 0; });
    return static_cast<double>(shared) / static_cast<double>(a.removed.size());
}

}  // namespace prunekit
