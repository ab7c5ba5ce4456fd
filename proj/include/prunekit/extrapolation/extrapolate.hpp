#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "prunekit/core/types.hpp"
#include "prunekit/extrapolation/knn.hpp"

namespace prunekit {

struct ExtrapolationResult {
    ScoreTable scores;
    std::vector<std::string> warnings;
};

/// Each destination id receives the mean score of its k nearest source rows.
ExtrapolationResult extrapolate_scores(const EmbeddingSet& source_emb, const ScoreTable& source_scores,
                                       const EmbeddingSet& dest_emb, const KnnConfig& cfg);

/// Every destination id receives the mean of all source scores.
ScoreTable mean_baseline(const ScoreTable& source_scores, std::span<const std::string> dest_ids);

double mae(const ScoreTable& predicted, const ScoreTable& truth);

/// Mean of values, summed in ascending order so the result is independent of
/// input order, then clamped to [min, max] of the values.
double order_free_mean(std::vector<double> values);

/// Named extrapolation settings for the four metric / threat-model pairs.
struct KnnPreset {
    std::string_view name;
    KnnConfig config;
};
std::span<const KnnPreset> knn_presets();
KnnConfig knn_preset(std::string_view name);

struct SourceVariant {
    std::string name;
    EmbeddingSet embeddings;
    ScoreTable scores;
};

struct GridSpec {
    std::vector<std::size_t> k_values;
    std::vector<DistanceMetric> metrics;
    std::vector<SourceVariant> variants;
};

struct GridCell {
    std::string source_variant;
    DistanceMetric metric;
    std::size_t k;
    double mae;
};

struct GridBaseline {
    std::string source_variant;
    double mae;
};

struct GridResult {
    /// Ascending by MAE; ties by variant, metric, k.
    std::vector<GridCell> cells;
    std::vector<GridBaseline> baselines;
    std::vector<std::string> warnings;
};

GridResult grid_search(const GridSpec& spec, const EmbeddingSet& holdout_emb,
                       const ScoreTable& holdout_truth);

std::string grid_csv(const GridResult& result);

/// Concatenates two id-disjoint sources. Warns when the mean scores differ by
/// more than a factor of two.
SourceVariant merge_sources(std::string name, const SourceVariant& a, const SourceVariant& b,
                            std::vector<std::string>& warnings);

struct HoldoutSplit {
    SourceVariant source;
    EmbeddingSet holdout_emb;
    ScoreTable holdout_truth;
};

/// Moves floor(fraction * n) seeded-random rows of `scored` into a holdout.
HoldoutSplit split_holdout(const SourceVariant& scored, double fraction, std::uint64_t seed);

/// Rows of `set` whose ids are listed, in `ids` order.
EmbeddingSet select_rows(const EmbeddingSet& set, std::span<const std::string> ids);

}  // namespace prunekit
