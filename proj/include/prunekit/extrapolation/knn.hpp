#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "prunekit/core/types.hpp"

namespace prunekit {

struct Neighbor {
    std::size_t index = 0;
    double distance = 0.0;
    bool operator==(const Neighbor&) const = default;
};

/// Exact brute-force neighbor search over a fixed source set.
///
/// Rows are normalized once at construction for the cosine metric. Results
/// are ordered by ascending distance, then ascending source row index.
class KnnIndex {
public:
    KnnIndex(const EmbeddingSet& source, DistanceMetric metric);

    std::size_t size() const { return rows_; }
    std::size_t dim() const { return dim_; }
    DistanceMetric metric() const { return metric_; }

    std::vector<Neighbor> search(std::span<const double> query, std::size_t k) const;

private:
    std::vector<double> data_;
    std::size_t rows_ = 0;
    std::size_t dim_ = 0;
    DistanceMetric metric_;
};

/// Source row indices of the cfg.k nearest rows to `query`.
std::vector<std::size_t> knn_indices(const EmbeddingSet& source, std::span<const double> query,
                                     const KnnConfig& cfg);

/// Euclidean: ||q - e||; cosine: 1 - q.e / (||q|| ||e||).
double distance(std::span<const double> a, std::span<const double> b, DistanceMetric metric);

}  // namespace prunekit
