#include "prunekit/extrapolation/knn.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

#include "prunekit/error.hpp"
#include "prunekit/kernels/kernels.hpp"

namespace prunekit {

namespace {

struct FartherFirst {
    bool operator()(const Neighbor& a, const Neighbor& b) const {
        return a.distance != b.distance ? a.distance < b.distance : a.index < b.index;
    }
};

double norm(std::span<const double> v) { return std::sqrt(kernels::dot(v, v)); }

}  // namespace

KnnIndex::KnnIndex(const EmbeddingSet& source, DistanceMetric metric)
    : data_(source.values().begin(), source.values().end()),
      rows_(source.size()),
      dim_(source.dim()),
      metric_(metric) {
    if (metric_ == DistanceMetric::cosine) {
        source.require_nonzero_rows();
        for (std::size_t i = 0; i < rows_; ++i) {
            std::span<double> row(data_.data() + i * dim_, dim_);
            const double n = norm(row);
            for (double& v : row) v /= n;
        }
    }
}

std::vector<Neighbor> KnnIndex::search(std::span<const double> query, std::size_t k) const {
    if (query.size() != dim_)
        throw ValidationError("query has dimension " + std::to_string(query.size()) + ", source has " +
                              std::to_string(dim_));
    if (k < 1) throw ValidationError("k must be at least 1");
    if (k > rows_)
        throw ValidationError("k = " + std::to_string(k) + " exceeds the " + std::to_string(rows_) +
                              " source rows");
    std::vector<double> unit;
    if (metric_ == DistanceMetric::cosine) {
        const double n = norm(query);
        if (n == 0.0) throw ValidationError("zero query vector under cosine distance");
        unit.assign(query.begin(), query.end());
        for (double& v : unit) v /= n;
        query = unit;
    }
    std::priority_queue<Neighbor, std::vector<Neighbor>, FartherFirst> heap;
    for (std::size_t i = 0; i < rows_; ++i) {
        const std::span<const double> row(data_.data() + i * dim_, dim_);
        const double d = metric_ == DistanceMetric::euclidean ? std::sqrt(kernels::squared_l2(query, row))
                                                              : 1.0 - kernels::dot(query, row);
        const Neighbor cand{i, d};
        if (heap.size() < k) {
            heap.push(cand);
        } else if (FartherFirst{}(cand, heap.top())) {
            heap.pop();
            heap.push(cand);
        }
    }
    std::vector<Neighbor> out(heap.size());
    for (std::size_t i = out.size(); i-- > 0;) {
        out[i] = heap.top();
        heap.pop();
    }
    return out;
}

std::vector<std::size_t> knn_indices(const EmbeddingSet& source, std::span<const double> query,
                                     const KnnConfig& cfg) {
    const KnnIndex index(source, cfg.metric);
    std::vector<std::size_t> out;
    for (const auto& nb : index.search(query, cfg.k)) out.push_back(nb.index);
    return out;
}

double distance(std::span<const double> a, std::span<const double> b, DistanceMetric metric) {
    if (metric == DistanceMetric::euclidean) return std::sqrt(kernels::squared_l2(a, b));
    const double na = norm(a), nb = norm(b);
    if (na == 0.0 || nb == 0.0) throw ValidationError("zero vector under cosine distance");
    return 1.0 - kernels::dot(a, b) / (na * nb);
}

}  // namespace prunekit
