#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "prunekit/core/types.hpp"

namespace prunekit::toy {

/// Labeled points in [0, 1]^dim, row-major.
struct Dataset {
    std::vector<std::string> ids;
    std::size_t dim = 0;
    std::size_t classes = 0;
    std::vector<double> inputs;
    std::vector<int> labels;

    std::size_t size() const { return ids.size(); }
    std::span<const double> row(std::size_t i) const { return {inputs.data() + i * dim, dim}; }
};

struct BlobConfig {
    std::size_t n_per_class = 100;
    std::size_t classes = 2;
    std::size_t dim = 2;
    /// Distance between neighboring cluster centers, in units of sigma.
    double separation = 10.0;
    double sigma = 0.05;
    std::uint64_t seed = 0;
    std::string id_prefix = "s";
};

/// Isotropic Gaussian clusters clipped to [0, 1]^dim. Centers sit on a circle
/// around (0.5, ..., 0.5) in the first two coordinates (on a line when
/// dim == 1) and depend only on classes, dim, separation and sigma, so sets
/// drawn with different seeds share their clusters.
Dataset make_blobs(const BlobConfig& cfg);

std::vector<std::vector<double>> blob_centers(const BlobConfig& cfg);

/// Rows whose ids appear in `keep`, in dataset order.
Dataset subset(const Dataset& data, std::span<const std::string> keep);

EmbeddingSet to_embeddings(const Dataset& data);

}  // namespace prunekit::toy
