#include "prunekit/toytrain/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <unordered_set>

#include "prunekit/error.hpp"
#include "prunekit/rng.hpp"

namespace prunekit::toy {

std::vector<std::vector<double>> blob_centers(const BlobConfig& cfg) {
    if (cfg.classes == 0 || cfg.dim == 0 || cfg.n_per_class == 0)
        throw ValidationError("blobs need positive class count, dimension and samples per class");
    if (!(cfg.sigma > 0.0) || !(cfg.separation >= 0.0))
        throw ValidationError("blobs need sigma > 0 and separation >= 0");
    const double chord = cfg.separation * cfg.sigma;
    const auto c_count = static_cast<double>(cfg.classes);
    std::vector<std::vector<double>> centers(cfg.classes, std::vector<double>(cfg.dim, 0.5));
    if (cfg.classes == 1) return centers;
    if (cfg.dim == 1 || cfg.classes == 2) {
        for (std::size_t c = 0; c < cfg.classes; ++c)
            centers[c][0] = 0.5 + (static_cast<double>(c) - (c_count - 1.0) / 2.0) * chord;
    } else {
        const double radius = chord / (2.0 * std::sin(std::numbers::pi / c_count));
        for (std::size_t c = 0; c < cfg.classes; ++c) {
            const double angle = 2.0 * std::numbers::pi * static_cast<double>(c) / c_count;
            centers[c][0] = 0.5 + radius * std::cos(angle);
            centers[c][1] = 0.5 + radius * std::sin(angle);
        }
    }
    for (const auto& center : centers)
        for (double v : center)
            if (v < 0.0 || v > 1.0)
                throw ValidationError("cluster centers leave [0, 1]^d; reduce separation or sigma");
    return centers;
}

Dataset make_blobs(const BlobConfig& cfg) {
    const auto centers = blob_centers(cfg);
    Dataset data;
    data.dim = cfg.dim;
    data.classes = cfg.classes;
    const std::size_t n = cfg.n_per_class * cfg.classes;
    const std::size_t width = std::max<std::size_t>(6, std::to_string(n).size());
    Rng rng(cfg.seed);
    data.inputs.reserve(n * cfg.dim);
    for (std::size_t c = 0; c < cfg.classes; ++c) {
        for (std::size_t i = 0; i < cfg.n_per_class; ++i) {
            std::string index = std::to_string(data.ids.size());
            data.ids.push_back(cfg.id_prefix + std::string(width - index.size(), '0') + index);
            data.labels.push_back(static_cast<int>(c));
            for (std::size_t d = 0; d < cfg.dim; ++d)
                data.inputs.push_back(std::clamp(centers[c][d] + cfg.sigma * rng.normal(), 0.0, 1.0));
        }
    }
    return data;
}

Dataset subset(const Dataset& data, std::span<const std::string> keep) {
    const std::unordered_set<std::string_view> wanted(keep.begin(), keep.end());
    Dataset out;
    out.dim = data.dim;
    out.classes = data.classes;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (!wanted.count(data.ids[i])) continue;
        out.ids.push_back(data.ids[i]);
        out.labels.push_back(data.labels[i]);
        const auto r = data.row(i);
        out.inputs.insert(out.inputs.end(), r.begin(), r.end());
    }
    if (out.size() != wanted.size()) throw ValidationError("subset lists ids that are not in the dataset");
    return out;
}

EmbeddingSet to_embeddings(const Dataset& data) {
    return EmbeddingSet(data.ids, data.dim, data.inputs, {data.labels.begin(), data.labels.end()});
}

}  // namespace prunekit::toy
