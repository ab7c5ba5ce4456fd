#include "prunekit/extrapolation/extrapolate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "prunekit/core/io.hpp"
#include "prunekit/error.hpp"
#include "prunekit/parallel.hpp"
#include "prunekit/rng.hpp"

namespace prunekit {

namespace {

constexpr KnnPreset kPresets[] = {
    {"du-l2", {35, DistanceMetric::cosine}},
    {"fp-l2", {24, DistanceMetric::euclidean}},
    {"du-linf", {13, DistanceMetric::cosine}},
    {"fp-linf", {12, DistanceMetric::euclidean}},
};

// Source score per embedding row.
std::vector<double> aligned_scores(const EmbeddingSet& emb, const ScoreTable& scores) {
    std::vector<double> out(emb.size());
    for (std::size_t i = 0; i < emb.size(); ++i) {
        const auto s = scores.find(emb.ids()[i]);
        if (!s) throw ValidationError("missing score for source id '" + emb.ids()[i] + "'");
        out[i] = *s;
    }
    return out;
}

std::size_t count_shared_ids(const EmbeddingSet& a, const EmbeddingSet& b) {
    std::unordered_set<std::string_view> ids(a.ids().begin(), a.ids().end());
    return static_cast<std::size_t>(
        std::count_if(b.ids().begin(), b.ids().end(), [&](const std::string& id) { return ids.count(id) > 0; }));
}

std::string extrapolated_params(const ScoreTable& source, const KnnConfig& cfg) {
    nlohmann::json p;
    p["k"] = cfg.k;
    p["distance"] = std::string(to_string(cfg.metric));
    p["source_params"] = nlohmann::json::parse(source.params_json());
    return p.dump();
}

void check_dims(const EmbeddingSet& a, const EmbeddingSet& b) {
    if (a.dim() != b.dim())
        throw ValidationError("embedding dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                              std::to_string(b.dim()));
}

}  // namespace

double order_free_mean(std::vector<double> values) {
    if (values.empty()) throw ValidationError("mean of an empty set");
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    return std::clamp(sum / static_cast<double>(values.size()), values.front(), values.back());
}

ExtrapolationResult extrapolate_scores(const EmbeddingSet& source_emb, const ScoreTable& source_scores,
                                       const EmbeddingSet& dest_emb, const KnnConfig& cfg) {
    check_dims(source_emb, dest_emb);
    const auto scores = aligned_scores(source_emb, source_scores);
    ExtrapolationResult result;
    if (const auto shared = count_shared_ids(source_emb, dest_emb); shared > 0)
        result.warnings.push_back(std::to_string(shared) + " destination ids also appear in the source set");
    if (cfg.k < 1 || cfg.k > source_emb.size())
        throw ValidationError("k = " + std::to_string(cfg.k) + " must lie in [1, " +
                              std::to_string(source_emb.size()) + "]");
    if (cfg.metric == DistanceMetric::cosine) dest_emb.require_nonzero_rows();

    const KnnIndex index(source_emb, cfg.metric);
    std::vector<ScoreEntry> entries(dest_emb.size());
    parallel_for(dest_emb.size(), [&](std::size_t i) {
        std::vector<double> neighbor_scores;
        neighbor_scores.reserve(cfg.k);
        for (const auto& nb : index.search(dest_emb.row(i), cfg.k)) neighbor_scores.push_back(scores[nb.index]);
        entries[i] = {dest_emb.ids()[i], order_free_mean(std::move(neighbor_scores))};
    });
    result.scores = ScoreTable(source_scores.metric(), extrapolated_params(source_scores, cfg),
                               Provenance::extrapolated, std::move(entries));
    return result;
}

ScoreTable mean_baseline(const ScoreTable& source_scores, std::span<const std::string> dest_ids) {
    if (source_scores.empty()) throw ValidationError("mean baseline of an empty source");
    const double mean = order_free_mean(source_scores.scores());
    std::vector<ScoreEntry> entries;
    entries.reserve(dest_ids.size());
    for (const auto& id : dest_ids) entries.push_back({id, mean});
    nlohmann::json p;
    p["baseline"] = "mean";
    p["source_params"] = nlohmann::json::parse(source_scores.params_json());
    return ScoreTable(source_scores.metric(), p.dump(), Provenance::extrapolated, std::move(entries));
}

double mae(const ScoreTable& predicted, const ScoreTable& truth) {
    const auto p = predicted.entries();
    const auto t = truth.entries();
    if (p.size() != t.size())
        throw ValidationError("MAE over different id sets (" + std::to_string(p.size()) + " vs " +
                              std::to_string(t.size()) + " ids)");
    if (p.empty()) throw ValidationError("MAE over an empty id set");
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i].id != t[i].id) throw ValidationError("MAE id sets differ at '" + p[i].id + "'");
        sum += std::abs(p[i].score - t[i].score);
    }
    return sum / static_cast<double>(p.size());
}

std::span<const KnnPreset> knn_presets() { return kPresets; }

KnnConfig knn_preset(std::string_view name) {
    for (const auto& p : kPresets)
        if (p.name == name) return p.config;
    throw ValidationError("unknown k-NN preset '" + std::string(name) + "'");
}

GridResult grid_search(const GridSpec& spec, const EmbeddingSet& holdout_emb, const ScoreTable& holdout_truth) {
    if (spec.k_values.empty() || spec.metrics.empty() || spec.variants.empty())
        throw ValidationError("grid spec needs at least one k, metric and source variant");
    if (holdout_truth.size() != holdout_emb.size())
        throw ValidationError("holdout truth and embeddings differ in size");
    for (const auto& id : holdout_emb.ids())
        if (!holdout_truth.contains(id)) throw ValidationError("holdout id '" + id + "' has no truth score");

    GridResult result;
    const std::size_t k_max = *std::max_element(spec.k_values.begin(), spec.k_values.end());
    for (const auto& variant : spec.variants) {
        check_dims(variant.embeddings, holdout_emb);
        if (count_shared_ids(variant.embeddings, holdout_emb) > 0)
            throw ValidationError("holdout overlaps source variant '" + variant.name + "'");
        const auto scores = aligned_scores(variant.embeddings, variant.scores);
        if (k_max > variant.embeddings.size() || *std::min_element(spec.k_values.begin(), spec.k_values.end()) < 1)
            throw ValidationError("grid k values must lie in [1, " + std::to_string(variant.embeddings.size()) +
                                  "] for variant '" + variant.name + "'");

        for (DistanceMetric metric : spec.metrics) {
            if (metric == DistanceMetric::cosine) holdout_emb.require_nonzero_rows();
            const KnnIndex index(variant.embeddings, metric);
            // Neighbor lists are ordered, so the top-k for every k is a prefix
            // of the k_max search.
            std::vector<std::vector<double>> neighbor_scores(holdout_emb.size());
            parallel_for(holdout_emb.size(), [&](std::size_t i) {
                for (const auto& nb : index.search(holdout_emb.row(i), k_max))
                    neighbor_scores[i].push_back(scores[nb.index]);
            });
            for (std::size_t k : spec.k_values) {
                std::vector<ScoreEntry> entries(holdout_emb.size());
                for (std::size_t i = 0; i < holdout_emb.size(); ++i)
                    entries[i] = {holdout_emb.ids()[i],
                                  order_free_mean({neighbor_scores[i].begin(), neighbor_scores[i].begin() + k})};
                const ScoreTable predicted(variant.scores.metric(), "{}", Provenance::extrapolated,
                                           std::move(entries));
                result.cells.push_back({variant.name, metric, k, mae(predicted, holdout_truth)});
            }
        }
        result.baselines.push_back(
            {variant.name, mae(mean_baseline(variant.scores, holdout_emb.ids()), holdout_truth)});
    }
    std::sort(result.cells.begin(), result.cells.end(), [](const GridCell& a, const GridCell& b) {
        return std::tie(a.mae, a.source_variant, a.metric, a.k) < std::tie(b.mae, b.source_variant, b.metric, b.k);
    });
    return result;
}

std::string grid_csv(const GridResult& result) {
    std::ostringstream out;
    out << "source_variant,metric,k,mae\n";
    for (const auto& c : result.cells)
        out << c.source_variant << ',' << to_string(c.metric) << ',' << c.k << ',' << format_double(c.mae) << '\n';
    out << "source_variant,baseline_mae\n";
    for (const auto& b : result.baselines) out << b.source_variant << ',' << format_double(b.mae) << '\n';
    return out.str();
}

SourceVariant merge_sources(std::string name, const SourceVariant& a, const SourceVariant& b,
                            std::vector<std::string>& warnings) {
    check_dims(a.embeddings, b.embeddings);
    if (a.scores.metric() != b.scores.metric())
        throw ValidationError("cannot merge " + std::string(to_string(a.scores.metric())) + " and " +
                              std::string(to_string(b.scores.metric())) + " scores");
    std::vector<std::string> ids = a.embeddings.ids();
    ids.insert(ids.end(), b.embeddings.ids().begin(), b.embeddings.ids().end());
    std::vector<double> values(a.embeddings.values().begin(), a.embeddings.values().end());
    values.insert(values.end(), b.embeddings.values().begin(), b.embeddings.values().end());
    std::vector<std::int32_t> labels = a.embeddings.labels();
    labels.insert(labels.end(), b.embeddings.labels().begin(), b.embeddings.labels().end());
    std::vector<ScoreEntry> entries(a.scores.entries().begin(), a.scores.entries().end());
    entries.insert(entries.end(), b.scores.entries().begin(), b.scores.entries().end());

    if (!a.scores.empty() && !b.scores.empty()) {
        const double ma = order_free_mean(a.scores.scores());
        const double mb = order_free_mean(b.scores.scores());
        if (ma > 2.0 * mb || mb > 2.0 * ma)
            warnings.push_back("score scale mismatch merging '" + a.name + "' (mean " + format_double(ma) +
                               ") and '" + b.name + "' (mean " + format_double(mb) + ")");
    }
    return {std::move(name), EmbeddingSet(std::move(ids), a.embeddings.dim(), std::move(values), std::move(labels)),
            ScoreTable(a.scores.metric(), a.scores.params_json(), a.scores.provenance(), std::move(entries))};
}

EmbeddingSet select_rows(const EmbeddingSet& set, std::span<const std::string> ids) {
    std::unordered_map<std::string_view, std::size_t> row_of;
    for (std::size_t i = 0; i < set.size(); ++i) row_of.emplace(set.ids()[i], i);
    std::vector<double> values;
    std::vector<std::int32_t> labels;
    values.reserve(ids.size() * set.dim());
    for (const auto& id : ids) {
        auto it = row_of.find(id);
        if (it == row_of.end()) throw ValidationError("id '" + id + "' not in embedding set");
        const auto r = set.row(it->second);
        values.insert(values.end(), r.begin(), r.end());
        labels.push_back(set.labels()[it->second]);
    }
    return EmbeddingSet({ids.begin(), ids.end()}, set.dim(), std::move(values), std::move(labels));
}

HoldoutSplit split_holdout(const SourceVariant& scored, double fraction, std::uint64_t seed) {
    const std::size_t n = scored.embeddings.size();
    if (!(fraction > 0.0 && fraction < 1.0)) throw ValidationError("holdout fraction must lie in (0, 1)");
    const auto h = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n)));
    if (h == 0 || h == n) throw ValidationError("holdout fraction leaves an empty side");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(std::span(order));
    std::vector<bool> held(n, false);
    for (std::size_t i = 0; i < h; ++i) held[order[i]] = true;
    std::vector<std::string> source_ids, holdout_ids;
    for (std::size_t i = 0; i < n; ++i) (held[i] ? holdout_ids : source_ids).push_back(scored.embeddings.ids()[i]);

    auto pick_scores = [&](const std::vector<std::string>& ids) {
        std::vector<ScoreEntry> e;
        for (const auto& id : ids) e.push_back({id, scored.scores.at(id)});
        return ScoreTable(scored.scores.metric(), scored.scores.params_json(), scored.scores.provenance(),
                          std::move(e));
    };
    return {SourceVariant{scored.name, select_rows(scored.embeddings, source_ids), pick_scores(source_ids)},
            select_rows(scored.embeddings, holdout_ids), pick_scores(holdout_ids)};
}

}  // namespace prunekit
