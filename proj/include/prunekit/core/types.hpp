#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace prunekit {

enum class Variant { clean, adversarial };
enum class Metric { DU, FP };
enum class Provenance { computed, extrapolated, random };
enum class DistanceMetric { euclidean, cosine };
enum class Direction { keep_high, keep_low };

std::string_view to_string(Variant v);
std::string_view to_string(Metric m);
std::string_view to_string(Provenance p);
std::string_view to_string(DistanceMetric m);
std::string_view to_string(Direction d);

Variant parse_variant(std::string_view s);
Metric parse_metric(std::string_view s);
Provenance parse_provenance(std::string_view s);
DistanceMetric parse_distance_metric(std::string_view s);
Direction parse_direction(std::string_view s);

/// Per-epoch certainty of the true class for one sample (epochs 1..K).
struct CertaintyTrace {
    std::string sample_id;
    int label = 0;
    Variant variant = Variant::clean;
    std::vector<double> certainties;

    std::size_t epochs() const { return certainties.size(); }
    bool operator==(const CertaintyTrace&) const = default;
};

/// Throws ValidationError if the trace breaks an invariant (empty id,
/// negative label, no epochs, certainty outside [0, 1]).
void validate(const CertaintyTrace& trace);

struct ScoreEntry {
    std::string id;
    double score = 0.0;
    bool operator==(const ScoreEntry&) const = default;
};

/// Importance scores keyed by sample id.
///
/// Entries are held sorted by id, so two tables with the same mapping compare
/// equal and serialize to the same bytes regardless of insertion order.
class ScoreTable {
public:
    ScoreTable() = default;
    ScoreTable(Metric metric, std::string params_json, Provenance provenance,
               std::vector<ScoreEntry> entries);

    Metric metric() const { return metric_; }
    Provenance provenance() const { return provenance_; }
    /// Metric parameters as a canonical JSON object string.
    const std::string& params_json() const { return params_json_; }

    std::span<const ScoreEntry> entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    std::optional<double> find(std::string_view id) const;
    /// Throws ValidationError naming the id when it is absent.
    double at(std::string_view id) const;
    bool contains(std::string_view id) const { return find(id).has_value(); }

    std::vector<std::string> ids() const;
    std::vector<double> scores() const;

    bool operator==(const ScoreTable&) const = default;

private:
    Metric metric_ = Metric::DU;
    std::string params_json_ = "{}";
    Provenance provenance_ = Provenance::computed;
    std::vector<ScoreEntry> entries_;
};

inline constexpr std::int32_t kUnlabeled = -1;

/// Row-major n x dim matrix of embeddings aligned with sample ids.
class EmbeddingSet {
public:
    EmbeddingSet() = default;
    EmbeddingSet(std::vector<std::string> ids, std::size_t dim, std::vector<double> values,
                 std::vector<std::int32_t> labels = {});

    std::size_t size() const { return ids_.size(); }
    std::size_t dim() const { return dim_; }
    const std::vector<std::string>& ids() const { return ids_; }
    std::span<const double> row(std::size_t i) const {
        return {values_.data() + i * dim_, dim_};
    }
    std::span<const double> values() const { return values_; }
    /// kUnlabeled for rows without a class.
    const std::vector<std::int32_t>& labels() const { return labels_; }
    bool has_labels() const;

    /// Throws ValidationError if any row is all-zero (cosine distance undefined).
    void require_nonzero_rows() const;

    bool operator==(const EmbeddingSet&) const = default;

private:
    std::vector<std::string> ids_;
    std::size_t dim_ = 0;
    std::vector<double> values_;
    std::vector<std::int32_t> labels_;
};

struct KnnConfig {
    std::size_t k = 1;
    DistanceMetric metric = DistanceMetric::euclidean;
};

struct PrunePolicy {
    double fraction = 0.0;
    std::size_t removed_count = 0;
    Direction direction = Direction::keep_high;
    bool balanced = false;
    bool random = false;
    std::optional<Metric> metric;
    std::optional<std::uint64_t> seed;
    bool operator==(const PrunePolicy&) const = default;
};

struct PruneManifest {
    std::vector<std::string> kept;
    std::vector<std::string> removed;
    PrunePolicy policy;
    bool operator==(const PruneManifest&) const = default;
};

struct SpectralSummary {
    std::string sample_id;
    double band_low = 0.0;
    double band_high = 0.0;
    double du_score = 0.0;
};

}  // namespace prunekit
