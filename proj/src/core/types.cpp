#include "prunekit/core/types.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

#include "prunekit/error.hpp"

namespace prunekit {

namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view s, const std::pair<std::string_view, Enum> (&table)[N],
                std::string_view what) {
    for (const auto& [name, value] : table)
        if (name == s) return value;
    throw ValidationError("unknown " + std::string(what) + " '" + std::string(s) + "'");
}

constexpr std::pair<std::string_view, Variant> kVariants[] = {{"clean", Variant::clean},
                                                              {"adversarial", Variant::adversarial}};
constexpr std::pair<std::string_view, Metric> kMetrics[] = {{"DU", Metric::DU}, {"FP", Metric::FP}};
constexpr std::pair<std::string_view, Provenance> kProvenances[] = {
    {"computed", Provenance::computed},
    {"extrapolated", Provenance::extrapolated},
    {"random", Provenance::random}};
constexpr std::pair<std::string_view, DistanceMetric> kDistances[] = {
    {"euclidean", DistanceMetric::euclidean}, {"cosine", DistanceMetric::cosine}};
constexpr std::pair<std::string_view, Direction> kDirections[] = {
    {"keep-high", Direction::keep_high}, {"keep-low", Direction::keep_low}};

template <typename Enum, std::size_t N>
std::string_view name_of(Enum v, const std::pair<std::string_view, Enum> (&table)[N]) {
    for (const auto& [name, value] : table)
        if (value == v) return name;
    return "?";
}

}  // namespace

std::string_view to_string(Variant v) { return name_of(v, kVariants); }
std::string_view to_string(Metric m) { return name_of(m, kMetrics); }
std::string_view to_string(Provenance p) { return name_of(p, kProvenances); }
std::string_view to_string(DistanceMetric m) { return name_of(m, kDistances); }
std::string_view to_string(Direction d) { return name_of(d, kDirections); }

Variant parse_variant(std::string_view s) { return parse_enum(s, kVariants, "variant"); }
Metric parse_metric(std::string_view s) {
    if (s == "du") return Metric::DU;
    if (s == "fp") return Metric::FP;
    return parse_enum(s, kMetrics, "metric");
}
Provenance parse_provenance(std::string_view s) { return parse_enum(s, kProvenances, "provenance"); }
DistanceMetric parse_distance_metric(std::string_view s) {
    return parse_enum(s, kDistances, "distance metric");
}
Direction parse_direction(std::string_view s) { return parse_enum(s, kDirections, "direction"); }

void validate(const CertaintyTrace& trace) {
    if (trace.sample_id.empty()) throw ValidationError("trace has an empty sample id");
    if (trace.label < 0)
        throw ValidationError("trace '" + trace.sample_id + "' has negative label " +
                              std::to_string(trace.label));
    if (trace.certainties.empty())
        throw ValidationError("trace '" + trace.sample_id + "' has no epochs");
    for (std::size_t i = 0; i < trace.certainties.size(); ++i) {
        const double c = trace.certainties[i];
        if (!(c >= 0.0 && c <= 1.0))
            throw ValidationError("trace '" + trace.sample_id + "' certainty at index " +
                                  std::to_string(i) + " is outside [0, 1]: " + std::to_string(c));
    }
}

ScoreTable::ScoreTable(Metric metric, std::string params_json, Provenance provenance,
                       std::vector<ScoreEntry> entries)
    : metric_(metric),
      params_json_(std::move(params_json)),
      provenance_(provenance),
      entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end(),
              [](const ScoreEntry& a, const ScoreEntry& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        if (e.id.empty()) throw ValidationError("score entry with empty id");
        if (i > 0 && entries_[i - 1].id == e.id)
            throw ValidationError("duplicate score id '" + e.id + "'");
        if (!std::isfinite(e.score) || e.score < 0.0)
            throw ValidationError("score for '" + e.id + "' must be finite and >= 0, got " +
                                  std::to_string(e.score));
    }
}

std::optional<double> ScoreTable::find(std::string_view id) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), id,
                               [](const ScoreEntry& e, std::string_view key) { return e.id < key; });
    if (it == entries_.end() || it->id != id) return std::nullopt;
    return it->score;
}

double ScoreTable::at(std::string_view id) const {
    if (auto s = find(id)) return *s;
    throw ValidationError("no score for id '" + std::string(id) + "'");
}

std::vector<std::string> ScoreTable::ids() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.id);
    return out;
}

std::vector<double> ScoreTable::scores() const {
    std::vector<double> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.score);
    return out;
}

EmbeddingSet::EmbeddingSet(std::vector<std::string> ids, std::size_t dim, std::vector<double> values,
                           std::vector<std::int32_t> labels)
    : ids_(std::move(ids)), dim_(dim), values_(std::move(values)), labels_(std::move(labels)) {
    if (dim_ == 0) throw ValidationError("embedding dimension must be positive");
    if (values_.size() != ids_.size() * dim_)
        throw ValidationError("embedding matrix has " + std::to_string(values_.size()) +
                              " values, expected " + std::to_string(ids_.size() * dim_));
    if (labels_.empty()) labels_.assign(ids_.size(), kUnlabeled);
    if (labels_.size() != ids_.size())
        throw ValidationError("embedding labels do not match row count");
    std::unordered_set<std::string_view> seen;
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        if (ids_[i].empty()) throw ValidationError("embedding row " + std::to_string(i) + " has an empty id");
        if (!seen.insert(ids_[i]).second)
            throw ValidationError("duplicate embedding id '" + ids_[i] + "' at row " + std::to_string(i));
        if (labels_[i] < kUnlabeled)
            throw ValidationError("embedding row " + std::to_string(i) + " has invalid label");
    }
    for (std::size_t i = 0; i < values_.size(); ++i)
        if (!std::isfinite(values_[i]))
            throw ValidationError("embedding row " + std::to_string(i / dim_) + " has a non-finite value");
}

bool EmbeddingSet::has_labels() const {
    return !labels_.empty() &&
           std::none_of(labels_.begin(), labels_.end(), [](auto l) { return l == kUnlabeled; });
}

void EmbeddingSet::require_nonzero_rows() const {
    for (std::size_t i = 0; i < size(); ++i) {
        const auto r = row(i);
        if (std::all_of(r.begin(), r.end(), [](double v) { return v == 0.0; }))
            throw ValidationError("embedding row " + std::to_string(i) + " ('" + ids_[i] +
                                  "') is all-zero; cosine distance is undefined");
    }
}

}  // namespace prunekit
