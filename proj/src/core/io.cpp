#include "prunekit/core/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "prunekit/error.hpp"

namespace prunekit {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

std::ifstream open_in(const fs::path& path, std::ios::openmode mode = std::ios::in) {
    std::ifstream in(path, mode);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    return in;
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream out(path, mode | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    return out;
}

void finish(std::ofstream& out, const fs::path& path) {
    out.flush();
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

[[noreturn]] void fail_line(const fs::path& path, std::size_t line, const std::string& what) {
    throw ValidationError(path.string() + ":" + std::to_string(line) + ": " + what);
}

json parse_line(const fs::path& path, std::size_t line_no, const std::string& line) {
    if (line.empty()) fail_line(path, line_no, "empty line");
    try {
        json j = json::parse(line);
        if (!j.is_object()) fail_line(path, line_no, "expected a JSON object");
        return j;
    } catch (const json::parse_error& e) {
        fail_line(path, line_no, std::string("malformed JSON: ") + e.what());
    }
}

template <typename Fn>
void for_each_line(std::istream& in, Fn&& fn) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        fn(line_no, line);
    }
}

double number_field(const json& j, const char* key, const fs::path& path, std::size_t line_no) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_number())
        fail_line(path, line_no, std::string("missing numeric field '") + key + "'");
    return it->get<double>();
}

std::string string_field(const json& j, const char* key, const fs::path& path, std::size_t line_no) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string())
        fail_line(path, line_no, std::string("missing string field '") + key + "'");
    return it->get<std::string>();
}

std::int64_t int_field(const json& j, const char* key, const fs::path& path, std::size_t line_no) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_number_integer())
        fail_line(path, line_no, std::string("missing integer field '") + key + "'");
    return it->get<std::int64_t>();
}

void put_u32(std::string& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

std::uint32_t get_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

bool ends_with(const std::string& s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

std::string format_double(double value) {
    std::array<char, 32> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), end);
}

// ---------------------------------------------------------------- traces

TraceFile read_traces(const fs::path& path) {
    auto in = open_in(path);
    TraceFile out;
    std::unordered_set<std::string> seen;
    std::map<std::size_t, std::size_t> epoch_counts;
    for_each_line(in, [&](std::size_t line_no, const std::string& line) {
        const json j = parse_line(path, line_no, line);
        CertaintyTrace t;
        t.sample_id = string_field(j, "id", path, line_no);
        const auto label = int_field(j, "label", path, line_no);
        if (label < 0 || label > std::numeric_limits<int>::max())
            fail_line(path, line_no, "label out of range for '" + t.sample_id + "'");
        t.label = static_cast<int>(label);
        try {
            t.variant = parse_variant(string_field(j, "variant", path, line_no));
        } catch (const ValidationError& e) {
            fail_line(path, line_no, e.what());
        }
        auto it = j.find("certainties");
        if (it == j.end() || !it->is_array())
            fail_line(path, line_no, "missing array field 'certainties'");
        t.certainties.reserve(it->size());
        for (const auto& v : *it) {
            if (!v.is_number()) fail_line(path, line_no, "non-numeric certainty for '" + t.sample_id + "'");
            t.certainties.push_back(v.get<double>());
        }
        try {
            validate(t);
        } catch (const ValidationError& e) {
            fail_line(path, line_no, e.what());
        }
        if (!seen.insert(t.sample_id).second)
            fail_line(path, line_no, "duplicate sample id '" + t.sample_id + "'");
        ++epoch_counts[t.epochs()];
        out.traces.push_back(std::move(t));
    });
    if (epoch_counts.size() > 1) {
        std::ostringstream msg;
        msg << path.string() << ": traces have differing epoch counts (";
        bool first = true;
        for (const auto& [k, count] : epoch_counts) {
            msg << (first ? "" : ", ") << "K=" << k << ": " << count;
            first = false;
        }
        msg << ")";
        out.warnings.push_back(msg.str());
    }
    return out;
}

void write_traces(const std::vector<CertaintyTrace>& traces, const fs::path& path) {
    std::unordered_set<std::string_view> seen;
    for (const auto& t : traces) {
        validate(t);
        if (!seen.insert(t.sample_id).second)
            throw ValidationError("duplicate sample id '" + t.sample_id + "'");
    }
    auto out = open_out(path, std::ios::binary);
    for (const auto& t : traces) {
        ordered_json j;
        j["id"] = t.sample_id;
        j["label"] = t.label;
        j["variant"] = std::string(to_string(t.variant));
        j["certainties"] = t.certainties;
        out << j.dump() << '\n';
    }
    finish(out, path);
}

// ---------------------------------------------------------------- scores

ScoreTable read_scores(const fs::path& path) {
    auto in = open_in(path);
    std::optional<Metric> metric;
    std::string params = "{}";
    Provenance provenance = Provenance::computed;
    std::vector<ScoreEntry> entries;
    std::unordered_set<std::string> seen;
    for_each_line(in, [&](std::size_t line_no, const std::string& line) {
        const json j = parse_line(path, line_no, line);
        try {
            if (line_no == 1) {
                metric = parse_metric(string_field(j, "metric", path, line_no));
                if (auto it = j.find("params"); it != j.end()) {
                    if (!it->is_object()) fail_line(path, line_no, "'params' must be an object");
                    params = it->dump();
                }
                provenance = parse_provenance(string_field(j, "provenance", path, line_no));
                return;
            }
        } catch (const ValidationError& e) {
            const std::string what = e.what();
            if (what.rfind(path.string(), 0) == 0) throw;
            fail_line(path, line_no, what);
        }
        ScoreEntry e{string_field(j, "id", path, line_no), number_field(j, "score", path, line_no)};
        if (e.id.empty()) fail_line(path, line_no, "empty id");
        if (!std::isfinite(e.score) || e.score < 0.0)
            fail_line(path, line_no, "score for '" + e.id + "' must be finite and >= 0");
        if (!seen.insert(e.id).second) fail_line(path, line_no, "duplicate id '" + e.id + "'");
        entries.push_back(std::move(e));
    });
    if (!metric) throw ValidationError(path.string() + ": missing header line");
    return ScoreTable(*metric, params, provenance, std::move(entries));
}

void write_scores(const ScoreTable& table, const fs::path& path) {
    auto out = open_out(path, std::ios::binary);
    ordered_json header;
    header["metric"] = std::string(to_string(table.metric()));
    header["params"] = json::parse(table.params_json());
    header["provenance"] = std::string(to_string(table.provenance()));
    out << header.dump() << '\n';
    for (const auto& e : table.entries()) {
        ordered_json j;
        j["id"] = e.id;
        j["score"] = e.score;
        out << j.dump() << '\n';
    }
    finish(out, path);
}

// ---------------------------------------------------------------- embeddings

EmbeddingSet read_embeddings(const fs::path& path) {
    return ends_with(path.string(), ".jsonl") ? read_embeddings_jsonl(path)
                                              : read_embeddings_binary(path);
}

void write_embeddings(const EmbeddingSet& set, const fs::path& path) {
    if (ends_with(path.string(), ".jsonl"))
        write_embeddings_jsonl(set, path);
    else
        write_embeddings_binary(set, path);
}

EmbeddingSet read_embeddings_binary(const fs::path& path) {
    auto in = open_in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed for '" + path.string() + "'");
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    const std::size_t size = bytes.size();
    auto bad = [&](const std::string& what) -> ValidationError {
        return ValidationError(path.string() + ": " + what);
    };
    if (size < 12 || std::memcmp(p, "EMB1", 4) != 0) throw bad("missing EMB1 magic");
    const std::size_t n = get_u32(p + 4);
    const std::size_t dim = get_u32(p + 8);
    if (dim == 0) throw bad("dimension is zero");
    std::size_t pos = 12;
    const std::size_t value_bytes = n * dim * 4;
    if (size - pos < value_bytes)
        throw bad("file ends inside row " + std::to_string((size - pos) / (dim * 4)) + " of " +
                  std::to_string(n) + " (dim " + std::to_string(dim) + ")");
    std::vector<double> values(n * dim);
    for (std::size_t i = 0; i < n * dim; ++i, pos += 4) {
        const float f = std::bit_cast<float>(get_u32(p + pos));
        if (!std::isfinite(f)) throw bad("non-finite value in row " + std::to_string(i / dim));
        values[i] = static_cast<double>(f);
    }
    std::vector<std::string> ids;
    ids.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto* nl = static_cast<const unsigned char*>(std::memchr(p + pos, '\n', size - pos));
        if (!nl) throw bad("missing id for row " + std::to_string(i));
        ids.emplace_back(reinterpret_cast<const char*>(p + pos), static_cast<std::size_t>(nl - (p + pos)));
        pos = static_cast<std::size_t>(nl - p) + 1;
    }
    if (size - pos != n * 4)
        throw bad("label block has " + std::to_string(size - pos) + " bytes, expected " +
                  std::to_string(n * 4));
    std::vector<std::int32_t> labels(n);
    for (std::size_t i = 0; i < n; ++i, pos += 4)
        labels[i] = std::bit_cast<std::int32_t>(get_u32(p + pos));
    try {
        return EmbeddingSet(std::move(ids), dim, std::move(values), std::move(labels));
    } catch (const ValidationError& e) {
        throw bad(e.what());
    }
}

void write_embeddings_binary(const EmbeddingSet& set, const fs::path& path) {
    if (set.size() > std::numeric_limits<std::uint32_t>::max() ||
        set.dim() > std::numeric_limits<std::uint32_t>::max())
        throw ValidationError("embedding set too large for the binary format");
    std::string buf;
    buf.reserve(12 + set.values().size() * 4 + set.size() * 16);
    buf.append("EMB1");
    put_u32(buf, static_cast<std::uint32_t>(set.size()));
    put_u32(buf, static_cast<std::uint32_t>(set.dim()));
    for (double v : set.values()) {
        const auto f = static_cast<float>(v);
        if (!std::isfinite(f)) throw ValidationError("embedding value overflows float32");
        put_u32(buf, std::bit_cast<std::uint32_t>(f));
    }
    for (const auto& id : set.ids()) {
        if (id.find('\n') != std::string::npos)
            throw ValidationError("embedding id contains a newline: '" + id + "'");
        buf.append(id);
        buf.push_back('\n');
    }
    for (auto label : set.labels()) put_u32(buf, std::bit_cast<std::uint32_t>(label));
    auto out = open_out(path, std::ios::binary);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    finish(out, path);
}

EmbeddingSet read_embeddings_jsonl(const fs::path& path) {
    auto in = open_in(path);
    std::vector<std::string> ids;
    std::vector<double> values;
    std::vector<std::int32_t> labels;
    std::optional<std::size_t> dim;
    std::size_t row = 0;
    for_each_line(in, [&](std::size_t line_no, const std::string& line) {
        const json j = parse_line(path, line_no, line);
        if (line_no == 1 && j.contains("dim") && !j.contains("vector")) {
            const auto d = int_field(j, "dim", path, line_no);
            if (d <= 0) fail_line(path, line_no, "dimension must be positive");
            dim = static_cast<std::size_t>(d);
            return;
        }
        auto it = j.find("vector");
        if (it == j.end() || !it->is_array()) fail_line(path, line_no, "missing array field 'vector'");
        if (!dim) dim = it->size();
        if (it->size() != *dim)
            fail_line(path, line_no, "row " + std::to_string(row) + " has " + std::to_string(it->size()) +
                                         " values, expected dim " + std::to_string(*dim));
        for (const auto& v : *it) {
            if (!v.is_number()) fail_line(path, line_no, "non-numeric value in row " + std::to_string(row));
            values.push_back(v.get<double>());
        }
        ids.push_back(string_field(j, "id", path, line_no));
        std::int32_t label = kUnlabeled;
        if (auto l = j.find("label"); l != j.end() && !l->is_null()) {
            if (!l->is_number_integer() || l->get<std::int64_t>() < kUnlabeled ||
                l->get<std::int64_t>() > std::numeric_limits<std::int32_t>::max())
                fail_line(path, line_no, "invalid label in row " + std::to_string(row));
            label = static_cast<std::int32_t>(l->get<std::int64_t>());
        }
        labels.push_back(label);
        ++row;
    });
    if (!dim) throw ValidationError(path.string() + ": no embedding rows and no dim header");
    try {
        return EmbeddingSet(std::move(ids), *dim, std::move(values), std::move(labels));
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

void write_embeddings_jsonl(const EmbeddingSet& set, const fs::path& path) {
    auto out = open_out(path, std::ios::binary);
    out << "{\"dim\":" << set.dim() << "}\n";
    for (std::size_t i = 0; i < set.size(); ++i) {
        ordered_json j;
        j["id"] = set.ids()[i];
        if (set.labels()[i] == kUnlabeled)
            j["label"] = nullptr;
        else
            j["label"] = set.labels()[i];
        const auto r = set.row(i);
        j["vector"] = std::vector<double>(r.begin(), r.end());
        out << j.dump() << '\n';
    }
    finish(out, path);
}

// ---------------------------------------------------------------- manifests

PruneManifest read_manifest(const fs::path& path) {
    auto in = open_in(path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ValidationError(path.string() + ": malformed manifest: " + e.what());
    }
    PruneManifest m;
    try {
        m.kept = j.at("kept").get<std::vector<std::string>>();
        m.removed = j.at("removed").get<std::vector<std::string>>();
        const auto& p = j.at("policy");
        m.policy.fraction = p.at("fraction").get<double>();
        m.policy.removed_count = p.at("removed_count").get<std::size_t>();
        m.policy.direction = parse_direction(p.at("direction").get<std::string>());
        m.policy.balanced = p.at("balanced").get<bool>();
        m.policy.random = p.at("random").get<bool>();
        if (p.contains("metric") && !p["metric"].is_null())
            m.policy.metric = parse_metric(p["metric"].get<std::string>());
        if (p.contains("seed") && !p["seed"].is_null()) m.policy.seed = p["seed"].get<std::uint64_t>();
    } catch (const json::exception& e) {
        throw ValidationError(path.string() + ": malformed manifest: " + e.what());
    }
    std::unordered_set<std::string_view> kept(m.kept.begin(), m.kept.end());
    if (kept.size() != m.kept.size()) throw ValidationError(path.string() + ": duplicate id in kept");
    std::unordered_set<std::string_view> removed;
    for (const auto& id : m.removed) {
        if (kept.count(id) || !removed.insert(id).second)
            throw ValidationError(path.string() + ": id '" + id + "' listed twice");
    }
    if (m.policy.removed_count != m.removed.size())
        throw ValidationError(path.string() + ": policy removed_count disagrees with removed list");
    return m;
}

void write_manifest(const PruneManifest& manifest, const fs::path& path) {
    ordered_json j;
    j["kept"] = manifest.kept;
    j["removed"] = manifest.removed;
    ordered_json p;
    p["fraction"] = manifest.policy.fraction;
    p["removed_count"] = manifest.policy.removed_count;
    p["direction"] = std::string(to_string(manifest.policy.direction));
    p["balanced"] = manifest.policy.balanced;
    p["random"] = manifest.policy.random;
    p["metric"] = manifest.policy.metric ? json(std::string(to_string(*manifest.policy.metric))) : json(nullptr);
    p["seed"] = manifest.policy.seed ? json(*manifest.policy.seed) : json(nullptr);
    j["policy"] = p;
    auto out = open_out(path, std::ios::binary);
    out << j.dump(2) << '\n';
    finish(out, path);
}

}  // namespace prunekit
