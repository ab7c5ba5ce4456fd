#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "prunekit/core/types.hpp"

namespace prunekit {

struct TraceFile {
    std::vector<CertaintyTrace> traces;
    /// Non-fatal findings, e.g. epoch counts that differ between samples.
    std::vector<std::string> warnings;
};

/// Reads a `.traces.jsonl` file. Every invariant violation throws
/// ValidationError with the 1-based line number; nothing is repaired.
TraceFile read_traces(const std::filesystem::path& path);
void write_traces(const std::vector<CertaintyTrace>& traces, const std::filesystem::path& path);

/// Reads a `.scores.jsonl` file: one header line, then one entry per line.
ScoreTable read_scores(const std::filesystem::path& path);
void write_scores(const ScoreTable& table, const std::filesystem::path& path);

/// Dispatches on extension: `.emb` is the binary format, `.emb.jsonl` (or any
/// `.jsonl`) the line format.
EmbeddingSet read_embeddings(const std::filesystem::path& path);
void write_embeddings(const EmbeddingSet& set, const std::filesystem::path& path);

EmbeddingSet read_embeddings_binary(const std::filesystem::path& path);
/// Values are narrowed to float32; throws if a value is not finite in float32.
void write_embeddings_binary(const EmbeddingSet& set, const std::filesystem::path& path);
EmbeddingSet read_embeddings_jsonl(const std::filesystem::path& path);
void write_embeddings_jsonl(const EmbeddingSet& set, const std::filesystem::path& path);

PruneManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const PruneManifest& manifest, const std::filesystem::path& path);

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

}  // namespace prunekit
