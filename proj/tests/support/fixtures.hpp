#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "prunekit/core/types.hpp"

namespace fixture {

class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("prunekit-test-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string operator/(const std::string& name) const { return (path_ / name).string(); }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

inline std::string id(std::size_t i) {
    std::string s = std::to_string(i);
    return "x" + std::string(s.size() < 5 ? 5 - s.size() : 0, '0') + s;
}

inline std::vector<double> random_trace(std::mt19937_64& gen, std::size_t K) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> p(K);
    for (auto& v : p) v = u(gen);
    return p;
}

inline prunekit::ScoreTable scores(const std::vector<std::pair<std::string, double>>& pairs,
                                   prunekit::Metric metric = prunekit::Metric::DU) {
    std::vector<prunekit::ScoreEntry> e;
    for (const auto& [k, v] : pairs) e.push_back({k, v});
    return {metric, "{}", prunekit::Provenance::computed, std::move(e)};
}

}  // namespace fixture
