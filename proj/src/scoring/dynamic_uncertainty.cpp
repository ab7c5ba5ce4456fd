#include "prunekit/scoring/dynamic_uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <json.hpp>

#include "prunekit/error.hpp"
#include "prunekit/parallel.hpp"

namespace prunekit {

namespace {

void check_window(std::size_t window, std::size_t epochs) {
    if (window < 2) throw ValidationError("DU window must be at least 2, got " + std::to_string(window));
    if (epochs < window)
        throw ValidationError("trace has " + std::to_string(epochs) + " epochs, fewer than the DU window " +
                              std::to_string(window));
}

// Window std with values visited in sorted order; `scratch` avoids reallocation.
// Values are taken relative to the window minimum, so a constant window gives
// exactly zero.
double window_std(std::span<const double> window, std::vector<double>& scratch) {
    scratch.assign(window.begin(), window.end());
    std::sort(scratch.begin(), scratch.end());
    const double base = scratch.front();
    for (double& v : scratch) v -= base;
    const auto j = static_cast<double>(scratch.size());
    double sum = 0.0;
    for (double v : scratch) sum += v;
    const double mean = sum / j;
    double sq = 0.0;
    for (double v : scratch) sq += (v - mean) * (v - mean);
    return std::sqrt(sq / (j - 1.0));
}

}  // namespace

double du_upper_bound(std::size_t window) {
    const auto j = static_cast<double>(window);
    return 0.5 * std::sqrt(j / (j - 1.0));
}

double prediction_uncertainty(std::span<const double> certainties, std::size_t epoch, std::size_t window) {
    if (window < 2) throw ValidationError("DU window must be at least 2, got " + std::to_string(window));
    if (epoch < window || epoch > certainties.size())
        throw ValidationError("epoch " + std::to_string(epoch) + " outside [" + std::to_string(window) + ", " +
                              std::to_string(certainties.size()) + "]");
    std::vector<double> scratch;
    return window_std(certainties.subspan(epoch - window, window), scratch);
}

double prediction_uncertainty(const CertaintyTrace& trace, std::size_t epoch, std::size_t window) {
    return prediction_uncertainty(trace.certainties, epoch, window);
}

double dynamic_uncertainty(std::span<const double> certainties, const DuConfig& cfg) {
    const std::size_t k_total = certainties.size();
    check_window(cfg.window, k_total);
    if (cfg.paper_denominator && k_total == cfg.window)
        throw ValidationError("denominator K - J is zero for K = J = " + std::to_string(k_total));
    std::vector<double> scratch;
    std::vector<double> per_window;
    per_window.reserve(k_total - cfg.window + 1);
    for (std::size_t end = cfg.window; end <= k_total; ++end)
        per_window.push_back(window_std(certainties.subspan(end - cfg.window, cfg.window), scratch));
    // Summing in sorted order makes the result depend only on the multiset of
    // windows (e.g. exact invariance under time reversal).
    std::sort(per_window.begin(), per_window.end());
    double sum = 0.0;
    for (double p : per_window) sum += p;
    const std::size_t denom = cfg.paper_denominator ? k_total - cfg.window : per_window.size();
    return sum / static_cast<double>(denom);
}

double dynamic_uncertainty(const CertaintyTrace& trace, const DuConfig& cfg) {
    try {
        return dynamic_uncertainty(trace.certainties, cfg);
    } catch (const ValidationError& e) {
        throw ValidationError("trace '" + trace.sample_id + "': " + e.what());
    }
}

ScoreTable score_traces_du(std::span<const CertaintyTrace> traces, const DuConfig& cfg) {
    if (!traces.empty()) {
        const std::size_t k = traces.front().epochs();
        for (const auto& t : traces)
            if (t.epochs() != k)
                throw ValidationError("mixed epoch counts: '" + traces.front().sample_id + "' has " +
                                      std::to_string(k) + ", '" + t.sample_id + "' has " +
                                      std::to_string(t.epochs()));
        check_window(cfg.window, k);
    }
    std::vector<ScoreEntry> entries(traces.size());
    parallel_for(traces.size(), [&](std::size_t i) {
        entries[i] = {traces[i].sample_id, dynamic_uncertainty(traces[i], cfg)};
    });
    nlohmann::json params;
    params["window"] = cfg.window;
    params["denominator"] = cfg.paper_denominator ? "K-J" : "K-J+1";
    return ScoreTable(Metric::DU, params.dump(), Provenance::computed, std::move(entries));
}

}  // namespace prunekit
