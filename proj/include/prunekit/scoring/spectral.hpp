#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "prunekit/core/types.hpp"

namespace prunekit {

enum class Aggregation { sum, mean };

std::string_view to_string(Aggregation a);
Aggregation parse_aggregation(std::string_view s);

struct FpConfig {
    std::size_t lo = 1;
    /// 0 means floor(K / 2).
    std::size_t hi = 0;
    Aggregation aggregation = Aggregation::sum;
};

/// One-sided magnitude spectrum |F_m|, m = 0..floor(K/2), of a real signal.
std::vector<double> dft_magnitudes(std::span<const double> signal);

/// Aggregate of |F_m| / K over bins [lo, min(hi, floor(K/2))].
double band_magnitude(std::span<const double> signal, std::size_t lo, std::size_t hi,
                      Aggregation aggregation);

/// Band magnitude over the configured band; the DC bin is never included.
double frequency_pruning_score(std::span<const double> signal, const FpConfig& cfg);
double frequency_pruning_score(const CertaintyTrace& trace, const FpConfig& cfg);

/// All traces must share one epoch count.
ScoreTable score_traces_fp(std::span<const CertaintyTrace> traces, const FpConfig& cfg);

double pearson(std::span<const double> xs, std::span<const double> ys);

struct SpectralBands {
    std::size_t low_lo = 1, low_hi = 10;
    std::size_t high_lo = 11, high_hi = 150;
    Aggregation aggregation = Aggregation::mean;
};

struct SpectralReport {
    std::vector<SpectralSummary> rows;
    double r_low = 0.0;
    double r_high = 0.0;
};

SpectralReport spectral_report(std::span<const CertaintyTrace> traces, const ScoreTable& du_scores,
                               const SpectralBands& bands = {});

/// CSV `id,du,band_low,band_high` with one row per sample.
std::string spectral_csv(const SpectralReport& report);
/// `{"r_high":...,"r_low":...}`
std::string spectral_footer_json(const SpectralReport& report);

}  // namespace prunekit
