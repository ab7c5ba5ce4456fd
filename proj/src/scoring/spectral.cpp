#include "prunekit/scoring/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include <json.hpp>

#include "prunekit/core/io.hpp"
#include "prunekit/error.hpp"
#include "prunekit/kernels/kernels.hpp"
#include "prunekit/parallel.hpp"

namespace prunekit {

namespace {

// |F_m| for m in [lo, hi] by direct evaluation. Twiddles come from a table of
// the K roots of unity indexed by (m * t) mod K; each bin is then two dot
// products with the gathered cosine and sine rows.
std::vector<double> bin_magnitudes(std::span<const double> signal, std::size_t lo, std::size_t hi) {
    const std::size_t k = signal.size();
    std::vector<double> cos_table(k), sin_table(k);
    for (std::size_t j = 0; j < k; ++j) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(k);
        cos_table[j] = std::cos(angle);
        sin_table[j] = std::sin(angle);
    }
    std::vector<double> cos_row(k), sin_row(k), out;
    out.reserve(hi - lo + 1);
    for (std::size_t m = lo; m <= hi; ++m) {
        std::size_t idx = 0;
        for (std::size_t t = 0; t < k; ++t) {
            cos_row[t] = cos_table[idx];
            sin_row[t] = sin_table[idx];
            idx += m;
            if (idx >= k) idx %= k;
        }
        const double re = kernels::dot(signal, cos_row);
        const double im = kernels::dot(signal, sin_row);
        out.push_back(std::hypot(re, im));
    }
    return out;
}

void check_signal(std::span<const double> signal) {
    if (signal.empty()) throw ValidationError("DFT of an empty signal");
    for (double v : signal)
        if (!std::isfinite(v)) throw ValidationError("DFT input contains a non-finite value");
}

double aggregate(std::span<const double> magnitudes, std::size_t k, Aggregation aggregation) {
    double sum = 0.0;
    for (double m : magnitudes) sum += m / static_cast<double>(k);
    return aggregation == Aggregation::sum ? sum : sum / static_cast<double>(magnitudes.size());
}

}  // namespace

std::string_view to_string(Aggregation a) { return a == Aggregation::sum ? "sum" : "mean"; }

Aggregation parse_aggregation(std::string_view s) {
    if (s == "sum") return Aggregation::sum;
    if (s == "mean") return Aggregation::mean;
    throw ValidationError("unknown aggregation '" + std::string(s) + "'");
}

std::vector<double> dft_magnitudes(std::span<const double> signal) {
    check_signal(signal);
    return bin_magnitudes(signal, 0, signal.size() / 2);
}

double band_magnitude(std::span<const double> signal, std::size_t lo, std::size_t hi,
                      Aggregation aggregation) {
    check_signal(signal);
    const std::size_t half = signal.size() / 2;
    if (lo < 1) throw ValidationError("band must start at bin 1 or above (DC excluded)");
    if (lo > hi)
        throw ValidationError("band [" + std::to_string(lo) + ", " + std::to_string(hi) + "] is empty");
    if (lo > half)
        throw ValidationError("band start " + std::to_string(lo) + " exceeds the last bin " +
                              std::to_string(half) + " of a length-" + std::to_string(signal.size()) +
                              " signal");
    const auto mags = bin_magnitudes(signal, lo, std::min(hi, half));
    return aggregate(mags, signal.size(), aggregation);
}

double frequency_pruning_score(std::span<const double> signal, const FpConfig& cfg) {
    const std::size_t hi = cfg.hi == 0 ? signal.size() / 2 : cfg.hi;
    return band_magnitude(signal, cfg.lo, hi, cfg.aggregation);
}

double frequency_pruning_score(const CertaintyTrace& trace, const FpConfig& cfg) {
    try {
        return frequency_pruning_score(trace.certainties, cfg);
    } catch (const ValidationError& e) {
        throw ValidationError("trace '" + trace.sample_id + "': " + e.what());
    }
}

ScoreTable score_traces_fp(std::span<const CertaintyTrace> traces, const FpConfig& cfg) {
    if (!traces.empty()) {
        const std::size_t k = traces.front().epochs();
        for (const auto& t : traces)
            if (t.epochs() != k)
                throw ValidationError("mixed epoch counts: '" + traces.front().sample_id + "' has " +
                                      std::to_string(k) + ", '" + t.sample_id + "' has " +
                                      std::to_string(t.epochs()));
    }
    std::vector<ScoreEntry> entries(traces.size());
    parallel_for(traces.size(), [&](std::size_t i) {
        entries[i] = {traces[i].sample_id, frequency_pruning_score(traces[i], cfg)};
    });
    nlohmann::json params;
    params["lo"] = cfg.lo;
    params["hi"] = cfg.hi == 0 ? nlohmann::json("K/2") : nlohmann::json(cfg.hi);
    params["aggregation"] = std::string(to_string(cfg.aggregation));
    params["normalization"] = "1/K";
    return ScoreTable(Metric::FP, params.dump(), Provenance::computed, std::move(entries));
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size())
        throw ValidationError("pearson: length mismatch " + std::to_string(xs.size()) + " vs " +
                              std::to_string(ys.size()));
    if (xs.size() < 2) throw ValidationError("pearson: need at least two samples");
    const auto n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx, dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw ValidationError("pearson: zero variance input");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

SpectralReport spectral_report(std::span<const CertaintyTrace> traces, const ScoreTable& du_scores,
                               const SpectralBands& bands) {
    if (traces.size() < 2) throw ValidationError("spectral report needs at least two traces");
    SpectralReport report;
    report.rows.resize(traces.size());
    for (std::size_t i = 0; i < traces.size(); ++i) {
        const auto du = du_scores.find(traces[i].sample_id);
        if (!du) throw ValidationError("no DU score for trace '" + traces[i].sample_id + "'");
        report.rows[i].sample_id = traces[i].sample_id;
        report.rows[i].du_score = *du;
    }
    parallel_for(traces.size(), [&](std::size_t i) {
        const auto& c = traces[i].certainties;
        report.rows[i].band_low = band_magnitude(c, bands.low_lo, bands.low_hi, bands.aggregation);
        report.rows[i].band_high = band_magnitude(c, bands.high_lo, bands.high_hi, bands.aggregation);
    });
    std::vector<double> low, high, du;
    for (const auto& r : report.rows) {
        low.push_back(r.band_low);
        high.push_back(r.band_high);
        du.push_back(r.du_score);
    }
    report.r_low = pearson(low, du);
    report.r_high = pearson(high, du);
    return report;
}

std::string spectral_csv(const SpectralReport& report) {
    std::ostringstream out;
    out << "id,du,band_low,band_high\n";
    for (const auto& r : report.rows)
        out << r.sample_id << ',' << format_double(r.du_score) << ',' << format_double(r.band_low) << ','
            << format_double(r.band_high) << '\n';
    return out.str();
}

std::string spectral_footer_json(const SpectralReport& report) {
    nlohmann::ordered_json j;
    j["r_low"] = report.r_low;
    j["r_high"] = report.r_high;
    return j.dump();
}

}  // namespace prunekit
