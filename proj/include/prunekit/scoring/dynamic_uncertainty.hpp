#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "prunekit/core/types.hpp"

namespace prunekit {

struct DuConfig {
    std::size_t window = 10;
    /// Divide the window sum by K - J instead of the number of windows K - J + 1.
    bool paper_denominator = false;
};

/// Sample standard deviation (divisor J - 1) of the trailing window of J
/// certainties ending at 1-based epoch `epoch`. Window values are summed in
/// sorted order, so the result depends only on the multiset of values.
double prediction_uncertainty(std::span<const double> certainties, std::size_t epoch,
                              std::size_t window);
double prediction_uncertainty(const CertaintyTrace& trace, std::size_t epoch,
                              std::size_t window);

/// Mean of prediction_uncertainty over every window end J..K.
double dynamic_uncertainty(std::span<const double> certainties, const DuConfig& cfg);
double dynamic_uncertainty(const CertaintyTrace& trace, const DuConfig& cfg);

/// Scores every trace; all traces must share one epoch count K >= J.
ScoreTable score_traces_du(std::span<const CertaintyTrace> traces, const DuConfig& cfg);

/// Upper bound 0.5 * sqrt(J / (J - 1)) on any window's sample std over [0, 1].
double du_upper_bound(std::size_t window);

}  // namespace prunekit
