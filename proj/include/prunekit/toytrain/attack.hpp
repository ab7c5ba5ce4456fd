#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "prunekit/rng.hpp"
#include "prunekit/toytrain/model.hpp"

namespace prunekit::toy {

enum class Norm { linf, l2 };

std::string_view to_string(Norm n);
Norm parse_norm(std::string_view s);

struct AttackConfig {
    Norm norm = Norm::linf;
    double epsilon = 8.0 / 255.0;
    double step_size = 2.0 / 255.0;
    int iterations = 10;
    bool random_start = false;
};

/// 10-step presets: linf eps 8/255 step 2/255, l2 eps 128/255 step 32/255.
AttackConfig attack_preset(std::string_view name);

/// Throws ValidationError unless eps >= 0, step > 0 and 1 <= iterations <= 1000.
void validate(const AttackConfig& cfg);

enum class AttackObjective {
    /// Maximize CE(f(x~), y).
    cross_entropy,
    /// Maximize KL(f(x) || f(x~)); the inner problem of TRADES.
    kl,
};

/// Projects `x` onto the eps-ball around `origin`, then onto [0, 1]^d.
void project(std::span<double> x, std::span<const double> origin, Norm norm, double epsilon);

/// Projected gradient ascent from `origin` (or a uniform random point in the
/// ball when cfg.random_start, drawn from `rng`). An l2 step with a zero
/// gradient is skipped.
std::vector<double> pgd_attack(const ToyModel& model, std::span<const double> origin, int label,
                               const AttackConfig& cfg, Rng& rng,
                               AttackObjective objective = AttackObjective::cross_entropy);

/// Same iteration, starting from `start` instead of the origin.
std::vector<double> pgd_attack_from(const ToyModel& model, std::span<const double> origin,
                                    std::span<const double> start, int label,
                                    const AttackConfig& cfg,
                                    AttackObjective objective = AttackObjective::cross_entropy);

double perturbation_norm(std::span<const double> a, std::span<const double> b, Norm norm);

}  // namespace prunekit::toy
