#include "prunekit/toytrain/attack.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "prunekit/error.hpp"
#include "prunekit/toytrain/loss.hpp"

namespace prunekit::toy {

std::string_view to_string(Norm n) { return n == Norm::linf ? "linf" : "l2"; }

Norm parse_norm(std::string_view s) {
    if (s == "linf") return Norm::linf;
    if (s == "l2") return Norm::l2;
    throw ValidationError("unknown norm '" + std::string(s) + "'");
}

AttackConfig attack_preset(std::string_view name) {
    if (name == "linf") return {Norm::linf, 8.0 / 255.0, 2.0 / 255.0, 10, false};
    if (name == "l2") return {Norm::l2, 128.0 / 255.0, 32.0 / 255.0, 10, false};
    throw ValidationError("unknown attack preset '" + std::string(name) + "'");
}

void validate(const AttackConfig& cfg) {
    if (!(cfg.epsilon >= 0.0) || !std::isfinite(cfg.epsilon)) throw ValidationError("attack epsilon must be >= 0");
    if (!(cfg.step_size > 0.0) || !std::isfinite(cfg.step_size))
        throw ValidationError("attack step size must be > 0");
    if (cfg.iterations < 1 || cfg.iterations > 1000)
        throw ValidationError("attack iterations must lie in [1, 1000]");
}

double perturbation_norm(std::span<const double> a, std::span<const double> b, Norm norm) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = std::abs(a[i] - b[i]);
        acc = norm == Norm::linf ? std::max(acc, d) : acc + d * d;
    }
    return norm == Norm::linf ? acc : std::sqrt(acc);
}

void project(std::span<double> x, std::span<const double> origin, Norm norm, double epsilon) {
    if (norm == Norm::linf) {
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], origin[i] - epsilon, origin[i] + epsilon);
    } else {
        const double n = perturbation_norm(x, origin, Norm::l2);
        if (n > epsilon) {
            const double shrink = epsilon / n;
            for (std::size_t i = 0; i < x.size(); ++i) x[i] = origin[i] + (x[i] - origin[i]) * shrink;
        }
    }
    // Moving a coordinate toward [0, 1] also moves it toward the in-domain origin,
    // so this never leaves the ball.
    for (double& v : x) v = std::clamp(v, 0.0, 1.0);
}

namespace {

std::vector<double> objective_grad(const ToyModel& model, std::span<const double> x, int label,
                                   AttackObjective objective, std::span<const double> clean_probs) {
    return objective == AttackObjective::cross_entropy ? input_grad(model, x, label)
                                                       : kl_input_grad(model, clean_probs, x);
}

}  // namespace

std::vector<double> pgd_attack_from(const ToyModel& model, std::span<const double> origin,
                                    std::span<const double> start, int label, const AttackConfig& cfg,
                                    AttackObjective objective) {
    validate(cfg);
    if (origin.size() != model.input_dim() || start.size() != origin.size())
        throw ValidationError("attack input has the wrong dimension");
    std::vector<double> clean_probs;
    if (objective == AttackObjective::kl) clean_probs = forward(model, origin);
    std::vector<double> x(start.begin(), start.end());
    project(x, origin, cfg.norm, cfg.epsilon);
    for (int it = 0; it < cfg.iterations; ++it) {
        const auto g = objective_grad(model, x, label, objective, clean_probs);
        for (double v : g)
            if (!std::isfinite(v)) throw ValidationError("non-finite input gradient during attack");
        if (cfg.norm == Norm::linf) {
            for (std::size_t i = 0; i < x.size(); ++i)
                x[i] += cfg.step_size * static_cast<double>((g[i] > 0.0) - (g[i] < 0.0));
        } else {
            double norm = 0.0;
            for (double v : g) norm += v * v;
            norm = std::sqrt(norm);
            if (norm == 0.0) continue;
            for (std::size_t i = 0; i < x.size(); ++i) x[i] += cfg.step_size * g[i] / norm;
        }
        project(x, origin, cfg.norm, cfg.epsilon);
    }
    return x;
}

std::vector<double> pgd_attack(const ToyModel& model, std::span<const double> origin, int label,
                               const AttackConfig& cfg, Rng& rng, AttackObjective objective) {
    validate(cfg);
    std::vector<double> start(origin.begin(), origin.end());
    if (cfg.random_start) {
        if (cfg.norm == Norm::linf) {
            for (double& v : start) v += rng.uniform(-cfg.epsilon, cfg.epsilon);
        } else {
            std::vector<double> dir(start.size());
            double norm = 0.0;
            for (double& v : dir) {
                v = rng.normal();
                norm += v * v;
            }
            norm = std::sqrt(norm);
            const double radius = cfg.epsilon * std::pow(rng.uniform(), 1.0 / static_cast<double>(dir.size()));
            if (norm > 0.0)
                for (std::size_t i = 0; i < start.size(); ++i) start[i] += radius * dir[i] / norm;
        }
    } else if (objective == AttackObjective::kl) {
        // The KL objective has zero gradient at the origin; start from a tiny
        // Gaussian offset as TRADES does.
        for (double& v : start) v += 0.001 * rng.normal();
    }
    return pgd_attack_from(model, origin, start, label, cfg, objective);
}

}  // namespace prunekit::toy
