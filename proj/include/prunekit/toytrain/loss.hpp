#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "prunekit/toytrain/model.hpp"

namespace prunekit::toy {

enum class LossKind { standard_ce, adversarial_ce, trades };

std::string_view to_string(LossKind k);
LossKind parse_loss_kind(std::string_view s);

struct LossConfig {
    LossKind kind = LossKind::standard_ce;
    double trades_beta = 5.0;
    double label_smoothing = 0.0;
};

struct LossAndGrad {
    double loss = 0.0;
    std::vector<double> grad;
};

/// Cross-entropy of `probs` against the (optionally smoothed) one-hot target.
double cross_entropy(std::span<const double> probs, int label, std::size_t classes,
                     double label_smoothing);

/// KL(p || q) = sum p (log p - log q).
double kl_divergence(std::span<const double> p, std::span<const double> q);

/// Mean loss over a batch and its exact gradient w.r.t. the parameters.
/// `inputs` and `adv_inputs` are row-major batch x dim; the adversarial rows
/// are held fixed (only required for adversarial_ce and trades).
///   standard_ce:    CE(f(x), y)
///   adversarial_ce: CE(f(x~), y)
///   trades:         CE(f(x), y) + beta * KL(f(x) || f(x~))
LossAndGrad loss_and_grads(const ToyModel& model, std::span<const double> inputs,
                           std::span<const int> labels, std::span<const double> adv_inputs,
                           const LossConfig& cfg);

/// Loss value only, same definition as loss_and_grads.
double batch_loss(const ToyModel& model, std::span<const double> inputs,
                  std::span<const int> labels, std::span<const double> adv_inputs,
                  const LossConfig& cfg);

/// Gradient of CE(f(x), y) with respect to x.
std::vector<double> input_grad(const ToyModel& model, std::span<const double> x, int label,
                               double label_smoothing = 0.0);

/// Gradient of KL(clean_probs || f(x)) with respect to x.
std::vector<double> kl_input_grad(const ToyModel& model, std::span<const double> clean_probs,
                                  std::span<const double> x);

}  // namespace prunekit::toy
