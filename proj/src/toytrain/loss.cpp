#include "prunekit/toytrain/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "prunekit/error.hpp"

namespace prunekit::toy {

namespace {

std::vector<double> log_softmax(std::span<const double> logits) {
    const double top = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double z : logits) sum += std::exp(z - top);
    const double log_norm = top + std::log(sum);
    std::vector<double> out(logits.size());
    for (std::size_t c = 0; c < logits.size(); ++c) out[c] = logits[c] - log_norm;
    return out;
}

std::vector<double> target(int label, std::size_t classes, double label_smoothing) {
    std::vector<double> q(classes, label_smoothing / static_cast<double>(classes));
    q[static_cast<std::size_t>(label)] += 1.0 - label_smoothing;
    return q;
}

double ce_from_log(std::span<const double> log_p, std::span<const double> q) {
    double loss = 0.0;
    for (std::size_t c = 0; c < q.size(); ++c)
        if (q[c] > 0.0) loss -= q[c] * log_p[c];
    return loss;
}

double kl_from_log(std::span<const double> p, std::span<const double> log_p, std::span<const double> log_q) {
    double kl = 0.0;
    for (std::size_t c = 0; c < p.size(); ++c)
        if (p[c] > 0.0) kl += p[c] * (log_p[c] - log_q[c]);
    return kl;
}

void check_config(const LossConfig& cfg) {
    if (!(cfg.trades_beta >= 0.0)) throw ValidationError("TRADES beta must be >= 0");
    if (!(cfg.label_smoothing >= 0.0 && cfg.label_smoothing < 1.0))
        throw ValidationError("label smoothing must lie in [0, 1)");
}

void check_label(const ToyModel& model, int label) {
    if (label < 0 || static_cast<std::size_t>(label) >= model.classes())
        throw ValidationError("label " + std::to_string(label) + " outside [0, " + std::to_string(model.classes()) + ")");
}

bool uses_adversarial(LossKind kind) { return kind != LossKind::standard_ce; }

// Shared by loss_and_grads and batch_loss; grad may be empty.
double evaluate_batch(const ToyModel& model, std::span<const double> inputs, std::span<const int> labels,
                      std::span<const double> adv_inputs, const LossConfig& cfg, std::span<double> grad) {
    check_config(cfg);
    const std::size_t d = model.input_dim();
    const std::size_t n = labels.size();
    if (n == 0) throw ValidationError("empty batch");
    if (inputs.size() != n * d) throw ValidationError("batch inputs do not match labels x input dimension");
    if (uses_adversarial(cfg.kind) && adv_inputs.size() != n * d)
        throw ValidationError("adversarial loss needs one perturbed input per sample");
    const double scale = 1.0 / static_cast<double>(n);
    const std::size_t classes = model.classes();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        check_label(model, labels[i]);
        const auto q = target(labels[i], classes, cfg.label_smoothing);
        const auto x = inputs.subspan(i * d, d);
        double loss = 0.0;
        switch (cfg.kind) {
            case LossKind::standard_ce:
            case LossKind::adversarial_ce: {
                const auto pass = forward_pass(model, cfg.kind == LossKind::standard_ce ? x : adv_inputs.subspan(i * d, d));
                loss = ce_from_log(log_softmax(pass.layers.back()), q);
                if (!grad.empty()) {
                    std::vector<double> g(classes);
                    for (std::size_t c = 0; c < classes; ++c) g[c] = pass.probs[c] - q[c];
                    backward(model, pass, g, scale, grad);
                }
                break;
            }
            case LossKind::trades: {
                const auto clean = forward_pass(model, x);
                const auto adv = forward_pass(model, adv_inputs.subspan(i * d, d));
                const auto log_p = log_softmax(clean.layers.back());
                const auto log_pa = log_softmax(adv.layers.back());
                const double kl = kl_from_log(clean.probs, log_p, log_pa);
                loss = ce_from_log(log_p, q) + cfg.trades_beta * kl;
                if (!grad.empty()) {
                    std::vector<double> g_clean(classes), g_adv(classes);
                    for (std::size_t c = 0; c < classes; ++c) {
                        const double p = clean.probs[c];
                        // d KL / d z_clean = p (log p - log p~ - KL); d KL / d z_adv = p~ - p
                        g_clean[c] = p - q[c] + cfg.trades_beta * p * ((log_p[c] - log_pa[c]) - kl);
                        g_adv[c] = cfg.trades_beta * (adv.probs[c] - p);
                    }
                    backward(model, clean, g_clean, scale, grad);
                    backward(model, adv, g_adv, scale, grad);
                }
                break;
            }
        }
        if (!std::isfinite(loss)) throw DivergenceError("non-finite loss for batch sample " + std::to_string(i));
        total += loss;
    }
    return total * scale;
}

}  // namespace

std::string_view to_string(LossKind k) {
    switch (k) {
        case LossKind::standard_ce: return "standard_ce";
        case LossKind::adversarial_ce: return "adversarial_ce";
        case LossKind::trades: return "trades";
    }
    return "?";
}

LossKind parse_loss_kind(std::string_view s) {
    if (s == "standard_ce" || s == "standard") return LossKind::standard_ce;
    if (s == "adversarial_ce" || s == "adversarial") return LossKind::adversarial_ce;
    if (s == "trades") return LossKind::trades;
    throw ValidationError("unknown loss '" + std::string(s) + "'");
}

double cross_entropy(std::span<const double> probs, int label, std::size_t classes, double label_smoothing) {
    const auto q = target(label, classes, label_smoothing);
    double loss = 0.0;
    for (std::size_t c = 0; c < classes; ++c)
        if (q[c] > 0.0) loss -= q[c] * std::log(probs[c]);
    return loss;
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
    double kl = 0.0;
    for (std::size_t c = 0; c < p.size(); ++c)
        if (p[c] > 0.0) kl += p[c] * (std::log(p[c]) - std::log(q[c]));
    return kl;
}

LossAndGrad loss_and_grads(const ToyModel& model, std::span<const double> inputs, std::span<const int> labels,
                           std::span<const double> adv_inputs, const LossConfig& cfg) {
    LossAndGrad out;
    out.grad.assign(model.parameters().size(), 0.0);
    out.loss = evaluate_batch(model, inputs, labels, adv_inputs, cfg, out.grad);
    return out;
}

double batch_loss(const ToyModel& model, std::span<const double> inputs, std::span<const int> labels,
                  std::span<const double> adv_inputs, const LossConfig& cfg) {
    return evaluate_batch(model, inputs, labels, adv_inputs, cfg, {});
}

std::vector<double> input_grad(const ToyModel& model, std::span<const double> x, int label, double label_smoothing) {
    check_label(model, label);
    const auto pass = forward_pass(model, x);
    const auto q = target(label, model.classes(), label_smoothing);
    std::vector<double> g(model.classes());
    for (std::size_t c = 0; c < g.size(); ++c) g[c] = pass.probs[c] - q[c];
    return backward(model, pass, g, 0.0, {});
}

std::vector<double> kl_input_grad(const ToyModel& model, std::span<const double> clean_probs,
                                  std::span<const double> x) {
    const auto pass = forward_pass(model, x);
    if (clean_probs.size() != pass.probs.size()) throw ValidationError("clean probabilities have wrong length");
    std::vector<double> g(pass.probs.size());
    for (std::size_t c = 0; c < g.size(); ++c) g[c] = pass.probs[c] - clean_probs[c];
    return backward(model, pass, g, 0.0, {});
}

}  // namespace prunekit::toy
