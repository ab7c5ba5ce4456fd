#include "prunekit/toytrain/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "prunekit/error.hpp"
#include "prunekit/kernels/kernels.hpp"
#include "prunekit/rng.hpp"

namespace prunekit::toy {

ToyModel::ToyModel(std::size_t input_dim, std::vector<std::size_t> hidden, std::size_t classes) {
    widths_.push_back(input_dim);
    widths_.insert(widths_.end(), hidden.begin(), hidden.end());
    widths_.push_back(classes);
    if (std::any_of(widths_.begin(), widths_.end(), [](std::size_t w) { return w == 0; }))
        throw ValidationError("model layer widths must be positive");
    if (classes < 2) throw ValidationError("model needs at least two classes");
    std::size_t offset = 0;
    for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
        offsets_.push_back(offset);
        offset += widths_[l] * widths_[l + 1] + widths_[l + 1];
    }
    params_.assign(offset, 0.0);
}

ToyModel ToyModel::initialized(std::size_t input_dim, std::vector<std::size_t> hidden, std::size_t classes,
                               std::uint64_t seed) {
    ToyModel model(input_dim, std::move(hidden), classes);
    Rng rng(seed);
    for (std::size_t l = 0; l < model.layer_count(); ++l) {
        const double a = std::sqrt(6.0 / static_cast<double>(model.in_width(l) + model.out_width(l)));
        for (double& w : model.weights(l)) w = rng.uniform(-a, a);
    }
    return model;
}

std::span<const double> ToyModel::weights(std::size_t layer) const {
    return {params_.data() + weight_offset(layer), widths_[layer] * widths_[layer + 1]};
}
std::span<double> ToyModel::weights(std::size_t layer) {
    return {params_.data() + weight_offset(layer), widths_[layer] * widths_[layer + 1]};
}
std::span<const double> ToyModel::bias(std::size_t layer) const {
    return {params_.data() + bias_offset(layer), widths_[layer + 1]};
}
std::span<double> ToyModel::bias(std::size_t layer) {
    return {params_.data() + bias_offset(layer), widths_[layer + 1]};
}

ForwardPass forward_pass(const ToyModel& model, std::span<const double> x) {
    if (x.size() != model.input_dim())
        throw ValidationError("input has dimension " + std::to_string(x.size()) + ", model expects " +
                              std::to_string(model.input_dim()));
    ForwardPass pass;
    pass.layers.reserve(model.layer_count() + 1);
    pass.layers.emplace_back(x.begin(), x.end());
    for (std::size_t l = 0; l < model.layer_count(); ++l) {
        const auto w = model.weights(l);
        const auto b = model.bias(l);
        const std::size_t in = model.in_width(l);
        std::vector<double> out(model.out_width(l));
        for (std::size_t o = 0; o < out.size(); ++o) {
            const double z = kernels::dot(w.subspan(o * in, in), pass.layers.back()) + b[o];
            out[o] = l + 1 < model.layer_count() ? std::tanh(z) : z;
        }
        pass.layers.push_back(std::move(out));
    }
    const auto& logits = pass.layers.back();
    const double top = *std::max_element(logits.begin(), logits.end());
    pass.probs.resize(logits.size());
    double sum = 0.0;
    for (std::size_t c = 0; c < logits.size(); ++c) sum += pass.probs[c] = std::exp(logits[c] - top);
    for (double& p : pass.probs) p /= sum;
    return pass;
}

std::vector<double> forward(const ToyModel& model, std::span<const double> x) {
    return forward_pass(model, x).probs;
}

int predict(const ToyModel& model, std::span<const double> x) {
    const auto pass = forward_pass(model, x);
    const auto& logits = pass.layers.back();
    return static_cast<int>(std::max_element(logits.begin(), logits.end()) - logits.begin());
}

std::vector<double> backward(const ToyModel& model, const ForwardPass& pass, std::span<const double> logit_grad,
                             double scale, std::span<double> param_grad) {
    std::vector<double> delta(logit_grad.begin(), logit_grad.end());
    std::vector<double> grad_in;
    for (std::size_t l = model.layer_count(); l-- > 0;) {
        const auto& h_in = pass.layers[l];
        const std::size_t in = model.in_width(l);
        const auto w = model.weights(l);
        if (!param_grad.empty()) {
            auto gw = param_grad.subspan(model.weight_offset(l), in * delta.size());
            auto gb = param_grad.subspan(model.bias_offset(l), delta.size());
            for (std::size_t o = 0; o < delta.size(); ++o) {
                kernels::axpy(scale * delta[o], h_in, gw.subspan(o * in, in));
                gb[o] += scale * delta[o];
            }
        }
        grad_in.assign(in, 0.0);
        for (std::size_t o = 0; o < delta.size(); ++o) kernels::axpy(delta[o], w.subspan(o * in, in), grad_in);
        if (l > 0) {
            // h_in = tanh(z), so dtanh/dz = 1 - h_in^2
            for (std::size_t i = 0; i < in; ++i) grad_in[i] *= 1.0 - h_in[i] * h_in[i];
            delta = grad_in;
        }
    }
    return grad_in;
}

}  // namespace prunekit::toy
