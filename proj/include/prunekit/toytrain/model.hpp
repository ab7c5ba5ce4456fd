#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace prunekit::toy {

/// Fully connected classifier: tanh hidden layers, linear logits, softmax.
/// Parameters are stored flat, layer by layer, weights (out x in, row-major)
/// followed by biases.
class ToyModel {
public:
    ToyModel(std::size_t input_dim, std::vector<std::size_t> hidden, std::size_t classes);

    /// Uniform Glorot initialization from `seed`; biases start at zero.
    static ToyModel initialized(std::size_t input_dim, std::vector<std::size_t> hidden,
                                std::size_t classes, std::uint64_t seed);

    std::size_t input_dim() const { return widths_.front(); }
    std::size_t classes() const { return widths_.back(); }
    std::size_t layer_count() const { return widths_.size() - 1; }
    std::size_t in_width(std::size_t layer) const { return widths_[layer]; }
    std::size_t out_width(std::size_t layer) const { return widths_[layer + 1]; }

    std::span<const double> weights(std::size_t layer) const;
    std::span<double> weights(std::size_t layer);
    std::span<const double> bias(std::size_t layer) const;
    std::span<double> bias(std::size_t layer);

    std::span<const double> parameters() const { return params_; }
    std::span<double> parameters() { return params_; }
    std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
    std::size_t bias_offset(std::size_t layer) const {
        return offsets_[layer] + widths_[layer] * widths_[layer + 1];
    }

    bool operator==(const ToyModel&) const = default;

private:
    std::vector<std::size_t> widths_;
    std::vector<std::size_t> offsets_;
    std::vector<double> params_;
};

/// Activations from one forward pass: layers[0] is the input, layers[l] the
/// post-activation output of layer l (logits for the last), probs the softmax.
struct ForwardPass {
    std::vector<std::vector<double>> layers;
    std::vector<double> probs;
};

ForwardPass forward_pass(const ToyModel& model, std::span<const double> x);

/// Class probabilities for input x.
std::vector<double> forward(const ToyModel& model, std::span<const double> x);

/// Predicted class; ties go to the lowest index.
int predict(const ToyModel& model, std::span<const double> x);

/// Backpropagates dL/dlogits through `pass`. Accumulates `scale` times the
/// parameter gradient into `param_grad` (if non-empty) and returns dL/dx.
std::vector<double> backward(const ToyModel& model, const ForwardPass& pass,
                             std::span<const double> logit_grad, double scale,
                             std::span<double> param_grad);

}  // namespace prunekit::toy
