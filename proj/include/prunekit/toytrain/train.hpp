#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "prunekit/core/types.hpp"
#include "prunekit/toytrain/attack.hpp"
#include "prunekit/toytrain/dataset.hpp"
#include "prunekit/toytrain/loss.hpp"
#include "prunekit/toytrain/model.hpp"

namespace prunekit::toy {

struct TrainConfig {
    std::size_t epochs = 50;
    std::size_t batch_size = 64;
    double learning_rate = 0.1;
    double momentum = 0.0;
    LossConfig loss;
    std::uint64_t seed = 0;
    bool record_clean = true;
    bool record_adversarial = false;
    /// Record adversarial certainty on the perturbation used in the epoch's
    /// training step instead of a fresh end-of-epoch attack.
    bool reuse_train_perturbation = false;
};

struct EpochLog {
    std::size_t epoch = 0;
    double loss = 0.0;
    double clean_accuracy = 0.0;
    std::optional<double> adversarial_accuracy;
};

struct TrainResult {
    ToyModel model;
    std::vector<CertaintyTrace> clean_traces;
    std::vector<CertaintyTrace> adversarial_traces;
    std::vector<EpochLog> log;
};

/// Mini-batch gradient descent with seed-derived shuffling. At the end of
/// every epoch records p(y | x) (clean) and p(y | x~) for a fresh attack
/// (adversarial), as requested. Single-threaded and bitwise reproducible.
/// Throws DivergenceError with the epoch index on a non-finite loss.
TrainResult train(ToyModel model, const Dataset& data, const TrainConfig& cfg,
                  const std::optional<AttackConfig>& attack);

struct Evaluation {
    double clean_accuracy = 0.0;
    double robust_accuracy = 0.0;
};

/// Robust accuracy uses a CE PGD attack per sample; without an attack it
/// equals clean accuracy.
Evaluation evaluate(const ToyModel& model, const Dataset& data,
                    const std::optional<AttackConfig>& attack, std::uint64_t seed = 0);

/// Robust accuracy for increasing epsilons. Each attack starts from the
/// previous epsilon's adversarial point, and a point already misclassified
/// stays fixed, so the sequence is non-increasing.
std::vector<double> robust_accuracy_chain(const ToyModel& model, const Dataset& data,
                                          std::span<const double> epsilons,
                                          const AttackConfig& base);

std::string training_log_json(const TrainResult& result, const TrainConfig& cfg,
                              const std::optional<AttackConfig>& attack);

}  // namespace prunekit::toy
