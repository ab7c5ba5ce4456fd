#include "prunekit/toytrain/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <json.hpp>

#include "prunekit/error.hpp"
#include "prunekit/rng.hpp"

namespace prunekit::toy {

namespace {

constexpr std::uint64_t kShuffleStream = 1;
constexpr std::uint64_t kTrainAttackStream = 2;
constexpr std::uint64_t kRecordAttackStream = 3;

void check_config(const ToyModel& model, const Dataset& data, const TrainConfig& cfg,
                  const std::optional<AttackConfig>& attack) {
    if (cfg.epochs < 1) throw ValidationError("training needs at least one epoch");
    if (cfg.batch_size < 1) throw ValidationError("batch size must be positive");
    if (!(cfg.learning_rate > 0.0)) throw ValidationError("learning rate must be positive");
    if (!(cfg.momentum >= 0.0 && cfg.momentum < 1.0)) throw ValidationError("momentum must lie in [0, 1)");
    if (data.size() == 0) throw ValidationError("training set is empty");
    if (data.dim != model.input_dim()) throw ValidationError("dataset dimension does not match the model input");
    for (int label : data.labels)
        if (label < 0 || static_cast<std::size_t>(label) >= model.classes())
            throw ValidationError("dataset label " + std::to_string(label) + " exceeds the model's classes");
    const bool adversarial_loss = cfg.loss.kind != LossKind::standard_ce;
    if ((adversarial_loss || cfg.record_adversarial) && !attack)
        throw ValidationError("adversarial training or recording needs an attack configuration");
    if (attack) validate(*attack);
    if (cfg.reuse_train_perturbation && !adversarial_loss)
        throw ValidationError("reusing training perturbations needs an adversarial loss");
}

AttackObjective training_objective(LossKind kind) {
    return kind == LossKind::trades ? AttackObjective::kl : AttackObjective::cross_entropy;
}

}  // namespace

TrainResult train(ToyModel model, const Dataset& data, const TrainConfig& cfg,
                  const std::optional<AttackConfig>& attack) {
    check_config(model, data, cfg, attack);
    const std::size_t n = data.size();
    const std::size_t d = data.dim;
    const bool adversarial_loss = cfg.loss.kind != LossKind::standard_ce;

    Rng shuffle_rng(derive_seed(cfg.seed, kShuffleStream));
    Rng train_attack_rng(derive_seed(cfg.seed, kTrainAttackStream));
    Rng record_attack_rng(derive_seed(cfg.seed, kRecordAttackStream));

    TrainResult result{std::move(model), {}, {}, {}};
    auto& net = result.model;
    auto init_traces = [&](Variant v) {
        std::vector<CertaintyTrace> traces(n);
        for (std::size_t i = 0; i < n; ++i) {
            traces[i] = {data.ids[i], data.labels[i], v, {}};
            traces[i].certainties.reserve(cfg.epochs);
        }
        return traces;
    };
    if (cfg.record_clean) result.clean_traces = init_traces(Variant::clean);
    if (cfg.record_adversarial) result.adversarial_traces = init_traces(Variant::adversarial);

    std::vector<double> velocity(net.parameters().size(), 0.0);
    std::vector<double> last_perturbation = data.inputs;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> batch_x, batch_adv;
    std::vector<int> batch_y;

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        shuffle_rng.shuffle(std::span(order));
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < n; start += cfg.batch_size) {
            const std::size_t end = std::min(n, start + cfg.batch_size);
            batch_x.clear();
            batch_adv.clear();
            batch_y.clear();
            for (std::size_t b = start; b < end; ++b) {
                const std::size_t i = order[b];
                const auto x = data.row(i);
                batch_x.insert(batch_x.end(), x.begin(), x.end());
                batch_y.push_back(data.labels[i]);
                if (adversarial_loss) {
                    const auto adv = pgd_attack(net, x, data.labels[i], *attack, train_attack_rng,
                                                training_objective(cfg.loss.kind));
                    batch_adv.insert(batch_adv.end(), adv.begin(), adv.end());
                    std::copy(adv.begin(), adv.end(), last_perturbation.begin() + static_cast<std::ptrdiff_t>(i * d));
                }
            }
            LossAndGrad lg;
            try {
                lg = loss_and_grads(net, batch_x, batch_y, batch_adv, cfg.loss);
            } catch (const DivergenceError& e) {
                throw DivergenceError("training diverged at epoch " + std::to_string(epoch) + ": " + e.what());
            }
            epoch_loss += lg.loss * static_cast<double>(end - start);
            auto params = net.parameters();
            for (std::size_t p = 0; p < params.size(); ++p) {
                velocity[p] = cfg.momentum * velocity[p] + lg.grad[p];
                params[p] -= cfg.learning_rate * velocity[p];
            }
            if (std::any_of(params.begin(), params.end(), [](double v) { return !std::isfinite(v); }))
                throw DivergenceError("training diverged at epoch " + std::to_string(epoch) +
                                      ": non-finite parameters");
        }

        EpochLog log{epoch, epoch_loss / static_cast<double>(n), 0.0, std::nullopt};
        std::size_t clean_correct = 0, adv_correct = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto x = data.row(i);
            const auto y = static_cast<std::size_t>(data.labels[i]);
            const auto pass = forward_pass(net, x);
            clean_correct += static_cast<std::size_t>(
                std::max_element(pass.probs.begin(), pass.probs.end()) - pass.probs.begin()) == y;
            if (cfg.record_clean) result.clean_traces[i].certainties.push_back(pass.probs[y]);
            if (cfg.record_adversarial) {
                const auto adv = cfg.reuse_train_perturbation
                                     ? std::vector<double>(last_perturbation.begin() + static_cast<std::ptrdiff_t>(i * d),
                                                           last_perturbation.begin() + static_cast<std::ptrdiff_t>((i + 1) * d))
                                     : pgd_attack(net, x, data.labels[i], *attack, record_attack_rng);
                const auto probs = forward(net, adv);
                adv_correct += static_cast<std::size_t>(std::max_element(probs.begin(), probs.end()) - probs.begin()) == y;
                result.adversarial_traces[i].certainties.push_back(probs[y]);
            }
        }
        log.clean_accuracy = static_cast<double>(clean_correct) / static_cast<double>(n);
        if (cfg.record_adversarial) log.adversarial_accuracy = static_cast<double>(adv_correct) / static_cast<double>(n);
        if (!std::isfinite(log.loss))
            throw DivergenceError("training diverged at epoch " + std::to_string(epoch) + ": non-finite loss");
        result.log.push_back(log);
    }
    return result;
}

Evaluation evaluate(const ToyModel& model, const Dataset& data, const std::optional<AttackConfig>& attack,
                    std::uint64_t seed) {
    if (data.size() == 0) throw ValidationError("evaluation set is empty");
    Rng rng(seed);
    std::size_t clean = 0, robust = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto x = data.row(i);
        const int y = data.labels[i];
        const bool ok = predict(model, x) == y;
        clean += ok;
        if (!attack) {
            robust += ok;
            continue;
        }
        robust += predict(model, pgd_attack(model, x, y, *attack, rng)) == y;
    }
    const auto n = static_cast<double>(data.size());
    return {static_cast<double>(clean) / n, static_cast<double>(robust) / n};
}

std::vector<double> robust_accuracy_chain(const ToyModel& model, const Dataset& data,
                                          std::span<const double> epsilons, const AttackConfig& base) {
    if (!std::is_sorted(epsilons.begin(), epsilons.end()))
        throw ValidationError("attack chain epsilons must be non-decreasing");
    if (data.size() == 0) throw ValidationError("evaluation set is empty");
    std::vector<std::size_t> correct(epsilons.size(), 0);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto x = data.row(i);
        const int y = data.labels[i];
        std::vector<double> current(x.begin(), x.end());
        bool fooled = false;
        for (std::size_t e = 0; e < epsilons.size(); ++e) {
            if (!fooled) {
                AttackConfig cfg = base;
                cfg.epsilon = epsilons[e];
                current = pgd_attack_from(model, x, current, y, cfg);
                fooled = predict(model, current) != y;
            }
            correct[e] += !fooled;
        }
    }
    std::vector<double> out;
    for (auto c : correct) out.push_back(static_cast<double>(c) / static_cast<double>(data.size()));
    return out;
}

std::string training_log_json(const TrainResult& result, const TrainConfig& cfg,
                              const std::optional<AttackConfig>& attack) {
    using ojson = nlohmann::ordered_json;
    ojson j;
    ojson c;
    c["epochs"] = cfg.epochs;
    c["batch_size"] = cfg.batch_size;
    c["learning_rate"] = cfg.learning_rate;
    c["momentum"] = cfg.momentum;
    c["loss"] = std::string(to_string(cfg.loss.kind));
    c["trades_beta"] = cfg.loss.trades_beta;
    c["label_smoothing"] = cfg.loss.label_smoothing;
    c["seed"] = cfg.seed;
    c["reuse_train_perturbation"] = cfg.reuse_train_perturbation;
    j["config"] = c;
    if (attack) {
        ojson a;
        a["norm"] = std::string(to_string(attack->norm));
        a["epsilon"] = attack->epsilon;
        a["step_size"] = attack->step_size;
        a["iterations"] = attack->iterations;
        a["random_start"] = attack->random_start;
        j["attack"] = a;
    } else {
        j["attack"] = nullptr;
    }
    ojson epochs = ojson::array();
    for (const auto& e : result.log) {
        ojson row;
        row["epoch"] = e.epoch;
        row["loss"] = e.loss;
        row["clean_accuracy"] = e.clean_accuracy;
        row["adversarial_accuracy"] = e.adversarial_accuracy ? ojson(*e.adversarial_accuracy) : ojson(nullptr);
        epochs.push_back(row);
    }
    j["epochs"] = epochs;
    return j.dump(2) + "\n";
}

}  // namespace prunekit::toy
