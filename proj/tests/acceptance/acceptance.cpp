// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "prunekit/cli/cli.hpp"
#include "prunekit/core/io.hpp"
#include "prunekit/extrapolation/extrapolate.hpp"
#include "prunekit/extrapolation/knn.hpp"
#include "prunekit/pruning/prune.hpp"
#include "prunekit/scoring/dynamic_uncertainty.hpp"
#include "prunekit/scoring/spectral.hpp"
#include "prunekit/toytrain/train.hpp"
#include "support/fixtures.hpp"
#include "support/gradcheck.hpp"
#include "support/oracles.hpp"

using namespace prunekit;

namespace {

struct Verdict {
    bool ok = true;
    std::string detail;
};

struct Criterion {
    int number;
    std::string title;
    double time_limit_s;  // 0 = untimed
    std::function<Verdict()> body;
};

std::string fmt(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

// 1 -------------------------------------------------------------------------
Verdict exact_du() {
    Verdict v;
    auto expect = [&](const std::vector<double>& p, std::size_t J, double want) {
        const double got = dynamic_uncertainty(p, {J});
        if (std::abs(got - want) > 1e-12) {
            v.ok = false;
            v.detail += "DU=" + fmt(got, 17) + " want " + fmt(want, 17) + "; ";
        }
    };
    expect(std::vector<double>(20, 0.7), 10, 0.0);
    expect({0, 1, 0, 1}, 2, 0.7071067811865476);
    expect({0.1, 0.2, 0.3, 0.4}, 2, 0.07071067811865478);
    for (std::size_t J : {2, 5, 10})
        for (double c : {0.0, 0.3, 1.0}) expect(std::vector<double>(40, c), J, 0.0);
    if (v.ok) v.detail = "3 hand examples + constant traces for J in {2,5,10}";
    return v;
}

// 2 -------------------------------------------------------------------------
Verdict du_properties() {
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t reversal_fail = 0, affine_fail = 0;
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        auto p = fixture::random_trace(gen, 150);
        const double du = dynamic_uncertainty(p, {10});
        auto r = p;
        std::reverse(r.begin(), r.end());
        if (dynamic_uncertainty(r, {10}) != du) ++reversal_fail;
        const double a = (u(gen) - 0.5) * 1.6;
        const double b = a >= 0 ? u(gen) * (1 - a) : -a + u(gen) * (1 + a);
        std::vector<double> q(p.size());
        for (std::size_t t = 0; t < p.size(); ++t) q[t] = std::clamp(a * p[t] + b, 0.0, 1.0);
        const double err = oracle::rel_err(dynamic_uncertainty(q, {10}), std::abs(a) * du, 1e-300);
        worst = std::max(worst, err);
        if (err > 1e-12) ++affine_fail;
    }
    return {reversal_fail == 0 && affine_fail == 0, "1000 traces K=150 J=10; reversal mismatches " +
                                                        std::to_string(reversal_fail) + ", affine worst rel err " +
                                                        fmt(worst)};
}

// 3 -------------------------------------------------------------------------
Verdict dft_correctness() {
    std::mt19937_64 gen(3);
    double worst_bin = 0.0, worst_parseval = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const std::size_t K = 2 + gen() % 255;
        auto s = fixture::random_trace(gen, K);
        const auto got = dft_magnitudes(s);
        const auto want = oracle::dft_magnitudes(s);
        const double scale = *std::max_element(want.begin(), want.end());
        for (std::size_t m = 0; m < want.size(); ++m) worst_bin = std::max(worst_bin, std::abs(got[m] - want[m]) / scale);
        double energy = 0.0, spectral = got[0] * got[0];
        for (double x : s) energy += x * x;
        for (std::size_t m = 1; m < got.size(); ++m)
            spectral += (K % 2 == 0 && m == K / 2 ? 1.0 : 2.0) * got[m] * got[m];
        worst_parseval = std::max(worst_parseval, oracle::rel_err(spectral / static_cast<double>(K), energy));
    }
    return {worst_bin <= 1e-9 && worst_parseval <= 1e-9,
            "1000 signals K in [2,256]; worst bin rel err " + fmt(worst_bin) + ", Parseval " + fmt(worst_parseval)};
}

// 4 -------------------------------------------------------------------------
Verdict fp_closed_form() {
    std::vector<double> s(32);
    for (std::size_t t = 0; t < 32; ++t) s[t] = std::cos(2.0 * std::numbers::pi * 3.0 * static_cast<double>(t) / 32.0);
    const double fp = frequency_pruning_score(s, {});
    const double band = band_magnitude(s, 1, 10, Aggregation::sum);
    return {std::abs(fp - 0.5) <= 1e-9 && std::abs(band - 0.5) <= 1e-9, "FP=" + fmt(fp, 17) + " band[1,10]=" + fmt(band, 17)};
}

// 5 -------------------------------------------------------------------------
Verdict knn_oracle() {
    std::mt19937_64 gen(5);
    std::normal_distribution<double> g(0.0, 1.0);
    std::size_t mismatches = 0;
    for (int inst = 0; inst < 1000; ++inst) {
        const std::size_t n = 1 + gen() % 500, d = 1 + gen() % 64;
        std::vector<double> rows(n * d);
        for (auto& x : rows) x = g(gen);
        // Exact duplicate rows exercise the index tie-break.
        if (n > 4)
            for (int dup = 0; dup < 3; ++dup) {
                const std::size_t from = gen() % n, to = gen() % n;
                std::copy_n(rows.begin() + static_cast<long>(from * d), d, rows.begin() + static_cast<long>(to * d));
            }
        std::vector<std::string> ids;
        for (std::size_t i = 0; i < n; ++i) ids.push_back(fixture::id(i));
        const EmbeddingSet set(ids, d, rows);
        std::vector<double> q(d);
        if (gen() % 4 == 0)
            std::copy_n(rows.begin() + static_cast<long>((gen() % n) * d), d, q.begin());
        else
            for (auto& x : q) x = g(gen);
        const std::size_t k = 1 + gen() % std::min<std::size_t>(n, 50);
        for (bool cos : {false, true}) {
            const auto got = knn_indices(set, q, {k, cos ? DistanceMetric::cosine : DistanceMetric::euclidean});
            if (got != oracle::knn(rows, d, q, k, cos)) ++mismatches;
        }
    }
    return {mismatches == 0, "1000 instances x 2 metrics, n<=500, d<=64; mismatches " + std::to_string(mismatches)};
}

// 6 -------------------------------------------------------------------------
Verdict extrapolation_bounds() {
    std::mt19937_64 gen(6);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 0.5);
    std::size_t out_of_bounds = 0, baseline_mismatch = 0, copy_mismatch = 0;
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t n = 2 + gen() % 200, d = 1 + gen() % 16, m = 1 + gen() % 60;
        auto make = [&](std::size_t rows, const std::string& prefix) {
            std::vector<std::string> ids;
            std::vector<double> v(rows * d);
            for (auto& x : v) x = g(gen);
            for (std::size_t i = 0; i < rows; ++i) ids.push_back(prefix + fixture::id(i));
            return EmbeddingSet(ids, d, v);
        };
        const auto src = make(n, "s");
        const auto dest = make(m, "d");
        std::vector<ScoreEntry> e;
        for (const auto& id : src.ids()) e.push_back({id, u(gen)});
        const ScoreTable scores(Metric::DU, "{}", Provenance::computed, e);
        const auto s = scores.scores();
        const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
        const std::size_t k = 1 + gen() % n;
        const auto metric = gen() % 2 ? DistanceMetric::cosine : DistanceMetric::euclidean;
        for (double v : extrapolate_scores(src, scores, dest, {k, metric}).scores.scores())
            if (v < *lo || v > *hi) ++out_of_bounds;
        if (extrapolate_scores(src, scores, dest, {n, metric}).scores.scores() != mean_baseline(scores, dest.ids()).scores())
            ++baseline_mismatch;
        const EmbeddingSet copy(std::vector<std::string>{"q"}, d,
                                std::vector<double>(src.row(n / 2).begin(), src.row(n / 2).end()));
        if (extrapolate_scores(src, scores, copy, {1, DistanceMetric::euclidean}).scores.at("q") != s[n / 2])
            ++copy_mismatch;
    }
    return {out_of_bounds + baseline_mismatch + copy_mismatch == 0,
            "100 random instances; out of bounds " + std::to_string(out_of_bounds) + ", k=n vs baseline mismatches " +
                std::to_string(baseline_mismatch) + ", k=1 coincident mismatches " + std::to_string(copy_mismatch)};
}

// 7 -------------------------------------------------------------------------
Verdict grid_ordering() {
    const std::size_t d = 16, clusters = 5;
    int wins = 0;
    std::string worst;
    double worst_ratio = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        std::mt19937_64 gen(7000 + seed);
        std::normal_distribution<double> g(0.0, 1.0);
        std::vector<std::vector<double>> centers(clusters, std::vector<double>(d));
        for (auto& c : centers)
            for (auto& x : c) x = 4.0 * g(gen);
        std::vector<double> anchor(d);
        for (auto& x : anchor) x = 4.0 * g(gen);
        // Truth = Euclidean distance to a fixed anchor, a 1-Lipschitz function.
        auto make = [&](std::size_t rows, const std::string& prefix, std::vector<ScoreEntry>& truth) {
            std::vector<std::string> ids;
            std::vector<double> v;
            for (std::size_t i = 0; i < rows; ++i) {
                const auto& c = centers[gen() % clusters];
                std::vector<double> x(d);
                for (std::size_t j = 0; j < d; ++j) x[j] = c[j] + g(gen);
                ids.push_back(prefix + fixture::id(i));
                truth.push_back({ids.back(), oracle::euclidean(x.data(), anchor.data(), d)});
                v.insert(v.end(), x.begin(), x.end());
            }
            return EmbeddingSet(ids, d, v);
        };
        std::vector<ScoreEntry> src_truth, hold_truth;
        const auto src = make(2000, "s", src_truth);
        const auto hold = make(500, "h", hold_truth);
        GridSpec spec{{1, 2, 5, 10, 20, 50, 100},
                      {DistanceMetric::euclidean, DistanceMetric::cosine},
                      {{"orig", src, ScoreTable(Metric::DU, "{}", Provenance::computed, src_truth)}}};
        const auto result = grid_search(spec, hold, ScoreTable(Metric::DU, "{}", Provenance::computed, hold_truth));
        const double best = result.cells.front().mae, base = result.baselines.front().mae;
        if (best < base) ++wins;
        if (best / base > worst_ratio) {
            worst_ratio = best / base;
            worst = "seed " + std::to_string(seed) + " best " + fmt(best) + " (k=" + std::to_string(result.cells.front().k) +
                    ") vs baseline " + fmt(base);
        }
    }
    return {wins >= 19, std::to_string(wins) + "/20 seeds beat the mean baseline; closest: " + worst};
}

// 8 -------------------------------------------------------------------------
Verdict pruning_counts() {
    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t count_fail = 0, balance_fail = 0, nested_fail = 0, partition_fail = 0;
    for (int rep = 0; rep < 500; ++rep) {
        const std::size_t n = 1 + gen() % 400, classes = 1 + gen() % 8;
        std::vector<double> weights(classes);
        for (auto& w : weights) w = 0.05 + u(gen);
        std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
        std::vector<ScoreEntry> e;
        LabelMap labels;
        std::vector<std::size_t> sizes(classes, 0);
        for (std::size_t i = 0; i < n; ++i) {
            e.push_back({fixture::id(i), std::round(u(gen) * 10.0) / 20.0});
            const auto c = pick(gen);
            labels[fixture::id(i)] = static_cast<int>(c);
            ++sizes[c];
        }
        const ScoreTable scores(Metric::DU, "{}", Provenance::computed, e);
        const double f = u(gen) * 0.999;
        const auto want = static_cast<std::size_t>(std::floor(f * static_cast<double>(n)));
        const auto dir = gen() % 2 ? Direction::keep_high : Direction::keep_low;
        const auto ids = scores.ids();
        const std::vector<PruneManifest> manifests{
            prune_by_score(scores, Budget::fraction(f), dir), prune_balanced(scores, labels, Budget::fraction(f), dir),
            prune_random(ids, &labels, Budget::fraction(f), gen(), false),
            prune_random(ids, &labels, Budget::fraction(f), gen(), true)};
        for (const auto& m : manifests) {
            if (m.removed.size() != want) ++count_fail;
            std::set<std::string> all(m.kept.begin(), m.kept.end());
            all.insert(m.removed.begin(), m.removed.end());
            if (all.size() != n || m.kept.size() + m.removed.size() != n) ++partition_fail;
        }
        for (std::size_t which : {1u, 3u}) {
            std::vector<double> removed(classes, 0.0);
            for (const auto& id : manifests[which].removed) removed[static_cast<std::size_t>(labels.at(id))] += 1.0;
            for (std::size_t c = 0; c < classes; ++c)
                if (std::abs(removed[c] - f * static_cast<double>(sizes[c])) > 1.0) ++balance_fail;
        }
        const double g2 = f + (1.0 - f) * u(gen) * 0.999;
        const auto wide = manifests[0].kept;
        const auto narrow = prune_by_score(scores, Budget::fraction(g2), dir).kept;
        if (!std::includes(wide.begin(), wide.end(), narrow.begin(), narrow.end())) ++nested_fail;
    }
    return {count_fail + balance_fail + nested_fail + partition_fail == 0,
            "500 random instances; count " + std::to_string(count_fail) + ", balance " + std::to_string(balance_fail) +
                ", nesting " + std::to_string(nested_fail) + ", partition " + std::to_string(partition_fail) + " failures"};
}

// 9 -------------------------------------------------------------------------
Verdict gradient_checks() {
    gradcheck::Outcome outcome;
    for (std::uint64_t s = 0; s < 100; ++s) gradcheck::check_random_config(90000 + s, outcome);
    return {outcome.failed == 0, "100 configurations, " + std::to_string(outcome.checked) + " partials, " +
                                     std::to_string(outcome.failed) + " outside 1e-4 relative" +
                                     (outcome.failed ? " (first: " + outcome.first_failure + ")" : "")};
}

// 10 ------------------------------------------------------------------------
Verdict pgd_feasibility() {
    using namespace toy;
    std::mt19937_64 gen(10);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Rng rng(10);
    std::size_t infeasible = 0;
    for (Norm norm : {Norm::linf, Norm::l2}) {
        for (int rep = 0; rep < 1000; ++rep) {
            const std::size_t d = 1 + gen() % 8;
            const auto model = ToyModel::initialized(d, {6}, 2 + gen() % 3, gen());
            std::vector<double> x(d);
            for (auto& v : x) v = u(gen);
            const AttackConfig cfg{norm, 0.6 * u(gen), 0.3 * u(gen) + 1e-4, 1 + static_cast<int>(gen() % 12), gen() % 2 == 0};
            const int label = static_cast<int>(gen() % model.classes());
            const auto adv = pgd_attack(model, x, label, cfg, rng,
                                        gen() % 2 ? AttackObjective::kl : AttackObjective::cross_entropy);
            bool ok = perturbation_norm(adv, x, norm) <= cfg.epsilon * (1 + 1e-9);
            for (double v : adv) ok = ok && v >= 0.0 && v <= 1.0;
            if (!ok) ++infeasible;
        }
    }
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const auto model = ToyModel::initialized(3, {}, 3, gen());
        std::vector<double> x(3);
        for (auto& v : x) v = u(gen);
        const int y = static_cast<int>(gen() % 3);
        const auto p = forward(model, x);
        const auto w = model.weights(0);
        const AttackConfig cfg{Norm::linf, 0.08, 0.08 + 0.1 * u(gen), 1, false};
        const auto adv = pgd_attack(model, x, y, cfg, rng);
        for (std::size_t j = 0; j < 3; ++j) {
            double grad = 0.0;
            for (std::size_t c = 0; c < 3; ++c) grad += w[c * 3 + j] * (p[c] - (static_cast<int>(c) == y ? 1.0 : 0.0));
            const double sgn = grad > 0 ? 1.0 : grad < 0 ? -1.0 : 0.0;
            worst = std::max(worst, std::abs(adv[j] - std::clamp(x[j] + 0.08 * sgn, 0.0, 1.0)));
        }
    }
    return {infeasible == 0 && worst <= 1e-12, "2000 attacks, infeasible " + std::to_string(infeasible) +
                                                  "; linear one-step worst deviation " + fmt(worst)};
}

// 11 ------------------------------------------------------------------------
double mean_score(const ScoreTable& t) {
    const auto s = t.scores();
    double sum = 0.0;
    for (double v : s) sum += v;
    return sum / static_cast<double>(s.size());
}

Verdict distribution_shift() {
    using namespace toy;
    int wins = 0;
    std::string detail;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        BlobConfig blobs;
        blobs.n_per_class = 1000;
        blobs.separation = 2.0;
        blobs.seed = 1100 + seed;
        const auto data = make_blobs(blobs);
        const auto init = ToyModel::initialized(2, {16}, 2, 1200 + seed);
        TrainConfig cfg;
        cfg.epochs = 60;
        cfg.seed = 1300 + seed;
        const auto standard = train(init, data, cfg, std::nullopt);
        cfg.loss.kind = LossKind::trades;
        cfg.record_adversarial = true;
        const auto adversarial = train(init, data, cfg, attack_preset("linf"));
        const double u_std = mean_score(score_traces_du(standard.clean_traces, {10}));
        const double u_adv = mean_score(score_traces_du(adversarial.adversarial_traces, {10}));
        if (u_adv > u_std) ++wins;
        detail += (seed ? ", " : "") + fmt(u_adv, 3) + " vs " + fmt(u_std, 3);
    }
    return {wins >= 4, std::to_string(wins) + "/5 seeds with mean adversarial DU > standard DU (" + detail + ")"};
}

// 12 ------------------------------------------------------------------------
Verdict pruning_benefit() {
    using namespace toy;
    double du_total = 0.0, random_total = 0.0;
    std::string detail;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        BlobConfig blobs;
        blobs.n_per_class = 500;
        blobs.separation = 3.0;
        blobs.seed = 1400 + seed;
        const auto data = make_blobs(blobs);
        blobs.n_per_class = 500;
        blobs.seed = 1500 + seed;
        blobs.id_prefix = "t";
        const auto test = make_blobs(blobs);
        const auto attack = attack_preset("linf");
        TrainConfig cfg;
        cfg.epochs = 30;
        cfg.loss.kind = LossKind::trades;
        cfg.record_adversarial = true;
        cfg.seed = 1600 + seed;
        const auto init = ToyModel::initialized(2, {16}, 2, 1700 + seed);
        const auto first = train(init, data, cfg, attack);
        const auto scores = score_traces_du(first.adversarial_traces, {10});
        const auto du_manifest = prune_by_score(scores, Budget::fraction(0.25), Direction::keep_high);
        const auto random_manifest = prune_random(scores.ids(), nullptr, Budget::fraction(0.25), 1800 + seed, false);

        cfg.record_adversarial = false;
        cfg.record_clean = false;
        auto robust = [&](const PruneManifest& m) {
            const auto model = train(init, subset(data, m.kept), cfg, attack).model;
            return evaluate(model, test, attack, 1900 + seed).robust_accuracy;
        };
        const double du_acc = robust(du_manifest), random_acc = robust(random_manifest);
        du_total += du_acc;
        random_total += random_acc;
        detail += (seed ? ", " : "") + fmt(100 * du_acc, 4) + "/" + fmt(100 * random_acc, 4);
    }
    const double du_mean = 100.0 * du_total / 5.0, random_mean = 100.0 * random_total / 5.0;
    return {du_mean >= random_mean - 1.0, "mean robust accuracy DU-pruned " + fmt(du_mean) + "% vs random " +
                                              fmt(random_mean) + "% (per seed DU/random: " + detail + ")"};
}

// 13 ------------------------------------------------------------------------
Verdict cli_replay() {
    fixture::TempDir dir;
    struct Step {
        std::vector<std::string> args;
        std::vector<std::string> outputs;
    };
    const auto p = dir / "run";
    const std::vector<Step> steps{
        {{"simulate", "-o", p, "--seed", "13", "--n-per-class", "40", "--epochs", "12", "--loss", "trades", "--separation",
          "3", "--test-per-class", "20"},
         {p + ".clean.traces.jsonl", p + ".adversarial.traces.jsonl", p + ".log.json", p + ".data.emb.jsonl",
          p + ".test.emb.jsonl"}},
        {{"score", p + ".adversarial.traces.jsonl", "-o", dir / "du.scores.jsonl"}, {dir / "du.scores.jsonl"}},
        {{"score", p + ".clean.traces.jsonl", "--metric", "fp", "-o", dir / "fp.scores.jsonl"}, {dir / "fp.scores.jsonl"}},
        {{"prune", dir / "du.scores.jsonl", "--fraction", "0.25", "--balanced", "--labels", p + ".data.emb.jsonl", "-o",
          dir / "m.json"},
         {dir / "m.json"}},
        {{"prune", dir / "du.scores.jsonl", "--random", "--seed", "3", "--fraction", "0.25", "-o", dir / "r.json"},
         {dir / "r.json"}},
        {{"extrapolate", "--source-emb", p + ".data.emb.jsonl", "--source-scores", dir / "du.scores.jsonl", "--dest-emb",
          p + ".test.emb.jsonl", "--preset", "du-linf", "-o", dir / "x.scores.jsonl"},
         {dir / "x.scores.jsonl"}},
        {{"analyze", "spectral", p + ".clean.traces.jsonl", "--du", dir / "du.scores.jsonl", "--high", "3", "6", "-o",
          dir / "sp.csv"},
         {dir / "sp.csv", dir / "sp.csv.footer.json"}},
        {{"analyze", "overlap", dir / "m.json", dir / "r.json", "-o", dir / "ov.json"}, {dir / "ov.json"}},
        {{"analyze", "histogram", dir / "du.scores.jsonl", "-o", dir / "h.csv"}, {dir / "h.csv"}},
    };
    std::size_t replayed = 0, differing = 0;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        std::ostringstream out, err;
        if (cli::dispatch(steps[i].args, out, err) != cli::kExitOk)
            return {false, "step " + std::to_string(i) + " failed: " + err.str()};
        std::vector<std::string> before;
        for (const auto& f : steps[i].outputs) before.push_back(fixture::slurp(f));
        const auto log = dir / ("step" + std::to_string(i) + ".log");
        fixture::spit(log, out.str());
        std::ostringstream again, err2;
        if (cli::dispatch(std::vector<std::string>{"replay", log}, again, err2) != cli::kExitOk)
            return {false, "replay of step " + std::to_string(i) + " failed: " + err2.str()};
        if (again.str() != out.str()) ++differing;
        for (std::size_t j = 0; j < before.size(); ++j) {
            ++replayed;
            if (fixture::slurp(steps[i].outputs[j]) != before[j]) ++differing;
        }
    }
    return {differing == 0, std::to_string(steps.size()) + " commands replayed, " + std::to_string(replayed) +
                                " output files, " + std::to_string(differing) + " differences"};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria{
        {1, "exact DU values", 1.0, exact_du},
        {2, "DU reversal and affine properties", 10.0, du_properties},
        {3, "DFT vs direct oracle and Parseval", 30.0, dft_correctness},
        {4, "FP closed form", 0.0, fp_closed_form},
        {5, "k-NN full-sort oracle equivalence", 60.0, knn_oracle},
        {6, "extrapolation bounds and degeneracies", 0.0, extrapolation_bounds},
        {7, "grid search beats the mean baseline", 120.0, grid_ordering},
        {8, "pruning counts, balance and nesting", 0.0, pruning_counts},
        {9, "gradient checks", 60.0, gradient_checks},
        {10, "PGD feasibility and closed form", 0.0, pgd_feasibility},
        {11, "adversarial DU distribution shift", 180.0, distribution_shift},
        {12, "DU pruning vs random pruning", 600.0, pruning_benefit},
        {13, "CLI replay reproducibility", 0.0, cli_replay},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
    int failures = 0;
    for (const auto& c : criteria) {
        if (!selected.empty() && !selected.count(c.number)) continue;
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.body();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::string timing = fmt(secs, 3) + "s";
        if (c.time_limit_s > 0) {
            timing += " of " + fmt(c.time_limit_s, 3) + "s";
            if (secs > c.time_limit_s) {
                v.ok = false;
                timing += " (over time)";
            }
        }
        std::printf("%s [%d] %s: %s [%s]\n", v.ok ? "PASS" : "FAIL", c.number, c.title.c_str(), v.detail.c_str(),
                    timing.c_str());
        std::fflush(stdout);
        if (!v.ok) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
