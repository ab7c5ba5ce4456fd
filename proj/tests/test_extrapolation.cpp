#include <doctest.h>

#include <algorithm>
#include <random>

#include "prunekit/error.hpp"
#include "prunekit/extrapolation/extrapolate.hpp"
#include "prunekit/extrapolation/knn.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace prunekit;

namespace {

EmbeddingSet random_set(std::mt19937_64& gen, std::size_t n, std::size_t d, const std::string& prefix = "x") {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<std::string> ids;
    std::vector<double> values;
    for (std::size_t i = 0; i < n; ++i) {
        ids.push_back(prefix + fixture::id(i));
        for (std::size_t j = 0; j < d; ++j) values.push_back(g(gen));
    }
    return {ids, d, values};
}

ScoreTable random_scores(std::mt19937_64& gen, const EmbeddingSet& set) {
    std::uniform_real_distribution<double> u(0.0, 0.5);
    std::vector<ScoreEntry> e;
    for (const auto& id : set.ids()) e.push_back({id, u(gen)});
    return {Metric::DU, "{}", Provenance::computed, e};
}

const EmbeddingSet kTriangle({"p", "q", "r"}, 2, {0, 0, 1, 0, 0, 1});

}  // namespace

TEST_CASE("knn hand examples") {
    CHECK(knn_indices(kTriangle, std::vector<double>{0.1, 0.0}, {2, DistanceMetric::euclidean}) ==
          std::vector<std::size_t>{0, 1});
    std::mt19937_64 gen(1);
    const auto set = random_set(gen, 20, 4);
    const auto row5 = set.row(5);
    CHECK(knn_indices(set, row5, {1, DistanceMetric::euclidean}) == std::vector<std::size_t>{5});
    CHECK(knn_indices(set, row5, {1, DistanceMetric::cosine}) == std::vector<std::size_t>{5});
}

TEST_CASE("knn ties break by lower row index") {
    const EmbeddingSet dup({"a", "b", "c", "d"}, 2, {1, 1, 3, 3, 1, 1, 1, 1});
    CHECK(knn_indices(dup, std::vector<double>{1, 1}, {2, DistanceMetric::euclidean}) ==
          std::vector<std::size_t>{0, 2});
    const EmbeddingSet same_dir({"a", "b", "c", "d"}, 2, {1, 2, 2, 1, 1, 2, 1, 2});
    CHECK(knn_indices(same_dir, std::vector<double>{3, 6}, {3, DistanceMetric::cosine}) ==
          std::vector<std::size_t>{0, 2, 3});
}

TEST_CASE("knn matches the full-sort oracle") {
    std::mt19937_64 gen(2);
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t n = 1 + gen() % 300, d = 1 + gen() % 32;
        auto source = random_set(gen, n, d);
        const std::vector<double> rows(source.values().begin(), source.values().end());
        for (int q = 0; q < 10; ++q) {
            const auto query = random_set(gen, 1, d);
            const std::vector<double> qv(query.values().begin(), query.values().end());
            const std::size_t k = 1 + gen() % n;
            for (bool cos : {false, true}) {
                const KnnConfig cfg{k, cos ? DistanceMetric::cosine : DistanceMetric::euclidean};
                CHECK(knn_indices(source, qv, cfg) == oracle::knn(rows, d, qv, k, cos));
            }
        }
    }
}

TEST_CASE("cosine neighbors ignore positive row scaling") {
    std::mt19937_64 gen(3);
    const auto set = random_set(gen, 100, 8);
    std::vector<double> scaled(set.values().begin(), set.values().end());
    std::uniform_real_distribution<double> u(0.1, 10.0);
    for (std::size_t i = 0; i < set.size(); ++i) {
        const double c = i % 3 ? u(gen) : 4.0;
        for (std::size_t j = 0; j < 8; ++j) scaled[i * 8 + j] *= c;
    }
    const EmbeddingSet other(set.ids(), 8, scaled);
    for (int q = 0; q < 20; ++q) {
        const auto query = random_set(gen, 1, 8);
        CHECK(knn_indices(set, query.row(0), {7, DistanceMetric::cosine}) ==
              knn_indices(other, query.row(0), {7, DistanceMetric::cosine}));
    }
}

TEST_CASE("knn rejects bad inputs") {
    CHECK_THROWS_AS(knn_indices(kTriangle, std::vector<double>{0.0, 0.0, 0.0}, {1, DistanceMetric::euclidean}),
                    ValidationError);
    CHECK_THROWS_AS(knn_indices(kTriangle, std::vector<double>{0.0, 0.0}, {0, DistanceMetric::euclidean}),
                    ValidationError);
    CHECK_THROWS_AS(knn_indices(kTriangle, std::vector<double>{0.0, 0.0}, {1, DistanceMetric::cosine}),
                    ValidationError);
    const EmbeddingSet zero_row({"a", "b"}, 2, {0, 0, 1, 1});
    CHECK_THROWS_AS(KnnIndex(zero_row, DistanceMetric::cosine), ValidationError);
}

TEST_CASE("extrapolation hand example") {
    const auto src = fixture::scores({{"p", 0.2}, {"q", 0.6}, {"r", 1.0}});
    const EmbeddingSet dest({"z"}, 2, {0.1, 0.0});
    const auto out = extrapolate_scores(kTriangle, src, dest, {2, DistanceMetric::euclidean});
    CHECK(std::abs(out.scores.at("z") - 0.4) <= 1e-15);
    CHECK(out.scores.provenance() == Provenance::extrapolated);
    CHECK(out.warnings.empty());
}

TEST_CASE("extrapolation degenerate cases and bounds") {
    std::mt19937_64 gen(4);
    for (int rep = 0; rep < 20; ++rep) {
        const auto src = random_set(gen, 30 + gen() % 50, 5, "s");
        const auto scores = random_scores(gen, src);
        const auto dest = random_set(gen, 40, 5, "d");
        const auto all = extrapolate_scores(src, scores, dest, {src.size(), DistanceMetric::euclidean});
        CHECK(all.scores.scores() == mean_baseline(scores, dest.ids()).scores());
        const auto s = scores.scores();
        const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
        for (auto k : {1u, 3u, 10u})
            for (double v : extrapolate_scores(src, scores, dest, {k, DistanceMetric::cosine}).scores.scores()) {
                CHECK(v >= *lo);
                CHECK(v <= *hi);
            }
        // Destination rows copied from sources, k = 1.
        const auto copy = extrapolate_scores(src, scores, EmbeddingSet(std::vector<std::string>(src.ids()), 5,
                                                                       std::vector<double>(src.values().begin(), src.values().end())),
                                             {1, DistanceMetric::euclidean});
        CHECK(copy.scores.scores() == s);
        CHECK(copy.warnings.size() == 1);
    }
}

TEST_CASE("extrapolation scales with the source scores") {
    std::mt19937_64 gen(5);
    const auto src = random_set(gen, 60, 3, "s");
    const auto scores = random_scores(gen, src);
    const auto dest = random_set(gen, 30, 3, "d");
    const auto base = extrapolate_scores(src, scores, dest, {5, DistanceMetric::euclidean}).scores.scores();
    for (double c : {0.0, 0.25, 2.0, 0.7, 3.1}) {
        std::vector<ScoreEntry> e;
        for (const auto& x : scores.entries()) e.push_back({x.id, c * x.score});
        const auto scaled =
            extrapolate_scores(src, ScoreTable(Metric::DU, "{}", Provenance::computed, e), dest, {5, DistanceMetric::euclidean})
                .scores.scores();
        for (std::size_t i = 0; i < base.size(); ++i) {
            const bool power_of_two = c == 0.0 || c == 0.25 || c == 2.0;
            if (power_of_two)
                CHECK(scaled[i] == c * base[i]);
            else
                CHECK(oracle::rel_err(scaled[i], c * base[i], 1e-300) <= 1e-12);
        }
    }
}

TEST_CASE("extrapolation input errors") {
    const auto src = fixture::scores({{"p", 0.2}, {"q", 0.6}});
    CHECK_THROWS_AS(extrapolate_scores(kTriangle, src, kTriangle, {1, DistanceMetric::euclidean}), ValidationError);
    const auto full = fixture::scores({{"p", 0.2}, {"q", 0.6}, {"r", 1.0}});
    CHECK_THROWS_AS(extrapolate_scores(kTriangle, full, kTriangle, {4, DistanceMetric::euclidean}), ValidationError);
    const EmbeddingSet dest({"z"}, 3, {0.1, 0.0, 0.0});
    CHECK_THROWS_AS(extrapolate_scores(kTriangle, full, dest, {1, DistanceMetric::euclidean}), ValidationError);
}

TEST_CASE("mae and mean_baseline examples") {
    const auto pred = fixture::scores({{"a", 0.2}, {"b", 0.4}});
    const auto truth = fixture::scores({{"a", 0.3}, {"b", 0.1}});
    CHECK(std::abs(mae(pred, truth) - 0.2) <= 1e-15);
    CHECK(mae(pred, truth) == mae(truth, pred));
    CHECK(mae(pred, pred) == 0.0);
    CHECK_THROWS_AS(mae(pred, fixture::scores({{"a", 0.3}})), ValidationError);

    const std::vector<std::string> ids{"u", "v"};
    const auto base = mean_baseline(fixture::scores({{"a", 0.1}, {"b", 0.3}}), ids);
    CHECK(base.at("u") == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(mean_baseline(fixture::scores({{"a", 0.37}}), ids).at("v") == 0.37);
    CHECK(order_free_mean({0.1, 0.1, 0.1}) == 0.1);
}

TEST_CASE("presets carry the selected hyperparameters") {
    CHECK(knn_preset("du-l2").k == 35);
    CHECK(knn_preset("du-l2").metric == DistanceMetric::cosine);
    CHECK(knn_preset("fp-l2").k == 24);
    CHECK(knn_preset("fp-l2").metric == DistanceMetric::euclidean);
    CHECK(knn_preset("du-linf").k == 13);
    CHECK(knn_preset("du-linf").metric == DistanceMetric::cosine);
    CHECK(knn_preset("fp-linf").k == 12);
    CHECK(knn_preset("fp-linf").metric == DistanceMetric::euclidean);
    CHECK_THROWS_AS(knn_preset("nope"), ValidationError);
}

TEST_CASE("grid search finds the exact 1-NN cell") {
    std::mt19937_64 gen(6);
    const auto src = random_set(gen, 200, 4, "s");
    const auto scores = random_scores(gen, src);
    const auto holdout = random_set(gen, 50, 4, "h");
    const auto truth = extrapolate_scores(src, scores, holdout, {1, DistanceMetric::euclidean}).scores;
    GridSpec spec{{1, 3, 9}, {DistanceMetric::euclidean, DistanceMetric::cosine}, {{"orig", src, scores}}};
    const auto result = grid_search(spec, holdout, truth);
    REQUIRE(result.cells.size() == 6);
    CHECK(result.cells.front().k == 1);
    CHECK(result.cells.front().metric == DistanceMetric::euclidean);
    CHECK(result.cells.front().mae == 0.0);
    REQUIRE(result.baselines.size() == 1);
    CHECK(result.baselines[0].mae == mae(mean_baseline(scores, holdout.ids()), truth));
    for (std::size_t i = 1; i < result.cells.size(); ++i) CHECK(result.cells[i - 1].mae <= result.cells[i].mae);
    for (const auto& cell : result.cells)
        CHECK(cell.mae == mae(extrapolate_scores(src, scores, holdout, {cell.k, cell.metric}).scores, truth));

    GridSpec one{{2}, {DistanceMetric::cosine}, {{"orig", src, scores}}};
    const auto csv = grid_csv(grid_search(one, holdout, truth));
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
    CHECK(csv.rfind("source_variant,metric,k,mae\norig,cosine,2,", 0) == 0);
    CHECK(csv.find("source_variant,baseline_mae\norig,") != std::string::npos);
}

TEST_CASE("grid search rejects holdout ids present in a source") {
    std::mt19937_64 gen(7);
    const auto src = random_set(gen, 20, 2, "s");
    const auto scores = random_scores(gen, src);
    GridSpec spec{{1}, {DistanceMetric::euclidean}, {{"orig", src, scores}}};
    CHECK_THROWS_AS(grid_search(spec, src, scores), ValidationError);
}

TEST_CASE("merge_sources concatenates and warns on scale mismatch") {
    std::mt19937_64 gen(8);
    const auto a = random_set(gen, 10, 2, "a");
    const auto b = random_set(gen, 10, 2, "b");
    const auto sa = random_scores(gen, a);
    std::vector<ScoreEntry> big;
    for (const auto& id : b.ids()) big.push_back({id, 5.0});
    std::vector<std::string> warnings;
    const auto merged = merge_sources("both", {"a", a, sa}, {"b", b, ScoreTable(Metric::DU, "{}", Provenance::computed, big)}, warnings);
    CHECK(merged.embeddings.size() == 20);
    CHECK(merged.scores.size() == 20);
    CHECK(warnings.size() == 1);
    std::vector<std::string> none;
    CHECK_THROWS_AS(merge_sources("self", {"a", a, sa}, {"a", a, sa}, none), ValidationError);
}

TEST_CASE("split_holdout is seeded and disjoint") {
    std::mt19937_64 gen(9);
    const auto src = random_set(gen, 100, 3, "s");
    const SourceVariant v{"orig", src, random_scores(gen, src)};
    const auto a = split_holdout(v, 0.2, 5);
    const auto b = split_holdout(v, 0.2, 5);
    CHECK(a.holdout_emb == b.holdout_emb);
    CHECK(a.holdout_emb.size() == 20);
    CHECK(a.source.embeddings.size() == 80);
    CHECK(a.source.scores.size() == 80);
    for (const auto& id : a.holdout_emb.ids()) CHECK(!a.source.scores.contains(id));
    CHECK(split_holdout(v, 0.2, 6).holdout_emb != a.holdout_emb);
}
