#include "prunekit/cli/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "prunekit/core/io.hpp"
#include "prunekit/error.hpp"
#include "prunekit/extrapolation/extrapolate.hpp"
#include "prunekit/pruning/prune.hpp"
#include "prunekit/rng.hpp"
#include "prunekit/scoring/dynamic_uncertainty.hpp"
#include "prunekit/scoring/spectral.hpp"
#include "prunekit/toytrain/train.hpp"

#ifndef PRUNEKIT_VERSION
#define PRUNEKIT_VERSION "0.0.0"
#endif

namespace prunekit::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

void require_input(const std::string& path) {
    if (!fs::exists(path)) throw IoError("input file not found: '" + path + "'");
}

void require_output(const std::string& path, bool force) {
    if (path.empty()) throw ValidationError("an output path (-o) is required");
    if (fs::exists(path) && !force) throw IoError("refusing to overwrite '" + path + "' without --force");
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("write failed for '" + path + "'");
}

enum class FileKind { traces, scores, embeddings };

FileKind kind_of(const std::string& path) {
    if (ends_with(path, ".traces.jsonl")) return FileKind::traces;
    if (ends_with(path, ".scores.jsonl")) return FileKind::scores;
    if (ends_with(path, ".emb") || ends_with(path, ".emb.jsonl")) return FileKind::embeddings;
    throw ValidationError("cannot tell the format of '" + path +
                          "' (expected .traces.jsonl, .scores.jsonl, .emb or .emb.jsonl)");
}

LabelMap read_labels(const std::string& path) {
    require_input(path);
    LabelMap labels;
    switch (kind_of(path)) {
        case FileKind::traces:
            for (const auto& t : read_traces(path).traces) labels.emplace(t.sample_id, t.label);
            break;
        case FileKind::embeddings: {
            const auto emb = read_embeddings(path);
            for (std::size_t i = 0; i < emb.size(); ++i) {
                if (emb.labels()[i] == kUnlabeled)
                    throw ValidationError(path + ": row " + std::to_string(i) + " ('" + emb.ids()[i] + "') is unlabeled");
                labels.emplace(emb.ids()[i], emb.labels()[i]);
            }
            break;
        }
        case FileKind::scores: throw ValidationError("score files carry no labels: '" + path + "'");
    }
    return labels;
}

std::vector<std::string> read_ids(const std::string& path) {
    require_input(path);
    switch (kind_of(path)) {
        case FileKind::traces: {
            std::vector<std::string> ids;
            for (const auto& t : read_traces(path).traces) ids.push_back(t.sample_id);
            return ids;
        }
        case FileKind::scores: return read_scores(path).ids();
        case FileKind::embeddings: return read_embeddings(path).ids();
    }
    return {};
}

std::vector<CertaintyTrace> load_traces(const std::string& path, std::ostream& err) {
    require_input(path);
    auto file = read_traces(path);
    for (const auto& w : file.warnings) err << "warning: " << w << '\n';
    return std::move(file.traces);
}

// ------------------------------------------------------------------ options

struct Common {
    std::string out;
    bool force = false;
};

void add_common(CLI::App* app, Common& c, bool output_required = true) {
    auto* o = app->add_option("-o,--output", c.out, "Output path");
    if (output_required) o->required();
    app->add_flag("--force", c.force, "Overwrite existing outputs");
}

struct SimulateOpts {
    Common common;
    std::uint64_t seed = 0;
    std::size_t n_per_class = 100;
    std::size_t classes = 2;
    std::size_t dim = 2;
    double separation = 10.0;
    double sigma = 0.05;
    std::size_t test_per_class = 0;
    std::vector<std::size_t> hidden{16};
    std::size_t epochs = 50;
    std::size_t batch_size = 64;
    double lr = 0.1;
    double momentum = 0.0;
    std::string loss = "standard_ce";
    double beta = 5.0;
    double label_smoothing = 0.0;
    std::string attack = "auto";
    std::optional<double> epsilon;
    std::optional<double> step_size;
    std::optional<int> attack_steps;
    bool random_start = false;
    std::string record = "auto";
    bool reuse_train_perturbation = false;
    std::string keep;
};

struct ScoreOpts {
    Common common;
    std::string input;
    std::string metric = "du";
    std::size_t window = 10;
    bool paper_denominator = false;
    std::size_t lo = 1;
    std::size_t hi = 0;
    std::string aggregation = "sum";
};

struct ExtrapolateOpts {
    Common common;
    std::string source_emb, source_scores, dest_emb;
    std::string preset;
    std::size_t k = 0;
    std::string distance = "euclidean";
};

struct GridOpts {
    Common common;
    std::string spec;
    std::optional<double> holdout_fraction;
    std::optional<std::uint64_t> seed;
};

struct PruneOpts {
    Common common;
    std::string input;
    std::string labels;
    std::optional<double> fraction;
    std::optional<std::size_t> count;
    bool balanced = false;
    std::string direction = "keep-high";
    bool random = false;
    std::uint64_t seed = 0;
};

struct SpectralOpts {
    Common common;
    std::string traces, du;
    std::string footer;
    std::string aggregation = "mean";
    std::vector<std::size_t> low{1, 10};
    std::vector<std::size_t> high{11, 150};
};

struct OverlapOpts {
    Common common;
    std::string a, b;
};

struct HistogramOpts {
    Common common;
    std::string scores;
    std::size_t bins = 20;
};

struct ReplayOpts {
    std::string log;
};

// ------------------------------------------------------------------ commands

void run_simulate(const SimulateOpts& o, std::ostream& out, std::ostream& err) {
    const std::string p = o.common.out;
    const std::string clean_path = p + ".clean.traces.jsonl";
    const std::string adv_path = p + ".adversarial.traces.jsonl";
    const std::string log_path = p + ".log.json";
    const std::string data_path = p + ".data.emb.jsonl";
    const std::string test_path = p + ".test.emb.jsonl";

    toy::TrainConfig cfg;
    cfg.epochs = o.epochs;
    cfg.batch_size = o.batch_size;
    cfg.learning_rate = o.lr;
    cfg.momentum = o.momentum;
    cfg.loss = {toy::parse_loss_kind(o.loss), o.beta, o.label_smoothing};
    cfg.seed = o.seed;
    cfg.reuse_train_perturbation = o.reuse_train_perturbation;

    bool want_clean = true, want_adv = false;
    if (o.record != "auto") {
        want_clean = want_adv = false;
        std::stringstream ss(o.record);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const Variant v = parse_variant(item);
            (v == Variant::clean ? want_clean : want_adv) = true;
        }
    }
    std::optional<toy::AttackConfig> attack;
    const bool adversarial_loss = cfg.loss.kind != toy::LossKind::standard_ce;
    if (o.attack != "none" && (o.attack != "auto" || adversarial_loss || want_adv)) {
        attack = toy::attack_preset(o.attack == "auto" ? "linf" : o.attack);
        if (o.epsilon) attack->epsilon = *o.epsilon;
        if (o.step_size) attack->step_size = *o.step_size;
        if (o.attack_steps) attack->iterations = *o.attack_steps;
        attack->random_start = o.random_start;
    }
    if (o.record == "auto") want_adv = attack.has_value();
    cfg.record_clean = want_clean;
    cfg.record_adversarial = want_adv;

    std::vector<std::string> outputs{log_path, data_path};
    if (want_clean) outputs.push_back(clean_path);
    if (want_adv) outputs.push_back(adv_path);
    if (o.test_per_class > 0) outputs.push_back(test_path);
    for (const auto& path : outputs) require_output(path, o.common.force);

    toy::BlobConfig blobs{o.n_per_class, o.classes, o.dim, o.separation, o.sigma, derive_seed(o.seed, 100), "s"};
    auto data = toy::make_blobs(blobs);
    if (!o.keep.empty()) {
        require_input(o.keep);
        data = toy::subset(data, read_manifest(o.keep).kept);
    }
    auto model = toy::ToyModel::initialized(o.dim, o.hidden, o.classes, derive_seed(o.seed, 101));
    const auto result = toy::train(std::move(model), data, cfg, attack);

    json log = json::parse(toy::training_log_json(result, cfg, attack));
    if (o.test_per_class > 0) {
        auto test_cfg = blobs;
        test_cfg.n_per_class = o.test_per_class;
        test_cfg.seed = derive_seed(o.seed, 102);
        test_cfg.id_prefix = "t";
        const auto test = toy::make_blobs(test_cfg);
        const auto eval = toy::evaluate(result.model, test, attack, derive_seed(o.seed, 103));
        log["evaluation"] = {{"clean_accuracy", eval.clean_accuracy},
                             {"robust_accuracy", eval.robust_accuracy},
                             {"samples", test.size()}};
        write_embeddings(toy::to_embeddings(test), test_path);
    }
    write_embeddings(toy::to_embeddings(data), data_path);
    if (want_clean) write_traces(result.clean_traces, clean_path);
    if (want_adv) write_traces(result.adversarial_traces, adv_path);
    write_text(log_path, log.dump(2) + "\n");
    const auto& last = result.log.back();
    out << "trained " << data.size() << " samples for " << cfg.epochs << " epochs; final clean accuracy "
        << format_double(last.clean_accuracy) << '\n';
    (void)err;
}

void run_score(const ScoreOpts& o, std::ostream& out, std::ostream& err) {
    require_output(o.common.out, o.common.force);
    const auto traces = load_traces(o.input, err);
    ScoreTable table;
    if (parse_metric(o.metric) == Metric::DU) {
        table = score_traces_du(traces, DuConfig{o.window, o.paper_denominator});
    } else {
        table = score_traces_fp(traces, FpConfig{o.lo, o.hi, parse_aggregation(o.aggregation)});
    }
    write_scores(table, o.common.out);
    out << "scored " << table.size() << " samples (" << to_string(table.metric()) << ")\n";
}

void run_extrapolate(const ExtrapolateOpts& o, const CLI::App& app, std::ostream& out, std::ostream& err) {
    require_output(o.common.out, o.common.force);
    for (const auto* p : {&o.source_emb, &o.source_scores, &o.dest_emb}) require_input(*p);
    KnnConfig cfg{o.k, parse_distance_metric(o.distance)};
    if (!o.preset.empty()) {
        const auto preset = knn_preset(o.preset);
        if (app.get_option("--k")->count() == 0) cfg.k = preset.k;
        if (app.get_option("--distance")->count() == 0) cfg.metric = preset.metric;
    }
    if (cfg.k == 0) throw ValidationError("give --k or --preset");
    const auto result = extrapolate_scores(read_embeddings(o.source_emb), read_scores(o.source_scores),
                                           read_embeddings(o.dest_emb), cfg);
    for (const auto& w : result.warnings) err << "warning: " << w << '\n';
    write_scores(result.scores, o.common.out);
    out << "extrapolated " << result.scores.size() << " scores with k=" << cfg.k << " " << to_string(cfg.metric)
        << '\n';
}

void run_gridsearch(const GridOpts& o, std::ostream& out, std::ostream& err) {
    require_output(o.common.out, o.common.force);
    require_input(o.spec);
    json spec;
    {
        std::ifstream in(o.spec);
        if (!in) throw IoError("cannot open '" + o.spec + "'");
        try {
            in >> spec;
        } catch (const json::exception& e) {
            throw ValidationError(o.spec + ": malformed grid spec: " + e.what());
        }
    }
    const fs::path base = fs::path(o.spec).parent_path();
    auto resolve = [&](const std::string& p) {
        const fs::path path(p);
        const auto full = (path.is_absolute() ? path : base / path).string();
        require_input(full);
        return full;
    };
    GridSpec grid;
    std::vector<std::string> warnings;
    EmbeddingSet holdout_emb;
    ScoreTable holdout_truth;
    try {
        grid.k_values = spec.at("k_values").get<std::vector<std::size_t>>();
        for (const auto& m : spec.at("metrics")) grid.metrics.push_back(parse_distance_metric(m.get<std::string>()));
        for (const auto& v : spec.at("variants"))
            grid.variants.push_back({v.at("name").get<std::string>(),
                                     read_embeddings(resolve(v.at("embeddings").get<std::string>())),
                                     read_scores(resolve(v.at("scores").get<std::string>()))});
        const double fraction = o.holdout_fraction ? *o.holdout_fraction : spec.value("holdout_fraction", 0.0);
        if (spec.contains("holdout") && !o.holdout_fraction) {
            holdout_emb = read_embeddings(resolve(spec["holdout"].at("embeddings").get<std::string>()));
            holdout_truth = read_scores(resolve(spec["holdout"].at("scores").get<std::string>()));
        } else if (fraction > 0.0) {
            const std::string from = spec.value("holdout_from", grid.variants.empty() ? "" : grid.variants.front().name);
            const std::uint64_t seed = o.seed ? *o.seed : spec.value("seed", std::uint64_t{0});
            auto it = std::find_if(grid.variants.begin(), grid.variants.end(),
                                   [&](const SourceVariant& v) { return v.name == from; });
            if (it == grid.variants.end()) throw ValidationError("holdout_from names no variant: '" + from + "'");
            auto split = split_holdout(*it, fraction, seed);
            *it = std::move(split.source);
            holdout_emb = std::move(split.holdout_emb);
            holdout_truth = std::move(split.holdout_truth);
        } else {
            throw ValidationError("grid spec needs 'holdout' or a holdout fraction");
        }
        if (spec.contains("merge")) {
            for (const auto& m : spec["merge"]) {
                const auto parts = m.at("of").get<std::vector<std::string>>();
                if (parts.size() < 2) throw ValidationError("a merged variant needs at least two parts");
                auto find = [&](const std::string& name) -> const SourceVariant& {
                    for (const auto& v : grid.variants)
                        if (v.name == name) return v;
                    throw ValidationError("merge names no variant: '" + name + "'");
                };
                SourceVariant merged = find(parts[0]);
                for (std::size_t i = 1; i < parts.size(); ++i)
                    merged = merge_sources(m.at("name").get<std::string>(), merged, find(parts[i]), warnings);
                grid.variants.push_back(std::move(merged));
            }
        }
    } catch (const json::exception& e) {
        throw ValidationError(o.spec + ": malformed grid spec: " + e.what());
    }
    auto result = grid_search(grid, holdout_emb, holdout_truth);
    for (const auto& w : warnings) err << "warning: " << w << '\n';
    write_text(o.common.out, grid_csv(result));
    const auto& best = result.cells.front();
    out << "best: " << best.source_variant << ' ' << to_string(best.metric) << " k=" << best.k
        << " mae=" << format_double(best.mae) << '\n';
}

void run_prune(const PruneOpts& o, std::ostream& out, std::ostream&) {
    require_output(o.common.out, o.common.force);
    require_input(o.input);
    const Budget budget = o.count ? Budget::count(*o.count) : Budget::fraction(o.fraction.value_or(0.0));
    const Direction direction = parse_direction(o.direction);
    std::optional<LabelMap> labels;
    if (!o.labels.empty()) labels = read_labels(o.labels);
    if (o.balanced && !labels) throw ValidationError("--balanced needs --labels");
    PruneManifest manifest;
    if (o.random) {
        const auto ids = read_ids(o.input);
        manifest = prune_random(ids, labels ? &*labels : nullptr, budget, o.seed, o.balanced);
    } else {
        const auto scores = read_scores(o.input);
        manifest = o.balanced ? prune_balanced(scores, *labels, budget, direction)
                              : prune_by_score(scores, budget, direction);
    }
    write_manifest(manifest, o.common.out);
    out << "kept " << manifest.kept.size() << ", removed " << manifest.removed.size() << '\n';
}

void run_spectral(const SpectralOpts& o, std::ostream& out, std::ostream& err) {
    const std::string footer = o.footer.empty() ? o.common.out + ".footer.json" : o.footer;
    require_output(o.common.out, o.common.force);
    require_output(footer, o.common.force);
    if (o.low.size() != 2 || o.high.size() != 2) throw ValidationError("bands take two bin indices: LO HI");
    const auto traces = load_traces(o.traces, err);
    require_input(o.du);
    const auto report = spectral_report(traces, read_scores(o.du),
                                        {o.low[0], o.low[1], o.high[0], o.high[1], parse_aggregation(o.aggregation)});
    write_text(o.common.out, spectral_csv(report));
    write_text(footer, spectral_footer_json(report) + "\n");
    out << "r_low=" << format_double(report.r_low) << " r_high=" << format_double(report.r_high) << '\n';
}

void run_overlap(const OverlapOpts& o, std::ostream& out) {
    require_output(o.common.out, o.common.force);
    require_input(o.a);
    require_input(o.b);
    const double value = overlap(read_manifest(o.a), read_manifest(o.b));
    nlohmann::ordered_json j;
    j["a"] = o.a;
    j["b"] = o.b;
    j["overlap"] = value;
    write_text(o.common.out, j.dump() + "\n");
    out << format_double(value) << '\n';
}

void run_histogram(const HistogramOpts& o, std::ostream& out) {
    require_output(o.common.out, o.common.force);
    require_input(o.scores);
    if (o.bins < 1) throw ValidationError("histogram needs at least one bin");
    const auto scores = read_scores(o.scores).scores();
    if (scores.empty()) throw ValidationError("histogram of an empty score table");
    const auto [min_it, max_it] = std::minmax_element(scores.begin(), scores.end());
    const double lo = *min_it, hi = *max_it;
    const double width = (hi - lo) / static_cast<double>(o.bins);
    std::vector<std::size_t> counts(o.bins, 0);
    for (double s : scores) {
        std::size_t b = width > 0.0 ? static_cast<std::size_t>((s - lo) / width) : 0;
        ++counts[std::min(b, o.bins - 1)];
    }
    std::ostringstream csv;
    csv << "bin_lo,bin_hi,count\n";
    for (std::size_t b = 0; b < o.bins; ++b)
        csv << format_double(lo + width * static_cast<double>(b)) << ','
            << format_double(b + 1 == o.bins ? hi : lo + width * static_cast<double>(b + 1)) << ',' << counts[b] << '\n';
    write_text(o.common.out, csv.str());
    out << "histogram of " << scores.size() << " scores in " << o.bins << " bins\n";
}

// ------------------------------------------------------------------ header

const CLI::App* leaf_command(const CLI::App& app, std::string& name) {
    const CLI::App* current = &app;
    while (true) {
        const auto subs = current->get_subcommands();
        if (subs.empty()) return current;
        current = subs.front();
        name += name.empty() ? current->get_name() : " " + current->get_name();
    }
}

json canonical_config(const CLI::App& leaf) {
    json opts = json::object();
    for (const CLI::Option* opt : leaf.get_options()) {
        const std::string name = opt->get_name();
        if (name == "--force" || name == "--help" || name == "-h") continue;
        if (opt->count() > 0) {
            const auto& results = opt->results();
            opts[name] = results.size() == 1 ? json(results.front()) : json(results);
        } else {
            const auto def = opt->get_default_str();
            opts[name] = def.empty() ? json(nullptr) : json(def);
        }
    }
    return opts;
}

std::string quote_free_seed(const CLI::App& leaf) {
    for (const CLI::Option* opt : leaf.get_options())
        if (opt->get_name() == "--seed") {
            if (opt->count() > 0) return opt->results().back();
            const auto def = opt->get_default_str();
            return def.empty() ? "none" : def;
        }
    return "none";
}

void print_header(std::ostream& out, const std::string& command, const CLI::App& leaf,
                  std::span<const std::string> args) {
    json config;
    config["command"] = command;
    config["options"] = canonical_config(leaf);
    config["version"] = PRUNEKIT_VERSION;
    const std::string canonical = config.dump();
    out << "# prunekit " << PRUNEKIT_VERSION << '\n'
        << "# command: " << command << '\n'
        << "# seed: " << quote_free_seed(leaf) << '\n'
        << "# config-digest: fnv1a64:" << fnv1a64_hex(canonical) << '\n'
        << "# config: " << canonical << '\n'
        << "# argv: " << json(std::vector<std::string>(args.begin(), args.end())).dump() << '\n';
}

}  // namespace

std::string fnv1a64_hex(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream s;
    s << std::hex << std::setw(16) << std::setfill('0') << h;
    return s.str();
}

ReproHeader parse_header(std::string_view text) {
    ReproHeader h;
    std::istringstream in{std::string(text)};
    std::string line;
    bool seen_argv = false;
    while (std::getline(in, line)) {
        if (line.rfind("# ", 0) != 0) continue;
        const auto colon = line.find(": ");
        if (line.rfind("# prunekit ", 0) == 0) {
            h.version = line.substr(11);
        } else if (colon != std::string::npos) {
            const std::string key = line.substr(2, colon - 2);
            const std::string value = line.substr(colon + 2);
            if (key == "command") h.command = value;
            if (key == "config-digest") h.digest = value;
            if (key == "argv") {
                try {
                    h.argv = json::parse(value).get<std::vector<std::string>>();
                } catch (const json::exception& e) {
                    throw ValidationError(std::string("malformed argv header line: ") + e.what());
                }
                seen_argv = true;
            }
        }
    }
    if (!seen_argv) throw ValidationError("no reproducibility header found");
    return h;
}

namespace {

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err, bool replaying) {
    CLI::App app{"prunekit: data-importance scoring, extrapolation and pruning", "prunekit"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    app.set_version_flag("--version", PRUNEKIT_VERSION);

    SimulateOpts sim;
    auto* simulate = app.add_subcommand("simulate", "Generate blobs, train a toy model and record certainty traces");
    add_common(simulate, sim.common);
    simulate->add_option("--seed", sim.seed, "Master seed");
    simulate->add_option("--n-per-class", sim.n_per_class);
    simulate->add_option("--classes", sim.classes);
    simulate->add_option("--dim", sim.dim);
    simulate->add_option("--separation", sim.separation, "Neighboring center distance in units of sigma");
    simulate->add_option("--sigma", sim.sigma);
    simulate->add_option("--test-per-class", sim.test_per_class, "Held-out samples per class for evaluation");
    simulate->add_option("--hidden", sim.hidden, "Hidden layer widths")->delimiter(',');
    simulate->add_option("--epochs", sim.epochs);
    simulate->add_option("--batch-size", sim.batch_size);
    simulate->add_option("--lr", sim.lr);
    simulate->add_option("--momentum", sim.momentum);
    simulate->add_option("--loss", sim.loss, "standard_ce | adversarial_ce | trades");
    simulate->add_option("--beta", sim.beta, "TRADES beta");
    simulate->add_option("--label-smoothing", sim.label_smoothing);
    simulate->add_option("--attack", sim.attack, "auto | none | linf | l2 (preset)");
    simulate->add_option("--epsilon", sim.epsilon);
    simulate->add_option("--step-size", sim.step_size);
    simulate->add_option("--attack-steps", sim.attack_steps);
    simulate->add_flag("--random-start", sim.random_start);
    simulate->add_option("--record", sim.record, "auto or a comma list of clean,adversarial");
    simulate->add_flag("--reuse-train-perturbation", sim.reuse_train_perturbation);
    simulate->add_option("--keep", sim.keep, "Train only on the kept ids of a manifest");

    ScoreOpts sc;
    auto* score = app.add_subcommand("score", "Score certainty traces with DU or FP");
    add_common(score, sc.common);
    score->add_option("input", sc.input, "Trace file")->required();
    score->add_option("--metric", sc.metric, "du | fp");
    score->add_option("--window", sc.window, "DU window J");
    score->add_flag("--paper-denominator", sc.paper_denominator, "Divide DU window sums by K - J");
    score->add_option("--lo", sc.lo, "FP first bin");
    score->add_option("--hi", sc.hi, "FP last bin (0 = K/2)");
    score->add_option("--aggregation", sc.aggregation, "FP aggregation: sum | mean");

    ExtrapolateOpts ex;
    auto* extrapolate = app.add_subcommand("extrapolate", "Extrapolate scores to new samples by k-NN");
    add_common(extrapolate, ex.common);
    extrapolate->add_option("--source-emb", ex.source_emb)->required();
    extrapolate->add_option("--source-scores", ex.source_scores)->required();
    extrapolate->add_option("--dest-emb", ex.dest_emb)->required();
    extrapolate->add_option("--preset", ex.preset, "du-l2 | fp-l2 | du-linf | fp-linf");
    extrapolate->add_option("--k", ex.k);
    extrapolate->add_option("--distance", ex.distance, "euclidean | cosine");

    GridOpts gr;
    auto* gridsearch = app.add_subcommand("gridsearch", "MAE grid over k, distance and source variant");
    add_common(gridsearch, gr.common);
    gridsearch->add_option("spec", gr.spec, "Grid spec JSON")->required();
    gridsearch->add_option("--holdout-fraction", gr.holdout_fraction);
    gridsearch->add_option("--seed", gr.seed);

    PruneOpts pr;
    auto* prune = app.add_subcommand("prune", "Write a pruning manifest");
    add_common(prune, pr.common);
    prune->add_option("input", pr.input, "Score file (or any id-bearing file with --random)")->required();
    prune->add_option("--labels", pr.labels, "Trace or embedding file providing class labels");
    auto* frac = prune->add_option("--fraction", pr.fraction, "Fraction to remove, in [0, 1)");
    auto* cnt = prune->add_option("--count", pr.count, "Exact number to remove");
    frac->excludes(cnt);
    cnt->excludes(frac);
    prune->add_flag("--balanced", pr.balanced, "Prune within each class");
    prune->add_option("--direction", pr.direction, "keep-high | keep-low");
    prune->add_flag("--random", pr.random, "Uniform random removal");
    prune->add_option("--seed", pr.seed);

    auto* analyze = app.add_subcommand("analyze", "Spectral report, manifest overlap, score histograms");
    analyze->require_subcommand(1);
    SpectralOpts sp;
    auto* spectral = analyze->add_subcommand("spectral", "Band magnitudes vs DU with Pearson correlations");
    add_common(spectral, sp.common);
    spectral->add_option("traces", sp.traces)->required();
    spectral->add_option("--du", sp.du, "DU score file")->required();
    spectral->add_option("--footer", sp.footer, "Correlation JSON path (default <output>.footer.json)");
    spectral->add_option("--aggregation", sp.aggregation, "sum | mean");
    spectral->add_option("--low", sp.low, "Low band LO HI")->expected(2);
    spectral->add_option("--high", sp.high, "High band LO HI")->expected(2);
    OverlapOpts ov;
    auto* overlap_cmd = analyze->add_subcommand("overlap", "Fraction of shared removals between two manifests");
    add_common(overlap_cmd, ov.common);
    overlap_cmd->add_option("a", ov.a)->required();
    overlap_cmd->add_option("b", ov.b)->required();
    HistogramOpts hi;
    auto* histogram = analyze->add_subcommand("histogram", "Score distribution as CSV");
    add_common(histogram, hi.common);
    histogram->add_option("scores", hi.scores)->required();
    histogram->add_option("--bins", hi.bins);

    ReplayOpts rp;
    auto* replay = app.add_subcommand("replay", "Re-run a command from its printed reproducibility header");
    replay->add_option("log", rp.log, "Captured stdout containing the header")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        if (code == 0) return kExitOk;
        std::string ignored;
        err << '\n' << leaf_command(app, ignored)->help();
        return kExitValidation;
    }

    std::string command;
    const CLI::App* leaf = leaf_command(app, command);
    if (replaying)
        for (auto* c : {&sim.common, &sc.common, &ex.common, &gr.common, &pr.common, &sp.common, &ov.common, &hi.common})
            c->force = true;
    try {
        if (replay->parsed()) {
            require_input(rp.log);
            std::ifstream in(rp.log);
            const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
            const auto header = parse_header(text);
            if (!header.argv.empty() && header.argv.front() == "replay")
                throw ValidationError("cannot replay a replay");
            std::ostringstream captured;
            const int code = run(header.argv, captured, err, true);
            out << captured.str();
            if (code != kExitOk) return code;
            const auto again = parse_header(captured.str());
            if (again.digest != header.digest)
                throw ValidationError("replayed config digest " + again.digest + " differs from " + header.digest);
            return kExitOk;
        }
        print_header(out, command, *leaf, args);
        if (simulate->parsed()) run_simulate(sim, out, err);
        if (score->parsed()) run_score(sc, out, err);
        if (extrapolate->parsed()) run_extrapolate(ex, *extrapolate, out, err);
        if (gridsearch->parsed()) run_gridsearch(gr, out, err);
        if (prune->parsed()) run_prune(pr, out, err);
        if (spectral->parsed()) run_spectral(sp, out, err);
        if (overlap_cmd->parsed()) run_overlap(ov, out);
        if (histogram->parsed()) run_histogram(hi, out);
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n\n" << leaf->help();
        return kExitIo;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return kExitOk;
}

}  // namespace

int dispatch(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    return run(args, out, err, false);
}

}  // namespace prunekit::cli
