#include "esl/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "esl/data.hpp"
#include "esl/error.hpp"
#include "esl/evolution.hpp"
#include "esl/svg.hpp"
#include "esl/tasks.hpp"

namespace esl::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fnv1a_hex(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
    }
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

int env_threads() {
    if (const char* v = std::getenv("ESL_THREADS")) {
        try {
            return std::max(0, std::stoi(v));
        } catch (...) {
        }
    }
    return 1;
}

// Hyperparameter flags shared by train and eval.
struct ConfigFlags {
    EvolutionConfig cfg;
    std::optional<double> span;

    void attach(CLI::App& app) {
        app.add_option("--seed", cfg.seed, "Master random seed")->capture_default_str();
        app.add_option("--beta", cfg.fitness.beta, "Compactness weight beta")->capture_default_str()->check(CLI::NonNegativeNumber);
        app.add_option("--gamma", cfg.fitness.gamma, "Offset gamma inside the compactness log")->capture_default_str()->check(CLI::PositiveNumber);
        app.add_option("--population", cfg.population_size, "Population size")->capture_default_str()->check(CLI::PositiveNumber);
        app.add_option("--generations", cfg.generations, "Number of generations")->capture_default_str()->check(CLI::PositiveNumber);
        app.add_option("--children", cfg.children_per_parent, "Mutated children per survivor")->capture_default_str()->check(CLI::PositiveNumber);
        app.add_option("--breed-pairs", cfg.breed_pairs, "Bred children per generation")->capture_default_str()->check(CLI::NonNegativeNumber);
        app.add_option("--kmeans-k", cfg.kmeans_k_init, "Initial k for high-dimensional init")->capture_default_str()->check(CLI::PositiveNumber);
        app.add_option("--kmeans-dim-threshold", cfg.kmeans_dim_threshold, "Dimension above which k-means init is used")
            ->capture_default_str()->check(CLI::PositiveNumber);
        app.add_option("--jitter", cfg.vertex_jitter, "Std-dev of new-vertex noise (normalised units)")
            ->capture_default_str()->check(CLI::NonNegativeNumber);
        app.add_option("--span", span, "Feature width after min-max scaling (default 1; 16/sqrt(dim) for multi-class)")
            ->check(CLI::PositiveNumber);
    }

    json to_json() const {
        return {{"seed", cfg.seed},
                {"beta", cfg.fitness.beta},
                {"gamma", cfg.fitness.gamma},
                {"population", cfg.population_size},
                {"generations", cfg.generations},
                {"children", cfg.children_per_parent},
                {"breed_pairs", cfg.breed_pairs},
                {"kmeans_k", cfg.kmeans_k_init},
                {"kmeans_dim_threshold", cfg.kmeans_dim_threshold},
                {"jitter", cfg.vertex_jitter},
                {"span", span ? json(*span) : json(nullptr)}};
    }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void write_manifest(const fs::path& path, const std::string& command, const std::vector<std::string>& args,
                    const ConfigFlags& flags, const std::vector<fs::path>& inputs, const std::vector<fs::path>& outputs,
                    double wall_clock, json history) {
    json manifest;
    manifest["command"] = command;
    manifest["argv"] = args;
    manifest["config"] = flags.to_json();
    manifest["seed"] = flags.cfg.seed;
    json hashes = json::object();
    for (const auto& p : inputs) hashes[p.string()] = "fnv1a64:" + fnv1a_hex(p);
    manifest["input_hashes"] = hashes;
    json outs = json::array();
    for (const auto& p : outputs) outs.push_back(p.string());
    manifest["outputs"] = outs;
    manifest["wall_clock_seconds"] = wall_clock;
    manifest["history"] = std::move(history);
    write_file_atomic(path, manifest.dump(2) + "\n");
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double stdev_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

void emit_json(const json& report, const std::string& target, std::ostream& out) {
    if (target.empty()) return;
    if (target == "-") {
        out << report.dump(2) << "\n";
    } else {
        write_file_atomic(target, report.dump(2) + "\n");
    }
}

std::string fixed(double v, int precision = 4) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(precision) << v;
    return ss.str();
}

// ---------------------------------------------------------------------------

struct TrainOptions {
    std::string data;
    std::string out;
    bool labels = false;
    bool no_normalize = false;
};

int cmd_train(const TrainOptions& opt, ConfigFlags& flags, const std::vector<std::string>& args, std::ostream& out) {
    const auto start = std::chrono::steady_clock::now();
    const Dataset raw = load_csv(opt.data, opt.labels);
    std::optional<NormalizationSpec> spec;
    Dataset data = raw;
    if (!opt.no_normalize) {
        auto [normed, s] = normalize(raw, NormalizationMode::MinMax,
                                       opt.labels ? flags.span.value_or(classification_span(raw.dim())) : flags.span);
        data = std::move(normed);
        spec = std::move(s);
    }
    const EvolutionConfig& cfg = flags.cfg;

    if (!opt.labels) {
        Dataset unlabeled(data.points);
        const EvolutionResult result = evolve(unlabeled, cfg);
        const fs::path out_path(opt.out);
        save_model(ModelFile{result.best.simplicial, spec, {cfg.fitness.beta, cfg.fitness.gamma, cfg.seed, std::nullopt}},
                   out_path);
        fs::path manifest = out_path;
        manifest += ".manifest.json";
        write_manifest(manifest, "train", args, flags, {opt.data}, {out_path}, seconds_since(start), result.history);
        out << "fitness " << fixed(result.best.fitness, 6) << "  sse " << fixed(result.best.sse, 6) << "  simplices "
            << result.best.simplicial.simplex_count() << "  vertices " << result.best.simplicial.vertex_count() << "\n";
        return 0;
    }

    const std::set<int> classes(data.labels->begin(), data.labels->end());
    if (classes.size() < 2) throw InvalidInput("--labels training needs at least two classes");
    const fs::path dir(opt.out);
    fs::create_directories(dir);
    std::vector<fs::path> outputs;
    json history = json::object();
    std::uint64_t index = 0;
    // Same per-class seeding as fit_multiclass.
    for (int label : classes) {
        std::vector<Eigen::Index> members;
        for (std::size_t i = 0; i < data.labels->size(); ++i) {
            if ((*data.labels)[i] == label) members.push_back(static_cast<Eigen::Index>(i));
        }
        Dataset subset = data.subset(members);
        subset.labels.reset();
        EvolutionConfig class_cfg = cfg;
        class_cfg.seed = derive_seed(cfg.seed, index++);
        const EvolutionResult result = evolve(subset, class_cfg);
        const fs::path path = dir / ("model_" + std::to_string(label) + ".json");
        save_model(ModelFile{result.best.simplicial, spec, {cfg.fitness.beta, cfg.fitness.gamma, class_cfg.seed, label}},
                   path);
        outputs.push_back(path);
        history[std::to_string(label)] = result.history;
        out << "class " << label << "  fitness " << fixed(result.best.fitness, 6) << "  sse "
            << fixed(result.best.sse, 6) << "  simplices " << result.best.simplicial.simplex_count() << "\n";
    }
    write_manifest(dir / "manifest.json", "train", args, flags, {opt.data}, outputs, seconds_since(start), history);
    return 0;
}

struct EvalOptions {
    std::string data;
    std::string test;
    int runs = 10;
    double train_frac = 0.6;
    std::uint64_t split_seed = 0;
    std::string json_target;
};

int cmd_eval_outlier(const EvalOptions& opt, ConfigFlags& flags, std::ostream& out) {
    const Dataset data = load_csv(opt.data, true);
    const EvalReport report = evaluate_outlier_detection(data, flags.cfg, opt.runs, opt.train_frac, opt.split_seed,
                                                         flags.span);

    out << "run   auc_roc   p@n\n";
    json runs = json::array();
    for (std::size_t r = 0; r < report.per_run_scores.size(); ++r) {
        const auto& s = report.per_run_scores[r];
        out << std::setw(3) << r << "   " << fixed(s.auc_roc) << "    " << fixed(s.precision_at_n) << "\n";
        runs.push_back({{"run", r}, {"auc_roc", s.auc_roc}, {"precision_at_n", s.precision_at_n}});
    }
    out << "mean  " << fixed(report.auc_roc) << "    " << fixed(report.precision_at_n) << "\n";
    out << "std   " << fixed(report.auc_roc_stdev) << "    " << fixed(report.precision_at_n_stdev) << "\n";

    json doc = {{"metric", "auc_roc"},
                {"runs", runs},
                {"mean", report.auc_roc},
                {"stdev", report.auc_roc_stdev},
                {"precision_at_n", {{"mean", report.precision_at_n}, {"stdev", report.precision_at_n_stdev}}},
                {"config", flags.to_json()},
                {"train_frac", opt.train_frac}};
    emit_json(doc, opt.json_target, out);
    return 0;
}

int cmd_eval_classify(const EvalOptions& opt, ConfigFlags& flags, std::ostream& out) {
    const Dataset data = load_csv(opt.data, true);
    std::optional<Dataset> fixed_test;
    if (!opt.test.empty()) fixed_test = load_csv(opt.test, true);
    const int runs = fixed_test ? 1 : opt.runs;

    std::vector<double> accuracies;
    json run_docs = json::array();
    out << "run   accuracy\n";
    for (int r = 0; r < runs; ++r) {
        Dataset train = data;
        Dataset test;
        if (fixed_test) {
            test = *fixed_test;
        } else {
            auto split = split_train_test(data, opt.train_frac, derive_seed(opt.split_seed, static_cast<std::uint64_t>(r)));
            train = std::move(split.first);
            test = std::move(split.second);
        }
        const auto [train_norm, spec] = normalize(train, NormalizationMode::MinMax,
                                                 flags.span.value_or(classification_span(train.dim())));
        EvolutionConfig cfg = flags.cfg;
        cfg.seed = derive_seed(flags.cfg.seed, 1000 + static_cast<std::uint64_t>(r));
        const MulticlassModel model = fit_multiclass(train_norm, cfg);
        const double acc = accuracy(model, apply_normalization(spec, test));
        accuracies.push_back(acc);
        run_docs.push_back({{"run", r}, {"accuracy", acc}});
        out << std::setw(3) << r << "   " << fixed(acc) << "\n";
    }
    out << "mean  " << fixed(mean_of(accuracies)) << "\nstd   " << fixed(stdev_of(accuracies)) << "\n";
    json doc = {{"metric", "accuracy"},
                {"runs", run_docs},
                {"mean", mean_of(accuracies)},
                {"stdev", stdev_of(accuracies)},
                {"config", flags.to_json()},
                {"train_frac", opt.train_frac}};
    emit_json(doc, opt.json_target, out);
    return 0;
}

struct GenOptions {
    std::string kind;
    int n = 500;
    std::optional<double> noise;
    std::uint64_t seed = 0;
    std::string source;
    double scale = 0.25;
    double pixel_max = 1.0;
    std::string out;
};

int cmd_gen(const GenOptions& opt, std::ostream& out) {
    Dataset data;
    if (opt.kind == "mnist8") {
        if (opt.source.empty()) throw UsageError("gen --kind mnist8 requires --source");
        Dataset images = load_csv(opt.source, false);
        images.points /= opt.pixel_max;
        data = build_mnist8(images, opt.scale);
    } else {
        const auto kind = parse_synthetic_kind(opt.kind);
        if (!kind) {
            std::string valid;
            for (const auto& k : synthetic_kind_names()) valid += k + ", ";
            throw UsageError("unknown kind '" + opt.kind + "'; valid kinds: " + valid + "mnist8");
        }
        data = gen_synthetic({*kind, opt.n, opt.noise.value_or(default_noise(*kind)), opt.seed});
    }
    std::vector<std::string> header;
    for (Eigen::Index r = 0; r < data.dim(); ++r) header.push_back("x" + std::to_string(r));
    header.push_back("label");
    const std::string csv = to_csv(data, header);
    if (opt.out.empty() || opt.out == "-") {
        out << csv;
    } else {
        write_file_atomic(opt.out, csv);
    }
    return 0;
}

struct RenderOptions {
    std::vector<std::string> models;
    std::string data;
    bool labels = false;
    std::string out;
};

int cmd_render(const RenderOptions& opt, std::ostream& out) {
    std::vector<RenderLayer> layers;
    std::optional<NormalizationSpec> spec;
    for (const auto& path : opt.models) {
        ModelFile m = load_model(path);
        if (m.simplicial.dim() != 2) throw InvalidInput("render supports 2-D models only");
        if (!spec && m.normalization) spec = m.normalization;
        layers.push_back({std::move(m.simplicial), m.meta.label});
    }
    std::optional<Dataset> data;
    if (!opt.data.empty()) {
        Dataset d = load_csv(opt.data, opt.labels);
        data = spec ? apply_normalization(*spec, d) : d;
    }
    const std::string svg = render_svg(layers, data);
    if (opt.out.empty() || opt.out == "-") {
        out << svg;
    } else {
        write_file_atomic(opt.out, svg);
    }
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Evolutionary simplicial learning"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    ConfigFlags train_flags;
    train_flags.cfg.threads = env_threads();
    TrainOptions train_opt;
    auto* train = app.add_subcommand("train", "Fit a one-class model, or one model per class with --labels");
    train->add_option("--data", train_opt.data, "Training CSV")->required()->check(CLI::ExistingFile);
    train->add_option("--out", train_opt.out, "Model file (or directory with --labels)")->required();
    train->add_flag("--labels", train_opt.labels, "Last CSV column holds class labels");
    train->add_flag("--no-normalize", train_opt.no_normalize, "Skip min-max normalisation");
    train_flags.attach(*train);

    auto* eval = app.add_subcommand("eval", "Evaluate on labelled data");
    eval->require_subcommand(1);
    ConfigFlags outlier_flags;
    outlier_flags.cfg.threads = env_threads();
    EvalOptions outlier_opt;
    auto* outlier = eval->add_subcommand("outlier", "Repeated train/test splits; AUC-ROC and P@n (label 1 = outlier)");
    outlier->add_option("--data", outlier_opt.data, "Labelled CSV")->required()->check(CLI::ExistingFile);
    outlier->add_option("--runs", outlier_opt.runs, "Repetitions")->capture_default_str()->check(CLI::PositiveNumber);
    outlier->add_option("--train-frac", outlier_opt.train_frac, "Training fraction")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    outlier->add_option("--split-seed", outlier_opt.split_seed, "Seed for the splits")->capture_default_str();
    outlier->add_option("--json", outlier_opt.json_target, "Write the JSON report here ('-' for stdout)");
    outlier_flags.attach(*outlier);

    ConfigFlags classify_flags;
    classify_flags.cfg.threads = env_threads();
    EvalOptions classify_opt;
    classify_opt.runs = 1;
    auto* classify = eval->add_subcommand("classify", "Multi-class accuracy on a held-out split or --test file");
    classify->add_option("--data", classify_opt.data, "Labelled training CSV")->required()->check(CLI::ExistingFile);
    classify->add_option("--test", classify_opt.test, "Labelled test CSV (otherwise split --data)")->check(CLI::ExistingFile);
    classify->add_option("--runs", classify_opt.runs, "Repetitions when splitting")->capture_default_str()->check(CLI::PositiveNumber);
    classify->add_option("--train-frac", classify_opt.train_frac, "Training fraction")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    classify->add_option("--split-seed", classify_opt.split_seed, "Seed for the splits")->capture_default_str();
    classify->add_option("--json", classify_opt.json_target, "Write the JSON report here ('-' for stdout)");
    classify_flags.attach(*classify);

    GenOptions gen_opt;
    auto* gen = app.add_subcommand("gen", "Generate a labelled benchmark CSV");
    gen->add_option("--kind", gen_opt.kind, "Dataset kind")->required();
    gen->add_option("--n", gen_opt.n, "Samples per class")->capture_default_str()->check(CLI::PositiveNumber);
    gen->add_option("--noise", gen_opt.noise, "Gaussian noise std-dev (default depends on kind)")->check(CLI::NonNegativeNumber);
    gen->add_option("--seed", gen_opt.seed, "Random seed")->capture_default_str();
    gen->add_option("--source", gen_opt.source, "mnist8: CSV of digit-8 pixel rows")->check(CLI::ExistingFile);
    gen->add_option("--scale", gen_opt.scale, "mnist8: pale-class intensity scale")->capture_default_str();
    gen->add_option("--pixel-max", gen_opt.pixel_max, "mnist8: divide source pixels by this")->capture_default_str()->check(CLI::PositiveNumber);
    gen->add_option("--out", gen_opt.out, "Output CSV ('-' for stdout)");

    RenderOptions render_opt;
    auto* render = app.add_subcommand("render", "Draw 2-D models as SVG");
    render->add_option("--model", render_opt.models, "Model JSON (repeatable)")->required()->check(CLI::ExistingFile);
    render->add_option("--data", render_opt.data, "CSV to scatter underneath")->check(CLI::ExistingFile);
    render->add_flag("--labels", render_opt.labels, "Data CSV has a label column");
    render->add_option("--out", render_opt.out, "Output SVG ('-' for stdout)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << "run with --help for usage\n";
        return 2;
    }

    try {
        if (*train) return cmd_train(train_opt, train_flags, args, out);
        if (*outlier) return cmd_eval_outlier(outlier_opt, outlier_flags, out);
        if (*classify) return cmd_eval_classify(classify_opt, classify_flags, out);
        if (*gen) return cmd_gen(gen_opt, out);
        if (*render) return cmd_render(render_opt, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

int run(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

}  // namespace esl::cli
