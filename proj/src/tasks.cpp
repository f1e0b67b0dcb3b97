#include "esl/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <string>

#include "esl/data.hpp"
#include "esl/error.hpp"
#include "esl/parallel.hpp"

namespace esl {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Simplicial fit_one_class(const Dataset& data, const EvolutionConfig& cfg) {
    return evolve(data, cfg).best.simplicial;
}

Eigen::VectorXd outlier_scores(const Simplicial& model, const Dataset& data) {
    if (data.dim() != model.dim()) {
        throw InvalidInput("outlier_scores: data dimension " + std::to_string(data.dim()) +
                           " does not match model dimension " + std::to_string(model.dim()));
    }
    const Encoding enc = encode(data, model);
    Eigen::VectorXd out(data.size());
    for (Eigen::Index i = 0; i < data.size(); ++i) out(i) = enc.codes[static_cast<std::size_t>(i)].sq_error;
    return out;
}

namespace {

void require_binary(const Eigen::VectorXd& scores, const std::vector<int>& labels, std::size_t& positives) {
    if (static_cast<std::size_t>(scores.size()) != labels.size()) {
        throw InvalidInput("scores and labels differ in length");
    }
    positives = 0;
    for (int l : labels) {
        if (l != 0 && l != 1) throw InvalidInput("labels must be 0 or 1");
        positives += static_cast<std::size_t>(l);
    }
    if (positives == 0 || positives == labels.size()) {
        throw InvalidInput("both classes must be present");
    }
}

}  // namespace

double auc_roc(const Eigen::VectorXd& scores, const std::vector<int>& labels) {
    std::size_t positives = 0;
    require_binary(scores, labels, positives);
    const std::size_t n = labels.size();
    const std::size_t negatives = n - positives;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores(static_cast<Eigen::Index>(a)) < scores(static_cast<Eigen::Index>(b));
    });

    // Sum of (1-based, tie-averaged) ranks of the positives.
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && scores(static_cast<Eigen::Index>(order[j + 1])) == scores(static_cast<Eigen::Index>(order[i]))) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) {
            if (labels[order[k]] == 1) rank_sum += avg_rank;
        }
        i = j + 1;
    }
    const double p = static_cast<double>(positives);
    const double u = rank_sum - p * (p + 1.0) / 2.0;
    return u / (p * static_cast<double>(negatives));
}

double precision_at_n(const Eigen::VectorXd& scores, const std::vector<int>& labels) {
    std::size_t positives = 0;
    require_binary(scores, labels, positives);
    std::vector<std::size_t> order(labels.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores(static_cast<Eigen::Index>(a)) > scores(static_cast<Eigen::Index>(b));
    });
    std::size_t hits = 0;
    for (std::size_t k = 0; k < positives; ++k) hits += static_cast<std::size_t>(labels[order[k]]);
    return static_cast<double>(hits) / static_cast<double>(positives);
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& data, double train_frac, std::uint64_t seed) {
    if (!(train_frac > 0.0 && train_frac < 1.0)) throw InvalidInput("train_frac must lie in (0, 1)");
    const Eigen::Index n = data.size();
    const auto n_train = static_cast<Eigen::Index>(std::floor(train_frac * static_cast<double>(n)));
    if (n_train < 1 || n_train >= n) {
        throw InvalidInput("split of " + std::to_string(n) + " samples at " + std::to_string(train_frac) +
                           " leaves one side empty");
    }
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    Rng rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    const std::vector<Eigen::Index> train(order.begin(), order.begin() + n_train);
    const std::vector<Eigen::Index> test(order.begin() + n_train, order.end());
    return {data.subset(train), data.subset(test)};
}

MulticlassModel fit_multiclass(const Dataset& data, const EvolutionConfig& cfg) {
    if (!data.labels) throw InvalidInput("fit_multiclass: data has no labels");
    const std::set<int> classes(data.labels->begin(), data.labels->end());
    if (classes.size() < 2) throw InvalidInput("fit_multiclass: need at least two classes");

    const std::vector<int> labels(classes.begin(), classes.end());
    std::vector<Simplicial> fitted(labels.size());
    // Classes run one after another; each evolve may still use cfg.threads.
    for (std::size_t c = 0; c < labels.size(); ++c) {
        std::vector<Eigen::Index> members;
        for (std::size_t i = 0; i < data.labels->size(); ++i) {
            if ((*data.labels)[i] == labels[c]) members.push_back(static_cast<Eigen::Index>(i));
        }
        Dataset subset = data.subset(members);
        subset.labels.reset();
        EvolutionConfig class_cfg = cfg;
        class_cfg.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(c));
        fitted[c] = fit_one_class(subset, class_cfg);
    }
    MulticlassModel model;
    model.config = cfg;
    for (std::size_t c = 0; c < labels.size(); ++c) model.class_models.emplace(labels[c], std::move(fitted[c]));
    return model;
}

int predict(const MulticlassModel& model, const Eigen::VectorXd& y) {
    if (model.class_models.empty()) throw InvalidInput("predict: model has no classes");
    int best_label = model.class_models.begin()->first;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [label, s] : model.class_models) {
        const double err = reconstruction_error(y, s);
        if (err < best) {
            best = err;
            best_label = label;
        }
    }
    return best_label;
}

double accuracy(const MulticlassModel& model, const Dataset& data) {
    if (!data.labels) throw InvalidInput("accuracy: data has no labels");
    std::size_t correct = 0;
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        if (predict(model, data.points.col(i)) == (*data.labels)[static_cast<std::size_t>(i)]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

EvalReport evaluate_outlier_detection(const Dataset& data, const EvolutionConfig& cfg, int runs,
                                      double train_frac, std::uint64_t seed,
                                      std::optional<double> span) {
    if (!data.labels) throw InvalidInput("outlier evaluation needs labels (1 = outlier)");
    if (runs < 1) throw InvalidInput("runs must be >= 1");

    EvalReport report;
    report.runs = runs;
    report.per_run_scores.resize(static_cast<std::size_t>(runs));
    for (int r = 0; r < runs; ++r) {
        auto [train, test] = split_train_test(data, train_frac, derive_seed(seed, static_cast<std::uint64_t>(r)));
        const auto [train_norm, spec] = normalize(train, NormalizationMode::MinMax, span);
        const Dataset test_norm = apply_normalization(spec, test);

        Dataset unlabeled(train_norm.points);
        EvolutionConfig run_cfg = cfg;
        run_cfg.seed = derive_seed(cfg.seed, 1000 + static_cast<std::uint64_t>(r));
        const Simplicial model = fit_one_class(unlabeled, run_cfg);
        const Eigen::VectorXd scores = outlier_scores(model, test_norm);
        RunScore& score = report.per_run_scores[static_cast<std::size_t>(r)];
        score.auc_roc = auc_roc(scores, *test.labels);
        score.precision_at_n = precision_at_n(scores, *test.labels);
    }

    auto mean_stdev = [&](auto field, double& mean, double& stdev) {
        mean = 0.0;
        for (const auto& s : report.per_run_scores) mean += s.*field;
        mean /= runs;
        double var = 0.0;
        for (const auto& s : report.per_run_scores) var += (s.*field - mean) * (s.*field - mean);
        stdev = runs > 1 ? std::sqrt(var / (runs - 1)) : 0.0;
    };
    mean_stdev(&RunScore::auc_roc, report.auc_roc, report.auc_roc_stdev);
    mean_stdev(&RunScore::precision_at_n, report.precision_at_n, report.precision_at_n_stdev);
    return report;
}

}  // namespace esl
