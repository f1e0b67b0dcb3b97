#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "esl/evolution.hpp"
#include "esl/model.hpp"

namespace esl {

/// One simplicial per class label.
struct MulticlassModel {
    std::map<int, Simplicial> class_models;
    EvolutionConfig config;
};

struct RunScore {
    double auc_roc = 0.0;
    double precision_at_n = 0.0;
};

struct EvalReport {
    double auc_roc = 0.0;         // mean over runs
    double auc_roc_stdev = 0.0;
    double precision_at_n = 0.0;  // mean over runs
    double precision_at_n_stdev = 0.0;
    int runs = 0;
    std::vector<RunScore> per_run_scores;
};

/// Unsupervised fit; labels, if present, are ignored.
Simplicial fit_one_class(const Dataset& data, const EvolutionConfig& cfg);

/// Squared distance of every sample to `model`. Larger means more outlying.
Eigen::VectorXd outlier_scores(const Simplicial& model, const Dataset& data);

/// Mann-Whitney AUC with average ranks for ties. `labels` are 1 (positive)
/// or 0. Throws InvalidInput unless both classes are present.
double auc_roc(const Eigen::VectorXd& scores, const std::vector<int>& labels);

/// Fraction of true positives among the top-n scores, n = number of
/// positives. Ties at the cutoff go to the lower original index.
double precision_at_n(const Eigen::VectorXd& scores, const std::vector<int>& labels);

/// Uniform random permutation; the first floor(train_frac * n) samples train.
std::pair<Dataset, Dataset> split_train_test(const Dataset& data, double train_frac, std::uint64_t seed);

/// Independent fit_one_class per label, each with its own seed derived from cfg.seed.
MulticlassModel fit_multiclass(const Dataset& data, const EvolutionConfig& cfg);

/// Label whose simplicial reconstructs `y` best; ties go to the lowest label.
int predict(const MulticlassModel& model, const Eigen::VectorXd& y);

/// Fraction of samples of `data` whose prediction matches the label.
double accuracy(const MulticlassModel& model, const Dataset& data);

/// Repeated split -> min-max normalise on train -> fit -> score test -> AUC/P@n.
/// Labels: 1 = outlier, 0 = inlier; training never sees them.
EvalReport evaluate_outlier_detection(const Dataset& data, const EvolutionConfig& cfg, int runs,
                                      double train_frac, std::uint64_t seed,
                                      std::optional<double> span = std::nullopt);

/// Seed for stream `index` derived from `master` (splitmix64).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace esl
