#pragma once

#include "ldscreen/dataset.hpp"
#include "ldscreen/prediction.hpp"
#include "ldscreen/tree.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ldscreen {

struct ConfusionMatrix {
    std::vector<std::string> classes;
    /// counts[actual][predicted]
    std::vector<std::vector<std::size_t>> counts;

    std::size_t total() const;
    std::size_t correct() const;

    bool operator==(const ConfusionMatrix&) const = default;
};

/// Tallies (actual, predicted) class-index pairs. Throws Error on unequal
/// lengths or an index outside `classes`.
ConfusionMatrix confusion(std::span<const std::size_t> actual, std::span<const std::size_t> predicted,
                          std::vector<std::string> classes);
ConfusionMatrix confusion(std::span<const std::string> actual, std::span<const std::string> predicted,
                          std::vector<std::string> classes);

struct ClassMetrics {
    double tp_rate = 0.0;
    double fp_rate = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f_measure = 0.0;
    /// Only known when per-instance scores were available.
    std::optional<double> roc_area;

    bool operator==(const ClassMetrics&) const = default;
};

struct EvaluationReport {
    ConfusionMatrix matrix;
    std::vector<ClassMetrics> per_class;
    double accuracy = 0.0;

    double error_rate() const { return 1.0 - accuracy; }

    bool operator==(const EvaluationReport&) const = default;
};

/// One-vs-rest rates per class. Zero denominators give 0 (precision, F,
/// FP rate). Throws Error on an empty matrix.
EvaluationReport per_class_metrics(const ConfusionMatrix& cm);

/// Probability that a random positive scores above a random negative, ties
/// counting one half. Throws Error unless both groups are present.
double roc_area(std::span<const double> scores, std::span<const std::size_t> actual, std::size_t positive_class);

using Classifier = std::function<Prediction(const Instance&)>;
using Learner = std::function<Classifier(const Dataset&)>;

struct CrossValidationOptions {
    std::size_t folds = 2;
    std::uint64_t seed = 0;
    bool stratify = true;
    /// Train and predict the folds on separate threads.
    bool parallel = false;
};

/// Out-of-fold prediction for every instance, in dataset order.
std::vector<Prediction> cross_validate_predictions(const Dataset& d, const Learner& learner,
                                                   const CrossValidationOptions& options = {});

/// Confusion matrix, metrics and per-class ROC area for `predictions`
/// aligned with `d`. Every instance needs a class value.
EvaluationReport evaluate_predictions(const Dataset& d, std::span<const Prediction> predictions);

/// Pools the out-of-fold predictions into a single report.
EvaluationReport cross_validate(const Dataset& d, const Learner& learner, const CrossValidationOptions& options = {});

/// Always predicts the training majority class with the training class
/// frequencies as its distribution.
Learner majority_learner();
Learner tree_learner(TreeConfig config = {});
/// Rules read off a tree, optionally simplified on the training fold.
Learner rules_learner(TreeConfig config = {}, bool simplify = true);

/// Correct/incorrect lines, the per-class metric table and the matrix.
std::string to_text(const EvaluationReport& r);
std::string to_csv(const EvaluationReport& r);

} // namespace ldscreen
