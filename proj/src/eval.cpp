#include "ldscreen/eval.hpp"

#include "ldscreen/error.hpp"
#include "ldscreen/rules.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <future>
#include <memory>
#include <numeric>

namespace ldscreen {

std::size_t ConfusionMatrix::total() const {
    std::size_t n = 0;
    for (const auto& row : counts) n = std::accumulate(row.begin(), row.end(), n);
    return n;
}

std::size_t ConfusionMatrix::correct() const {
    std::size_t n = 0;
    for (std::size_t c = 0; c < counts.size(); ++c) n += counts[c][c];
    return n;
}

ConfusionMatrix confusion(std::span<const std::size_t> actual, std::span<const std::size_t> predicted,
                          std::vector<std::string> classes) {
    if (actual.size() != predicted.size()) throw Error("actual and predicted label counts differ");
    const auto n = classes.size();
    ConfusionMatrix cm{std::move(classes), std::vector<std::vector<std::size_t>>(n, std::vector<std::size_t>(n, 0))};
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (actual[i] >= n || predicted[i] >= n) throw Error(fmt::format("label index out of range at position {}", i));
        ++cm.counts[actual[i]][predicted[i]];
    }
    return cm;
}

ConfusionMatrix confusion(std::span<const std::string> actual, std::span<const std::string> predicted,
                          std::vector<std::string> classes) {
    auto index = [&](const std::string& label) {
        const auto it = std::find(classes.begin(), classes.end(), label);
        if (it == classes.end()) throw Error("unknown label '" + label + "'");
        return static_cast<std::size_t>(it - classes.begin());
    };
    std::vector<std::size_t> a;
    std::vector<std::size_t> p;
    for (const auto& s : actual) a.push_back(index(s));
    for (const auto& s : predicted) p.push_back(index(s));
    return confusion(a, p, std::move(classes));
}

EvaluationReport per_class_metrics(const ConfusionMatrix& cm) {
    const auto total = cm.total();
    if (total == 0) throw Error("metrics of an empty confusion matrix");
    const auto n = cm.counts.size();

    EvaluationReport r;
    r.matrix = cm;
    r.accuracy = static_cast<double>(cm.correct()) / static_cast<double>(total);
    for (std::size_t c = 0; c < n; ++c) {
        const double tp = static_cast<double>(cm.counts[c][c]);
        double row = 0.0;
        double col = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            row += static_cast<double>(cm.counts[c][j]);
            col += static_cast<double>(cm.counts[j][c]);
        }
        const double fn = row - tp;
        const double fp = col - tp;
        const double tn = static_cast<double>(total) - tp - fn - fp;

        ClassMetrics m;
        m.tp_rate = row > 0.0 ? tp / row : 0.0;
        m.recall = m.tp_rate;
        m.fp_rate = fp + tn > 0.0 ? fp / (fp + tn) : 0.0;
        m.precision = col > 0.0 ? tp / col : 0.0;
        const double pr = m.precision + m.recall;
        m.f_measure = pr > 0.0 ? 2.0 * m.precision * m.recall / pr : 0.0;
        r.per_class.push_back(m);
    }
    return r;
}

double roc_area(std::span<const double> scores, std::span<const std::size_t> actual, std::size_t positive_class) {
    if (scores.size() != actual.size()) throw Error("scores and labels differ in length");
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    for (double s : scores) {
        if (!std::isfinite(s)) throw Error("ROC scores must be finite");
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Mann-Whitney: sum of positive midranks.
    double positives = 0.0;
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t t = i; t < j; ++t) {
            if (actual[order[t]] == positive_class) {
                positives += 1.0;
                rank_sum += midrank;
            }
        }
        i = j;
    }
    const double negatives = static_cast<double>(scores.size()) - positives;
    if (positives == 0.0 || negatives == 0.0) throw Error("ROC area needs both positive and negative instances");
    return (rank_sum - positives * (positives + 1.0) / 2.0) / (positives * negatives);
}

std::vector<Prediction> cross_validate_predictions(const Dataset& d, const Learner& learner,
                                                   const CrossValidationOptions& options) {
    const auto folds = stratified_folds(d, options.folds, options.seed, options.stratify);
    std::vector<std::vector<Prediction>> fold_predictions(folds.size());

    auto run = [&](std::size_t f) {
        const auto classifier = learner(folds[f].train);
        std::vector<Prediction> out;
        out.reserve(folds[f].test.size());
        for (const auto& x : folds[f].test.instances()) out.push_back(classifier(x));
        return out;
    };
    if (options.parallel) {
        std::vector<std::future<std::vector<Prediction>>> jobs;
        for (std::size_t f = 0; f < folds.size(); ++f) jobs.push_back(std::async(std::launch::async, run, f));
        for (std::size_t f = 0; f < folds.size(); ++f) fold_predictions[f] = jobs[f].get();
    } else {
        for (std::size_t f = 0; f < folds.size(); ++f) fold_predictions[f] = run(f);
    }

    std::vector<Prediction> pooled(d.size());
    std::vector<bool> seen(d.size(), false);
    for (std::size_t f = 0; f < folds.size(); ++f) {
        for (std::size_t t = 0; t < folds[f].test_indices.size(); ++t) {
            const auto i = folds[f].test_indices[t];
            if (seen[i]) throw Error("instance predicted twice during cross-validation");
            seen[i] = true;
            pooled[i] = std::move(fold_predictions[f][t]);
        }
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) throw Error("instance never predicted");
    return pooled;
}

EvaluationReport evaluate_predictions(const Dataset& d, std::span<const Prediction> predictions) {
    if (predictions.size() != d.size()) throw Error("one prediction per instance required");
    const auto n_classes = d.schema().num_classes();
    std::vector<std::size_t> actual;
    std::vector<std::size_t> predicted;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const auto c = d.label(i);
        if (!c) throw Error(fmt::format("instance {} has no class value", i + 1));
        actual.push_back(*c);
        predicted.push_back(predictions[i].label);
    }
    auto report = per_class_metrics(confusion(actual, predicted, d.schema().class_attribute().values));

    for (std::size_t c = 0; c < n_classes; ++c) {
        const bool pos = std::find(actual.begin(), actual.end(), c) != actual.end();
        const bool neg = std::any_of(actual.begin(), actual.end(), [&](std::size_t a) { return a != c; });
        if (!pos || !neg) continue;
        std::vector<double> scores;
        scores.reserve(predictions.size());
        for (const auto& p : predictions) {
            if (p.distribution.size() != n_classes) throw Error("prediction distribution has the wrong size");
            scores.push_back(p.distribution[c]);
        }
        report.per_class[c].roc_area = roc_area(scores, actual, c);
    }
    return report;
}

EvaluationReport cross_validate(const Dataset& d, const Learner& learner, const CrossValidationOptions& options) {
    const auto predictions = cross_validate_predictions(d, learner, options);
    return evaluate_predictions(d, predictions);
}

Learner majority_learner() {
    return [](const Dataset& train) -> Classifier {
        const auto counts = train.class_counts();
        const double n = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::size_t{0}));
        Prediction p;
        p.distribution.resize(counts.size(), 0.0);
        for (std::size_t c = 0; c < counts.size(); ++c) p.distribution[c] = n > 0 ? static_cast<double>(counts[c]) / n : 0.0;
        p.label = static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
        return [p](const Instance&) { return p; };
    };
}

Learner tree_learner(TreeConfig config) {
    return [config](const Dataset& train) -> Classifier {
        auto model = std::make_shared<const DecisionTreeModel>(build_tree(train, config));
        return [model](const Instance& x) { return classify(*model, x); };
    };
}

Learner rules_learner(TreeConfig config, bool simplify) {
    return [config, simplify](const Dataset& train) -> Classifier {
        auto rules = extract_rules(build_tree(train, config));
        if (simplify) rules = simplify_rules(rules, train);
        auto shared = std::make_shared<const RuleSet>(std::move(rules));
        return [shared](const Instance& x) { return rules_predict(*shared, x); };
    };
}

std::string to_text(const EvaluationReport& r) {
    const auto total = r.matrix.total();
    const auto correct = r.matrix.correct();
    std::string out;
    out += fmt::format("Correctly Classified Instances   {:>6} Nos. {:>7.2f} %\n", correct, 100.0 * r.accuracy);
    out += fmt::format("Incorrectly Classified Instances {:>6} Nos. {:>7.2f} %\n", total - correct,
                       100.0 * r.error_rate());
    out += fmt::format("Total Number of Instances        {:>6}\n\n", total);

    out += "TP Rate  FP Rate  Precision  Recall  F-Measure  ROC Area  Class\n";
    for (std::size_t c = 0; c < r.per_class.size(); ++c) {
        const auto& m = r.per_class[c];
        const auto roc = m.roc_area ? fmt::format("{:.3f}", *m.roc_area) : std::string("?");
        out += fmt::format("{:>7.3f}  {:>7.3f}  {:>9.3f}  {:>6.3f}  {:>9.3f}  {:>8}  {}\n", m.tp_rate, m.fp_rate,
                           m.precision, m.recall, m.f_measure, roc, r.matrix.classes[c]);
    }

    out += "\nConfusion Matrix (rows = actual, columns = predicted)\n";
    for (const auto& name : r.matrix.classes) out += fmt::format("{:>7}", name);
    out += "\n";
    for (std::size_t a = 0; a < r.matrix.counts.size(); ++a) {
        for (auto n : r.matrix.counts[a]) out += fmt::format("{:>7}", n);
        out += fmt::format("   | {}\n", r.matrix.classes[a]);
    }
    return out;
}

std::string to_csv(const EvaluationReport& r) {
    std::string out = "class,tp_rate,fp_rate,precision,recall,f_measure,roc_area\n";
    for (std::size_t c = 0; c < r.per_class.size(); ++c) {
        const auto& m = r.per_class[c];
        out += fmt::format("{},{},{},{},{},{},{}\n", r.matrix.classes[c], m.tp_rate, m.fp_rate, m.precision, m.recall,
                           m.f_measure, m.roc_area ? fmt::format("{}", *m.roc_area) : std::string());
    }
    return out;
}

} // namespace ldscreen
