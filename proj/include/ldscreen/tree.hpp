#pragma once

#include "ldscreen/dataset.hpp"
#include "ldscreen/prediction.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ldscreen {

/// Shannon entropy in bits of a class-weight vector. Throws Error when the
/// weights are negative or sum to zero.
double entropy(std::span<const double> class_weights);

/// Scored test on one attribute. A candidate whose partition puts every
/// known instance in one branch has intrinsic_value 0 and is invalid.
struct SplitCandidate {
    std::size_t attribute_index = 0;
    std::optional<double> threshold;
    double info_gain = 0.0;
    double intrinsic_value = 0.0;
    double gain_ratio = 0.0;

    bool valid() const noexcept { return intrinsic_value > 0.0; }
};

/// Information gain, split information and their ratio for testing
/// `attribute` on `d` (numeric attributes need a threshold: left is
/// `<= threshold`). Instances with a missing test value or missing class
/// are left out of both entropies; the gain is then scaled by the known
/// fraction of the weight. Instance weights are honoured throughout.
SplitCandidate evaluate_split(const Dataset& d, std::size_t attribute, std::optional<double> threshold = std::nullopt);

struct TreeConfig {
    double min_leaf_weight = 2.0;
    double confidence_factor = 0.25;
    bool prune = true;

    bool operator==(const TreeConfig&) const = default;
};

struct NodeTest {
    std::size_t attribute = 0;
    std::optional<double> threshold;

    bool operator==(const NodeTest&) const = default;
};

/// Decision node when `test` is set, leaf otherwise. Every node keeps the
/// class weights that reached it during training. A leaf for a branch no
/// training instance took has all-zero counts and predicts the parent's
/// majority class.
struct TreeNode {
    std::vector<double> class_counts;
    std::size_t predicted_class = 0;
    std::optional<NodeTest> test;
    std::vector<double> branch_weights;
    std::vector<TreeNode> children;

    bool is_leaf() const noexcept { return !test.has_value(); }
    double weight() const;

    bool operator==(const TreeNode&) const = default;
};

struct DecisionTreeModel {
    Schema schema;
    TreeConfig config;
    TreeNode root;

    std::size_t node_count() const;
    std::size_t leaf_count() const;

    bool operator==(const DecisionTreeModel&) const = default;
};

/// Top-down induction choosing the valid split with the largest gain ratio
/// (ties: lower attribute index, then lower threshold). A split also needs
/// two branches carrying at least `min_leaf_weight` known weight. Prunes
/// afterwards when `config.prune` is set.
DecisionTreeModel build_tree(const Dataset& d, const TreeConfig& config = {});

/// Upper confidence bound on the number of errors among `n` weighted
/// instances of which `errors` are misclassified.
double pessimistic_errors(double n, double errors, double confidence_factor);

/// Bottom-up subtree replacement: a decision node becomes a leaf when the
/// leaf's pessimistic error is no larger than the sum over its children.
DecisionTreeModel prune_tree(DecisionTreeModel m);

/// Routes `x` to a leaf. A missing tested value sends the instance down
/// every branch in proportion to the training branch weights and the leaf
/// distributions are merged.
Prediction classify(const DecisionTreeModel& m, const Instance& x);

/// Branch index taken at each decision node from the root to the leaf
/// reached by `x`. Throws Error when a tested value is missing.
std::vector<std::size_t> route(const DecisionTreeModel& m, const Instance& x);

/// Indented text rendering in the usual `attr = value: class (n/errors)` form.
std::string to_text(const DecisionTreeModel& m);

/// Readable form of the test taken at `node` into branch `branch`.
std::string describe_branch(const Schema& schema, const TreeNode& node, std::size_t branch);

} // namespace ldscreen
