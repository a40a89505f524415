#include "ldscreen/tree.hpp"

#include "ldscreen/error.hpp"

#include <boost/math/distributions/normal.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ldscreen {

namespace {

// Gain ratios closer than this are treated as equal so that summation order
// cannot change which split wins.
constexpr double kRatioTolerance = 1e-12;

struct WeightedRow {
    std::size_t index;
    double weight;
};

double sum(std::span<const double> xs) { return std::accumulate(xs.begin(), xs.end(), 0.0); }

std::size_t branch_count(const AttributeSpec& spec) { return spec.is_numeric() ? 2 : spec.values.size(); }

std::size_t branch_of(const Value& v, const NodeTest& test) {
    if (test.threshold) return v.number() <= *test.threshold ? 0 : 1;
    return v.symbol();
}

struct ScoredSplit {
    SplitCandidate candidate;
    std::vector<double> known_branch_weights;
};

ScoredSplit score_split(const Schema& schema, const std::vector<Instance>& instances, std::span<const WeightedRow> rows,
                        std::size_t attribute, std::optional<double> threshold) {
    const auto& spec = schema.attribute(attribute);
    const auto cls = schema.class_index();
    const auto n_classes = schema.num_classes();
    const auto n_branches = branch_count(spec);
    const NodeTest test{attribute, threshold};

    std::vector<std::vector<double>> branch_class(n_branches, std::vector<double>(n_classes, 0.0));
    std::vector<double> parent_known(n_classes, 0.0);
    double total = 0.0;
    for (const auto& r : rows) {
        const auto& x = instances[r.index];
        const auto& label = x.values[cls];
        if (label.is_missing()) continue;
        total += r.weight;
        const auto& v = x.values[attribute];
        if (v.is_missing()) continue;
        branch_class[branch_of(v, test)][label.symbol()] += r.weight;
        parent_known[label.symbol()] += r.weight;
    }

    ScoredSplit out;
    out.candidate.attribute_index = attribute;
    out.candidate.threshold = threshold;
    out.known_branch_weights.resize(n_branches, 0.0);
    const double known = sum(parent_known);
    if (known <= 0.0) return out;

    double children_entropy = 0.0;
    double split_info = 0.0;
    for (std::size_t b = 0; b < n_branches; ++b) {
        const double w = sum(branch_class[b]);
        out.known_branch_weights[b] = w;
        if (w <= 0.0) continue;
        const double p = w / known;
        children_entropy += p * entropy(branch_class[b]);
        split_info -= p * std::log2(p);
    }
    const double gain = (known / total) * (entropy(parent_known) - children_entropy);
    out.candidate.info_gain = std::max(0.0, gain);
    out.candidate.intrinsic_value = std::max(0.0, split_info);
    out.candidate.gain_ratio =
        out.candidate.intrinsic_value > 0.0 ? out.candidate.info_gain / out.candidate.intrinsic_value : 0.0;
    return out;
}

std::vector<double> midpoints(const std::vector<Instance>& instances, std::span<const WeightedRow> rows,
                              std::size_t attribute) {
    std::vector<double> values;
    for (const auto& r : rows) {
        const auto& v = instances[r.index].values[attribute];
        if (v.is_number()) values.push_back(v.number());
    }
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    std::vector<double> out;
    for (std::size_t i = 1; i < values.size(); ++i) out.push_back(values[i - 1] + (values[i] - values[i - 1]) / 2.0);
    return out;
}

class Builder {
public:
    Builder(const Dataset& d, const TreeConfig& config) : d_(d), config_(config) {}

    TreeNode grow(const std::vector<WeightedRow>& rows, std::vector<bool>& used) {
        const auto& schema = d_.schema();
        TreeNode node;
        node.class_counts.assign(schema.num_classes(), 0.0);
        for (const auto& r : rows) node.class_counts[d_[r.index].values[schema.class_index()].symbol()] += r.weight;
        node.predicted_class = argmax(node.class_counts);

        const double total = sum(node.class_counts);
        const auto present = std::count_if(node.class_counts.begin(), node.class_counts.end(),
                                           [](double w) { return w > 0.0; });
        if (present <= 1 || total < 2.0 * config_.min_leaf_weight) return node;

        std::optional<ScoredSplit> best;
        auto consider = [&](ScoredSplit s) {
            if (!s.candidate.valid()) return;
            const auto big = std::count_if(s.known_branch_weights.begin(), s.known_branch_weights.end(),
                                           [&](double w) { return w > 0.0 && w >= config_.min_leaf_weight; });
            if (big < 2) return;
            if (!best || s.candidate.gain_ratio > best->candidate.gain_ratio + kRatioTolerance) best = std::move(s);
        };
        for (auto a : schema.feature_indices()) {
            const auto& spec = schema.attribute(a);
            if (spec.is_numeric()) {
                for (double t : midpoints(d_.instances(), rows, a)) consider(score_split(schema, d_.instances(), rows, a, t));
            } else if (!used[a]) {
                consider(score_split(schema, d_.instances(), rows, a, std::nullopt));
            }
        }
        if (!best) return node;

        const auto& cand = best->candidate;
        node.test = NodeTest{cand.attribute_index, cand.threshold};
        node.branch_weights = best->known_branch_weights;
        const double known = sum(node.branch_weights);
        const auto n_branches = node.branch_weights.size();

        std::vector<std::vector<WeightedRow>> parts(n_branches);
        for (const auto& r : rows) {
            const auto& v = d_[r.index].values[cand.attribute_index];
            if (v.is_missing()) {
                for (std::size_t b = 0; b < n_branches; ++b) {
                    if (node.branch_weights[b] > 0.0) parts[b].push_back({r.index, r.weight * node.branch_weights[b] / known});
                }
            } else {
                parts[branch_of(v, *node.test)].push_back(r);
            }
        }

        const bool nominal = !schema.attribute(cand.attribute_index).is_numeric();
        if (nominal) used[cand.attribute_index] = true;
        for (std::size_t b = 0; b < n_branches; ++b) {
            if (parts[b].empty()) {
                TreeNode empty;
                empty.class_counts.assign(schema.num_classes(), 0.0);
                empty.predicted_class = node.predicted_class;
                node.children.push_back(std::move(empty));
            } else {
                node.children.push_back(grow(parts[b], used));
            }
        }
        if (nominal) used[cand.attribute_index] = false;
        return node;
    }

private:
    const Dataset& d_;
    const TreeConfig& config_;
};

double prune_node(TreeNode& node, double cf) {
    const double n = node.weight();
    const double leaf_errors = n > 0.0 ? pessimistic_errors(n, n - node.class_counts[node.predicted_class], cf) : 0.0;
    if (node.is_leaf()) return leaf_errors;

    double subtree_errors = 0.0;
    for (auto& child : node.children) subtree_errors += prune_node(child, cf);
    if (leaf_errors <= subtree_errors) {
        node.test.reset();
        node.branch_weights.clear();
        node.children.clear();
        return leaf_errors;
    }
    return subtree_errors;
}

std::vector<double> normalized(const std::vector<double>& counts) {
    const double n = sum(counts);
    std::vector<double> out(counts.size(), 0.0);
    if (n > 0.0) {
        for (std::size_t c = 0; c < counts.size(); ++c) out[c] = counts[c] / n;
    }
    return out;
}

void accumulate(const TreeNode& node, const Instance& x, double w, const std::vector<double>& inherited,
                std::vector<double>& out) {
    const auto own = node.weight() > 0.0 ? normalized(node.class_counts) : inherited;
    if (node.is_leaf()) {
        for (std::size_t c = 0; c < out.size(); ++c) out[c] += w * own[c];
        return;
    }
    const auto& v = x.values[node.test->attribute];
    if (!v.is_missing()) {
        accumulate(node.children[branch_of(v, *node.test)], x, w, own, out);
        return;
    }
    const double known = sum(node.branch_weights);
    for (std::size_t b = 0; b < node.children.size(); ++b) {
        if (node.branch_weights[b] > 0.0) accumulate(node.children[b], x, w * node.branch_weights[b] / known, own, out);
    }
}

std::size_t count_nodes(const TreeNode& n, bool leaves_only) {
    std::size_t c = (!leaves_only || n.is_leaf()) ? 1 : 0;
    for (const auto& child : n.children) c += count_nodes(child, leaves_only);
    return c;
}

void render(const Schema& schema, const TreeNode& node, std::size_t depth, std::string& out) {
    for (std::size_t b = 0; b < node.children.size(); ++b) {
        const auto& child = node.children[b];
        for (std::size_t i = 0; i < depth; ++i) out += "|   ";
        out += describe_branch(schema, node, b);
        if (child.is_leaf()) {
            const double n = child.weight();
            const double err = n - child.class_counts[child.predicted_class];
            out += fmt::format(": {} ({:.1f}", schema.class_name(child.predicted_class), n);
            if (err > 1e-9) out += fmt::format("/{:.1f}", err);
            out += ")\n";
        } else {
            out += "\n";
            render(schema, child, depth + 1, out);
        }
    }
}

} // namespace

double entropy(std::span<const double> class_weights) {
    double total = 0.0;
    for (double w : class_weights) {
        if (w < 0.0 || !std::isfinite(w)) throw Error("class weights must be finite and nonnegative");
        total += w;
    }
    if (total <= 0.0) throw Error("entropy of an all-zero weight vector");
    double h = 0.0;
    for (double w : class_weights) {
        if (w <= 0.0) continue;
        const double p = w / total;
        h -= p * std::log2(p);
    }
    return std::max(0.0, h);
}

SplitCandidate evaluate_split(const Dataset& d, std::size_t attribute, std::optional<double> threshold) {
    const auto& schema = d.schema();
    if (attribute >= schema.size()) throw Error("attribute index out of range");
    if (attribute == schema.class_index()) throw Error("cannot split on the class attribute");
    const auto& spec = schema.attribute(attribute);
    if (spec.is_numeric() && !threshold) throw Error("numeric attribute '" + spec.name + "' needs a threshold");
    if (!spec.is_numeric() && threshold) throw Error("categorical attribute '" + spec.name + "' takes no threshold");

    std::vector<WeightedRow> rows;
    rows.reserve(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) rows.push_back({i, d[i].weight});
    return score_split(schema, d.instances(), rows, attribute, threshold).candidate;
}

double TreeNode::weight() const { return sum(class_counts); }

std::size_t DecisionTreeModel::node_count() const { return count_nodes(root, false); }
std::size_t DecisionTreeModel::leaf_count() const { return count_nodes(root, true); }

DecisionTreeModel build_tree(const Dataset& d, const TreeConfig& config) {
    if (d.empty()) throw Error("cannot build a tree from an empty dataset");
    if (d.schema().feature_indices().empty()) throw Error("dataset has no non-class attributes");
    if (config.min_leaf_weight < 0.0) throw Error("min_leaf_weight must be nonnegative");
    if (!(config.confidence_factor > 0.0 && config.confidence_factor <= 0.5))
        throw Error("confidence_factor must lie in (0, 0.5]");
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (!d.label(i)) throw Error(fmt::format("instance {} has a missing class value", i + 1));
    }

    std::vector<WeightedRow> rows;
    rows.reserve(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) rows.push_back({i, d[i].weight});
    std::vector<bool> used(d.schema().size(), false);

    DecisionTreeModel model{d.schema(), config, Builder(d, config).grow(rows, used)};
    if (config.prune) model = prune_tree(std::move(model));
    return model;
}

double pessimistic_errors(double n, double errors, double cf) {
    if (n <= 0.0) return 0.0;
    if (errors < 1.0) {
        // Exact binomial bound for zero errors, interpolated up to one error.
        const double base = n * (1.0 - std::pow(cf, 1.0 / n));
        if (errors <= 0.0) return base;
        return errors + base + errors * (pessimistic_errors(n, 1.0, cf) - 1.0 - base);
    }
    if (errors + 0.5 >= n) return std::max(n, errors);

    const double z = boost::math::quantile(boost::math::normal(), 1.0 - cf);
    const double f = (errors + 0.5) / n;
    const double z2 = z * z;
    const double r = (f + z2 / (2.0 * n) + z * std::sqrt(f / n - f * f / n + z2 / (4.0 * n * n))) / (1.0 + z2 / n);
    return r * n;
}

DecisionTreeModel prune_tree(DecisionTreeModel m) {
    prune_node(m.root, m.config.confidence_factor);
    return m;
}

Prediction classify(const DecisionTreeModel& m, const Instance& x) {
    validate_instance(m.schema, x);
    const auto n_classes = m.schema.num_classes();

    // Fast path: no missing test value on the way down.
    const TreeNode* node = &m.root;
    const TreeNode* parent = nullptr;
    while (!node->is_leaf()) {
        const auto& v = x.values[node->test->attribute];
        if (v.is_missing()) break;
        parent = node;
        node = &node->children[branch_of(v, *node->test)];
    }
    if (node->is_leaf()) {
        Prediction p;
        p.label = node->predicted_class;
        p.distribution = node->weight() > 0.0 ? normalized(node->class_counts) : normalized(parent->class_counts);
        return p;
    }

    Prediction p;
    p.distribution.assign(n_classes, 0.0);
    accumulate(m.root, x, 1.0, normalized(m.root.class_counts), p.distribution);
    const double total = sum(p.distribution);
    for (auto& q : p.distribution) q /= total;
    p.label = argmax(p.distribution);
    return p;
}

std::vector<std::size_t> route(const DecisionTreeModel& m, const Instance& x) {
    validate_instance(m.schema, x);
    std::vector<std::size_t> path;
    const TreeNode* node = &m.root;
    while (!node->is_leaf()) {
        const auto& v = x.values[node->test->attribute];
        if (v.is_missing()) throw Error("value of '" + m.schema.attribute(node->test->attribute).name + "' is missing");
        const auto b = branch_of(v, *node->test);
        path.push_back(b);
        node = &node->children[b];
    }
    return path;
}

std::string describe_branch(const Schema& schema, const TreeNode& node, std::size_t branch) {
    const auto& spec = schema.attribute(node.test->attribute);
    if (node.test->threshold) return fmt::format("{} {} {}", spec.name, branch == 0 ? "<=" : ">", *node.test->threshold);
    return fmt::format("{} = {}", spec.name, spec.values.at(branch));
}

std::string to_text(const DecisionTreeModel& m) {
    std::string out;
    if (m.root.is_leaf()) {
        const double n = m.root.weight();
        out = fmt::format(": {} ({:.1f}", m.schema.class_name(m.root.predicted_class), n);
        const double err = n - m.root.class_counts[m.root.predicted_class];
        if (err > 1e-9) out += fmt::format("/{:.1f}", err);
        out += ")\n";
        return out;
    }
    render(m.schema, m.root, 0, out);
    return out;
}

} // namespace ldscreen
