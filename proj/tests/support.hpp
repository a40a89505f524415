#pragma once
// Fixture generators and independent reference computations shared by the
// unit and acceptance tests. Nothing here calls into the library's
// algorithms; the oracles recompute each quantity from its definition.

#include "ldscreen/dataset.hpp"
#include "ldscreen/tree.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace support {

using ldscreen::AttributeSpec;
using ldscreen::Dataset;
using ldscreen::Instance;
using ldscreen::Schema;
using ldscreen::Value;

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t pick(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

/// `n` binary attributes A0..A{n-1} with values {0,1} and a class C {N,Y}.
inline Schema binary_schema(std::size_t n) {
    std::vector<AttributeSpec> attrs;
    for (std::size_t i = 0; i < n; ++i) attrs.push_back(AttributeSpec::categorical("A" + std::to_string(i), {"0", "1"}));
    attrs.push_back(AttributeSpec::categorical("C", {"N", "Y"}));
    return Schema(std::move(attrs), n);
}

/// Instance `code` of the 2^n enumeration: bit i is attribute i.
inline Instance binary_instance(std::size_t n, std::uint64_t code, std::optional<std::size_t> label = std::nullopt) {
    Instance x;
    for (std::size_t i = 0; i < n; ++i) x.values.push_back(Value::of_symbol((code >> i) & 1U));
    x.values.push_back(label ? Value::of_symbol(*label) : Value::missing());
    return x;
}

struct RandomSchemaOptions {
    std::size_t max_attributes = 6;
    std::size_t max_classes = 3;
    bool numeric = true;
};

/// Random mix of binary, nominal and numeric attributes with a
/// categorical class in last position.
inline Schema random_schema(Rng& rng, const RandomSchemaOptions& o = {}) {
    const auto n_attrs = 1 + pick(rng, o.max_attributes);
    std::vector<AttributeSpec> attrs;
    for (std::size_t a = 0; a < n_attrs; ++a) {
        const auto name = "f" + std::to_string(a);
        const auto kind = pick(rng, o.numeric ? 3 : 2);
        if (kind == 2) {
            attrs.push_back(AttributeSpec::numeric(name));
        } else {
            const auto arity = kind == 0 ? 2 : 3 + pick(rng, 2);
            std::vector<std::string> values;
            for (std::size_t v = 0; v < arity; ++v) values.push_back(name + "v" + std::to_string(v));
            attrs.push_back(AttributeSpec::categorical(name, values));
        }
    }
    std::vector<std::string> classes;
    const auto n_classes = 2 + pick(rng, o.max_classes - 1);
    for (std::size_t c = 0; c < n_classes; ++c) classes.push_back("c" + std::to_string(c));
    attrs.push_back(AttributeSpec::categorical("class", classes));
    return Schema(std::move(attrs), n_attrs);
}

struct RandomDataOptions {
    std::size_t min_instances = 1;
    std::size_t max_instances = 50;
    double missing_rate = 0.0;
    bool weighted = false;
    /// Numeric values are drawn from a small integer grid so ties occur.
    int numeric_levels = 6;
};

inline Dataset random_dataset(Rng& rng, const Schema& schema, const RandomDataOptions& o = {}) {
    const auto n = o.min_instances + pick(rng, o.max_instances - o.min_instances + 1);
    std::vector<Instance> xs;
    for (std::size_t i = 0; i < n; ++i) {
        Instance x;
        for (std::size_t a = 0; a < schema.size(); ++a) {
            const auto& spec = schema.attribute(a);
            if (a != schema.class_index() && uniform(rng) < o.missing_rate) {
                x.values.push_back(Value::missing());
            } else if (spec.is_numeric()) {
                x.values.push_back(Value::of_number(static_cast<double>(pick(rng, static_cast<std::size_t>(o.numeric_levels))) * 0.5));
            } else {
                x.values.push_back(Value::of_symbol(pick(rng, spec.values.size())));
            }
        }
        if (o.weighted) x.weight = uniform(rng, 0.1, 3.0);
        xs.push_back(std::move(x));
    }
    return Dataset("random", schema, std::move(xs));
}

// ------------------------------------------------------------------ oracles

/// -sum p log2 p computed with natural logarithms.
inline double entropy_oracle(const std::vector<double>& w) {
    double total = 0.0;
    for (double x : w) total += x;
    double h = 0.0;
    for (double x : w) {
        if (x > 0.0) h -= (x / total) * std::log(x / total) / std::log(2.0);
    }
    return h;
}

struct SplitOracle {
    double info_gain = 0.0;
    double intrinsic_value = 0.0;
    double gain_ratio = 0.0;
    bool valid = false;
};

/// Gain, split information and ratio straight from the definitions. Rows
/// with a missing class are ignored; rows with a missing test value count
/// only towards the known-fraction discount applied to the gain.
inline SplitOracle split_oracle(const Dataset& d, std::size_t attr, std::optional<double> threshold) {
    const auto& s = d.schema();
    std::map<std::size_t, std::map<std::size_t, double>> by_branch;
    std::map<std::size_t, double> parent;
    double all = 0.0;
    for (const auto& x : d.instances()) {
        const auto& y = x.values[s.class_index()];
        if (y.is_missing()) continue;
        all += x.weight;
        const auto& v = x.values[attr];
        if (v.is_missing()) continue;
        const std::size_t branch = threshold ? (v.number() <= *threshold ? 0U : 1U) : v.symbol();
        by_branch[branch][y.symbol()] += x.weight;
        parent[y.symbol()] += x.weight;
    }
    auto weights = [](const std::map<std::size_t, double>& m) {
        std::vector<double> w;
        for (const auto& [k, v] : m) w.push_back(v);
        return w;
    };
    SplitOracle o;
    double known = 0.0;
    for (const auto& [k, v] : parent) known += v;
    if (known <= 0.0) return o;
    double remainder = 0.0;
    for (const auto& [b, cls] : by_branch) {
        double w = 0.0;
        for (const auto& [k, v] : cls) w += v;
        remainder += (w / known) * entropy_oracle(weights(cls));
        o.intrinsic_value -= (w / known) * std::log(w / known) / std::log(2.0);
    }
    o.info_gain = std::max(0.0, (known / all) * (entropy_oracle(weights(parent)) - remainder));
    o.intrinsic_value = std::max(0.0, o.intrinsic_value);
    o.valid = by_branch.size() >= 2;
    o.gain_ratio = o.valid ? o.info_gain / o.intrinsic_value : 0.0;
    return o;
}

/// Standard normal quantile by bisection on the CDF.
inline double normal_quantile(double p) {
    double lo = -10.0, hi = 10.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = (lo + hi) / 2.0;
        (0.5 * std::erfc(-mid / std::sqrt(2.0)) < p ? lo : hi) = mid;
    }
    return (lo + hi) / 2.0;
}

/// Upper confidence bound on the error count: exact binomial bound
/// (1-p)^n = cf for zero errors, the Wilson score bound with continuity
/// correction for one error or more, and linear in between.
inline double ucb_errors_oracle(double n, double e, double cf) {
    if (e <= 0.0) {
        double lo = 0.0, hi = 1.0;
        for (int i = 0; i < 200; ++i) {
            const double p = (lo + hi) / 2.0;
            (std::pow(1.0 - p, n) > cf ? lo : hi) = p;
        }
        return n * (lo + hi) / 2.0;
    }
    if (e < 1.0) return (1.0 - e) * ucb_errors_oracle(n, 0.0, cf) + e * ucb_errors_oracle(n, 1.0, cf);
    if (e + 0.5 >= n) return std::max(n, e);
    const double z = normal_quantile(1.0 - cf);
    const double f = (e + 0.5) / n;
    const double centre = f + z * z / (2.0 * n);
    const double spread = z * std::sqrt(f * (1.0 - f) / n + z * z / (4.0 * n * n));
    return n * (centre + spread) / (1.0 + z * z / n);
}

/// Pairwise count of positives scored above negatives, ties counted 1/2.
inline double roc_oracle(const std::vector<double>& scores, const std::vector<std::size_t>& labels, std::size_t positive) {
    double wins = 0.0;
    double pairs = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] != positive) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j] == positive) continue;
            pairs += 1.0;
            if (scores[i] > scores[j]) wins += 1.0;
            else if (scores[i] == scores[j]) wins += 0.5;
        }
    }
    return wins / pairs;
}

/// Observed weighted mean (numeric) or weighted mode (categorical, first
/// declared value on ties) of column `a`.
inline Value column_fill_oracle(const Dataset& d, std::size_t a) {
    const auto& spec = d.schema().attribute(a);
    if (spec.is_numeric()) {
        double s = 0.0, w = 0.0;
        for (const auto& x : d.instances()) {
            if (x.values[a].is_missing()) continue;
            s += x.weight * x.values[a].number();
            w += x.weight;
        }
        return Value::of_number(s / w);
    }
    std::vector<double> tally(spec.values.size(), 0.0);
    for (const auto& x : d.instances()) {
        if (!x.values[a].is_missing()) tally[x.values[a].symbol()] += x.weight;
    }
    std::size_t best = 0;
    for (std::size_t v = 1; v < tally.size(); ++v) {
        if (tally[v] > tally[best]) best = v;
    }
    return Value::of_symbol(best);
}

/// Label of the leaf reached by `x`, found by walking the tree by hand.
inline std::size_t leaf_label_oracle(const ldscreen::TreeNode& root, const Instance& x) {
    const ldscreen::TreeNode* node = &root;
    while (node->test) {
        const auto& v = x.values[node->test->attribute];
        const std::size_t b = node->test->threshold ? (v.number() <= *node->test->threshold ? 0 : 1) : v.symbol();
        node = &node->children[b];
    }
    return node->predicted_class;
}

using Point = std::vector<double>;

/// Sum of squared distances of `pts` to their mean.
inline double scatter(const std::vector<Point>& pts) {
    if (pts.empty()) return 0.0;
    Point mean(pts.front().size(), 0.0);
    for (const auto& p : pts) {
        for (std::size_t j = 0; j < p.size(); ++j) mean[j] += p[j] / static_cast<double>(pts.size());
    }
    double s = 0.0;
    for (const auto& p : pts) {
        for (std::size_t j = 0; j < p.size(); ++j) s += (p[j] - mean[j]) * (p[j] - mean[j]);
    }
    return s;
}

struct BestPartition {
    double wcss = std::numeric_limits<double>::infinity();
    /// Side of each point; point 0 is always on side 0.
    std::vector<int> side;
};

/// Minimum WCSS over every split of `pts` into two non-empty groups.
inline BestPartition best_two_partition(const std::vector<Point>& pts) {
    BestPartition best;
    const auto n = pts.size();
    for (std::uint64_t mask = 1; mask < (1ULL << (n - 1)); ++mask) {
        std::vector<Point> a{pts[0]}, b;
        std::vector<int> side(n, 0);
        for (std::size_t i = 1; i < n; ++i) {
            const bool right = (mask >> (i - 1)) & 1ULL;
            (right ? b : a).push_back(pts[i]);
            side[i] = right ? 1 : 0;
        }
        const double w = scatter(a) + scatter(b);
        if (w < best.wcss - 1e-12) best = {w, side};
    }
    return best;
}

/// Assignment relabelled so the cluster of instance 0 is 0, the next new
/// cluster 1, and so on; equal for partitions that differ only in naming.
inline std::vector<std::size_t> canonical(const std::vector<std::size_t>& assignment) {
    std::map<std::size_t, std::size_t> rename;
    std::vector<std::size_t> out;
    for (auto c : assignment) {
        const auto it = rename.emplace(c, rename.size()).first;
        out.push_back(it->second);
    }
    return out;
}

// --------------------------------------------------------- planted rules

/// A hidden decision rule over binary attributes: a complete tree of the
/// given depth over distinct attributes with random leaf labels.
struct PlantedRule {
    struct Node {
        int attribute = -1;
        std::size_t label = 0;
        std::size_t child[2] = {0, 0};
    };
    std::vector<Node> nodes;

    std::size_t operator()(std::uint64_t code) const {
        std::size_t i = 0;
        while (nodes[i].attribute >= 0) i = nodes[i].child[(code >> nodes[i].attribute) & 1U];
        return nodes[i].label;
    }
};

inline PlantedRule random_planted_rule(Rng& rng, std::size_t n_attrs, std::size_t depth) {
    PlantedRule r;
    std::function<std::size_t(std::size_t, std::vector<int>)> grow = [&](std::size_t level, std::vector<int> used) {
        const auto i = r.nodes.size();
        r.nodes.emplace_back();
        if (level == depth) {
            r.nodes[i].label = pick(rng, 2);
            return i;
        }
        int a;
        do {
            a = static_cast<int>(pick(rng, n_attrs));
        } while (std::find(used.begin(), used.end(), a) != used.end());
        used.push_back(a);
        r.nodes[i].attribute = a;
        const auto left = grow(level + 1, used);
        const auto right = grow(level + 1, used);
        r.nodes[i].child[0] = left;
        r.nodes[i].child[1] = right;
        return i;
    };
    grow(0, {});
    return r;
}

/// `n` uniform draws from the 2^n_attrs input space labelled by `rule`.
inline Dataset planted_dataset(Rng& rng, const PlantedRule& rule, std::size_t n_attrs, std::size_t n) {
    std::vector<Instance> xs;
    for (std::size_t i = 0; i < n; ++i) {
        const auto code = rng() & ((1ULL << n_attrs) - 1);
        xs.push_back(binary_instance(n_attrs, code, rule(code)));
    }
    return Dataset("planted", binary_schema(n_attrs), std::move(xs));
}

} // namespace support
