#include "ldscreen/rules.hpp"

#include "ldscreen/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <numeric>
#include <tuple>

namespace ldscreen {

namespace {

struct Coverage {
    double covered = 0.0;
    double correct = 0.0;
};

Coverage measure(const std::vector<Condition>& antecedent, std::size_t consequent, const Dataset& d) {
    Coverage c;
    const auto cls = d.schema().class_index();
    for (const auto& x : d.instances()) {
        const auto& label = x.values[cls];
        if (label.is_missing()) continue;
        const bool hit = std::all_of(antecedent.begin(), antecedent.end(),
                                     [&](const Condition& cond) { return cond.matches(x); });
        if (!hit) continue;
        c.covered += x.weight;
        if (label.symbol() == consequent) c.correct += x.weight;
    }
    return c;
}

double pessimistic_accuracy(const Coverage& c, double cf) {
    if (c.covered <= 0.0) return 0.0;
    return 1.0 - pessimistic_errors(c.covered, c.covered - c.correct, cf) / c.covered;
}

void collect(const TreeNode& node, std::vector<Condition>& path, std::vector<Rule>& out) {
    if (node.is_leaf()) {
        Rule r;
        r.antecedent = path;
        r.consequent = node.predicted_class;
        r.coverage = node.weight();
        r.accuracy = r.coverage > 0.0 ? node.class_counts[node.predicted_class] / r.coverage : 0.0;
        out.push_back(std::move(r));
        return;
    }
    const auto attr = node.test->attribute;
    for (std::size_t b = 0; b < node.children.size(); ++b) {
        if (node.test->threshold) {
            path.push_back(b == 0 ? Condition::at_most(attr, *node.test->threshold)
                                  : Condition::above(attr, *node.test->threshold));
        } else {
            path.push_back(Condition::equals(attr, b));
        }
        collect(node.children[b], path, out);
        path.pop_back();
    }
}

bool lexicographic_less(const Condition& a, const Condition& b) {
    return std::tie(a.attribute, a.relation, a.value) < std::tie(b.attribute, b.relation, b.value);
}

bool same_rule(const Rule& a, const Rule& b) {
    if (a.consequent != b.consequent || a.antecedent.size() != b.antecedent.size()) return false;
    auto x = a.antecedent;
    auto y = b.antecedent;
    std::sort(x.begin(), x.end(), lexicographic_less);
    std::sort(y.begin(), y.end(), lexicographic_less);
    return x == y;
}

} // namespace

bool Condition::matches(const Instance& x) const {
    const auto& v = x.values.at(attribute);
    if (v.is_missing()) return false;
    switch (relation) {
    case Relation::equal: return v.is_symbol() && static_cast<double>(v.symbol()) == value;
    case Relation::less_equal: return v.is_number() && v.number() <= value;
    case Relation::greater: return v.is_number() && v.number() > value;
    }
    return false;
}

bool Rule::matches(const Instance& x) const {
    return std::all_of(antecedent.begin(), antecedent.end(), [&](const Condition& c) { return c.matches(x); });
}

std::size_t RuleSet::condition_count() const {
    return std::accumulate(rules.begin(), rules.end(), std::size_t{0},
                           [](std::size_t n, const Rule& r) { return n + r.antecedent.size(); });
}

RuleSet extract_rules(const DecisionTreeModel& m) {
    RuleSet rs;
    rs.schema = m.schema;
    rs.confidence_factor = m.config.confidence_factor;
    std::vector<Condition> path;
    collect(m.root, path, rs.rules);
    rs.default_class = m.root.predicted_class;
    const double n = m.root.weight();
    rs.default_accuracy = n > 0.0 ? m.root.class_counts[rs.default_class] / n : 0.0;
    return rs;
}

RuleSet simplify_rules(const RuleSet& rs, const Dataset& d) {
    if (!(d.schema() == rs.schema)) throw Error("rule set and dataset schemas differ");
    const auto cf = rs.confidence_factor;
    const auto n_classes = rs.schema.num_classes();

    std::vector<double> class_weight(n_classes, 0.0);
    const auto cls = d.schema().class_index();
    for (const auto& x : d.instances()) {
        if (!x.values[cls].is_missing()) class_weight[x.values[cls].symbol()] += x.weight;
    }
    const double total = std::accumulate(class_weight.begin(), class_weight.end(), 0.0);
    const auto majority = argmax(class_weight);
    const double baseline = total > 0.0 ? class_weight[majority] / total : 0.0;

    RuleSet out;
    out.schema = rs.schema;
    out.confidence_factor = cf;
    for (const auto& original : rs.rules) {
        auto antecedent = original.antecedent;
        auto current = measure(antecedent, original.consequent, d);
        // A rule nothing in `d` reaches carries no evidence to generalise from.
        if (current.covered <= 0.0) continue;

        double current_acc = pessimistic_accuracy(current, cf);
        while (!antecedent.empty()) {
            std::optional<std::size_t> drop;
            double best_acc = current_acc;
            Coverage best_cov;
            for (std::size_t i = 0; i < antecedent.size(); ++i) {
                auto shorter = antecedent;
                shorter.erase(shorter.begin() + static_cast<std::ptrdiff_t>(i));
                const auto cov = measure(shorter, original.consequent, d);
                const double acc = pessimistic_accuracy(cov, cf);
                if (acc >= best_acc && (!drop || acc > best_acc)) {
                    drop = i;
                    best_acc = acc;
                    best_cov = cov;
                }
            }
            if (!drop) break;
            antecedent.erase(antecedent.begin() + static_cast<std::ptrdiff_t>(*drop));
            current_acc = best_acc;
            current = best_cov;
        }

        Rule r;
        r.antecedent = std::move(antecedent);
        r.consequent = original.consequent;
        r.coverage = current.covered;
        r.accuracy = current.covered > 0.0 ? current.correct / current.covered : 0.0;
        if (r.accuracy < baseline) continue;
        const bool duplicate = std::any_of(out.rules.begin(), out.rules.end(), [&](const Rule& kept) { return same_rule(kept, r); });
        if (!duplicate) out.rules.push_back(std::move(r));
    }

    std::vector<double> uncovered(n_classes, 0.0);
    for (const auto& x : d.instances()) {
        if (x.values[cls].is_missing()) continue;
        const bool hit = std::any_of(out.rules.begin(), out.rules.end(), [&](const Rule& r) { return r.matches(x); });
        if (!hit) uncovered[x.values[cls].symbol()] += x.weight;
    }
    const double left = std::accumulate(uncovered.begin(), uncovered.end(), 0.0);
    if (left > 0.0) {
        out.default_class = argmax(uncovered);
        out.default_accuracy = uncovered[out.default_class] / left;
    } else {
        out.default_class = majority;
        out.default_accuracy = baseline;
    }
    return out;
}

RuleMatch match_rules(const RuleSet& rs, const Instance& x) {
    validate_instance(rs.schema, x);
    RuleMatch m{rs.default_class, std::nullopt};
    for (std::size_t i = 0; i < rs.rules.size(); ++i) {
        const auto& r = rs.rules[i];
        if (!r.matches(x)) continue;
        if (m.rule) {
            const auto& best = rs.rules[*m.rule];
            const bool better = r.accuracy > best.accuracy || (r.accuracy == best.accuracy && r.coverage > best.coverage);
            if (!better) continue;
        }
        m.rule = i;
        m.label = r.consequent;
    }
    return m;
}

std::size_t rules_classify(const RuleSet& rs, const Instance& x) { return match_rules(rs, x).label; }

Prediction rules_predict(const RuleSet& rs, const Instance& x) {
    const auto m = match_rules(rs, x);
    const auto n_classes = rs.schema.num_classes();
    const double confidence = m.rule ? rs.rules[*m.rule].accuracy : rs.default_accuracy;
    Prediction p;
    p.label = m.label;
    if (n_classes == 1) {
        p.distribution = {1.0};
        return p;
    }
    p.distribution.assign(n_classes, (1.0 - confidence) / static_cast<double>(n_classes - 1));
    p.distribution[m.label] = confidence;
    return p;
}

std::string to_string(const Schema& schema, const Condition& c) {
    const auto& spec = schema.attribute(c.attribute);
    switch (c.relation) {
    case Relation::equal: return spec.name + "=" + spec.values.at(static_cast<std::size_t>(c.value));
    case Relation::less_equal: return fmt::format("{}<={}", spec.name, c.value);
    case Relation::greater: return fmt::format("{}>{}", spec.name, c.value);
    }
    return {};
}

std::string to_string(const Schema& schema, const Rule& r) {
    std::string out = "IF ";
    if (r.antecedent.empty()) out += "TRUE";
    for (std::size_t i = 0; i < r.antecedent.size(); ++i) {
        if (i) out += " AND ";
        out += to_string(schema, r.antecedent[i]);
    }
    out += fmt::format(" THEN {}={} [{:.2f}, {:.3f}]", schema.class_attribute().name, schema.class_name(r.consequent),
                       r.coverage, r.accuracy);
    return out;
}

std::string to_text(const RuleSet& rs) {
    std::string out;
    for (const auto& r : rs.rules) out += to_string(rs.schema, r) + "\n";
    out += fmt::format("OTHERWISE {}={}\n", rs.schema.class_attribute().name, rs.schema.class_name(rs.default_class));
    return out;
}

} // namespace ldscreen
