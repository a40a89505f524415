#pragma once

#include "ldscreen/dataset.hpp"
#include "ldscreen/prediction.hpp"
#include "ldscreen/tree.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace ldscreen {

enum class Relation { equal, less_equal, greater };

/// `attr = symbol` for categorical attributes, `attr <= t` / `attr > t` for
/// numeric ones. `value` holds the symbol index or the threshold.
struct Condition {
    std::size_t attribute = 0;
    Relation relation = Relation::equal;
    double value = 0.0;

    static Condition equals(std::size_t attribute, std::size_t symbol) {
        return {attribute, Relation::equal, static_cast<double>(symbol)};
    }
    static Condition at_most(std::size_t attribute, double t) { return {attribute, Relation::less_equal, t}; }
    static Condition above(std::size_t attribute, double t) { return {attribute, Relation::greater, t}; }

    /// A missing value never satisfies a condition.
    bool matches(const Instance& x) const;

    bool operator==(const Condition&) const = default;
};

struct Rule {
    std::vector<Condition> antecedent;
    std::size_t consequent = 0;
    double coverage = 0.0;
    double accuracy = 0.0;

    bool matches(const Instance& x) const;

    bool operator==(const Rule&) const = default;
};

struct RuleSet {
    Schema schema;
    std::vector<Rule> rules;
    std::size_t default_class = 0;
    /// Share of the default class among the training weight no rule covers.
    double default_accuracy = 0.0;
    double confidence_factor = 0.25;

    std::size_t condition_count() const;

    bool operator==(const RuleSet&) const = default;
};

/// One rule per leaf; the antecedent lists the tests on the path from the
/// root. Coverage and accuracy come from the leaf's training weights.
RuleSet extract_rules(const DecisionTreeModel& m);

/// Greedily drops conditions while the rule's pessimistic accuracy on `d`
/// does not decrease, drops rules less accurate than always predicting the
/// majority class, removes duplicates, and sets the default class to the
/// majority of instances left uncovered.
RuleSet simplify_rules(const RuleSet& rs, const Dataset& d);

struct RuleMatch {
    std::size_t label = 0;
    /// Index of the winning rule, nullopt when the default class applied.
    std::optional<std::size_t> rule;
};

/// Most accurate matching rule (ties: larger coverage, then earlier rule);
/// the default class when nothing matches.
RuleMatch match_rules(const RuleSet& rs, const Instance& x);

std::size_t rules_classify(const RuleSet& rs, const Instance& x);

/// Label plus a distribution giving the winning rule's accuracy to its
/// consequent and spreading the remainder evenly over the other classes.
Prediction rules_predict(const RuleSet& rs, const Instance& x);

std::string to_string(const Schema& schema, const Condition& c);
/// `IF DR=Y AND DSS=Y THEN LD=Y [coverage, accuracy]`
std::string to_string(const Schema& schema, const Rule& r);
/// One line per rule followed by an `OTHERWISE LD=N` line.
std::string to_text(const RuleSet& rs);

} // namespace ldscreen
