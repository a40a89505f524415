#include "ldscreen/dataset.hpp"

#include "ldscreen/error.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <random>
#include <set>

namespace ldscreen {

std::string_view to_string(AttributeKind kind) {
    switch (kind) {
    case AttributeKind::binary: return "binary";
    case AttributeKind::nominal: return "nominal";
    case AttributeKind::numeric: return "numeric";
    }
    return "unknown";
}

AttributeSpec AttributeSpec::numeric(std::string name) {
    return AttributeSpec{std::move(name), AttributeKind::numeric, {}};
}

AttributeSpec AttributeSpec::categorical(std::string name, std::vector<std::string> values) {
    const auto kind = values.size() == 2 ? AttributeKind::binary : AttributeKind::nominal;
    return AttributeSpec{std::move(name), kind, std::move(values)};
}

std::optional<std::size_t> AttributeSpec::find_value(std::string_view symbol) const {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] == symbol) return i;
    }
    return std::nullopt;
}

Schema::Schema(std::vector<AttributeSpec> attributes, std::size_t class_index)
    : attributes_(std::move(attributes)), class_index_(class_index) {
    if (attributes_.empty()) throw Error("schema has no attributes");
    if (class_index_ >= attributes_.size()) throw Error("class index out of range");

    std::set<std::string_view> names;
    for (auto& a : attributes_) {
        if (a.name.empty()) throw Error("attribute with empty name");
        if (!names.insert(a.name).second) throw Error("duplicate attribute name '" + a.name + "'");
        switch (a.kind) {
        case AttributeKind::binary:
            if (a.values.size() != 2)
                throw Error("binary attribute '" + a.name + "' must declare exactly two values");
            break;
        case AttributeKind::nominal:
            if (a.values.empty()) throw Error("nominal attribute '" + a.name + "' declares no values");
            if (a.values.size() == 2) a.kind = AttributeKind::binary;
            break;
        case AttributeKind::numeric:
            if (!a.values.empty()) throw Error("numeric attribute '" + a.name + "' lists values");
            break;
        }
        std::set<std::string_view> symbols(a.values.begin(), a.values.end());
        if (symbols.size() != a.values.size())
            throw Error("attribute '" + a.name + "' declares a value twice");
    }
    if (attributes_[class_index_].is_numeric())
        throw Error("class attribute '" + attributes_[class_index_].name + "' must be nominal or binary");
}

std::optional<std::size_t> Schema::find(std::string_view name) const {
    for (std::size_t i = 0; i < attributes_.size(); ++i) {
        if (attributes_[i].name == name) return i;
    }
    return std::nullopt;
}

std::vector<std::size_t> Schema::feature_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < attributes_.size(); ++i) {
        if (i != class_index_) out.push_back(i);
    }
    return out;
}

Schema Schema::with_class(std::string_view name) const {
    const auto idx = find(name);
    if (!idx) throw Error("no attribute named '" + std::string(name) + "'");
    return Schema(attributes_, *idx);
}

void validate_instance(const Schema& schema, const Instance& x) {
    if (x.values.size() != schema.size()) {
        throw Error("instance has " + std::to_string(x.values.size()) + " values, schema expects " +
                    std::to_string(schema.size()));
    }
    if (!(x.weight > 0.0)) throw Error("instance weight must be positive");
    for (std::size_t i = 0; i < x.values.size(); ++i) {
        const auto& v = x.values[i];
        const auto& a = schema.attribute(i);
        if (v.is_missing()) continue;
        if (a.is_numeric()) {
            if (!v.is_number()) throw Error("attribute '" + a.name + "' expects a number");
        } else {
            if (!v.is_symbol()) throw Error("attribute '" + a.name + "' expects a symbol");
            if (v.symbol() >= a.values.size())
                throw Error("value index " + std::to_string(v.symbol()) + " not declared for '" + a.name + "'");
        }
    }
}

Dataset::Dataset(std::string relation, Schema schema, std::vector<Instance> instances)
    : relation_(std::move(relation)), schema_(std::move(schema)), instances_(std::move(instances)) {
    for (const auto& x : instances_) validate_instance(schema_, x);
}

std::optional<std::size_t> Dataset::label(std::size_t i) const {
    const auto& v = instances_.at(i).values[schema_.class_index()];
    if (v.is_missing()) return std::nullopt;
    return v.symbol();
}

std::vector<std::size_t> Dataset::class_counts() const {
    std::vector<std::size_t> counts(schema_.num_classes(), 0);
    for (std::size_t i = 0; i < instances_.size(); ++i) {
        if (auto c = label(i)) ++counts[*c];
    }
    return counts;
}

bool Dataset::has_missing() const {
    return std::any_of(instances_.begin(), instances_.end(), [](const Instance& x) {
        return std::any_of(x.values.begin(), x.values.end(), [](const Value& v) { return v.is_missing(); });
    });
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
    std::vector<Instance> picked;
    picked.reserve(indices.size());
    for (auto i : indices) picked.push_back(instances_.at(i));
    Dataset out;
    out.relation_ = relation_;
    out.schema_ = schema_;
    out.instances_ = std::move(picked);
    return out;
}

Dataset Dataset::with_class(std::string_view name) const {
    return Dataset(relation_, schema_.with_class(name), instances_);
}

namespace {

constexpr std::array<ChecklistItem, 16> kChecklist{{
    {"DR", "Difficulty with Reading"},
    {"DS", "Difficulty with Spelling"},
    {"DH", "Difficulty with Handwriting"},
    {"DWE", "Difficulty with Written Expression"},
    {"DBA", "Difficulty with Basic Arithmetic skills"},
    {"DHA", "Difficulty with Higher Arithmetic skills"},
    {"DA", "Difficulty with Attention"},
    {"ED", "Easily Distracted"},
    {"DM", "Difficulty with Memory"},
    {"LM", "Lack of Motivation"},
    {"DSS", "Difficulty with Study Skills"},
    {"DNS", "Does Not like School"},
    {"DLL", "Difficulty Learning a Language"},
    {"DLS", "Difficulty Learning a Subject"},
    {"STL", "Slow To Learn"},
    {"RG", "Repeated a Grade"},
}};

} // namespace

std::span<const ChecklistItem> ld_checklist_items() { return kChecklist; }

Schema ld_checklist_schema() {
    std::vector<AttributeSpec> attrs;
    for (const auto& item : kChecklist) attrs.push_back(AttributeSpec::categorical(std::string(item.code), {"N", "Y"}));
    attrs.push_back(AttributeSpec::categorical("LD", {"N", "Y"}));
    return Schema(std::move(attrs), kChecklist.size());
}

Dataset impute_missing(const Dataset& d) {
    const auto& schema = d.schema();
    std::vector<Value> fill(schema.size());
    for (std::size_t a = 0; a < schema.size(); ++a) {
        const auto& spec = schema.attribute(a);
        bool any_missing = false;
        double weight = 0.0;
        double sum = 0.0;
        std::vector<double> tally(spec.values.size(), 0.0);
        for (const auto& x : d.instances()) {
            const auto& v = x.values[a];
            if (v.is_missing()) {
                any_missing = true;
                continue;
            }
            weight += x.weight;
            if (spec.is_numeric())
                sum += x.weight * v.number();
            else
                tally[v.symbol()] += x.weight;
        }
        if (!any_missing) continue;
        if (weight == 0.0) throw Error("column '" + spec.name + "' has no observed values to impute from");
        if (spec.is_numeric()) {
            fill[a] = Value::of_number(sum / weight);
        } else {
            // max_element keeps the first maximum: ties go to declaration order.
            fill[a] = Value::of_symbol(static_cast<std::size_t>(std::max_element(tally.begin(), tally.end()) - tally.begin()));
        }
    }

    auto instances = d.instances();
    for (auto& x : instances) {
        for (std::size_t a = 0; a < x.values.size(); ++a) {
            if (x.values[a].is_missing()) x.values[a] = fill[a];
        }
    }
    return Dataset(d.relation(), schema, std::move(instances));
}

std::vector<std::size_t> fold_assignment(const Dataset& d, std::size_t k, std::uint64_t seed, bool stratify) {
    if (k < 2) throw Error("number of folds must be at least 2");
    if (k > d.size()) {
        throw Error("cannot make " + std::to_string(k) + " folds from " + std::to_string(d.size()) + " instances");
    }

    // Strata in class order; instances with a missing class form a last stratum.
    const std::size_t n_strata = stratify ? d.schema().num_classes() + 1 : 1;
    std::vector<std::vector<std::size_t>> strata(n_strata);
    for (std::size_t i = 0; i < d.size(); ++i) {
        std::size_t s = 0;
        if (stratify) {
            const auto c = d.label(i);
            s = c ? *c : n_strata - 1;
        }
        strata[s].push_back(i);
    }

    std::mt19937_64 rng(seed);
    std::vector<std::size_t> fold(d.size());
    std::size_t next = 0;
    for (auto& members : strata) {
        std::shuffle(members.begin(), members.end(), rng);
        for (auto i : members) {
            fold[i] = next;
            next = (next + 1) % k;
        }
    }
    return fold;
}

std::vector<Fold> stratified_folds(const Dataset& d, std::size_t k, std::uint64_t seed, bool stratify) {
    const auto assignment = fold_assignment(d, k, seed, stratify);
    std::vector<Fold> folds;
    folds.reserve(k);
    for (std::size_t f = 0; f < k; ++f) {
        std::vector<std::size_t> train_idx;
        std::vector<std::size_t> test_idx;
        for (std::size_t i = 0; i < d.size(); ++i) (assignment[i] == f ? test_idx : train_idx).push_back(i);
        folds.push_back(Fold{d.subset(train_idx), d.subset(test_idx), std::move(test_idx)});
    }
    return folds;
}

} // namespace ldscreen
