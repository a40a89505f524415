#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ldscreen {

/// A single cell: the missing marker, a symbol (index into the attribute's
/// declared values) or a number.
class Value {
public:
    Value() = default;

    static Value missing() { return Value{}; }
    static Value of_symbol(std::size_t index) { return Value{Storage{std::in_place_index<1>, index}}; }
    static Value of_number(double x) { return Value{Storage{std::in_place_index<2>, x}}; }

    bool is_missing() const noexcept { return v_.index() == 0; }
    bool is_symbol() const noexcept { return v_.index() == 1; }
    bool is_number() const noexcept { return v_.index() == 2; }

    std::size_t symbol() const { return std::get<1>(v_); }
    double number() const { return std::get<2>(v_); }

    bool operator==(const Value&) const = default;

private:
    using Storage = std::variant<std::monostate, std::size_t, double>;
    explicit Value(Storage v) : v_(v) {}
    Storage v_;
};

enum class AttributeKind { binary, nominal, numeric };

std::string_view to_string(AttributeKind kind);

struct AttributeSpec {
    std::string name;
    AttributeKind kind = AttributeKind::nominal;
    std::vector<std::string> values;

    static AttributeSpec numeric(std::string name);
    /// Categorical attribute; exactly two declared values make it binary.
    static AttributeSpec categorical(std::string name, std::vector<std::string> values);

    bool is_numeric() const noexcept { return kind == AttributeKind::numeric; }
    bool is_categorical() const noexcept { return kind != AttributeKind::numeric; }
    std::optional<std::size_t> find_value(std::string_view symbol) const;

    bool operator==(const AttributeSpec&) const = default;
};

/// Ordered attribute list plus the position of the class attribute.
class Schema {
public:
    Schema() = default;
    /// Throws Error when names collide, a binary attribute does not have two
    /// values, a numeric attribute lists values, or the class is numeric.
    /// A nominal attribute declaring exactly two values is stored as binary.
    Schema(std::vector<AttributeSpec> attributes, std::size_t class_index);

    const std::vector<AttributeSpec>& attributes() const noexcept { return attributes_; }
    const AttributeSpec& attribute(std::size_t i) const { return attributes_.at(i); }
    std::size_t size() const noexcept { return attributes_.size(); }

    std::size_t class_index() const noexcept { return class_index_; }
    const AttributeSpec& class_attribute() const { return attributes_.at(class_index_); }
    std::size_t num_classes() const { return class_attribute().values.size(); }
    const std::string& class_name(std::size_t c) const { return class_attribute().values.at(c); }

    std::optional<std::size_t> find(std::string_view name) const;
    /// Every attribute index except the class, in declaration order.
    std::vector<std::size_t> feature_indices() const;
    /// Same attributes with another class attribute.
    Schema with_class(std::string_view name) const;

    bool operator==(const Schema&) const = default;

private:
    std::vector<AttributeSpec> attributes_;
    std::size_t class_index_ = 0;
};

struct Instance {
    std::vector<Value> values;
    double weight = 1.0;

    bool operator==(const Instance&) const = default;
};

/// Checks arity, value kinds, symbol ranges and weight of one instance.
void validate_instance(const Schema& schema, const Instance& x);

/// Immutable collection of schema-conformant instances.
class Dataset {
public:
    Dataset() = default;
    Dataset(std::string relation, Schema schema, std::vector<Instance> instances);

    const std::string& relation() const noexcept { return relation_; }
    const Schema& schema() const noexcept { return schema_; }
    const std::vector<Instance>& instances() const noexcept { return instances_; }
    const Instance& operator[](std::size_t i) const { return instances_[i]; }
    std::size_t size() const noexcept { return instances_.size(); }
    bool empty() const noexcept { return instances_.empty(); }

    /// Class index of instance i, or nullopt when its class is missing.
    std::optional<std::size_t> label(std::size_t i) const;
    /// Per-class instance counts (unweighted); missing classes are skipped.
    std::vector<std::size_t> class_counts() const;
    bool has_missing() const;

    Dataset subset(std::span<const std::size_t> indices) const;
    Dataset with_class(std::string_view name) const;

    bool operator==(const Dataset&) const = default;

private:
    std::string relation_;
    Schema schema_;
    std::vector<Instance> instances_;
};

/// One item of the 16-symptom learning-disability checklist.
struct ChecklistItem {
    std::string_view code;
    std::string_view description;
};

/// The 16 symptom attributes, in checklist order.
std::span<const ChecklistItem> ld_checklist_items();

/// 16 binary {N,Y} symptom attributes followed by the binary class LD {N,Y}.
Schema ld_checklist_schema();

/// Replaces numeric gaps by the column mean and categorical gaps by the
/// column mode (ties resolved by declaration order). Means and modes are
/// weighted by instance weight. Throws Error naming any column that has
/// no observed value at all.
Dataset impute_missing(const Dataset& d);

struct Fold {
    Dataset train;
    Dataset test;
    std::vector<std::size_t> test_indices;
};

/// Fold id in [0, k) for each instance. With `stratify`, each class is
/// shuffled separately and dealt round-robin, the deal continuing across
/// classes so fold sizes also differ by at most one.
std::vector<std::size_t> fold_assignment(const Dataset& d, std::size_t k, std::uint64_t seed,
                                         bool stratify = true);

std::vector<Fold> stratified_folds(const Dataset& d, std::size_t k, std::uint64_t seed,
                                   bool stratify = true);

} // namespace ldscreen
