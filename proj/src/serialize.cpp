#include "ldscreen/serialize.hpp"

#include "ldscreen/error.hpp"

#include <fmt/format.h>

namespace ldscreen {

namespace {

void check_header(const Json& j, std::string_view format) {
    if (!j.is_object()) throw ParseError("expected a JSON object", 0);
    if (!j.contains("format") || j.at("format") != format) {
        throw ParseError(fmt::format("not a '{}' document", format), 0);
    }
    if (!j.contains("version")) throw ParseError("document has no version field", 0);
    if (j.at("version") != kFormatVersion) {
        throw ParseError(fmt::format("unsupported {} version {}", format, j.at("version").dump()), 0);
    }
}

Json header(std::string_view format) { return Json{{"format", format}, {"version", kFormatVersion}}; }

std::size_t index_of(const Schema& schema, const std::string& name) {
    const auto idx = schema.find(name);
    if (!idx) throw ParseError("unknown attribute '" + name + "'", 0);
    return *idx;
}

std::size_t class_of(const Schema& schema, const std::string& label) {
    const auto idx = schema.class_attribute().find_value(label);
    if (!idx) throw ParseError("unknown class label '" + label + "'", 0);
    return *idx;
}

Json schema_body(const Schema& schema) {
    Json attrs = Json::array();
    for (const auto& a : schema.attributes()) {
        Json item{{"name", a.name}, {"kind", to_string(a.kind)}};
        if (!a.is_numeric()) item["values"] = a.values;
        attrs.push_back(std::move(item));
    }
    return Json{{"attributes", std::move(attrs)}, {"class", schema.class_attribute().name}};
}

Schema schema_body_from(const Json& j) {
    std::vector<AttributeSpec> attrs;
    for (const auto& item : j.at("attributes")) {
        const auto name = item.at("name").get<std::string>();
        const auto kind = item.at("kind").get<std::string>();
        if (kind == "numeric") {
            attrs.push_back(AttributeSpec::numeric(name));
        } else if (kind == "binary" || kind == "nominal") {
            auto spec = AttributeSpec::categorical(name, item.at("values").get<std::vector<std::string>>());
            if (to_string(spec.kind) != kind) throw ParseError("attribute '" + name + "' kind does not match its values", 0);
            attrs.push_back(std::move(spec));
        } else {
            throw ParseError("unknown attribute kind '" + kind + "'", 0);
        }
    }
    const auto cls = j.at("class").get<std::string>();
    std::optional<std::size_t> class_index;
    for (std::size_t i = 0; i < attrs.size(); ++i) {
        if (attrs[i].name == cls) class_index = i;
    }
    if (!class_index) throw ParseError("class attribute '" + cls + "' is not declared", 0);
    return Schema(std::move(attrs), *class_index);
}

Json node_to_json(const Schema& schema, const TreeNode& n) {
    Json j{{"class", schema.class_name(n.predicted_class)}, {"class_counts", n.class_counts}};
    if (n.is_leaf()) {
        j["type"] = "leaf";
        return j;
    }
    j["type"] = "decision";
    j["attribute"] = schema.attribute(n.test->attribute).name;
    j["threshold"] = n.test->threshold ? Json(*n.test->threshold) : Json(nullptr);
    j["branch_weights"] = n.branch_weights;
    Json children = Json::array();
    for (const auto& c : n.children) children.push_back(node_to_json(schema, c));
    j["children"] = std::move(children);
    return j;
}

TreeNode node_from_json(const Schema& schema, const Json& j) {
    TreeNode n;
    n.class_counts = j.at("class_counts").get<std::vector<double>>();
    if (n.class_counts.size() != schema.num_classes()) throw ParseError("class_counts has the wrong length", 0);
    n.predicted_class = class_of(schema, j.at("class").get<std::string>());
    const auto type = j.at("type").get<std::string>();
    if (type == "leaf") return n;
    if (type != "decision") throw ParseError("unknown node type '" + type + "'", 0);

    const auto attr = index_of(schema, j.at("attribute").get<std::string>());
    if (attr == schema.class_index()) throw ParseError("node tests the class attribute", 0);
    const auto& spec = schema.attribute(attr);
    NodeTest test{attr, std::nullopt};
    if (!j.at("threshold").is_null()) test.threshold = j.at("threshold").get<double>();
    if (spec.is_numeric() != test.threshold.has_value()) {
        throw ParseError("threshold presence does not match the kind of '" + spec.name + "'", 0);
    }
    n.test = test;
    n.branch_weights = j.at("branch_weights").get<std::vector<double>>();
    for (const auto& c : j.at("children")) n.children.push_back(node_from_json(schema, c));
    const auto expected = spec.is_numeric() ? 2 : spec.values.size();
    if (n.children.size() != expected || n.branch_weights.size() != expected) {
        throw ParseError("node on '" + spec.name + "' has the wrong number of branches", 0);
    }
    return n;
}

std::string_view relation_name(Relation r) {
    switch (r) {
    case Relation::equal: return "=";
    case Relation::less_equal: return "<=";
    case Relation::greater: return ">";
    }
    return "?";
}

Json optional_number(const std::optional<double>& x) { return x ? Json(*x) : Json(nullptr); }

} // namespace

Json to_json(const Schema& schema) {
    auto j = header("ldscreen.schema");
    j.update(schema_body(schema));
    return j;
}

Schema schema_from_json(const Json& j) {
    check_header(j, "ldscreen.schema");
    try {
        return schema_body_from(j);
    } catch (const Json::exception& e) {
        throw ParseError(e.what(), 0);
    }
}

Json to_json(const DecisionTreeModel& m) {
    auto j = header("ldscreen.tree");
    j["schema"] = schema_body(m.schema);
    j["config"] = {{"min_leaf_weight", m.config.min_leaf_weight},
                   {"confidence_factor", m.config.confidence_factor},
                   {"prune", m.config.prune}};
    j["root"] = node_to_json(m.schema, m.root);
    return j;
}

DecisionTreeModel tree_from_json(const Json& j) {
    check_header(j, "ldscreen.tree");
    try {
        DecisionTreeModel m;
        m.schema = schema_body_from(j.at("schema"));
        const auto& c = j.at("config");
        m.config.min_leaf_weight = c.at("min_leaf_weight").get<double>();
        m.config.confidence_factor = c.at("confidence_factor").get<double>();
        m.config.prune = c.at("prune").get<bool>();
        m.root = node_from_json(m.schema, j.at("root"));
        return m;
    } catch (const Json::exception& e) {
        throw ParseError(e.what(), 0);
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(e.what(), 0);
    }
}

Json to_json(const RuleSet& rs) {
    auto j = header("ldscreen.rules");
    j["schema"] = schema_body(rs.schema);
    Json rules = Json::array();
    for (const auto& r : rs.rules) {
        Json conds = Json::array();
        for (const auto& c : r.antecedent) {
            const auto& spec = rs.schema.attribute(c.attribute);
            Json value = c.relation == Relation::equal ? Json(spec.values.at(static_cast<std::size_t>(c.value))) : Json(c.value);
            conds.push_back({{"attribute", spec.name}, {"relation", relation_name(c.relation)}, {"value", std::move(value)}});
        }
        rules.push_back({{"conditions", std::move(conds)},
                         {"class", rs.schema.class_name(r.consequent)},
                         {"coverage", r.coverage},
                         {"accuracy", r.accuracy}});
    }
    j["rules"] = std::move(rules);
    j["default_class"] = rs.schema.class_name(rs.default_class);
    j["default_accuracy"] = rs.default_accuracy;
    j["confidence_factor"] = rs.confidence_factor;
    return j;
}

RuleSet rules_from_json(const Json& j) {
    check_header(j, "ldscreen.rules");
    try {
        RuleSet rs;
        rs.schema = schema_body_from(j.at("schema"));
        for (const auto& item : j.at("rules")) {
            Rule r;
            for (const auto& c : item.at("conditions")) {
                const auto attr = index_of(rs.schema, c.at("attribute").get<std::string>());
                const auto& spec = rs.schema.attribute(attr);
                const auto rel = c.at("relation").get<std::string>();
                if (rel == "=") {
                    if (spec.is_numeric()) throw ParseError("'=' condition on numeric '" + spec.name + "'", 0);
                    const auto sym = spec.find_value(c.at("value").get<std::string>());
                    if (!sym) throw ParseError("undeclared value in condition on '" + spec.name + "'", 0);
                    r.antecedent.push_back(Condition::equals(attr, *sym));
                } else if (rel == "<=" || rel == ">") {
                    if (!spec.is_numeric()) throw ParseError("'" + rel + "' condition on categorical '" + spec.name + "'", 0);
                    const auto t = c.at("value").get<double>();
                    r.antecedent.push_back(rel == "<=" ? Condition::at_most(attr, t) : Condition::above(attr, t));
                } else {
                    throw ParseError("unknown relation '" + rel + "'", 0);
                }
            }
            r.consequent = class_of(rs.schema, item.at("class").get<std::string>());
            r.coverage = item.at("coverage").get<double>();
            r.accuracy = item.at("accuracy").get<double>();
            rs.rules.push_back(std::move(r));
        }
        rs.default_class = class_of(rs.schema, j.at("default_class").get<std::string>());
        rs.default_accuracy = j.at("default_accuracy").get<double>();
        rs.confidence_factor = j.at("confidence_factor").get<double>();
        return rs;
    } catch (const Json::exception& e) {
        throw ParseError(e.what(), 0);
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(e.what(), 0);
    }
}

Json to_json(const ClusterModel& m) {
    auto j = header("ldscreen.kmeans");
    j["k"] = m.k;
    j["features"] = m.feature_names;
    j["centroids"] = m.centroids;
    j["assignments"] = m.assignments;
    j["wcss"] = m.wcss;
    j["wcss_history"] = m.wcss_history;
    j["iterations"] = m.iterations;
    j["seed"] = m.seed;
    return j;
}

ClusterModel cluster_from_json(const Json& j) {
    check_header(j, "ldscreen.kmeans");
    try {
        ClusterModel m;
        m.k = j.at("k").get<std::size_t>();
        m.feature_names = j.at("features").get<std::vector<std::string>>();
        m.centroids = j.at("centroids").get<std::vector<std::vector<double>>>();
        m.assignments = j.at("assignments").get<std::vector<std::size_t>>();
        m.wcss = j.at("wcss").get<double>();
        m.wcss_history = j.at("wcss_history").get<std::vector<double>>();
        m.iterations = j.at("iterations").get<std::size_t>();
        m.seed = j.at("seed").get<std::uint64_t>();
        if (m.centroids.size() != m.k) throw ParseError("centroid count differs from k", 0);
        for (const auto& c : m.centroids) {
            if (c.size() != m.feature_names.size()) throw ParseError("centroid dimension differs from feature count", 0);
        }
        for (auto a : m.assignments) {
            if (a >= m.k) throw ParseError("assignment refers to a missing cluster", 0);
        }
        return m;
    } catch (const Json::exception& e) {
        throw ParseError(e.what(), 0);
    }
}

Json to_json(const EvaluationReport& r) {
    auto j = header("ldscreen.report");
    j["classes"] = r.matrix.classes;
    j["confusion_matrix"] = r.matrix.counts;
    j["accuracy"] = r.accuracy;
    j["correct"] = r.matrix.correct();
    j["incorrect"] = r.matrix.total() - r.matrix.correct();
    Json per_class = Json::array();
    for (std::size_t c = 0; c < r.per_class.size(); ++c) {
        const auto& m = r.per_class[c];
        per_class.push_back({{"class", r.matrix.classes[c]},
                             {"tp_rate", m.tp_rate},
                             {"fp_rate", m.fp_rate},
                             {"precision", m.precision},
                             {"recall", m.recall},
                             {"f_measure", m.f_measure},
                             {"roc_area", optional_number(m.roc_area)}});
    }
    j["per_class"] = std::move(per_class);
    return j;
}

EvaluationReport report_from_json(const Json& j) {
    check_header(j, "ldscreen.report");
    try {
        EvaluationReport r;
        r.matrix.classes = j.at("classes").get<std::vector<std::string>>();
        r.matrix.counts = j.at("confusion_matrix").get<std::vector<std::vector<std::size_t>>>();
        r.accuracy = j.at("accuracy").get<double>();
        const auto n = r.matrix.classes.size();
        if (r.matrix.counts.size() != n) throw ParseError("confusion matrix is not square", 0);
        for (const auto& row : r.matrix.counts) {
            if (row.size() != n) throw ParseError("confusion matrix is not square", 0);
        }
        const auto& per_class = j.at("per_class");
        if (per_class.size() != n) throw ParseError("per_class length differs from class count", 0);
        for (const auto& item : per_class) {
            ClassMetrics m;
            m.tp_rate = item.at("tp_rate").get<double>();
            m.fp_rate = item.at("fp_rate").get<double>();
            m.precision = item.at("precision").get<double>();
            m.recall = item.at("recall").get<double>();
            m.f_measure = item.at("f_measure").get<double>();
            if (!item.at("roc_area").is_null()) m.roc_area = item.at("roc_area").get<double>();
            r.per_class.push_back(m);
        }
        return r;
    } catch (const Json::exception& e) {
        throw ParseError(e.what(), 0);
    }
}

Json parse_json(std::string_view text) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ParseError(e.what(), 0);
    }
}

} // namespace ldscreen
