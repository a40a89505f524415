#include "support.hpp"

#include "ldscreen/error.hpp"
#include "ldscreen/serialize.hpp"
#include "ldscreen/synthetic.hpp"

#include <doctest.h>

using namespace ldscreen;

namespace {

template <typename T, typename Reader>
T reparse(const T& value, Reader read) {
    return read(parse_json(to_json(value).dump(2)));
}

} // namespace

TEST_CASE("schema round-trip") {
    const auto s = ld_checklist_schema();
    CHECK(reparse(s, schema_from_json) == s);
    const auto j = to_json(s);
    CHECK(j["format"] == "ldscreen.schema");
    CHECK(j["version"] == kFormatVersion);
}

TEST_CASE("tree, rules, clusters and reports round-trip") {
    support::Rng rng(12);
    for (int t = 0; t < 20; ++t) {
        const auto s = support::random_schema(rng);
        const auto d = support::random_dataset(rng, s, {.min_instances = 10, .max_instances = 60, .missing_rate = 0.05, .weighted = t % 3 == 0});
        const auto tree = build_tree(d, {.min_leaf_weight = 1.0 + t % 3, .prune = t % 2 == 0});
        CHECK(reparse(tree, tree_from_json) == tree);

        const auto rules = simplify_rules(extract_rules(tree), d);
        CHECK(reparse(rules, rules_from_json) == rules);

        const auto filled = impute_missing(d);
        const auto km = kmeans_fit(filled, 1, t);
        CHECK(reparse(km, cluster_from_json) == km);

        const auto report = cross_validate(d, tree_learner(), {.folds = 2, .seed = static_cast<std::uint64_t>(t)});
        CHECK(reparse(report, report_from_json) == report);
    }
}

TEST_CASE("readers reject foreign or versionless documents") {
    const auto tree = build_tree(ChecklistGenerator{}.generate(0));
    auto j = to_json(tree);
    CHECK_NOTHROW(tree_from_json(j));

    auto no_version = j;
    no_version.erase("version");
    CHECK_THROWS_AS(tree_from_json(no_version), Error);

    auto future = j;
    future["version"] = kFormatVersion + 1;
    CHECK_THROWS_AS(tree_from_json(future), Error);

    CHECK_THROWS_AS(rules_from_json(j), Error);
    CHECK_THROWS_AS(parse_json("{not json"), ParseError);

    auto broken = j;
    broken["root"]["children"] = Json::array();
    CHECK_THROWS_AS(tree_from_json(broken), Error);
}

TEST_CASE("tree document fields") {
    const auto d = ChecklistGenerator{}.generate(0);
    const auto j = to_json(build_tree(d));
    CHECK(j["format"] == "ldscreen.tree");
    CHECK(j.contains("schema"));
    CHECK(j["config"]["confidence_factor"] == 0.25);
    const auto& root = j["root"];
    CHECK(root["type"] == "decision");
    CHECK(root["attribute"].is_string());
    CHECK(root["threshold"].is_null());
    CHECK(root["branch_weights"].size() == 2);
    CHECK(root["class_counts"].size() == 2);
}
