#pragma once

// JSON documents for schemas, models and reports. Every document carries
// "format" and "version"; readers reject anything else. See README.md.

#include "ldscreen/cluster.hpp"
#include "ldscreen/dataset.hpp"
#include "ldscreen/eval.hpp"
#include "ldscreen/rules.hpp"
#include "ldscreen/tree.hpp"

#include <json.hpp>

namespace ldscreen {

using Json = nlohmann::json;

inline constexpr int kFormatVersion = 1;

Json to_json(const Schema& schema);
Schema schema_from_json(const Json& j);

Json to_json(const DecisionTreeModel& m);
DecisionTreeModel tree_from_json(const Json& j);

Json to_json(const RuleSet& rs);
RuleSet rules_from_json(const Json& j);

Json to_json(const ClusterModel& m);
ClusterModel cluster_from_json(const Json& j);

Json to_json(const EvaluationReport& r);
EvaluationReport report_from_json(const Json& j);

/// Parses text and throws ParseError on malformed JSON.
Json parse_json(std::string_view text);

} // namespace ldscreen
