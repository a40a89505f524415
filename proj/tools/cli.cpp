#include "cli.hpp"

#include "ldscreen/cluster.hpp"
#include "ldscreen/error.hpp"
#include "ldscreen/eval.hpp"
#include "ldscreen/io.hpp"
#include "ldscreen/rules.hpp"
#include "ldscreen/serialize.hpp"
#include "ldscreen/synthetic.hpp"
#include "ldscreen/tree.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <map>
#include <optional>

namespace ldscreen::cli {

namespace {

/// Bad flags, unreadable or malformed input: exit status 2.
struct UsageError : Error {
    using Error::Error;
};

struct GlobalOptions {
    std::string input;
    std::string format;
    std::string class_name;
    std::uint64_t seed = 0;
    std::string out;
};

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string resolve_format(const GlobalOptions& g) {
    if (!g.format.empty()) return g.format;
    return lower(std::filesystem::path(g.input).extension().string()) == ".csv" ? "csv" : "arff";
}

bool header_matches(std::string_view text, const Schema& schema) {
    const auto first_line = text.substr(0, text.find_first_of("\r\n"));
    std::string expected;
    for (std::size_t a = 0; a < schema.size(); ++a) {
        if (a) expected += ",";
        expected += schema.attribute(a).name;
    }
    std::string line(first_line);
    line.erase(std::remove_if(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); }), line.end());
    return line == expected;
}

Dataset load_dataset(const GlobalOptions& g) {
    if (g.input.empty()) throw UsageError("--input is required");
    try {
        const auto text = read_file(g.input);
        Dataset d;
        if (resolve_format(g) == "csv") {
            const auto ld = ld_checklist_schema();
            d = header_matches(text, ld) ? parse_csv(text, ld, true) : parse_csv(text, true);
        } else {
            d = parse_arff(text);
        }
        if (!g.class_name.empty()) d = d.with_class(g.class_name);
        return d;
    } catch (const Error& e) {
        throw UsageError(g.input + ": " + e.what());
    }
}

Json load_json(const std::string& path) {
    try {
        return parse_json(read_file(path));
    } catch (const Error& e) {
        throw UsageError(path + ": " + e.what());
    }
}

DecisionTreeModel load_tree(const std::string& path) {
    try {
        return tree_from_json(load_json(path));
    } catch (const UsageError&) {
        throw;
    } catch (const Error& e) {
        throw UsageError(path + ": " + e.what());
    }
}

void save(const std::string& path, const Json& j) { write_file(path, j.dump(2) + "\n"); }

double training_accuracy(const DecisionTreeModel& m, const Dataset& d) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (classify(m, d[i]).label == d.label(i)) ++hits;
    }
    return d.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(d.size());
}

struct TreeFlags {
    bool no_prune = false;
    double min_leaf = 2.0;
    double confidence = 0.25;

    TreeConfig config() const { return TreeConfig{min_leaf, confidence, !no_prune}; }
};

void add_tree_flags(CLI::App* cmd, TreeFlags& f) {
    cmd->add_flag("--no-prune", f.no_prune, "Skip pessimistic-error pruning");
    cmd->add_option("--min-leaf", f.min_leaf, "Minimum training weight per branch")->capture_default_str();
    cmd->add_option("--confidence", f.confidence, "Pruning confidence factor")->capture_default_str();
}

// ---------------------------------------------------------------- commands

int cmd_train(const GlobalOptions& g, const TreeFlags& flags, std::ostream& out) {
    const auto d = load_dataset(g);
    const auto model = build_tree(d, flags.config());
    out << to_text(model) << "\n";
    out << fmt::format("Number of Leaves  : {}\n", model.leaf_count());
    out << fmt::format("Size of the tree  : {}\n", model.node_count());
    out << fmt::format("Training accuracy : {:.2f} %\n", 100.0 * training_accuracy(model, d));
    if (!g.out.empty()) save(g.out, to_json(model));
    return 0;
}

struct EvaluateFlags {
    TreeFlags tree;
    std::size_t folds = 2;
    std::string learner = "tree";
    bool no_stratify = false;
    bool no_simplify = false;
    bool parallel = false;
    std::string csv;
};

int cmd_evaluate(const GlobalOptions& g, const EvaluateFlags& f, std::ostream& out) {
    const auto d = load_dataset(g);
    Learner learner;
    if (f.learner == "tree") learner = tree_learner(f.tree.config());
    else if (f.learner == "rules") learner = rules_learner(f.tree.config(), !f.no_simplify);
    else if (f.learner == "majority") learner = majority_learner();
    else throw UsageError("unknown learner '" + f.learner + "'");

    CrossValidationOptions cv{f.folds, g.seed, !f.no_stratify, f.parallel};
    EvaluationReport report;
    try {
        report = cross_validate(d, learner, cv);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    out << fmt::format("{}-fold cross-validation ({}, seed {})\n\n", f.folds, f.learner, g.seed);
    out << to_text(report);
    if (!g.out.empty()) save(g.out, to_json(report));
    if (!f.csv.empty()) write_file(f.csv, to_csv(report));
    return 0;
}

struct RulesFlags {
    TreeFlags tree;
    std::string model;
    bool simplify = false;
};

int cmd_rules(const GlobalOptions& g, const RulesFlags& f, std::ostream& out) {
    if (f.model.empty() && g.input.empty()) throw UsageError("rules needs --model or --input");
    std::optional<Dataset> data;
    if (!g.input.empty()) data = load_dataset(g);
    const auto model = f.model.empty() ? build_tree(*data, f.tree.config()) : load_tree(f.model);

    auto rs = extract_rules(model);
    if (f.simplify) {
        if (!data) throw UsageError("--simplify needs --input to measure rules on");
        if (!(data->schema() == rs.schema)) throw UsageError("dataset schema does not match the model");
        rs = simplify_rules(rs, *data);
    }
    out << to_text(rs);
    if (!g.out.empty()) save(g.out, to_json(rs));
    return 0;
}

struct ClusterFlags {
    std::size_t k = 2;
    std::size_t max_iter = 100;
    std::string csv;
};

int cmd_cluster(const GlobalOptions& g, const ClusterFlags& f, std::ostream& out) {
    const auto raw = load_dataset(g);
    const bool imputed = raw.has_missing();
    Dataset d;
    ClusterModel model;
    try {
        d = impute_missing(raw);
        model = kmeans_fit(d, f.k, g.seed, f.max_iter);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    const auto map = map_clusters_to_classes(model, d);
    const auto profile = cluster_profile(model, d);
    out << to_text(profile, model, map, d.schema(), imputed) << "\n";
    out << clustered_instances_text(model, map, d.schema());
    if (!g.out.empty()) save(g.out, to_json(model));
    if (!f.csv.empty()) write_file(f.csv, to_csv(profile));
    return 0;
}

struct ChecklistFlags {
    std::string model;
    std::string answers;
    std::string answers_file;
    bool any_schema = false;
};

std::vector<std::string> split_tokens(std::string_view text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (char c : text) {
        if (c == ',' || c == ';' || std::isspace(static_cast<unsigned char>(c))) {
            if (!cur.empty()) tokens.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

// Answers are either positional symbols or NAME=VALUE pairs.
Instance checklist_instance(const Schema& schema, const std::vector<std::string>& tokens) {
    const auto features = schema.feature_indices();
    if (tokens.size() != features.size()) {
        throw UsageError(fmt::format("expected {} answers, got {}", features.size(), tokens.size()));
    }
    std::vector<std::string> values(schema.size());
    const bool keyed = std::all_of(tokens.begin(), tokens.end(), [](const std::string& t) { return t.find('=') != std::string::npos; });
    if (keyed) {
        std::map<std::string, std::string> seen;
        for (const auto& t : tokens) {
            const auto eq = t.find('=');
            const auto name = t.substr(0, eq);
            const auto idx = schema.find(name);
            if (!idx || *idx == schema.class_index()) throw UsageError("unknown checklist item '" + name + "'");
            if (!seen.emplace(name, t.substr(eq + 1)).second) throw UsageError("item '" + name + "' answered twice");
            values[*idx] = t.substr(eq + 1);
        }
    } else {
        for (std::size_t i = 0; i < features.size(); ++i) values[features[i]] = tokens[i];
    }

    Instance x;
    for (std::size_t a = 0; a < schema.size(); ++a) {
        if (a == schema.class_index()) {
            x.values.push_back(Value::missing());
            continue;
        }
        const auto& spec = schema.attribute(a);
        if (spec.is_numeric()) {
            try {
                std::size_t used = 0;
                const double v = std::stod(values[a], &used);
                if (used != values[a].size()) throw std::invalid_argument("trailing");
                x.values.push_back(Value::of_number(v));
            } catch (const std::exception&) {
                throw UsageError("answer '" + values[a] + "' for " + spec.name + " is not a number");
            }
            continue;
        }
        const auto sym = spec.find_value(values[a]);
        if (!sym) {
            std::string allowed;
            for (const auto& v : spec.values) allowed += (allowed.empty() ? "" : "/") + v;
            throw UsageError("invalid answer '" + values[a] + "' for " + spec.name + " (expected " + allowed + ")");
        }
        x.values.push_back(Value::of_symbol(*sym));
    }
    return x;
}

int cmd_checklist(const ChecklistFlags& f, std::ostream& out) {
    if (f.model.empty()) throw UsageError("checklist needs --model");
    const auto model = load_tree(f.model);
    if (!f.any_schema) {
        const auto ld = ld_checklist_schema();
        const auto& s = model.schema;
        bool same = s.size() == ld.size() && s.class_attribute().name == ld.class_attribute().name;
        for (std::size_t a = 0; same && a < s.size(); ++a) same = s.attribute(a).name == ld.attribute(a).name;
        if (!same) throw UsageError("model was not trained on the 16-item LD checklist; pass --schema to use its own attributes");
    }

    std::string text = f.answers;
    if (!f.answers_file.empty()) {
        try {
            text = read_file(f.answers_file);
        } catch (const Error& e) {
            throw UsageError(e.what());
        }
    }
    if (text.empty()) throw UsageError("checklist needs --answers or --answers-file");
    const auto x = checklist_instance(model.schema, split_tokens(text));

    const auto& schema = model.schema;
    const auto prediction = classify(model, x);
    out << fmt::format("Predicted {} = {}\n", schema.class_attribute().name, schema.class_name(prediction.label));
    out << "Distribution:";
    for (std::size_t c = 0; c < prediction.distribution.size(); ++c) {
        out << fmt::format(" {}={:.3f}", schema.class_name(c), prediction.distribution[c]);
    }
    out << "\n";

    const auto path = route(model, x);
    out << "Path:";
    const TreeNode* node = &model.root;
    if (path.empty()) out << " (root leaf)";
    for (std::size_t i = 0; i < path.size(); ++i) {
        out << (i ? " -> " : " ") << describe_branch(schema, *node, path[i]);
        node = &node->children[path[i]];
    }
    out << "\n";

    const auto rs = extract_rules(model);
    const auto match = match_rules(rs, x);
    if (match.rule) out << "Matched rule: " << to_string(schema, rs.rules[*match.rule]) << "\n";
    else out << fmt::format("Matched rule: none (default {})\n", schema.class_name(rs.default_class));
    return 0;
}

struct SynthFlags {
    ChecklistGenerator gen;
};

int cmd_synth(const GlobalOptions& g, const SynthFlags& f, std::ostream& out) {
    const auto d = f.gen.generate(g.seed);
    const bool csv = g.format == "csv" || (g.format.empty() && lower(std::filesystem::path(g.out).extension().string()) == ".csv");
    const auto text = csv ? write_csv(d) : write_arff(d);
    if (g.out.empty()) out << text;
    else write_file(g.out, text);
    return 0;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Decision-tree, rule and k-means screening toolkit for checklist data", "ldscreen"};
    app.require_subcommand(1);

    GlobalOptions g;
    app.add_option("--input", g.input, "Dataset file (ARFF or CSV)");
    app.add_option("--format", g.format, "Input format; inferred from the extension when omitted")
        ->check(CLI::IsMember({"arff", "csv"}));
    app.add_option("--class", g.class_name, "Class attribute (default: last categorical attribute)");
    app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
    app.add_option("--out", g.out, "Output file (model, report or data, depending on the command)");

    TreeFlags train_flags;
    auto* train = app.add_subcommand("train", "Induce a decision tree and save it as JSON")->fallthrough();
    add_tree_flags(train, train_flags);

    EvaluateFlags eval_flags;
    auto* evaluate = app.add_subcommand("evaluate", "Cross-validate a learner and print the metric table")->fallthrough();
    add_tree_flags(evaluate, eval_flags.tree);
    evaluate->add_option("--folds", eval_flags.folds, "Number of folds")->capture_default_str()->check(CLI::PositiveNumber);
    evaluate->add_option("--learner", eval_flags.learner, "tree, rules or majority")
        ->capture_default_str()
        ->check(CLI::IsMember({"tree", "rules", "majority"}));
    evaluate->add_flag("--no-stratify", eval_flags.no_stratify, "Plain shuffled folds");
    evaluate->add_flag("--no-simplify", eval_flags.no_simplify, "Use unsimplified rules with --learner rules");
    evaluate->add_flag("--parallel", eval_flags.parallel, "Run folds on separate threads");
    evaluate->add_option("--csv", eval_flags.csv, "Also write the per-class table as CSV");

    RulesFlags rules_flags;
    auto* rules = app.add_subcommand("rules", "Print the IF-THEN rules of a tree")->fallthrough();
    add_tree_flags(rules, rules_flags.tree);
    rules->add_option("--model", rules_flags.model, "Tree model JSON (otherwise a tree is trained on --input)");
    rules->add_flag("--simplify", rules_flags.simplify, "Drop redundant conditions, measured on --input");

    ClusterFlags cluster_flags;
    auto* cluster = app.add_subcommand("cluster", "K-means clustering with a per-cluster attribute profile")->fallthrough();
    cluster->add_option("-k,--clusters", cluster_flags.k, "Number of clusters")->capture_default_str()->check(CLI::PositiveNumber);
    cluster->add_option("--max-iter", cluster_flags.max_iter, "Iteration cap")->capture_default_str()->check(CLI::PositiveNumber);
    cluster->add_option("--csv", cluster_flags.csv, "Also write the profile as CSV");

    ChecklistFlags check_flags;
    auto* checklist = app.add_subcommand("checklist", "Score one child's 16 checklist answers with a tree model")->fallthrough();
    checklist->add_option("--model", check_flags.model, "Tree model JSON")->required();
    checklist->add_option("--answers", check_flags.answers, "Answers, e.g. Y,N,... or DR=Y,DS=N,...");
    checklist->add_option("--answers-file", check_flags.answers_file, "File holding the answers");
    checklist->add_flag("--schema", check_flags.any_schema, "Accept a model trained on any schema");

    SynthFlags synth_flags;
    auto* synth = app.add_subcommand("synth", "Write a synthetic checklist dataset")->fallthrough();
    synth->add_option("--negatives", synth_flags.gen.negatives, "LD=N rows")->capture_default_str();
    synth->add_option("--positives", synth_flags.gen.positives, "LD=Y rows")->capture_default_str();
    synth->add_option("--missing-rate", synth_flags.gen.missing_rate, "Fraction of blank symptom cells")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));

    std::vector<const char*> argv{"ldscreen"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*train) return cmd_train(g, train_flags, out);
        if (*evaluate) return cmd_evaluate(g, eval_flags, out);
        if (*rules) return cmd_rules(g, rules_flags, out);
        if (*cluster) return cmd_cluster(g, cluster_flags, out);
        if (*checklist) return cmd_checklist(check_flags, out);
        if (*synth) return cmd_synth(g, synth_flags, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

} // namespace ldscreen::cli
