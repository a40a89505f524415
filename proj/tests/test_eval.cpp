#include "support.hpp"

#include "ldscreen/error.hpp"
#include "ldscreen/eval.hpp"
#include "ldscreen/synthetic.hpp"

#include <doctest.h>

using namespace ldscreen;
using doctest::Approx;

namespace {

// Labels for the pooled 2-class outcome with the given confusion counts.
void expand(const std::vector<std::vector<std::size_t>>& cm, std::vector<std::string>& actual,
            std::vector<std::string>& predicted) {
    const std::vector<std::string> names{"N", "Y"};
    for (std::size_t a = 0; a < 2; ++a) {
        for (std::size_t p = 0; p < 2; ++p) {
            for (std::size_t i = 0; i < cm[a][p]; ++i) {
                actual.push_back(names[a]);
                predicted.push_back(names[p]);
            }
        }
    }
}

} // namespace

TEST_CASE("confusion tallies pairs") {
    const std::vector<std::size_t> a{0, 1, 1, 2}, p{0, 1, 1, 2};
    const auto cm = confusion(a, p, {"x", "y", "z"});
    CHECK(cm.counts == std::vector<std::vector<std::size_t>>{{1, 0, 0}, {0, 2, 0}, {0, 0, 1}});
    CHECK(cm.total() == 4);
    CHECK(cm.correct() == 4);

    const auto empty = confusion(std::span<const std::size_t>{}, std::span<const std::size_t>{}, {"x", "y"});
    CHECK(empty.total() == 0);
    CHECK_THROWS_AS(per_class_metrics(empty), Error);

    const std::vector<std::string> sa{"N", "Q"}, sp{"N", "N"};
    CHECK_THROWS_AS(confusion(sa, sp, {"N", "Y"}), Error);
    CHECK_THROWS_AS(confusion(std::vector<std::size_t>{0}, std::vector<std::size_t>{0, 1}, {"N", "Y"}), Error);
}

TEST_CASE("reconstructed 97/125 matrix") {
    std::vector<std::string> actual, predicted;
    expand({{79, 15}, {13, 18}}, actual, predicted);
    const auto cm = confusion(actual, predicted, {"N", "Y"});
    CHECK(cm.counts == std::vector<std::vector<std::size_t>>{{79, 15}, {13, 18}});
    const auto r = per_class_metrics(cm);
    CHECK(r.accuracy == Approx(0.776).epsilon(1e-12));
    CHECK(r.error_rate() == Approx(0.224).epsilon(1e-12));
    const auto& n = r.per_class[0];
    const auto& y = r.per_class[1];
    CHECK(n.tp_rate == Approx(79.0 / 94.0));
    CHECK(n.fp_rate == Approx(13.0 / 31.0));
    CHECK(n.precision == Approx(79.0 / 92.0));
    CHECK(y.tp_rate == Approx(18.0 / 31.0));
    CHECK(y.fp_rate == Approx(15.0 / 94.0));
    CHECK(y.precision == Approx(18.0 / 33.0));
    CHECK(!n.roc_area);

    const auto text = to_text(r);
    CHECK(text.find("Correctly Classified Instances       97 Nos.   77.60 %") != std::string::npos);
    CHECK(text.find("Incorrectly Classified Instances     28 Nos.   22.40 %") != std::string::npos);
    CHECK(text.find("  0.840    0.419      0.859   0.840      0.849         ?  N") != std::string::npos);
}

TEST_CASE("perfect and degenerate classifiers") {
    const auto perfect = per_class_metrics({{"N", "Y"}, {{10, 0}, {0, 5}}});
    CHECK(perfect.accuracy == 1.0);
    for (const auto& m : perfect.per_class) {
        CHECK(m.tp_rate == 1.0);
        CHECK(m.precision == 1.0);
        CHECK(m.f_measure == 1.0);
        CHECK(m.fp_rate == 0.0);
    }
    const auto never_y = per_class_metrics({{"N", "Y"}, {{10, 0}, {5, 0}}});
    CHECK(never_y.per_class[1].precision == 0.0);
    CHECK(never_y.per_class[1].f_measure == 0.0);
    CHECK(never_y.per_class[1].fp_rate == 0.0);

    const auto one_class = per_class_metrics({{"N", "Y"}, {{4, 0}, {0, 0}}});
    CHECK(one_class.per_class[0].fp_rate == 0.0);
    CHECK(one_class.per_class[1].tp_rate == 0.0);
}

TEST_CASE("metric identities on random matrices") {
    support::Rng rng(2);
    for (int t = 0; t < 200; ++t) {
        const auto n = 2 + support::pick(rng, 3);
        ConfusionMatrix cm;
        for (std::size_t c = 0; c < n; ++c) cm.classes.push_back("c" + std::to_string(c));
        cm.counts.assign(n, std::vector<std::size_t>(n, 0));
        for (auto& row : cm.counts) {
            for (auto& v : row) v = support::pick(rng, 4) == 0 ? 0 : support::pick(rng, 30);
        }
        if (cm.total() == 0) continue;
        const auto r = per_class_metrics(cm);
        CHECK(r.accuracy + r.error_rate() == Approx(1.0));
        CHECK(r.accuracy == Approx(static_cast<double>(cm.correct()) / static_cast<double>(cm.total())));
        for (const auto& m : r.per_class) {
            const double pr = m.precision + m.recall;
            CHECK(m.f_measure == Approx(pr > 0 ? 2 * m.precision * m.recall / pr : 0.0));
            CHECK(m.tp_rate == m.recall);
            for (double v : {m.tp_rate, m.fp_rate, m.precision, m.f_measure}) {
                CHECK(v >= 0.0);
                CHECK(v <= 1.0);
            }
        }
    }
}

TEST_CASE("roc area") {
    const std::vector<std::size_t> labels{0, 0, 1, 1};
    CHECK(roc_area(std::vector<double>{0.1, 0.2, 0.8, 0.9}, labels, 1) == 1.0);
    CHECK(roc_area(std::vector<double>{0.5, 0.5, 0.5, 0.5}, labels, 1) == 0.5);
    CHECK(roc_area(std::vector<double>{0.9, 0.8, 0.2, 0.1}, labels, 1) == 0.0);
    CHECK_THROWS_AS(roc_area(std::vector<double>{0.1, 0.2}, std::vector<std::size_t>{1, 1}, 1), Error);
    CHECK_THROWS_AS(roc_area(std::vector<double>{0.1}, labels, 1), Error);

    support::Rng rng(8);
    for (int t = 0; t < 100; ++t) {
        const auto n = 2 + support::pick(rng, 60);
        std::vector<double> scores;
        std::vector<std::size_t> ys;
        for (std::size_t i = 0; i < n; ++i) {
            scores.push_back(static_cast<double>(support::pick(rng, 8)) / 7.0);
            ys.push_back(i < 2 ? i : support::pick(rng, 2));
        }
        CHECK(roc_area(scores, ys, 1) == Approx(support::roc_oracle(scores, ys, 1)).epsilon(1e-9));
        std::vector<double> flipped;
        for (double s : scores) flipped.push_back(1.0 - s);
        CHECK(roc_area(flipped, ys, 0) == Approx(roc_area(scores, ys, 1)).epsilon(1e-9));
    }
}

TEST_CASE("majority learner cross-validates to the base rate") {
    const auto d = ChecklistGenerator{}.generate(4);
    const auto r = cross_validate(d, majority_learner(), {.folds = 2, .seed = 0});
    CHECK(r.accuracy == Approx(0.752));
    CHECK(r.matrix.total() == 125);
    CHECK(r.per_class[1].tp_rate == 0.0);
}

TEST_CASE("tiny cross-validation pools every prediction") {
    const auto s = support::binary_schema(1);
    const Dataset d("t", s, {support::binary_instance(1, 0, 0), support::binary_instance(1, 1, 1),
                             support::binary_instance(1, 0, 0), support::binary_instance(1, 1, 1)});
    std::size_t rounds = 0;
    const Learner counting = [&](const Dataset& train) -> Classifier {
        ++rounds;
        CHECK(train.size() == 2);
        return majority_learner()(train);
    };
    const auto preds = cross_validate_predictions(d, counting, {.folds = 2});
    CHECK(rounds == 2);
    CHECK(preds.size() == 4);
}

TEST_CASE("tree learner recovers a planted rule under 2-fold CV") {
    support::Rng rng(19);
    const auto rule = support::random_planted_rule(rng, 6, 2);
    const auto d = support::planted_dataset(rng, rule, 6, 400);
    const auto r = cross_validate(d, tree_learner({.prune = false}), {.folds = 2, .seed = 3});
    CHECK(r.accuracy == 1.0);
}

TEST_CASE("cross-validation is deterministic and thread-independent") {
    const auto d = ChecklistGenerator{.missing_rate = 0.05}.generate(1);
    for (const auto& learner : {tree_learner(), rules_learner(), rules_learner({}, false)}) {
        const auto serial = cross_validate(d, learner, {.folds = 5, .seed = 7});
        const auto parallel = cross_validate(d, learner, {.folds = 5, .seed = 7, .parallel = true});
        CHECK(serial == parallel);
        CHECK(to_text(serial) == to_text(cross_validate(d, learner, {.folds = 5, .seed = 7})));
        for (const auto& m : serial.per_class) CHECK(m.roc_area);
        CHECK(*serial.per_class[0].roc_area == Approx(*serial.per_class[1].roc_area).epsilon(1e-9));
    }
}

TEST_CASE("csv mirror") {
    const auto r = per_class_metrics({{"N", "Y"}, {{79, 15}, {13, 18}}});
    const auto csv = to_csv(r);
    CHECK(csv.rfind("class,tp_rate,fp_rate,precision,recall,f_measure,roc_area\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}
