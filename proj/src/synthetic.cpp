#include "ldscreen/synthetic.hpp"

#include <algorithm>
#include <random>

namespace ldscreen {

Dataset ChecklistGenerator::generate(std::uint64_t seed) const {
    auto schema = ld_checklist_schema();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<Instance> rows;
    rows.reserve(negatives + positives);
    auto emit = [&](std::size_t label, double p) {
        Instance x;
        for (std::size_t a = 0; a < schema.size(); ++a) {
            if (a == schema.class_index()) {
                x.values.push_back(Value::of_symbol(label));
            } else if (missing_rate > 0.0 && unit(rng) < missing_rate) {
                x.values.push_back(Value::missing());
            } else {
                x.values.push_back(Value::of_symbol(unit(rng) < p ? 1 : 0));
            }
        }
        rows.push_back(std::move(x));
    };
    for (std::size_t i = 0; i < negatives; ++i) emit(0, p_present_negative);
    for (std::size_t i = 0; i < positives; ++i) emit(1, p_present_positive);
    std::shuffle(rows.begin(), rows.end(), rng);
    return Dataset("ld_checklist", std::move(schema), std::move(rows));
}

} // namespace ldscreen
