#pragma once

#include "ldscreen/dataset.hpp"

#include <cstddef>
#include <cstdint>

namespace ldscreen {

/// Checklist data with a known class split: LD=Y rows report each symptom
/// with probability `p_present_positive`, LD=N rows with
/// `p_present_negative`. Rows are shuffled; `missing_rate` blanks symptom
/// cells (never the class).
struct ChecklistGenerator {
    std::size_t negatives = 94;
    std::size_t positives = 31;
    double p_present_negative = 0.3;
    double p_present_positive = 0.7;
    double missing_rate = 0.0;

    Dataset generate(std::uint64_t seed) const;
};

} // namespace ldscreen
