#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

namespace ldscreen {

/// A predicted class index and a distribution over classes summing to 1.
struct Prediction {
    std::size_t label = 0;
    std::vector<double> distribution;
};

/// Index of the largest weight; ties resolve to the lowest index.
inline std::size_t argmax(std::span<const double> weights) {
    return static_cast<std::size_t>(std::max_element(weights.begin(), weights.end()) - weights.begin());
}

} // namespace ldscreen
