#pragma once

#include "ldscreen/dataset.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ldscreen {

/// Maps instances to real vectors over the non-class attributes. Numeric
/// attributes pass through, a binary attribute becomes one 0/1 coordinate
/// (1 for its second declared value) and a nominal attribute with other
/// arity becomes one indicator per declared value.
class FeatureEncoder {
public:
    explicit FeatureEncoder(const Schema& schema);

    std::size_t dimension() const noexcept { return columns_.size(); }
    const std::vector<std::string>& feature_names() const noexcept { return names_; }
    /// Throws Error on a missing value.
    std::vector<double> encode(const Instance& x) const;

private:
    struct Column {
        std::size_t attribute;
        bool numeric;
        std::size_t symbol;
        std::string source;
    };
    std::vector<Column> columns_;
    std::vector<std::string> names_;
};

/// Squared Euclidean distance; Hamming distance on 0/1 vectors.
double distance2(std::span<const double> a, std::span<const double> b);

struct ClusterModel {
    std::size_t k = 0;
    std::vector<std::string> feature_names;
    std::vector<std::vector<double>> centroids;
    std::vector<std::size_t> assignments;
    double wcss = 0.0;
    std::size_t iterations = 0;
    std::uint64_t seed = 0;
    /// WCSS after each iteration's mean update.
    std::vector<double> wcss_history;

    bool operator==(const ClusterModel&) const = default;
};

/// Lloyd's algorithm seeded with `k` distinct instances drawn at random.
/// Each pass assigns every instance to its nearest centroid (ties: lowest
/// index), refills empty clusters with the instance farthest from its
/// centroid, and recomputes means; it stops once the means stop moving or
/// after `max_iter` passes. The class attribute is ignored and instance
/// weights are not used. Requires a dataset without missing values.
ClusterModel kmeans_fit(const Dataset& d, std::size_t k, std::uint64_t seed, std::size_t max_iter = 100);

/// Same iteration started from explicit centroids.
ClusterModel kmeans_fit(const Dataset& d, std::vector<std::vector<double>> initial_centroids,
                        std::size_t max_iter = 100);

struct ClusterClassMap {
    /// Majority class of each cluster (ties by class order).
    std::vector<std::size_t> labels;
    /// contingency[cluster][class], instances with a missing class skipped.
    std::vector<std::vector<std::size_t>> contingency;
    std::vector<std::size_t> sizes;
};

ClusterClassMap map_clusters_to_classes(const ClusterModel& m, const Dataset& d);

/// `count` of `total` as a percentage with two decimals: "75.20 %".
std::string format_percentage(std::size_t count, std::size_t total);

/// `Clustered Instances LD = 0 (N) - 94 Nos. - 75.20 %`, one line per cluster.
std::string clustered_instances_text(const ClusterModel& m, const ClusterClassMap& map, const Schema& schema);

/// Mean of every encoded feature over the full data and within each cluster.
struct ClusterProfile {
    std::vector<std::string> feature_names;
    std::vector<double> full;
    std::vector<std::vector<double>> per_cluster;
    std::vector<std::size_t> sizes;
    std::size_t total = 0;
};

ClusterProfile cluster_profile(const ClusterModel& m, const Dataset& d);

/// Aligned table: attribute, full data, one column per cluster, then the
/// iteration count and WCSS.
std::string to_text(const ClusterProfile& p, const ClusterModel& m, const ClusterClassMap& map, const Schema& schema,
                    bool imputed);
std::string to_csv(const ClusterProfile& p);

} // namespace ldscreen
