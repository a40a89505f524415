#include "ldscreen/cluster.hpp"

#include "ldscreen/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <limits>
#include <numeric>
#include <optional>
#include <random>

namespace ldscreen {

FeatureEncoder::FeatureEncoder(const Schema& schema) {
    for (auto a : schema.feature_indices()) {
        const auto& spec = schema.attribute(a);
        switch (spec.kind) {
        case AttributeKind::numeric:
            columns_.push_back({a, true, 0, spec.name});
            names_.push_back(spec.name);
            break;
        case AttributeKind::binary:
            columns_.push_back({a, false, 1, spec.name});
            names_.push_back(spec.name);
            break;
        case AttributeKind::nominal:
            for (std::size_t v = 0; v < spec.values.size(); ++v) {
                columns_.push_back({a, false, v, spec.name});
                names_.push_back(spec.name + "=" + spec.values[v]);
            }
            break;
        }
    }
}

std::vector<double> FeatureEncoder::encode(const Instance& x) const {
    std::vector<double> out;
    out.reserve(columns_.size());
    for (const auto& c : columns_) {
        const auto& v = x.values.at(c.attribute);
        if (v.is_missing())
            throw Error("missing value in '" + c.source + "'; impute before clustering");
        out.push_back(c.numeric ? v.number() : (v.symbol() == c.symbol ? 1.0 : 0.0));
    }
    return out;
}

double distance2(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw Error(fmt::format("dimension mismatch: {} vs {}", a.size(), b.size()));
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

namespace {

using Points = std::vector<std::vector<double>>;

Points encode_all(const Dataset& d) {
    if (d.empty()) throw Error("cannot cluster an empty dataset");
    const FeatureEncoder enc(d.schema());
    if (enc.dimension() == 0) throw Error("dataset has no attributes to cluster on");
    Points pts;
    pts.reserve(d.size());
    for (const auto& x : d.instances()) pts.push_back(enc.encode(x));
    return pts;
}

std::size_t nearest(const std::vector<double>& p, const Points& centroids) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        const double dist = distance2(p, centroids[c]);
        if (dist < best_d) {
            best_d = dist;
            best = c;
        }
    }
    return best;
}

Points means(const Points& pts, const std::vector<std::size_t>& assignment, std::size_t k, std::size_t dim) {
    Points out(k, std::vector<double>(dim, 0.0));
    std::vector<std::size_t> n(k, 0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        auto& m = out[assignment[i]];
        for (std::size_t j = 0; j < dim; ++j) m[j] += pts[i][j];
        ++n[assignment[i]];
    }
    for (std::size_t c = 0; c < k; ++c) {
        for (auto& v : out[c]) v /= static_cast<double>(n[c]);
    }
    return out;
}

ClusterModel lloyd(const Dataset& d, const Points& pts, Points centroids, std::size_t max_iter, std::uint64_t seed) {
    const std::size_t k = centroids.size();
    const std::size_t dim = pts.front().size();
    if (max_iter == 0) throw Error("max_iter must be positive");

    ClusterModel m;
    m.k = k;
    m.seed = seed;
    m.feature_names = FeatureEncoder(d.schema()).feature_names();
    std::vector<std::size_t> assignment(pts.size(), 0);

    for (std::size_t iter = 1; iter <= max_iter; ++iter) {
        std::vector<std::size_t> size(k, 0);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            assignment[i] = nearest(pts[i], centroids);
            ++size[assignment[i]];
        }
        // Refill each empty cluster with the point farthest from its centroid.
        for (std::size_t c = 0; c < k; ++c) {
            if (size[c] > 0) continue;
            std::optional<std::size_t> far;
            double far_d = -1.0;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                if (size[assignment[i]] < 2) continue;
                const double dist = distance2(pts[i], centroids[assignment[i]]);
                if (dist > far_d) {
                    far_d = dist;
                    far = i;
                }
            }
            if (!far) throw Error("cannot keep every cluster non-empty");
            --size[assignment[*far]];
            assignment[*far] = c;
            size[c] = 1;
        }

        auto updated = means(pts, assignment, k, dim);
        double wcss = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) wcss += distance2(pts[i], updated[assignment[i]]);
        m.wcss_history.push_back(wcss);
        m.iterations = iter;
        const bool converged = updated == centroids;
        centroids = std::move(updated);
        if (converged) break;
    }

    m.centroids = std::move(centroids);
    m.assignments = std::move(assignment);
    m.wcss = m.wcss_history.back();
    return m;
}

Points distinct_points(const Points& pts) {
    Points out;
    for (const auto& p : pts) {
        if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
    }
    return out;
}

} // namespace

ClusterModel kmeans_fit(const Dataset& d, std::size_t k, std::uint64_t seed, std::size_t max_iter) {
    const auto pts = encode_all(d);
    if (k == 0) throw Error("k must be positive");
    auto candidates = distinct_points(pts);
    if (k > candidates.size()) {
        throw Error(fmt::format("k = {} exceeds the {} distinct instances", k, candidates.size()));
    }
    std::mt19937_64 rng(seed);
    std::shuffle(candidates.begin(), candidates.end(), rng);
    candidates.resize(k);
    return lloyd(d, pts, std::move(candidates), max_iter, seed);
}

ClusterModel kmeans_fit(const Dataset& d, std::vector<std::vector<double>> initial_centroids, std::size_t max_iter) {
    const auto pts = encode_all(d);
    if (initial_centroids.empty()) throw Error("no initial centroids");
    if (initial_centroids.size() > pts.size()) throw Error("more centroids than instances");
    for (const auto& c : initial_centroids) {
        if (c.size() != pts.front().size()) throw Error("centroid dimension does not match the data");
    }
    return lloyd(d, pts, std::move(initial_centroids), max_iter, 0);
}

ClusterClassMap map_clusters_to_classes(const ClusterModel& m, const Dataset& d) {
    if (m.assignments.size() != d.size()) throw Error("model was not fit on this dataset");
    ClusterClassMap map;
    const auto n_classes = d.schema().num_classes();
    map.contingency.assign(m.k, std::vector<std::size_t>(n_classes, 0));
    map.sizes.assign(m.k, 0);
    for (std::size_t i = 0; i < d.size(); ++i) {
        ++map.sizes[m.assignments[i]];
        if (const auto c = d.label(i)) ++map.contingency[m.assignments[i]][*c];
    }
    for (const auto& row : map.contingency) {
        map.labels.push_back(static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin()));
    }
    return map;
}

std::string format_percentage(std::size_t count, std::size_t total) {
    if (total == 0) throw Error("percentage of an empty total");
    return fmt::format("{:.2f} %", 100.0 * static_cast<double>(count) / static_cast<double>(total));
}

std::string clustered_instances_text(const ClusterModel& m, const ClusterClassMap& map, const Schema& schema) {
    const auto total = std::accumulate(map.sizes.begin(), map.sizes.end(), std::size_t{0});
    std::string out;
    for (std::size_t c = 0; c < m.k; ++c) {
        out += fmt::format("Clustered Instances {} = {} ({}) - {} Nos. - {}\n", schema.class_attribute().name, c,
                           schema.class_name(map.labels[c]), map.sizes[c], format_percentage(map.sizes[c], total));
    }
    return out;
}

ClusterProfile cluster_profile(const ClusterModel& m, const Dataset& d) {
    if (m.assignments.size() != d.size()) throw Error("model was not fit on this dataset");
    const auto pts = encode_all(d);
    const auto dim = pts.front().size();
    ClusterProfile p;
    p.feature_names = m.feature_names;
    p.total = pts.size();
    p.full.assign(dim, 0.0);
    p.per_cluster.assign(m.k, std::vector<double>(dim, 0.0));
    p.sizes.assign(m.k, 0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto c = m.assignments[i];
        ++p.sizes[c];
        for (std::size_t j = 0; j < dim; ++j) {
            p.full[j] += pts[i][j];
            p.per_cluster[c][j] += pts[i][j];
        }
    }
    for (auto& v : p.full) v /= static_cast<double>(p.total);
    for (std::size_t c = 0; c < m.k; ++c) {
        for (auto& v : p.per_cluster[c]) v /= static_cast<double>(p.sizes[c]);
    }
    return p;
}

std::string to_text(const ClusterProfile& p, const ClusterModel& m, const ClusterClassMap& map, const Schema& schema,
                    bool imputed) {
    std::vector<std::string> header{"Attribute", fmt::format("Full Data ({})", p.total)};
    for (std::size_t c = 0; c < m.k; ++c) {
        header.push_back(fmt::format("{} = {} ({}) ({})", schema.class_attribute().name, c,
                                     schema.class_name(map.labels[c]), p.sizes[c]));
    }
    std::size_t name_w = header[0].size();
    for (const auto& n : p.feature_names) name_w = std::max(name_w, n.size());
    std::vector<std::size_t> col_w;
    for (std::size_t i = 1; i < header.size(); ++i) col_w.push_back(std::max<std::size_t>(header[i].size(), 10));

    std::string out = fmt::format("{:<{}}", header[0], name_w);
    for (std::size_t i = 1; i < header.size(); ++i) out += fmt::format("  {:>{}}", header[i], col_w[i - 1]);
    out += "\n";
    for (std::size_t j = 0; j < p.feature_names.size(); ++j) {
        out += fmt::format("{:<{}}  {:>{}.3f}", p.feature_names[j], name_w, p.full[j], col_w[0]);
        for (std::size_t c = 0; c < m.k; ++c) out += fmt::format("  {:>{}.3f}", p.per_cluster[c][j], col_w[c + 1]);
        out += "\n";
    }
    out += fmt::format("No. of iterations: {}\n", m.iterations);
    out += fmt::format("Within cluster sum of squared errors: {:.3f}\n", m.wcss);
    if (imputed) out += "Missing values globally replaced with mean/mode\n";
    return out;
}

std::string to_csv(const ClusterProfile& p) {
    std::string out = "attribute,full_data";
    for (std::size_t c = 0; c < p.per_cluster.size(); ++c) out += fmt::format(",cluster_{}", c);
    out += "\n";
    for (std::size_t j = 0; j < p.feature_names.size(); ++j) {
        out += p.feature_names[j];
        out += fmt::format(",{}", p.full[j]);
        for (const auto& col : p.per_cluster) out += fmt::format(",{}", col[j]);
        out += "\n";
    }
    return out;
}

} // namespace ldscreen
