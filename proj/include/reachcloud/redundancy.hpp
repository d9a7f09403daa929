#pragma once

// Activation-redundancy quantification: mean activation-space distance over
// spherical spatial neighborhoods of cloud points.

#include <fstream>
#include <optional>

#include "reachcloud/cloud.hpp"
#include "reachcloud/colormap.hpp"
#include "reachcloud/ply.hpp"
#include "reachcloud/spatial.hpp"

namespace reachcloud {

/// Fixed-radius index over the cloud positions, cell size = query radius.
inline SpatialIndex build_index(const ReachCloud& cloud, double r_s) {
    if (cloud.size() == 0) throw std::invalid_argument("build_index: empty cloud");
    return SpatialIndex(cloud.positions, r_s);
}

struct MeanActivationDistance {
    double d_bar = 0.0;  // defined only when k > 0
    int k = 0;           // neighbors within the radius, the point itself excluded
    bool isolated() const { return k == 0; }
};

/// Mean Euclidean distance in activation space between point i and the cloud
/// points within r_s of its position. The center point is excluded from its
/// own neighborhood.
inline MeanActivationDistance mean_activation_distance(const ReachCloud& cloud,
                                                       const SpatialIndex& index, std::int64_t i,
                                                       double r_s) {
    if (i < 0 || i >= cloud.size()) throw std::out_of_range("mean_activation_distance: bad index");
    if (!(r_s > 0.0)) throw std::invalid_argument("mean_activation_distance: radius must be positive");
    thread_local std::vector<std::uint32_t> hits;
    index.query_into(cloud.positions[static_cast<std::size_t>(i)], r_s, hits);
    std::sort(hits.begin(), hits.end());  // index-order summation, reproducible
    const auto gi = cloud.activation(i);
    MeanActivationDistance out;
    double sum = 0.0;
    for (std::uint32_t j : hits) {
        if (static_cast<std::int64_t>(j) == i) continue;
        const auto gj = cloud.activation(j);
        double d2 = 0.0;
        for (int b = 0; b < cloud.bundle_count; ++b) {
            const double d = static_cast<double>(gj[static_cast<std::size_t>(b)]) -
                             static_cast<double>(gi[static_cast<std::size_t>(b)]);
            d2 += d * d;
        }
        sum += std::sqrt(d2);
        ++out.k;
    }
    if (out.k > 0) out.d_bar = sum / out.k;
    return out;
}

struct ActivationDistanceField {
    double r_s = 0.0;
    std::vector<std::int64_t> subset_indices;
    std::vector<double> d_bar;      // aligned with subset_indices; 0 when isolated
    std::vector<int> k_neighbors;
    std::vector<char> isolated;
    std::int64_t isolated_count = 0;
    std::array<double, 5> quantiles{};  // 5/25/50/75/95 percentiles over non-isolated points
};

/// Evaluates the distance field on a deterministic seeded subset of the
/// cloud. Neighborhoods always search the full cloud.
inline ActivationDistanceField distance_field(const ReachCloud& cloud, std::int64_t subset_size,
                                              double r_s, std::uint64_t seed,
                                              int workers = default_workers()) {
    if (subset_size < 1 || subset_size > cloud.size()) {
        throw std::invalid_argument("distance_field: subset size must be in [1, cloud size]");
    }
    // seeded partial Fisher-Yates draw without replacement
    std::vector<std::int64_t> pool(static_cast<std::size_t>(cloud.size()));
    for (std::int64_t i = 0; i < cloud.size(); ++i) pool[static_cast<std::size_t>(i)] = i;
    ActivationDistanceField field;
    field.r_s = r_s;
    field.subset_indices.resize(static_cast<std::size_t>(subset_size));
    for (std::int64_t k = 0; k < subset_size; ++k) {
        const std::uint64_t span = static_cast<std::uint64_t>(cloud.size() - k);
        const std::int64_t pick = k + static_cast<std::int64_t>(rng::at(seed, static_cast<std::uint64_t>(k)) % span);
        std::swap(pool[static_cast<std::size_t>(k)], pool[static_cast<std::size_t>(pick)]);
        field.subset_indices[static_cast<std::size_t>(k)] = pool[static_cast<std::size_t>(k)];
    }

    const SpatialIndex index = build_index(cloud, r_s);
    field.d_bar.resize(field.subset_indices.size());
    field.k_neighbors.resize(field.subset_indices.size());
    field.isolated.resize(field.subset_indices.size());
    parallel_chunks(subset_size, workers, [&](std::int64_t b, std::int64_t e) {
        for (std::int64_t k = b; k < e; ++k) {
            const auto m = mean_activation_distance(
                cloud, index, field.subset_indices[static_cast<std::size_t>(k)], r_s);
            field.d_bar[static_cast<std::size_t>(k)] = m.isolated() ? 0.0 : m.d_bar;
            field.k_neighbors[static_cast<std::size_t>(k)] = m.k;
            field.isolated[static_cast<std::size_t>(k)] = m.isolated() ? 1 : 0;
        }
    });

    std::vector<double> live;
    live.reserve(field.d_bar.size());
    for (std::size_t k = 0; k < field.d_bar.size(); ++k) {
        if (field.isolated[k]) ++field.isolated_count;
        else live.push_back(field.d_bar[k]);
    }
    if (!live.empty()) {
        const double ps[5] = {0.05, 0.25, 0.5, 0.75, 0.95};
        for (int i = 0; i < 5; ++i) field.quantiles[static_cast<std::size_t>(i)] = quantile(live, ps[i]);
    }
    return field;
}

struct OctantReport {
    Vec3 centroid = Vec3::Zero();
    std::array<double, 8> mean_d_bar{};   // octants around the centroid
    std::array<std::int64_t, 8> count{};
    double global_median = 0.0;
    double max_over_median = 0.0;  // max octant mean / global median
};

/// Spatial uniformity summary: mean d_bar per octant around the cloud
/// centroid of the evaluated subset (non-isolated points only).
inline OctantReport octant_means(const ReachCloud& cloud, const ActivationDistanceField& field) {
    OctantReport rep;
    std::int64_t n = 0;
    for (std::size_t k = 0; k < field.subset_indices.size(); ++k) {
        if (field.isolated[k]) continue;
        rep.centroid += cloud.positions[static_cast<std::size_t>(field.subset_indices[k])];
        ++n;
    }
    if (n == 0) return rep;
    rep.centroid /= static_cast<double>(n);
    std::array<double, 8> sum{};
    std::vector<double> live;
    for (std::size_t k = 0; k < field.subset_indices.size(); ++k) {
        if (field.isolated[k]) continue;
        const Vec3 d = cloud.positions[static_cast<std::size_t>(field.subset_indices[k])] - rep.centroid;
        const int oct = (d.x() > 0 ? 1 : 0) | (d.y() > 0 ? 2 : 0) | (d.z() > 0 ? 4 : 0);
        sum[static_cast<std::size_t>(oct)] += field.d_bar[k];
        ++rep.count[static_cast<std::size_t>(oct)];
        live.push_back(field.d_bar[k]);
    }
    rep.global_median = quantile(live, 0.5);
    for (int o = 0; o < 8; ++o) {
        if (rep.count[static_cast<std::size_t>(o)] > 0) {
            rep.mean_d_bar[static_cast<std::size_t>(o)] =
                sum[static_cast<std::size_t>(o)] / static_cast<double>(rep.count[static_cast<std::size_t>(o)]);
        }
    }
    if (rep.global_median > 0.0) {
        for (int o = 0; o < 8; ++o) {
            if (rep.count[static_cast<std::size_t>(o)] > 0) {
                rep.max_over_median = std::max(
                    rep.max_over_median, rep.mean_d_bar[static_cast<std::size_t>(o)] / rep.global_median);
            }
        }
    }
    return rep;
}

/// CSV export: point index, position, d_bar, neighbor count, isolated flag.
inline void write_field_csv(const ReachCloud& cloud, const ActivationDistanceField& field,
                            const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("write_field_csv: cannot open " + path);
    out << "index,x,y,z,d_bar,k,isolated\n";
    char buf[256];
    for (std::size_t k = 0; k < field.subset_indices.size(); ++k) {
        const auto i = field.subset_indices[k];
        const Vec3& p = cloud.positions[static_cast<std::size_t>(i)];
        std::snprintf(buf, sizeof buf, "%lld,%.17g,%.17g,%.17g,%.17g,%d,%d\n",
                      static_cast<long long>(i), p.x(), p.y(), p.z(), field.d_bar[k],
                      field.k_neighbors[k], static_cast<int>(field.isolated[k]));
        out << buf;
    }
    if (!out) throw std::runtime_error("write_field_csv: write failed for " + path);
}

/// Colored PLY export of the subset: d_bar mapped through the embedded
/// 256-entry colormap, scaled by the 95th percentile; isolated points gray.
inline void write_field_ply(const ReachCloud& cloud, const ActivationDistanceField& field,
                            const std::string& path) {
    const double scale = field.quantiles[4] > 0.0 ? field.quantiles[4] : 1.0;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("write_field_ply: cannot open " + path);
    out << "ply\nformat binary_little_endian 1.0\n";
    out << "comment d_bar color scale: value/" << scale << " through 256-entry colormap\n";
    out << "comment isolated points gray 200,200,200\n";
    out << "element vertex " << field.subset_indices.size() << "\n";
    out << "property double x\nproperty double y\nproperty double z\n";
    out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
    out << "property double d_bar\nproperty int k\n";
    out << "end_header\n";
    std::string payload;
    for (std::size_t k = 0; k < field.subset_indices.size(); ++k) {
        const Vec3& p = cloud.positions[static_cast<std::size_t>(field.subset_indices[k])];
        detail::put_le_value(payload, p.x());
        detail::put_le_value(payload, p.y());
        detail::put_le_value(payload, p.z());
        if (field.isolated[k]) {
            payload.push_back(static_cast<char>(200));
            payload.push_back(static_cast<char>(200));
            payload.push_back(static_cast<char>(200));
        } else {
            const double t = std::clamp(field.d_bar[k] / scale, 0.0, 1.0);
            const auto& c = kFieldColormap[static_cast<std::size_t>(std::floor(t * 255.0 + 0.5))];
            payload.push_back(static_cast<char>(c[0]));
            payload.push_back(static_cast<char>(c[1]));
            payload.push_back(static_cast<char>(c[2]));
        }
        detail::put_le_value(payload, field.d_bar[k]);
        detail::put_le_value(payload, static_cast<std::int32_t>(field.k_neighbors[k]));
    }
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!out) throw std::runtime_error("write_field_ply: write failed for " + path);
}

}  // namespace reachcloud
