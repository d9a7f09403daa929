#pragma once

// Hull analysis of a reachability cloud: convex hull, auto-calibrated alpha
// shape, volumes, and the unreachable volume fraction.

#include "reachcloud/alpha_shape.hpp"
#include "reachcloud/spatial.hpp"
#include "reachcloud/voxel.hpp"

namespace reachcloud {

/// UNR = 1 - v_concave/v_convex, clamped to [0, 1].
inline double unreachability(double v_concave, double v_convex, bool* clamped = nullptr) {
    if (!(v_concave > 0.0) || !(v_convex > 0.0) || v_concave > v_convex * (1.0 + 1e-12)) {
        throw std::domain_error("unreachability: need 0 < v_concave <= v_convex");
    }
    double u = 1.0 - v_concave / v_convex;
    bool c = false;
    if (u < 0.0) {
        u = 0.0;
        c = true;
    }
    if (u > 1.0) {
        u = 1.0;
        c = true;
    }
    if (clamped) *clamped = c;
    return u;
}

struct AutoAlphaResult {
    double alpha = 0.0;
    int multiplier = 8;           // chosen factor on the median NN distance
    double median_nn = 0.0;
    double voxel_volume = 0.0;    // oracle volume used for calibration
    double voxel_resolution = 0.0;
    bool calibrated = false;      // true when a multiplier matched the oracle
};

inline constexpr int kAlphaMultipliers[] = {4, 6, 8, 12, 16};
inline constexpr int kAlphaDefaultMultiplier = 8;

namespace detail {

/// Calibrates alpha = c * median_nn against the voxel oracle: the smallest
/// multiplier whose alpha-shape volume is within 10% wins, default 8.
inline AutoAlphaResult auto_alpha_impl(std::span<const Vec3> points, const AlphaComplex* complex) {
    if (points.size() < 2) throw std::invalid_argument("auto_alpha: need >= 2 points");
    AutoAlphaResult res;
    res.median_nn = median_nn_distance(points);
    res.alpha = kAlphaDefaultMultiplier * res.median_nn;
    if (!complex) return res;

    Vec3 lo = points[0], hi = points[0];
    for (const auto& p : points) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    // resolution follows the extent but never drops below the sampling
    // density the occupancy grid needs to fill up
    res.voxel_resolution =
        std::max({(hi - lo).maxCoeff() / 64.0, 2.5 * res.median_nn, 1e-300});
    const auto vox = voxel_volume(points, res.voxel_resolution);
    res.voxel_volume = vox.volume;
    if (!(res.voxel_volume > 0.0)) return res;

    for (int c : kAlphaMultipliers) {
        const double alpha = c * res.median_nn;
        double vol;
        try {
            vol = complex->shape_volume(alpha);
        } catch (const EmptyAlphaShapeError&) {
            continue;
        }
        if (std::abs(vol / res.voxel_volume - 1.0) <= 0.10) {
            res.alpha = alpha;
            res.multiplier = c;
            res.calibrated = true;
            return res;
        }
    }
    return res;
}

}  // namespace detail

/// alpha = multiplier * (median nearest-neighbor distance), the multiplier
/// calibrated against the voxel-occupancy volume oracle when possible.
inline AutoAlphaResult auto_alpha(std::span<const Vec3> points) {
    if (points.size() < 4) return detail::auto_alpha_impl(points, nullptr);
    try {
        AlphaComplex complex(points);
        return detail::auto_alpha_impl(points, &complex);
    } catch (const DegenerateInputError&) {
        return detail::auto_alpha_impl(points, nullptr);
    }
}

struct HullResult {
    double v_concave = 0.0;
    double v_convex = 0.0;
    double unr = 0.0;
    double alpha_used = 0.0;
    TriangleMesh concave_mesh;
    TriangleMesh convex_mesh;
    bool thin = false;
    bool unr_clamped = false;
    bool watertight = true;
    int components_discarded = 0;
    int pinch_repairs = 0;
    AutoAlphaResult alpha_info;
};

/// Full hull analysis: one Delaunay triangulation feeds the convex hull, the
/// auto-alpha calibration, and the concave boundary.
inline HullResult analyze_cloud(std::span<const Vec3> points) {
    HullResult r;
    AlphaComplex complex(points);
    r.alpha_info = detail::auto_alpha_impl(points, &complex);
    r.alpha_used = r.alpha_info.alpha;

    AlphaShapeInfo info;
    r.concave_mesh = complex.boundary(r.alpha_used, &info);
    r.v_concave = complex.shape_volume(r.alpha_used);
    r.components_discarded = info.components_discarded;
    r.pinch_repairs = info.pinch_repairs;
    r.watertight = info.watertight;

    r.convex_mesh = complex.convex_hull_mesh();
    r.v_convex = complex.convex_volume();
    if (r.v_concave > r.v_convex) r.v_concave = r.v_convex;  // guard fp round-off
    r.unr = unreachability(r.v_concave, r.v_convex, &r.unr_clamped);
    r.thin = r.v_concave < r.alpha_info.median_nn * mesh_area(r.convex_mesh);
    return r;
}

}  // namespace reachcloud
