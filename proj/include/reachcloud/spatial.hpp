#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "reachcloud/core.hpp"

namespace reachcloud {

/// Uniform-grid index over a fixed point set for exact fixed-radius queries
/// and nearest-neighbor distances. Immutable after construction.
class SpatialIndex {
  public:
    SpatialIndex(std::span<const Vec3> pts, double cell_size)
        : pts_(pts.begin(), pts.end()), cell_(cell_size) {
        if (!(cell_ > 0.0)) throw std::invalid_argument("SpatialIndex: cell size must be positive");
        if (pts_.empty()) throw std::invalid_argument("SpatialIndex: empty point set");
        lo_ = pts_[0];
        Vec3 hi = pts_[0];
        for (const auto& p : pts_) {
            lo_ = lo_.cwiseMin(p);
            hi = hi.cwiseMax(p);
        }
        for (int k = 0; k < 3; ++k) {
            dims_[k] = static_cast<int>(std::floor((hi[k] - lo_[k]) / cell_)) + 1;
            if (dims_[k] < 1) dims_[k] = 1;
        }
        const std::size_t ncell = static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2];
        std::vector<std::uint32_t> counts(ncell + 1, 0);
        std::vector<std::uint32_t> cell_of(pts_.size());
        for (std::size_t i = 0; i < pts_.size(); ++i) {
            cell_of[i] = cell_index(pts_[i]);
            ++counts[cell_of[i] + 1];
        }
        for (std::size_t c = 1; c <= ncell; ++c) counts[c] += counts[c - 1];
        start_ = counts;
        order_.resize(pts_.size());
        std::vector<std::uint32_t> cursor(start_.begin(), start_.end() - 1);
        for (std::uint32_t i = 0; i < pts_.size(); ++i) order_[cursor[cell_of[i]]++] = i;
    }

    std::size_t size() const { return pts_.size(); }
    double cell_size() const { return cell_; }

    /// All indices i with |p_i - q| <= r (inclusive), in ascending order.
    std::vector<std::uint32_t> query(const Vec3& q, double r) const {
        std::vector<std::uint32_t> out;
        query_into(q, r, out);
        std::sort(out.begin(), out.end());
        return out;
    }

    void query_into(const Vec3& q, double r, std::vector<std::uint32_t>& out) const {
        out.clear();
        const double r2 = r * r;
        int clo[3], chi[3];
        for (int k = 0; k < 3; ++k) {
            clo[k] = std::max(0, static_cast<int>(std::floor((q[k] - r - lo_[k]) / cell_)));
            chi[k] = std::min(dims_[k] - 1, static_cast<int>(std::floor((q[k] + r - lo_[k]) / cell_)));
        }
        for (int x = clo[0]; x <= chi[0]; ++x) {
            for (int y = clo[1]; y <= chi[1]; ++y) {
                for (int z = clo[2]; z <= chi[2]; ++z) {
                    const std::size_t c =
                        (static_cast<std::size_t>(x) * dims_[1] + y) * dims_[2] + z;
                    for (std::uint32_t s = start_[c]; s < start_[c + 1]; ++s) {
                        const std::uint32_t i = order_[s];
                        if ((pts_[i] - q).squaredNorm() <= r2) out.push_back(i);
                    }
                }
            }
        }
    }

    /// Distance from point i to its nearest other point (expanding search).
    double nearest_distance(std::uint32_t i) const {
        if (pts_.size() < 2) return std::numeric_limits<double>::infinity();
        const Vec3& q = pts_[i];
        double best2 = std::numeric_limits<double>::infinity();
        for (int ring = 1;; ++ring) {
            const double r = ring * cell_;
            int clo[3], chi[3];
            for (int k = 0; k < 3; ++k) {
                clo[k] = std::max(0, static_cast<int>(std::floor((q[k] - r - lo_[k]) / cell_)));
                chi[k] = std::min(dims_[k] - 1,
                                  static_cast<int>(std::floor((q[k] + r - lo_[k]) / cell_)));
            }
            for (int x = clo[0]; x <= chi[0]; ++x) {
                for (int y = clo[1]; y <= chi[1]; ++y) {
                    for (int z = clo[2]; z <= chi[2]; ++z) {
                        const std::size_t c =
                            (static_cast<std::size_t>(x) * dims_[1] + y) * dims_[2] + z;
                        for (std::uint32_t s = start_[c]; s < start_[c + 1]; ++s) {
                            const std::uint32_t j = order_[s];
                            if (j == i) continue;
                            best2 = std::min(best2, (pts_[j] - q).squaredNorm());
                        }
                    }
                }
            }
            // a hit within ring*cell is final only once the whole shell at
            // that distance has been scanned
            if (best2 <= r * r) return std::sqrt(best2);
            const bool exhausted = clo[0] == 0 && clo[1] == 0 && clo[2] == 0 &&
                                   chi[0] == dims_[0] - 1 && chi[1] == dims_[1] - 1 &&
                                   chi[2] == dims_[2] - 1;
            if (exhausted) return std::sqrt(best2);
        }
    }

  private:
    std::uint32_t cell_index(const Vec3& p) const {
        int c[3];
        for (int k = 0; k < 3; ++k) {
            c[k] = static_cast<int>(std::floor((p[k] - lo_[k]) / cell_));
            c[k] = std::clamp(c[k], 0, dims_[k] - 1);
        }
        return static_cast<std::uint32_t>((static_cast<std::size_t>(c[0]) * dims_[1] + c[1]) *
                                              dims_[2] +
                                          c[2]);
    }

    std::vector<Vec3> pts_;
    double cell_;
    Vec3 lo_;
    int dims_[3];
    std::vector<std::uint32_t> start_;
    std::vector<std::uint32_t> order_;
};

/// Median nearest-neighbor distance of a point set.
inline double median_nn_distance(std::span<const Vec3> pts) {
    if (pts.size() < 2) throw std::invalid_argument("median_nn_distance: need >= 2 points");
    Vec3 lo = pts[0], hi = pts[0];
    for (const auto& p : pts) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const double extent = (hi - lo).maxCoeff();
    const double cell = std::max(extent / std::cbrt(static_cast<double>(pts.size())), 1e-300);
    SpatialIndex index(pts, cell);
    std::vector<double> nn(pts.size());
    for (std::uint32_t i = 0; i < pts.size(); ++i) nn[i] = index.nearest_distance(i);
    auto mid = nn.begin() + static_cast<std::ptrdiff_t>(nn.size() / 2);
    std::nth_element(nn.begin(), mid, nn.end());
    return *mid;
}

}  // namespace reachcloud
