#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "reachcloud/core.hpp"

namespace reachcloud {

struct VoxelVolumeResult {
    double volume = 0.0;
    double resolution = 0.0;
    std::int64_t occupied = 0;
    std::int64_t filled_by_closing = 0;
};

/// Occupancy-grid volume estimate: count occupied cells after one
/// morphological closing pass (a cell becomes occupied when at least 5 of
/// its 6 face neighbors are), times resolution^3.
inline VoxelVolumeResult voxel_volume(std::span<const Vec3> points, double resolution) {
    if (!(resolution > 0.0)) throw std::invalid_argument("voxel_volume: resolution must be positive");
    VoxelVolumeResult res;
    res.resolution = resolution;
    if (points.empty()) return res;

    Vec3 lo = points[0], hi = points[0];
    for (const auto& p : points) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    // one-cell margin so the closing pass sees complete neighborhoods
    int dims[3];
    for (int k = 0; k < 3; ++k) {
        dims[k] = static_cast<int>(std::floor((hi[k] - lo[k]) / resolution)) + 3;
    }
    const std::size_t n = static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
    std::vector<char> occ(n, 0);
    auto at = [&](int x, int y, int z) -> std::size_t {
        return (static_cast<std::size_t>(x) * dims[1] + y) * dims[2] + z;
    };
    for (const auto& p : points) {
        int c[3];
        for (int k = 0; k < 3; ++k) {
            c[k] = static_cast<int>(std::floor((p[k] - lo[k]) / resolution)) + 1;
            c[k] = std::clamp(c[k], 1, dims[k] - 2);
        }
        occ[at(c[0], c[1], c[2])] = 1;
    }
    std::vector<char> closed(occ);
    for (int x = 1; x < dims[0] - 1; ++x) {
        for (int y = 1; y < dims[1] - 1; ++y) {
            for (int z = 1; z < dims[2] - 1; ++z) {
                if (occ[at(x, y, z)]) continue;
                const int nb = occ[at(x - 1, y, z)] + occ[at(x + 1, y, z)] + occ[at(x, y - 1, z)] +
                               occ[at(x, y + 1, z)] + occ[at(x, y, z - 1)] + occ[at(x, y, z + 1)];
                if (nb >= 5) {
                    closed[at(x, y, z)] = 1;
                    ++res.filled_by_closing;
                }
            }
        }
    }
    for (char c : closed) res.occupied += c;
    res.volume = static_cast<double>(res.occupied) * resolution * resolution * resolution;
    return res;
}

}  // namespace reachcloud
