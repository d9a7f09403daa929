#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "reachcloud/core.hpp"

namespace reachcloud {

/// Indexed triangle mesh with outward-oriented faces.
struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<std::uint32_t, 3>> faces;
};

/// Mesh fails a structural requirement (open boundary, bad orientation).
class TopologyError : public std::runtime_error {
  public:
    TopologyError(std::string what, std::vector<std::array<std::uint32_t, 2>> bad_edges)
        : std::runtime_error(std::move(what)), bad_edges_(std::move(bad_edges)) {}
    const std::vector<std::array<std::uint32_t, 2>>& bad_edges() const { return bad_edges_; }

  private:
    std::vector<std::array<std::uint32_t, 2>> bad_edges_;
};

/// Edges that are not shared by exactly two faces with opposite direction.
inline std::vector<std::array<std::uint32_t, 2>> open_edges(const TriangleMesh& m) {
    // undirected edge -> (ascending-direction count, descending-direction count)
    std::map<std::array<std::uint32_t, 2>, std::array<int, 2>> count;
    for (const auto& f : m.faces) {
        for (int i = 0; i < 3; ++i) {
            const std::uint32_t u = f[static_cast<std::size_t>(i)];
            const std::uint32_t v = f[static_cast<std::size_t>((i + 1) % 3)];
            if (u < v) ++count[{u, v}][0];
            else ++count[{v, u}][1];
        }
    }
    std::vector<std::array<std::uint32_t, 2>> bad;
    for (const auto& [edge, n] : count) {
        if (n[0] != 1 || n[1] != 1) bad.push_back(edge);
    }
    return bad;
}

inline bool is_watertight(const TriangleMesh& m) { return open_edges(m).empty(); }

/// Divergence-theorem volume: sum of signed tetrahedra against the origin.
/// Requires a closed, consistently outward-oriented mesh.
inline double mesh_volume(const TriangleMesh& m) {
    const auto bad = open_edges(m);
    if (!bad.empty()) {
        throw TopologyError("mesh_volume: mesh is not watertight (" +
                                std::to_string(bad.size()) + " unmatched edges)",
                            bad);
    }
    double vol6 = 0.0;
    for (const auto& f : m.faces) {
        const Vec3& a = m.vertices[f[0]];
        const Vec3& b = m.vertices[f[1]];
        const Vec3& c = m.vertices[f[2]];
        vol6 += a.dot(b.cross(c));
    }
    return vol6 / 6.0;
}

/// Total face area.
inline double mesh_area(const TriangleMesh& m) {
    double area = 0.0;
    for (const auto& f : m.faces) {
        const Vec3& a = m.vertices[f[0]];
        const Vec3& b = m.vertices[f[1]];
        const Vec3& c = m.vertices[f[2]];
        area += 0.5 * (b - a).cross(c - a).norm();
    }
    return area;
}

/// Unit icosphere refinement (test and calibration geometry).
inline TriangleMesh icosphere(int subdivisions) {
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    TriangleMesh m;
    m.vertices = {{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0}, {0, -1, t},  {0, 1, t},
                  {0, -1, -t}, {0, 1, -t}, {t, 0, -1},  {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
    for (auto& v : m.vertices) v.normalize();
    m.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9},
               {5, 11, 4}, {11, 10, 2}, {10, 7, 6},  {7, 1, 8},  {3, 9, 4},   {3, 4, 2},
               {3, 2, 6},  {3, 6, 8},  {3, 8, 9},   {4, 9, 5},  {2, 4, 11},  {6, 2, 10},
               {8, 6, 7},  {9, 8, 1}};
    for (int s = 0; s < subdivisions; ++s) {
        std::map<std::array<std::uint32_t, 2>, std::uint32_t> midpoint;
        auto mid = [&](std::uint32_t a, std::uint32_t b) {
            std::array<std::uint32_t, 2> key{std::min(a, b), std::max(a, b)};
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            const std::uint32_t idx = static_cast<std::uint32_t>(m.vertices.size());
            m.vertices.push_back((m.vertices[a] + m.vertices[b]).normalized());
            midpoint.emplace(key, idx);
            return idx;
        };
        std::vector<std::array<std::uint32_t, 3>> next;
        next.reserve(m.faces.size() * 4);
        for (const auto& f : m.faces) {
            const std::uint32_t ab = mid(f[0], f[1]);
            const std::uint32_t bc = mid(f[1], f[2]);
            const std::uint32_t ca = mid(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({f[1], bc, ab});
            next.push_back({f[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        m.faces = std::move(next);
    }
    return m;
}

}  // namespace reachcloud
