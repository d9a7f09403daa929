#pragma once

// Alpha complex on top of the Delaunay triangulation: radius-filtered
// tetrahedra, largest connected component, watertight boundary extraction.

#include <map>
#include <unordered_map>

#include "reachcloud/delaunay.hpp"
#include "reachcloud/mesh.hpp"

namespace reachcloud {

/// No tetrahedron survives the radius filter.
class EmptyAlphaShapeError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct AlphaShapeInfo {
    int components_discarded = 0;  // kept components beyond the largest
    int pinch_repairs = 0;         // tetrahedra dropped to remove non-manifold edges
    bool watertight = true;
};

class AlphaComplex {
  public:
    explicit AlphaComplex(std::span<const Vec3> points) : tri_(points) {
        for (std::uint32_t t = 0; t < tri_.tet_count(); ++t) {
            if (tri_.alive(t) && !tri_.is_ghost(t)) {
                ids_.push_back(t);
                slot_.emplace(t, static_cast<std::uint32_t>(ids_.size() - 1));
                r2_.push_back(tri_.circumradius_sq(t));
            }
        }
    }

    const Triangulation& triangulation() const { return tri_; }

    double convex_volume() const {
        double v = 0.0;
        for (std::uint32_t t : ids_) v += tri_.tet_volume(t);
        return v;
    }

    TriangleMesh convex_hull_mesh() const { return compact(tri_.hull_faces()); }

    /// Volume of the alpha shape at the given radius (largest component).
    double shape_volume(double alpha, AlphaShapeInfo* info = nullptr) const {
        const auto kept = select(alpha, info);
        double v = 0.0;
        for (std::size_t k = 0; k < ids_.size(); ++k) {
            if (kept[k]) v += tri_.tet_volume(ids_[k]);
        }
        return v;
    }

    /// Watertight boundary of the alpha shape at the given radius.
    TriangleMesh boundary(double alpha, AlphaShapeInfo* info = nullptr) const {
        const auto kept = select(alpha, info);
        std::vector<std::array<std::uint32_t, 3>> faces;
        for (std::size_t k = 0; k < ids_.size(); ++k) {
            if (!kept[k]) continue;
            const std::uint32_t t = ids_[k];
            for (int i = 0; i < 4; ++i) {
                const std::uint32_t n = tri_.tet(t).nbr[static_cast<std::size_t>(i)];
                if (!is_kept(n, kept)) faces.push_back(tri_.face(t, i));
            }
        }
        return compact(faces);
    }

  private:
    bool is_kept(std::uint32_t t, const std::vector<char>& kept) const {
        if (tri_.is_ghost(t)) return false;
        const auto it = slot_.find(t);
        return it != slot_.end() && kept[it->second];
    }

    /// Radius filter + largest component + pinch repair. Returns a keep flag
    /// per finite tet.
    std::vector<char> select(double alpha, AlphaShapeInfo* info) const {
        const double a2 = alpha * alpha;
        std::vector<char> active(ids_.size(), 0);
        std::size_t n_active = 0;
        for (std::size_t k = 0; k < ids_.size(); ++k) {
            if (r2_[k] <= a2) {
                active[k] = 1;
                ++n_active;
            }
        }
        if (n_active == 0) {
            throw EmptyAlphaShapeError("alpha_shape: no tetrahedron has circumradius <= alpha");
        }
        AlphaShapeInfo local;
        std::vector<char> kept;
        for (int pass = 0; pass < 50; ++pass) {
            kept = largest_component(active, &local);
            const auto bad = pinch_edges(kept);
            if (bad.empty()) break;
            // drop the most marginal kept tet at each offending edge
            for (const auto& e : bad) {
                std::size_t worst = ids_.size();
                for (std::size_t k = 0; k < ids_.size(); ++k) {
                    if (!kept[k]) continue;
                    const auto& v = tri_.tet(ids_[k]).v;
                    int hit = 0;
                    for (std::uint32_t vv : v) hit += (vv == e[0] || vv == e[1]);
                    if (hit == 2 && (worst == ids_.size() || r2_[k] > r2_[worst])) worst = k;
                }
                if (worst < ids_.size()) {
                    active[worst] = 0;
                    ++local.pinch_repairs;
                }
            }
            local.watertight = false;
        }
        local.watertight = pinch_edges(kept).empty();
        if (info) *info = local;
        return kept;
    }

    std::vector<char> largest_component(const std::vector<char>& active,
                                        AlphaShapeInfo* info) const {
        std::vector<std::uint32_t> comp(ids_.size(), 0xFFFFFFFFu);
        std::uint32_t n_comp = 0;
        std::vector<std::uint32_t> stack;
        std::vector<std::size_t> comp_size;
        for (std::size_t s = 0; s < ids_.size(); ++s) {
            if (!active[s] || comp[s] != 0xFFFFFFFFu) continue;
            const std::uint32_t c = n_comp++;
            comp_size.push_back(0);
            stack.push_back(static_cast<std::uint32_t>(s));
            comp[s] = c;
            while (!stack.empty()) {
                const std::uint32_t k = stack.back();
                stack.pop_back();
                ++comp_size[c];
                for (int i = 0; i < 4; ++i) {
                    const std::uint32_t n = tri_.tet(ids_[k]).nbr[static_cast<std::size_t>(i)];
                    if (tri_.is_ghost(n)) continue;
                    const auto it = slot_.find(n);
                    if (it == slot_.end()) continue;
                    const std::uint32_t kn = it->second;
                    if (active[kn] && comp[kn] == 0xFFFFFFFFu) {
                        comp[kn] = c;
                        stack.push_back(kn);
                    }
                }
            }
        }
        std::uint32_t best = 0;
        for (std::uint32_t c = 1; c < n_comp; ++c) {
            if (comp_size[c] > comp_size[best]) best = c;
        }
        if (info) info->components_discarded = static_cast<int>(n_comp) - 1;
        std::vector<char> kept(ids_.size(), 0);
        for (std::size_t k = 0; k < ids_.size(); ++k) kept[k] = active[k] && comp[k] == best;
        return kept;
    }

    /// Undirected edges whose boundary-face count is not exactly 2.
    std::vector<std::array<std::uint32_t, 2>> pinch_edges(const std::vector<char>& kept) const {
        std::map<std::array<std::uint32_t, 2>, int> count;
        for (std::size_t k = 0; k < ids_.size(); ++k) {
            if (!kept[k]) continue;
            const std::uint32_t t = ids_[k];
            for (int i = 0; i < 4; ++i) {
                const std::uint32_t n = tri_.tet(t).nbr[static_cast<std::size_t>(i)];
                if (is_kept(n, kept)) continue;
                const auto f = tri_.face(t, i);
                for (int j = 0; j < 3; ++j) {
                    std::uint32_t u = f[static_cast<std::size_t>(j)];
                    std::uint32_t v = f[static_cast<std::size_t>((j + 1) % 3)];
                    if (u > v) std::swap(u, v);
                    ++count[{u, v}];
                }
            }
        }
        std::vector<std::array<std::uint32_t, 2>> bad;
        for (const auto& [e, n] : count) {
            if (n != 2) bad.push_back(e);
        }
        return bad;
    }

    TriangleMesh compact(const std::vector<std::array<std::uint32_t, 3>>& faces) const {
        TriangleMesh m;
        std::unordered_map<std::uint32_t, std::uint32_t> remap;
        m.faces.reserve(faces.size());
        for (const auto& f : faces) {
            std::array<std::uint32_t, 3> g{};
            for (int i = 0; i < 3; ++i) {
                const std::uint32_t v = f[static_cast<std::size_t>(i)];
                auto it = remap.find(v);
                if (it == remap.end()) {
                    it = remap.emplace(v, static_cast<std::uint32_t>(m.vertices.size())).first;
                    m.vertices.push_back(tri_.points()[v]);
                }
                g[static_cast<std::size_t>(i)] = it->second;
            }
            m.faces.push_back(g);
        }
        return m;
    }

    Triangulation tri_;
    std::vector<std::uint32_t> ids_;
    std::unordered_map<std::uint32_t, std::uint32_t> slot_;
    std::vector<double> r2_;
};

/// Boundary of the alpha complex of the point set.
inline TriangleMesh alpha_shape(std::span<const Vec3> points, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha_shape: alpha must be positive");
    AlphaComplex c(points);
    return c.boundary(alpha);
}

/// Exact convex hull (boundary of the Delaunay triangulation). Degenerate
/// input raises DegenerateInputError carrying the affine dimension.
inline TriangleMesh convex_hull(std::span<const Vec3> points) {
    AlphaComplex c(points);
    return c.convex_hull_mesh();
}

}  // namespace reachcloud
