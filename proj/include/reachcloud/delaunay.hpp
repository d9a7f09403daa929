#pragma once

// Incremental 3D Delaunay triangulation (Bowyer-Watson) with ghost
// tetrahedra beyond the hull, Morton-ordered insertion with walk location,
// and exact/perturbed predicates for degenerate inputs.

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <unordered_map>
#include <vector>

#include "reachcloud/predicates.hpp"
#include "reachcloud/rng.hpp"

namespace reachcloud {

/// Input whose affine hull has dimension < 3 (or fewer than 4 distinct
/// points); carries the detected affine dimension.
class DegenerateInputError : public std::runtime_error {
  public:
    DegenerateInputError(int dim, const std::string& what)
        : std::runtime_error(what), dimension_(dim) {}
    int dimension() const { return dimension_; }

  private:
    int dimension_;
};

class Triangulation {
  public:
    static constexpr std::uint32_t kGhost = 0xFFFFFFFFu;

    explicit Triangulation(std::span<const Vec3> input) {
        build(input);
    }

    const std::vector<Vec3>& points() const { return pts_; }

    struct FiniteTet {
        std::array<std::uint32_t, 4> v;
        double circumradius_sq;
    };

    /// Alive finite tetrahedra with circumradius squared (large or infinite
    /// for near-degenerate slivers, which is the conservative direction for
    /// radius filtering).
    std::vector<FiniteTet> finite_tets() const {
        std::vector<FiniteTet> out;
        for (std::uint32_t t = 0; t < tets_.size(); ++t) {
            if (!alive_[t] || is_ghost(t)) continue;
            FiniteTet ft;
            ft.v = tets_[t].v;
            ft.circumradius_sq = circumradius_sq(t);
            out.push_back(ft);
        }
        return out;
    }

    /// Convex-hull faces with outward orientation.
    std::vector<std::array<std::uint32_t, 3>> hull_faces() const {
        std::vector<std::array<std::uint32_t, 3>> out;
        for (std::uint32_t t = 0; t < tets_.size(); ++t) {
            if (!alive_[t] || !is_ghost(t)) continue;
            // stored ghost face (g0,g1,g2) has its normal into the mesh
            out.push_back({tets_[t].v[0], tets_[t].v[2], tets_[t].v[1]});
        }
        return out;
    }

    // --- introspection used by the alpha complex ---

    struct Tet {
        std::array<std::uint32_t, 4> v;
        std::array<std::uint32_t, 4> nbr;
    };

    bool alive(std::uint32_t t) const { return alive_[t]; }
    bool is_ghost(std::uint32_t t) const { return tets_[t].v[3] == kGhost; }
    std::uint32_t tet_count() const { return static_cast<std::uint32_t>(tets_.size()); }
    const Tet& tet(std::uint32_t t) const { return tets_[t]; }

    /// Outward-oriented face of tet t opposite corner i.
    std::array<std::uint32_t, 3> face(std::uint32_t t, int i) const {
        const auto& v = tets_[t].v;
        switch (i) {
            case 0: return {v[1], v[3], v[2]};
            case 1: return {v[0], v[2], v[3]};
            case 2: return {v[0], v[3], v[1]};
            default: return {v[0], v[1], v[2]};
        }
    }

    double tet_volume(std::uint32_t t) const {
        const auto& v = tets_[t].v;
        const Vec3& a = pts_[v[0]];
        const Vec3& b = pts_[v[1]];
        const Vec3& c = pts_[v[2]];
        const Vec3& d = pts_[v[3]];
        return (a - d).dot((b - d).cross(c - d)) / 6.0;
    }

    double circumradius_sq(std::uint32_t t) const {
        const auto& v = tets_[t].v;
        const Vec3& a = pts_[v[0]];
        const Vec3 ba = pts_[v[1]] - a;
        const Vec3 ca = pts_[v[2]] - a;
        const Vec3 da = pts_[v[3]] - a;
        const double det = 2.0 * ba.dot(ca.cross(da));
        if (det == 0.0) return std::numeric_limits<double>::infinity();
        const Vec3 off = (ba.squaredNorm() * ca.cross(da) + ca.squaredNorm() * da.cross(ba) +
                          da.squaredNorm() * ba.cross(ca)) /
                         det;
        return off.squaredNorm();
    }

  private:
    std::vector<Vec3> pts_;
    std::vector<Tet> tets_;
    std::vector<char> alive_;
    std::vector<std::uint32_t> free_;
    // conflict stamps: 0 unknown, 1 conflict, 2 clean for the current epoch
    mutable std::vector<std::uint32_t> stamp_;
    mutable std::vector<char> mark_;
    std::uint32_t epoch_ = 0;
    std::uint32_t last_tet_ = 0;

    int orient(std::uint32_t a, std::uint32_t b, std::uint32_t c, std::uint32_t d) const {
        return predicates::orient3d(pts_[a], pts_[b], pts_[c], pts_[d]);
    }
    int orient_pt(std::uint32_t a, std::uint32_t b, std::uint32_t c, const Vec3& p) const {
        return predicates::orient3d(pts_[a], pts_[b], pts_[c], p);
    }

    std::uint32_t alloc_tet(std::uint32_t a, std::uint32_t b, std::uint32_t c, std::uint32_t d) {
        // keep the ghost vertex in slot 3 via an even permutation
        std::array<std::uint32_t, 4> v{a, b, c, d};
        if (v[0] == kGhost) v = {v[3], v[2], v[1], v[0]};
        else if (v[1] == kGhost) v = {v[2], v[3], v[0], v[1]};
        else if (v[2] == kGhost) v = {v[0], v[3], v[1], v[2]};
        std::uint32_t t;
        if (!free_.empty()) {
            t = free_.back();
            free_.pop_back();
            tets_[t].v = v;
            tets_[t].nbr = {kGhost, kGhost, kGhost, kGhost};
            alive_[t] = 1;
            stamp_[t] = 0;
            mark_[t] = 0;
        } else {
            t = static_cast<std::uint32_t>(tets_.size());
            tets_.push_back({v, {kGhost, kGhost, kGhost, kGhost}});
            alive_.push_back(1);
            stamp_.push_back(0);
            mark_.push_back(0);
        }
        return t;
    }

    // conflict decision for the point being inserted, memoized per epoch;
    // mark: bit0 = conflict, bit1 = clean, bit2 = queued into the cavity
    bool in_conflict(std::uint32_t t, const Vec3& p, std::uint32_t pidx) const {
        if (stamp_[t] == epoch_ && mark_[t] != 0) return (mark_[t] & 1) != 0;
        stamp_[t] = epoch_;
        mark_[t] = 2;  // provisional: breaks the mutual recursion at ghost/finite pairs
        bool c;
        const auto& v = tets_[t].v;
        if (is_ghost(t)) {
            const int o = orient_pt(v[0], v[1], v[2], p);
            if (o > 0) {
                c = true;
            } else if (o < 0) {
                c = false;
            } else {
                c = in_conflict(tets_[t].nbr[3], p, pidx);
            }
        } else {
            predicates::IndexedPoint ia{&pts_[v[0]], v[0]}, ib{&pts_[v[1]], v[1]},
                ic{&pts_[v[2]], v[2]}, id{&pts_[v[3]], v[3]}, ie{&p, pidx};
            c = predicates::insphere_perturbed(ia, ib, ic, id, ie) > 0;
        }
        mark_[t] = c ? 1 : 2;
        return c;
    }

    bool queued(std::uint32_t t) const { return stamp_[t] == epoch_ && (mark_[t] & 4) != 0; }
    void set_queued(std::uint32_t t) const { mark_[t] = static_cast<char>(mark_[t] | 4); }

    /// Walks toward p and returns some tet in conflict with p.
    std::uint32_t locate(const Vec3& p, std::uint32_t pidx) {
        std::uint32_t t = last_tet_;
        if (!alive_[t]) {
            for (t = 0; t < tets_.size() && !alive_[t]; ++t) {
            }
        }
        std::uint32_t steps = 0;
        const std::uint32_t max_steps = static_cast<std::uint32_t>(tets_.size()) * 4 + 64;
        std::uint64_t salt = 0;
        while (steps++ < max_steps) {
            if (is_ghost(t)) {
                if (in_conflict(t, p, pidx)) return t;
                // on-plane but clean ghost: continue into the mesh
                t = tets_[t].nbr[3];
                continue;
            }
            bool moved = false;
            const std::uint32_t r = static_cast<std::uint32_t>(rng::mix64(salt++ + 0x9E37 * t));
            for (int k = 0; k < 4 && !moved; ++k) {
                const int i = static_cast<int>((r + static_cast<std::uint32_t>(k)) & 3u);
                const auto f = face(t, i);
                if (orient_pt(f[0], f[1], f[2], p) < 0) {
                    t = tets_[t].nbr[static_cast<std::size_t>(i)];
                    moved = true;
                }
            }
            if (!moved) return t;  // p inside or on the boundary of t
        }
        // safety net: exhaustive scan (degenerate walk cycles)
        for (std::uint32_t s = 0; s < tets_.size(); ++s) {
            if (alive_[s] && in_conflict(s, p, pidx)) return s;
        }
        throw std::runtime_error("delaunay: point location failed");
    }

    void insert(std::uint32_t pidx) {
        const Vec3& p = pts_[pidx];
        ++epoch_;
        std::uint32_t seed = locate(p, pidx);
        if (!in_conflict(seed, p, pidx)) {
            // walk ended in a tet that is clean (point on a face/edge of
            // near-degenerate region): search its neighborhood
            std::vector<std::uint32_t> ring{seed};
            std::size_t qi = 0;
            bool found = false;
            while (qi < ring.size() && ring.size() < 64) {
                const std::uint32_t t = ring[qi++];
                for (int i = 0; i < 4; ++i) {
                    const std::uint32_t n = tets_[t].nbr[static_cast<std::size_t>(i)];
                    if (n == kGhost || !alive_[n]) continue;
                    if (std::find(ring.begin(), ring.end(), n) != ring.end()) continue;
                    if (in_conflict(n, p, pidx)) {
                        seed = n;
                        found = true;
                        break;
                    }
                    ring.push_back(n);
                }
                if (found) break;
            }
            if (!found) throw std::runtime_error("delaunay: no conflict tet found");
        }

        // flood the conflict region
        std::vector<std::uint32_t> cavity{seed};
        std::vector<std::uint32_t> queue{seed};
        set_queued(seed);
        struct Boundary {
            std::array<std::uint32_t, 3> f;  // outward face of the dead tet
            std::uint32_t outside;           // surviving neighbor
            std::uint32_t dead;              // cavity tet the face belonged to
        };
        std::vector<Boundary> boundary;
        while (!queue.empty()) {
            const std::uint32_t t = queue.back();
            queue.pop_back();
            for (int i = 0; i < 4; ++i) {
                const std::uint32_t n = tets_[t].nbr[static_cast<std::size_t>(i)];
                if (in_conflict(n, p, pidx)) {
                    if (!queued(n)) {
                        set_queued(n);
                        cavity.push_back(n);
                        queue.push_back(n);
                    }
                } else {
                    boundary.push_back({face(t, i), n, t});
                }
            }
        }
        // mark dead now; recycle ids only after refill so boundary records
        // never alias freshly created tets
        for (std::uint32_t t : cavity) alive_[t] = 0;

        // refill: one new tet per boundary face, glued via a face map
        std::unordered_map<std::uint64_t, std::pair<std::uint32_t, int>> open_faces;
        open_faces.reserve(boundary.size() * 3);
        auto edge_key = [](std::uint32_t u, std::uint32_t v) {
            if (u > v) std::swap(u, v);
            return (static_cast<std::uint64_t>(u) << 32) | v;
        };
        std::uint32_t created = kGhost;
        for (const auto& bf : boundary) {
            const std::uint32_t nt = alloc_tet(bf.f[0], bf.f[1], bf.f[2], pidx);
            created = nt;
            // adjacency across the boundary face: slot opposite p in nt
            int slot_p = 0;
            for (int i = 0; i < 4; ++i) {
                if (tets_[nt].v[static_cast<std::size_t>(i)] == pidx) slot_p = i;
            }
            tets_[nt].nbr[static_cast<std::size_t>(slot_p)] = bf.outside;
            for (int i = 0; i < 4; ++i) {
                if (tets_[bf.outside].nbr[static_cast<std::size_t>(i)] == bf.dead) {
                    tets_[bf.outside].nbr[static_cast<std::size_t>(i)] = nt;
                    break;
                }
            }
            // ridge faces: pair the faces that contain p
            for (int i = 0; i < 4; ++i) {
                if (i == slot_p) continue;
                const auto f = face(nt, i);
                std::array<std::uint32_t, 2> others{};
                int k = 0;
                for (std::uint32_t fv : f) {
                    if (fv != pidx) others[static_cast<std::size_t>(k++)] = fv;
                }
                const std::uint64_t key = edge_key(others[0], others[1]);
                auto it = open_faces.find(key);
                if (it == open_faces.end()) {
                    open_faces.emplace(key, std::make_pair(nt, i));
                } else {
                    tets_[nt].nbr[static_cast<std::size_t>(i)] = it->second.first;
                    tets_[it->second.first].nbr[static_cast<std::size_t>(it->second.second)] = nt;
                    open_faces.erase(it);
                }
            }
        }
        for (std::uint32_t t : cavity) free_.push_back(t);
        last_tet_ = created;
    }

    void build(std::span<const Vec3> input) {
        // deduplicate exactly equal points
        std::vector<std::uint32_t> order(input.size());
        for (std::uint32_t i = 0; i < input.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
            const Vec3& pa = input[a];
            const Vec3& pb = input[b];
            if (pa.x() != pb.x()) return pa.x() < pb.x();
            if (pa.y() != pb.y()) return pa.y() < pb.y();
            return pa.z() < pb.z();
        });
        pts_.reserve(input.size());
        for (std::uint32_t i = 0; i < order.size(); ++i) {
            const Vec3& p = input[order[i]];
            if (!pts_.empty() && pts_.back() == p) continue;
            pts_.push_back(p);
        }
        if (pts_.size() < 4) {
            throw DegenerateInputError(pts_.size() < 2 ? 0 : (pts_.size() < 3 ? 1 : 2),
                                       "triangulation: fewer than 4 distinct points");
        }

        // initial simplex: a, b distinct; c not collinear; d not coplanar
        const std::uint32_t a = 0;
        std::uint32_t b = 1;
        std::uint32_t c = kGhost;
        double best = 0.0;
        for (std::uint32_t i = 1; i < pts_.size(); ++i) {
            const double n = (pts_[i] - pts_[a]).cross(pts_[b] - pts_[a]).squaredNorm();
            if (n > best) {
                best = n;
                c = i;
            }
        }
        if (c == kGhost || collinear_exact(a, b, c)) {
            // double screening failed: exact scan
            c = kGhost;
            for (std::uint32_t i = 1; i < pts_.size() && c == kGhost; ++i) {
                if (!collinear_exact(a, b, i)) c = i;
            }
            if (c == kGhost) throw DegenerateInputError(1, "triangulation: all points collinear");
        }
        std::uint32_t d = kGhost;
        best = 0.0;
        for (std::uint32_t i = 1; i < pts_.size(); ++i) {
            const double vol =
                std::abs((pts_[i] - pts_[a]).dot((pts_[b] - pts_[a]).cross(pts_[c] - pts_[a])));
            if (vol > best) {
                best = vol;
                d = i;
            }
        }
        if (d == kGhost || orient(a, b, c, d) == 0) {
            d = kGhost;
            for (std::uint32_t i = 1; i < pts_.size() && d == kGhost; ++i) {
                if (i != b && i != c && orient(a, b, c, i) != 0) d = i;
            }
            if (d == kGhost) throw DegenerateInputError(2, "triangulation: all points coplanar");
        }
        std::uint32_t v0 = a, v1 = b, v2 = c, v3 = d;
        if (orient(v0, v1, v2, v3) < 0) std::swap(v1, v2);

        const std::uint32_t t0 = alloc_tet(v0, v1, v2, v3);
        std::array<std::uint32_t, 4> ghosts{};
        std::unordered_map<std::uint64_t, std::pair<std::uint32_t, int>> open_faces;
        auto edge_key = [](std::uint32_t u, std::uint32_t v) {
            if (u > v) std::swap(u, v);
            return (static_cast<std::uint64_t>(u) << 32) | v;
        };
        for (int i = 0; i < 4; ++i) {
            const auto f = face(t0, i);
            // ghost face stored with its normal into the mesh
            const std::uint32_t g = alloc_tet(f[0], f[2], f[1], kGhost);
            ghosts[static_cast<std::size_t>(i)] = g;
            tets_[g].nbr[3] = t0;
            tets_[t0].nbr[static_cast<std::size_t>(i)] = g;
        }
        // ghost-to-ghost adjacency around the initial tet
        for (std::uint32_t g : ghosts) {
            for (int i = 0; i < 3; ++i) {
                const auto f = face(g, i);
                std::array<std::uint32_t, 2> others{};
                int k = 0;
                for (std::uint32_t fv : f) {
                    if (fv != kGhost) others[static_cast<std::size_t>(k++)] = fv;
                }
                const std::uint64_t key = edge_key(others[0], others[1]);
                auto it = open_faces.find(key);
                if (it == open_faces.end()) {
                    open_faces.emplace(key, std::make_pair(g, i));
                } else {
                    tets_[g].nbr[static_cast<std::size_t>(i)] = it->second.first;
                    tets_[it->second.first].nbr[static_cast<std::size_t>(it->second.second)] = g;
                    open_faces.erase(it);
                }
            }
        }
        last_tet_ = t0;

        // remaining points in Morton order for walk locality
        std::vector<std::uint32_t> rest;
        rest.reserve(pts_.size());
        for (std::uint32_t i = 0; i < pts_.size(); ++i) {
            if (i != v0 && i != v1 && i != v2 && i != v3) rest.push_back(i);
        }
        sort_morton(rest);
        for (std::uint32_t i : rest) insert(i);
    }

    bool collinear_exact(std::uint32_t a, std::uint32_t b, std::uint32_t c) const {
        const mpq_class ux(pts_[b].x() - pts_[a].x()), uy(pts_[b].y() - pts_[a].y()),
            uz(pts_[b].z() - pts_[a].z());
        const mpq_class vx(pts_[c].x() - pts_[a].x()), vy(pts_[c].y() - pts_[a].y()),
            vz(pts_[c].z() - pts_[a].z());
        return sgn(uy * vz - uz * vy) == 0 && sgn(uz * vx - ux * vz) == 0 &&
               sgn(ux * vy - uy * vx) == 0;
    }

    void sort_morton(std::vector<std::uint32_t>& idx) const {
        if (idx.empty()) return;
        Vec3 lo = pts_[idx[0]], hi = pts_[idx[0]];
        for (std::uint32_t i : idx) {
            lo = lo.cwiseMin(pts_[i]);
            hi = hi.cwiseMax(pts_[i]);
        }
        const Vec3 span = (hi - lo).cwiseMax(1e-300);
        auto spread = [](std::uint64_t x) {
            x &= 0x1FFFFF;
            x = (x | (x << 32)) & 0x1F00000000FFFFull;
            x = (x | (x << 16)) & 0x1F0000FF0000FFull;
            x = (x | (x << 8)) & 0x100F00F00F00F00Full;
            x = (x | (x << 4)) & 0x10C30C30C30C30C3ull;
            x = (x | (x << 2)) & 0x1249249249249249ull;
            return x;
        };
        std::vector<std::uint64_t> key(idx.size());
        for (std::size_t k = 0; k < idx.size(); ++k) {
            const Vec3 q = (pts_[idx[k]] - lo).cwiseQuotient(span) * 2097151.0;
            key[k] = (spread(static_cast<std::uint64_t>(q.x())) << 2) |
                     (spread(static_cast<std::uint64_t>(q.y())) << 1) |
                     spread(static_cast<std::uint64_t>(q.z()));
        }
        std::vector<std::size_t> perm(idx.size());
        for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
        std::sort(perm.begin(), perm.end(), [&](std::size_t A, std::size_t B) {
            if (key[A] != key[B]) return key[A] < key[B];
            return idx[A] < idx[B];
        });
        std::vector<std::uint32_t> out(idx.size());
        for (std::size_t i = 0; i < perm.size(); ++i) out[i] = idx[perm[i]];
        idx = std::move(out);
    }
};

}  // namespace reachcloud
