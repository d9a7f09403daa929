#pragma once

// Robust geometric predicates: fast double evaluation with a conservative
// forward-error filter, exact rational (GMP) fallback, and index-based
// symbolic perturbation so degenerate point sets (cospherical, coplanar)
// still get consistent answers.

#include <array>
#include <cmath>
#include <cstdint>

#include <gmpxx.h>

#include "reachcloud/core.hpp"

namespace reachcloud {
namespace predicates {

/// Sign of det[b-a; c-a; d-a]: positive when d lies on the side of plane
/// (a,b,c) that the right-hand normal (b-a)x(c-a) points to.
inline int orient3d(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    const double adx = a.x() - d.x(), ady = a.y() - d.y(), adz = a.z() - d.z();
    const double bdx = b.x() - d.x(), bdy = b.y() - d.y(), bdz = b.z() - d.z();
    const double cdx = c.x() - d.x(), cdy = c.y() - d.y(), cdz = c.z() - d.z();

    const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
    const double cdxady = cdx * ady, adxcdy = adx * cdy;
    const double adxbdy = adx * bdy, bdxady = bdx * ady;

    const double det = adz * (bdxcdy - cdxbdy) + bdz * (cdxady - adxcdy) + cdz * (adxbdy - bdxady);
    const double permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * std::abs(adz) +
                             (std::abs(cdxady) + std::abs(adxcdy)) * std::abs(bdz) +
                             (std::abs(adxbdy) + std::abs(bdxady)) * std::abs(cdz);
    const double errbound = 1e-14 * permanent;
    if (det > errbound) return 1;
    if (det < -errbound) return -1;

    // exact rational fallback
    const mpq_class Adx(a.x() - d.x()), Ady(a.y() - d.y()), Adz(a.z() - d.z());
    const mpq_class Bdx(b.x() - d.x()), Bdy(b.y() - d.y()), Bdz(b.z() - d.z());
    const mpq_class Cdx(c.x() - d.x()), Cdy(c.y() - d.y()), Cdz(c.z() - d.z());
    const mpq_class exact = Adz * (Bdx * Cdy - Cdx * Bdy) + Bdz * (Cdx * Ady - Adx * Cdy) +
                            Cdz * (Adx * Bdy - Bdx * Ady);
    return sgn(exact);
}

/// Sign of the insphere determinant: positive when e lies strictly inside
/// the circumsphere of the positively oriented tetrahedron (a,b,c,d).
inline int insphere(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, const Vec3& e) {
    const double aex = a.x() - e.x(), aey = a.y() - e.y(), aez = a.z() - e.z();
    const double bex = b.x() - e.x(), bey = b.y() - e.y(), bez = b.z() - e.z();
    const double cex = c.x() - e.x(), cey = c.y() - e.y(), cez = c.z() - e.z();
    const double dex = d.x() - e.x(), dey = d.y() - e.y(), dez = d.z() - e.z();

    const double ab = aex * bey - bex * aey;
    const double bc = bex * cey - cex * bey;
    const double cd = cex * dey - dex * cey;
    const double da = dex * aey - aex * dey;
    const double ac = aex * cey - cex * aey;
    const double bd = bex * dey - dex * bey;

    const double abc = aez * bc - bez * ac + cez * ab;
    const double bcd = bez * cd - cez * bd + dez * bc;
    const double cda = cez * da + dez * ac + aez * cd;
    const double dab = dez * ab + aez * bd + bez * da;

    const double alift = aex * aex + aey * aey + aez * aez;
    const double blift = bex * bex + bey * bey + bez * bez;
    const double clift = cex * cex + cey * cey + cez * cez;
    const double dlift = dex * dex + dey * dey + dez * dez;

    const double det = (dlift * abc - clift * dab) + (blift * cda - alift * bcd);

    const double aezplus = std::abs(aez), bezplus = std::abs(bez);
    const double cezplus = std::abs(cez), dezplus = std::abs(dez);
    const double abplus = std::abs(ab), bcplus = std::abs(bc), cdplus = std::abs(cd);
    const double daplus = std::abs(da), acplus = std::abs(ac), bdplus = std::abs(bd);
    const double permanent =
        (cdplus * bezplus + bdplus * cezplus + bcplus * dezplus) * alift +
        (daplus * cezplus + acplus * dezplus + cdplus * aezplus) * blift +
        (abplus * dezplus + bdplus * aezplus + daplus * bezplus) * clift +
        (bcplus * aezplus + acplus * bezplus + abplus * cezplus) * dlift;
    const double errbound = 1e-13 * permanent;
    if (det > errbound) return 1;
    if (det < -errbound) return -1;

    // exact rational fallback (5x5 determinant via the lifted 4x4 form)
    auto row = [&](const Vec3& p) {
        std::array<mpq_class, 4> r;
        r[0] = mpq_class(p.x()) - mpq_class(e.x());
        r[1] = mpq_class(p.y()) - mpq_class(e.y());
        r[2] = mpq_class(p.z()) - mpq_class(e.z());
        r[3] = r[0] * r[0] + r[1] * r[1] + r[2] * r[2];
        return r;
    };
    const auto ra = row(a), rb = row(b), rc = row(c), rd = row(d);
    auto det3 = [](const std::array<mpq_class, 4>& r0, const std::array<mpq_class, 4>& r1,
                   const std::array<mpq_class, 4>& r2) -> mpq_class {
        mpq_class m0(r1[1] * r2[2] - r2[1] * r1[2]);
        mpq_class m1(r1[0] * r2[2] - r2[0] * r1[2]);
        mpq_class m2(r1[0] * r2[1] - r2[0] * r1[1]);
        mpq_class out(r0[0] * m0);
        out -= r0[1] * m1;
        out += r0[2] * m2;
        return out;
    };
    mpq_class exact(rb[3] * det3(ra, rc, rd));
    exact -= ra[3] * det3(rb, rc, rd);
    exact -= rc[3] * det3(ra, rb, rd);
    exact += rd[3] * det3(ra, rb, rc);
    return sgn(exact);
}

struct IndexedPoint {
    const Vec3* p;
    std::uint32_t index;
};

/// insphere with symbolic perturbation: never returns 0. Ties are broken by
/// perturbing points in index order (smallest index perturbed most), which
/// keeps degenerate configurations (grids, cospherical corners) consistent.
inline int insphere_perturbed(IndexedPoint a, IndexedPoint b, IndexedPoint c, IndexedPoint d,
                              IndexedPoint e) {
    const int s = insphere(*a.p, *b.p, *c.p, *d.p, *e.p);
    if (s != 0) return s;

    std::array<IndexedPoint, 5> pt{a, b, c, d, e};
    int swaps = 0;
    int n = 5;
    for (;;) {
        int count = 0;
        --n;
        for (int i = 0; i < n; ++i) {
            if (pt[i].index > pt[i + 1].index) {
                std::swap(pt[i], pt[i + 1]);
                ++count;
            }
        }
        swaps += count;
        if (count == 0) break;
    }
    int oriA = orient3d(*pt[1].p, *pt[2].p, *pt[3].p, *pt[4].p);
    if (oriA != 0) {
        return (swaps % 2 != 0) ? -oriA : oriA;
    }
    int oriB = -orient3d(*pt[0].p, *pt[2].p, *pt[3].p, *pt[4].p);
    return (swaps % 2 != 0) ? -oriB : oriB;
}

}  // namespace predicates
}  // namespace reachcloud
