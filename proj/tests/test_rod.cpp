#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "reachcloud/design_io.hpp"
#include "reachcloud/rod.hpp"

#include "reference_values.hpp"

using namespace reachcloud;
namespace rt = reachcloud::testing;

namespace {

/// Closed-form endpoint for a rod with Z-independent extension and Darboux
/// vector: a circular arc or helix depending on the twist component.
Vec3 constant_curvature_endpoint(double zeta, const Vec3& u, double length) {
    const double nu = u.norm();
    if (nu == 0.0) return Vec3(0, 0, zeta * length);
    const Vec3 a = u / nu;
    const double theta = zeta * nu * length;
    const Vec3 e3 = Vec3::UnitZ();
    const Vec3 par = a * a.dot(e3);
    const Vec3 perp = e3 - par;
    const Vec3 axe3 = a.cross(e3);
    return zeta * length * par + perp * std::sin(theta) / nu + axe3 * (1.0 - std::cos(theta)) / nu;
}

double simpson(const std::vector<double>& z, const std::vector<double>& f) {
    double s = 0.0;
    for (std::size_t i = 0; i + 2 < z.size(); i += 2) {
        const double h = z[i + 1] - z[i];
        s += h / 3.0 * (f[i] + 4.0 * f[i + 1] + f[i + 2]);
    }
    return s;
}

}  // namespace

TEST_CASE("closed-form endpoint oracle agrees with the frozen reference") {
    const Vec3 r = constant_curvature_endpoint(0.93, Vec3(1.2, -0.4, 2.2), 1.0);
    CHECK_THAT(r.x(), Catch::Matchers::WithinRel(rt::kHelixX, 1e-14));
    CHECK_THAT(r.y(), Catch::Matchers::WithinRel(rt::kHelixY, 1e-14));
    CHECK_THAT(r.z(), Catch::Matchers::WithinRel(rt::kHelixZ, 1e-14));
}

TEST_CASE("integration basics") {
    const auto design = minimal_design(deg2rad(108.0), deg2rad(2.0));
    SECTION("zero activation yields a straight rod") {
        const auto cfg = integrate(design, ActivationState::zeros(design), 50);
        const Vec3 tip = end_effector(cfg);
        CHECK((tip - Vec3(0, 0, 1)).norm() < 1e-9);
        CHECK(cfg.centerline.front().norm() == 0.0);
        CHECK(cfg.frames.front().isApprox(Quat::Identity()));
    }
    SECTION("invalid step count raises") {
        CHECK_THROWS_AS(integrate(design, ActivationState::zeros(design), 1),
                        std::invalid_argument);
    }
    SECTION("identical inputs give bit-identical output") {
        auto act = ActivationState::zeros(design);
        act.gamma[0][0] = -1.2;
        act.gamma[2][0] = -0.4;
        const auto a = integrate(design, act, 100);
        const auto b = integrate(design, act, 100);
        REQUIRE(a.centerline.size() == b.centerline.size());
        for (std::size_t i = 0; i < a.centerline.size(); ++i) {
            CHECK(a.centerline[i] == b.centerline[i]);
            CHECK(a.frames[i].coeffs() == b.frames[i].coeffs());
        }
    }
}

TEST_CASE("constant-curvature oracle") {
    // untapered, all-longitudinal design: fields are Z-independent
    auto design = minimal_design(0.0, 0.0);
    auto act = ActivationState::zeros(design);
    act.gamma[2][0] = -1.0;
    const auto f = local_fields(design, act, 0.5);
    REQUIRE(std::abs(f.u[0]) > 1.0);  // strong bending for a meaningful test
    CHECK(std::abs(f.u[2]) < 1e-12);

    const auto f0 = local_fields(design, act, 0.0);
    CHECK_THAT(f0.zeta, Catch::Matchers::WithinRel(f.zeta, 1e-13));
    CHECK_THAT(f0.u[0], Catch::Matchers::WithinRel(f.u[0], 1e-13));

    SECTION("endpoint matches the closed form at 200 steps") {
        const auto cfg = integrate(design, act, 200);
        const Vec3 ref = constant_curvature_endpoint(f.zeta, f.u, 1.0);
        CHECK((end_effector(cfg) - ref).norm() < 1e-6);
    }
    SECTION("convergence order is at least 3.5") {
        const Vec3 ref = constant_curvature_endpoint(f.zeta, f.u, 1.0);
        double err25 = (end_effector(integrate(design, act, 25)) - ref).norm();
        double err100 = (end_effector(integrate(design, act, 100)) - ref).norm();
        const double order = std::log2(err25 / err100) / 2.0;
        INFO("err(25)=" << err25 << " err(100)=" << err100 << " order=" << order);
        CHECK(order >= 3.5);
    }
}

TEST_CASE("convergence report") {
    const auto design = minimal_design(deg2rad(108.0), deg2rad(3.0));
    SECTION("zero activation is exact at any resolution") {
        const auto rows = convergence_report(design, ActivationState::zeros(design), {10, 20, 40});
        for (const auto& r : rows) CHECK(r.error < 1e-12);
    }
    SECTION("atlas corner errors decrease monotonically") {
        auto act = ActivationState::zeros(design);
        act.gamma[0][0] = -5.0 / 3.0;
        act.gamma[1][0] = -0.2;
        act.gamma[2][0] = -1.0;
        const auto rows = convergence_report(design, act, {100, 200, 400, 800});
        for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].error < rows[i - 1].error);
        // doubling from the default changes the tip by far less than 1e-6 L
        CHECK(rows[1].error < 1e-6);
    }
    SECTION("non-ascending list raises") {
        CHECK_THROWS_AS(convergence_report(design, ActivationState::zeros(design), {100, 50}),
                        std::invalid_argument);
    }
    SECTION("doubling the default resolution moves the tip less than 1e-6 L at every corner") {
        for (double omega : {0.0, deg2rad(108.0)}) {
            for (double phi : {0.0, deg2rad(3.0)}) {
                const auto corner = minimal_design(omega, phi);
                auto act = ActivationState::zeros(corner);
                for (auto& v : act.gamma) {
                    for (auto& g : v) g = -5.0 / 3.0;
                }
                const Vec3 a = end_effector(integrate(corner, act, 200));
                const Vec3 b = end_effector(integrate(corner, act, 400));
                CHECK((a - b).norm() < 1e-6);
            }
        }
    }
}

TEST_CASE("symmetry of the minimal design") {
    const auto design = minimal_design(deg2rad(108.0), deg2rad(2.0));
    SECTION("equal helical activation stays in the symmetry plane") {
        auto act = ActivationState::zeros(design);
        act.gamma[0][0] = -1.0;
        act.gamma[1][0] = -1.0;
        act.gamma[2][0] = -0.3;
        const Vec3 tip = end_effector(integrate(design, act, 200));
        CHECK(std::abs(tip.x()) < 1e-6);
    }
    SECTION("swapping the helical activations reflects the tip across x = 0") {
        auto act = ActivationState::zeros(design);
        act.gamma[0][0] = -1.4;
        act.gamma[1][0] = -0.2;
        act.gamma[2][0] = -0.7;
        const Vec3 tip = end_effector(integrate(design, act, 200));
        std::swap(act.gamma[0][0], act.gamma[1][0]);
        const Vec3 mirrored = end_effector(integrate(design, act, 200));
        CHECK(std::abs(tip.x() + mirrored.x()) < 1e-6);
        CHECK(std::abs(tip.y() - mirrored.y()) < 1e-6);
        CHECK(std::abs(tip.z() - mirrored.z()) < 1e-6);
    }
}

TEST_CASE("frame quality and arclength consistency") {
    const auto design = minimal_design(deg2rad(108.0), deg2rad(3.0));
    auto act = ActivationState::zeros(design);
    act.gamma[0][0] = -5.0 / 3.0;
    act.gamma[1][0] = -0.8;
    act.gamma[2][0] = -1.5;
    const auto cfg = integrate(design, act, 200);

    SECTION("quaternions stay unit and frames orthonormal") {
        for (const auto& q : cfg.frames) {
            CHECK(std::abs(q.norm() - 1.0) < 1e-12);
            const Eigen::Matrix3d R = q.toRotationMatrix();
            CHECK((R.transpose() * R - Eigen::Matrix3d::Identity()).norm() < 1e-9);
        }
    }
    SECTION("centerline arclength equals the integrated extension") {
        std::vector<double> zeta(cfg.fields.size());
        for (std::size_t i = 0; i < zeta.size(); ++i) zeta[i] = cfg.fields[i].zeta;
        const double expected = simpson(cfg.z_grid, zeta);
        CHECK(std::abs(cfg.arclength() - expected) < 1e-6);
    }
}

TEST_CASE("bending curvature") {
    SECTION("pure twist has zero bending curvature") {
        LocalFields f;
        f.u = Vec3(0.0, 0.0, 7.3);
        CHECK(bending_curvature(f) == 0.0);
    }
    SECTION("pythagorean magnitude") {
        LocalFields f;
        f.u = Vec3(3.0, 4.0, 0.0);
        CHECK_THAT(bending_curvature(f), Catch::Matchers::WithinRel(5.0, 1e-15));
    }
    SECTION("tapering raises the distal curvature") {
        auto tapered = minimal_design(deg2rad(108.0), deg2rad(3.0));
        auto straight = minimal_design(deg2rad(108.0), 0.0);
        auto act = ActivationState::zeros(tapered);
        act.gamma[2][0] = -5.0 / 3.0;
        const double kt = bending_curvature(local_fields(tapered, act, 0.9));
        const double ks = bending_curvature(local_fields(straight, act, 0.9));
        CHECK(kt > ks);
    }
}
