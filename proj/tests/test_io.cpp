#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "reachcloud/atlas.hpp"
#include "reachcloud/manifest.hpp"
#include "reachcloud/ply.hpp"

using namespace reachcloud;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("reachcloud_test_" + std::to_string(rng::at(0xD1CE, reinterpret_cast<std::uintptr_t>(this))));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ReachCloud small_cloud() {
    const auto design = minimal_design(deg2rad(108.0), deg2rad(2.0));
    SamplerConfig s;
    s.n_samples = 200;
    s.seed = 12345;
    s.steps = 40;
    return generate_cloud(design, s, 2);
}

}  // namespace

TEST_CASE("cloud PLY round trip") {
    TempDir tmp;
    const auto cloud = small_cloud();
    const std::string path = tmp.file("cloud.ply");
    write_cloud(cloud, path);
    const auto back = read_cloud(path);

    REQUIRE(back.size() == cloud.size());
    REQUIRE(back.bundle_count == cloud.bundle_count);
    for (std::int64_t i = 0; i < cloud.size(); ++i) {
        CHECK(back.positions[static_cast<std::size_t>(i)] ==
              cloud.positions[static_cast<std::size_t>(i)]);
    }
    CHECK(back.activations == cloud.activations);
    CHECK(back.colors == cloud.colors);
    CHECK(back.design_digest == cloud.design_digest);
    CHECK(back.sampler.seed == cloud.sampler.seed);
    CHECK(back.sampler.gamma_min == cloud.sampler.gamma_min);
    CHECK(back.sampler.gamma_max == cloud.sampler.gamma_max);
    CHECK(back.sampler.steps == cloud.sampler.steps);
    CHECK(back.integrity_warning.empty());

    SECTION("rewrite is byte-identical") {
        const std::string again = tmp.file("cloud2.ply");
        write_cloud(back, again);
        CHECK(slurp(path) == slurp(again));
    }
}

TEST_CASE("cloud PLY error handling") {
    TempDir tmp;
    const auto cloud = small_cloud();
    const std::string path = tmp.file("cloud.ply");
    write_cloud(cloud, path);
    const std::string data = slurp(path);

    SECTION("truncated payload raises a parse error with an offset") {
        const std::string cut = tmp.file("cut.ply");
        std::ofstream(cut, std::ios::binary) << data.substr(0, data.size() - 11);
        try {
            read_cloud(cut);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.offset() > 0);
        }
    }
    SECTION("garbled header raises") {
        const std::string bad = tmp.file("bad.ply");
        std::ofstream(bad, std::ios::binary) << "p1y\n" << data.substr(4);
        CHECK_THROWS_AS(read_cloud(bad), ParseError);
    }
    SECTION("flipped payload byte sets the integrity warning") {
        std::string corrupted = data;
        corrupted[corrupted.size() - 5] = static_cast<char>(corrupted[corrupted.size() - 5] ^ 0x40);
        const std::string cpath = tmp.file("corrupt.ply");
        std::ofstream(cpath, std::ios::binary) << corrupted;
        const auto back = read_cloud(cpath);
        CHECK_FALSE(back.integrity_warning.empty());
    }
}

TEST_CASE("mesh I/O") {
    TempDir tmp;
    const auto mesh = icosphere(2);
    SECTION("PLY round trip preserves geometry exactly") {
        const std::string path = tmp.file("mesh.ply");
        write_mesh_ply(mesh, path);
        const auto back = read_mesh_ply(path);
        REQUIRE(back.vertices.size() == mesh.vertices.size());
        REQUIRE(back.faces == mesh.faces);
        for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
            CHECK(back.vertices[i] == mesh.vertices[i]);
        }
        CHECK(mesh_volume(back) == mesh_volume(mesh));
    }
    SECTION("OFF export writes a consistent header") {
        const std::string path = tmp.file("mesh.off");
        write_mesh_off(mesh, path);
        std::ifstream in(path);
        std::string magic;
        std::size_t nv = 0, nf = 0, ne = 0;
        in >> magic >> nv >> nf >> ne;
        CHECK(magic == "OFF");
        CHECK(nv == mesh.vertices.size());
        CHECK(nf == mesh.faces.size());
    }
}

TEST_CASE("CSV exports are deterministic") {
    TempDir tmp;
    const auto cloud = small_cloud();
    const std::string a = tmp.file("a.csv");
    const std::string b = tmp.file("b.csv");
    write_cloud_csv(cloud, a);
    write_cloud_csv(cloud, b);
    CHECK(slurp(a) == slurp(b));

    const auto design = minimal_design(deg2rad(108.0), deg2rad(2.0));
    auto act = ActivationState::zeros(design);
    act.gamma[0][0] = -1.0;
    const auto cfg = integrate(design, act, 50);
    const std::string c = tmp.file("line.csv");
    write_centerline_csv(cfg, c);
    std::ifstream in(c);
    std::string header;
    std::getline(in, header);
    CHECK(header == "Z,x,y,z,qw,qx,qy,qz,zeta,u1,u2,u3,kappa");
}

TEST_CASE("manifest digests") {
    TempDir tmp;
    const std::string out = tmp.file("data.bin");
    std::ofstream(out, std::ios::binary) << "payload-bytes";
    RunManifest m;
    m.command = "test";
    m.add_output(out);
    const std::string mpath = tmp.file("manifest.json");
    m.write(mpath);
    CHECK(verify_manifest(mpath));

    std::ofstream(out, std::ios::binary | std::ios::app) << "!";
    std::string mismatch;
    CHECK_FALSE(verify_manifest(mpath, &mismatch));
    CHECK(mismatch == out);
}

TEST_CASE("design config parsing") {
    SECTION("presets have the published shape") {
        const auto m = minimal_design(deg2rad(108.0), 0.0);
        REQUIRE(m.architectures.size() == 3);
        CHECK_THAT(m.architectures[0].helical_angle,
                   Catch::Matchers::WithinRel(-m.architectures[1].helical_angle, 1e-15));
        CHECK(m.architectures[2].helical_angle == 0.0);
        CHECK_THAT(m.architectures[0].angular_extent, Catch::Matchers::WithinRel(deg2rad(48.0), 1e-15));
        CHECK_THAT(m.architectures[0].angular_offset, Catch::Matchers::WithinRel(deg2rad(66.0), 1e-15));
        CHECK_THAT(m.architectures[1].angular_offset, Catch::Matchers::WithinRel(deg2rad(114.0), 1e-15));
        CHECK_THAT(m.architectures[2].angular_offset, Catch::Matchers::WithinRel(deg2rad(270.0), 1e-15));
        CHECK(m.poisson_ratio == 0.5);
        CHECK_THAT(m.geometry.outer_radius, Catch::Matchers::WithinRel(1.0 / 16.0, 1e-15));

        const auto r = redundant_design(deg2rad(108.0), 0.0);
        REQUIRE(r.architectures.size() == 4);
        CHECK(r.total_bundles() == 4);
        CHECK_THAT(r.architectures[2].angular_extent, Catch::Matchers::WithinRel(deg2rad(24.0), 1e-15));
        CHECK_THAT(r.architectures[2].angular_offset, Catch::Matchers::WithinRel(deg2rad(258.0), 1e-15));
        CHECK_THAT(r.architectures[3].angular_offset, Catch::Matchers::WithinRel(deg2rad(282.0), 1e-15));
    }
    SECTION("JSON round trip") {
        const auto d = redundant_design(deg2rad(54.0), deg2rad(1.5));
        const auto back = design_from_json_text(design_to_json(d).dump());
        // degree<->radian conversion costs at most an ulp per angle
        CHECK(back.geometry.length == d.geometry.length);
        CHECK(back.geometry.outer_radius == d.geometry.outer_radius);
        CHECK(back.geometry.inner_radius == d.geometry.inner_radius);
        CHECK_THAT(back.geometry.taper_angle, Catch::Matchers::WithinRel(d.geometry.taper_angle, 1e-14));
        CHECK(back.poisson_ratio == d.poisson_ratio);
        REQUIRE(back.architectures.size() == d.architectures.size());
        for (std::size_t i = 0; i < d.architectures.size(); ++i) {
            CHECK_THAT(back.architectures[i].helical_angle + 1.0,
                       Catch::Matchers::WithinRel(d.architectures[i].helical_angle + 1.0, 1e-14));
            CHECK_THAT(back.architectures[i].angular_offset,
                       Catch::Matchers::WithinRel(d.architectures[i].angular_offset, 1e-14));
            CHECK(back.architectures[i].bundle_count == d.architectures[i].bundle_count);
        }
    }
    SECTION("schema violations name the field") {
        try {
            design_from_json_text(R"({"geometry": {"length": 1.0}})");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("/geometry/outer_radius") != std::string::npos);
        }
        CHECK_THROWS_AS(design_from_json_text("{not json"), ConfigError);
    }
    SECTION("invariant violations surface as validation errors") {
        auto j = design_to_json(minimal_design());
        j["architectures"][0]["bundle_count"] = 9;  // 9 * 48 deg > 360 deg
        CHECK_THROWS_AS(design_from_json_text(j.dump()), ValidationError);
    }
}
