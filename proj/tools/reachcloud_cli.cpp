// Command-line front end: cloud generation, atlas sweeps, hull metrics,
// redundancy fields, curvature statistics, centerline export, design
// validation. Every file-producing command also writes a run manifest.

#include <chrono>
#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "reachcloud/atlas.hpp"
#include "reachcloud/ply.hpp"
#include "reachcloud/redundancy.hpp"
#include "reachcloud/version.hpp"

using namespace reachcloud;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumeric = 4;

struct DesignOptions {
    std::string preset = "minimal";
    std::string file;
    double omega_deg = 108.0;
    double phi_deg = 0.0;
    double length = 1.0;

    ManipulatorDesign resolve() const {
        if (!file.empty()) return parse_design(file);
        ManipulatorDesign d;
        if (!design_preset(preset, deg2rad(omega_deg), deg2rad(phi_deg), length, &d)) {
            throw ConfigError("unknown preset: " + preset + " (available: minimal, redundant)");
        }
        require_valid(d);
        return d;
    }
};

void add_design_flags(CLI::App* cmd, DesignOptions* opt) {
    cmd->add_option("--preset", opt->preset, "Design preset: minimal or redundant")
        ->capture_default_str();
    cmd->add_option("--design", opt->file, "Design config file (JSON); overrides --preset");
    cmd->add_option("--omega", opt->omega_deg, "Helical fiber revolution in degrees")
        ->capture_default_str();
    cmd->add_option("--phi", opt->phi_deg, "Taper angle in degrees")->capture_default_str();
    cmd->add_option("--length", opt->length, "Physical length L; outputs scale with it")
        ->capture_default_str();
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void write_run_manifest(const std::string& command, const std::string& design_dig,
                        const SamplerConfig* sampler, double wall,
                        const std::vector<std::string>& outputs, const std::string& path) {
    RunManifest m;
    m.command = command;
    m.design_digest = design_dig;
    if (sampler) {
        m.sampler = *sampler;
        m.has_sampler = true;
    }
    m.wall_clock_sec = wall;
    for (const auto& p : outputs) m.add_output(p);
    m.write(path);
}

std::vector<double> parse_number_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(std::stod(tok));
    }
    return out;
}

int run(int argc, char** argv) {
    CLI::App app{std::string("reachcloud ") + kVersion +
                 " - reachability cloud analysis for fiber-actuated slender manipulators"};
    app.require_subcommand(1);

    int workers = default_workers();
    app.add_option("--workers", workers, "Worker thread count (default REACHCLOUD_WORKERS)")
        ->capture_default_str();

    // ---- gen ----
    auto* gen = app.add_subcommand("gen", "Generate a reachability cloud");
    DesignOptions gen_design;
    add_design_flags(gen, &gen_design);
    SamplerConfig gen_sampler;
    std::string gen_out = "cloud.ply";
    std::string gen_format = "ply";
    gen->add_option("--samples", gen_sampler.n_samples, "Number of activation samples")
        ->capture_default_str();
    gen->add_option("--seed", gen_sampler.seed, "RNG seed")->capture_default_str();
    gen->add_option("--steps", gen_sampler.steps, "Integration steps")->capture_default_str();
    gen->add_option("--gamma-min", gen_sampler.gamma_min, "Lower activation bound")
        ->capture_default_str();
    gen->add_option("--gamma-max", gen_sampler.gamma_max, "Upper activation bound")
        ->capture_default_str();
    gen->add_option("--out", gen_out, "Output file")->capture_default_str();
    gen->add_option("--format", gen_format, "Output format: ply or csv")->capture_default_str();
    gen->callback([&] {
        Timer timer;
        const auto design = gen_design.resolve();
        const auto cloud = generate_cloud(design, gen_sampler, workers);
        if (gen_format == "ply") write_cloud(cloud, gen_out);
        else if (gen_format == "csv") write_cloud_csv(cloud, gen_out);
        else throw ConfigError("--format must be ply or csv");
        write_run_manifest("gen", cloud.design_digest, &gen_sampler, timer.seconds(), {gen_out},
                           gen_out + ".manifest.json");
        std::printf("wrote %s (%lld points, %.1fs)\n", gen_out.c_str(),
                    static_cast<long long>(cloud.size()), timer.seconds());
    });

    // ---- atlas ----
    auto* atlas_cmd = app.add_subcommand("atlas", "Sweep fiber revolution x taper angle");
    SamplerConfig atlas_sampler;
    atlas_sampler.n_samples = 50000;
    int n_omega = 8, n_phi = 8;
    std::string atlas_out = "atlas_out";
    bool atlas_full = false;
    bool retain_clouds = false;
    atlas_cmd->add_option("--omega-count", n_omega, "Grid points over [0, 108] degrees")
        ->capture_default_str();
    atlas_cmd->add_option("--phi-count", n_phi, "Grid points over [0, 3] degrees")
        ->capture_default_str();
    atlas_cmd->add_option("--samples", atlas_sampler.n_samples, "Samples per cell")
        ->capture_default_str();
    atlas_cmd->add_option("--seed", atlas_sampler.seed, "RNG seed")->capture_default_str();
    atlas_cmd->add_option("--steps", atlas_sampler.steps, "Integration steps")
        ->capture_default_str();
    atlas_cmd->add_option("--out", atlas_out, "Output directory")->capture_default_str();
    atlas_cmd->add_flag("--full", atlas_full, "Paper-scale mode: 16x16 cells, 400000 samples");
    atlas_cmd->add_flag("--retain-clouds", retain_clouds, "Keep per-cell cloud and hull files");
    atlas_cmd->callback([&] {
        Timer timer;
        if (atlas_full) {
            n_omega = n_phi = 16;
            atlas_sampler.n_samples = 400000;
        }
        AtlasSpec spec = AtlasSpec::uniform(n_omega, n_phi, atlas_sampler);
        int done = 0;
        const int total = n_omega * n_phi;
        const auto result = run_atlas(spec, workers, atlas_out, retain_clouds,
                                      [&](const AtlasCell& c) {
                                          ++done;
                                          std::printf("[%3d/%3d] omega=%6.2f phi=%4.2f %s\n", done,
                                                      total, rad2deg(c.omega), rad2deg(c.phi),
                                                      c.ok ? "ok" : c.error.c_str());
                                          std::fflush(stdout);
                                      });
        export_atlas(result, atlas_out);
        int failed = 0;
        for (const auto& c : result.cells) failed += c.ok ? 0 : 1;
        const auto best = find_volume_optimum(result);
        std::printf("optimum: phi* = %.3f deg, omega* = %.2f deg, V/L^3 = %.4f\n",
                    rad2deg(best.phi_star), rad2deg(best.omega_star), best.v_norm);
        if (n_omega >= 2 && n_phi >= 2) {
            const auto t = trend_statistics(result);
            std::printf("UNR trend: %.0f%% of fixed-phi rows and %.0f%% of fixed-omega columns "
                        "decrease\n",
                        100.0 * t.fraction_rows_negative, 100.0 * t.fraction_cols_negative);
        }
        if (failed > 0) std::printf("%d cells failed; see metrics.json files\n", failed);
        std::printf("wrote %s (%.1fs)\n", atlas_out.c_str(), timer.seconds());
    });

    // ---- hull ----
    auto* hull_cmd = app.add_subcommand("hull", "Hull metrics for a stored cloud");
    std::string hull_in;
    std::string hull_out;
    std::string hull_mesh_prefix;
    hull_cmd->add_option("--in", hull_in, "Cloud file (PLY)")->required();
    hull_cmd->add_option("--out", hull_out, "Metrics JSON (default: stdout)");
    hull_cmd->add_option("--export-meshes", hull_mesh_prefix,
                         "Write <prefix>_concave.ply/.off and <prefix>_convex.ply/.off");
    hull_cmd->callback([&] {
        Timer timer;
        const auto cloud = read_cloud(hull_in);
        if (!cloud.integrity_warning.empty()) {
            std::fprintf(stderr, "warning: %s\n", cloud.integrity_warning.c_str());
        }
        const auto r = analyze_cloud(cloud.positions);
        nlohmann::json j{{"v_concave", r.v_concave},
                         {"v_convex", r.v_convex},
                         {"unr", r.unr},
                         {"alpha_used", r.alpha_used},
                         {"thinness_flag", r.thin},
                         {"components_discarded", r.components_discarded},
                         {"alpha_multiplier", r.alpha_info.multiplier},
                         {"alpha_calibrated", r.alpha_info.calibrated},
                         {"median_nn", r.alpha_info.median_nn},
                         {"voxel_volume", r.alpha_info.voxel_volume},
                         {"watertight", r.watertight},
                         {"design_digest", cloud.design_digest}};
        std::vector<std::string> outputs;
        if (!hull_mesh_prefix.empty()) {
            write_mesh_ply(r.concave_mesh, hull_mesh_prefix + "_concave.ply");
            write_mesh_off(r.concave_mesh, hull_mesh_prefix + "_concave.off");
            write_mesh_ply(r.convex_mesh, hull_mesh_prefix + "_convex.ply");
            write_mesh_off(r.convex_mesh, hull_mesh_prefix + "_convex.off");
            outputs = {hull_mesh_prefix + "_concave.ply", hull_mesh_prefix + "_concave.off",
                       hull_mesh_prefix + "_convex.ply", hull_mesh_prefix + "_convex.off"};
        }
        if (hull_out.empty()) {
            std::cout << j.dump(2) << "\n";
        } else {
            std::ofstream out(hull_out, std::ios::trunc);
            if (!out) throw std::runtime_error("cannot open " + hull_out);
            out << j.dump(2) << "\n";
            out.close();
            outputs.push_back(hull_out);
            write_run_manifest("hull", cloud.design_digest, nullptr, timer.seconds(), outputs,
                               hull_out + ".manifest.json");
        }
    });

    // ---- redundancy ----
    auto* red_cmd = app.add_subcommand("redundancy", "Mean activation-space distance field");
    std::string red_in;
    std::string red_out = "field";
    double red_radius = 1.0 / 60.0;
    std::int64_t red_subset = 10000;
    std::uint64_t red_seed = 0;
    red_cmd->add_option("--in", red_in, "Cloud file (PLY)")->required();
    red_cmd->add_option("--radius", red_radius, "Neighborhood radius (units of L)")
        ->capture_default_str();
    red_cmd->add_option("--subset", red_subset, "Evaluated subset size")->capture_default_str();
    red_cmd->add_option("--seed", red_seed, "Subset selection seed")->capture_default_str();
    red_cmd->add_option("--out", red_out, "Output prefix (<out>.csv, <out>.ply)")
        ->capture_default_str();
    red_cmd->callback([&] {
        Timer timer;
        const auto cloud = read_cloud(red_in);
        if (!cloud.integrity_warning.empty()) {
            std::fprintf(stderr, "warning: %s\n", cloud.integrity_warning.c_str());
        }
        const auto field =
            distance_field(cloud, std::min<std::int64_t>(red_subset, cloud.size()), red_radius,
                           red_seed, workers);
        write_field_csv(cloud, field, red_out + ".csv");
        write_field_ply(cloud, field, red_out + ".ply");
        write_run_manifest("redundancy", cloud.design_digest, nullptr, timer.seconds(),
                           {red_out + ".csv", red_out + ".ply"}, red_out + ".manifest.json");
        std::printf("d_bar quantiles (5/25/50/75/95%%): %.4g %.4g %.4g %.4g %.4g; %lld isolated\n",
                    field.quantiles[0], field.quantiles[1], field.quantiles[2], field.quantiles[3],
                    field.quantiles[4], static_cast<long long>(field.isolated_count));
    });

    // ---- stats ----
    auto* stats_cmd = app.add_subcommand("stats", "Curvature distributions at stations");
    DesignOptions stats_design;
    add_design_flags(stats_cmd, &stats_design);
    SamplerConfig stats_sampler;
    std::string stats_out = "curvature_stats.json";
    std::string stations_text;
    stats_cmd->add_option("--samples", stats_sampler.n_samples, "Number of activation samples")
        ->capture_default_str();
    stats_cmd->add_option("--seed", stats_sampler.seed, "RNG seed")->capture_default_str();
    stats_cmd->add_option("--stations", stations_text,
                          "Comma-separated Z stations (default: six distal points)");
    stats_cmd->add_option("--out", stats_out, "Output JSON")->capture_default_str();
    stats_cmd->callback([&] {
        Timer timer;
        const auto design = stats_design.resolve();
        std::vector<double> stations = stations_text.empty()
                                           ? default_stations(design.geometry.length)
                                           : parse_number_list(stations_text);
        const auto stats = curvature_statistics(design, stats_sampler, stations, workers);
        nlohmann::json j;
        j["design_digest"] = design_digest(design);
        j["n_samples"] = stats_sampler.n_samples;
        auto arr = nlohmann::json::array();
        for (const auto& st : stats.stations) {
            arr.push_back({{"z", st.z},
                           {"quantiles_kappaL", st.quantiles},
                           {"hist_lo", st.hist.lo},
                           {"hist_hi", st.hist.hi},
                           {"hist_counts", st.hist.counts}});
        }
        j["stations"] = arr;
        std::ofstream out(stats_out, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + stats_out);
        out << j.dump(2) << "\n";
        out.close();
        write_run_manifest("stats", design_digest(design), &stats_sampler, timer.seconds(),
                           {stats_out}, stats_out + ".manifest.json");
        std::printf("wrote %s\n", stats_out.c_str());
    });

    // ---- centerline ----
    auto* line_cmd = app.add_subcommand("centerline", "Export one deformed configuration");
    DesignOptions line_design;
    add_design_flags(line_cmd, &line_design);
    std::string gamma_text;
    int line_steps = 200;
    std::string line_out = "centerline.csv";
    line_cmd->add_option("--gamma", gamma_text, "Comma-separated activation values")->required();
    line_cmd->add_option("--steps", line_steps, "Integration steps")->capture_default_str();
    line_cmd->add_option("--out", line_out, "Output CSV")->capture_default_str();
    line_cmd->callback([&] {
        Timer timer;
        const auto design = line_design.resolve();
        const auto gamma = parse_number_list(gamma_text);
        const auto act = ActivationState::from_flat(design, gamma);
        const auto cfg = integrate(design, act, line_steps);
        write_centerline_csv(cfg, line_out);
        write_run_manifest("centerline", design_digest(design), nullptr, timer.seconds(),
                           {line_out}, line_out + ".manifest.json");
        const Vec3 tip = end_effector(cfg);
        std::printf("tip: (%.6f, %.6f, %.6f); wrote %s\n", tip.x(), tip.y(), tip.z(),
                    line_out.c_str());
    });

    // ---- validate ----
    auto* val_cmd = app.add_subcommand("validate", "Check a design against all invariants");
    DesignOptions val_design;
    add_design_flags(val_cmd, &val_design);
    val_cmd->callback([&] {
        const auto d = val_design.resolve();
        const auto violations = validate_design(d);
        if (violations.empty()) {
            std::printf("design ok (digest %s)\n", design_digest(d).c_str());
        } else {
            for (const auto& v : violations) {
                std::printf("violation: %s: %s\n", v.field.c_str(), v.constraint.c_str());
            }
            throw ValidationError(violations);
        }
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitValidation;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIo;
    } catch (const DegenerateInputError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumeric;
    } catch (const EmptyAlphaShapeError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumeric;
    } catch (const TopologyError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumeric;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumeric;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIo;
    }
}
