#pragma once

// Design-parameter sweep: one reachability cloud plus hull metrics per
// (fiber revolution, taper angle) cell, with contour tables, trend
// statistics, optimum lookup, and resumable exports.

#include <chrono>
#include <filesystem>
#include <functional>

#include "reachcloud/hull_metrics.hpp"
#include "reachcloud/manifest.hpp"
#include "reachcloud/ply.hpp"

namespace reachcloud {

struct AtlasSpec {
    std::vector<double> omega_values;  // radians, strictly increasing
    std::vector<double> phi_values;   // radians, strictly increasing
    ManipulatorDesign base_design = minimal_design();
    SamplerConfig sampler{};

    /// Uniform inclusive grids over [0, 108 deg] x [0, 3 deg].
    static AtlasSpec uniform(int n_omega, int n_phi, SamplerConfig sampler) {
        AtlasSpec spec;
        spec.sampler = sampler;
        for (int i = 0; i < n_omega; ++i) {
            spec.omega_values.push_back(deg2rad(108.0) * i / std::max(1, n_omega - 1));
        }
        for (int j = 0; j < n_phi; ++j) {
            spec.phi_values.push_back(deg2rad(3.0) * j / std::max(1, n_phi - 1));
        }
        return spec;
    }
};

inline void require_valid(const AtlasSpec& spec) {
    if (spec.omega_values.empty() || spec.phi_values.empty()) {
        throw std::invalid_argument("atlas: grids must be nonempty");
    }
    auto strictly_increasing = [](const std::vector<double>& v) {
        for (std::size_t i = 1; i < v.size(); ++i) {
            if (!(v[i] > v[i - 1])) return false;
        }
        return true;
    };
    if (!strictly_increasing(spec.omega_values) || !strictly_increasing(spec.phi_values)) {
        throw std::invalid_argument("atlas: grids must be strictly increasing");
    }
    require_valid(spec.sampler);
}

/// Design for one atlas cell: taper angle applied, the first two (helical)
/// architectures set to opposite-handed angles realizing the revolution.
inline ManipulatorDesign cell_design(const AtlasSpec& spec, double omega, double phi) {
    ManipulatorDesign d = spec.base_design;
    d.geometry.taper_angle = phi;
    if (d.architectures.size() < 2) {
        throw std::invalid_argument("atlas: base design needs two helical architectures");
    }
    const double alpha = helical_angle_from_revolution(d.geometry, omega);
    d.architectures[0].helical_angle = -alpha;
    d.architectures[1].helical_angle = alpha;
    require_valid(d);
    return d;
}

struct AtlasCell {
    double omega = 0.0;
    double phi = 0.0;
    bool ok = false;
    std::string error;
    double v_concave = 0.0;
    double v_convex = 0.0;
    double unr = 0.0;
    double alpha_used = 0.0;
    bool thin = false;
    int components_discarded = 0;
    std::int64_t n_points = 0;
    double runtime_sec = 0.0;
    std::string design_digest;
    std::string sampler_digest;
};

struct AtlasResult {
    AtlasSpec spec;
    std::vector<AtlasCell> cells;  // omega-major: cell(i, j) = cells[i * n_phi + j]

    const AtlasCell& cell(std::size_t i_omega, std::size_t j_phi) const {
        return cells[i_omega * spec.phi_values.size() + j_phi];
    }
};

namespace detail {

inline std::string cell_dir_name(std::size_t i, std::size_t j) {
    return "omega_" + std::to_string(i) + "_phi_" + std::to_string(j);
}

inline nlohmann::json cell_metrics_json(const AtlasCell& c) {
    return {{"omega_deg", rad2deg(c.omega)},
            {"phi_deg", rad2deg(c.phi)},
            {"ok", c.ok},
            {"error", c.error},
            {"v_concave", c.v_concave},
            {"v_convex", c.v_convex},
            {"unr", c.unr},
            {"alpha_used", c.alpha_used},
            {"thinness_flag", c.thin},
            {"components_discarded", c.components_discarded},
            {"n_points", c.n_points},
            {"runtime_sec", c.runtime_sec},
            {"design_digest", c.design_digest},
            {"sampler_digest", c.sampler_digest}};
}

/// Loads a cached cell if its design and sampler digests match.
inline bool load_cached_cell(const std::string& dir, const std::string& design_digest,
                             const std::string& sampler_dig, AtlasCell* out) {
    const std::string path = dir + "/metrics.json";
    std::ifstream in(path);
    if (!in) return false;
    nlohmann::json j;
    try {
        in >> j;
    } catch (...) {
        return false;
    }
    if (j.value("design_digest", "") != design_digest) return false;
    if (j.value("sampler_digest", "") != sampler_dig) return false;
    if (!j.value("ok", false)) return false;
    out->ok = true;
    out->v_concave = j.at("v_concave").get<double>();
    out->v_convex = j.at("v_convex").get<double>();
    out->unr = j.at("unr").get<double>();
    out->alpha_used = j.at("alpha_used").get<double>();
    out->thin = j.at("thinness_flag").get<bool>();
    out->components_discarded = j.at("components_discarded").get<int>();
    out->n_points = j.at("n_points").get<std::int64_t>();
    out->runtime_sec = j.at("runtime_sec").get<double>();
    out->design_digest = design_digest;
    out->sampler_digest = sampler_dig;
    return true;
}

}  // namespace detail

/// Runs every cell of the sweep. Per-cell failures are recorded and the
/// sweep continues. When cache_dir is nonempty, cells whose metrics.json
/// matches the design and sampler digests are loaded instead of recomputed
/// and fresh results are persisted, making interrupted sweeps resumable.
inline AtlasResult run_atlas(const AtlasSpec& spec, int workers = default_workers(),
                             const std::string& cache_dir = "", bool retain_clouds = false,
                             const std::function<void(const AtlasCell&)>& progress = {}) {
    require_valid(spec);
    AtlasResult result;
    result.spec = spec;
    const std::string sampler_dig = sampler_digest(spec.sampler);
    for (std::size_t i = 0; i < spec.omega_values.size(); ++i) {
        for (std::size_t j = 0; j < spec.phi_values.size(); ++j) {
            AtlasCell cell;
            cell.omega = spec.omega_values[i];
            cell.phi = spec.phi_values[j];
            cell.sampler_digest = sampler_dig;
            const auto t0 = std::chrono::steady_clock::now();
            try {
                const auto design = cell_design(spec, cell.omega, cell.phi);
                cell.design_digest = design_digest(design);
                const std::string dir =
                    cache_dir.empty() ? "" : cache_dir + "/cells/" + detail::cell_dir_name(i, j);
                if (!dir.empty() && detail::load_cached_cell(dir, cell.design_digest, sampler_dig, &cell)) {
                    result.cells.push_back(cell);
                    if (progress) progress(cell);
                    continue;
                }
                const ReachCloud cloud = generate_cloud(design, spec.sampler, workers);
                const HullResult hull = analyze_cloud(cloud.positions);
                cell.ok = true;
                cell.v_concave = hull.v_concave;
                cell.v_convex = hull.v_convex;
                cell.unr = hull.unr;
                cell.alpha_used = hull.alpha_used;
                cell.thin = hull.thin;
                cell.components_discarded = hull.components_discarded;
                cell.n_points = cloud.size();
                cell.runtime_sec =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                if (!dir.empty()) {
                    std::filesystem::create_directories(dir);
                    std::ofstream out(dir + "/metrics.json", std::ios::trunc);
                    out << detail::cell_metrics_json(cell).dump(2) << "\n";
                    if (retain_clouds) {
                        write_cloud(cloud, dir + "/cloud.ply");
                        write_mesh_ply(hull.concave_mesh, dir + "/hull.ply");
                    }
                }
            } catch (const std::exception& e) {
                cell.ok = false;
                cell.error = e.what();
                cell.runtime_sec =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            }
            result.cells.push_back(cell);
            if (progress) progress(cell);
        }
    }
    return result;
}

struct VolumeOptimum {
    double phi_star = 0.0;
    double omega_star = 0.0;
    double v_norm = 0.0;
};

/// Cell with the largest normalized concave volume; ties resolved toward
/// smaller phi, then smaller omega.
inline VolumeOptimum find_volume_optimum(const AtlasResult& result) {
    if (result.cells.empty()) throw std::invalid_argument("find_volume_optimum: empty result");
    const double L = result.spec.base_design.geometry.length;
    const double L3 = L * L * L;
    bool found = false;
    VolumeOptimum best;
    // scan phi-major so ties keep the smallest phi, then smallest omega
    for (std::size_t j = 0; j < result.spec.phi_values.size(); ++j) {
        for (std::size_t i = 0; i < result.spec.omega_values.size(); ++i) {
            const auto& c = result.cell(i, j);
            if (!c.ok) continue;
            const double v = c.v_concave / L3;
            if (!found || v > best.v_norm) {
                found = true;
                best = {c.phi, c.omega, v};
            }
        }
    }
    if (!found) throw std::runtime_error("find_volume_optimum: no successful cells");
    return best;
}

struct TrendStatistics {
    std::vector<double> unr_vs_omega;  // one Spearman rho per fixed phi
    std::vector<double> unr_vs_phi;    // one Spearman rho per fixed omega
    int inconclusive_rows = 0;
    int inconclusive_cols = 0;
    double fraction_rows_negative = 0.0;
    double fraction_cols_negative = 0.0;
};

/// Spearman rank correlations of UNR against each swept parameter.
inline TrendStatistics trend_statistics(const AtlasResult& result) {
    const std::size_t n_omega = result.spec.omega_values.size();
    const std::size_t n_phi = result.spec.phi_values.size();
    if (n_omega < 2 || n_phi < 2) throw std::invalid_argument("trend_statistics: grid must be >= 2x2");
    TrendStatistics t;
    int neg = 0, total = 0;
    for (std::size_t j = 0; j < n_phi; ++j) {
        std::vector<double> omega, unr;
        for (std::size_t i = 0; i < n_omega; ++i) {
            if (!result.cell(i, j).ok) continue;
            omega.push_back(result.spec.omega_values[i]);
            unr.push_back(result.cell(i, j).unr);
        }
        if (omega.size() < 2) continue;
        bool inconclusive = false;
        const double rho = spearman(omega, unr, &inconclusive);
        t.unr_vs_omega.push_back(rho);
        if (inconclusive) ++t.inconclusive_rows;
        else {
            ++total;
            if (rho < 0.0) ++neg;
        }
    }
    t.fraction_rows_negative = total > 0 ? static_cast<double>(neg) / total : 0.0;
    neg = 0;
    total = 0;
    for (std::size_t i = 0; i < n_omega; ++i) {
        std::vector<double> phi, unr;
        for (std::size_t j = 0; j < n_phi; ++j) {
            if (!result.cell(i, j).ok) continue;
            phi.push_back(result.spec.phi_values[j]);
            unr.push_back(result.cell(i, j).unr);
        }
        if (phi.size() < 2) continue;
        bool inconclusive = false;
        const double rho = spearman(phi, unr, &inconclusive);
        t.unr_vs_phi.push_back(rho);
        if (inconclusive) ++t.inconclusive_cols;
        else {
            ++total;
            if (rho < 0.0) ++neg;
        }
    }
    t.fraction_cols_negative = total > 0 ? static_cast<double>(neg) / total : 0.0;
    return t;
}

/// Writes atlas.csv, per-cell metrics, and a manifest sufficient to
/// reproduce the sweep. On failure, files created by this call are removed.
inline void export_atlas(const AtlasResult& result, const std::string& dir) {
    namespace fs = std::filesystem;
    std::vector<std::string> created;
    auto cleanup = [&]() {
        for (auto it = created.rbegin(); it != created.rend(); ++it) {
            std::error_code ec;
            fs::remove(*it, ec);
        }
    };
    try {
        fs::create_directories(dir);
        const double L = result.spec.base_design.geometry.length;
        const double L3 = L * L * L;

        const std::string csv_path = dir + "/atlas.csv";
        {
            std::ofstream csv(csv_path, std::ios::trunc);
            if (!csv) throw std::runtime_error("export_atlas: cannot open " + csv_path);
            csv << "omega_deg,phi_deg,v_norm,unr,alpha_used,n_points\n";
            char buf[256];
            for (std::size_t i = 0; i < result.spec.omega_values.size(); ++i) {
                for (std::size_t j = 0; j < result.spec.phi_values.size(); ++j) {
                    const auto& c = result.cell(i, j);
                    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%lld\n",
                                  rad2deg(c.omega), rad2deg(c.phi), c.v_concave / L3, c.unr,
                                  c.alpha_used, static_cast<long long>(c.n_points));
                    csv << buf;
                }
            }
            if (!csv) throw std::runtime_error("export_atlas: write failed for " + csv_path);
        }
        created.push_back(csv_path);

        for (std::size_t i = 0; i < result.spec.omega_values.size(); ++i) {
            for (std::size_t j = 0; j < result.spec.phi_values.size(); ++j) {
                const std::string cdir = dir + "/cells/" + detail::cell_dir_name(i, j);
                fs::create_directories(cdir);
                const std::string mpath = cdir + "/metrics.json";
                std::ofstream out(mpath, std::ios::trunc);
                if (!out) throw std::runtime_error("export_atlas: cannot open " + mpath);
                out << detail::cell_metrics_json(result.cell(i, j)).dump(2) << "\n";
                if (!out) throw std::runtime_error("export_atlas: write failed for " + mpath);
                created.push_back(mpath);
            }
        }

        RunManifest manifest;
        manifest.command = "atlas";
        manifest.sampler = result.spec.sampler;
        manifest.has_sampler = true;
        manifest.design_digest = design_digest(result.spec.base_design);
        auto grid_string = [](const std::vector<double>& v) {
            std::string s;
            for (double x : v) {
                if (!s.empty()) s += ",";
                s += detail::fmt_g17(rad2deg(x));
            }
            return s;
        };
        manifest.extras.emplace_back("omega_grid_deg", grid_string(result.spec.omega_values));
        manifest.extras.emplace_back("phi_grid_deg", grid_string(result.spec.phi_values));
        for (const auto& p : created) manifest.add_output(p);
        const std::string mpath = dir + "/manifest.json";
        manifest.write(mpath);
        created.push_back(mpath);
    } catch (...) {
        cleanup();
        throw;
    }
}

}  // namespace reachcloud
