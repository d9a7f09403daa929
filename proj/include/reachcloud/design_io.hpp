#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "reachcloud/core.hpp"
#include "reachcloud/digest.hpp"
#include "reachcloud/fields.hpp"

namespace reachcloud {

/// Config-file or schema problem; carries a best-effort location.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

/// Stable canonical serialization; the basis of the design digest.
inline std::string canonical_string(const ManipulatorDesign& d) {
    using detail::fmt17;
    std::ostringstream os;
    os << "design{L=" << fmt17(d.geometry.length) << ",R2=" << fmt17(d.geometry.outer_radius)
       << ",R1=" << fmt17(d.geometry.inner_radius) << ",phi=" << fmt17(d.geometry.taper_angle)
       << ",nu=" << fmt17(d.poisson_ratio) << ",arch=[";
    for (const auto& a : d.architectures) {
        os << "(" << fmt17(a.helical_angle) << "," << fmt17(a.angular_extent) << ","
           << fmt17(a.angular_offset) << "," << a.bundle_count << ")";
    }
    os << "]}";
    return os.str();
}

inline std::string design_digest(const ManipulatorDesign& d) {
    return digest_string(canonical_string(d));
}

/// Three-bundle design: two opposite-handed helical fibers plus one
/// longitudinal fiber, mirror-symmetric about the x = 0 plane.
inline ManipulatorDesign minimal_design(double omega = deg2rad(108.0), double phi = 0.0,
                                        double length = 1.0) {
    ManipulatorDesign d;
    d.geometry.length = length;
    d.geometry.outer_radius = length / 16.0;
    d.geometry.inner_radius = 3.0 * length / 64.0;
    d.geometry.taper_angle = phi;
    d.poisson_ratio = 0.5;
    const double alpha = helical_angle_from_revolution(d.geometry, omega);
    const double s48 = deg2rad(48.0);
    d.architectures = {
        {-alpha, s48, deg2rad(66.0), 1},
        {+alpha, s48, deg2rad(114.0), 1},
        {0.0, s48, deg2rad(270.0), 1},
    };
    return d;
}

/// Four-bundle variant: the longitudinal fiber split into two independent
/// adjacent halves (24 degrees each at 258 and 282 degrees).
inline ManipulatorDesign redundant_design(double omega = deg2rad(108.0), double phi = 0.0,
                                          double length = 1.0) {
    ManipulatorDesign d = minimal_design(omega, phi, length);
    const double s24 = deg2rad(24.0);
    d.architectures.pop_back();
    d.architectures.push_back({0.0, s24, deg2rad(258.0), 1});
    d.architectures.push_back({0.0, s24, deg2rad(282.0), 1});
    return d;
}

/// Preset lookup by name; returns false for unknown names.
inline bool design_preset(const std::string& name, double omega, double phi, double length,
                          ManipulatorDesign* out) {
    if (name == "minimal") {
        *out = minimal_design(omega, phi, length);
        return true;
    }
    if (name == "redundant") {
        *out = redundant_design(omega, phi, length);
        return true;
    }
    return false;
}

inline nlohmann::json design_to_json(const ManipulatorDesign& d) {
    nlohmann::json j;
    j["geometry"] = {
        {"length", d.geometry.length},
        {"outer_radius", d.geometry.outer_radius},
        {"inner_radius", d.geometry.inner_radius},
        {"taper_angle_deg", rad2deg(d.geometry.taper_angle)},
    };
    j["poisson_ratio"] = d.poisson_ratio;
    auto arr = nlohmann::json::array();
    for (const auto& a : d.architectures) {
        arr.push_back({
            {"helical_angle_deg", rad2deg(a.helical_angle)},
            {"angular_extent_deg", rad2deg(a.angular_extent)},
            {"angular_offset_deg", rad2deg(a.angular_offset)},
            {"bundle_count", a.bundle_count},
        });
    }
    j["architectures"] = arr;
    return j;
}

/// Parses a design from JSON text. Angles are degrees in files, radians
/// internally. Schema problems raise ConfigError naming the field; the
/// returned design is validated.
inline ManipulatorDesign design_from_json_text(const std::string& text,
                                               const std::string& origin = "<string>") {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    auto need = [&](const nlohmann::json& node, const char* key,
                    const std::string& path) -> const nlohmann::json& {
        if (!node.contains(key)) throw ConfigError(origin + ": missing field " + path + key);
        return node.at(key);
    };
    auto num = [&](const nlohmann::json& node, const char* key, const std::string& path) {
        const auto& v = need(node, key, path);
        if (!v.is_number()) throw ConfigError(origin + ": field " + path + key + " must be a number");
        return v.get<double>();
    };
    ManipulatorDesign d;
    const auto& geo = need(j, "geometry", "/");
    d.geometry.length = num(geo, "length", "/geometry/");
    d.geometry.outer_radius = num(geo, "outer_radius", "/geometry/");
    d.geometry.inner_radius = num(geo, "inner_radius", "/geometry/");
    d.geometry.taper_angle = deg2rad(num(geo, "taper_angle_deg", "/geometry/"));
    d.poisson_ratio = num(j, "poisson_ratio", "/");
    const auto& archs = need(j, "architectures", "/");
    if (!archs.is_array()) throw ConfigError(origin + ": /architectures must be an array");
    int idx = 0;
    for (const auto& a : archs) {
        const std::string path = "/architectures[" + std::to_string(idx++) + "]/";
        FiberArchitecture fa;
        fa.helical_angle = deg2rad(num(a, "helical_angle_deg", path));
        fa.angular_extent = deg2rad(num(a, "angular_extent_deg", path));
        fa.angular_offset = deg2rad(num(a, "angular_offset_deg", path));
        const auto& bc = need(a, "bundle_count", path);
        if (!bc.is_number_integer()) {
            throw ConfigError(origin + ": field " + path + "bundle_count must be an integer");
        }
        fa.bundle_count = bc.get<int>();
        d.architectures.push_back(fa);
    }
    require_valid(d);
    return d;
}

inline ManipulatorDesign parse_design(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open design file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return design_from_json_text(ss.str(), path);
}

}  // namespace reachcloud
