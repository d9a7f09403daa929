#pragma once

// Binary little-endian PLY I/O for reachability clouds and triangle meshes,
// plus CSV interoperability exports. Cloud files carry the generating design
// digest, sampler settings, and a payload digest for integrity checking.

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "reachcloud/cloud.hpp"
#include "reachcloud/mesh.hpp"
#include "reachcloud/version.hpp"

namespace reachcloud {

/// Malformed or truncated file; carries the byte offset of the failure.
class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " (at byte " + std::to_string(offset) + ")"),
          offset_(offset) {}
    std::size_t offset() const { return offset_; }

  private:
    std::size_t offset_;
};

namespace detail {

inline void put_le(std::string& out, const void* p, std::size_t n) {
    // serialize scalar as little-endian
    const auto* bytes = static_cast<const unsigned char*>(p);
#if defined(__BYTE_ORDER__) && __BYTE_ORDER__ == __ORDER_BIG_ENDIAN__
    for (std::size_t i = n; i-- > 0;) out.push_back(static_cast<char>(bytes[i]));
#else
    out.append(reinterpret_cast<const char*>(bytes), n);
#endif
}

template <typename T>
inline void put_le_value(std::string& out, T v) {
    put_le(out, &v, sizeof v);
}

template <typename T>
inline T get_le(const std::string& buf, std::size_t& off, std::size_t base_offset) {
    if (off + sizeof(T) > buf.size()) {
        throw ParseError("unexpected end of file in binary payload", base_offset + off);
    }
    T v;
#if defined(__BYTE_ORDER__) && __BYTE_ORDER__ == __ORDER_BIG_ENDIAN__
    unsigned char tmp[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) tmp[sizeof(T) - 1 - i] = buf[off + i];
    std::memcpy(&v, tmp, sizeof(T));
#else
    std::memcpy(&v, buf.data() + off, sizeof(T));
#endif
    off += sizeof(T);
    return v;
}

inline std::string fmt_g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

/// Writes a cloud as binary little-endian PLY with per-point position
/// (double), color (uchar), and activations (float).
inline void write_cloud(const ReachCloud& cloud, const std::string& path) {
    std::string payload;
    payload.reserve(static_cast<std::size_t>(cloud.size()) *
                    (24 + 3 + 4 * static_cast<std::size_t>(cloud.bundle_count)));
    for (std::int64_t i = 0; i < cloud.size(); ++i) {
        const Vec3& p = cloud.positions[static_cast<std::size_t>(i)];
        detail::put_le_value(payload, p.x());
        detail::put_le_value(payload, p.y());
        detail::put_le_value(payload, p.z());
        const auto& c = cloud.colors[static_cast<std::size_t>(i)];
        payload.push_back(static_cast<char>(c[0]));
        payload.push_back(static_cast<char>(c[1]));
        payload.push_back(static_cast<char>(c[2]));
        for (int j = 0; j < cloud.bundle_count; ++j) {
            detail::put_le_value(payload, cloud.activations[i * cloud.bundle_count + j]);
        }
    }
    std::ostringstream hdr;
    hdr << "ply\nformat binary_little_endian 1.0\n";
    hdr << "comment tool reachcloud " << kVersion << "\n";
    hdr << "comment design_digest " << cloud.design_digest << "\n";
    hdr << "comment seed " << cloud.sampler.seed << "\n";
    hdr << "comment gamma_min " << detail::fmt_g17(cloud.sampler.gamma_min) << "\n";
    hdr << "comment gamma_max " << detail::fmt_g17(cloud.sampler.gamma_max) << "\n";
    hdr << "comment steps " << cloud.sampler.steps << "\n";
    hdr << "comment payload_digest " << digest_string(payload) << "\n";
    hdr << "element vertex " << cloud.size() << "\n";
    hdr << "property double x\nproperty double y\nproperty double z\n";
    hdr << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
    for (int j = 0; j < cloud.bundle_count; ++j) {
        hdr << "property float gamma_" << j << "\n";
    }
    hdr << "end_header\n";

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("write_cloud: cannot open " + path);
    out << hdr.str();
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!out) throw std::runtime_error("write_cloud: write failed for " + path);
}

/// Reads a cloud written by write_cloud. Truncation and schema problems
/// raise ParseError; a payload digest mismatch only sets integrity_warning.
inline ReachCloud read_cloud(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_cloud: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string data = ss.str();

    ReachCloud cloud;
    std::size_t pos = 0;
    std::int64_t n_vertex = -1;
    int n_gamma = 0;
    bool saw_xyz = false, saw_rgb = false;
    std::string recorded_digest;
    auto next_line = [&](std::string& line) {
        if (pos >= data.size()) throw ParseError("unexpected end of header", pos);
        const std::size_t nl = data.find('\n', pos);
        if (nl == std::string::npos) throw ParseError("unterminated header line", pos);
        line = data.substr(pos, nl - pos);
        pos = nl + 1;
    };
    std::string line;
    next_line(line);
    if (line != "ply") throw ParseError("not a PLY file (missing magic)", 0);
    next_line(line);
    if (line != "format binary_little_endian 1.0") {
        throw ParseError("unsupported PLY format: " + line, pos);
    }
    while (true) {
        const std::size_t line_at = pos;
        next_line(line);
        if (line == "end_header") break;
        std::istringstream ls(line);
        std::string tok;
        ls >> tok;
        if (tok == "comment") {
            std::string key, value;
            ls >> key >> value;
            if (key == "design_digest") cloud.design_digest = value;
            else if (key == "seed") cloud.sampler.seed = std::stoull(value);
            else if (key == "gamma_min") cloud.sampler.gamma_min = std::stod(value);
            else if (key == "gamma_max") cloud.sampler.gamma_max = std::stod(value);
            else if (key == "steps") cloud.sampler.steps = std::stoi(value);
            else if (key == "payload_digest") recorded_digest = value;
        } else if (tok == "element") {
            std::string name;
            std::int64_t count;
            ls >> name >> count;
            if (name != "vertex") throw ParseError("unexpected element: " + name, line_at);
            n_vertex = count;
        } else if (tok == "property") {
            std::string type, name;
            ls >> type >> name;
            if (name == "x" || name == "y" || name == "z") {
                if (type != "double") throw ParseError("position must be double", line_at);
                saw_xyz = name == "z";
            } else if (name == "red" || name == "green" || name == "blue") {
                if (type != "uchar") throw ParseError("color must be uchar", line_at);
                saw_rgb = name == "blue";
            } else if (name.rfind("gamma_", 0) == 0) {
                if (type != "float") throw ParseError("activation must be float", line_at);
                ++n_gamma;
            } else {
                throw ParseError("unexpected property: " + name, line_at);
            }
        } else {
            throw ParseError("unexpected header token: " + tok, line_at);
        }
    }
    if (n_vertex < 0 || !saw_xyz || !saw_rgb) {
        throw ParseError("incomplete vertex schema", pos);
    }
    cloud.bundle_count = n_gamma;
    cloud.sampler.n_samples = n_vertex;

    const std::string payload = data.substr(pos);
    const std::size_t stride = 24 + 3 + 4 * static_cast<std::size_t>(n_gamma);
    if (payload.size() != stride * static_cast<std::size_t>(n_vertex)) {
        throw ParseError("payload size mismatch: expected " +
                             std::to_string(stride * static_cast<std::size_t>(n_vertex)) +
                             " bytes, have " + std::to_string(payload.size()),
                         pos + std::min(payload.size(), stride * static_cast<std::size_t>(n_vertex)));
    }
    if (!recorded_digest.empty() && digest_string(payload) != recorded_digest) {
        cloud.integrity_warning = "payload digest mismatch: file corrupted or edited";
    }

    cloud.positions.resize(static_cast<std::size_t>(n_vertex));
    cloud.colors.resize(static_cast<std::size_t>(n_vertex));
    cloud.activations.resize(static_cast<std::size_t>(n_vertex) * n_gamma);
    std::size_t off = 0;
    for (std::int64_t i = 0; i < n_vertex; ++i) {
        const double x = detail::get_le<double>(payload, off, pos);
        const double y = detail::get_le<double>(payload, off, pos);
        const double z = detail::get_le<double>(payload, off, pos);
        cloud.positions[static_cast<std::size_t>(i)] = Vec3(x, y, z);
        auto& c = cloud.colors[static_cast<std::size_t>(i)];
        c[0] = static_cast<unsigned char>(payload[off++]);
        c[1] = static_cast<unsigned char>(payload[off++]);
        c[2] = static_cast<unsigned char>(payload[off++]);
        for (int j = 0; j < n_gamma; ++j) {
            cloud.activations[i * n_gamma + j] = detail::get_le<float>(payload, off, pos);
        }
    }
    cloud.recompute_bounds();
    return cloud;
}

/// Binary little-endian PLY mesh (positions double, faces as uchar-counted
/// int lists).
inline void write_mesh_ply(const TriangleMesh& mesh, const std::string& path) {
    std::ostringstream hdr;
    hdr << "ply\nformat binary_little_endian 1.0\n";
    hdr << "comment tool reachcloud " << kVersion << "\n";
    hdr << "element vertex " << mesh.vertices.size() << "\n";
    hdr << "property double x\nproperty double y\nproperty double z\n";
    hdr << "element face " << mesh.faces.size() << "\n";
    hdr << "property list uchar int vertex_indices\n";
    hdr << "end_header\n";
    std::string payload;
    for (const auto& v : mesh.vertices) {
        detail::put_le_value(payload, v.x());
        detail::put_le_value(payload, v.y());
        detail::put_le_value(payload, v.z());
    }
    for (const auto& f : mesh.faces) {
        payload.push_back(3);
        for (std::uint32_t idx : f) detail::put_le_value(payload, static_cast<std::int32_t>(idx));
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("write_mesh_ply: cannot open " + path);
    out << hdr.str();
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!out) throw std::runtime_error("write_mesh_ply: write failed for " + path);
}

inline TriangleMesh read_mesh_ply(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_mesh_ply: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string data = ss.str();
    std::size_t pos = 0;
    auto next_line = [&](std::string& line) {
        const std::size_t nl = data.find('\n', pos);
        if (nl == std::string::npos) throw ParseError("unterminated header line", pos);
        line = data.substr(pos, nl - pos);
        pos = nl + 1;
    };
    std::string line;
    next_line(line);
    if (line != "ply") throw ParseError("not a PLY file (missing magic)", 0);
    next_line(line);
    if (line != "format binary_little_endian 1.0") throw ParseError("unsupported format", pos);
    std::int64_t nv = -1, nf = -1;
    while (true) {
        next_line(line);
        if (line == "end_header") break;
        std::istringstream ls(line);
        std::string tok;
        ls >> tok;
        if (tok == "element") {
            std::string name;
            std::int64_t count;
            ls >> name >> count;
            if (name == "vertex") nv = count;
            else if (name == "face") nf = count;
            else throw ParseError("unexpected element: " + name, pos);
        }
    }
    if (nv < 0 || nf < 0) throw ParseError("missing vertex/face elements", pos);
    TriangleMesh mesh;
    const std::string payload = data.substr(pos);
    std::size_t off = 0;
    mesh.vertices.resize(static_cast<std::size_t>(nv));
    for (auto& v : mesh.vertices) {
        const double x = detail::get_le<double>(payload, off, pos);
        const double y = detail::get_le<double>(payload, off, pos);
        const double z = detail::get_le<double>(payload, off, pos);
        v = Vec3(x, y, z);
    }
    mesh.faces.resize(static_cast<std::size_t>(nf));
    for (auto& f : mesh.faces) {
        if (off >= payload.size()) throw ParseError("unexpected end of face data", pos + off);
        const int cnt = static_cast<unsigned char>(payload[off++]);
        if (cnt != 3) throw ParseError("only triangle faces supported", pos + off - 1);
        for (int i = 0; i < 3; ++i) {
            f[static_cast<std::size_t>(i)] =
                static_cast<std::uint32_t>(detail::get_le<std::int32_t>(payload, off, pos));
        }
    }
    return mesh;
}

/// ASCII OFF export.
inline void write_mesh_off(const TriangleMesh& mesh, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("write_mesh_off: cannot open " + path);
    out << "OFF\n" << mesh.vertices.size() << " " << mesh.faces.size() << " 0\n";
    for (const auto& v : mesh.vertices) {
        out << detail::fmt_g17(v.x()) << " " << detail::fmt_g17(v.y()) << " "
            << detail::fmt_g17(v.z()) << "\n";
    }
    for (const auto& f : mesh.faces) out << "3 " << f[0] << " " << f[1] << " " << f[2] << "\n";
    if (!out) throw std::runtime_error("write_mesh_off: write failed for " + path);
}

/// CSV export (x,y,z,gamma_0..gamma_{B-1}) for interoperability.
inline void write_cloud_csv(const ReachCloud& cloud, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("write_cloud_csv: cannot open " + path);
    out << "x,y,z";
    for (int j = 0; j < cloud.bundle_count; ++j) out << ",gamma_" << j;
    out << "\n";
    for (std::int64_t i = 0; i < cloud.size(); ++i) {
        const Vec3& p = cloud.positions[static_cast<std::size_t>(i)];
        out << detail::fmt_g17(p.x()) << "," << detail::fmt_g17(p.y()) << ","
            << detail::fmt_g17(p.z());
        for (int j = 0; j < cloud.bundle_count; ++j) {
            out << "," << detail::fmt_g17(cloud.activations[i * cloud.bundle_count + j]);
        }
        out << "\n";
    }
    if (!out) throw std::runtime_error("write_cloud_csv: write failed for " + path);
}

/// Centerline CSV: Z, position, frame quaternion, local fields, curvature.
inline void write_centerline_csv(const RodConfiguration& cfg, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("write_centerline_csv: cannot open " + path);
    out << "Z,x,y,z,qw,qx,qy,qz,zeta,u1,u2,u3,kappa\n";
    for (std::size_t i = 0; i < cfg.z_grid.size(); ++i) {
        const auto& p = cfg.centerline[i];
        const auto& q = cfg.frames[i];
        const auto& f = cfg.fields[i];
        out << detail::fmt_g17(cfg.z_grid[i]) << "," << detail::fmt_g17(p.x()) << ","
            << detail::fmt_g17(p.y()) << "," << detail::fmt_g17(p.z()) << ","
            << detail::fmt_g17(q.w()) << "," << detail::fmt_g17(q.x()) << ","
            << detail::fmt_g17(q.y()) << "," << detail::fmt_g17(q.z()) << ","
            << detail::fmt_g17(f.zeta) << "," << detail::fmt_g17(f.u[0]) << ","
            << detail::fmt_g17(f.u[1]) << "," << detail::fmt_g17(f.u[2]) << ","
            << detail::fmt_g17(bending_curvature(f)) << "\n";
    }
    if (!out) throw std::runtime_error("write_centerline_csv: write failed for " + path);
}

}  // namespace reachcloud
