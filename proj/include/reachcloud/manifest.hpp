#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "reachcloud/cloud.hpp"
#include "reachcloud/version.hpp"

namespace reachcloud {

/// Reproducibility record written next to every output: tool version, design
/// and sampler digests, seeds, wall clock, and digests of every output file.
struct RunManifest {
    std::string command;
    std::string design_digest;
    SamplerConfig sampler{};
    bool has_sampler = false;
    double wall_clock_sec = 0.0;
    std::vector<std::pair<std::string, std::string>> outputs;  // path, digest
    std::vector<std::pair<std::string, std::string>> extras;   // free-form notes

    void add_output(const std::string& path) { outputs.emplace_back(path, digest_file(path)); }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["tool"] = std::string("reachcloud ") + kVersion;
        j["command"] = command;
        if (!design_digest.empty()) j["design_digest"] = design_digest;
        if (has_sampler) {
            j["sampler"] = {{"n_samples", sampler.n_samples}, {"gamma_min", sampler.gamma_min},
                            {"gamma_max", sampler.gamma_max}, {"seed", sampler.seed},
                            {"steps", sampler.steps}, {"digest", sampler_digest(sampler)}};
        }
        j["wall_clock_sec"] = wall_clock_sec;
        auto arr = nlohmann::json::array();
        for (const auto& [path, digest] : outputs) arr.push_back({{"path", path}, {"digest", digest}});
        j["outputs"] = arr;
        for (const auto& [k, v] : extras) j[k] = v;
        return j;
    }

    void write(const std::string& path) const {
        std::ofstream out(path, std::ios::trunc);
        if (!out) throw std::runtime_error("manifest: cannot open " + path);
        out << to_json().dump(2) << "\n";
        if (!out) throw std::runtime_error("manifest: write failed for " + path);
    }
};

/// Re-reads a manifest and verifies each recorded output digest.
inline bool verify_manifest(const std::string& path, std::string* first_mismatch = nullptr) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("manifest: cannot open " + path);
    nlohmann::json j;
    in >> j;
    for (const auto& rec : j.at("outputs")) {
        const std::string p = rec.at("path").get<std::string>();
        if (digest_file(p) != rec.at("digest").get<std::string>()) {
            if (first_mismatch) *first_mismatch = p;
            return false;
        }
    }
    return true;
}

}  // namespace reachcloud
