#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <span>
#include <string>

namespace reachcloud {

/// FNV-1a 64-bit streaming hash; used for content digests in manifests and
/// file headers. Not cryptographic, just a stable integrity fingerprint.
class Digest {
  public:
    void update(const void* data, std::size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            state_ ^= p[i];
            state_ *= 0x100000001B3ull;
        }
    }
    void update(const std::string& s) { update(s.data(), s.size()); }
    template <typename T>
    void update_value(const T& v) {
        update(&v, sizeof v);
    }
    std::uint64_t value() const { return state_; }

    std::string hex() const {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(state_));
        return buf;
    }

  private:
    std::uint64_t state_ = 0xCBF29CE484222325ull;
};

inline std::string digest_bytes(std::span<const unsigned char> bytes) {
    Digest d;
    d.update(bytes.data(), bytes.size());
    return d.hex();
}

inline std::string digest_string(const std::string& s) {
    Digest d;
    d.update(s);
    return d.hex();
}

/// Digest of a file's full contents. Throws on I/O failure.
inline std::string digest_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("digest_file: cannot open " + path);
    Digest d;
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        d.update(buf, static_cast<std::size_t>(in.gcount()));
        if (!in) break;
    }
    return d.hex();
}

}  // namespace reachcloud
