// Copyright Contributors to the ldm3d-toolkit Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>

namespace ldm3d::binary {

// Explicit little-endian encoding so files are identical on any host.

inline void put_u32(std::ostream &out, std::uint32_t v) {
    const char bytes[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                           static_cast<char>((v >> 16) & 0xFF),
                           static_cast<char>((v >> 24) & 0xFF)};
    out.write(bytes, 4);
}

inline void put_f32(std::ostream &out, float f) { put_u32(out, std::bit_cast<std::uint32_t>(f)); }

inline bool get_u32(std::istream &in, std::uint32_t &v) {
    unsigned char bytes[4];
    if (!in.read(reinterpret_cast<char *>(bytes), 4)) {
        return false;
    }
    v = static_cast<std::uint32_t>(bytes[0]) | (static_cast<std::uint32_t>(bytes[1]) << 8) |
        (static_cast<std::uint32_t>(bytes[2]) << 16) | (static_cast<std::uint32_t>(bytes[3]) << 24);
    return true;
}

inline bool get_f32(std::istream &in, float &f) {
    std::uint32_t bits = 0;
    if (!get_u32(in, bits)) {
        return false;
    }
    f = std::bit_cast<float>(bits);
    return true;
}

} // namespace ldm3d::binary
