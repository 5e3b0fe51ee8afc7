// Copyright (C) 2026 The tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#include "tokmerge/npy.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "tokmerge/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "npy reader/writer assumes a little-endian host");

namespace tokmerge {

namespace {

constexpr char kMagic[6] = {'\x93', 'N', 'U', 'M', 'P', 'Y'};

// Value of `key` inside the header dict, trimmed of surrounding whitespace.
std::string header_value(const std::string& header, const std::string& key) {
    const std::string quoted = "'" + key + "'";
    const std::size_t key_pos = header.find(quoted);
    if (key_pos == std::string::npos) throw BadMagic("header missing key " + quoted);
    std::size_t pos = header.find(':', key_pos + quoted.size());
    if (pos == std::string::npos) throw BadMagic("malformed header dict");
    ++pos;
    while (pos < header.size() && header[pos] == ' ') ++pos;
    std::size_t end = pos;
    if (pos < header.size() && header[pos] == '\'') {
        end = header.find('\'', pos + 1);
        if (end == std::string::npos) throw BadMagic("unterminated string in header");
        return header.substr(pos + 1, end - pos - 1);
    }
    if (pos < header.size() && header[pos] == '(') {
        end = header.find(')', pos);
        if (end == std::string::npos) throw BadMagic("unterminated tuple in header");
        return header.substr(pos, end - pos + 1);
    }
    while (end < header.size() && header[end] != ',' && header[end] != '}') ++end;
    std::string value = header.substr(pos, end - pos);
    while (!value.empty() && value.back() == ' ') value.pop_back();
    return value;
}

std::vector<std::int64_t> parse_shape(const std::string& tuple) {
    std::vector<std::int64_t> shape;
    std::string digits;
    for (std::size_t i = 1; i + 1 <= tuple.size(); ++i) {
        const char ch = tuple[i];
        if (ch >= '0' && ch <= '9') {
            digits.push_back(ch);
        } else if (ch == ',' || ch == ')' || ch == ' ') {
            if (!digits.empty()) {
                shape.push_back(std::stoll(digits));
                digits.clear();
            }
        } else {
            throw BadMagic("malformed shape tuple");
        }
    }
    return shape;
}

}  // namespace

NpyArray read_npy(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("cannot open " + path.string());

    char preamble[10];
    if (!in.read(preamble, sizeof preamble)) throw BadMagic("file shorter than npy preamble");
    if (std::memcmp(preamble, kMagic, sizeof kMagic) != 0) throw BadMagic("wrong magic bytes");
    if (preamble[6] != 1 || preamble[7] != 0) throw BadMagic("unsupported npy version");
    const std::size_t header_len = static_cast<unsigned char>(preamble[8]) |
                                   (static_cast<std::size_t>(static_cast<unsigned char>(preamble[9])) << 8);

    std::string header(header_len, '\0');
    if (!in.read(header.data(), static_cast<std::streamsize>(header_len))) {
        throw BadMagic("truncated header");
    }

    const std::string descr = header_value(header, "descr");
    if (descr != "<f4") throw UnsupportedDtype("dtype must be '<f4', got '" + descr + "'");
    const std::string fortran = header_value(header, "fortran_order");
    if (fortran == "True") throw UnsupportedDtype("fortran_order payloads are not supported");
    if (fortran != "False") throw BadMagic("malformed fortran_order value");

    NpyArray array;
    array.shape = parse_shape(header_value(header, "shape"));

    std::size_t count = 1;
    for (const std::int64_t dim : array.shape) {
        if (dim < 0) throw BadMagic("negative dimension");
        count *= static_cast<std::size_t>(dim);
    }
    array.data.resize(count);
    if (count > 0 &&
        !in.read(reinterpret_cast<char*>(array.data.data()),
                 static_cast<std::streamsize>(count * sizeof(float)))) {
        throw IoFailure("truncated payload in " + path.string());
    }
    for (const float v : array.data) {
        if (!std::isfinite(v)) throw NonFinitePayload();
    }
    return array;
}

void write_npy(const std::filesystem::path& path, std::span<const std::int64_t> shape,
               std::span<const float> data) {
    std::size_t count = 1;
    for (const std::int64_t dim : shape) {
        if (dim < 0) throw InvariantError("write_npy: negative dimension");
        count *= static_cast<std::size_t>(dim);
    }
    if (count != data.size()) throw InvariantError("write_npy: shape does not match data length");

    std::string dict = "{'descr': '<f4', 'fortran_order': False, 'shape': (";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        dict += std::to_string(shape[i]);
        if (shape.size() == 1 || i + 1 < shape.size()) dict += ",";
        if (i + 1 < shape.size()) dict += " ";
    }
    dict += "), }";

    const std::size_t unpadded = 10 + dict.size() + 1;  // preamble + dict + '\n'
    const std::size_t padded = (unpadded + 63) / 64 * 64;
    dict.append(padded - unpadded, ' ');
    dict.push_back('\n');
    if (dict.size() > 0xffff) throw IoFailure("npy header too large for version 1.0");

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("cannot open " + path.string() + " for writing");
    out.write(kMagic, sizeof kMagic);
    const char version[2] = {1, 0};
    out.write(version, 2);
    const auto header_len = static_cast<std::uint16_t>(dict.size());
    const char len_bytes[2] = {static_cast<char>(header_len & 0xff),
                               static_cast<char>(header_len >> 8)};
    out.write(len_bytes, 2);
    out.write(dict.data(), static_cast<std::streamsize>(dict.size()));
    if (!data.empty()) {
        out.write(reinterpret_cast<const char*>(data.data()),
                  static_cast<std::streamsize>(data.size() * sizeof(float)));
    }
    if (!out) throw IoFailure("write failed for " + path.string());
}

TokenGrid read_tensor(const std::filesystem::path& path) {
    NpyArray array = read_npy(path);
    if (array.shape.size() != 4) {
        throw WrongRank("token tensor must have shape (T, H, W, C), got rank " +
                        std::to_string(array.shape.size()));
    }
    for (const std::int64_t dim : array.shape) {
        if (dim < 1) throw WrongRank("token tensor dimensions must all be >= 1");
    }
    TokenGrid grid;
    grid.t = static_cast<int>(array.shape[0]);
    grid.h = static_cast<int>(array.shape[1]);
    grid.w = static_cast<int>(array.shape[2]);
    grid.c = static_cast<int>(array.shape[3]);
    grid.data = std::move(array.data);
    grid.validate();
    return grid;
}

void write_features(const std::filesystem::path& path, std::int64_t n, std::int64_t c,
                    std::span<const float> data) {
    const std::int64_t shape[2] = {n, c};
    write_npy(path, shape, data);
}

}  // namespace tokmerge
