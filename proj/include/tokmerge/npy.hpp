// Copyright (C) 2026 The tokmerge authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "tokmerge/tensor.hpp"

namespace tokmerge {

/// Generic NPY 1.0 payload: little-endian float32, C order.
struct NpyArray {
    std::vector<std::int64_t> shape;
    std::vector<float> data;
};

/// Reads an NPY 1.0 file. Accepts only '<f4' C-order payloads and rejects
/// non-finite values. Error classes: BadMagic (magic/version/header),
/// UnsupportedDtype (dtype or fortran_order), IoFailure (unreadable or
/// truncated), NonFinitePayload.
NpyArray read_npy(const std::filesystem::path& path);

/// Writes an NPY 1.0 file: '<f4', fortran_order False, header space-padded so
/// the total header size is a multiple of 64 and ends with a newline.
void write_npy(const std::filesystem::path& path, std::span<const std::int64_t> shape,
               std::span<const float> data);

/// Reads a (T, H, W, C) token tensor; shape of any other rank, or with a
/// non-positive dimension, raises WrongRank.
TokenGrid read_tensor(const std::filesystem::path& path);

/// Writes an (N, C) feature matrix. N = 0 is allowed.
void write_features(const std::filesystem::path& path, std::int64_t n, std::int64_t c,
                    std::span<const float> data);

}  // namespace tokmerge
