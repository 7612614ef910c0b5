// Copyright (c) 2026 The densetrack authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "densetrack/image.hpp"

namespace densetrack {

// Reads an 8-bit PNG or JPEG into an RGB frame with values in [0,1].
Frame read_image(const std::filesystem::path& path);

// Writes an RGB frame (values clamped to [0,1]) as 8-bit PNG.
void write_image_png(const std::filesystem::path& path, const Frame& frame);

// Writes raw 8-bit RGB rows (h*w*3) as PNG; used by the plot renderer.
void write_rgb8_png(const std::filesystem::path& path, int h, int w,
                    const std::vector<std::uint8_t>& rgb);

// Reads an annotation mask. Palette PNGs yield the raw palette indices;
// 8-bit grayscale PNGs yield the gray values as labels.
LabelMask read_label_mask(const std::filesystem::path& path);

// Writes labels as a palette PNG using the standard VOC/DAVIS colormap,
// so indices round-trip exactly through read_label_mask.
void write_label_mask(const std::filesystem::path& path, const LabelMask& mask);

// VOC colormap entry for a label (used for palettes and overlays).
std::array<std::uint8_t, 3> voc_color(int label);

}  // namespace densetrack
