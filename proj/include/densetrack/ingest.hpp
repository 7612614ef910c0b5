// Copyright (c) 2026 The densetrack authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>

#include "densetrack/image.hpp"

namespace densetrack {

enum class DatasetLayout { davis, ytvos, flat };

DatasetLayout layout_from_string(const std::string& s);
std::string to_string(DatasetLayout layout);

// Loads one video sequence.
//
//   davis / ytvos: root is the sequence's frame directory, e.g.
//     <dataset>/JPEGImages/<seq>; annotations are found by replacing the
//     "JPEGImages" path component with "Annotations". A frame-0 mask is
//     required (ytvos annotations may be sparse beyond that).
//   flat: root is a plain directory of frames; a mask directory may be
//     supplied explicitly (empty = no masks).
//
// Frames come back RGB in [0,1]; masks as one-hot MaskProbMaps; num_objects
// is the maximum palette index in the frame-0 mask.
Sequence load_sequence(const std::filesystem::path& root, DatasetLayout layout,
                       const std::filesystem::path& mask_dir = {});

// Lists image files (.png/.jpg/.jpeg) in a directory, lexicographically
// sorted. Throws LoadError if the directory is missing or empty.
std::vector<std::filesystem::path> list_frame_files(const std::filesystem::path& dir);

}  // namespace densetrack
