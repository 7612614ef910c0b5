// Copyright (c) 2026 The densetrack authors
// SPDX-License-Identifier: Apache-2.0

#include "densetrack/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "densetrack/errors.hpp"
#include "densetrack/image_io.hpp"

namespace densetrack {

namespace fs = std::filesystem;

DatasetLayout layout_from_string(const std::string& s) {
    if (s == "davis") return DatasetLayout::davis;
    if (s == "ytvos") return DatasetLayout::ytvos;
    if (s == "flat") return DatasetLayout::flat;
    throw ConfigError("unknown dataset layout: " + s);
}

std::string to_string(DatasetLayout layout) {
    switch (layout) {
        case DatasetLayout::davis: return "davis";
        case DatasetLayout::ytvos: return "ytvos";
        case DatasetLayout::flat: return "flat";
    }
    return "?";
}

namespace {

bool is_image_file(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

// Frame number from trailing digits of the stem; -1 when there are none.
long frame_number(const fs::path& p) {
    const std::string stem = p.stem().string();
    std::size_t end = stem.size();
    std::size_t begin = end;
    while (begin > 0 && std::isdigit(static_cast<unsigned char>(stem[begin - 1]))) --begin;
    if (begin == end) return -1;
    return std::stol(stem.substr(begin, end - begin));
}

// Replace the last "JPEGImages" component with "Annotations".
fs::path derive_annotation_dir(const fs::path& frame_dir) {
    std::vector<fs::path> parts(frame_dir.begin(), frame_dir.end());
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
        if (*it == "JPEGImages") {
            *it = "Annotations";
            fs::path out;
            for (const auto& part : parts) out /= part;
            return out;
        }
    }
    // Fall back to a sibling "Annotations/<seq>" directory.
    return frame_dir.parent_path() / "Annotations" / frame_dir.filename();
}

}  // namespace

std::vector<fs::path> list_frame_files(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw LoadError("missing frame directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && is_image_file(entry.path())) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw LoadError("no image files in " + dir.string());
    return files;
}

Sequence load_sequence(const fs::path& root, DatasetLayout layout, const fs::path& mask_dir_in) {
    const std::vector<fs::path> frame_files = list_frame_files(root);

    // Lexicographic order must agree with numeric frame order.
    long prev = -1;
    bool any_number = false;
    for (const auto& f : frame_files) {
        const long num = frame_number(f);
        if (num < 0) continue;
        any_number = true;
        if (num <= prev)
            throw OrderingError("non-monotonic frame numbering at " + f.filename().string());
        prev = num;
    }
    (void)any_number;

    fs::path mask_dir = mask_dir_in;
    if (layout != DatasetLayout::flat && mask_dir.empty()) mask_dir = derive_annotation_dir(root);

    std::map<std::string, fs::path> mask_by_stem;
    if (!mask_dir.empty() && fs::is_directory(mask_dir)) {
        for (const auto& entry : fs::directory_iterator(mask_dir))
            if (entry.is_regular_file() && entry.path().extension() == ".png")
                mask_by_stem[entry.path().stem().string()] = entry.path();
    }
    if (layout != DatasetLayout::flat && mask_by_stem.empty())
        throw AnnotationError("no annotation masks found under " + mask_dir.string());

    Sequence seq;
    seq.name = root.filename().string();
    seq.frames.reserve(frame_files.size());
    seq.masks.resize(frame_files.size());

    std::vector<LabelMask> raw_masks(frame_files.size());
    std::vector<bool> has_mask(frame_files.size(), false);

    for (std::size_t i = 0; i < frame_files.size(); ++i) {
        Frame frame = read_image(frame_files[i]);
        frame.index = static_cast<int>(i);
        seq.frames.push_back(std::move(frame));
        const auto it = mask_by_stem.find(frame_files[i].stem().string());
        if (it != mask_by_stem.end()) {
            raw_masks[i] = read_label_mask(it->second);
            has_mask[i] = true;
        }
    }

    const bool need_first_mask = layout != DatasetLayout::flat || !mask_by_stem.empty();
    if (need_first_mask && !has_mask[0])
        throw AnnotationError("first-frame annotation missing for sequence " + seq.name);

    if (has_mask[0]) {
        const int m = raw_masks[0].max_label();
        if (m == 0)
            throw AnnotationError("frame-0 mask of sequence " + seq.name +
                                  " contains no objects; nothing to track");
        seq.num_objects = m;
        for (std::size_t i = 0; i < frame_files.size(); ++i) {
            if (!has_mask[i]) continue;
            if (raw_masks[i].max_label() > m)
                throw AnnotationError("mask label exceeds frame-0 object count in " + seq.name);
            seq.masks[i] = one_hot(raw_masks[i], m);
        }
    }
    return seq;
}

}  // namespace densetrack
