// Copyright (c) 2026 The densetrack authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "densetrack/rng.hpp"
#include "densetrack/tensor.hpp"

namespace densetrack {

enum class ColorSpace { RGB, Lab };

// One video image. pixels is {3,H,W} float32. RGB values in [0,1];
// Lab values L in [0,100], a/b in [-128,127].
struct Frame {
    Tensorf pixels;
    ColorSpace color_space = ColorSpace::RGB;
    int index = 0;

    Frame() = default;
    Frame(int h, int w, ColorSpace cs = ColorSpace::RGB, int idx = 0)
        : pixels({3, h, w}), color_space(cs), index(idx) {}

    int height() const { return pixels.dim(1); }
    int width() const { return pixels.dim(2); }
};

enum class ResolutionTag { full, feature };

// Per-pixel class probabilities over {background, object_1..object_M}.
// probs is {M+1,H,W}; channel 0 is background; channels sum to 1 per pixel.
struct MaskProbMap {
    Tensorf probs;
    ResolutionTag resolution_tag = ResolutionTag::full;

    MaskProbMap() = default;
    MaskProbMap(int channels, int h, int w, ResolutionTag tag = ResolutionTag::full)
        : probs({channels, h, w}), resolution_tag(tag) {}

    int channels() const { return probs.dim(0); }
    int height() const { return probs.dim(1); }
    int width() const { return probs.dim(2); }
    int num_objects() const { return channels() - 1; }
};

// Hard per-pixel labels, 0 = background, 1..M = object ids.
struct LabelMask {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> labels;

    LabelMask() = default;
    LabelMask(int h, int w) : height(h), width(w), labels(static_cast<std::size_t>(h) * w, 0) {}

    std::uint8_t& at(int y, int x) { return labels[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t at(int y, int x) const { return labels[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t max_label() const;
};

struct Sequence {
    std::string name;
    std::vector<Frame> frames;
    std::vector<std::optional<MaskProbMap>> masks;  // parallel to frames; may be empty
    int num_objects = 0;

    int length() const { return static_cast<int>(frames.size()); }
};

// ---- Color space conversion (sRGB <-> CIE Lab, D65 white) ----

Frame rgb_to_lab(const Frame& frame);
Frame lab_to_rgb(const Frame& frame);

// ---- Geometry helpers ----

// Bilinear resize of a {C,H,W} tensor to (out_h, out_w). Pixel-center
// mapping: src = (dst + 0.5) * scale - 0.5, clamped to valid range. Exact
// identity when sizes match.
Tensorf bilinear_resize(const Tensorf& src, int out_h, int out_w);

// Nearest-neighbor resize of a label mask (keeps labels crisp).
LabelMask nearest_resize(const LabelMask& src, int out_h, int out_w);

// Average pooling by integer factor; H and W must be divisible by factor.
Tensorf avg_pool(const Tensorf& src, int factor);

// Edge-replicate pad on the right/bottom so H and W become multiples of m.
Tensorf pad_to_multiple(const Tensorf& src, int m);

// Parameters of a square crop window inside a frame.
struct CropWindow {
    int y0 = 0, x0 = 0, side = 0;
};

// Sample a crop window: side uniform in [scale_lo, scale_hi] x short side,
// offset uniform over valid positions.
CropWindow sample_crop_window(int height, int width, Rng& rng, double scale_lo = 0.7,
                              double scale_hi = 1.0);

// Crop `win` from the frame and bilinear-resize to target x target.
Frame apply_crop_resize(const Frame& frame, const CropWindow& win, int target);

// Random crop (scale in [0.7,1.0] of the short side) + resize to
// target x target. target must be divisible by 4; frame dims must be
// >= target/2. Deterministic under the rng seed.
Frame random_crop_resize(const Frame& frame, int target, Rng& rng);

// ---- Mask helpers ----

// One-hot probability map from hard labels; channels = num_objects + 1.
MaskProbMap one_hot(const LabelMask& mask, int num_objects);

// Argmax per pixel -> hard labels.
LabelMask argmax_labels(const MaskProbMap& probs);

// Clamp negatives to zero and rescale so each pixel's channels sum to 1.
// Pixels with no mass become background.
void renormalize(MaskProbMap& probs);

// Per-channel bilinear resize of a probability map + renormalize.
MaskProbMap resize_probs(const MaskProbMap& probs, int out_h, int out_w, ResolutionTag tag);

// Average-pool a probability map by `factor` (stays normalized).
MaskProbMap downsample_probs(const MaskProbMap& probs, int factor);

// Extract the binary mask of one object id (1..M).
std::vector<std::uint8_t> binary_mask(const LabelMask& mask, int object_id);

// True if every pixel's channel sum is within tol of 1 and values >= 0.
bool probs_normalized(const MaskProbMap& probs, float tol = 1e-5f);

}  // namespace densetrack
