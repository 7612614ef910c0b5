// Copyright (c) 2026 The densetrack authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "densetrack/image.hpp"
#include "densetrack/mat3.hpp"

namespace densetrack {

// Per-frame homography magnitudes for synthetic camera motion. Keyframe
// parameter vectors are sampled every keyframe_every frames and linearly
// interpolated in between, which gives smooth trajectories.
struct HomographyParams {
    double max_translation = 4.0;   // px per frame
    double max_rotation = 0.02;     // rad per frame
    double max_scale_delta = 0.02;  // unitless per frame
    double max_perspective = 1e-4;  // unitless per frame
    int length = 30;                // frames per sequence
    std::uint64_t seed = 0;
    int keyframe_every = 8;
    int out_height = 0;  // 0 = half the source height
    int out_width = 0;   // 0 = half the source width
};

// Optional occluder: a background-textured rectangle pasted over the object
// between start_frame and end_frame (inclusive). Camera motion freezes for
// those frames so the object reappears exactly where it vanished.
struct OccluderSpec {
    int start_frame = 10;
    int end_frame = 15;
    int margin = 6;
    std::uint64_t texture_seed = 17;
};

struct SimResult {
    Sequence sequence;                      // frames RGB; masks present when mask0 given
    std::vector<Mat3> step_homographies;    // length() entries; [0] is identity
    std::vector<Mat3> cumulative;           // cumulative[k] = step[k] * cumulative[k-1]
    std::vector<LabelMask> oracle_masks;    // analytic warped masks (empty without mask0)
};

// Warps a still image along a smooth random homography chain. mask0 (in
// output-crop coordinates) is propagated analytically when provided, giving
// the generator its own correspondence oracle.
SimResult simulate_sequence(const Frame& image, const HomographyParams& params,
                            const LabelMask* mask0 = nullptr,
                            const OccluderSpec* occluder = nullptr);

// Same warp machinery with caller-supplied per-step matrices (steps[0] is
// taken as identity). Used for controlled motion scripts.
SimResult simulate_with_steps(const Frame& image, const std::vector<Mat3>& steps, int out_h,
                              int out_w, const LabelMask* mask0 = nullptr,
                              const OccluderSpec* occluder = nullptr);

// Deterministic corpus: |images| x sequences_per_image sequences, each with
// a seed derived from (params.seed, image index, repeat index).
std::vector<SimResult> build_lowdata_corpus(const std::vector<Frame>& images,
                                            int sequences_per_image,
                                            const HomographyParams& params);

// ---- Procedural test scenes (no dataset required) ----

struct SceneSpec {
    int source_height = 256;
    int source_width = 256;
    int out_height = 128;  // crop size the simulator will emit
    int out_width = 128;
    int num_objects = 1;
    std::uint64_t seed = 0;
};

struct Scene {
    Frame image;      // source_height x source_width, RGB
    LabelMask mask0;  // out_height x out_width, object labels in crop coords
};

// Smooth value-noise background with distinctly textured object disks placed
// inside the central crop region.
Scene procedural_scene(const SceneSpec& spec);

// Background-style texture patch used for occluders.
Frame procedural_texture(int height, int width, std::uint64_t seed);

}  // namespace densetrack
