// Copyright (c) 2026 The densetrack authors
// SPDX-License-Identifier: Apache-2.0

#include "densetrack/synthgen.hpp"

#include <algorithm>
#include <cmath>

#include "densetrack/errors.hpp"
#include "densetrack/rng.hpp"

namespace densetrack {

namespace {

struct StepParams {
    double tx = 0, ty = 0, rot = 0, ds = 0, px = 0, py = 0;
};

StepParams sample_step(const HomographyParams& p, Rng& rng) {
    StepParams s;
    s.tx = rng.uniform(-p.max_translation, p.max_translation);
    s.ty = rng.uniform(-p.max_translation, p.max_translation);
    s.rot = rng.uniform(-p.max_rotation, p.max_rotation);
    s.ds = rng.uniform(-p.max_scale_delta, p.max_scale_delta);
    s.px = rng.uniform(-p.max_perspective, p.max_perspective);
    s.py = rng.uniform(-p.max_perspective, p.max_perspective);
    return s;
}

StepParams lerp(const StepParams& a, const StepParams& b, double t) {
    StepParams s;
    s.tx = a.tx + (b.tx - a.tx) * t;
    s.ty = a.ty + (b.ty - a.ty) * t;
    s.rot = a.rot + (b.rot - a.rot) * t;
    s.ds = a.ds + (b.ds - a.ds) * t;
    s.px = a.px + (b.px - a.px) * t;
    s.py = a.py + (b.py - a.py) * t;
    return s;
}

// Homography about the crop center: translate, then rotate/scale/perspective
// around (cx, cy).
Mat3 build_step(const StepParams& s, double cx, double cy) {
    return Mat3::translation(s.tx, s.ty) * Mat3::translation(cx, cy) * Mat3::rotation(s.rot) *
           Mat3::scale(1.0 + s.ds) * Mat3::perspective(s.px, s.py) * Mat3::translation(-cx, -cy);
}

float bilinear_sample(const Tensorf& img, int c, double y, double x) {
    const int h = img.dim(1), w = img.dim(2);
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const int x1 = std::min(x0 + 1, w - 1);
    const int y1 = std::min(y0 + 1, h - 1);
    const float wx = static_cast<float>(x - x0);
    const float wy = static_cast<float>(y - y0);
    const float v00 = img.at3(c, y0, x0), v01 = img.at3(c, y0, x1);
    const float v10 = img.at3(c, y1, x0), v11 = img.at3(c, y1, x1);
    const float top = v00 + (v01 - v00) * wx;
    const float bot = v10 + (v11 - v10) * wx;
    return top + (bot - top) * wy;
}

struct BBox {
    int y0 = 0, x0 = 0, y1 = -1, x1 = -1;
    bool empty() const { return y1 < y0 || x1 < x0; }
};

BBox mask_bbox(const LabelMask& m) {
    BBox b;
    b.y0 = m.height;
    b.x0 = m.width;
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x)
            if (m.at(y, x) != 0) {
                b.y0 = std::min(b.y0, y);
                b.x0 = std::min(b.x0, x);
                b.y1 = std::max(b.y1, y);
                b.x1 = std::max(b.x1, x);
            }
    return b;
}

}  // namespace

SimResult simulate_sequence(const Frame& image, const HomographyParams& params,
                            const LabelMask* mask0, const OccluderSpec* occluder) {
    if (params.length < 2) throw ParameterError("simulate_sequence: length must be >= 2");
    const int out_h = params.out_height > 0 ? params.out_height : image.height() / 2;
    const int out_w = params.out_width > 0 ? params.out_width : image.width() / 2;
    if (image.height() < 2 * out_h || image.width() < 2 * out_w)
        throw SizeError("simulate_sequence: source image must be at least 2x the output crop");

    Rng rng(params.seed);
    const double cx = (out_w - 1) / 2.0, cy = (out_h - 1) / 2.0;

    // Keyframe parameter vectors, linearly interpolated per step. Each
    // keyframe's own step matrix must be invertible (det bounded away
    // from 0); resample up to 10 times.
    const int kf_every = std::max(1, params.keyframe_every);
    const int num_kf = (params.length - 1) / kf_every + 2;
    std::vector<StepParams> keyframes(static_cast<std::size_t>(num_kf));
    for (int i = 0; i < num_kf; ++i) {
        bool ok = false;
        for (int attempt = 0; attempt < 10 && !ok; ++attempt) {
            keyframes[i] = sample_step(params, rng);
            ok = std::abs(build_step(keyframes[i], cx, cy).det()) >= 1e-6;
        }
        if (!ok) throw ParameterError("simulate_sequence: could not sample invertible homography");
    }

    std::vector<Mat3> steps(static_cast<std::size_t>(params.length), Mat3::identity());
    for (int k = 1; k < params.length; ++k) {
        const int seg = k / kf_every;
        const double t = static_cast<double>(k % kf_every) / kf_every;
        const StepParams s = lerp(keyframes[seg], keyframes[seg + 1], t);
        steps[k] = build_step(s, cx, cy);
        if (std::abs(steps[k].det()) < 1e-6)
            throw ParameterError("simulate_sequence: interpolated homography is singular");
    }
    return simulate_with_steps(image, steps, out_h, out_w, mask0, occluder);
}

SimResult simulate_with_steps(const Frame& image, const std::vector<Mat3>& steps, int out_h,
                              int out_w, const LabelMask* mask0, const OccluderSpec* occluder) {
    const int length = static_cast<int>(steps.size());
    if (length < 1) throw ParameterError("simulate_with_steps: no steps");
    if (mask0 && (mask0->height != out_h || mask0->width != out_w))
        throw ShapeError("simulate_with_steps: mask0 must match the output crop size");

    const double off_y = (image.height() - out_h) / 2.0;
    const double off_x = (image.width() - out_w) / 2.0;

    SimResult result;
    result.step_homographies.assign(static_cast<std::size_t>(length), Mat3::identity());
    result.cumulative.assign(static_cast<std::size_t>(length), Mat3::identity());
    result.sequence.frames.reserve(static_cast<std::size_t>(length));
    result.sequence.masks.resize(static_cast<std::size_t>(length));

    Frame occ_texture;
    BBox occ_box;
    const int num_objects = mask0 ? mask0->max_label() : 0;
    result.sequence.num_objects = num_objects;

    for (int k = 0; k < length; ++k) {
        const bool occluded = occluder && k >= occluder->start_frame && k <= occluder->end_frame;
        if (k > 0) {
            // Motion freezes while the occluder is up so the object
            // reappears exactly where it vanished.
            result.step_homographies[k] = occluded ? Mat3::identity() : steps[k];
            result.cumulative[k] = result.step_homographies[k] * result.cumulative[k - 1];
        }
        const Mat3 inv = result.cumulative[k].inverse();

        Frame frame(out_h, out_w, image.color_space, k);
        for (int y = 0; y < out_h; ++y)
            for (int x = 0; x < out_w; ++x) {
                double sx, sy;
                inv.apply(static_cast<double>(x), static_cast<double>(y), &sx, &sy);
                sx += off_x;
                sy += off_y;
                if (sx < 0.0 || sy < 0.0 || sx > image.width() - 1 || sy > image.height() - 1)
                    throw WarpError("simulate: output pixel maps outside the source at frame " +
                                    std::to_string(k));
                for (int c = 0; c < 3; ++c) frame.pixels.at3(c, y, x) = bilinear_sample(image.pixels, c, sy, sx);
            }

        LabelMask mask;
        if (mask0) {
            mask = LabelMask(out_h, out_w);
            for (int y = 0; y < out_h; ++y)
                for (int x = 0; x < out_w; ++x) {
                    double sx, sy;
                    inv.apply(static_cast<double>(x), static_cast<double>(y), &sx, &sy);
                    const int ix = static_cast<int>(std::lround(sx));
                    const int iy = static_cast<int>(std::lround(sy));
                    if (ix >= 0 && iy >= 0 && ix < out_w && iy < out_h) mask.at(y, x) = mask0->at(iy, ix);
                }
        }

        if (occluded) {
            if (occ_texture.pixels.empty()) {
                occ_texture = procedural_texture(out_h, out_w, occluder->texture_seed);
                BBox b = mask0 ? mask_bbox(mask) : BBox{};
                if (b.empty()) b = BBox{out_h / 3, out_w / 3, 2 * out_h / 3, 2 * out_w / 3};
                occ_box.y0 = std::max(0, b.y0 - occluder->margin);
                occ_box.x0 = std::max(0, b.x0 - occluder->margin);
                occ_box.y1 = std::min(out_h - 1, b.y1 + occluder->margin);
                occ_box.x1 = std::min(out_w - 1, b.x1 + occluder->margin);
            }
            for (int y = occ_box.y0; y <= occ_box.y1; ++y)
                for (int x = occ_box.x0; x <= occ_box.x1; ++x) {
                    for (int c = 0; c < 3; ++c)
                        frame.pixels.at3(c, y, x) = occ_texture.pixels.at3(c, y, x);
                    if (mask0) mask.at(y, x) = 0;  // object is hidden
                }
        }

        if (mask0) {
            result.sequence.masks[static_cast<std::size_t>(k)] = one_hot(mask, num_objects);
            result.oracle_masks.push_back(std::move(mask));
        }
        result.sequence.frames.push_back(std::move(frame));
    }
    return result;
}

std::vector<SimResult> build_lowdata_corpus(const std::vector<Frame>& images,
                                            int sequences_per_image,
                                            const HomographyParams& params) {
    if (images.empty()) throw ParameterError("build_lowdata_corpus: no input images");
    if (sequences_per_image < 1)
        throw ParameterError("build_lowdata_corpus: sequences_per_image must be >= 1");
    Rng base(params.seed);
    std::vector<SimResult> corpus;
    corpus.reserve(images.size() * static_cast<std::size_t>(sequences_per_image));
    for (std::size_t i = 0; i < images.size(); ++i) {
        for (int j = 0; j < sequences_per_image; ++j) {
            HomographyParams p = params;
            p.seed = base.derive(i * 10007ULL + static_cast<std::uint64_t>(j)).seed();
            try {
                corpus.push_back(simulate_sequence(images[i], p));
            } catch (const DataError& e) {
                throw WarpError("build_lowdata_corpus: image " + std::to_string(i) + " repeat " +
                                std::to_string(j) + ": " + e.what());
            }
            corpus.back().sequence.name =
                "seq_" + std::to_string(i) + "_" + std::to_string(j);
        }
    }
    return corpus;
}

namespace {

// Smooth value noise: random control grid, bilinear-upsampled.
Tensorf value_noise(int h, int w, int cell, Rng& rng, float lo, float hi) {
    const int gh = std::max(2, h / cell + 2);
    const int gw = std::max(2, w / cell + 2);
    Tensorf grid({3, gh, gw});
    for (long i = 0; i < grid.numel(); ++i) grid[i] = rng.uniformf() * (hi - lo) + lo;
    return bilinear_resize(grid, h, w);
}

}  // namespace

Frame procedural_texture(int height, int width, std::uint64_t seed) {
    Rng rng(seed);
    Frame out(height, width, ColorSpace::RGB);
    out.pixels = value_noise(height, width, 24, rng, 0.15f, 0.7f);
    Rng fine = rng.derive(1);
    for (long i = 0; i < out.pixels.numel(); ++i) {
        const float v = out.pixels[i] + (fine.uniformf() - 0.5f) * 0.08f;
        out.pixels[i] = std::clamp(v, 0.0f, 1.0f);
    }
    return out;
}

Scene procedural_scene(const SceneSpec& spec) {
    Rng rng(spec.seed);
    Scene scene;
    scene.image = procedural_texture(spec.source_height, spec.source_width, rng.derive(0).seed());
    scene.mask0 = LabelMask(spec.out_height, spec.out_width);

    const int off_y = (spec.source_height - spec.out_height) / 2;
    const int off_x = (spec.source_width - spec.out_width) / 2;

    struct Disk {
        double cy, cx, r;
    };
    std::vector<Disk> disks;
    Rng place = rng.derive(1);
    for (int obj = 1; obj <= spec.num_objects; ++obj) {
        const double r_base = std::min(spec.out_height, spec.out_width) / 5.0;
        Disk d{};
        bool ok = false;
        for (int attempt = 0; attempt < 200 && !ok; ++attempt) {
            d.r = r_base * place.uniform(0.85, 1.15);
            const double m = d.r + 6.0;
            d.cy = place.uniform(m, spec.out_height - m);
            d.cx = place.uniform(m, spec.out_width - m);
            ok = true;
            for (const Disk& e : disks)
                if (std::hypot(d.cy - e.cy, d.cx - e.cx) < d.r + e.r + 6.0) ok = false;
        }
        if (!ok) throw ParameterError("procedural_scene: could not place objects without overlap");
        disks.push_back(d);

        // Bright, finely textured disk so objects are separable from the
        // background by luminance as well as color.
        Rng texrng = rng.derive(100 + static_cast<std::uint64_t>(obj));
        Tensorf tex = value_noise(spec.source_height, spec.source_width, 7, texrng, 0.55f, 1.0f);
        const float hue_boost[3] = {texrng.uniformf() * 0.3f, texrng.uniformf() * 0.3f,
                                    texrng.uniformf() * 0.3f};
        const double scy = d.cy + off_y, scx = d.cx + off_x;
        const int y_lo = static_cast<int>(scy - d.r - 1), y_hi = static_cast<int>(scy + d.r + 1);
        const int x_lo = static_cast<int>(scx - d.r - 1), x_hi = static_cast<int>(scx + d.r + 1);
        for (int y = std::max(0, y_lo); y <= std::min(spec.source_height - 1, y_hi); ++y)
            for (int x = std::max(0, x_lo); x <= std::min(spec.source_width - 1, x_hi); ++x) {
                if (std::hypot(y - scy, x - scx) > d.r) continue;
                const float ring =
                    0.5f + 0.5f * static_cast<float>(std::sin(std::hypot(y - scy, x - scx) * 0.9));
                for (int c = 0; c < 3; ++c) {
                    const float v = tex.at3(c, y, x) * (0.75f + 0.25f * ring) + hue_boost[c];
                    scene.image.pixels.at3(c, y, x) = std::clamp(v, 0.0f, 1.0f);
                }
            }
        for (int y = 0; y < spec.out_height; ++y)
            for (int x = 0; x < spec.out_width; ++x)
                if (std::hypot(y - d.cy, x - d.cx) <= d.r)
                    scene.mask0.at(y, x) = static_cast<std::uint8_t>(obj);
    }
    return scene;
}

}  // namespace densetrack
