// Copyright (c) 2026 The densetrack authors
// SPDX-License-Identifier: Apache-2.0

#include "densetrack/image.hpp"

#include <algorithm>
#include <cmath>

#include "densetrack/errors.hpp"

namespace densetrack {

std::uint8_t LabelMask::max_label() const {
    std::uint8_t m = 0;
    for (std::uint8_t v : labels) m = std::max(m, v);
    return m;
}

namespace {

inline double srgb_to_linear(double c) {
    return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

inline double linear_to_srgb(double c) {
    return c <= 0.0031308 ? c * 12.92 : 1.055 * std::pow(c, 1.0 / 2.4) - 0.055;
}

constexpr double kDelta = 6.0 / 29.0;

inline double lab_f(double t) {
    return t > kDelta * kDelta * kDelta ? std::cbrt(t) : t / (3.0 * kDelta * kDelta) + 4.0 / 29.0;
}

inline double lab_f_inv(double t) {
    return t > kDelta ? t * t * t : 3.0 * kDelta * kDelta * (t - 4.0 / 29.0);
}

// D65 reference white.
constexpr double kXn = 0.95047, kYn = 1.0, kZn = 1.08883;

}  // namespace

Frame rgb_to_lab(const Frame& frame) {
    if (frame.color_space != ColorSpace::RGB) throw RangeError("rgb_to_lab: input is not RGB");
    const int h = frame.height(), w = frame.width();
    Frame out(h, w, ColorSpace::Lab, frame.index);
    const long n = static_cast<long>(h) * w;
    for (long i = 0; i < n; ++i) {
        const double r = frame.pixels[i];
        const double g = frame.pixels[n + i];
        const double b = frame.pixels[2 * n + i];
        if (r < -1e-6 || r > 1.0 + 1e-6 || g < -1e-6 || g > 1.0 + 1e-6 || b < -1e-6 ||
            b > 1.0 + 1e-6)
            throw RangeError("rgb_to_lab: RGB value outside [0,1]");
        const double rl = srgb_to_linear(r), gl = srgb_to_linear(g), bl = srgb_to_linear(b);
        const double X = 0.4124564 * rl + 0.3575761 * gl + 0.1804375 * bl;
        const double Y = 0.2126729 * rl + 0.7151522 * gl + 0.0721750 * bl;
        const double Z = 0.0193339 * rl + 0.1191920 * gl + 0.9503041 * bl;
        const double fx = lab_f(X / kXn), fy = lab_f(Y / kYn), fz = lab_f(Z / kZn);
        out.pixels[i] = static_cast<float>(116.0 * fy - 16.0);
        out.pixels[n + i] = static_cast<float>(500.0 * (fx - fy));
        out.pixels[2 * n + i] = static_cast<float>(200.0 * (fy - fz));
    }
    return out;
}

Frame lab_to_rgb(const Frame& frame) {
    if (frame.color_space != ColorSpace::Lab) throw RangeError("lab_to_rgb: input is not Lab");
    const int h = frame.height(), w = frame.width();
    Frame out(h, w, ColorSpace::RGB, frame.index);
    const long n = static_cast<long>(h) * w;
    for (long i = 0; i < n; ++i) {
        const double L = frame.pixels[i];
        const double a = frame.pixels[n + i];
        const double b = frame.pixels[2 * n + i];
        const double fy = (L + 16.0) / 116.0;
        const double fx = fy + a / 500.0;
        const double fz = fy - b / 200.0;
        const double X = kXn * lab_f_inv(fx);
        const double Y = kYn * lab_f_inv(fy);
        const double Z = kZn * lab_f_inv(fz);
        const double rl = 3.2404542 * X - 1.5371385 * Y - 0.4985314 * Z;
        const double gl = -0.9692660 * X + 1.8760108 * Y + 0.0415560 * Z;
        const double bl = 0.0556434 * X - 0.2040259 * Y + 1.0572252 * Z;
        out.pixels[i] = static_cast<float>(std::clamp(linear_to_srgb(rl), 0.0, 1.0));
        out.pixels[n + i] = static_cast<float>(std::clamp(linear_to_srgb(gl), 0.0, 1.0));
        out.pixels[2 * n + i] = static_cast<float>(std::clamp(linear_to_srgb(bl), 0.0, 1.0));
    }
    return out;
}

Tensorf bilinear_resize(const Tensorf& src, int out_h, int out_w) {
    const int c = src.dim(0), h = src.dim(1), w = src.dim(2);
    Tensorf out({c, out_h, out_w});
    const double sy = static_cast<double>(h) / out_h;
    const double sx = static_cast<double>(w) / out_w;
    for (int y = 0; y < out_h; ++y) {
        double fy = (y + 0.5) * sy - 0.5;
        fy = std::clamp(fy, 0.0, static_cast<double>(h - 1));
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, h - 1);
        const float wy = static_cast<float>(fy - y0);
        for (int x = 0; x < out_w; ++x) {
            double fx = (x + 0.5) * sx - 0.5;
            fx = std::clamp(fx, 0.0, static_cast<double>(w - 1));
            const int x0 = static_cast<int>(fx);
            const int x1 = std::min(x0 + 1, w - 1);
            const float wx = static_cast<float>(fx - x0);
            for (int ch = 0; ch < c; ++ch) {
                const float v00 = src.at3(ch, y0, x0), v01 = src.at3(ch, y0, x1);
                const float v10 = src.at3(ch, y1, x0), v11 = src.at3(ch, y1, x1);
                const float top = v00 + (v01 - v00) * wx;
                const float bot = v10 + (v11 - v10) * wx;
                out.at3(ch, y, x) = top + (bot - top) * wy;
            }
        }
    }
    return out;
}

LabelMask nearest_resize(const LabelMask& src, int out_h, int out_w) {
    LabelMask out(out_h, out_w);
    const double sy = static_cast<double>(src.height) / out_h;
    const double sx = static_cast<double>(src.width) / out_w;
    for (int y = 0; y < out_h; ++y) {
        const int iy = std::min(static_cast<int>((y + 0.5) * sy), src.height - 1);
        for (int x = 0; x < out_w; ++x) {
            const int ix = std::min(static_cast<int>((x + 0.5) * sx), src.width - 1);
            out.at(y, x) = src.at(iy, ix);
        }
    }
    return out;
}

Tensorf avg_pool(const Tensorf& src, int factor) {
    const int c = src.dim(0), h = src.dim(1), w = src.dim(2);
    if (h % factor != 0 || w % factor != 0)
        throw ShapeError("avg_pool: dimensions not divisible by factor");
    const int oh = h / factor, ow = w / factor;
    Tensorf out({c, oh, ow});
    const float inv = 1.0f / static_cast<float>(factor * factor);
    for (int ch = 0; ch < c; ++ch)
        for (int y = 0; y < oh; ++y)
            for (int x = 0; x < ow; ++x) {
                float s = 0.0f;
                for (int dy = 0; dy < factor; ++dy)
                    for (int dx = 0; dx < factor; ++dx)
                        s += src.at3(ch, y * factor + dy, x * factor + dx);
                out.at3(ch, y, x) = s * inv;
            }
    return out;
}

Tensorf pad_to_multiple(const Tensorf& src, int m) {
    const int c = src.dim(0), h = src.dim(1), w = src.dim(2);
    const int ph = (h + m - 1) / m * m;
    const int pw = (w + m - 1) / m * m;
    if (ph == h && pw == w) return src;
    Tensorf out({c, ph, pw});
    for (int ch = 0; ch < c; ++ch)
        for (int y = 0; y < ph; ++y) {
            const int sy = std::min(y, h - 1);
            for (int x = 0; x < pw; ++x) out.at3(ch, y, x) = src.at3(ch, sy, std::min(x, w - 1));
        }
    return out;
}

CropWindow sample_crop_window(int height, int width, Rng& rng, double scale_lo, double scale_hi) {
    const int short_side = std::min(height, width);
    const double scale = rng.uniform(scale_lo, scale_hi);
    int side = static_cast<int>(std::lround(scale * short_side));
    side = std::clamp(side, 1, short_side);
    CropWindow win;
    win.side = side;
    win.y0 = (height - side > 0) ? rng.uniform_int(height - side + 1) : 0;
    win.x0 = (width - side > 0) ? rng.uniform_int(width - side + 1) : 0;
    return win;
}

Frame apply_crop_resize(const Frame& frame, const CropWindow& win, int target) {
    const int c = frame.pixels.dim(0);
    Tensorf crop({c, win.side, win.side});
    for (int ch = 0; ch < c; ++ch)
        for (int y = 0; y < win.side; ++y)
            for (int x = 0; x < win.side; ++x)
                crop.at3(ch, y, x) = frame.pixels.at3(ch, win.y0 + y, win.x0 + x);
    Frame out;
    out.pixels = bilinear_resize(crop, target, target);
    out.color_space = frame.color_space;
    out.index = frame.index;
    return out;
}

Frame random_crop_resize(const Frame& frame, int target, Rng& rng) {
    if (target % 4 != 0) throw SizeError("random_crop_resize: target must be divisible by 4");
    if (frame.height() < target / 2 || frame.width() < target / 2)
        throw SizeError("random_crop_resize: frame smaller than target/2");
    const CropWindow win = sample_crop_window(frame.height(), frame.width(), rng);
    return apply_crop_resize(frame, win, target);
}

MaskProbMap one_hot(const LabelMask& mask, int num_objects) {
    MaskProbMap out(num_objects + 1, mask.height, mask.width, ResolutionTag::full);
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x) {
            const int lbl = mask.at(y, x);
            if (lbl > num_objects) throw AnnotationError("one_hot: label exceeds object count");
            out.probs.at3(lbl, y, x) = 1.0f;
        }
    return out;
}

LabelMask argmax_labels(const MaskProbMap& probs) {
    const int c = probs.channels(), h = probs.height(), w = probs.width();
    LabelMask out(h, w);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            int best = 0;
            float bv = probs.probs.at3(0, y, x);
            for (int ch = 1; ch < c; ++ch) {
                const float v = probs.probs.at3(ch, y, x);
                if (v > bv) {
                    bv = v;
                    best = ch;
                }
            }
            out.at(y, x) = static_cast<std::uint8_t>(best);
        }
    return out;
}

void renormalize(MaskProbMap& probs) {
    const int c = probs.channels(), h = probs.height(), w = probs.width();
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            float s = 0.0f;
            for (int ch = 0; ch < c; ++ch) {
                float& v = probs.probs.at3(ch, y, x);
                if (v < 0.0f) v = 0.0f;
                s += v;
            }
            if (s > 1e-12f) {
                const float inv = 1.0f / s;
                for (int ch = 0; ch < c; ++ch) probs.probs.at3(ch, y, x) *= inv;
            } else {
                probs.probs.at3(0, y, x) = 1.0f;
                for (int ch = 1; ch < c; ++ch) probs.probs.at3(ch, y, x) = 0.0f;
            }
        }
}

MaskProbMap resize_probs(const MaskProbMap& probs, int out_h, int out_w, ResolutionTag tag) {
    MaskProbMap out;
    out.probs = bilinear_resize(probs.probs, out_h, out_w);
    out.resolution_tag = tag;
    renormalize(out);
    return out;
}

MaskProbMap downsample_probs(const MaskProbMap& probs, int factor) {
    MaskProbMap out;
    out.probs = avg_pool(probs.probs, factor);
    out.resolution_tag = ResolutionTag::feature;
    return out;
}

std::vector<std::uint8_t> binary_mask(const LabelMask& mask, int object_id) {
    std::vector<std::uint8_t> out(mask.labels.size(), 0);
    for (std::size_t i = 0; i < mask.labels.size(); ++i)
        out[i] = mask.labels[i] == object_id ? 1 : 0;
    return out;
}

bool probs_normalized(const MaskProbMap& probs, float tol) {
    const int c = probs.channels(), h = probs.height(), w = probs.width();
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            float s = 0.0f;
            for (int ch = 0; ch < c; ++ch) {
                const float v = probs.probs.at3(ch, y, x);
                if (v < -tol) return false;
                s += v;
            }
            if (std::abs(s - 1.0f) > tol) return false;
        }
    return true;
}

}  // namespace densetrack
