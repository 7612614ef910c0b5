// Copyright (c) 2026 The densetrack authors
// SPDX-License-Identifier: Apache-2.0

#include "densetrack/image_io.hpp"

#include <jpeglib.h>
#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <memory>

#include "densetrack/errors.hpp"

namespace densetrack {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
    FilePtr f(std::fopen(path.string().c_str(), mode));
    if (!f) throw LoadError("cannot open file: " + path.string());
    return f;
}

bool has_png_signature(std::FILE* f) {
    unsigned char sig[8];
    const std::size_t n = std::fread(sig, 1, 8, f);
    std::rewind(f);
    return n == 8 && png_sig_cmp(sig, 0, 8) == 0;
}

struct PngReadGuard {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngReadGuard() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
    }
};

struct PngWriteGuard {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngWriteGuard() {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
    }
};

Frame read_png_rgb(const std::filesystem::path& path) {
    FilePtr f = open_file(path, "rb");
    PngReadGuard g;
    g.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!g.png) throw LoadError("png_create_read_struct failed");
    g.info = png_create_info_struct(g.png);
    if (!g.info) throw LoadError("png_create_info_struct failed");
    if (setjmp(png_jmpbuf(g.png))) throw LoadError("libpng error while reading " + path.string());
    png_init_io(g.png, f.get());
    png_read_info(g.png, g.info);

    // Normalize everything to 8-bit RGB.
    png_set_expand(g.png);
    png_set_strip_16(g.png);
    png_set_strip_alpha(g.png);
    png_set_gray_to_rgb(g.png);
    png_read_update_info(g.png, g.info);

    const int w = static_cast<int>(png_get_image_width(g.png, g.info));
    const int h = static_cast<int>(png_get_image_height(g.png, g.info));
    if (png_get_channels(g.png, g.info) != 3)
        throw LoadError("unexpected channel count in " + path.string());

    std::vector<std::uint8_t> row(static_cast<std::size_t>(w) * 3);
    Frame frame(h, w, ColorSpace::RGB);
    const long n = static_cast<long>(h) * w;
    for (int y = 0; y < h; ++y) {
        png_read_row(g.png, row.data(), nullptr);
        for (int x = 0; x < w; ++x) {
            const long i = static_cast<long>(y) * w + x;
            frame.pixels[i] = row[x * 3 + 0] / 255.0f;
            frame.pixels[n + i] = row[x * 3 + 1] / 255.0f;
            frame.pixels[2 * n + i] = row[x * 3 + 2] / 255.0f;
        }
    }
    png_read_end(g.png, nullptr);
    return frame;
}

struct JpegErrorJump {
    jpeg_error_mgr pub;
    jmp_buf env;
};

void jpeg_error_exit_jump(j_common_ptr cinfo) {
    longjmp(reinterpret_cast<JpegErrorJump*>(cinfo->err)->env, 1);
}

// longjmp-based error path per libjpeg convention; C++ exceptions must not
// unwind through libjpeg's C frames.
Frame read_jpeg_rgb(const std::filesystem::path& path) {
    FilePtr f = open_file(path, "rb");
    jpeg_decompress_struct cinfo{};
    JpegErrorJump jerr{};
    cinfo.err = jpeg_std_error(&jerr.pub);
    jerr.pub.error_exit = jpeg_error_exit_jump;
    Frame frame;
    std::vector<std::uint8_t> row;
    if (setjmp(jerr.env)) {
        jpeg_destroy_decompress(&cinfo);
        throw LoadError("libjpeg failed to decode " + path.string());
    }
    jpeg_create_decompress(&cinfo);
    jpeg_stdio_src(&cinfo, f.get());
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);
    const int w = static_cast<int>(cinfo.output_width);
    const int h = static_cast<int>(cinfo.output_height);
    frame = Frame(h, w, ColorSpace::RGB);
    const long n = static_cast<long>(h) * w;
    row.resize(static_cast<std::size_t>(w) * 3);
    JSAMPROW rowptr = row.data();
    for (int y = 0; y < h; ++y) {
        jpeg_read_scanlines(&cinfo, &rowptr, 1);
        for (int x = 0; x < w; ++x) {
            const long i = static_cast<long>(y) * w + x;
            frame.pixels[i] = row[x * 3 + 0] / 255.0f;
            frame.pixels[n + i] = row[x * 3 + 1] / 255.0f;
            frame.pixels[2 * n + i] = row[x * 3 + 2] / 255.0f;
        }
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return frame;
}

}  // namespace

Frame read_image(const std::filesystem::path& path) {
    {
        FilePtr probe = open_file(path, "rb");
        if (has_png_signature(probe.get())) {
            probe.reset();
            return read_png_rgb(path);
        }
    }
    return read_jpeg_rgb(path);
}

void write_image_png(const std::filesystem::path& path, const Frame& frame) {
    const int h = frame.height(), w = frame.width();
    const long n = static_cast<long>(h) * w;
    std::vector<std::uint8_t> rgb(static_cast<std::size_t>(n) * 3);
    for (long i = 0; i < n; ++i) {
        for (int c = 0; c < 3; ++c) {
            const float v = std::clamp(frame.pixels[c * n + i], 0.0f, 1.0f);
            rgb[static_cast<std::size_t>(i) * 3 + c] =
                static_cast<std::uint8_t>(std::lround(v * 255.0f));
        }
    }
    write_rgb8_png(path, h, w, rgb);
}

void write_rgb8_png(const std::filesystem::path& path, int h, int w,
                    const std::vector<std::uint8_t>& rgb) {
    if (rgb.size() != static_cast<std::size_t>(h) * w * 3)
        throw ShapeError("write_rgb8_png: buffer size mismatch");
    FilePtr f = open_file(path, "wb");
    PngWriteGuard g;
    g.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!g.png) throw LoadError("png_create_write_struct failed");
    g.info = png_create_info_struct(g.png);
    if (!g.info) throw LoadError("png_create_info_struct failed");
    if (setjmp(png_jmpbuf(g.png))) throw LoadError("libpng error while writing " + path.string());
    png_init_io(g.png, f.get());
    png_set_IHDR(g.png, g.info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), 8,
                 PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(g.png, g.info);
    for (int y = 0; y < h; ++y)
        png_write_row(g.png, const_cast<png_bytep>(rgb.data() + static_cast<std::size_t>(y) * w * 3));
    png_write_end(g.png, nullptr);
}

LabelMask read_label_mask(const std::filesystem::path& path) {
    FilePtr f = open_file(path, "rb");
    if (!has_png_signature(f.get())) throw AnnotationError("mask is not a PNG: " + path.string());
    PngReadGuard g;
    g.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!g.png) throw LoadError("png_create_read_struct failed");
    g.info = png_create_info_struct(g.png);
    if (!g.info) throw LoadError("png_create_info_struct failed");
    if (setjmp(png_jmpbuf(g.png))) throw LoadError("libpng error while reading " + path.string());
    png_init_io(g.png, f.get());
    png_read_info(g.png, g.info);

    const int color_type = png_get_color_type(g.png, g.info);
    if (color_type != PNG_COLOR_TYPE_PALETTE && color_type != PNG_COLOR_TYPE_GRAY)
        throw AnnotationError("mask must be palette or grayscale PNG: " + path.string());
    if (png_get_bit_depth(g.png, g.info) < 8) png_set_packing(g.png);
    if (png_get_bit_depth(g.png, g.info) == 16) png_set_strip_16(g.png);
    png_read_update_info(g.png, g.info);

    const int w = static_cast<int>(png_get_image_width(g.png, g.info));
    const int h = static_cast<int>(png_get_image_height(g.png, g.info));
    LabelMask mask(h, w);
    std::vector<std::uint8_t> row(static_cast<std::size_t>(w));
    for (int y = 0; y < h; ++y) {
        png_read_row(g.png, row.data(), nullptr);
        std::memcpy(mask.labels.data() + static_cast<std::size_t>(y) * w, row.data(), row.size());
    }
    png_read_end(g.png, nullptr);
    return mask;
}

std::array<std::uint8_t, 3> voc_color(int label) {
    // Standard VOC colormap: bit-reversal construction.
    std::array<std::uint8_t, 3> rgb{0, 0, 0};
    int id = label;
    for (int shift = 7; shift >= 0 && id > 0; --shift) {
        rgb[0] = static_cast<std::uint8_t>(rgb[0] | ((id & 1) << shift));
        rgb[1] = static_cast<std::uint8_t>(rgb[1] | (((id >> 1) & 1) << shift));
        rgb[2] = static_cast<std::uint8_t>(rgb[2] | (((id >> 2) & 1) << shift));
        id >>= 3;
    }
    return rgb;
}

void write_label_mask(const std::filesystem::path& path, const LabelMask& mask) {
    FilePtr f = open_file(path, "wb");
    PngWriteGuard g;
    g.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!g.png) throw LoadError("png_create_write_struct failed");
    g.info = png_create_info_struct(g.png);
    if (!g.info) throw LoadError("png_create_info_struct failed");
    if (setjmp(png_jmpbuf(g.png))) throw LoadError("libpng error while writing " + path.string());
    png_init_io(g.png, f.get());
    png_set_IHDR(g.png, g.info, static_cast<png_uint_32>(mask.width),
                 static_cast<png_uint_32>(mask.height), 8, PNG_COLOR_TYPE_PALETTE,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_color palette[256];
    for (int i = 0; i < 256; ++i) {
        const auto rgb = voc_color(i);
        palette[i].red = rgb[0];
        palette[i].green = rgb[1];
        palette[i].blue = rgb[2];
    }
    png_set_PLTE(g.png, g.info, palette, 256);
    png_write_info(g.png, g.info);
    for (int y = 0; y < mask.height; ++y)
        png_write_row(g.png, const_cast<png_bytep>(mask.labels.data() +
                                                   static_cast<std::size_t>(y) * mask.width));
    png_write_end(g.png, nullptr);
}

}  // namespace densetrack
