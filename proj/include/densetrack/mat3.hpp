// Copyright (c) 2026 The densetrack authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>

namespace densetrack {

// 3x3 homography matrix, row-major, double precision.
struct Mat3 {
    std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

    static Mat3 identity() { return Mat3{}; }

    static Mat3 translation(double tx, double ty) {
        Mat3 r;
        r.m = {1, 0, tx, 0, 1, ty, 0, 0, 1};
        return r;
    }

    static Mat3 rotation(double theta) {
        const double c = std::cos(theta), s = std::sin(theta);
        Mat3 r;
        r.m = {c, -s, 0, s, c, 0, 0, 0, 1};
        return r;
    }

    static Mat3 scale(double s) {
        Mat3 r;
        r.m = {s, 0, 0, 0, s, 0, 0, 0, 1};
        return r;
    }

    static Mat3 perspective(double px, double py) {
        Mat3 r;
        r.m = {1, 0, 0, 0, 1, 0, px, py, 1};
        return r;
    }

    double det() const {
        return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
               m[2] * (m[3] * m[7] - m[4] * m[6]);
    }

    Mat3 inverse() const {
        const double d = det();
        Mat3 r;
        const double id = 1.0 / d;
        r.m[0] = (m[4] * m[8] - m[5] * m[7]) * id;
        r.m[1] = (m[2] * m[7] - m[1] * m[8]) * id;
        r.m[2] = (m[1] * m[5] - m[2] * m[4]) * id;
        r.m[3] = (m[5] * m[6] - m[3] * m[8]) * id;
        r.m[4] = (m[0] * m[8] - m[2] * m[6]) * id;
        r.m[5] = (m[2] * m[3] - m[0] * m[5]) * id;
        r.m[6] = (m[3] * m[7] - m[4] * m[6]) * id;
        r.m[7] = (m[1] * m[6] - m[0] * m[7]) * id;
        r.m[8] = (m[0] * m[4] - m[1] * m[3]) * id;
        return r;
    }

    // Apply to point (x, y), perspective divide included.
    void apply(double x, double y, double* ox, double* oy) const {
        const double w = m[6] * x + m[7] * y + m[8];
        *ox = (m[0] * x + m[1] * y + m[2]) / w;
        *oy = (m[3] * x + m[4] * y + m[5]) / w;
    }
};

inline Mat3 operator*(const Mat3& a, const Mat3& b) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0;
            for (int k = 0; k < 3; ++k) s += a.m[i * 3 + k] * b.m[k * 3 + j];
            r.m[i * 3 + j] = s;
        }
    return r;
}

inline double max_abs_diff(const Mat3& a, const Mat3& b) {
    double d = 0;
    for (int i = 0; i < 9; ++i) d = std::max(d, std::abs(a.m[i] - b.m[i]));
    return d;
}

}  // namespace densetrack
