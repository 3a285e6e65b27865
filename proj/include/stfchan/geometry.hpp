// SPDX-License-Identifier: Apache-2.0
//
// stfchan - space-time-frequency non-stationary THz channel simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "common.hpp"

#include <algorithm>
#include <array>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

namespace stfchan
{
    struct Vec3
    {
        double x = 0.0, y = 0.0, z = 0.0;

        constexpr Vec3 &operator+=(const Vec3 &o)
        {
            x += o.x, y += o.y, z += o.z;
            return *this;
        }
        constexpr Vec3 &operator-=(const Vec3 &o)
        {
            x -= o.x, y -= o.y, z -= o.z;
            return *this;
        }
        friend constexpr Vec3 operator+(Vec3 a, const Vec3 &b) { return a += b; }
        friend constexpr Vec3 operator-(Vec3 a, const Vec3 &b) { return a -= b; }
        friend constexpr Vec3 operator-(const Vec3 &a) { return {-a.x, -a.y, -a.z}; }
        friend constexpr Vec3 operator*(double s, const Vec3 &a) { return {s * a.x, s * a.y, s * a.z}; }
        friend constexpr Vec3 operator*(const Vec3 &a, double s) { return s * a; }
        friend constexpr bool operator==(const Vec3 &, const Vec3 &) = default;
    };

    inline constexpr double dot(const Vec3 &a, const Vec3 &b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
    inline double norm(const Vec3 &a) { return std::sqrt(dot(a, a)); }

    // Unit vector for (azimuth, elevation): [cos(e)cos(a), cos(e)sin(a), sin(e)]
    inline Vec3 direction(double azimuth, double elevation)
    {
        const double ce = std::cos(elevation);
        return {ce * std::cos(azimuth), ce * std::sin(azimuth), std::sin(elevation)};
    }

    struct Angles
    {
        double azimuth = 0.0;   // (-pi, pi]
        double elevation = 0.0; // [-pi/2, pi/2]
    };

    // Inverse of direction(); throws on a zero vector.
    inline Angles angles_of(const Vec3 &v)
    {
        const double n = norm(v);
        if (!(n > 0.0) || !std::isfinite(n))
            throw GeometryError("angles_of: zero-length or non-finite direction vector");
        Angles a;
        a.azimuth = (v.x == 0.0 && v.y == 0.0) ? 0.0 : wrap_azimuth(std::atan2(v.y, v.x));
        a.elevation = std::asin(std::clamp(v.z / n, -1.0, 1.0));
        return a;
    }

    struct PanelOrientation
    {
        double beta_v_e = 0.0; // elevation of the column (V) direction
        double beta_v_a = 0.0; // azimuth of the column (V) direction
        double beta_h_e = 0.0; // elevation of the row (H) direction
        double beta_h_a = 0.0; // azimuth of the row (H) direction
    };

    struct Rotation
    {
        double gamma_x = 0.0, gamma_y = 0.0, gamma_z = 0.0;
    };

    // Uniform planar array. Elements are indexed from 0; element p sits in row p / m_v and
    // column p % m_v, and element 0 is the reference at the local origin.
    struct ArrayGeometry
    {
        std::size_t m_v = 1; // columns
        std::size_t m_h = 1; // rows
        double delta_v = 0.0; // spacing between columns [m]
        double delta_h = 0.0; // spacing between rows [m]
        PanelOrientation orientation;
        Rotation rotation;
        std::vector<Vec3> explicit_offsets; // optional, non-uniform arrays

        std::size_t size() const { return m_v * m_h; }
        std::size_t row(std::size_t p) const { return p / m_v; }
        std::size_t column(std::size_t p) const { return p % m_v; }

        void validate() const
        {
            if (m_v == 0 || m_h == 0)
                throw ConfigError("ArrayGeometry: m_v and m_h must be positive");
            if (!(delta_v >= 0.0) || !(delta_h >= 0.0))
                throw ConfigError("ArrayGeometry: spacings must be non-negative");
            if (!explicit_offsets.empty() && explicit_offsets.size() != size())
                throw ConfigError("ArrayGeometry: explicit offset count must equal m_v * m_h");
        }
    };

    inline Vec3 column_direction(const PanelOrientation &o) { return direction(o.beta_v_a, o.beta_v_e); }
    inline Vec3 row_direction(const PanelOrientation &o) { return direction(o.beta_h_a, o.beta_h_e); }

    // Offset of element p from element 0: (row)*delta_h*h_dir + (column)*delta_v*v_dir.
    // Rows and columns are counted from zero so element 0 stays at the origin.
    inline Vec3 element_position(const ArrayGeometry &array, std::size_t p)
    {
        if (p >= array.size())
            throw std::out_of_range("element_position: element index " + std::to_string(p) + " out of range");
        if (!array.explicit_offsets.empty())
            return array.explicit_offsets[p];
        const double r = static_cast<double>(array.row(p));
        const double c = static_cast<double>(array.column(p));
        return (r * array.delta_h) * row_direction(array.orientation) +
               (c * array.delta_v) * column_direction(array.orientation);
    }

    // 3x3 row-major rotation R = Rz(gz) * Ry(gy) * Rx(gx)
    using Mat3 = std::array<double, 9>;

    inline Mat3 rotation_matrix(const Rotation &r)
    {
        const double cx = std::cos(r.gamma_x), sx = std::sin(r.gamma_x);
        const double cy = std::cos(r.gamma_y), sy = std::sin(r.gamma_y);
        const double cz = std::cos(r.gamma_z), sz = std::sin(r.gamma_z);
        return {cz * cy, cz * sy * sx - sz * cx, cz * sy * cx + sz * sx,
                sz * cy, sz * sy * sx + cz * cx, sz * sy * cx - cz * sx,
                -sy, cy * sx, cy * cx};
    }

    inline Vec3 mat_apply(const Mat3 &m, const Vec3 &v)
    {
        return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
                m[3] * v.x + m[4] * v.y + m[5] * v.z,
                m[6] * v.x + m[7] * v.y + m[8] * v.z};
    }

    inline Vec3 mat_apply_transposed(const Mat3 &m, const Vec3 &v)
    {
        return {m[0] * v.x + m[3] * v.y + m[6] * v.z,
                m[1] * v.x + m[4] * v.y + m[7] * v.z,
                m[2] * v.x + m[5] * v.y + m[8] * v.z};
    }

    // Global-to-local angle transform for a panel rotated by (gamma_x, gamma_y, gamma_z)
    // about the global x, y and z axes. The direction vector is rotated by R^T, so the
    // transform is norm-preserving and exactly invertible by lcs_to_gcs.
    inline Angles gcs_to_lcs(const Angles &gcs, const Rotation &rot)
    {
        if (!std::isfinite(gcs.azimuth) || !std::isfinite(gcs.elevation))
            throw std::domain_error("gcs_to_lcs: non-finite angle");
        return angles_of(mat_apply_transposed(rotation_matrix(rot), direction(gcs.azimuth, gcs.elevation)));
    }

    inline Angles lcs_to_gcs(const Angles &lcs, const Rotation &rot)
    {
        return angles_of(mat_apply(rotation_matrix(rot), direction(lcs.azimuth, lcs.elevation)));
    }

    struct MotionState
    {
        double speed = 0.0;   // m/s
        double alpha_e = 0.0; // elevation of travel
        double alpha_a = 0.0; // azimuth of travel
    };

    inline Vec3 velocity_vector(const MotionState &m)
    {
        return m.speed * direction(m.alpha_a, m.alpha_e);
    }

    inline double wavelength(double f_hz)
    {
        if (!(f_hz > 0.0))
            throw std::domain_error("wavelength: frequency must be positive");
        return kSpeedOfLight / f_hz;
    }

    // ---- Rayleigh-distance sub-array partition ------------------------------------------------

    struct SubArray
    {
        std::size_t column_begin = 0, column_count = 1; // along p_V
        std::size_t row_begin = 0, row_count = 1;       // along p_H
        double extent_v = 0.0;      // (column_count-1) * delta_v
        double extent_h = 0.0;      // (row_count-1) * delta_h
        double max_aperture = 0.0;  // largest element-to-element distance in the block
        double rayleigh_distance = 0.0;

        std::size_t reference_element(const ArrayGeometry &a) const { return row_begin * a.m_v + column_begin; }
        bool contains(const ArrayGeometry &a, std::size_t p) const
        {
            const std::size_t r = a.row(p), c = a.column(p);
            return r >= row_begin && r < row_begin + row_count && c >= column_begin && c < column_begin + column_count;
        }
    };

    // Largest element-to-element distance of a rows x cols block of a UPA.
    inline double block_aperture(const ArrayGeometry &a, std::size_t cols, std::size_t rows)
    {
        if (cols == 0 || rows == 0)
            return 0.0;
        const Vec3 diag = (static_cast<double>(rows - 1) * a.delta_h) * row_direction(a.orientation) +
                          (static_cast<double>(cols - 1) * a.delta_v) * column_direction(a.orientation);
        const Vec3 anti = (static_cast<double>(rows - 1) * a.delta_h) * row_direction(a.orientation) -
                          (static_cast<double>(cols - 1) * a.delta_v) * column_direction(a.orientation);
        return std::max(norm(diag), norm(anti));
    }

    inline double rayleigh_distance(double aperture, double f_hz)
    {
        return 2.0 * aperture * aperture / wavelength(f_hz);
    }

    // Whether a cols x rows block keeps its Rayleigh distance within min_path_distance.
    // A single element is always accepted.
    inline bool block_fits(const ArrayGeometry &a, std::size_t cols, std::size_t rows, double f_hz,
                           double min_path_distance)
    {
        if (cols <= 1 && rows <= 1)
            return true;
        return rayleigh_distance(block_aperture(a, cols, rows), f_hz) <= min_path_distance;
    }

    namespace detail
    {
        // Splits n into k nearly equal consecutive runs.
        inline std::vector<std::pair<std::size_t, std::size_t>> balanced_runs(std::size_t n, std::size_t k)
        {
            std::vector<std::pair<std::size_t, std::size_t>> runs;
            const std::size_t base = n / k, extra = n % k;
            std::size_t begin = 0;
            for (std::size_t i = 0; i < k; ++i)
            {
                const std::size_t len = base + (i < extra ? 1 : 0);
                runs.emplace_back(begin, len);
                begin += len;
            }
            return runs;
        }
    } // namespace detail

    // Tiles the array into rectangular blocks whose Rayleigh distance does not exceed
    // min_path_distance. The block shape maximising the element count is chosen first (ties go
    // to the squarer block), then each axis is split into equally sized runs so no block is
    // larger than that shape.
    inline std::vector<SubArray> subarray_partition(const ArrayGeometry &a, double f_hz, double min_path_distance)
    {
        a.validate();
        if (!(min_path_distance > 0.0))
            throw std::domain_error("subarray_partition: min_path_distance must be positive");
        if (!a.explicit_offsets.empty())
        {
            // Non-uniform arrays: every element is its own block.
            std::vector<SubArray> out;
            for (std::size_t r = 0; r < a.m_h; ++r)
                for (std::size_t c = 0; c < a.m_v; ++c)
                    out.push_back(SubArray{c, 1, r, 1, 0.0, 0.0, 0.0, 0.0});
            return out;
        }

        std::size_t best_cols = 1, best_rows = 1;
        double best_balance = 0.0;
        for (std::size_t cols = 1; cols <= a.m_v; ++cols)
        {
            if (!block_fits(a, cols, 1, f_hz, min_path_distance))
                break;
            // Rayleigh distance grows with rows, so binary search the largest admissible count.
            std::size_t lo = 1, hi = a.m_h;
            while (lo < hi)
            {
                const std::size_t mid = lo + (hi - lo + 1) / 2;
                if (block_fits(a, cols, mid, f_hz, min_path_distance))
                    lo = mid;
                else
                    hi = mid - 1;
            }
            const std::size_t rows = lo;
            const double balance = -std::abs(static_cast<double>(cols - 1) * a.delta_v -
                                             static_cast<double>(rows - 1) * a.delta_h);
            if (cols * rows > best_cols * best_rows ||
                (cols * rows == best_cols * best_rows && balance > best_balance))
            {
                best_cols = cols, best_rows = rows, best_balance = balance;
            }
        }

        const std::size_t kv = (a.m_v + best_cols - 1) / best_cols;
        const std::size_t kh = (a.m_h + best_rows - 1) / best_rows;
        std::vector<SubArray> out;
        out.reserve(kv * kh);
        for (const auto &[rb, rc] : detail::balanced_runs(a.m_h, kh))
            for (const auto &[cb, cc] : detail::balanced_runs(a.m_v, kv))
            {
                SubArray s{cb, cc, rb, rc, 0.0, 0.0, 0.0, 0.0};
                s.extent_v = static_cast<double>(cc - 1) * a.delta_v;
                s.extent_h = static_cast<double>(rc - 1) * a.delta_h;
                s.max_aperture = block_aperture(a, cc, rc);
                s.rayleigh_distance = rayleigh_distance(s.max_aperture, f_hz);
                out.push_back(s);
            }
        return out;
    }

    // Lookup table element -> index of the block that contains it.
    inline std::vector<std::size_t> block_index_of_elements(const ArrayGeometry &a, const std::vector<SubArray> &blocks)
    {
        std::vector<std::size_t> idx(a.size(), std::numeric_limits<std::size_t>::max());
        for (std::size_t b = 0; b < blocks.size(); ++b)
            for (std::size_t r = blocks[b].row_begin; r < blocks[b].row_begin + blocks[b].row_count; ++r)
                for (std::size_t c = blocks[b].column_begin; c < blocks[b].column_begin + blocks[b].column_count; ++c)
                    idx[r * a.m_v + c] = b;
        return idx;
    }
} // namespace stfchan
