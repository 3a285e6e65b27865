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

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace stfchan
{
    using Complex = std::complex<double>;

    inline constexpr double kPi = std::numbers::pi;
    inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
    inline constexpr double kSpeedOfLight = 299792458.0; // m/s, CODATA exact

    inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
    inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

    // Error hierarchy. Every failure the library reports derives from std::runtime_error
    // (or std::domain_error / std::out_of_range where the standard category fits).
    struct ConfigError : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };

    struct GeometryError : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };

    struct EstimatorError : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };

    struct IoError : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };

    struct DegenerateChannelError : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };

    // Wraps to (-pi, pi]
    inline double wrap_azimuth(double a)
    {
        if (!std::isfinite(a))
            throw std::domain_error("wrap_azimuth: non-finite angle");
        double w = std::remainder(a, kTwoPi); // [-pi, pi]
        if (w <= -kPi)
            w += kTwoPi;
        return w;
    }

    // Folds an unconstrained elevation into [-pi/2, pi/2]. Folding through a pole flips the
    // azimuth by pi, so both angles are updated together.
    inline void wrap_direction(double &azimuth, double &elevation)
    {
        double e = wrap_azimuth(elevation);
        if (e > kPi / 2.0)
        {
            e = kPi - e;
            azimuth += kPi;
        }
        else if (e < -kPi / 2.0)
        {
            e = -kPi - e;
            azimuth += kPi;
        }
        elevation = e;
        azimuth = wrap_azimuth(azimuth);
    }
} // namespace stfchan
