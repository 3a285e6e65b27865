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

#include <cstdint>
#include <random>

namespace stfchan
{
    // Engine used for every draw in the library.
    using Rng = std::mt19937_64;

    // Independent sub-streams of one realization. The numeric values are part of the
    // determinism contract: changing them changes every output.
    enum class Stream : std::uint64_t
    {
        clusters = 1,      // initial cluster set and ray parameters
        time_evolution = 2,
        array_evolution = 3,
        frequency_evolution = 4,
        large_scale = 5,
        power = 6,         // spatial lognormal sinusoids
        noise = 7,
        phases = 8,
    };

    // SplitMix64 finalizer
    inline constexpr std::uint64_t mix64(std::uint64_t x)
    {
        x += 0x9E3779B97F4A7C15ull;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
        return x ^ (x >> 31);
    }

    // Counter-based stream derivation:
    //   seed(master, realization, stream) = mix(mix(mix(master) ^ realization) ^ stream)
    // Every (master, realization, stream) triple gets its own engine, so realizations can be
    // generated in any order or on any thread without changing their values.
    inline constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t realization, Stream stream)
    {
        return mix64(mix64(mix64(master) ^ realization) ^ static_cast<std::uint64_t>(stream));
    }

    inline Rng make_stream(std::uint64_t master, std::uint64_t realization, Stream stream)
    {
        return Rng(derive_seed(master, realization, stream));
    }

    inline double uniform01(Rng &rng)
    {
        return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    }

    inline double std_normal(Rng &rng)
    {
        return std::normal_distribution<double>(0.0, 1.0)(rng);
    }

    // Uniform on (0, 2*pi]
    inline double uniform_phase(Rng &rng)
    {
        return 6.283185307179586 * (1.0 - uniform01(rng));
    }

    inline std::uint64_t poisson(Rng &rng, double mean)
    {
        if (!(mean > 0.0))
            return 0;
        return std::poisson_distribution<std::uint64_t>(mean)(rng);
    }

    inline bool bernoulli(Rng &rng, double p)
    {
        if (p >= 1.0)
            return true;
        if (p <= 0.0)
            return false;
        return uniform01(rng) < p;
    }
} // namespace stfchan
