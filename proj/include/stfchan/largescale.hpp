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
#include "geometry.hpp"
#include "random.hpp"

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

namespace stfchan
{
    // Frequency [Hz] -> specific attenuation [dB/m], sorted by frequency.
    struct AbsorptionTable
    {
        std::vector<std::pair<double, double>> nodes;

        // Flat 0.005 dB/m from 100 GHz to 1 THz, roughly indoor water-vapour loss in the 300 GHz window.
        static AbsorptionTable builtin() { return {{{100e9, 0.005}, {1000e9, 0.005}}}; }

        void validate() const
        {
            if (nodes.empty())
                throw ConfigError("AbsorptionTable: table is empty");
            for (std::size_t i = 0; i < nodes.size(); ++i)
            {
                if (!(nodes[i].second >= 0.0))
                    throw ConfigError("AbsorptionTable: attenuation must be non-negative");
                if (i > 0 && !(nodes[i].first > nodes[i - 1].first))
                    throw ConfigError("AbsorptionTable: frequencies must be strictly increasing");
            }
        }

        // Linear interpolation of dB/m; no extrapolation.
        double db_per_m(double f_hz) const
        {
            if (nodes.empty() || f_hz < nodes.front().first || f_hz > nodes.back().first)
                throw std::out_of_range("AbsorptionTable: frequency " + std::to_string(f_hz) + " Hz outside table");
            auto hi = std::lower_bound(nodes.begin(), nodes.end(), f_hz,
                                       [](const auto &n, double f) { return n.first < f; });
            if (hi->first == f_hz)
                return hi->second;
            auto lo = hi - 1;
            const double w = (f_hz - lo->first) / (hi->first - lo->first);
            return lo->second + w * (hi->second - lo->second);
        }
    };

    enum class BlockageMode
    {
        none,
        constant,
        markov, // two-state blocked/unblocked chain over snapshots
    };

    struct BlockageParams
    {
        BlockageMode mode = BlockageMode::none;
        double loss_db = 0.0;
        double block_probability = 0.0; // probability the first snapshot is blocked
        double dwell_probability = 1.0; // probability of staying in the current state per snapshot
    };

    struct LargeScaleParams
    {
        std::optional<double> pl0_db; // unset: Friis free-space loss at ref_distance, per sub-band
        double gamma = 2.0;
        double ref_distance = 1.0; // m
        double sh_sigma_db = 0.0;
        BlockageParams blockage;
        AbsorptionTable absorption = AbsorptionTable::builtin();
        bool redraw_per_subband = false; // shadowing / blockage redrawn for every sub-band

        void validate() const
        {
            if (!(ref_distance > 0.0))
                throw ConfigError("large_scale.ref_distance_m must be positive");
            if (!(sh_sigma_db >= 0.0))
                throw ConfigError("large_scale.shadowing_std_db must be non-negative");
            if (blockage.dwell_probability < 0.0 || blockage.dwell_probability > 1.0 ||
                blockage.block_probability < 0.0 || blockage.block_probability > 1.0)
                throw ConfigError("large_scale.blockage probabilities must lie in [0, 1]");
            absorption.validate();
        }
    };

    // Friis free-space loss at distance d.
    inline double friis_loss_db(double f_hz, double d)
    {
        return 20.0 * std::log10(4.0 * kPi * d / wavelength(f_hz));
    }

    inline double reference_loss_db(const LargeScaleParams &p, double f_hz)
    {
        return p.pl0_db ? *p.pl0_db : friis_loss_db(f_hz, p.ref_distance);
    }

    // Close-in reference distance model: PL0 + 10 gamma log10(d / d0)
    inline double path_loss_db(const LargeScaleParams &p, double d, double f_hz)
    {
        if (!(d > 0.0))
            throw std::domain_error("path_loss_db: distance must be positive");
        return reference_loss_db(p, f_hz) + 10.0 * p.gamma * std::log10(d / p.ref_distance);
    }

    // Zero-mean Gaussian in dB (lognormal in linear power).
    inline double shadowing_db(Rng &rng, double sigma_db)
    {
        if (!(sigma_db > 0.0))
            return 0.0;
        return sigma_db * std_normal(rng);
    }

    inline double molecular_absorption_db(const LargeScaleParams &p, double f_hz, double d)
    {
        if (d < 0.0)
            throw std::domain_error("molecular_absorption_db: negative distance");
        const double a = p.absorption.db_per_m(f_hz);
        return a * d;
    }

    // Linear power gain 10^(-(PL + SH + BL + MA)/10)
    inline double compose_large_scale(double pl_db, double sh_db, double bl_db, double ma_db)
    {
        return std::pow(10.0, -(pl_db + sh_db + bl_db + ma_db) / 10.0);
    }

    inline double compose_large_scale(const LargeScaleParams &p, double d, double f_hz, double sh_db, double bl_db)
    {
        return compose_large_scale(path_loss_db(p, d, f_hz), sh_db, bl_db, molecular_absorption_db(p, f_hz, d));
    }

    // Blockage loss for n snapshots.
    inline std::vector<double> draw_blockage_db(Rng &rng, const BlockageParams &b, std::size_t n_snapshots)
    {
        std::vector<double> out(n_snapshots, 0.0);
        switch (b.mode)
        {
        case BlockageMode::none:
            break;
        case BlockageMode::constant:
            std::fill(out.begin(), out.end(), b.loss_db);
            break;
        case BlockageMode::markov:
        {
            bool blocked = bernoulli(rng, b.block_probability);
            for (std::size_t t = 0; t < n_snapshots; ++t)
            {
                if (t > 0 && !bernoulli(rng, b.dwell_probability))
                    blocked = !blocked;
                out[t] = blocked ? b.loss_db : 0.0;
            }
            break;
        }
        }
        return out;
    }
} // namespace stfchan
