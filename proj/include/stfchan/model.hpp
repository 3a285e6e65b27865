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

#include "clusters.hpp"
#include "common.hpp"
#include "evolution.hpp"
#include "geometry.hpp"
#include "largescale.hpp"
#include "random.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

namespace stfchan
{
    // Band [f_start, f_stop) split into n_sub equal sub-bands.
    struct BandPlan
    {
        double f_start = 300e9;
        double f_stop = 350e9;
        std::size_t n_sub = 1;
        std::optional<double> f_c; // unset: band midpoint

        double b_sub() const { return (f_stop - f_start) / static_cast<double>(n_sub); }
        double center(std::size_t i) const { return f_start + (static_cast<double>(i) + 0.5) * b_sub(); }
        double lower_edge(std::size_t i) const { return f_start + static_cast<double>(i) * b_sub(); }
        double system_center() const { return f_c ? *f_c : 0.5 * (f_start + f_stop); }

        // Index of the sub-band containing f; each sub-band is half-open [lower, upper).
        std::size_t subband_of(double f) const
        {
            if (!(f >= f_start && f < f_stop))
                throw std::out_of_range("BandPlan: frequency outside the band");
            const auto i = static_cast<std::size_t>((f - f_start) / b_sub());
            return std::min(i, n_sub - 1);
        }

        void validate() const
        {
            if (!(f_start > 0.0))
                throw ConfigError("band.f_start_hz must be positive");
            if (!(f_stop > f_start))
                throw ConfigError("band.f_stop_hz must exceed band.f_start_hz");
            if (n_sub == 0)
                throw ConfigError("band.n_subbands must be positive");
            if (f_c && !(*f_c >= f_start && *f_c <= f_stop))
                throw ConfigError("band.f_c_hz must lie within [f_start_hz, f_stop_hz]");
        }
    };

    struct TimeGrid
    {
        std::size_t n_snapshots = 1;
        double interval_s = 1e-3;

        double time_of(std::size_t t) const { return static_cast<double>(t) * interval_s; }

        void validate() const
        {
            if (n_snapshots == 0)
                throw ConfigError("time.n_snapshots must be positive");
            if (!(interval_s > 0.0))
                throw ConfigError("time.interval_s must be positive");
        }
    };

    enum class PatternKind
    {
        dipole,
        isotropic,
    };

    enum class LosPhaseMode
    {
        random,
        distance_locked,
    };

    struct ModelParams
    {
        ArrayGeometry tx_array, rx_array;
        MotionState tx_motion, rx_motion;

        // Rx reference element relative to the Tx reference element at t = 0.
        double los_distance = 3.0;
        double los_azimuth = 0.0;
        double los_elevation = 0.0;

        bool los_enabled = true;
        double k_factor = 1.0; // linear
        LosPhaseMode los_phase = LosPhaseMode::random;
        PatternKind tx_pattern = PatternKind::dipole;
        PatternKind rx_pattern = PatternKind::dipole;

        BandPlan band;
        TimeGrid time;

        ClusterLaw clusters;
        std::optional<std::size_t> initial_cluster_count; // unset: Poisson(lambda_g / lambda_r)
        BirthDeathParams birth_death;
        bool time_birth_death = true;
        bool array_birth_death = true;
        bool frequency_birth_death = true;

        PowerParams power;
        LargeScaleParams large_scale;

        bool subarray_enabled = true;
        std::optional<double> subarray_min_distance; // unset: LOS distance

        Vec3 rx_origin() const { return los_distance * direction(los_azimuth, los_elevation); }

        void validate() const
        {
            tx_array.validate();
            rx_array.validate();
            if (tx_motion.speed < 0.0 || rx_motion.speed < 0.0)
                throw ConfigError("motion.speed_mps must be non-negative");
            if (!(los_distance > 0.0))
                throw ConfigError("scenario.los_distance_m must be positive");
            if (k_factor < 0.0)
                throw ConfigError("los.k_factor must be non-negative");
            band.validate();
            time.validate();
            clusters.validate();
            birth_death.validate();
            power.validate();
            large_scale.validate();
            if (subarray_min_distance && !(*subarray_min_distance > 0.0))
                throw ConfigError("subarray.min_distance_m must be positive");
        }
    };

    // One cluster followed through the snapshots of a realization.
    struct ClusterTrack
    {
        Cluster cluster;
        std::size_t birth_snapshot = 0;
        std::size_t death_snapshot = 0; // first snapshot where it is gone
        std::vector<std::uint8_t> vis_tx, vis_rx;
        SpatialLognormal xi;
        std::vector<MirrorVectors> states; // [(t - birth) * n_rays + ray], reference element pair

        bool alive_at(std::size_t t) const { return t >= birth_snapshot && t < death_snapshot; }
        bool visible(std::size_t p, std::size_t q) const { return vis_tx[p] && vis_rx[q]; }
        const MirrorVectors &state(std::size_t t, std::size_t ray) const
        {
            return states[(t - birth_snapshot) * cluster.rays.size() + ray];
        }
    };

    struct Realization
    {
        std::shared_ptr<const ModelParams> params;
        std::uint64_t master_seed = 0;
        std::uint64_t index = 0;

        std::vector<ClusterTrack> tracks;
        std::vector<SubArray> tx_blocks, rx_blocks;
        std::vector<std::size_t> tx_block_of, rx_block_of;
        std::vector<Vec3> tx_positions, rx_positions; // element offsets

        std::vector<double> shadowing_db; // per sub-band
        std::vector<double> blockage_db;  // [i * n_snapshots + t]
        double los_theta = 0.0;

        // Clusters alive at snapshot t and visible at the reference element pair.
        std::size_t reference_cluster_count(std::size_t t) const
        {
            std::size_t n = 0;
            for (const auto &tr : tracks)
                if (tr.alive_at(t) && tr.visible(0, 0))
                    ++n;
            return n;
        }

        Vec3 tx_location(std::size_t p, std::size_t t) const
        {
            return params->time.time_of(t) * velocity_vector(params->tx_motion) + tx_positions[p];
        }

        Vec3 rx_location(std::size_t q, std::size_t t) const
        {
            return params->rx_origin() + params->time.time_of(t) * velocity_vector(params->rx_motion) +
                   rx_positions[q];
        }

        double los_distance(std::size_t p, std::size_t q, std::size_t t) const
        {
            const double d = norm(rx_location(q, t) - tx_location(p, t));
            if (!(d > 0.0))
                throw GeometryError("los_distance: Tx and Rx elements coincide");
            return d;
        }
    };

    namespace detail
    {
        inline void init_frequency_chain(Rng &rng, Cluster &c, const ModelParams &mp)
        {
            if (mp.frequency_birth_death)
                evolve_rays_over_frequency(rng, c, mp.clusters, mp.birth_death, mp.band.n_sub, mp.band.b_sub());
            else
                for (auto &r : c.rays)
                    r.end_subband = mp.band.n_sub;
        }

        inline std::vector<MirrorVectors> initial_states(const Cluster &c)
        {
            std::vector<MirrorVectors> s;
            s.reserve(c.rays.size());
            for (const auto &r : c.rays)
                s.push_back(initial_mirror(c, r));
            return s;
        }

        inline ClusterTrack make_track(Rng &rng, const ModelParams &mp, Cluster c, std::size_t birth,
                                       std::size_t tx_start, std::size_t rx_start)
        {
            ClusterTrack tr;
            init_frequency_chain(rng, c, mp);
            if (mp.array_birth_death)
            {
                tr.vis_tx = draw_visibility_chain(rng, mp.birth_death, mp.tx_array, mp.tx_motion, tx_start);
                tr.vis_rx = draw_visibility_chain(rng, mp.birth_death, mp.rx_array, mp.rx_motion, rx_start);
            }
            else
            {
                tr.vis_tx.assign(mp.tx_array.size(), 1);
                tr.vis_rx.assign(mp.rx_array.size(), 1);
            }
            tr.xi = SpatialLognormal::draw(rng, mp.power);
            tr.cluster = std::move(c);
            tr.birth_snapshot = birth;
            tr.death_snapshot = mp.time.n_snapshots;
            tr.states = initial_states(tr.cluster);
            return tr;
        }

        inline Cluster fresh_cluster(Rng &rng, const ModelParams &mp, std::uint32_t id, double los_distance)
        {
            std::exponential_distribution<double> nexp(1.0 / mp.clusters.d_bar_n);
            return draw_cluster(rng, mp.clusters, id, los_distance + nexp(rng));
        }
    } // namespace detail

    // Time-axis survival probability of a cluster over one snapshot interval.
    inline double snapshot_survival(const ModelParams &mp)
    {
        const double dt = mp.time.interval_s;
        const auto side = [&](const MotionState &m) {
            return survival_probability_side(mp.birth_death, dt, 0.0, 0.0, m.alpha_a, 0.0, m.speed);
        };
        return joint_survival(side(mp.tx_motion), side(mp.rx_motion));
    }

    // Generates one realization: initial clusters, array and frequency birth-death, and the
    // time evolution of the reference element pair over every snapshot.
    inline Realization generate_realization(std::shared_ptr<const ModelParams> params, std::uint64_t master_seed,
                                            std::uint64_t index)
    {
        const ModelParams &mp = *params;
        mp.validate();
        Realization real;
        real.params = params;
        real.master_seed = master_seed;
        real.index = index;

        Rng rng_c = make_stream(master_seed, index, Stream::clusters);
        Rng rng_a = make_stream(master_seed, index, Stream::array_evolution);
        Rng rng_f = make_stream(master_seed, index, Stream::frequency_evolution);
        Rng rng_t = make_stream(master_seed, index, Stream::time_evolution);
        Rng rng_l = make_stream(master_seed, index, Stream::large_scale);
        Rng rng_p = make_stream(master_seed, index, Stream::power);
        Rng rng_ph = make_stream(master_seed, index, Stream::phases);

        for (std::size_t p = 0; p < mp.tx_array.size(); ++p)
            real.tx_positions.push_back(element_position(mp.tx_array, p));
        for (std::size_t q = 0; q < mp.rx_array.size(); ++q)
            real.rx_positions.push_back(element_position(mp.rx_array, q));

        // Sub-arrays sized for the highest frequency of the band.
        const double min_dist = mp.subarray_min_distance.value_or(mp.los_distance);
        if (mp.subarray_enabled)
        {
            real.tx_blocks = subarray_partition(mp.tx_array, mp.band.f_stop, min_dist);
            real.rx_blocks = subarray_partition(mp.rx_array, mp.band.f_stop, min_dist);
        }
        else
        {
            real.tx_blocks = subarray_partition(mp.tx_array, mp.band.f_stop, std::numeric_limits<double>::infinity());
            real.rx_blocks = subarray_partition(mp.rx_array, mp.band.f_stop, std::numeric_limits<double>::infinity());
        }
        real.tx_block_of = block_index_of_elements(mp.tx_array, real.tx_blocks);
        real.rx_block_of = block_index_of_elements(mp.rx_array, real.rx_blocks);

        // Initial cluster population at the reference element pair.
        const std::size_t n0 = mp.initial_cluster_count
                                   ? *mp.initial_cluster_count
                                   : std::max<std::size_t>(1, poisson(rng_c, mp.birth_death.mean_cluster_count()));
        ClusterSet set = draw_cluster_set(rng_c, mp.clusters, n0, mp.los_distance);
        std::uint32_t next_id = static_cast<std::uint32_t>(n0);
        for (auto &c : set.clusters)
        {
            ClusterTrack tr;
            detail::init_frequency_chain(rng_f, c, mp);
            if (mp.array_birth_death)
            {
                tr.vis_tx = draw_visibility_chain(rng_a, mp.birth_death, mp.tx_array, mp.tx_motion, 0);
                tr.vis_rx = draw_visibility_chain(rng_a, mp.birth_death, mp.rx_array, mp.rx_motion, 0);
            }
            else
            {
                tr.vis_tx.assign(mp.tx_array.size(), 1);
                tr.vis_rx.assign(mp.rx_array.size(), 1);
            }
            tr.xi = SpatialLognormal::draw(rng_p, mp.power);
            tr.cluster = std::move(c);
            tr.death_snapshot = mp.time.n_snapshots;
            tr.states = detail::initial_states(tr.cluster);
            real.tracks.push_back(std::move(tr));
        }

        // Clusters born along the arrays; they are visible from the birth element onwards on
        // that side and from the reference element on the other side.
        if (mp.array_birth_death)
        {
            for (std::size_t p : draw_array_births(rng_a, mp.birth_death, mp.tx_array, mp.tx_motion))
            {
                Cluster c = detail::fresh_cluster(rng_a, mp, next_id++, mp.los_distance);
                real.tracks.push_back(detail::make_track(rng_a, mp, std::move(c), 0, p, 0));
            }
            for (std::size_t q : draw_array_births(rng_a, mp.birth_death, mp.rx_array, mp.rx_motion))
            {
                Cluster c = detail::fresh_cluster(rng_a, mp, next_id++, mp.los_distance);
                real.tracks.push_back(detail::make_track(rng_a, mp, std::move(c), 0, 0, q));
            }
        }

        // Time evolution: survival test, mirror update, births.
        const double p_remain = snapshot_survival(mp);
        const double dt = mp.time.interval_s;
        const Vec3 rx_step = dt * velocity_vector(mp.rx_motion);
        const Vec3 tx_step = dt * velocity_vector(mp.tx_motion);
        for (std::size_t t = 1; t < mp.time.n_snapshots; ++t)
        {
            for (auto &tr : real.tracks)
            {
                if (!tr.alive_at(t))
                    continue;
                if (mp.time_birth_death && !bernoulli(rng_t, p_remain))
                {
                    tr.death_snapshot = t;
                    continue;
                }
                const std::size_t n = tr.cluster.rays.size();
                const std::size_t base = (t - 1 - tr.birth_snapshot) * n;
                for (std::size_t m = 0; m < n; ++m)
                    tr.states.push_back(evolve_space_time(tr.states[base + m], rx_step, tx_step));
            }
            if (mp.time_birth_death)
            {
                const auto births = poisson(rng_t, expected_new_clusters(mp.birth_death, p_remain));
                const double d_los = real.los_distance(0, 0, t);
                for (std::uint64_t b = 0; b < births; ++b)
                {
                    Cluster c = detail::fresh_cluster(rng_t, mp, next_id++, d_los);
                    real.tracks.push_back(detail::make_track(rng_t, mp, std::move(c), t, 0, 0));
                }
            }
        }

        // Large-scale terms.
        const std::size_t nf = mp.band.n_sub, nt = mp.time.n_snapshots;
        real.shadowing_db.assign(nf, 0.0);
        real.blockage_db.assign(nf * nt, 0.0);
        const double sh = shadowing_db(rng_l, mp.large_scale.sh_sigma_db);
        const auto bl = draw_blockage_db(rng_l, mp.large_scale.blockage, nt);
        for (std::size_t i = 0; i < nf; ++i)
        {
            const bool redraw = mp.large_scale.redraw_per_subband && i > 0;
            real.shadowing_db[i] = redraw ? shadowing_db(rng_l, mp.large_scale.sh_sigma_db) : sh;
            const auto bli = redraw ? draw_blockage_db(rng_l, mp.large_scale.blockage, nt) : bl;
            std::copy(bli.begin(), bli.end(), real.blockage_db.begin() + static_cast<std::ptrdiff_t>(i * nt));
        }

        real.los_theta = uniform_phase(rng_ph);
        return real;
    }

    inline Realization generate_realization(const ModelParams &params, std::uint64_t master_seed, std::uint64_t index)
    {
        return generate_realization(std::make_shared<const ModelParams>(params), master_seed, index);
    }
} // namespace stfchan
