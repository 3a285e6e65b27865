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

#include <array>
#include <cstdint>
#include <vector>

namespace stfchan
{
    // Four angles in the order (Tx azimuth, Tx elevation, Rx azimuth, Rx elevation).
    struct AngleSet
    {
        double a_tx = 0.0, e_tx = 0.0, a_rx = 0.0, e_rx = 0.0;

        friend AngleSet operator+(const AngleSet &c, const AngleSet &o)
        {
            return {c.a_tx + o.a_tx, c.e_tx + o.e_tx, c.a_rx + o.a_rx, c.e_rx + o.e_rx};
        }
    };

    struct Ray
    {
        std::uint32_t id = 0;
        AngleSet offsets;                 // relative to the cluster center
        double total_distance = 0.0;      // at the reference element pair, birth snapshot
        std::array<double, 4> phases{};   // VV, VH, HV, HH in (0, 2pi]
        double xpr = 1.0;                 // linear cross-polarization power ratio
        double freq_exponent = 0.0;       // exponent of (f / f_c) in the ray power
        std::size_t first_subband = 0;    // alive on [first_subband, end_subband)
        std::size_t end_subband = 0;
    };

    struct Cluster
    {
        std::uint32_t id = 0;
        double center_distance = 0.0;
        AngleSet center;        // specular direction, wrapped
        double rc_tx = 0.5;     // cluster-to-Tx distance ratio
        double rc_rx = 0.5;
        bool multi_bounce = false;
        AngleSet sigmas;        // intra-cluster offset std per angle
        double shadowing_z_db = 0.0;
        std::vector<Ray> rays;
        std::uint32_t next_ray_id = 0;
    };

    struct ClusterSet
    {
        std::vector<Cluster> clusters;
        double los_distance = 0.0;
    };

    enum class RayCountMode
    {
        poisson,
        fixed,
    };

    // Laws used to draw clusters and their rays.
    struct ClusterLaw
    {
        double d_bar_n = 1.5; // mean NEXP inter-cluster excess distance [m]

        // Wrapped-Gaussian center angles: std around a mean drawn uniformly from the sector.
        double aoa_std_a = deg2rad(10.0), aoa_std_e = deg2rad(5.0);
        double aod_std_a = deg2rad(10.0), aod_std_e = deg2rad(5.0);
        double azimuth_sector_min = -kPi, azimuth_sector_max = kPi;
        double elevation_sector_min = -kPi / 4.0, elevation_sector_max = kPi / 4.0;

        double multi_bounce_probability = 0.0;
        double rc_min = 0.2, rc_max = 0.8;
        double z_sigma_db = 3.0; // per-cluster shadowing

        AngleSet ray_sigmas{deg2rad(2.8), deg2rad(1.4), deg2rad(2.8), deg2rad(1.4)};
        RayCountMode ray_count_mode = RayCountMode::poisson;
        double lambda_tilde = 50.0;
        std::size_t fixed_ray_count = 50;

        double xpr_mean_db = 10.0, xpr_std_db = 3.0;
        double freq_exponent_mean = 0.0, freq_exponent_std = 0.0;

        void validate() const
        {
            if (!(d_bar_n > 0.0))
                throw ConfigError("clusters.d_bar_n_m must be positive");
            if (aoa_std_a < 0.0 || aoa_std_e < 0.0 || aod_std_a < 0.0 || aod_std_e < 0.0)
                throw ConfigError("clusters: angle std must be non-negative");
            if (!(rc_min > 0.0 && rc_max < 1.0 && rc_min <= rc_max))
                throw ConfigError("clusters: rc range must satisfy 0 < rc_min <= rc_max < 1");
            if (multi_bounce_probability < 0.0 || multi_bounce_probability > 1.0)
                throw ConfigError("clusters.multi_bounce_probability must lie in [0, 1]");
            if (ray_sigmas.a_tx < 0.0 || ray_sigmas.e_tx < 0.0 || ray_sigmas.a_rx < 0.0 || ray_sigmas.e_rx < 0.0)
                throw ConfigError("rays: intra-cluster sigma must be non-negative");
            if (ray_count_mode == RayCountMode::poisson && !(lambda_tilde > 0.0))
                throw ConfigError("rays.lambda_tilde must be positive");
            if (ray_count_mode == RayCountMode::fixed && fixed_ray_count == 0)
                throw ConfigError("rays.fixed_count must be positive");
            if (z_sigma_db < 0.0 || xpr_std_db < 0.0 || freq_exponent_std < 0.0)
                throw ConfigError("clusters/rays: std parameters must be non-negative");
        }
    };

    // d_1 = los + dd_1, d_n = d_{n-1} + dd_n with dd ~ Exp(mean d_bar_n).
    inline std::vector<double> draw_cluster_distances(Rng &rng, std::size_t n_clusters, double los_distance,
                                                      double d_bar_n)
    {
        if (!(d_bar_n > 0.0))
            throw std::domain_error("draw_cluster_distances: d_bar_n must be positive");
        std::exponential_distribution<double> nexp(1.0 / d_bar_n);
        std::vector<double> d(n_clusters);
        double acc = los_distance;
        for (auto &x : d)
        {
            acc += nexp(rng);
            x = acc;
        }
        return d;
    }

    // std * Y + mean, Y ~ N(0,1), wrapped onto the global ranges.
    inline Angles draw_cluster_angles(Rng &rng, double std_e, double std_a, double mean_e, double mean_a)
    {
        double e = mean_e + std_e * std_normal(rng);
        double a = mean_a + std_a * std_normal(rng);
        wrap_direction(a, e);
        return {a, e};
    }

    inline std::size_t draw_ray_count(Rng &rng, const ClusterLaw &law)
    {
        if (law.ray_count_mode == RayCountMode::fixed)
            return law.fixed_ray_count;
        return std::max<std::size_t>(1, poisson(rng, law.lambda_tilde));
    }

    namespace detail
    {
        // Zero-mean Gaussian offset, redrawn until |x| < pi/2 so the path-length
        // geometry stays defined. With sub-degree to few-degree sigmas this never triggers.
        inline double draw_offset(Rng &rng, double sigma)
        {
            if (!(sigma > 0.0))
                return 0.0;
            for (;;)
            {
                const double x = sigma * std_normal(rng);
                if (std::abs(x) < kPi / 2.0)
                    return x;
            }
        }

        inline double leg_sum(double d, double s_rx, double r_rx, double c_rx, double s_tx, double r_tx, double c_tx)
        {
            return d * (std::abs(s_rx) * r_rx / c_rx + std::abs(s_tx) * r_tx / c_tx);
        }

        // Vertical/horizontal path-length decomposition of a ray.
        inline double ray_geometry_length(const Cluster &c, const AngleSet &off)
        {
            const double ce_r = std::cos(off.e_rx), ce_t = std::cos(off.e_tx);
            const double ca_r = std::cos(off.a_rx), ca_t = std::cos(off.a_tx);
            if (!(ce_r > 0.0 && ce_t > 0.0 && ca_r > 0.0 && ca_t > 0.0))
                throw GeometryError("ray_total_distance: angular offset must satisfy |offset| < pi/2");
            const double dv = leg_sum(c.center_distance, std::sin(c.center.a_rx), c.rc_rx, ce_r,
                                      std::sin(c.center.a_tx), c.rc_tx, ce_t);
            const double dh = leg_sum(c.center_distance, std::cos(c.center.a_rx), c.rc_rx, ca_r,
                                      std::cos(c.center.a_tx), c.rc_tx, ca_t);
            return std::hypot(dv, dh);
        }
    } // namespace detail

    // Geometric length of the ray with the given offsets: the two cluster legs
    // (r_c^R d, r_c^T d) projected on the vertical and horizontal axes, each stretched by
    // 1 / cos(offset). Leg projections enter by magnitude, so the length is
    // non-decreasing in every |offset|.
    inline double ray_geometric_length(const Cluster &c, const AngleSet &offsets)
    {
        return detail::ray_geometry_length(c, offsets);
    }

    // Total path length of a ray: the specular (zero-offset) ray travels exactly the cluster
    // center distance, other rays add the relative distance of their stretched legs.
    inline double ray_total_distance(const Cluster &c, const AngleSet &offsets)
    {
        const double rel = detail::ray_geometry_length(c, offsets) - detail::ray_geometry_length(c, AngleSet{});
        return c.center_distance + rel;
    }

    // Draws one ray of cluster c alive from sub-band `first_subband`.
    inline Ray draw_ray(Rng &rng, Cluster &c, const ClusterLaw &law, std::size_t first_subband)
    {
        Ray r;
        r.id = c.next_ray_id++;
        r.offsets.a_tx = detail::draw_offset(rng, c.sigmas.a_tx);
        r.offsets.e_tx = detail::draw_offset(rng, c.sigmas.e_tx);
        r.offsets.a_rx = detail::draw_offset(rng, c.sigmas.a_rx);
        r.offsets.e_rx = detail::draw_offset(rng, c.sigmas.e_rx);
        r.total_distance = ray_total_distance(c, r.offsets);
        for (auto &ph : r.phases)
            ph = uniform_phase(rng);
        r.xpr = std::pow(10.0, (law.xpr_mean_db + law.xpr_std_db * std_normal(rng)) / 10.0);
        r.freq_exponent = law.freq_exponent_mean + law.freq_exponent_std * std_normal(rng);
        r.first_subband = first_subband;
        r.end_subband = first_subband + 1;
        return r;
    }

    // Fills the cluster with n fresh rays drawn from its sigmas.
    inline void draw_ray_offsets(Rng &rng, Cluster &c, const ClusterLaw &law, std::size_t n_rays,
                                 std::size_t first_subband = 0)
    {
        c.rays.clear();
        c.rays.reserve(n_rays);
        for (std::size_t m = 0; m < n_rays; ++m)
            c.rays.push_back(draw_ray(rng, c, law, first_subband));
    }

    // Draws (rc_tx, rc_rx). Single bounce: rc_tx ~ U(rc_min, rc_max), rc_rx = 1 - rc_tx.
    // Multi bounce: both uniform on the same range, rejected until their sum is below 1.
    inline std::pair<double, double> draw_distance_ratios(Rng &rng, const ClusterLaw &law, bool multi_bounce)
    {
        std::uniform_real_distribution<double> u(law.rc_min, law.rc_max);
        if (!multi_bounce)
        {
            const double t = u(rng);
            return {t, 1.0 - t};
        }
        for (int guard = 0; guard < 100000; ++guard)
        {
            const double t = u(rng), r = u(rng);
            if (t + r < 1.0)
                return {t, r};
        }
        throw ConfigError("clusters: rc range admits no multi-bounce ratio pair with sum < 1");
    }

    // One cluster with its center distance already known.
    inline Cluster draw_cluster(Rng &rng, const ClusterLaw &law, std::uint32_t id, double center_distance,
                                std::size_t first_subband = 0)
    {
        Cluster c;
        c.id = id;
        c.center_distance = center_distance;
        std::uniform_real_distribution<double> az(law.azimuth_sector_min, law.azimuth_sector_max);
        std::uniform_real_distribution<double> el(law.elevation_sector_min, law.elevation_sector_max);
        const double psi_a_rx = az(rng), psi_e_rx = el(rng);
        const double psi_a_tx = az(rng), psi_e_tx = el(rng);
        const Angles rx = draw_cluster_angles(rng, law.aoa_std_e, law.aoa_std_a, psi_e_rx, psi_a_rx);
        const Angles tx = draw_cluster_angles(rng, law.aod_std_e, law.aod_std_a, psi_e_tx, psi_a_tx);
        c.center = {tx.azimuth, tx.elevation, rx.azimuth, rx.elevation};
        c.multi_bounce = bernoulli(rng, law.multi_bounce_probability);
        std::tie(c.rc_tx, c.rc_rx) = draw_distance_ratios(rng, law, c.multi_bounce);
        c.sigmas = law.ray_sigmas;
        c.shadowing_z_db = law.z_sigma_db * std_normal(rng);
        const std::size_t n_rays = draw_ray_count(rng, law);
        draw_ray_offsets(rng, c, law, n_rays, first_subband);
        return c;
    }

    // Initial cluster set at the reference element pair.
    inline ClusterSet draw_cluster_set(Rng &rng, const ClusterLaw &law, std::size_t n_clusters, double los_distance,
                                       std::uint32_t first_id = 0)
    {
        ClusterSet set;
        set.los_distance = los_distance;
        const auto d = draw_cluster_distances(rng, n_clusters, los_distance, law.d_bar_n);
        for (std::size_t n = 0; n < n_clusters; ++n)
            set.clusters.push_back(draw_cluster(rng, law, first_id + static_cast<std::uint32_t>(n), d[n]));
        return set;
    }
} // namespace stfchan
