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
#include "geometry.hpp"
#include "random.hpp"

#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

namespace stfchan
{
    // Birth-death rates and correlation factors. lambda_g and lambda_r are dimensionless: they
    // multiply the normalised displacement terms of the survival exponent.
    struct BirthDeathParams
    {
        double lambda_g = 0.8;
        double lambda_r = 0.04;
        double d_c_a = 10.0;  // array correlation factor [m]
        double d_c_s = 30.0;  // time-domain correlation factor [m]
        double b_c_f = 10e9;  // frequency correlation factor [Hz]
        double rho_s = 1.0;   // surface coefficient

        void validate() const
        {
            if (!(lambda_g > 0.0 && lambda_r > 0.0 && d_c_a > 0.0 && d_c_s > 0.0 && b_c_f > 0.0 && rho_s > 0.0))
                throw ConfigError("birth_death: all rates and correlation factors must be strictly positive");
        }

        double mean_cluster_count() const { return lambda_g / lambda_r; }
    };

    // ---- survival probabilities ---------------------------------------------------------------

    // One side (Tx or Rx) of the array-time survival probability:
    //   exp(-lambda_r * sqrt(e1^2 + e2^2 - 2 e1 e2 cos(alpha_a - beta_a)))
    // with e1 = delta_tilde cos(beta_e) / D_c^A and e2 = v dt / D_c^S.
    inline double survival_probability_side(const BirthDeathParams &bd, double delta_t, double delta_tilde,
                                            double beta_e_tilde, double alpha_a, double beta_a_tilde, double speed)
    {
        if (delta_t < 0.0 || delta_tilde < 0.0)
            throw std::domain_error("survival_probability_side: negative interval or spacing");
        const double e1 = delta_tilde * std::cos(beta_e_tilde) / bd.d_c_a;
        const double e2 = speed * delta_t / bd.d_c_s;
        const double sq = e1 * e1 + e2 * e2 - 2.0 * e1 * e2 * std::cos(alpha_a - beta_a_tilde);
        return std::exp(-bd.lambda_r * std::sqrt(std::max(sq, 0.0)));
    }

    inline double joint_survival(double p_tx, double p_rx) { return p_tx * p_rx; }

    // Mean number of clusters (or rays) born while the survival probability is p_remain.
    inline double expected_new_clusters(const BirthDeathParams &bd, double p_remain)
    {
        return bd.lambda_g / bd.lambda_r * (1.0 - p_remain);
    }

    // Ray survival between two adjacent sub-bands.
    inline double frequency_survival(const BirthDeathParams &bd, double b_sub)
    {
        if (b_sub < 0.0)
            throw std::domain_error("frequency_survival: negative sub-band width");
        return std::exp(-bd.lambda_r * bd.rho_s * b_sub / bd.b_c_f);
    }

    inline double expected_new_rays(const BirthDeathParams &bd, double p_remain)
    {
        return expected_new_clusters(bd, p_remain);
    }

    // ---- evolution along the array ------------------------------------------------------------

    // Step from an element to its predecessor in the array traversal. First-row elements step
    // along the columns, first-column elements along the rows, all others diagonally.
    struct ArrayStep
    {
        std::size_t predecessor = 0;
        double delta_tilde = 0.0;
        double beta_e_tilde = 0.0;
        double beta_a_tilde = 0.0;
    };

    inline ArrayStep array_step(const ArrayGeometry &a, std::size_t p)
    {
        if (p == 0 || p >= a.size())
            throw std::out_of_range("array_step: element has no predecessor");
        const std::size_t r = a.row(p), c = a.column(p);
        const PanelOrientation &o = a.orientation;
        if (r == 0)
            return {p - 1, a.delta_v, o.beta_v_e, o.beta_v_a};
        if (c == 0)
            return {p - a.m_v, a.delta_h, o.beta_h_e, o.beta_h_a};
        return {p - a.m_v - 1, std::hypot(a.delta_v, a.delta_h), 0.5 * (o.beta_h_e + o.beta_v_e),
                0.5 * (o.beta_h_a + o.beta_v_a)};
    }

    inline double array_survival(const BirthDeathParams &bd, const ArrayGeometry &a, std::size_t p,
                                 const MotionState &m)
    {
        const ArrayStep s = array_step(a, p);
        return survival_probability_side(bd, 0.0, s.delta_tilde, s.beta_e_tilde, m.alpha_a, s.beta_a_tilde, m.speed);
    }

    // Visibility of one cluster over the elements of an array: visible at `start`, then each
    // later element inherits visibility from its predecessor with the step survival probability.
    inline std::vector<std::uint8_t> draw_visibility_chain(Rng &rng, const BirthDeathParams &bd,
                                                           const ArrayGeometry &a, const MotionState &m,
                                                           std::size_t start = 0)
    {
        std::vector<std::uint8_t> vis(a.size(), 0);
        if (start >= a.size())
            throw std::out_of_range("draw_visibility_chain: start element out of range");
        vis[start] = 1;
        for (std::size_t p = start + 1; p < a.size(); ++p)
        {
            const ArrayStep s = array_step(a, p);
            if (vis[s.predecessor] && bernoulli(rng, array_survival(bd, a, p, m)))
                vis[p] = 1;
        }
        return vis;
    }

    // Clusters born while stepping along the array: element index per birth.
    inline std::vector<std::size_t> draw_array_births(Rng &rng, const BirthDeathParams &bd, const ArrayGeometry &a,
                                                      const MotionState &m)
    {
        std::vector<std::size_t> births;
        for (std::size_t p = 1; p < a.size(); ++p)
        {
            const auto k = poisson(rng, expected_new_clusters(bd, array_survival(bd, a, p, m)));
            births.insert(births.end(), k, p);
        }
        return births;
    }

    // ---- evolution along frequency ------------------------------------------------------------

    // Ray birth-death over n_sub sub-bands: each ray alive at sub-band i-1 survives to i with
    // the frequency survival probability, and Poisson-many fresh rays are born at each i.
    // Cluster geometry is untouched; only ray membership changes.
    inline void evolve_rays_over_frequency(Rng &rng, Cluster &c, const ClusterLaw &law, const BirthDeathParams &bd,
                                           std::size_t n_sub, double b_sub)
    {
        if (n_sub == 0)
            throw std::domain_error("evolve_rays_over_frequency: need at least one sub-band");
        const double p_remain = frequency_survival(bd, b_sub);
        const double mean_births = expected_new_rays(bd, p_remain);
        for (auto &r : c.rays)
            r.end_subband = r.first_subband + 1;
        for (std::size_t i = 1; i < n_sub; ++i)
        {
            for (auto &r : c.rays)
                if (r.end_subband == i && bernoulli(rng, p_remain))
                    r.end_subband = i + 1;
            const auto k = poisson(rng, mean_births);
            for (std::uint64_t b = 0; b < k; ++b)
                c.rays.push_back(draw_ray(rng, c, law, i));
        }
    }

    inline bool ray_alive_at(const Ray &r, std::size_t subband)
    {
        return subband >= r.first_subband && subband < r.end_subband;
    }

    // ---- mirror-point kinematics --------------------------------------------------------------

    // Per-ray path vectors. `tx` points from the Tx element along the departure direction to
    // the mirror image of the Rx, `rx` points from the Rx element along the arrival direction to
    // the mirror image of the Tx. Both have the length of the total path.
    struct MirrorVectors
    {
        Vec3 tx;
        Vec3 rx;

        double distance() const { return norm(rx); }
    };

    inline MirrorVectors initial_mirror(const Cluster &c, const Ray &r)
    {
        const AngleSet a = c.center + r.offsets;
        return {r.total_distance * direction(a.a_tx, a.e_tx), r.total_distance * direction(a.a_rx, a.e_rx)};
    }

    // Two-step update. The Rx is displaced first against the fixed Tx image, giving a
    // temporary path length; the Tx is then displaced against the Rx image at that length.
    // Arrival and departure directions are re-derived from the updated vectors and both
    // vectors end with the same length.
    inline MirrorVectors evolve_space_time(const MirrorVectors &m, const Vec3 &rx_displacement,
                                           const Vec3 &tx_displacement)
    {
        const double d0 = norm(m.tx);
        if (!(d0 > 0.0))
            throw GeometryError("evolve_space_time: zero-length mirror vector");
        const Vec3 r = m.rx - rx_displacement;
        const double d_tmp = norm(r);
        const Vec3 s = (d_tmp / d0) * m.tx - tx_displacement;
        const double d = norm(s);
        if (!(d_tmp > 0.0) || !(d > 0.0))
            throw GeometryError("evolve_space_time: displacement collapses the path onto a mirror point");
        return {s, (d / d_tmp) * r};
    }

    // First-order prediction of the path length after displacing both ends.
    inline double first_order_distance(const MirrorVectors &m, const Vec3 &rx_displacement, const Vec3 &tx_displacement)
    {
        const double d = norm(m.rx);
        return d - dot(m.rx, rx_displacement) / d - dot(m.tx, tx_displacement) / norm(m.tx);
    }

    struct DopplerPair
    {
        double nu_tx = 0.0;
        double nu_rx = 0.0;
    };

    // nu = <d, v> / (|d| lambda) per side.
    inline DopplerPair doppler_nlos(const MirrorVectors &m, const Vec3 &v_tx, const Vec3 &v_rx, double f_hz)
    {
        const double ntx = norm(m.tx), nrx = norm(m.rx);
        if (!(ntx > 0.0) || !(nrx > 0.0))
            throw GeometryError("doppler_nlos: zero-length path vector");
        const double lam = wavelength(f_hz);
        return {dot(m.tx, v_tx) / (ntx * lam), dot(m.rx, v_rx) / (nrx * lam)};
    }

    // ---- ray powers ---------------------------------------------------------------------------

    struct PowerParams
    {
        double delay_spread = 5e-9; // DS [s]
        double r_tau = 2.3;
        double xi_mu = 0.0;         // local mean of the spatial lognormal (log10 units)
        double xi_sigma = 0.05;     // std of the spatial lognormal (log10 units)
        std::size_t n_sinusoids = 10;
        double spatial_freq_max = 2.0 * kPi / 0.05; // rad/m

        void validate() const
        {
            if (!(delay_spread > 0.0))
                throw ConfigError("power.delay_spread_s must be positive");
            if (!(r_tau > 1.0))
                throw ConfigError("power.r_tau must be greater than 1");
            if (xi_sigma < 0.0 || n_sinusoids == 0 || spatial_freq_max < 0.0)
                throw ConfigError("power: invalid spatial lognormal parameters");
        }
    };

    // 2D spatial lognormal xi(p,q) = 10^(mu + sigma s(p,q)) with the sum-of-sinusoids process
    // s(p,q) = sum_k c_k cos(f_q,k delta_q + f_p,k delta_p + theta_k).
    struct SpatialLognormal
    {
        double mu = 0.0;
        double sigma = 0.0;
        std::vector<double> c, f_tx, f_rx, theta;

        static SpatialLognormal draw(Rng &rng, const PowerParams &pp)
        {
            SpatialLognormal s;
            s.mu = pp.xi_mu;
            s.sigma = pp.xi_sigma;
            const std::size_t k = pp.n_sinusoids;
            const double amp = std::sqrt(2.0 / static_cast<double>(k));
            std::uniform_real_distribution<double> uf(0.0, pp.spatial_freq_max);
            for (std::size_t i = 0; i < k; ++i)
            {
                s.c.push_back(amp);
                s.f_tx.push_back(uf(rng));
                s.f_rx.push_back(uf(rng));
                s.theta.push_back(uniform_phase(rng));
            }
            return s;
        }

        double process(double delta_tx, double delta_rx) const
        {
            double acc = 0.0;
            for (std::size_t k = 0; k < c.size(); ++k)
                acc += c[k] * std::cos(f_rx[k] * delta_rx + f_tx[k] * delta_tx + theta[k]);
            return acc;
        }

        double amplitude_bound() const
        {
            double b = 0.0;
            for (double ck : c)
                b += std::abs(ck);
            return b;
        }

        double xi(double delta_tx, double delta_rx) const
        {
            return std::pow(10.0, mu + sigma * process(delta_tx, delta_rx));
        }
    };

    // Pre-normalisation ray power:
    //   exp(-tau (r_tau - 1) / (r_tau DS)) 10^(-Z/10) xi (f / f_c)^gamma
    inline double ray_power(const PowerParams &pp, double excess_delay, double z_db, double xi, double f_hz,
                            double f_c_hz, double freq_exponent)
    {
        if (!(pp.r_tau > 1.0))
            throw ConfigError("ray_power: r_tau must be greater than 1");
        if (!(pp.delay_spread > 0.0))
            throw ConfigError("ray_power: delay spread must be positive");
        return std::exp(-excess_delay * (pp.r_tau - 1.0) / (pp.r_tau * pp.delay_spread)) *
               std::pow(10.0, -z_db / 10.0) * xi * std::pow(f_hz / f_c_hz, freq_exponent);
    }

    // In-place normalisation to unit sum.
    inline void normalize_powers(std::span<double> powers)
    {
        const double total = std::accumulate(powers.begin(), powers.end(), 0.0);
        if (!(total > 0.0) || !std::isfinite(total))
            throw DegenerateChannelError("normalize_powers: no ray carries positive power");
        for (auto &p : powers)
            p /= total;
    }
} // namespace stfchan
