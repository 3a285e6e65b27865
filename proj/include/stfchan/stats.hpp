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

#include "cir.hpp"
#include "common.hpp"
#include "geometry.hpp"
#include "model.hpp"

#include <algorithm>
#include <cstring>
#include <functional>
#include <map>
#include <span>
#include <vector>

namespace stfchan
{
    // ---- correlation functions ----------------------------------------------------------------

    // Normalised ensemble correlation E[a b*] / sqrt(E|a|^2 E|b|^2).
    inline Complex normalized_correlation(std::span<const Complex> a, std::span<const Complex> b)
    {
        if (a.empty() || a.size() != b.size())
            throw EstimatorError("normalized_correlation: need two equally sized, non-empty ensembles");
        Complex cross = 0.0;
        double pa = 0.0, pb = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k)
        {
            cross += a[k] * std::conj(b[k]);
            pa += std::norm(a[k]);
            pb += std::norm(b[k]);
        }
        if (!(pa > 0.0) || !(pb > 0.0))
            throw EstimatorError("normalized_correlation: zero-power ensemble");
        return cross / std::sqrt(pa * pb);
    }

    // Small-scale transfer function of element pair (p, q) at snapshot t and absolute
    // frequency f, taken from the sub-band that contains f.
    inline Complex channel_response(const Realization &real, std::size_t p, std::size_t q, std::size_t t, double f)
    {
        const BandPlan &band = real.params->band;
        const std::size_t i = band.subband_of(f);
        return transfer_function(assemble_cir(real, p, q, i, t), f - band.center(i));
    }

    struct ChannelPoint
    {
        std::size_t p = 0, q = 0, t = 0;
        double f = 0.0; // absolute frequency [Hz]
    };

    // Space-time-frequency correlation between two points of the channel over an ensemble.
    inline Complex stfcf(std::span<const Realization> ensemble, const ChannelPoint &a, const ChannelPoint &b)
    {
        if (ensemble.size() < 2)
            throw EstimatorError("stfcf: need at least two realizations");
        std::vector<Complex> ha, hb;
        for (const auto &r : ensemble)
        {
            ha.push_back(channel_response(r, a.p, a.q, a.t, a.f));
            hb.push_back(channel_response(r, b.p, b.q, b.t, b.f));
        }
        return normalized_correlation(ha, hb);
    }

    // Temporal ACF at lags 0..n_lags-1 snapshots.
    inline std::vector<Complex> acf(std::span<const Realization> ensemble, std::size_t p, std::size_t q, std::size_t t0,
                                    double f, std::size_t n_lags)
    {
        if (ensemble.size() < 2)
            throw EstimatorError("acf: need at least two realizations");
        const std::size_t nt = ensemble.front().params->time.n_snapshots;
        if (t0 + n_lags > nt)
            throw EstimatorError("acf: lag window exceeds the snapshot grid");
        std::vector<std::vector<Complex>> h(n_lags);
        for (const auto &r : ensemble)
            for (std::size_t k = 0; k < n_lags; ++k)
                h[k].push_back(channel_response(r, p, q, t0 + k, f));
        std::vector<Complex> out;
        for (std::size_t k = 0; k < n_lags; ++k)
            out.push_back(normalized_correlation(h[0], h[k]));
        return out;
    }

    // Spatial cross-correlation along the Tx array: element p0 against p0 + dp for each offset.
    inline std::vector<Complex> sccf_tx(std::span<const Realization> ensemble, std::size_t p0, std::size_t q,
                                        std::size_t t, double f, const std::vector<std::size_t> &offsets)
    {
        std::vector<Complex> out;
        for (std::size_t dp : offsets)
            out.push_back(stfcf(ensemble, {p0, q, t, f}, {p0 + dp, q, t, f}));
        return out;
    }

    inline std::vector<Complex> fcf(std::span<const Realization> ensemble, std::size_t p, std::size_t q, std::size_t t,
                                    double f0, const std::vector<double> &df)
    {
        std::vector<Complex> out;
        for (double d : df)
            out.push_back(stfcf(ensemble, {p, q, t, f0}, {p, q, t, f0 + d}));
        return out;
    }

    // Conditional closed-form ACF of a single-cluster channel seen by a moving Rx:
    //   K/(K+1) exp(j 2 pi (d_LOS(t+dt) - d_LOS(t)) / lambda)
    //   + P_remain(dt) / (K+1) E_offsets[exp(-j 2 pi nu(offset) dt)]
    // with the expectation over Gaussian Rx ray offsets (Simpson rule over +-6 sigma).
    struct ClosedFormAcfInput
    {
        double k_factor = 0.0;
        bool los_enabled = false;
        Vec3 los_vector;      // Tx -> Rx at t
        Vec3 rx_velocity, tx_velocity;
        double center_a_rx = 0.0, center_e_rx = 0.0;
        double sigma_a_rx = 0.0, sigma_e_rx = 0.0;
        double f = 300e9;
        double survival_per_second_exponent = 0.0; // P_remain(dt) = exp(-x dt)
    };

    inline Complex closed_form_acf(const ClosedFormAcfInput &in, double dt)
    {
        const double lam = wavelength(in.f);
        const auto [w_los, w_nlos] = k_factor_weights(in.k_factor, in.los_enabled);
        Complex los = 0.0;
        if (w_los > 0.0)
        {
            const double d0 = norm(in.los_vector);
            const double d1 = norm(in.los_vector + dt * (in.rx_velocity - in.tx_velocity));
            los = std::polar(1.0, kTwoPi * (d1 - d0) / lam);
        }
        // Simpson integration over the two Rx offsets.
        constexpr int n = 120; // even
        const auto nodes = [&](double sigma) {
            std::vector<std::pair<double, double>> w; // (offset, weight)
            if (!(sigma > 0.0))
                return std::vector<std::pair<double, double>>{{0.0, 1.0}};
            const double h = 12.0 * sigma / n;
            double total = 0.0;
            for (int k = 0; k <= n; ++k)
            {
                const double x = -6.0 * sigma + k * h;
                const double s = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
                const double pdf = std::exp(-0.5 * x * x / (sigma * sigma));
                w.emplace_back(x, s * pdf);
                total += s * pdf;
            }
            for (auto &e : w)
                e.second /= total;
            return w;
        };
        Complex nlos = 0.0;
        for (const auto &[xa, wa] : nodes(in.sigma_a_rx))
            for (const auto &[xe, we] : nodes(in.sigma_e_rx))
            {
                const Vec3 u = direction(in.center_a_rx + xa, in.center_e_rx + xe);
                const double nu = dot(u, in.rx_velocity) / lam;
                nlos += wa * we * std::polar(1.0, -kTwoPi * nu * dt);
            }
        nlos *= std::exp(-in.survival_per_second_exponent * dt);
        return w_los * w_los * los + w_nlos * w_nlos * nlos;
    }

    // ---- delay domain -------------------------------------------------------------------------

    struct DelayPsd
    {
        std::vector<std::pair<double, double>> taps; // (delay s, power), sorted by delay
        std::size_t snapshot = 0, subband = 0, p = 0, q = 0;

        double total_power() const
        {
            double s = 0.0;
            for (const auto &t : taps)
                s += t.second;
            return s;
        }
    };

    inline DelayPsd delay_psd(const std::vector<Tap> &cir, bool include_los = true)
    {
        DelayPsd psd;
        for (const auto &t : cir)
            if (include_los || !t.is_los())
                psd.taps.emplace_back(t.delay, t.power());
        std::sort(psd.taps.begin(), psd.taps.end());
        return psd;
    }

    inline double mean_delay(const DelayPsd &psd)
    {
        const double pt = psd.total_power();
        if (!(pt > 0.0))
            throw EstimatorError("mean_delay: zero total power");
        double m = 0.0;
        for (const auto &[tau, p] : psd.taps)
            m += tau * p;
        return m / pt;
    }

    inline double rms_delay_spread(const DelayPsd &psd)
    {
        const double pt = psd.total_power();
        if (!(pt > 0.0))
            throw EstimatorError("rms_delay_spread: zero total power");
        const double mu = mean_delay(psd);
        double v = 0.0;
        for (const auto &[tau, p] : psd.taps)
            v += (tau - mu) * (tau - mu) * p;
        return std::sqrt(std::max(v / pt, 0.0));
    }

    // ---- Doppler domain -----------------------------------------------------------------------

    struct DopplerPsd
    {
        std::vector<double> frequency; // Hz
        std::vector<double> power;
    };

    // DFT of the two-sided ACF r[-L+1..L-1] (r[-k] = conj r[k]) with kernel exp(+j 2 pi nu k dt),
    // so a channel with ACF exp(-j 2 pi nu0 dt) peaks at +nu0. Sum(power) / N = r[0].
    inline DopplerPsd doppler_psd(std::span<const Complex> acf_one_sided, double dt)
    {
        if (acf_one_sided.empty() || !(dt > 0.0))
            throw EstimatorError("doppler_psd: need samples and a positive lag step");
        const auto l = static_cast<long>(acf_one_sided.size());
        const long n = 2 * l - 1;
        DopplerPsd out;
        for (long m = -(l - 1); m <= l - 1; ++m)
        {
            const double nu = static_cast<double>(m) / (static_cast<double>(n) * dt);
            Complex s = 0.0;
            for (long k = -(l - 1); k <= l - 1; ++k)
            {
                const Complex r = k >= 0 ? acf_one_sided[static_cast<std::size_t>(k)]
                                         : std::conj(acf_one_sided[static_cast<std::size_t>(-k)]);
                s += r * std::polar(1.0, kTwoPi * static_cast<double>(m * k) / static_cast<double>(n));
            }
            out.frequency.push_back(nu);
            out.power.push_back(s.real());
        }
        return out;
    }

    // ---- angular domain -----------------------------------------------------------------------

    enum class Side
    {
        tx,
        rx,
    };

    struct AngularBin
    {
        double elevation = 0.0; // bin center [rad]
        double azimuth = 0.0;
        double power = 0.0;
    };

    // K-weighted LOS delta plus normalised ray powers binned on an (elevation, azimuth) grid.
    inline std::vector<AngularBin> angular_psd(const Realization &real, const PathSet &ps, Side side,
                                               double bin_rad = deg2rad(1.0))
    {
        if (!(bin_rad > 0.0))
            throw EstimatorError("angular_psd: bin width must be positive");
        const ModelParams &mp = *real.params;
        const auto [w_los, w_nlos] = k_factor_weights(mp.k_factor, mp.los_enabled);
        std::map<std::pair<long, long>, double> bins;
        const auto add = [&](const Vec3 &v, double pw) {
            const Angles a = angles_of(v);
            bins[{std::lround(a.elevation / bin_rad), std::lround(a.azimuth / bin_rad)}] += pw;
        };
        if (w_los > 0.0)
            add(side == Side::tx ? ps.los_vector : -ps.los_vector, w_los * w_los);
        for (const auto &rp : ps.rays)
            add(side == Side::tx ? rp.vectors.tx : rp.vectors.rx, w_nlos * w_nlos * rp.power);
        std::vector<AngularBin> out;
        for (const auto &[k, pw] : bins)
            out.push_back({static_cast<double>(k.first) * bin_rad, static_cast<double>(k.second) * bin_rad, pw});
        return out;
    }

    // sqrt(sum P x^2 / sum P) over the ray offsets x of one cluster.
    inline double cluster_angle_spread(std::span<const double> offsets, std::span<const double> powers)
    {
        if (offsets.empty() || offsets.size() != powers.size())
            throw EstimatorError("cluster_angle_spread: need one power per offset");
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < offsets.size(); ++k)
        {
            num += powers[k] * offsets[k] * offsets[k];
            den += powers[k];
        }
        if (!(den > 0.0))
            throw EstimatorError("cluster_angle_spread: zero cluster power");
        return std::sqrt(num / den);
    }

    enum class AngleKind
    {
        aod_azimuth,
        aod_elevation,
        aoa_azimuth,
        aoa_elevation,
    };

    inline double offset_of(const Ray &r, AngleKind k)
    {
        switch (k)
        {
        case AngleKind::aod_azimuth:
            return r.offsets.a_tx;
        case AngleKind::aod_elevation:
            return r.offsets.e_tx;
        case AngleKind::aoa_azimuth:
            return r.offsets.a_rx;
        case AngleKind::aoa_elevation:
            return r.offsets.e_rx;
        }
        return 0.0;
    }

    // Angle spread of every cluster present in a path set.
    inline std::vector<double> cluster_angle_spreads(const Realization &real, const PathSet &ps, AngleKind kind)
    {
        std::map<std::size_t, std::pair<std::vector<double>, std::vector<double>>> per;
        for (const auto &rp : ps.rays)
        {
            auto &e = per[rp.track];
            e.first.push_back(offset_of(real.tracks[rp.track].cluster.rays[rp.ray], kind));
            e.second.push_back(rp.power);
        }
        std::vector<double> out;
        for (const auto &[k, v] : per)
            out.push_back(cluster_angle_spread(v.first, v.second));
        return out;
    }

    // ---- stationary regions -------------------------------------------------------------------

    enum class StationaryAxis
    {
        time,
        space,
        frequency,
    };

    struct StationaryRegionResult
    {
        StationaryAxis axis = StationaryAxis::frequency;
        double c_th = 0.9;
        std::vector<double> samples; // region sizes in axis units
    };

    namespace detail
    {
        inline std::map<long long, double> binned(const DelayPsd &psd, double resolution)
        {
            std::map<long long, double> m;
            for (const auto &[tau, p] : psd.taps)
            {
                long long key;
                if (resolution > 0.0)
                    key = std::llround(tau / resolution);
                else
                {
                    static_assert(sizeof(double) == sizeof(long long));
                    std::memcpy(&key, &tau, sizeof key);
                }
                m[key] += p;
            }
            return m;
        }
    } // namespace detail

    // sum_tau P1 P2 / max(sum P1^2, sum P2^2). Delays are matched exactly (resolution 0) or on
    // a grid of the given resolution.
    inline double psd_correlation(const DelayPsd &a, const DelayPsd &b, double resolution = 0.0)
    {
        const auto ma = detail::binned(a, resolution), mb = detail::binned(b, resolution);
        double cross = 0.0, sa = 0.0, sb = 0.0;
        for (const auto &[k, p] : ma)
        {
            sa += p * p;
            if (auto it = mb.find(k); it != mb.end())
                cross += p * it->second;
        }
        for (const auto &[k, p] : mb)
            sb += p * p;
        const double den = std::max(sa, sb);
        if (!(den > 0.0))
            throw EstimatorError("psd_correlation: zero-power delay PSD");
        return cross / den;
    }

    // Largest lag (in steps) from `anchor` over which the PSD correlation stays >= c_th.
    // `psd_at(k)` yields the PSD k steps from the anchor; evaluation stops at the first drop
    // or at max_steps.
    inline std::size_t stationary_lag(const std::function<DelayPsd(std::size_t)> &psd_at, std::size_t max_steps,
                                      double c_th, double resolution = 0.0)
    {
        if (!(c_th >= 0.0 && c_th < 1.0))
            throw EstimatorError("stationary_lag: threshold must lie in [0, 1)");
        const DelayPsd ref = psd_at(0);
        std::size_t lag = 0;
        for (std::size_t k = 1; k <= max_steps; ++k)
        {
            if (psd_correlation(ref, psd_at(k), resolution) < c_th)
                break;
            lag = k;
        }
        return lag;
    }

    // Region size at every anchor of an ordered PSD sequence; the window ends at the sequence end.
    inline StationaryRegionResult stationary_region(const std::vector<DelayPsd> &seq, StationaryAxis axis, double c_th,
                                                    double step, double resolution = 0.0)
    {
        if (seq.size() < 2)
            throw EstimatorError("stationary_region: need at least two PSDs");
        StationaryRegionResult out;
        out.axis = axis;
        out.c_th = c_th;
        for (std::size_t a = 0; a + 1 < seq.size(); ++a)
        {
            const std::size_t lag = stationary_lag([&](std::size_t k) { return seq[a + k]; }, seq.size() - 1 - a, c_th,
                                                   resolution);
            out.samples.push_back(static_cast<double>(lag) * step);
        }
        return out;
    }

    // Stationary bandwidth of one realization: NLOS delay PSD at the reference element pair,
    // anchored at sub-band `anchor`, stepping upwards in frequency.
    inline double stationary_bandwidth(const Realization &real, std::size_t anchor, double c_th, std::size_t t = 0,
                                       double resolution = 0.0)
    {
        const BandPlan &band = real.params->band;
        if (anchor >= band.n_sub)
            throw std::out_of_range("stationary_bandwidth: anchor outside the band");
        const auto psd = [&](std::size_t k) { return delay_psd(assemble_cir(real, 0, 0, anchor + k, t), false); };
        return static_cast<double>(stationary_lag(psd, band.n_sub - 1 - anchor, c_th, resolution)) * band.b_sub();
    }

    inline double stationary_interval(const Realization &real, std::size_t t0, double c_th, std::size_t i = 0,
                                      double resolution = 0.0)
    {
        const TimeGrid &tg = real.params->time;
        const auto psd = [&](std::size_t k) { return delay_psd(assemble_cir(real, 0, 0, i, t0 + k), false); };
        return static_cast<double>(stationary_lag(psd, tg.n_snapshots - 1 - t0, c_th, resolution)) * tg.interval_s;
    }

    // Along the first row of the Tx array.
    inline double stationary_distance(const Realization &real, double c_th, std::size_t i = 0, std::size_t t = 0,
                                      double resolution = 0.0)
    {
        const ArrayGeometry &a = real.params->tx_array;
        const auto psd = [&](std::size_t k) { return delay_psd(assemble_cir(real, k, 0, i, t), false); };
        return static_cast<double>(stationary_lag(psd, a.m_v - 1, c_th, resolution)) * a.delta_v;
    }

    // ---- distributions ------------------------------------------------------------------------

    // Empirical CDF points (sorted value, i / n).
    inline std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> samples)
    {
        std::sort(samples.begin(), samples.end());
        std::vector<std::pair<double, double>> out;
        const auto n = static_cast<double>(samples.size());
        for (std::size_t k = 0; k < samples.size(); ++k)
            out.emplace_back(samples[k], static_cast<double>(k + 1) / n);
        return out;
    }

    inline double median(std::vector<double> v)
    {
        if (v.empty())
            throw EstimatorError("median: empty sample");
        std::sort(v.begin(), v.end());
        const std::size_t n = v.size();
        return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    }

    // One-sample Kolmogorov-Smirnov statistic against a continuous CDF.
    inline double ks_statistic(std::vector<double> samples, const std::function<double(double)> &cdf)
    {
        if (samples.empty())
            throw EstimatorError("ks_statistic: empty sample");
        std::sort(samples.begin(), samples.end());
        const auto n = static_cast<double>(samples.size());
        double d = 0.0;
        for (std::size_t k = 0; k < samples.size(); ++k)
        {
            const double f = cdf(samples[k]);
            d = std::max({d, static_cast<double>(k + 1) / n - f, f - static_cast<double>(k) / n});
        }
        return d;
    }

    // Two-sample KS statistic.
    inline double ks_two_sample(std::vector<double> a, std::vector<double> b)
    {
        if (a.empty() || b.empty())
            throw EstimatorError("ks_two_sample: empty sample");
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        std::size_t i = 0, j = 0;
        double d = 0.0;
        const auto na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
        while (i < a.size() && j < b.size())
        {
            const double x = std::min(a[i], b[j]);
            while (i < a.size() && a[i] <= x)
                ++i;
            while (j < b.size() && b[j] <= x)
                ++j;
            d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
        }
        return d;
    }

    // Asymptotic critical value of the one-sample KS statistic at 1% significance.
    inline double ks_critical_1pct(std::size_t n) { return 1.628 / std::sqrt(static_cast<double>(n)); }
} // namespace stfchan
