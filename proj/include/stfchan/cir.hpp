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
#include "evolution.hpp"
#include "geometry.hpp"
#include "largescale.hpp"
#include "model.hpp"
#include "random.hpp"

#include <array>
#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <tuple>
#include <optional>
#include <vector>

#include <fftw3.h>

namespace stfchan
{
    // ---- antenna patterns ---------------------------------------------------------------------

    struct PatternPair
    {
        double f_v = 0.0;
        double f_h = 0.0;
    };

    // Half-wave dipole: G = sqrt(1.64) cos(pi/2 cos a) / sin a, F_V = G sin e, F_H = G cos e.
    // The pattern null along the dipole axis (sin a = 0) returns zero gain.
    inline PatternPair dipole_pattern(const Angles &lcs)
    {
        const double sa = std::sin(lcs.azimuth);
        if (std::abs(sa) < 1e-12)
            return {0.0, 0.0};
        const double g = std::sqrt(1.64) * std::cos(0.5 * kPi * std::cos(lcs.azimuth)) / sa;
        return {g * std::sin(lcs.elevation), g * std::cos(lcs.elevation)};
    }

    // Unit-gain, vertically polarised element.
    inline PatternPair isotropic_pattern(const Angles &) { return {1.0, 0.0}; }

    inline PatternPair antenna_pattern(PatternKind kind, const Angles &lcs)
    {
        return kind == PatternKind::dipole ? dipole_pattern(lcs) : isotropic_pattern(lcs);
    }

    // Pattern seen by an element of a rotated panel for a GCS direction vector.
    inline PatternPair pattern_towards(PatternKind kind, const Rotation &rot, const Vec3 &gcs_dir)
    {
        if (kind == PatternKind::isotropic)
            return isotropic_pattern({});
        return antenna_pattern(kind, gcs_to_lcs(angles_of(gcs_dir), rot));
    }

    // ---- taps ---------------------------------------------------------------------------------

    inline constexpr std::uint32_t kLosId = std::numeric_limits<std::uint32_t>::max();

    // One delay-tagged contribution. `pol` holds the pattern-sandwiched polarisation entries
    // (VV, VH, HV, HH) including amplitude and phase; the scalar tap is their sum.
    struct Tap
    {
        std::uint32_t cluster = kLosId;
        std::uint32_t ray = kLosId;
        double delay = 0.0;   // s
        double doppler = 0.0; // Hz
        std::array<Complex, 4> pol{};

        Complex gain() const { return pol[0] + pol[1] + pol[2] + pol[3]; }
        double power() const { return std::norm(gain()); }
        bool is_los() const { return cluster == kLosId; }
    };

    // F_rx^T M F_tx, split per entry of the 2x2 matrix M.
    inline std::array<Complex, 4> sandwich(const PatternPair &rx, const std::array<Complex, 4> &m, const PatternPair &tx)
    {
        return {rx.f_v * m[0] * tx.f_v, rx.f_v * m[1] * tx.f_h, rx.f_h * m[2] * tx.f_v, rx.f_h * m[3] * tx.f_h};
    }

    inline std::array<Complex, 4> los_polarization(double theta)
    {
        const Complex e = std::polar(1.0, theta);
        return {e, 0.0, 0.0, -e};
    }

    inline std::array<Complex, 4> nlos_polarization(const std::array<double, 4> &phases, double xpr)
    {
        const double x = std::isinf(xpr) ? 0.0 : std::sqrt(1.0 / xpr);
        return {std::polar(1.0, phases[0]), std::polar(x, phases[1]), std::polar(x, phases[2]),
                std::polar(1.0, phases[3])};
    }

    // Convex split of the K-factor: (LOS weight, NLOS weight) in amplitude.
    inline std::pair<double, double> k_factor_weights(double k, bool los_present = true)
    {
        if (!los_present)
            return {0.0, 1.0};
        if (std::isinf(k))
            return {1.0, 0.0};
        return {std::sqrt(k / (k + 1.0)), std::sqrt(1.0 / (k + 1.0))};
    }

    // ---- propagation paths at one (p, q, f_i, t) ----------------------------------------------

    struct RayPath
    {
        std::size_t track = 0;
        std::size_t ray = 0;
        MirrorVectors vectors; // evolved to (p, q, t), lengths equal the path length
        double distance = 0.0;
        double power = 0.0;    // normalised
    };

    struct PathSet
    {
        std::size_t p = 0, q = 0, subband = 0, snapshot = 0;
        double los_distance = 0.0;
        Vec3 los_vector;            // Tx -> Rx
        std::vector<RayPath> rays;
        std::size_t dropped = 0;    // rays shorter than the direct path
    };

    // Evolves every visible ray to the element pair (p, q) at snapshot t: exact two-step update
    // to the reference elements of the sub-arrays holding p and q, then planar offsets inside
    // the sub-arrays. Ray powers are normalised over the surviving rays.
    inline PathSet evaluate_paths(const Realization &real, std::size_t p, std::size_t q, std::size_t i, std::size_t t)
    {
        const ModelParams &mp = *real.params;
        if (p >= mp.tx_array.size() || q >= mp.rx_array.size() || i >= mp.band.n_sub || t >= mp.time.n_snapshots)
            throw std::out_of_range("evaluate_paths: index out of range");
        PathSet ps;
        ps.p = p, ps.q = q, ps.subband = i, ps.snapshot = t;
        ps.los_vector = real.rx_location(q, t) - real.tx_location(p, t);
        ps.los_distance = real.los_distance(p, q, t);

        const std::size_t pr = real.tx_blocks[real.tx_block_of[p]].reference_element(mp.tx_array);
        const std::size_t qr = real.rx_blocks[real.rx_block_of[q]].reference_element(mp.rx_array);
        const Vec3 &a_pr = real.tx_positions[pr], &a_qr = real.rx_positions[qr];
        const Vec3 off_p = real.tx_positions[p] - a_pr, off_q = real.rx_positions[q] - a_qr;
        const bool shift = !(pr == 0 && qr == 0);
        const bool planar = !(off_p == Vec3{} && off_q == Vec3{});

        const double f = mp.band.center(i), fc = mp.band.system_center();
        const double delta_tx = norm(real.tx_positions[p]), delta_rx = norm(real.rx_positions[q]);
        std::vector<double> pre;

        for (std::size_t k = 0; k < real.tracks.size(); ++k)
        {
            const ClusterTrack &tr = real.tracks[k];
            if (!tr.alive_at(t) || !tr.visible(p, q))
                continue;
            const double xi = tr.xi.xi(delta_tx, delta_rx);
            for (std::size_t m = 0; m < tr.cluster.rays.size(); ++m)
            {
                const Ray &ray = tr.cluster.rays[m];
                if (!ray_alive_at(ray, i))
                    continue;
                RayPath rp;
                rp.track = k, rp.ray = m;
                rp.vectors = shift ? evolve_space_time(tr.state(t, m), a_qr, a_pr) : tr.state(t, m);
                double d = rp.vectors.distance();
                if (planar)
                {
                    const Vec3 ut = (1.0 / norm(rp.vectors.tx)) * rp.vectors.tx;
                    const Vec3 ur = (1.0 / d) * rp.vectors.rx;
                    d -= dot(ur, off_q) + dot(ut, off_p);
                }
                if (d < ps.los_distance)
                {
                    ++ps.dropped;
                    continue;
                }
                rp.distance = d;
                const double tau_ex = (d - ps.los_distance) / kSpeedOfLight;
                pre.push_back(ray_power(mp.power, tau_ex, tr.cluster.shadowing_z_db, xi, f, fc, ray.freq_exponent));
                ps.rays.push_back(rp);
            }
        }
        if (!pre.empty())
        {
            normalize_powers(pre);
            for (std::size_t n = 0; n < pre.size(); ++n)
                ps.rays[n].power = pre[n];
        }
        return ps;
    }

    // LOS tap with unit amplitude before K-factor weighting.
    inline Tap los_component(const Realization &real, const PathSet &ps)
    {
        const ModelParams &mp = *real.params;
        const double lam = wavelength(mp.band.center(ps.subband));
        const double d0 = real.los_distance(ps.p, ps.q, 0);
        const double theta = mp.los_phase == LosPhaseMode::random ? real.los_theta : -kTwoPi * d0 / lam;
        const double phase = -kTwoPi * (ps.los_distance - d0) / lam;
        const Vec3 u = (1.0 / ps.los_distance) * ps.los_vector;

        Tap tap;
        tap.delay = ps.los_distance / kSpeedOfLight;
        tap.doppler = (dot(u, velocity_vector(mp.rx_motion)) - dot(u, velocity_vector(mp.tx_motion))) / lam;
        const PatternPair ftx = pattern_towards(mp.tx_pattern, mp.tx_array.rotation, u);
        const PatternPair frx = pattern_towards(mp.rx_pattern, mp.rx_array.rotation, -u);
        tap.pol = sandwich(frx, los_polarization(theta), ftx);
        const Complex rot = std::polar(1.0, phase);
        for (auto &e : tap.pol)
            e *= rot;
        return tap;
    }

    // NLOS tap of one ray with amplitude sqrt(P) before K-factor weighting.
    inline Tap nlos_component(const Realization &real, const PathSet &ps, const RayPath &rp)
    {
        const ModelParams &mp = *real.params;
        if (rp.track >= real.tracks.size())
            throw std::logic_error("nlos_component: ray refers to a missing cluster track");
        const ClusterTrack &tr = real.tracks[rp.track];
        const Ray &ray = tr.cluster.rays[rp.ray];
        const double lam = wavelength(mp.band.center(ps.subband));

        Tap tap;
        tap.cluster = tr.cluster.id;
        tap.ray = ray.id;
        tap.delay = rp.distance / kSpeedOfLight;
        const DopplerPair nu = doppler_nlos(rp.vectors, velocity_vector(mp.tx_motion), velocity_vector(mp.rx_motion),
                                            mp.band.center(ps.subband));
        tap.doppler = nu.nu_tx + nu.nu_rx;
        const PatternPair ftx = pattern_towards(mp.tx_pattern, mp.tx_array.rotation, rp.vectors.tx);
        const PatternPair frx = pattern_towards(mp.rx_pattern, mp.rx_array.rotation, rp.vectors.rx);
        tap.pol = sandwich(frx, nlos_polarization(ray.phases, ray.xpr), ftx);
        // Carrier phase accumulated since the ray was born at the reference pair.
        const Complex rot = std::polar(std::sqrt(rp.power), -kTwoPi * (rp.distance - ray.total_distance) / lam);
        for (auto &e : tap.pol)
            e *= rot;
        return tap;
    }

    // Small-scale CIR of one (p, q, f_i, t): K-weighted LOS plus all NLOS rays.
    inline std::vector<Tap> assemble_cir(const Realization &real, const PathSet &ps)
    {
        const ModelParams &mp = *real.params;
        const auto [w_los, w_nlos] = k_factor_weights(mp.k_factor, mp.los_enabled);
        std::vector<Tap> taps;
        taps.reserve(ps.rays.size() + 1);
        if (mp.los_enabled && w_los > 0.0)
        {
            Tap t = los_component(real, ps);
            for (auto &e : t.pol)
                e *= w_los;
            taps.push_back(t);
        }
        if (w_nlos > 0.0)
            for (const auto &rp : ps.rays)
            {
                Tap t = nlos_component(real, ps, rp);
                for (auto &e : t.pol)
                    e *= w_nlos;
                taps.push_back(t);
            }
        return taps;
    }

    inline std::vector<Tap> assemble_cir(const Realization &real, std::size_t p, std::size_t q, std::size_t i,
                                         std::size_t t)
    {
        return assemble_cir(real, evaluate_paths(real, p, q, i, t));
    }

    // Linear large-scale power gain of sub-band i at snapshot t (reference element pair).
    inline double large_scale_gain(const Realization &real, std::size_t i, std::size_t t)
    {
        const ModelParams &mp = *real.params;
        const std::size_t nt = mp.time.n_snapshots;
        return compose_large_scale(mp.large_scale, real.los_distance(0, 0, t), mp.band.center(i), real.shadowing_db[i],
                                   real.blockage_db[i * nt + t]);
    }

    // All M_R x M_T CIRs of one sub-band and snapshot, scaled by the large-scale amplitude.
    // Indexed [q * M_T + p].
    inline std::vector<std::vector<Tap>> full_channel_matrix(const Realization &real, std::size_t i, std::size_t t)
    {
        const ModelParams &mp = *real.params;
        const double amp = std::sqrt(large_scale_gain(real, i, t));
        const std::size_t mt = mp.tx_array.size(), mr = mp.rx_array.size();
        std::vector<std::vector<Tap>> h(mt * mr);
        for (std::size_t q = 0; q < mr; ++q)
            for (std::size_t p = 0; p < mt; ++p)
            {
                auto taps = assemble_cir(real, p, q, i, t);
                for (auto &tap : taps)
                    for (auto &e : tap.pol)
                        e *= amp;
                h[q * mt + p] = std::move(taps);
            }
        return h;
    }

    // ---- transfer function and received signal ------------------------------------------------

    // H(f) = sum_l a_l exp(-j 2 pi f tau_l), f relative to the sub-band center.
    inline Complex transfer_function(const std::vector<Tap> &taps, double f)
    {
        Complex h = 0.0;
        for (const auto &tap : taps)
            h += tap.gain() * std::polar(1.0, -kTwoPi * f * tap.delay);
        return h;
    }

    inline std::vector<Complex> transfer_function(const std::vector<Tap> &taps, const std::vector<double> &f_grid)
    {
        std::vector<Complex> h;
        h.reserve(f_grid.size());
        for (double f : f_grid)
            h.push_back(transfer_function(taps, f));
        return h;
    }

    namespace detail
    {
        class FftPlan
        {
        public:
            FftPlan(std::size_t n, int sign) : n_(n)
            {
                in_ = fftw_alloc_complex(n);
                out_ = fftw_alloc_complex(n);
                plan_ = fftw_plan_dft_1d(static_cast<int>(n), in_, out_, sign, FFTW_ESTIMATE);
            }
            FftPlan(const FftPlan &) = delete;
            FftPlan &operator=(const FftPlan &) = delete;
            ~FftPlan()
            {
                fftw_destroy_plan(plan_);
                fftw_free(in_);
                fftw_free(out_);
            }

            std::vector<Complex> run(const std::vector<Complex> &x)
            {
                for (std::size_t k = 0; k < n_; ++k)
                    in_[k][0] = x[k].real(), in_[k][1] = x[k].imag();
                fftw_execute(plan_);
                std::vector<Complex> y(n_);
                for (std::size_t k = 0; k < n_; ++k)
                    y[k] = {out_[k][0], out_[k][1]};
                return y;
            }

        private:
            std::size_t n_;
            fftw_complex *in_ = nullptr, *out_ = nullptr;
            fftw_plan plan_ = nullptr;
        };

        // FFTW planning is not thread safe.
        inline std::mutex &fftw_planner_mutex()
        {
            static std::mutex m;
            return m;
        }
    } // namespace detail

    // Baseband signal sampled at the total bandwidth B = f_stop - f_start, centred on the band
    // midpoint. Bin k of the FFT maps to baseband frequency k B / N folded to [-B/2, B/2).
    struct SignalSpectrum
    {
        double f_start = 0.0;
        double f_stop = 0.0;
        std::vector<Complex> spectrum; // unnormalised DFT of the time samples

        double sample_rate() const { return f_stop - f_start; }
        double bin_frequency(std::size_t k) const // baseband
        {
            const auto n = static_cast<double>(spectrum.size());
            double kk = static_cast<double>(k);
            if (kk >= n / 2.0)
                kk -= n;
            return kk * sample_rate() / n;
        }
    };

    inline std::vector<Complex> fft(const std::vector<Complex> &x)
    {
        std::unique_ptr<detail::FftPlan> plan;
        {
            std::lock_guard lock(detail::fftw_planner_mutex());
            plan = std::make_unique<detail::FftPlan>(x.size(), FFTW_FORWARD);
        }
        auto y = plan->run(x);
        std::lock_guard lock(detail::fftw_planner_mutex());
        plan.reset();
        return y;
    }

    // Inverse DFT including the 1/N factor.
    inline std::vector<Complex> ifft(const std::vector<Complex> &x)
    {
        std::unique_ptr<detail::FftPlan> plan;
        {
            std::lock_guard lock(detail::fftw_planner_mutex());
            plan = std::make_unique<detail::FftPlan>(x.size(), FFTW_BACKWARD);
        }
        auto y = plan->run(x);
        {
            std::lock_guard lock(detail::fftw_planner_mutex());
            plan.reset();
        }
        const double s = 1.0 / static_cast<double>(x.size());
        for (auto &v : y)
            v *= s;
        return y;
    }

    inline SignalSpectrum spectrum_of(const std::vector<Complex> &samples, double f_start, double f_stop)
    {
        return {f_start, f_stop, fft(samples)};
    }

    // Per sub-band CIRs of one element pair and snapshot; beamforming weights combine a set of
    // element pairs into one effective channel per sub-band.
    struct ReceiveSetup
    {
        std::size_t snapshot = 0;
        // (p, q, weight) triples; empty means the reference pair with unit weight.
        std::vector<std::tuple<std::size_t, std::size_t, Complex>> beam;
        double noise_power = 0.0;
        bool include_large_scale = false;
    };

    // Sub-band synthesis of the received signal: each FFT bin is assigned to the sub-band whose
    // half-open interval contains its RF frequency, multiplied by that sub-band's transfer
    // function at the offset from the sub-band center, summed over sub-bands, transformed back
    // and corrupted by complex white Gaussian noise of the given power.
    inline std::vector<Complex> received_signal(const SignalSpectrum &x, const std::vector<std::vector<Tap>> &subband_cirs,
                                                const BandPlan &band, Rng *noise_rng, double noise_power)
    {
        if (x.spectrum.empty())
            throw ConfigError("received_signal: empty spectrum");
        if (std::abs(x.f_start - band.f_start) > 1e-6 * band.f_start || std::abs(x.f_stop - band.f_stop) > 1e-6 * band.f_stop)
            throw ConfigError("received_signal: spectrum grid does not cover the band");
        if (subband_cirs.size() != band.n_sub)
            throw ConfigError("received_signal: need one CIR per sub-band");
        const double f_mid = 0.5 * (band.f_start + band.f_stop);
        std::vector<Complex> y(x.spectrum.size());
        for (std::size_t k = 0; k < y.size(); ++k)
        {
            const double fb = x.bin_frequency(k);
            const std::size_t i = band.subband_of(std::clamp(f_mid + fb, band.f_start, std::nextafter(band.f_stop, 0.0)));
            y[k] = transfer_function(subband_cirs[i], f_mid + fb - band.center(i)) * x.spectrum[k];
        }
        auto out = ifft(y);
        if (noise_power > 0.0)
        {
            if (noise_rng == nullptr)
                throw ConfigError("received_signal: noise requested without a random stream");
            const double s = std::sqrt(noise_power / 2.0);
            for (auto &v : out)
                v += Complex(s * std_normal(*noise_rng), s * std_normal(*noise_rng));
        }
        return out;
    }

    inline std::vector<Complex> received_signal(const SignalSpectrum &x, const Realization &real, const ReceiveSetup &setup)
    {
        const ModelParams &mp = *real.params;
        std::vector<std::vector<Tap>> cirs(mp.band.n_sub);
        const auto beam = setup.beam.empty() ? decltype(setup.beam){{0, 0, Complex(1.0)}} : setup.beam;
        for (std::size_t i = 0; i < mp.band.n_sub; ++i)
        {
            const double amp = setup.include_large_scale ? std::sqrt(large_scale_gain(real, i, setup.snapshot)) : 1.0;
            for (const auto &[p, q, w] : beam)
                for (auto tap : assemble_cir(real, p, q, i, setup.snapshot))
                {
                    for (auto &e : tap.pol)
                        e *= w * amp;
                    cirs[i].push_back(tap);
                }
        }
        Rng noise = make_stream(real.master_seed, real.index, Stream::noise);
        return received_signal(x, cirs, mp.band, &noise, setup.noise_power);
    }
} // namespace stfchan
