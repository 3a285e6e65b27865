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
#include "config.hpp"
#include "fitting.hpp"
#include "io.hpp"
#include "model.hpp"
#include "parallel.hpp"
#include "stats.hpp"

#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace stfchan
{
    using Logger = std::function<void(const std::string &)>;

    inline std::vector<Realization> generate_ensemble(const SimulationConfig &cfg)
    {
        auto params = std::make_shared<const ModelParams>(cfg.model);
        std::vector<Realization> out(cfg.run.realizations);
        parallel_for(out.size(), cfg.run.threads,
                     [&](std::size_t k) { out[k] = generate_realization(params, cfg.run.master_seed, k); });
        return out;
    }

    namespace detail
    {
        inline CsvTable complex_series(const std::string &axis, const std::vector<double> &x,
                                       const std::vector<Complex> &y)
        {
            CsvTable t;
            t.header = {axis, "corr_re", "corr_im", "corr_abs"};
            for (std::size_t k = 0; k < x.size(); ++k)
                t.add({x[k], y[k].real(), y[k].imag(), std::abs(y[k])});
            return t;
        }

        inline std::string ghz_tag(double f)
        {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.3fGHz", f / 1e9);
            return buf;
        }
    } // namespace detail

    // Writes the statistics tables of an ensemble into out_dir. Returns the written file names.
    inline std::vector<std::string> export_stats(const SimulationConfig &cfg, const std::vector<Realization> &ens,
                                                 const std::filesystem::path &out_dir)
    {
        const ModelParams &m = cfg.model;
        const StatsSettings &st = cfg.stats;
        std::vector<std::string> written;
        const auto put = [&](const std::string &name, const CsvTable &t) {
            write_csv(out_dir / name, t);
            written.push_back(name);
        };
        const double f0 = m.band.center(0);

        if (ens.size() >= 2)
        {
            std::vector<double> lags;
            for (std::size_t k = 0; k < st.acf_lags; ++k)
                lags.push_back(m.time.time_of(k));
            put("acf_time.csv", detail::complex_series("lag_s", lags, acf(ens, 0, 0, 0, f0, st.acf_lags)));

            std::vector<std::size_t> offs;
            std::vector<double> dist;
            for (std::size_t k = 0; k <= st.sccf_max_offset; ++k)
            {
                offs.push_back(k);
                dist.push_back(static_cast<double>(k) * m.tx_array.delta_v);
            }
            put("sccf_tx.csv", detail::complex_series("offset_m", dist, sccf_tx(ens, 0, 0, 0, f0, offs)));

            std::vector<double> df;
            for (std::size_t k = 0; k < st.fcf_points; ++k)
            {
                const double d = static_cast<double>(k) * st.fcf_step_hz;
                if (m.band.f_start + 0.5 * m.band.b_sub() + d >= m.band.f_stop)
                    break;
                df.push_back(d);
            }
            put("fcf.csv", detail::complex_series("lag_hz", df, fcf(ens, 0, 0, 0, f0, df)));
        }

        // Per-realization statistics.
        const std::size_t n = ens.size();
        std::vector<std::vector<double>> bw(st.stationary_anchors_hz.size(), std::vector<double>(n));
        std::vector<double> interval(n), ds(n);
        std::vector<std::vector<double>> spreads(n);
        parallel_for(n, cfg.run.threads, [&](std::size_t r) {
            for (std::size_t a = 0; a < st.stationary_anchors_hz.size(); ++a)
                bw[a][r] = stationary_bandwidth(ens[r], m.band.subband_of(st.stationary_anchors_hz[a]), st.c_th, 0,
                                                st.delay_resolution_s);
            if (m.time.n_snapshots > 1)
                interval[r] = stationary_interval(ens[r], 0, st.c_th, 0, st.delay_resolution_s);
            const PathSet ps = evaluate_paths(ens[r], 0, 0, 0, 0);
            const auto cir = assemble_cir(ens[r], ps);
            const DelayPsd psd = delay_psd(cir);
            ds[r] = psd.total_power() > 0.0 ? rms_delay_spread(psd) : 0.0;
            spreads[r] = cluster_angle_spreads(ens[r], ps, AngleKind::aoa_azimuth);
        });
        for (std::size_t a = 0; a < bw.size(); ++a)
            put("stationary_bandwidth_cdf_" + detail::ghz_tag(st.stationary_anchors_hz[a]) + ".csv",
                cdf_csv(empirical_cdf(bw[a]), "bandwidth_hz"));
        if (m.time.n_snapshots > 1)
            put("stationary_interval_cdf.csv", cdf_csv(empirical_cdf(interval), "interval_s"));
        put("delay_spread_cdf.csv", cdf_csv(empirical_cdf(ds), "rms_delay_spread_s"));
        std::vector<double> all_spreads;
        for (const auto &s : spreads)
            all_spreads.insert(all_spreads.end(), s.begin(), s.end());
        for (auto &s : all_spreads)
            s = rad2deg(s);
        if (!all_spreads.empty())
            put("cluster_angle_spread_cdf.csv", cdf_csv(empirical_cdf(all_spreads), "aaoa_spread_deg"));

        CsvTable counts;
        counts.header = {"snapshot", "time_s", "mean_cluster_count"};
        for (std::size_t t = 0; t < m.time.n_snapshots; ++t)
        {
            double acc = 0.0;
            for (const auto &r : ens)
                acc += static_cast<double>(r.reference_cluster_count(t));
            counts.add({static_cast<double>(t), m.time.time_of(t), acc / static_cast<double>(n)});
        }
        put("cluster_count.csv", counts);
        return written;
    }

    // Intra-cluster ray offsets [deg] of one angle over an ensemble, taken at the reference
    // element pair, first snapshot and first sub-band.
    inline std::vector<double> ray_offset_samples(const std::vector<Realization> &ens, AngleKind kind)
    {
        std::vector<double> out;
        for (const auto &r : ens)
            for (const auto &tr : r.tracks)
                if (tr.alive_at(0) && tr.visible(0, 0))
                    for (const auto &ray : tr.cluster.rays)
                        if (ray_alive_at(ray, 0))
                            out.push_back(rad2deg(offset_of(ray, kind)));
        return out;
    }

    inline double &ray_sigma_of(ClusterLaw &law, AngleKind kind)
    {
        switch (kind)
        {
        case AngleKind::aod_azimuth:
            return law.ray_sigmas.a_tx;
        case AngleKind::aod_elevation:
            return law.ray_sigmas.e_tx;
        case AngleKind::aoa_azimuth:
            return law.ray_sigmas.a_rx;
        case AngleKind::aoa_elevation:
            break;
        }
        return law.ray_sigmas.e_rx;
    }

    // Simulator closure for fitting one intra-cluster sigma [deg]. Every grid point reuses the
    // master seed of cfg (common random numbers).
    inline FitSimulator make_sigma_fit_simulator(const SimulationConfig &cfg, AngleKind kind)
    {
        return [cfg, kind](const std::vector<double> &x) {
            SimulationConfig c = cfg;
            c.run.threads = 1;
            ray_sigma_of(c.model.clusters, kind) = deg2rad(x.at(0));
            return ray_offset_samples(generate_ensemble(c), kind);
        };
    }

    inline std::string cir_file_name(std::size_t realization)
    {
        char buf[64];
        std::snprintf(buf, sizeof buf, "cir_%06zu.stfg", realization);
        return buf;
    }

    // Generates the ensemble and writes every requested output. Returns the process exit code.
    inline int run_experiment(const SimulationConfig &cfg, const std::filesystem::path &out_dir, const Logger &log)
    {
        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);
        if (ec)
            throw IoError("cannot create output directory '" + out_dir.string() + "': " + ec.message());
        detail::write_file(out_dir / "config_used.cfg", serialize_config(cfg), std::ios::out);
        if (cfg.run.realizations == 0)
        {
            log("warning: realization count is 0, nothing to simulate");
            return 0;
        }
        log("generating " + std::to_string(cfg.run.realizations) + " realizations");
        const auto ens = generate_ensemble(cfg);

        const std::size_t n_cir = std::min(cfg.outputs.cir_realizations, ens.size());
        if (cfg.outputs.cir_binary || cfg.outputs.cir_csv)
            for (std::size_t r = 0; r < n_cir; ++r)
            {
                const CirTensor t = build_cir_tensor(ens[r]);
                const std::string base = cir_file_name(r);
                if (cfg.outputs.cir_binary)
                    write_cir(out_dir / base, t);
                if (cfg.outputs.cir_csv)
                    write_csv(out_dir / (base.substr(0, base.size() - 5) + "_taps.csv"), cir_csv(t));
            }
        if (cfg.outputs.stats)
        {
            for (const auto &name : export_stats(cfg, ens, out_dir))
                log("wrote " + (out_dir / name).string());
        }
        return 0;
    }
} // namespace stfchan
