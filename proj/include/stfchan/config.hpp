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
#include "io.hpp"
#include "model.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace stfchan
{
    struct RunSettings
    {
        std::size_t realizations = 10;
        std::uint64_t master_seed = 1;
        std::size_t threads = 1;
    };

    struct StatsSettings
    {
        double c_th = 0.9;
        std::size_t acf_lags = 21;          // snapshots, including lag 0
        std::size_t sccf_max_offset = 8;    // Tx elements along the first row
        std::size_t fcf_points = 21;
        double fcf_step_hz = 5e6;
        double angular_bin_deg = 1.0;
        double delay_resolution_s = 0.0;    // 0: exact delay matching
        std::vector<double> stationary_anchors_hz{300e9};
    };

    struct OutputSettings
    {
        bool cir_binary = true;
        bool cir_csv = false;
        bool stats = true;
        std::size_t cir_realizations = 1; // realizations written as CIR tensors
    };

    struct SimulationConfig
    {
        ModelParams model;
        RunSettings run;
        StatsSettings stats;
        OutputSettings outputs;
        std::string absorption_csv; // empty: built-in table

        void validate() const
        {
            model.validate();
            if (!(stats.c_th >= 0.0 && stats.c_th < 1.0))
                throw ConfigError("stats.c_th must lie in [0, 1)");
            if (stats.acf_lags == 0 || stats.acf_lags > model.time.n_snapshots)
                throw ConfigError("stats.acf_lags must lie in [1, time.n_snapshots]");
            if (stats.sccf_max_offset >= model.tx_array.m_v)
                throw ConfigError("stats.sccf_max_offset must be smaller than tx_array.m_v");
            if (stats.fcf_points == 0 || !(stats.fcf_step_hz >= 0.0))
                throw ConfigError("stats.fcf_points / stats.fcf_step_hz invalid");
            if (!(stats.angular_bin_deg > 0.0))
                throw ConfigError("stats.angular_bin_deg must be positive");
            if (stats.delay_resolution_s < 0.0)
                throw ConfigError("stats.delay_resolution_s must be non-negative");
            for (double f : stats.stationary_anchors_hz)
                if (!(f >= model.band.f_start && f < model.band.f_stop))
                    throw ConfigError("stats.stationary_anchors_hz entries must lie inside the band");
        }
    };

    namespace detail
    {
        using json = nlohmann::ordered_json;

        // Object reader that records consumed keys so leftovers can be reported by path.
        class Section
        {
        public:
            Section(const json &j, std::string path) : j_(j), path_(std::move(path))
            {
                if (!j_.is_object())
                    throw ConfigError("config: '" + path_ + "' must be an object");
            }

            std::string key_path(const std::string &key) const { return path_.empty() ? key : path_ + "." + key; }

            bool has(const std::string &key) const { return j_.contains(key); }

            const json &raw(const std::string &key)
            {
                if (!j_.contains(key))
                    throw ConfigError("config: missing field '" + key_path(key) + "'");
                used_.insert(key);
                return j_.at(key);
            }

            template <class T> T get(const std::string &key)
            {
                const json &v = raw(key);
                try
                {
                    if constexpr (std::is_same_v<T, bool>)
                    {
                        if (!v.is_boolean())
                            throw ConfigError("");
                    }
                    else if constexpr (std::is_integral_v<T>)
                    {
                        if (!v.is_number_integer() || (std::is_unsigned_v<T> && v.get<long long>() < 0))
                            throw ConfigError("");
                    }
                    else if constexpr (std::is_floating_point_v<T>)
                    {
                        if (!v.is_number())
                            throw ConfigError("");
                    }
                    return v.get<T>();
                }
                catch (const std::exception &)
                {
                    throw ConfigError("config: field '" + key_path(key) + "' has the wrong type");
                }
            }

            double angle(const std::string &key) { return deg2rad(get<double>(key)); }

            double positive(const std::string &key)
            {
                const double v = get<double>(key);
                if (!(v > 0.0))
                    throw ConfigError("config: field '" + key_path(key) + "' must be positive");
                return v;
            }

            double non_negative(const std::string &key)
            {
                const double v = get<double>(key);
                if (!(v >= 0.0))
                    throw ConfigError("config: field '" + key_path(key) + "' must be non-negative");
                return v;
            }

            Section sub(const std::string &key) { return Section(raw(key), key_path(key)); }

            void finish() const
            {
                for (const auto &[k, v] : j_.items())
                    if (!used_.count(k))
                        throw ConfigError("config: unknown key '" + key_path(k) + "'");
            }

        private:
            const json &j_;
            std::string path_;
            std::set<std::string> used_;
        };

        // Degrees rounded to 1e-9 so that a load/serialize cycle is a fixed point.
        inline double out_deg(double rad) { return std::round(rad2deg(rad) * 1e9) / 1e9; }

        inline PatternKind parse_pattern(Section &s, const std::string &key)
        {
            const auto v = s.get<std::string>(key);
            if (v == "dipole")
                return PatternKind::dipole;
            if (v == "isotropic")
                return PatternKind::isotropic;
            throw ConfigError("config: field '" + s.key_path(key) + "' must be \"dipole\" or \"isotropic\"");
        }

        inline const char *pattern_name(PatternKind k) { return k == PatternKind::dipole ? "dipole" : "isotropic"; }

        inline void read_array(Section s, ArrayGeometry &a, PatternKind &pattern)
        {
            const auto mv = s.get<long long>("m_v"), mh = s.get<long long>("m_h");
            if (mv <= 0)
                throw ConfigError("config: field '" + s.key_path("m_v") + "' must be positive");
            if (mh <= 0)
                throw ConfigError("config: field '" + s.key_path("m_h") + "' must be positive");
            a.m_v = static_cast<std::size_t>(mv);
            a.m_h = static_cast<std::size_t>(mh);
            a.delta_v = s.positive("delta_v_m");
            a.delta_h = s.positive("delta_h_m");
            a.orientation.beta_v_e = s.angle("beta_v_e_deg");
            a.orientation.beta_v_a = s.angle("beta_v_a_deg");
            a.orientation.beta_h_e = s.angle("beta_h_e_deg");
            a.orientation.beta_h_a = s.angle("beta_h_a_deg");
            a.rotation.gamma_x = s.angle("gamma_x_deg");
            a.rotation.gamma_y = s.angle("gamma_y_deg");
            a.rotation.gamma_z = s.angle("gamma_z_deg");
            pattern = parse_pattern(s, "pattern");
            a.explicit_offsets.clear();
            if (s.has("element_offsets_m"))
            {
                const json &offs = s.raw("element_offsets_m");
                if (!offs.is_array())
                    throw ConfigError("config: field '" + s.key_path("element_offsets_m") + "' must be an array");
                for (const auto &e : offs)
                {
                    if (!e.is_array() || e.size() != 3)
                        throw ConfigError("config: field '" + s.key_path("element_offsets_m") +
                                          "' entries must be [x, y, z]");
                    a.explicit_offsets.push_back({e[0].get<double>(), e[1].get<double>(), e[2].get<double>()});
                }
                if (a.explicit_offsets.size() != a.size())
                    throw ConfigError("config: field '" + s.key_path("element_offsets_m") +
                                      "' must hold m_v * m_h entries");
            }
            s.finish();
        }

        inline json write_array(const ArrayGeometry &a, PatternKind pattern)
        {
            json j;
            j["m_v"] = a.m_v;
            j["m_h"] = a.m_h;
            j["delta_v_m"] = a.delta_v;
            j["delta_h_m"] = a.delta_h;
            j["beta_v_e_deg"] = out_deg(a.orientation.beta_v_e);
            j["beta_v_a_deg"] = out_deg(a.orientation.beta_v_a);
            j["beta_h_e_deg"] = out_deg(a.orientation.beta_h_e);
            j["beta_h_a_deg"] = out_deg(a.orientation.beta_h_a);
            j["gamma_x_deg"] = out_deg(a.rotation.gamma_x);
            j["gamma_y_deg"] = out_deg(a.rotation.gamma_y);
            j["gamma_z_deg"] = out_deg(a.rotation.gamma_z);
            j["pattern"] = pattern_name(pattern);
            if (!a.explicit_offsets.empty())
            {
                json offs = json::array();
                for (const auto &v : a.explicit_offsets)
                    offs.push_back({v.x, v.y, v.z});
                j["element_offsets_m"] = offs;
            }
            return j;
        }

        inline void read_motion(Section s, MotionState &m)
        {
            m.speed = s.non_negative("speed_mps");
            m.alpha_e = s.angle("alpha_e_deg");
            m.alpha_a = s.angle("alpha_a_deg");
            s.finish();
        }

        inline json write_motion(const MotionState &m)
        {
            json j;
            j["speed_mps"] = m.speed;
            j["alpha_e_deg"] = out_deg(m.alpha_e);
            j["alpha_a_deg"] = out_deg(m.alpha_a);
            return j;
        }

        inline std::size_t count(Section &s, const std::string &key, bool allow_zero = false)
        {
            const auto v = s.get<long long>(key);
            if (v < 0 || (!allow_zero && v == 0))
                throw ConfigError("config: field '" + s.key_path(key) + "' must be " +
                                  (allow_zero ? "non-negative" : "positive"));
            return static_cast<std::size_t>(v);
        }
    } // namespace detail

    // Parses and validates a configuration document. Relative file references resolve
    // against base_dir.
    inline SimulationConfig parse_config(const std::string &text, const std::filesystem::path &base_dir = {})
    {
        using detail::Section;
        detail::json doc;
        try
        {
            doc = detail::json::parse(text, nullptr, true, true);
        }
        catch (const detail::json::parse_error &e)
        {
            throw ConfigError(std::string("config: parse error: ") + e.what());
        }
        SimulationConfig cfg;
        ModelParams &m = cfg.model;
        Section root(doc, "");

        {
            Section s = root.sub("scenario");
            m.los_distance = s.positive("los_distance_m");
            m.los_azimuth = s.angle("los_azimuth_deg");
            m.los_elevation = s.angle("los_elevation_deg");
            s.finish();
        }
        detail::read_array(root.sub("tx_array"), m.tx_array, m.tx_pattern);
        detail::read_array(root.sub("rx_array"), m.rx_array, m.rx_pattern);
        detail::read_motion(root.sub("tx_motion"), m.tx_motion);
        detail::read_motion(root.sub("rx_motion"), m.rx_motion);
        {
            Section s = root.sub("band");
            m.band.f_start = s.positive("f_start_hz");
            m.band.f_stop = s.positive("f_stop_hz");
            m.band.n_sub = detail::count(s, "n_subbands");
            m.band.f_c.reset();
            if (s.has("f_c_hz"))
                m.band.f_c = s.positive("f_c_hz");
            s.finish();
            if (!(m.band.f_stop > m.band.f_start))
                throw ConfigError("config: field 'band.f_stop_hz' must exceed 'band.f_start_hz'");
        }
        {
            Section s = root.sub("time");
            m.time.n_snapshots = detail::count(s, "n_snapshots");
            m.time.interval_s = s.positive("interval_s");
            s.finish();
        }
        {
            Section s = root.sub("los");
            m.los_enabled = s.get<bool>("enabled");
            m.k_factor = std::pow(10.0, s.get<double>("k_factor_db") / 10.0);
            const auto phase = s.get<std::string>("phase");
            if (phase == "random")
                m.los_phase = LosPhaseMode::random;
            else if (phase == "distance_locked")
                m.los_phase = LosPhaseMode::distance_locked;
            else
                throw ConfigError("config: field 'los.phase' must be \"random\" or \"distance_locked\"");
            s.finish();
        }
        {
            Section s = root.sub("clusters");
            ClusterLaw &c = m.clusters;
            m.initial_cluster_count.reset();
            if (s.has("initial_count"))
                m.initial_cluster_count = detail::count(s, "initial_count");
            c.d_bar_n = s.positive("d_bar_n_m");
            c.aoa_std_a = s.angle("aoa_std_azimuth_deg");
            c.aoa_std_e = s.angle("aoa_std_elevation_deg");
            c.aod_std_a = s.angle("aod_std_azimuth_deg");
            c.aod_std_e = s.angle("aod_std_elevation_deg");
            c.azimuth_sector_min = s.angle("azimuth_sector_min_deg");
            c.azimuth_sector_max = s.angle("azimuth_sector_max_deg");
            c.elevation_sector_min = s.angle("elevation_sector_min_deg");
            c.elevation_sector_max = s.angle("elevation_sector_max_deg");
            c.multi_bounce_probability = s.get<double>("multi_bounce_probability");
            c.rc_min = s.get<double>("rc_min");
            c.rc_max = s.get<double>("rc_max");
            c.z_sigma_db = s.non_negative("shadowing_std_db");
            s.finish();
            if (c.azimuth_sector_max < c.azimuth_sector_min || c.elevation_sector_max < c.elevation_sector_min)
                throw ConfigError("config: cluster angle sectors must have max >= min");
        }
        {
            Section s = root.sub("rays");
            ClusterLaw &c = m.clusters;
            const auto mode = s.get<std::string>("count_mode");
            if (mode == "poisson")
                c.ray_count_mode = RayCountMode::poisson;
            else if (mode == "fixed")
                c.ray_count_mode = RayCountMode::fixed;
            else
                throw ConfigError("config: field 'rays.count_mode' must be \"poisson\" or \"fixed\"");
            c.lambda_tilde = s.positive("lambda_tilde");
            c.fixed_ray_count = detail::count(s, "fixed_count");
            c.ray_sigmas.a_tx = s.angle("sigma_aod_azimuth_deg");
            c.ray_sigmas.e_tx = s.angle("sigma_aod_elevation_deg");
            c.ray_sigmas.a_rx = s.angle("sigma_aoa_azimuth_deg");
            c.ray_sigmas.e_rx = s.angle("sigma_aoa_elevation_deg");
            c.xpr_mean_db = s.get<double>("xpr_mean_db");
            c.xpr_std_db = s.non_negative("xpr_std_db");
            c.freq_exponent_mean = s.get<double>("freq_exponent_mean");
            c.freq_exponent_std = s.non_negative("freq_exponent_std");
            s.finish();
        }
        {
            Section s = root.sub("birth_death");
            BirthDeathParams &b = m.birth_death;
            b.lambda_g = s.positive("lambda_g");
            b.lambda_r = s.positive("lambda_r");
            b.d_c_a = s.positive("d_c_a_m");
            b.d_c_s = s.positive("d_c_s_m");
            b.b_c_f = s.positive("b_c_f_hz");
            b.rho_s = s.positive("rho_s");
            m.time_birth_death = s.get<bool>("time_enabled");
            m.array_birth_death = s.get<bool>("array_enabled");
            m.frequency_birth_death = s.get<bool>("frequency_enabled");
            s.finish();
        }
        {
            Section s = root.sub("power");
            PowerParams &p = m.power;
            p.delay_spread = s.positive("delay_spread_s");
            p.r_tau = s.get<double>("r_tau");
            p.xi_mu = s.get<double>("xi_mu_log10");
            p.xi_sigma = s.non_negative("xi_sigma_log10");
            p.n_sinusoids = detail::count(s, "n_sinusoids");
            p.spatial_freq_max = s.non_negative("spatial_freq_max_rad_per_m");
            s.finish();
            if (!(p.r_tau > 1.0))
                throw ConfigError("config: field 'power.r_tau' must be greater than 1");
        }
        {
            Section s = root.sub("large_scale");
            LargeScaleParams &l = m.large_scale;
            l.pl0_db.reset();
            if (s.has("pl0_db"))
                l.pl0_db = s.get<double>("pl0_db");
            l.gamma = s.get<double>("gamma");
            l.ref_distance = s.positive("ref_distance_m");
            l.sh_sigma_db = s.non_negative("shadowing_std_db");
            l.redraw_per_subband = s.get<bool>("redraw_per_subband");
            {
                Section b = s.sub("blockage");
                const auto mode = b.get<std::string>("mode");
                if (mode == "none")
                    l.blockage.mode = BlockageMode::none;
                else if (mode == "constant")
                    l.blockage.mode = BlockageMode::constant;
                else if (mode == "markov")
                    l.blockage.mode = BlockageMode::markov;
                else
                    throw ConfigError("config: field 'large_scale.blockage.mode' must be none, constant or markov");
                l.blockage.loss_db = b.non_negative("loss_db");
                l.blockage.block_probability = b.get<double>("block_probability");
                l.blockage.dwell_probability = b.get<double>("dwell_probability");
                b.finish();
            }
            cfg.absorption_csv.clear();
            if (s.has("absorption_csv"))
            {
                cfg.absorption_csv = s.get<std::string>("absorption_csv");
                std::filesystem::path p(cfg.absorption_csv);
                if (p.is_relative())
                    p = base_dir / p;
                l.absorption = read_absorption_csv(p);
            }
            else
                l.absorption = AbsorptionTable::builtin();
            s.finish();
        }
        {
            Section s = root.sub("subarray");
            m.subarray_enabled = s.get<bool>("enabled");
            m.subarray_min_distance.reset();
            if (s.has("min_distance_m"))
                m.subarray_min_distance = s.positive("min_distance_m");
            s.finish();
        }
        {
            Section s = root.sub("simulation");
            cfg.run.realizations = detail::count(s, "realizations", true);
            cfg.run.master_seed = s.get<std::uint64_t>("master_seed");
            cfg.run.threads = detail::count(s, "threads");
            s.finish();
        }
        {
            Section s = root.sub("stats");
            StatsSettings &st = cfg.stats;
            st.c_th = s.get<double>("c_th");
            st.acf_lags = detail::count(s, "acf_lags");
            st.sccf_max_offset = detail::count(s, "sccf_max_offset", true);
            st.fcf_points = detail::count(s, "fcf_points");
            st.fcf_step_hz = s.non_negative("fcf_step_hz");
            st.angular_bin_deg = s.positive("angular_bin_deg");
            st.delay_resolution_s = s.non_negative("delay_resolution_s");
            const auto &anchors = s.raw("stationary_anchors_hz");
            if (!anchors.is_array())
                throw ConfigError("config: field 'stats.stationary_anchors_hz' must be an array");
            st.stationary_anchors_hz = anchors.get<std::vector<double>>();
            s.finish();
        }
        {
            Section s = root.sub("outputs");
            cfg.outputs.cir_binary = s.get<bool>("cir_binary");
            cfg.outputs.cir_csv = s.get<bool>("cir_csv");
            cfg.outputs.stats = s.get<bool>("stats");
            cfg.outputs.cir_realizations = detail::count(s, "cir_realizations", true);
            s.finish();
        }
        root.finish();
        cfg.validate();
        return cfg;
    }

    inline SimulationConfig load_config(const std::filesystem::path &path)
    {
        std::ifstream in(path);
        if (!in)
            throw ConfigError("config: cannot open '" + path.string() + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        return parse_config(ss.str(), path.parent_path());
    }

    inline std::string serialize_config(const SimulationConfig &cfg)
    {
        using detail::json;
        using detail::out_deg;
        const ModelParams &m = cfg.model;
        json j;
        j["scenario"] = {{"los_distance_m", m.los_distance},
                         {"los_azimuth_deg", out_deg(m.los_azimuth)},
                         {"los_elevation_deg", out_deg(m.los_elevation)}};
        j["tx_array"] = detail::write_array(m.tx_array, m.tx_pattern);
        j["rx_array"] = detail::write_array(m.rx_array, m.rx_pattern);
        j["tx_motion"] = detail::write_motion(m.tx_motion);
        j["rx_motion"] = detail::write_motion(m.rx_motion);
        json band = {{"f_start_hz", m.band.f_start}, {"f_stop_hz", m.band.f_stop}, {"n_subbands", m.band.n_sub}};
        if (m.band.f_c)
            band["f_c_hz"] = *m.band.f_c;
        j["band"] = band;
        j["time"] = {{"n_snapshots", m.time.n_snapshots}, {"interval_s", m.time.interval_s}};
        j["los"] = {{"enabled", m.los_enabled},
                    {"k_factor_db", std::round(10.0 * std::log10(m.k_factor) * 1e9) / 1e9},
                    {"phase", m.los_phase == LosPhaseMode::random ? "random" : "distance_locked"}};
        const ClusterLaw &c = m.clusters;
        json cl;
        if (m.initial_cluster_count)
            cl["initial_count"] = *m.initial_cluster_count;
        cl["d_bar_n_m"] = c.d_bar_n;
        cl["aoa_std_azimuth_deg"] = out_deg(c.aoa_std_a);
        cl["aoa_std_elevation_deg"] = out_deg(c.aoa_std_e);
        cl["aod_std_azimuth_deg"] = out_deg(c.aod_std_a);
        cl["aod_std_elevation_deg"] = out_deg(c.aod_std_e);
        cl["azimuth_sector_min_deg"] = out_deg(c.azimuth_sector_min);
        cl["azimuth_sector_max_deg"] = out_deg(c.azimuth_sector_max);
        cl["elevation_sector_min_deg"] = out_deg(c.elevation_sector_min);
        cl["elevation_sector_max_deg"] = out_deg(c.elevation_sector_max);
        cl["multi_bounce_probability"] = c.multi_bounce_probability;
        cl["rc_min"] = c.rc_min;
        cl["rc_max"] = c.rc_max;
        cl["shadowing_std_db"] = c.z_sigma_db;
        j["clusters"] = cl;
        j["rays"] = {{"count_mode", c.ray_count_mode == RayCountMode::poisson ? "poisson" : "fixed"},
                     {"lambda_tilde", c.lambda_tilde},
                     {"fixed_count", c.fixed_ray_count},
                     {"sigma_aod_azimuth_deg", out_deg(c.ray_sigmas.a_tx)},
                     {"sigma_aod_elevation_deg", out_deg(c.ray_sigmas.e_tx)},
                     {"sigma_aoa_azimuth_deg", out_deg(c.ray_sigmas.a_rx)},
                     {"sigma_aoa_elevation_deg", out_deg(c.ray_sigmas.e_rx)},
                     {"xpr_mean_db", c.xpr_mean_db},
                     {"xpr_std_db", c.xpr_std_db},
                     {"freq_exponent_mean", c.freq_exponent_mean},
                     {"freq_exponent_std", c.freq_exponent_std}};
        const BirthDeathParams &b = m.birth_death;
        j["birth_death"] = {{"lambda_g", b.lambda_g},       {"lambda_r", b.lambda_r},
                            {"d_c_a_m", b.d_c_a},           {"d_c_s_m", b.d_c_s},
                            {"b_c_f_hz", b.b_c_f},          {"rho_s", b.rho_s},
                            {"time_enabled", m.time_birth_death},
                            {"array_enabled", m.array_birth_death},
                            {"frequency_enabled", m.frequency_birth_death}};
        const PowerParams &p = m.power;
        j["power"] = {{"delay_spread_s", p.delay_spread},  {"r_tau", p.r_tau},
                      {"xi_mu_log10", p.xi_mu},            {"xi_sigma_log10", p.xi_sigma},
                      {"n_sinusoids", p.n_sinusoids},      {"spatial_freq_max_rad_per_m", p.spatial_freq_max}};
        const LargeScaleParams &l = m.large_scale;
        json ls;
        if (l.pl0_db)
            ls["pl0_db"] = *l.pl0_db;
        ls["gamma"] = l.gamma;
        ls["ref_distance_m"] = l.ref_distance;
        ls["shadowing_std_db"] = l.sh_sigma_db;
        ls["redraw_per_subband"] = l.redraw_per_subband;
        const char *mode = l.blockage.mode == BlockageMode::none       ? "none"
                           : l.blockage.mode == BlockageMode::constant ? "constant"
                                                                       : "markov";
        ls["blockage"] = {{"mode", mode},
                          {"loss_db", l.blockage.loss_db},
                          {"block_probability", l.blockage.block_probability},
                          {"dwell_probability", l.blockage.dwell_probability}};
        if (!cfg.absorption_csv.empty())
            ls["absorption_csv"] = cfg.absorption_csv;
        j["large_scale"] = ls;
        json sa = {{"enabled", m.subarray_enabled}};
        if (m.subarray_min_distance)
            sa["min_distance_m"] = *m.subarray_min_distance;
        j["subarray"] = sa;
        j["simulation"] = {{"realizations", cfg.run.realizations},
                           {"master_seed", cfg.run.master_seed},
                           {"threads", cfg.run.threads}};
        const StatsSettings &st = cfg.stats;
        j["stats"] = {{"c_th", st.c_th},
                      {"acf_lags", st.acf_lags},
                      {"sccf_max_offset", st.sccf_max_offset},
                      {"fcf_points", st.fcf_points},
                      {"fcf_step_hz", st.fcf_step_hz},
                      {"angular_bin_deg", st.angular_bin_deg},
                      {"delay_resolution_s", st.delay_resolution_s},
                      {"stationary_anchors_hz", st.stationary_anchors_hz}};
        j["outputs"] = {{"cir_binary", cfg.outputs.cir_binary},
                        {"cir_csv", cfg.outputs.cir_csv},
                        {"stats", cfg.outputs.stats},
                        {"cir_realizations", cfg.outputs.cir_realizations}};
        return j.dump(2) + "\n";
    }
} // namespace stfchan
